//! Command-line front end for slope counting and the related bounds.

mod commands;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use slopebound::bounds::NullHomologous;
use slopebound::counting::RadiusMode;
use slopebound::{Error, Precision};

use commands::Context;
use output::{write_records, Emit, Record};

#[derive(Parser, Debug)]
#[command(
    name = "slopebound",
    version,
    about = "Certified counts of short slopes on cusp tori"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Emit::Text)]
    emit: Emit,
    /// Starting precision in bits.
    #[arg(
        long,
        global = true,
        env = "SLOPEBOUND_PRECISION",
        default_value_t = 64
    )]
    precision: u32,
    /// Precision cap in bits.
    #[arg(long, global = true, default_value_t = 1024)]
    max_precision: u32,
    /// Exit with status 2 if any result is not certified.
    #[arg(long, global = true)]
    require_certified: bool,
    /// Length threshold: 2*g*pi (`2pi`) or 6*g (`6`).
    #[arg(long, global = true, default_value = "2pi", value_parser = parse_mode)]
    radius_constant: RadiusMode,
    #[command(subcommand)]
    command: Command,
}

fn parse_mode(s: &str) -> Result<RadiusMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_null(s: &str) -> Result<NullHomologous, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate N(g, d).
    Ngd {
        #[arg(long)]
        g: String,
        #[arg(long, default_value = "1")]
        d: String,
    },
    /// N(g, d) for g = 1..g-max.
    Table {
        #[arg(long)]
        g_max: u64,
        #[arg(long, default_value = "1")]
        d: String,
    },
    /// List short slopes of a cusp lattice, shortest first.
    Slopes {
        /// `x1,y1;x2,y2`; entries may use `sqrt3`.
        #[arg(long, allow_hyphen_values = true)]
        basis: String,
        #[arg(
            long,
            conflicts_with = "max_length",
            required_unless_present = "max_length"
        )]
        g: Option<String>,
        #[arg(long)]
        max_length: Option<String>,
    },
    /// Closed-form bounds.
    #[command(subcommand)]
    Bounds(BoundsCommand),
    /// Boundary equations of horizontal surfaces.
    #[command(subcommand)]
    Seifert(SeifertCommand),
    /// Fraction of coprime pairs in a disk.
    Density {
        #[arg(long)]
        radius: u64,
    },
}

#[derive(Subcommand, Debug)]
enum BoundsCommand {
    /// Length bound for a boundary curve.
    Length {
        #[arg(long)]
        g: u64,
        #[arg(long)]
        n: u64,
    },
    /// Intersection number bound between boundary slopes.
    Intersect {
        #[arg(long)]
        g1: u64,
        #[arg(long)]
        g2: u64,
        /// Cusp area; defaults to the maximal-cusp floor 3.35.
        #[arg(long)]
        area: Option<String>,
        #[arg(long, default_value = "none", value_parser = parse_null)]
        null_homologous: NullHomologous,
    },
    /// Boundary component count bound.
    Count {
        #[arg(long)]
        g: u64,
        #[arg(long)]
        k: String,
    },
    /// Number of slopes that can bound a genus g surface.
    SlopeCount {
        #[arg(long)]
        g: u64,
        #[arg(long, default_value = "1")]
        d: String,
    },
    /// Total length inequality for the boundary curves.
    Total {
        #[arg(long)]
        g: u64,
        /// Comma-separated lengths such as `2pi,6.5`.
        #[arg(long, allow_hyphen_values = true)]
        lengths: String,
    },
}

#[derive(Args, Debug)]
struct SeifertCommon {
    /// Comma-separated `alpha/beta` pairs.
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    fibers: String,
    #[arg(long, allow_hyphen_values = true)]
    u: i64,
    #[arg(long, default_value_t = 0)]
    genus: u64,
}

#[derive(Subcommand, Debug)]
enum SeifertCommand {
    /// Check boundary curves against both relations.
    Verify {
        #[command(flatten)]
        common: SeifertCommon,
        /// `u,v;u,v|u,v`: `;` separates curves, `|` separates tori.
        #[arg(long, allow_hyphen_values = true)]
        curves: String,
    },
    /// Solve for the boundary slope on a single torus.
    Solve {
        #[command(flatten)]
        common: SeifertCommon,
        #[arg(long)]
        n: u64,
    },
}

fn run(cli: &Cli) -> Result<Vec<Record>, Error> {
    let ctx = Context {
        precision: Precision::new(cli.precision, cli.max_precision)?,
        mode: cli.radius_constant,
    };
    match &cli.command {
        Command::Ngd { g, d } => commands::ngd(&ctx, g, d),
        Command::Table { g_max, d } => commands::table(&ctx, *g_max, d),
        Command::Slopes {
            basis,
            g,
            max_length,
        } => commands::slopes(&ctx, basis, g.as_deref(), max_length.as_deref()),
        Command::Bounds(b) => match b {
            BoundsCommand::Length { g, n } => commands::bound_length(*g, *n, &ctx),
            BoundsCommand::Intersect {
                g1,
                g2,
                area,
                null_homologous,
            } => commands::bound_intersect(&ctx, *g1, *g2, area.as_deref(), *null_homologous),
            BoundsCommand::Count { g, k } => commands::bound_count(&ctx, *g, k),
            BoundsCommand::SlopeCount { g, d } => commands::bound_slope_count(&ctx, *g, d),
            BoundsCommand::Total { g, lengths } => commands::bound_total(&ctx, *g, lengths),
        },
        Command::Seifert(s) => match s {
            SeifertCommand::Verify { common, curves } => {
                commands::seifert_verify(common.genus, &common.fibers, common.u, curves)
            }
            SeifertCommand::Solve { common, n } => {
                commands::seifert_solve(common.genus, &common.fibers, common.u, *n)
            }
        },
        Command::Density { radius } => commands::density(&ctx, *radius),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let records = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    if let Err(e) = write_records(&mut out, &records, cli.emit).and_then(|_| out.flush()) {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    if cli.require_certified && records.iter().any(|r| !r.certified) {
        eprintln!(
            "error: result is not certified at {} bits",
            cli.max_precision
        );
        return ExitCode::from(2);
    }
    ExitCode::SUCCESS
}
