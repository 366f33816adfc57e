use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde_json::Value;

use slopebound::bounds::{
    boundary_count_bound, intersection_bound, length_bound, length_threshold, slope_count_bound,
    slopes_within, total_length_check, CuspTorus, Length, NullHomologous, PiLinear,
};
use slopebound::counting::{
    coprime_density, dirichlet_density, n_gd, CountResult, CountSpec, RadiusMode,
};
use slopebound::decimal::{format_decimal, format_fraction, parse_rational};
use slopebound::lattice::LatticeBasis;
use slopebound::seifert::{
    check_euler_relation, check_fiber_sums, euler_relation_value, solve_slope, BoundarySystem,
    Fiber, SeifertPresentation,
};
use slopebound::threshold::{SquaredRadius, Threshold};
use slopebound::{Error, PreciseReal, Precision, QuadReal};

use crate::output::Record;

const DIGITS: usize = 12;

/// Settings shared by every subcommand.
#[derive(Clone, Copy, Debug)]
pub struct Context {
    pub precision: Precision,
    pub mode: RadiusMode,
}

fn scaled(x: &BigRational, digits: usize) -> BigRational {
    x * BigRational::from_integer(num_traits::pow(BigInt::from(10), digits))
}

/// Outward-rounded decimal endpoints of an enclosure.
fn endpoints(x: &PreciseReal, digits: usize) -> (String, String) {
    let den = BigRational::from_integer(num_traits::pow(BigInt::from(10), digits));
    let lo = scaled(&x.lo().to_rational(), digits).floor() / &den;
    let hi = scaled(&x.hi().to_rational(), digits).ceil() / &den;
    (format_decimal(&lo, digits), format_decimal(&hi, digits))
}

fn real_fields(mut r: Record, name: &str, x: &PreciseReal) -> Record {
    let (lo, hi) = endpoints(x, DIGITS);
    r = r.field(name, x.to_decimal(DIGITS));
    r.field(&format!("{name}_lo"), lo)
        .field(&format!("{name}_hi"), hi)
}

fn count_value(c: &CountResult) -> Value {
    if c.value_lo == c.value_hi {
        Value::from(c.value_hi)
    } else {
        Value::String(format!("[{}, {}]", c.value_lo, c.value_hi))
    }
}

fn witness(c: &CountResult) -> String {
    match &c.witness_exact {
        Some(x) => format_fraction(x),
        None => c.witness_x.to_decimal(20),
    }
}

fn radius_formula(mode: RadiusMode) -> &'static str {
    match mode {
        RadiusMode::TwoPi => "2*g*pi/d",
        RadiusMode::Six => "6*g/d",
    }
}

fn ngd_record(
    ctx: &Context,
    g: &BigRational,
    d: &BigRational,
    d_text: &str,
) -> Result<Record, Error> {
    let spec = CountSpec::new(g.clone(), d.clone(), ctx.mode, ctx.precision)?;
    let c = n_gd(&spec)?;
    Ok(Record::new(
        "ngd",
        &format!(
            "half the maximum number of primitive vectors of the lattice (1,0),(x,sqrt3) \
             in the closed disk of radius {} over x in [0,1/2]",
            radius_formula(ctx.mode)
        ),
    )
    .input("g", format_fraction(g))
    .input("d", d_text.trim())
    .input("radius_constant", ctx.mode.label())
    .field("value", count_value(&c))
    .field("value_lo", c.value_lo)
    .field("value_hi", c.value_hi)
    .field("witness_x", witness(&c))
    .field("breakpoints", c.breakpoint_count)
    .field("samples", c.samples_evaluated)
    .certified(c.certified))
}

fn require_g(g: &BigRational) -> Result<(), Error> {
    if g < &BigRational::one() {
        return Err(Error::InvalidInput(format!(
            "g must be at least 1, got {g}"
        )));
    }
    Ok(())
}

pub fn ngd(ctx: &Context, g_text: &str, d: &str) -> Result<Vec<Record>, Error> {
    let g = parse_rational(g_text)?;
    require_g(&g)?;
    let mut r = ngd_record(ctx, &g, &parse_rational(d)?, d)?;
    r.inputs[0].1 = g_text.trim().to_string();
    Ok(vec![r])
}

pub fn table(ctx: &Context, g_max: u64, d: &str) -> Result<Vec<Record>, Error> {
    if g_max == 0 {
        return Err(Error::InvalidInput("g-max must be at least 1".into()));
    }
    let d_value = parse_rational(d)?;
    (1..=g_max)
        .map(|g| {
            let g = BigRational::from_integer(g.into());
            let mut r = ngd_record(ctx, &g, &d_value, d)?;
            r.command = "table".into();
            Ok(r)
        })
        .collect()
}

/// `x1,y1;x2,y2` with each entry a decimal, fraction or multiple of `sqrt3`.
pub fn parse_basis(text: &str) -> Result<LatticeBasis, Error> {
    let vectors: Vec<&str> = text.split(';').collect();
    if vectors.len() != 2 {
        return Err(Error::Parse(format!(
            "basis {text:?} must have two vectors separated by ';'"
        )));
    }
    let mut parsed = Vec::new();
    for v in vectors {
        let coords: Vec<&str> = v.split(',').collect();
        if coords.len() != 2 {
            return Err(Error::Parse(format!("basis vector {v:?} must be x,y")));
        }
        parsed.push([
            coords[0].parse::<QuadReal>()?,
            coords[1].parse::<QuadReal>()?,
        ]);
    }
    let e2 = parsed.pop().expect("two vectors");
    let e1 = parsed.pop().expect("two vectors");
    LatticeBasis::new(e1, e2)
}

pub fn slopes(
    ctx: &Context,
    basis: &str,
    g: Option<&str>,
    max_length: Option<&str>,
) -> Result<Vec<Record>, Error> {
    let lattice = parse_basis(basis)?;
    let torus = CuspTorus::from_lattice(&lattice)?;
    let (squared, key, value, formula) = match (g, max_length) {
        (Some(text), None) => {
            let g = parse_rational(text)?;
            let formula = match ctx.mode {
                RadiusMode::TwoPi => "primitive lattice vectors of length at most 2*g*pi",
                RadiusMode::Six => "primitive lattice vectors of length at most 6*g",
            };
            (length_threshold(&g, ctx.mode), "g", text.trim(), formula)
        }
        (None, Some(text)) => {
            let l = parse_rational(text)?;
            (
                SquaredRadius::Rational(&l * &l),
                "max_length",
                text.trim(),
                "primitive lattice vectors of length at most max_length",
            )
        }
        _ => {
            return Err(Error::InvalidInput(
                "exactly one of --g and --max-length is required".into(),
            ))
        }
    };
    let bound = Threshold::new(squared, ctx.precision);
    let found = slopes_within(&torus, &bound)?;
    let mut rows: Vec<_> = found
        .into_iter()
        .map(|s| {
            let shown = torus.to_input_frame(s);
            (torus.basis().squared_length(s.vector()), shown, s)
        })
        .collect();
    rows.sort_by(|a, b| {
        a.0.cmp(&b.0)
            .then_with(|| (a.1.p(), a.1.q()).cmp(&(b.1.p(), b.1.q())))
    });
    let bits = ctx.precision.bits;
    Ok(rows
        .into_iter()
        .map(|(len2, shown, s)| {
            let mut r = Record::new("slopes", formula)
                .input("basis", basis)
                .input(key, value);
            if key == "g" {
                r = r.input("radius_constant", ctx.mode.label());
            }
            r.field("p", shown.p())
                .field("q", shown.q())
                .field(
                    "length",
                    torus.basis().length(s.vector(), bits).to_decimal(DIGITS),
                )
                .field("length_squared", len2.to_string())
        })
        .collect())
}

pub fn bound_length(g: u64, n: u64, ctx: &Context) -> Result<Vec<Record>, Error> {
    let b = length_bound(g, n)?;
    let r = Record::new("bounds length", "2*pi*(2g-2+n)/n")
        .input("g", g)
        .input("n", n)
        .field("value", b.to_string());
    Ok(vec![real_fields(
        r,
        "decimal",
        &b.enclose(ctx.precision.bits),
    )])
}

pub fn bound_intersect(
    ctx: &Context,
    g1: u64,
    g2: u64,
    area: Option<&str>,
    null_homologous: NullHomologous,
) -> Result<Vec<Record>, Error> {
    let (area_q, area_text, assumed) = match area {
        Some(a) => (a.parse::<QuadReal>()?, a.to_string(), false),
        None => {
            let floor = slopebound::bounds::CUSP_AREA_FLOOR;
            (floor.parse::<QuadReal>()?, floor.to_string(), true)
        }
    };
    let value = intersection_bound(
        g1,
        g2,
        &area_q,
        null_homologous,
        ctx.mode,
        ctx.precision.bits,
    )?;
    let mut formula = match ctx.mode {
        RadiusMode::TwoPi => "4*pi^2*g1*g2/area".to_string(),
        RadiusMode::Six => "36*g1*g2/area".to_string(),
    };
    if null_homologous == NullHomologous::One {
        formula = format!("2*{formula}");
    }
    let r = Record::new("bounds intersect", &formula)
        .input("g1", g1)
        .input("g2", g2)
        .input("area", &area_text)
        .input("area_floor_assumed", assumed)
        .input(
            "null_homologous",
            match null_homologous {
                NullHomologous::None => "none",
                NullHomologous::One => "one",
            },
        )
        .input("radius_constant", ctx.mode.label());
    let r = real_fields(r, "value", &value);
    Ok(vec![
        r.field("max_intersection", value.hi().floor().to_string())
    ])
}

pub fn bound_count(ctx: &Context, g: u64, k_text: &str) -> Result<Vec<Record>, Error> {
    let k = parse_rational(k_text)?;
    let b = boundary_count_bound(g, &k, ctx.precision)?;
    Ok(vec![Record::new(
        "bounds count",
        "boundary components at most (2g-2)/(k-1) except on at most N(k,1) slopes",
    )
    .input("g", g)
    .input("k", k_text.trim())
    .field("bound", format_fraction(&b.bound))
    .field("exceptions", count_value(&b.exceptions))
    .certified(b.exceptions.certified)])
}

pub fn bound_slope_count(ctx: &Context, g: u64, d_text: &str) -> Result<Vec<Record>, Error> {
    let d = parse_rational(d_text)?;
    let b = slope_count_bound(g, &d, ctx.mode, ctx.precision)?;
    let formula = if g <= 1 { "N(1,d)" } else { "N(g,d)+1" };
    Ok(vec![Record::new("bounds slope-count", formula)
        .input("g", g)
        .input("d", d_text.trim())
        .input("radius_constant", ctx.mode.label())
        .field("value", b.value)
        .certified(b.certified)])
}

/// One length: a rational, optionally followed by `pi` or `*pi`.
pub fn parse_length(text: &str) -> Result<PiLinear, Error> {
    let t = text.trim();
    if let Some(head) = t.strip_suffix("pi") {
        let head = head.trim().trim_end_matches('*').trim();
        let c = match head {
            "" | "+" => BigRational::one(),
            "-" => -BigRational::one(),
            h => parse_rational(h)?,
        };
        return Ok(PiLinear::pi_multiple(c));
    }
    Ok(PiLinear::rational(parse_rational(t)?))
}

pub fn bound_total(ctx: &Context, g: u64, lengths: &str) -> Result<Vec<Record>, Error> {
    let parsed = lengths
        .split(',')
        .map(|s| parse_length(s).map(Length::Exact))
        .collect::<Result<Vec<_>, _>>()?;
    let verdict = total_length_check(&parsed, g, ctx.precision)?;
    Ok(vec![Record::new(
        "bounds total",
        "sum(L_i - 2*pi) <= 2*pi*(2g-2)",
    )
    .input("g", g)
    .input("lengths", lengths)
    .field("verdict", verdict.label())
    .certified(verdict != slopebound::bounds::Verdict::Undecided)])
}

fn parse_fibers(text: &str) -> Result<Vec<Fiber>, Error> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect()
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

const SEIFERT_FORMULA: &str =
    "sum_j u_ij = u on every torus; u*sum(beta/alpha) + sum v_ij/u_ij = 0";

pub fn seifert_verify(
    genus: u64,
    fibers: &str,
    u: i64,
    curves: &str,
) -> Result<Vec<Record>, Error> {
    let sys = BoundarySystem::parse(curves, u)?;
    let pres = SeifertPresentation::new(genus, sys.tori.len() as u64, parse_fibers(fibers)?)?;
    let sums = check_fiber_sums(&sys);
    let value = euler_relation_value(&pres, &sys)?;
    let holds = check_euler_relation(&pres, &sys)?;
    Ok(vec![Record::new("seifert verify", SEIFERT_FORMULA)
        .input("genus", genus)
        .input("fibers", fibers)
        .input("u", u)
        .input("curves", curves)
        .field(
            "fiber_sum",
            sums.iter()
                .map(|&ok| pass(ok))
                .collect::<Vec<_>>()
                .join(","),
        )
        .field("euler_relation", pass(holds))
        .field("euler_value", format_fraction(&value))])
}

pub fn seifert_solve(genus: u64, fibers: &str, u: i64, n: u64) -> Result<Vec<Record>, Error> {
    let pres = SeifertPresentation::new(genus, 1, parse_fibers(fibers)?)?;
    let s = solve_slope(&pres, u, n)?;
    Ok(vec![Record::new("seifert solve", SEIFERT_FORMULA)
        .input("genus", genus)
        .input("fibers", fibers)
        .input("u", u)
        .input("n", n)
        .field("slope", s.to_string())
        .field(
            "multiplicities",
            s.multiplicities
                .iter()
                .map(i64::to_string)
                .collect::<Vec<_>>()
                .join(","),
        )
        .field("degenerate", s.degenerate)])
}

pub fn density(ctx: &Context, radius: u64) -> Result<Vec<Record>, Error> {
    let value = coprime_density(radius)?;
    let bits = ctx.precision.bits;
    let limit = dirichlet_density(bits);
    let gap = PreciseReal::from_rational(&value, bits).sub(&limit).abs();
    let r = Record::new(
        "density",
        "coprime fraction of nonzero integer pairs in the disk, compared with 6/pi^2",
    )
    .input("radius", radius)
    .field("value", format_fraction(&value))
    .field("decimal", format_decimal(&value, DIGITS))
    .field("limit", limit.to_decimal(DIGITS));
    let (_, gap_hi) = endpoints(&gap, DIGITS);
    Ok(vec![r.field("deviation", gap_hi)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn ctx() -> Context {
        Context {
            precision: Precision::default(),
            mode: RadiusMode::TwoPi,
        }
    }

    #[test]
    fn parses_lengths() {
        let pi = |c: i64| PiLinear::pi_multiple(BigRational::from_integer(c.into()));
        assert_eq!(parse_length("2pi").unwrap(), pi(2));
        assert_eq!(parse_length("pi").unwrap(), pi(1));
        assert_eq!(parse_length(" 3*pi ").unwrap(), pi(3));
        assert!(parse_length("6.28").unwrap().pi.is_zero());
        assert!(parse_length("x").is_err());
    }

    #[test]
    fn basis_parsing() {
        assert!(parse_basis("1,0;0,sqrt3").is_ok());
        assert!(parse_basis("1,0").is_err());
        assert!(parse_basis("1,0;0").is_err());
        assert!(matches!(
            parse_basis("1,0;2,0"),
            Err(Error::DegenerateBasis)
        ));
    }

    #[test]
    fn endpoints_round_outward() {
        let x = PreciseReal::pi(64);
        let (lo, hi) = endpoints(&x, 4);
        assert_eq!((lo.as_str(), hi.as_str()), ("3.1415", "3.1416"));
    }

    #[test]
    fn ngd_requires_g_at_least_one() {
        assert!(ngd(&ctx(), "0.5", "1").is_err());
        assert!(table(&ctx(), 0, "1").is_err());
    }
}
