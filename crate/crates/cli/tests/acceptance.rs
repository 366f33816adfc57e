//! End-to-end acceptance checks. Runs without the libtest harness so that
//! each criterion prints exactly one PASS/FAIL line.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use slopebound::bounds::{intersection_bound, length_bound, slope_count_bound, NullHomologous};
use slopebound::counting::{
    coprime_density, count_at, envelope, n_gd, n_gd_oracle, sweep, CountSpec, RadiusMode,
};
use slopebound::lattice::{diameter_certificate, reduce, LatticeBasis};
use slopebound::seifert::{
    check_euler_relation, check_fiber_sums, solve_slope, Fiber, SeifertPresentation,
};
use slopebound::{Precision, QuadReal};

const TABLE_LIMIT: Duration = Duration::from_secs(10);
const G30_LIMIT: Duration = Duration::from_secs(60);
const ORACLE_GRID: u64 = 10_000;
const ENVELOPE_RATIO: f64 = 0.968;
const ENVELOPE_RATIO_TOL: f64 = 0.001;
const DENSITY_TOL: f64 = 0.003;
const REDUCTION_CASES: usize = 1000;
const BRUTE_RANGE: i128 = 25;
const SEIFERT_CASES: usize = 500;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn f64_of(r: &BigRational) -> f64 {
    r.to_f64().unwrap()
}

fn spec(g: i64, d: &str, mode: RadiusMode) -> CountSpec {
    CountSpec::parse(&g.to_string(), d, mode).unwrap()
}

fn value(g: i64, d: &str, mode: RadiusMode) -> Result<u64, String> {
    let r = n_gd(&spec(g, d, mode)).map_err(|e| e.to_string())?;
    r.value()
        .ok_or_else(|| format!("N({g},{d}) uncertified: [{}, {}]", r.value_lo, r.value_hi))
}

fn cli(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_slopebound"))
        .args(args)
        .env_remove("SLOPEBOUND_PRECISION")
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("{args:?} exited with {:?}", out.status.code()));
    }
    Ok(out.stdout)
}

fn compare(label: &str, got: &[u64], want: &[u64]) -> Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("{label}: got {got:?}, expected {want:?}"))
    }
}

fn golden_table() -> Outcome {
    let start = Instant::now();
    let out = cli(&["table", "--g-max", "10", "--d", "1", "--emit", "json"])?;
    let elapsed = start.elapsed();
    let got: Vec<u64> = String::from_utf8(out)
        .map_err(|e| e.to_string())?
        .lines()
        .map(|l| {
            let v: Value = serde_json::from_str(l).unwrap();
            v["result"]["value"].as_u64().unwrap_or(0)
        })
        .collect();
    compare(
        "table",
        &got,
        &[24, 92, 198, 355, 549, 792, 1076, 1396, 1776, 2186],
    )?;
    if elapsed >= TABLE_LIMIT {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("table matches in {elapsed:.2?}"))
}

fn extended_values() -> Outcome {
    compare("N(20,1)", &[value(20, "1", RadiusMode::TwoPi)?], &[8715])?;
    let start = Instant::now();
    let r = n_gd(&spec(30, "1", RadiusMode::TwoPi)).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    if !(19599 <= r.value_lo && r.value_hi <= 19600) {
        return Err(format!("N(30,1) in [{}, {}]", r.value_lo, r.value_hi));
    }
    if !r.certified || r.value().is_none() {
        return Err("N(30,1) not certified to a single endpoint".into());
    }
    if elapsed >= G30_LIMIT {
        return Err(format!("g=30 took {elapsed:?}"));
    }
    Ok(format!(
        "N(30,1) = {} certified in {elapsed:.2?}",
        r.value_hi
    ))
}

fn d_variant() -> Outcome {
    let d = "1.15094";
    let got = [1, 2, 4]
        .iter()
        .map(|&g| value(g, d, RadiusMode::TwoPi))
        .collect::<Result<Vec<_>, _>>()?;
    compare("N(g,1.15094) for g = 1,2,4", &got, &[18, 69, 263])?;
    Ok("d-variant values match".into())
}

fn six_table() -> Outcome {
    let mode = RadiusMode::Six;
    let mut problems = Vec::new();
    let table = (1..=10)
        .map(|g| value(g, "1", mode))
        .collect::<Result<Vec<_>, _>>()?;
    if let Err(e) = compare(
        "g=1..10",
        &table,
        &[22, 80, 182, 323, 502, 721, 979, 1277, 1616, 1994],
    ) {
        problems.push(e);
    }
    if let Err(e) = compare("N(20,1)", &[value(20, "1", mode)?], &[7955]) {
        problems.push(e);
    }
    let r30 = n_gd(&spec(30, "1", mode)).map_err(|e| e.to_string())?;
    if !(17874 <= r30.value_lo && r30.value_hi <= 17875) {
        problems.push(format!("N(30,1) in [{}, {}]", r30.value_lo, r30.value_hi));
    }
    let d = "1.15094";
    let variant = [1, 2, 4]
        .iter()
        .map(|&g| value(g, d, mode))
        .collect::<Result<Vec<_>, _>>()?;
    if let Err(e) = compare("N(g,1.15094) for g = 1,2,4", &variant, &[16, 62, 242]) {
        problems.push(e);
    }
    if problems.is_empty() {
        Ok("six-mode values match".into())
    } else {
        Err(problems.join("; "))
    }
}

fn sweep_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut gaps = 0;
    for g in 1..=3 {
        for d in ["1", "1.15094"] {
            let s = spec(g, d, RadiusMode::TwoPi);
            let exact = n_gd(&s).map_err(|e| e.to_string())?;
            let oracle = n_gd_oracle(&s, ORACLE_GRID).map_err(|e| e.to_string())?;
            if exact.value() != Some(oracle) {
                return Err(format!("g={g} d={d}: sweep {exact}, oracle {oracle}"));
            }
            let sw = sweep(&s).map_err(|e| e.to_string())?;
            // groups hold upper-half counts; the two axis points are inside since R > 1
            let mut left = q(0, 1);
            let mut expected = 2 * sw.half_count_at_start();
            for group in sw.groups() {
                let right = group.breakpoint.x.lo().to_rational();
                if right > left {
                    for _ in 0..3 {
                        let t = q(rng.gen_range(1..1000), 1000);
                        let x = &left + (&right - &left) * t;
                        let c = count_at(&s, &x).map_err(|e| e.to_string())?;
                        if c.value() != Some(expected) {
                            return Err(format!("g={g} d={d} x={x}: {c:?}, gap value {expected}"));
                        }
                    }
                    gaps += 1;
                }
                left = group.breakpoint.x.hi().to_rational();
                expected = 2 * group.after + 2;
            }
        }
    }
    Ok(format!("oracle agrees on 6 cases, {gaps} gaps constant"))
}

fn narrative() -> Outcome {
    let sw = sweep(&spec(1, "1", RadiusMode::TwoPi)).map_err(|e| e.to_string())?;
    let values: Vec<u64> = sw.half_count_values().into_iter().collect();
    if values != [22, 23, 24] {
        return Err(format!("half-count values {values:?}"));
    }
    let ends = (sw.half_count_at_start(), sw.half_count_at_end());
    if ends != (24, 24) {
        return Err(format!("endpoint values {ends:?}"));
    }
    let moves = (sw.entering_points(), sw.leaving_points());
    if moves != (4, 4) {
        return Err(format!("entering/leaving {moves:?}"));
    }
    Ok("values {22, 23, 24}, 24 at both ends, 4 entering, 4 leaving".into())
}

fn envelope_property() -> Outcome {
    let mut last = None;
    for g in 1..=30 {
        let n = value(g, "1", RadiusMode::TwoPi)?;
        let env = envelope(&q(g, 1), 64).map_err(|e| e.to_string())?;
        if q(n as i64, 1) > env.lo().to_rational() {
            return Err(format!(
                "N({g},1) = {n} exceeds envelope {}",
                env.to_decimal(6)
            ));
        }
        last = Some(n as f64 / f64_of(&env.midpoint()));
    }
    let ratio = last.unwrap();
    if (ratio - ENVELOPE_RATIO).abs() > ENVELOPE_RATIO_TOL {
        return Err(format!("ratio at g=30 is {ratio:.5}"));
    }
    Ok(format!("ratio at g=30 is {ratio:.5}"))
}

fn dirichlet() -> Outcome {
    let limit = 6.0 / std::f64::consts::PI.powi(2);
    let d1000 = f64_of(&coprime_density(1000).map_err(|e| e.to_string())?);
    if (d1000 - limit).abs() > DENSITY_TOL {
        return Err(format!("density(1000) = {d1000}"));
    }
    let d2 = coprime_density(2).map_err(|e| e.to_string())?;
    if d2 != q(2, 3) {
        return Err(format!("density(2) = {d2}"));
    }
    Ok(format!("density(1000) = {d1000:.6}, density(2) = 2/3"))
}

fn bound_formulas() -> Outcome {
    let area = QuadReal::from_rational(q(335, 100));
    let two_pi = intersection_bound(1, 1, &area, NullHomologous::None, RadiusMode::TwoPi, 64)
        .map_err(|e| e.to_string())?;
    if !(two_pi.lo().to_rational() > q(1178, 100) && two_pi.hi().to_rational() <= q(118, 10)) {
        return Err(format!("intersection bound {}", two_pi.to_decimal(6)));
    }
    let six = intersection_bound(1, 1, &area, NullHomologous::None, RadiusMode::Six, 64)
        .map_err(|e| e.to_string())?;
    if six.hi().to_rational() > q(108, 10) {
        return Err(format!("six-mode intersection bound {}", six.to_decimal(6)));
    }
    for n in 1..=100 {
        let b = length_bound(1, n).map_err(|e| e.to_string())?;
        if !b.rational.is_zero() || b.pi != q(2, 1) {
            return Err(format!("length_bound(1, {n}) = {b}"));
        }
    }
    let count = slope_count_bound(2, &q(1, 1), RadiusMode::TwoPi, Precision::default())
        .map_err(|e| e.to_string())?;
    if count.value != 93 || !count.certified {
        return Err(format!("slope_count_bound(2, 1) = {}", count.value));
    }
    Ok(format!(
        "intersection {} / {}, length 2*pi, slope count 93",
        two_pi.to_decimal(4),
        six.to_decimal(4)
    ))
}

fn shortest_by_brute_force(e: [[i128; 2]; 2]) -> i128 {
    let mut best = i128::MAX;
    for m in -BRUTE_RANGE..=BRUTE_RANGE {
        for n in -BRUTE_RANGE..=BRUTE_RANGE {
            if (m, n) != (0, 0) {
                let v = [m * e[0][0] + n * e[1][0], m * e[0][1] + n * e[1][1]];
                best = best.min(v[0] * v[0] + v[1] * v[1]);
            }
        }
    }
    best
}

fn integer_entries(b: &LatticeBasis) -> [[i128; 2]; 2] {
    let conv = |x: &QuadReal| x.as_rational().unwrap().to_integer().to_i128().unwrap();
    [
        [conv(&b.e1()[0]), conv(&b.e1()[1])],
        [conv(&b.e2()[0]), conv(&b.e2()[1])],
    ]
}

fn reduction_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut certified = 0;
    let mut done = 0;
    while done < REDUCTION_CASES {
        // a short random basis scrambled by a random unimodular matrix
        let base = [
            [rng.gen_range(-12i64..=12), rng.gen_range(-12i64..=12)],
            [rng.gen_range(-12i64..=12), rng.gen_range(-12i64..=12)],
        ];
        if base[0][0] * base[1][1] - base[0][1] * base[1][0] == 0 {
            continue;
        }
        let (k1, k2) = (rng.gen_range(-3i64..=3), rng.gen_range(-3i64..=3));
        // [[1, k1], [0, 1]] * [[1, 0], [k2, 1]]
        let u = [[1 + k1 * k2, k1], [k2, 1]];
        let e1 = [
            u[0][0] * base[0][0] + u[0][1] * base[1][0],
            u[0][0] * base[0][1] + u[0][1] * base[1][1],
        ];
        let e2 = [
            u[1][0] * base[0][0] + u[1][1] * base[1][0],
            u[1][0] * base[0][1] + u[1][1] * base[1][1],
        ];
        let input = LatticeBasis::from_integers(e1, e2).map_err(|e| e.to_string())?;
        let red = reduce(&input).map_err(|e| e.to_string())?;
        let t = red.transform();
        if !t.is_unimodular() {
            return Err(format!("{e1:?},{e2:?}: transform not unimodular"));
        }
        let i = integer_entries(&input);
        let o = integer_entries(red.basis());
        for row in 0..2 {
            for col in 0..2 {
                let expect = t.0[row][0] as i128 * i[0][col] + t.0[row][1] as i128 * i[1][col];
                if o[row][col] != expect {
                    return Err(format!("{e1:?},{e2:?}: output is not transform * input"));
                }
            }
        }
        // coefficients of a shortest vector v in the short base basis obey
        // |m| <= |v| |e| / det <= |e| sqrt(2 / (sqrt3 det)) < 18, well inside the range
        let b = [
            [base[0][0] as i128, base[0][1] as i128],
            [base[1][0] as i128, base[1][1] as i128],
        ];
        let first = o[0][0] * o[0][0] + o[0][1] * o[0][1];
        if first != shortest_by_brute_force(b) {
            return Err(format!("{e1:?},{e2:?}: first vector is not shortest"));
        }
        let cert = diameter_certificate(&red, Precision::default()).map_err(|e| e.to_string())?;
        if cert.hypotheses_hold {
            if !cert.bound_holds {
                return Err(format!("{e1:?},{e2:?}: diameter bound fails"));
            }
            certified += 1;
        }
        done += 1;
    }
    Ok(format!(
        "{done} bases, {certified} with the diameter certificate"
    ))
}

fn seifert_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut solved = 0;
    let mut attempts = 0;
    while solved < SEIFERT_CASES {
        attempts += 1;
        if attempts > 100 * SEIFERT_CASES {
            return Err(format!("only {solved} solvable presentations found"));
        }
        let fibers: Vec<Fiber> = (0..rng.gen_range(1..=4))
            .filter_map(|_| Fiber::new(rng.gen_range(2..=9), rng.gen_range(-9..=9)).ok())
            .collect();
        let pres =
            SeifertPresentation::new(rng.gen_range(0..3), 1, fibers).map_err(|e| e.to_string())?;
        if pres.fiber_sum().is_zero() {
            continue;
        }
        // a fiber intersection that makes v0/u0 a multiple of 1/u0 with u0 | u
        let denom = pres.fiber_sum().denom().to_i64().unwrap();
        let n = rng.gen_range(1..=4u64);
        let u = denom * n as i64 * rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 };
        let slope = solve_slope(&pres, u, n).map_err(|e| format!("u={u} n={n}: {e}"))?;
        if slope.multiplicities.len() as u64 != n {
            return Err(format!("u={u} n={n}: wrong curve count"));
        }
        let sys = slope.expand(u);
        if !check_fiber_sums(&sys).into_iter().all(|ok| ok) {
            return Err(format!("u={u} n={n}: fiber sum fails"));
        }
        if !check_euler_relation(&pres, &sys).map_err(|e| e.to_string())? {
            return Err(format!("u={u} n={n}: Euler relation fails"));
        }
        if slope.u0 <= 0 || slope.u0.gcd(&slope.v0) != 1 {
            return Err(format!("slope {slope} is not primitive"));
        }
        solved += 1;
    }
    Ok(format!("{solved} presentations round-trip"))
}

fn determinism() -> Outcome {
    let commands: &[&[&str]] = &[
        &["table", "--g-max", "6"],
        &[
            "ngd",
            "--g",
            "4",
            "--d",
            "1.15094",
            "--radius-constant",
            "6",
        ],
        &["slopes", "--basis", "1,0;0.5,1.7320508", "--g", "2"],
        &[
            "bounds",
            "intersect",
            "--g1",
            "1",
            "--g2",
            "1",
            "--area",
            "3.35",
        ],
        &["bounds", "total", "--g", "2", "--lengths", "3pi,3pi,3pi"],
        &[
            "seifert",
            "solve",
            "--fibers",
            "2/1,3/1,6/1",
            "--u",
            "6",
            "--n",
            "1",
        ],
        &["density", "--radius", "100"],
    ];
    let mut runs = 0;
    for cmd in commands {
        for emit in ["text", "json", "csv"] {
            let mut args = cmd.to_vec();
            args.extend(["--emit", emit]);
            let first = cli(&args)?;
            let second = cli(&args)?;
            if first != second || first.is_empty() {
                return Err(format!("{args:?} differs between runs"));
            }
            runs += 1;
        }
    }
    Ok(format!("{runs} invocations byte-identical"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("golden table", golden_table),
        ("extended values", extended_values),
        ("d-variant values", d_variant),
        ("six-mode table", six_table),
        ("sweep/oracle equivalence", sweep_oracle),
        ("g=1 narrative", narrative),
        ("envelope", envelope_property),
        ("coprime density", dirichlet),
        ("bound formulas", bound_formulas),
        ("reduction properties", reduction_suite),
        ("seifert round trip", seifert_round_trip),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        match outcome {
            Ok(detail) => println!(
                "criterion {}: PASS  {name}: {detail} [{elapsed:.1?}]",
                i + 1
            ),
            Err(detail) => {
                failed += 1;
                println!(
                    "criterion {}: FAIL  {name}: {detail} [{elapsed:.1?}]",
                    i + 1
                );
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
