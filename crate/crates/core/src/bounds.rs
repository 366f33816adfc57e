//! Closed-form bounds on slope lengths, slope counts and intersection
//! numbers for essential surfaces meeting a cusp torus.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::counting::{n_gd, CountResult, CountSpec, RadiusMode};
use crate::error::Error;
use crate::lattice::{
    enumerate_short, reduce, IntVector, LatticeBasis, NormalizedBasis, Unimodular,
};
use crate::precise::{escalate, Comparison, PreciseReal, Precision};
use crate::quad::QuadReal;
use crate::threshold::{SquaredRadius, Threshold};

/// Area floor for maximal cusps used when none is supplied.
pub const CUSP_AREA_FLOOR: &str = "3.35";

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// An unoriented slope `(p, q)` with `gcd(p, q) = 1`, stored with `q > 0`,
/// or `q = 0` and `p = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Slope {
    p: i64,
    q: i64,
}

impl Slope {
    pub fn new(p: i64, q: i64) -> Result<Self, Error> {
        let v = IntVector::new(p, q);
        if !v.is_primitive()? {
            return Err(Error::InvalidInput(format!("slope {v} is not primitive")));
        }
        Ok(Slope::canonical(v))
    }

    fn canonical(v: IntVector) -> Slope {
        if v.b < 0 || (v.b == 0 && v.a < 0) {
            Slope { p: -v.a, q: -v.b }
        } else {
            Slope { p: v.a, q: v.b }
        }
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn vector(&self) -> IntVector {
        IntVector::new(self.p, self.q)
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.p, self.q)
    }
}

/// A cusp cross-section in normalized coordinates.
///
/// `frame` records how normalized coordinates map back to the basis the
/// torus was built from, so slopes can be reported in the user's frame.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CuspTorus {
    basis: NormalizedBasis,
    frame: Unimodular,
    assume_area_floor: bool,
}

impl CuspTorus {
    pub fn new(basis: NormalizedBasis) -> Self {
        CuspTorus {
            basis,
            frame: Unimodular::IDENTITY,
            assume_area_floor: false,
        }
    }

    /// Reduces and normalizes an arbitrary basis.
    pub fn from_lattice(basis: &LatticeBasis) -> Result<Self, Error> {
        let reduced = reduce(basis)?;
        Ok(CuspTorus {
            basis: crate::lattice::normalize(&reduced),
            frame: *reduced.transform(),
            assume_area_floor: false,
        })
    }

    pub fn assuming_area_floor(mut self, assume: bool) -> Self {
        self.assume_area_floor = assume;
        self
    }

    pub fn basis(&self) -> &NormalizedBasis {
        &self.basis
    }

    pub fn assumes_area_floor(&self) -> bool {
        self.assume_area_floor
    }

    /// `d^2 y`, exactly.
    pub fn area(&self) -> QuadReal {
        self.basis.area()
    }

    /// Coordinates of a normalized-frame slope in the original basis.
    pub fn to_input_frame(&self, s: Slope) -> Slope {
        let t = self.frame.0;
        let (a, b) = (s.p, s.q);
        Slope::canonical(IntVector::new(
            a * t[0][0] + b * t[1][0],
            a * t[0][1] + b * t[1][1],
        ))
    }
}

/// `|p e1' + q e2'| = d sqrt((p + q x)^2 + (q y)^2)`
pub fn slope_length(torus: &CuspTorus, s: Slope, bits: u32) -> PreciseReal {
    torus.basis.length(s.vector(), bits)
}

/// Squared radius `(2 g pi)^2` or `(6 g)^2`.
pub fn length_threshold(g: &BigRational, mode: RadiusMode) -> SquaredRadius {
    match mode {
        RadiusMode::TwoPi => SquaredRadius::PiSquared(rat(4) * g * g),
        RadiusMode::Six => SquaredRadius::Rational(rat(36) * g * g),
    }
}

/// Slopes of length at most `2 g pi` (or `6 g`), one per `+-` pair, in
/// normalized coordinates, sorted by `(q, p)`.
pub fn short_slopes(
    torus: &CuspTorus,
    g: &BigRational,
    mode: RadiusMode,
    policy: Precision,
) -> Result<Vec<Slope>, Error> {
    slopes_within(torus, &Threshold::new(length_threshold(g, mode), policy))
}

/// Slopes whose squared length is at most the threshold.
pub fn slopes_within(torus: &CuspTorus, bound: &Threshold) -> Result<Vec<Slope>, Error> {
    let mut out: Vec<Slope> = enumerate_short(&torus.basis, bound, true)?
        .into_iter()
        .filter(|v| v.b > 0 || (v.b == 0 && v.a > 0))
        .map(Slope::canonical)
        .collect();
    out.sort_by(|s, t| s.vector().cmp_lex(&t.vector()));
    Ok(out)
}

/// An exact real `rational + coefficient * pi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiLinear {
    pub rational: BigRational,
    pub pi: BigRational,
}

impl PiLinear {
    pub fn pi_multiple(coefficient: BigRational) -> Self {
        PiLinear {
            rational: BigRational::zero(),
            pi: coefficient,
        }
    }

    pub fn rational(q: BigRational) -> Self {
        PiLinear {
            rational: q,
            pi: BigRational::zero(),
        }
    }

    pub fn enclose(&self, bits: u32) -> PreciseReal {
        let w = bits + 8;
        PreciseReal::from_rational(&self.rational, w)
            .add(&PreciseReal::pi(w).mul_rational(&self.pi))
            .with_bits(bits)
    }

    /// Exact sign; `pi` is irrational, so mixed signs always separate.
    pub fn signum(&self, policy: Precision) -> Result<Ordering, Error> {
        let zero = BigRational::zero();
        let r = self.rational.cmp(&zero);
        let p = self.pi.cmp(&zero);
        if p == Ordering::Equal || r == p {
            return Ok(if r == Ordering::Equal { p } else { r });
        }
        if r == Ordering::Equal {
            return Ok(p);
        }
        escalate(policy, |bits| {
            self.enclose(bits).compare_zero().to_ordering()
        })
    }
}

impl fmt::Display for PiLinear {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use crate::decimal::format_fraction;
        match (self.rational.is_zero(), self.pi.is_zero()) {
            (_, true) => write!(f, "{}", format_fraction(&self.rational)),
            (true, false) => write!(f, "{}*pi", format_fraction(&self.pi)),
            (false, false) => write!(
                f,
                "{}{}{}*pi",
                format_fraction(&self.rational),
                if self.pi.is_negative() { "-" } else { "+" },
                format_fraction(&self.pi.abs())
            ),
        }
    }
}

/// `2 pi (2g - 2 + n) / n`, the length bound for a boundary curve of a
/// genus `g` surface with `n` boundary components.
pub fn length_bound(g: u64, n: u64) -> Result<PiLinear, Error> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    let chi = 2 * g as i64 - 2 + n as i64;
    if chi <= 0 {
        return Err(Error::InvalidTopology {
            genus: g as i64,
            boundary: n as i64,
        });
    }
    Ok(PiLinear::pi_multiple(BigRational::new(
        BigInt::from(2 * chi),
        BigInt::from(n),
    )))
}

/// A curve length for [`total_length_check`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Length {
    Exact(PiLinear),
    Enclosed(PreciseReal),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Holds,
    Fails,
    Undecided,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Undecided => "undecided",
        }
    }
}

/// Whether `sum (L_i - 2 pi) <= 2 pi (2g - 2)`.
pub fn total_length_check(lengths: &[Length], g: u64, policy: Precision) -> Result<Verdict, Error> {
    if lengths.is_empty() {
        return Err(Error::InvalidInput("no lengths given".into()));
    }
    // move everything to one side: slack = sum L_i - 2 pi n - 2 pi (2g - 2) <= 0
    let n = lengths.len() as i64;
    let mut exact = PiLinear::pi_multiple(-(rat(2 * n) + rat(2 * (2 * g as i64 - 2))));
    let mut enclosed: Vec<&PreciseReal> = Vec::new();
    for l in lengths {
        match l {
            Length::Exact(e) => {
                exact.rational += &e.rational;
                exact.pi += &e.pi;
            }
            Length::Enclosed(p) => enclosed.push(p),
        }
    }
    if enclosed.is_empty() {
        return Ok(match exact.signum(policy)? {
            Ordering::Greater => Verdict::Fails,
            _ => Verdict::Holds,
        });
    }
    let verdict = escalate(policy, |bits| {
        let mut sum = exact.enclose(bits);
        for p in &enclosed {
            sum = sum.add(p);
        }
        match sum.compare_zero() {
            Comparison::Greater => Some(Verdict::Fails),
            Comparison::Less => Some(Verdict::Holds),
            Comparison::Undecided if sum.is_point() => Some(Verdict::Holds),
            Comparison::Undecided => None,
        }
    });
    Ok(verdict.unwrap_or(Verdict::Undecided))
}

/// Upper bound on the number of slopes that can bound a genus `g`
/// essential surface: `N(1, d)` for `g <= 1`, `N(g, d) + 1` otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlopeCountBound {
    pub value: u64,
    pub certified: bool,
    pub count: CountResult,
}

pub fn slope_count_bound(
    g: u64,
    d: &BigRational,
    mode: RadiusMode,
    policy: Precision,
) -> Result<SlopeCountBound, Error> {
    let genus = g.max(1);
    let spec = CountSpec::new(rat(genus as i64), d.clone(), mode, policy)?;
    let count = n_gd(&spec)?;
    let extra = u64::from(g > 1);
    Ok(SlopeCountBound {
        value: count.value_hi + extra,
        certified: count.certified,
        count,
    })
}

/// Geometric intersection number `|p1 q2 - p2 q1|`.
pub fn intersection_number(s1: Slope, s2: Slope) -> u64 {
    let cross = s1.p as i128 * s2.q as i128 - s2.p as i128 * s1.q as i128;
    cross.unsigned_abs() as u64
}

/// How many of the two surfaces are null-homologous.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NullHomologous {
    None,
    One,
}

impl std::str::FromStr for NullHomologous {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim().to_ascii_lowercase().as_str() {
            "none" => Ok(NullHomologous::None),
            "one" => Ok(NullHomologous::One),
            other => Err(Error::Parse(format!(
                "null-homologous count must be none or one, got {other:?}"
            ))),
        }
    }
}

/// `4 pi^2 g1 g2 / area` (or `36 g1 g2 / area`), doubled when one surface
/// is null-homologous.
pub fn intersection_bound(
    g1: u64,
    g2: u64,
    area: &QuadReal,
    null_homologous: NullHomologous,
    mode: RadiusMode,
    bits: u32,
) -> Result<PreciseReal, Error> {
    if g1 == 0 || g2 == 0 {
        return Err(Error::InvalidInput("genera must be positive".into()));
    }
    if !area.is_positive() {
        return Err(Error::NonpositiveArea);
    }
    let mut factor = rat(g1 as i64) * rat(g2 as i64);
    if null_homologous == NullHomologous::One {
        factor *= rat(2);
    }
    let w = bits + 8;
    let numerator = match mode {
        RadiusMode::TwoPi => PreciseReal::pi(w).square().mul_rational(&(rat(4) * factor)),
        RadiusMode::Six => PreciseReal::from_rational(&(rat(36) * factor), w),
    };
    let value = numerator
        .div(&area.enclose(w))
        .ok_or(Error::NonpositiveArea)?;
    Ok(value.with_bits(bits))
}

/// `(2g - 2) / (k - 1)` together with `N(k, 1)`, the number of slopes that
/// may exceed it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryCountBound {
    pub bound: BigRational,
    pub exceptions: CountResult,
}

pub fn boundary_count_bound(
    g: u64,
    k: &BigRational,
    policy: Precision,
) -> Result<BoundaryCountBound, Error> {
    if g < 2 {
        return Err(Error::InvalidInput(format!(
            "genus must be at least 2, got {g}"
        )));
    }
    if k <= &BigRational::one() {
        return Err(Error::InvalidInput(format!("k must exceed 1, got {k}")));
    }
    let bound = rat(2 * g as i64 - 2) / (k - BigRational::one());
    let spec = CountSpec::new(k.clone(), BigRational::one(), RadiusMode::TwoPi, policy)?;
    Ok(BoundaryCountBound {
        bound,
        exceptions: n_gd(&spec)?,
    })
}

/// The numeric part of a [`BoundReport`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundValue {
    Integer(BigInt),
    Rational(BigRational),
    Exact(PiLinear),
    Real(PreciseReal),
    Verdict(Verdict),
}

/// A named bound with its inputs and the formula it came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundReport {
    pub name: String,
    pub inputs: BTreeMap<String, String>,
    pub value: BoundValue,
    pub certified: bool,
    pub provenance: String,
}

impl BoundReport {
    pub fn new(name: &str, value: BoundValue, provenance: &str) -> Self {
        BoundReport {
            name: name.to_string(),
            inputs: BTreeMap::new(),
            value,
            certified: true,
            provenance: provenance.to_string(),
        }
    }

    pub fn input(mut self, key: &str, value: impl fmt::Display) -> Self {
        self.inputs.insert(key.to_string(), value.to_string());
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decimal::parse_rational;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn hexagonal(x: &str) -> CuspTorus {
        CuspTorus::new(NormalizedBasis::canonical(&q(1, 1), x.parse().unwrap()).unwrap())
    }

    #[test]
    fn slope_canonical_forms() {
        assert_eq!(Slope::new(-2, -3).unwrap(), Slope::new(2, 3).unwrap());
        assert_eq!(Slope::new(-1, 0).unwrap().p(), 1);
        assert_eq!(Slope::new(3, -1).unwrap(), Slope::new(-3, 1).unwrap());
        assert!(Slope::new(2, 4).is_err());
        assert!(matches!(Slope::new(0, 0), Err(Error::ZeroVector)));
    }

    #[test]
    fn lengths_of_basis_slopes() {
        let t = hexagonal("0");
        let one = slope_length(&t, Slope::new(1, 0).unwrap(), 64);
        assert!(one.contains_rational(&q(1, 1)));
        let r3 = slope_length(&t, Slope::new(0, 1).unwrap(), 64);
        assert!((r3.to_f64() - 3f64.sqrt()).abs() < 1e-15);
        let t = hexagonal("1/2");
        let l = slope_length(&t, Slope::new(1, 1).unwrap(), 64);
        assert!((l.to_f64() - 5.25f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn short_slope_counts() {
        let p = Precision::default();
        let t = hexagonal("0");
        assert_eq!(
            short_slopes(&t, &q(1, 1), RadiusMode::TwoPi, p)
                .unwrap()
                .len(),
            24
        );
        assert_eq!(
            short_slopes(&t, &q(1, 1), RadiusMode::Six, p)
                .unwrap()
                .len(),
            20
        );
        assert!(short_slopes(&t, &q(1, 10), RadiusMode::TwoPi, p)
            .unwrap()
            .is_empty());
        let t = hexagonal("1/2");
        assert_eq!(
            short_slopes(&t, &q(1, 1), RadiusMode::TwoPi, p)
                .unwrap()
                .len(),
            24
        );
    }

    #[test]
    fn input_frame_round_trip() {
        // sheared basis (1,0),(5,sqrt3): the reduced basis is (1,0),(0,sqrt3)
        let b = LatticeBasis::new(
            [QuadReal::one(), QuadReal::zero()],
            [QuadReal::from_integer(5), QuadReal::sqrt3()],
        )
        .unwrap();
        let t = CuspTorus::from_lattice(&b).unwrap();
        // normalized (0,1) is e2 - 5 e1 in the input frame
        assert_eq!(
            t.to_input_frame(Slope::new(0, 1).unwrap()),
            Slope::new(-5, 1).unwrap()
        );
        assert_eq!(
            t.to_input_frame(Slope::new(1, 0).unwrap()),
            Slope::new(1, 0).unwrap()
        );
    }

    #[test]
    fn length_bounds() {
        for n in 1..20 {
            assert_eq!(length_bound(1, n).unwrap(), PiLinear::pi_multiple(q(2, 1)));
        }
        assert_eq!(length_bound(2, 1).unwrap(), PiLinear::pi_multiple(q(6, 1)));
        assert_eq!(length_bound(0, 3).unwrap(), PiLinear::pi_multiple(q(2, 3)));
        for (g, n) in [(0, 1), (0, 2)] {
            assert!(matches!(
                length_bound(g, n),
                Err(Error::InvalidTopology { .. })
            ));
        }
        assert!(length_bound(1, 0).is_err());
    }

    #[test]
    fn total_length_verdicts() {
        let p = Precision::default();
        let pi = |c: i64| Length::Exact(PiLinear::pi_multiple(q(c, 1)));
        assert_eq!(
            total_length_check(&[pi(2), pi(2)], 1, p).unwrap(),
            Verdict::Holds
        );
        assert_eq!(total_length_check(&[pi(10)], 1, p).unwrap(), Verdict::Fails);
        assert_eq!(
            total_length_check(&[pi(3), pi(3), pi(3)], 2, p).unwrap(),
            Verdict::Holds
        );
        // 6.28 < 2 pi, 6.29 > 2 pi
        let r = |s: &str| Length::Exact(PiLinear::rational(parse_rational(s).unwrap()));
        assert_eq!(
            total_length_check(&[r("6.28")], 1, p).unwrap(),
            Verdict::Holds
        );
        assert_eq!(
            total_length_check(&[r("6.29")], 1, p).unwrap(),
            Verdict::Fails
        );
        let e = Length::Enclosed(PreciseReal::pi(64).mul_rational(&q(2, 1)));
        assert_eq!(total_length_check(&[e], 1, p).unwrap(), Verdict::Undecided);
        assert!(total_length_check(&[], 1, p).is_err());
    }

    #[test]
    fn intersection_numbers() {
        let s = |p, q| Slope::new(p, q).unwrap();
        assert_eq!(intersection_number(s(1, 0), s(0, 1)), 1);
        assert_eq!(intersection_number(s(1, 0), s(1, 0)), 0);
        assert_eq!(intersection_number(s(2, 3), s(4, 5)), 2);
    }

    #[test]
    fn intersection_bound_values() {
        let area: QuadReal = "3.35".parse().unwrap();
        let b =
            intersection_bound(1, 1, &area, NullHomologous::None, RadiusMode::TwoPi, 64).unwrap();
        assert!((b.to_f64() - 11.784).abs() < 1e-3);
        let b =
            intersection_bound(1, 1, &area, NullHomologous::One, RadiusMode::TwoPi, 64).unwrap();
        assert!((b.to_f64() - 23.569).abs() < 1e-3);
        let area = QuadReal::sqrt3().scale_int(2);
        let b =
            intersection_bound(2, 3, &area, NullHomologous::None, RadiusMode::TwoPi, 64).unwrap();
        assert!((b.to_f64() - 68.38).abs() < 1e-2);
        assert!(matches!(
            intersection_bound(
                1,
                1,
                &QuadReal::zero(),
                NullHomologous::None,
                RadiusMode::TwoPi,
                64
            ),
            Err(Error::NonpositiveArea)
        ));
    }

    #[test]
    fn boundary_counts() {
        let p = Precision::default();
        let r = boundary_count_bound(2, &q(2, 1), p).unwrap();
        assert_eq!((r.bound.clone(), r.exceptions.value()), (q(2, 1), Some(92)));
        let r = boundary_count_bound(2, &q(3, 1), p).unwrap();
        assert_eq!(
            (r.bound.clone(), r.exceptions.value()),
            (q(1, 1), Some(198))
        );
        let r = boundary_count_bound(10, &q(2, 1), p).unwrap();
        assert_eq!(r.bound, q(18, 1));
        assert!(boundary_count_bound(1, &q(2, 1), p).is_err());
        assert!(boundary_count_bound(2, &q(1, 1), p).is_err());
    }

    #[test]
    fn slope_count_values() {
        let p = Precision::default();
        let one = q(1, 1);
        assert_eq!(
            slope_count_bound(1, &one, RadiusMode::TwoPi, p)
                .unwrap()
                .value,
            24
        );
        assert_eq!(
            slope_count_bound(0, &one, RadiusMode::TwoPi, p)
                .unwrap()
                .value,
            24
        );
        assert_eq!(
            slope_count_bound(2, &one, RadiusMode::TwoPi, p)
                .unwrap()
                .value,
            93
        );
    }
}
