//! The slope-counting function `N(g, d)`.
//!
//! For the extremal lattice `d(1,0), d(x, sqrt 3)` the number of primitive
//! vectors of length at most `L` is
//!
//! ```text
//! N(g, d, x) = #{ (a, b) : gcd(a, b) = 1, (a + b x)^2 + 3 b^2 <= R^2 }
//! ```
//!
//! with `R = 2 g pi / d` (or `6 g / d`). For fixed `(a, b)` with `b > 0` the
//! set of admissible `x` is a closed interval with endpoints
//! `(-+ sqrt(R^2 - 3 b^2) - a) / b`, so the count is piecewise constant in
//! `x` and changes only at those endpoints. [`sweep`] walks the endpoints
//! that fall in `[0, 1/2]` in certified order and tracks the count;
//! `N(g, d)` is half its maximum.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::decimal::parse_rational;
use crate::error::Error;
use crate::lattice::IntVector;
use crate::precise::{PreciseReal, Precision};
use crate::threshold::{SquaredRadius, Threshold};

/// Which length threshold the count uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RadiusMode {
    /// Radius `2 g pi / d`.
    TwoPi,
    /// Radius `6 g / d`.
    Six,
}

impl RadiusMode {
    pub fn label(&self) -> &'static str {
        match self {
            RadiusMode::TwoPi => "2pi",
            RadiusMode::Six => "6",
        }
    }
}

impl std::str::FromStr for RadiusMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim().to_ascii_lowercase().as_str() {
            "2pi" | "two-pi" | "twopi" => Ok(RadiusMode::TwoPi),
            "6" | "six" => Ok(RadiusMode::Six),
            other => Err(Error::Parse(format!(
                "radius constant must be 2pi or 6, got {other:?}"
            ))),
        }
    }
}

/// Parameters of one evaluation of `N(g, d)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountSpec {
    g: BigRational,
    d: BigRational,
    mode: RadiusMode,
    precision: Precision,
}

impl CountSpec {
    pub fn new(
        g: BigRational,
        d: BigRational,
        mode: RadiusMode,
        precision: Precision,
    ) -> Result<Self, Error> {
        if g.is_negative() {
            return Err(Error::InvalidInput(format!(
                "g must be nonnegative, got {g}"
            )));
        }
        if d < BigRational::one() {
            return Err(Error::InvalidInput(format!(
                "d must be at least 1, got {d}"
            )));
        }
        Ok(CountSpec {
            g,
            d,
            mode,
            precision,
        })
    }

    /// Convenience constructor from decimal strings with default precision.
    pub fn parse(g: &str, d: &str, mode: RadiusMode) -> Result<Self, Error> {
        CountSpec::new(
            parse_rational(g)?,
            parse_rational(d)?,
            mode,
            Precision::default(),
        )
    }

    pub fn with_precision(mut self, precision: Precision) -> Self {
        self.precision = precision;
        self
    }

    pub fn g(&self) -> &BigRational {
        &self.g
    }

    pub fn d(&self) -> &BigRational {
        &self.d
    }

    pub fn mode(&self) -> RadiusMode {
        self.mode
    }

    pub fn precision(&self) -> Precision {
        self.precision
    }

    /// `R^2` for these parameters.
    pub fn squared_radius(&self) -> SquaredRadius {
        let ratio = &self.g / &self.d;
        match self.mode {
            RadiusMode::TwoPi => {
                let two = BigRational::from_integer(2.into());
                SquaredRadius::PiSquared(&two * &two * &ratio * &ratio)
            }
            RadiusMode::Six => {
                let six = BigRational::from_integer(6.into());
                SquaredRadius::Rational(&six * &six * &ratio * &ratio)
            }
        }
    }

    pub fn threshold(&self) -> Threshold {
        Threshold::new(self.squared_radius(), self.precision)
    }
}

/// A raw count, or bounds on it when some membership test could not be
/// decided within the precision cap.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RawCount {
    pub lo: u64,
    pub hi: u64,
}

impl RawCount {
    pub fn exact(n: u64) -> Self {
        RawCount { lo: n, hi: n }
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn value(&self) -> Option<u64> {
        self.is_exact().then_some(self.lo)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Membership {
    Inside,
    Outside,
    Unknown,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn half() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(2))
}

fn to_i64(n: &BigInt) -> Result<i64, Error> {
    n.to_i64().ok_or(Error::Overflow)
}

/// Number of `a` in `[lo, hi]` coprime to `b > 0`, by inclusion-exclusion
/// over the prime divisors of `b`.
pub fn coprime_count_in_range(lo: i64, hi: i64, b: u64) -> u64 {
    if hi < lo {
        return 0;
    }
    let mut primes = Vec::new();
    let mut n = b;
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            primes.push(p as i64);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        primes.push(n as i64);
    }
    let mut total: i64 = 0;
    for mask in 0u32..(1 << primes.len()) {
        let mut k: i64 = 1;
        for (i, p) in primes.iter().enumerate() {
            if mask & (1 << i) != 0 {
                k *= p;
            }
        }
        let multiples = Integer::div_floor(&hi, &k) - Integer::div_floor(&(lo - 1), &k);
        if mask.count_ones() % 2 == 0 {
            total += multiples;
        } else {
            total -= multiples;
        }
    }
    total as u64
}

/// Row-wise counter for the extremal lattice at a fixed threshold.
struct Counter {
    threshold: Threshold,
}

impl Counter {
    fn new(spec: &CountSpec) -> Self {
        Counter {
            threshold: spec.threshold(),
        }
    }

    fn membership(&self, value: &BigRational) -> Result<Membership, Error> {
        match self.threshold.compare_rational(value) {
            Ok(Ordering::Greater) => Ok(Membership::Outside),
            Ok(_) => Ok(Membership::Inside),
            Err(Error::PrecisionExhausted { .. }) => Ok(Membership::Unknown),
            Err(e) => Err(e),
        }
    }

    /// Contribution of the `b = 0` row, i.e. `(+-1, 0)`.
    fn axis_count(&self) -> Result<RawCount, Error> {
        Ok(match self.membership(&BigRational::one())? {
            Membership::Inside => RawCount::exact(2),
            Membership::Outside => RawCount::exact(0),
            Membership::Unknown => RawCount { lo: 0, hi: 2 },
        })
    }

    /// Rows `b >= 1` that can contain admissible points: `3 b^2 <= R^2`.
    fn rows(&self) -> Result<Vec<i64>, Error> {
        let mut rows = Vec::new();
        let mut b: i64 = 1;
        loop {
            match self.membership(&rat(3 * b * b))? {
                Membership::Outside => break,
                _ => rows.push(b),
            }
            b += 1;
        }
        Ok(rows)
    }

    /// `sqrt(R^2 - 3 b^2)` enclosed at `bits`.
    fn half_width(&self, b: i64, bits: u32) -> Option<PreciseReal> {
        self.threshold
            .enclosure(bits)
            .sub(&PreciseReal::from_integer(3 * b * b, bits))
            .sqrt()
    }

    /// Points `(a, b)` with `b > 0` inside the disk at `x`.
    fn upper_count(&self, x: &BigRational) -> Result<RawCount, Error> {
        let bits = self.threshold.policy().bits;
        let mut lo = 0u64;
        let mut hi = 0u64;
        for b in self.rows()? {
            let Some(w) = self.half_width(b, bits) else {
                continue;
            };
            let center = -(x * rat(b));
            let c = PreciseReal::from_rational(&center, bits);
            let left = c.sub(&w);
            let right = c.add(&w);
            let outer_lo = to_i64(&left.lo().floor())?;
            let outer_hi = to_i64(&right.hi().ceil())?;
            // strictly inside the enclosure of the row interval
            let inner_lo = to_i64(&left.hi().floor())? + 1;
            let inner_hi = to_i64(&right.lo().ceil())? - 1;
            let b3 = rat(3 * b * b);
            let mut test = |a: i64| -> Result<(), Error> {
                if a.unsigned_abs().gcd(&(b as u64)) != 1 {
                    return Ok(());
                }
                let t = rat(a) - &center;
                match self.membership(&(&t * &t + &b3))? {
                    Membership::Inside => {
                        lo += 1;
                        hi += 1;
                    }
                    Membership::Unknown => hi += 1,
                    Membership::Outside => {}
                }
                Ok(())
            };
            if inner_lo <= inner_hi {
                for a in outer_lo..inner_lo {
                    test(a)?;
                }
                for a in inner_hi + 1..=outer_hi {
                    test(a)?;
                }
                let sure = coprime_count_in_range(inner_lo, inner_hi, b as u64);
                lo += sure;
                hi += sure;
            } else {
                for a in outer_lo..=outer_hi {
                    test(a)?;
                }
            }
        }
        Ok(RawCount { lo, hi })
    }

    fn raw_count(&self, x: &BigRational) -> Result<RawCount, Error> {
        let upper = self.upper_count(x)?;
        let axis = self.axis_count()?;
        Ok(RawCount {
            lo: 2 * upper.lo + axis.lo,
            hi: 2 * upper.hi + axis.hi,
        })
    }
}

fn check_unit_half(x: &BigRational) -> Result<(), Error> {
    if x.is_negative() || x > &half() {
        return Err(Error::InvalidInput(format!("x = {x} outside [0, 1/2]")));
    }
    Ok(())
}

/// Raw number of primitive `(a, b)` with `(a + b x)^2 + 3 b^2 <= R^2`,
/// counting both `v` and `-v`.
pub fn count_at(spec: &CountSpec, x: &BigRational) -> Result<RawCount, Error> {
    check_unit_half(x)?;
    Counter::new(spec).raw_count(x)
}

/// Direction in which a lattice point crosses the circle as `x` increases.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Crossing {
    Enter,
    Leave,
}

/// A lattice point `(a, b)`, `b > 0`, whose circle crossing defines a
/// breakpoint. Its mirror `(-a, -b)` crosses at the same `x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Generator {
    pub vector: IntVector,
    pub crossing: Crossing,
}

/// A value of `x` in `[0, 1/2]` where the count may change.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Breakpoint {
    pub x: PreciseReal,
    pub generators: Vec<Generator>,
    /// The exact value when it is rational (only possible for rational radii).
    pub exact: Option<BigRational>,
    /// Whether the generators are known to share one exact position.
    pub resolved: bool,
}

/// One breakpoint with the upper-half-plane counts around it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepGroup {
    pub breakpoint: Breakpoint,
    pub entering: u64,
    pub leaving: u64,
    /// Count on the gap just before the breakpoint.
    pub before: u64,
    /// Count at the breakpoint itself (closed disk).
    pub at: u64,
    /// Count on the gap just after the breakpoint.
    pub after: u64,
}

impl SweepGroup {
    /// Lower bound on the count at the breakpoint; differs from `at` only
    /// for unresolved clusters.
    pub fn at_lower(&self) -> u64 {
        if self.breakpoint.resolved {
            self.at
        } else {
            self.before.max(self.after)
        }
    }
}

/// Candidate position of one circle crossing.
#[derive(Clone, Debug)]
struct Event {
    generator: Generator,
    /// `+1` for the right endpoint (leave), `-1` for the left (enter).
    sign: i64,
    exact: Option<BigRational>,
    enclosure: PreciseReal,
}

impl Event {
    fn a(&self) -> i64 {
        self.generator.vector.a
    }

    fn b(&self) -> i64 {
        self.generator.vector.b
    }
}

/// Result of sweeping `x` across `[0, 1/2]`.
#[derive(Clone, Debug)]
pub struct Sweep {
    spec: CountSpec,
    axis: RawCount,
    start: RawCount,
    end: RawCount,
    groups: Vec<SweepGroup>,
}

impl Sweep {
    pub fn spec(&self) -> &CountSpec {
        &self.spec
    }

    pub fn groups(&self) -> &[SweepGroup] {
        &self.groups
    }

    pub fn breakpoints(&self) -> Vec<Breakpoint> {
        self.groups.iter().map(|g| g.breakpoint.clone()).collect()
    }

    fn axis_half(&self) -> u64 {
        self.axis.lo / 2
    }

    /// Whether every order and membership decision was certified.
    pub fn certified(&self) -> bool {
        self.axis.is_exact()
            && self.start.is_exact()
            && self.end.is_exact()
            && self.groups.iter().all(|g| g.breakpoint.resolved)
    }

    /// Half-count at `x = 0`.
    pub fn half_count_at_start(&self) -> u64 {
        self.start.lo + self.axis_half()
    }

    /// Half-count at `x = 1/2`.
    pub fn half_count_at_end(&self) -> u64 {
        self.end.lo + self.axis_half()
    }

    /// Every half-count value taken on `[0, 1/2]`.
    pub fn half_count_values(&self) -> BTreeSet<u64> {
        let axis = self.axis_half();
        let mut set = BTreeSet::new();
        set.insert(self.start.lo + axis);
        set.insert(self.end.lo + axis);
        for g in &self.groups {
            if !g.breakpoint.is_at_start() {
                set.insert(g.before + axis);
            }
            set.insert(g.at + axis);
            if !g.breakpoint.is_at_end() {
                set.insert(g.after + axis);
            }
        }
        set
    }

    /// Primitive points (both signs) that enter the disk at some `x` in `(0, 1/2]`.
    pub fn entering_points(&self) -> u64 {
        2 * self
            .groups
            .iter()
            .filter(|g| !g.breakpoint.is_at_start())
            .map(|g| g.entering)
            .sum::<u64>()
    }

    /// Primitive points (both signs) that leave the disk at some `x` in `[0, 1/2)`.
    pub fn leaving_points(&self) -> u64 {
        2 * self
            .groups
            .iter()
            .filter(|g| !g.breakpoint.is_at_end())
            .map(|g| g.leaving)
            .sum::<u64>()
    }

    /// Number of distinct sample positions: both endpoints, every
    /// breakpoint, and one point inside every gap.
    pub fn samples_evaluated(&self) -> u64 {
        let mut positions = 2 + self.groups.len() as u64;
        if self
            .groups
            .first()
            .is_some_and(|g| g.breakpoint.is_at_start())
        {
            positions -= 1;
        }
        if self.groups.last().is_some_and(|g| g.breakpoint.is_at_end()) {
            positions -= 1;
        }
        2 * positions - 1
    }

    pub fn result(&self) -> CountResult {
        let zero = PreciseReal::from_integer(0, self.spec.precision.bits);
        let mut best_hi = self.start.hi;
        let mut best_lo = self.start.lo;
        let mut witness = zero;
        let mut witness_exact = Some(BigRational::zero());
        for g in &self.groups {
            if g.at > best_hi {
                best_hi = g.at;
                witness = g.breakpoint.x.clone();
                witness_exact = g.breakpoint.exact.clone();
            }
            best_lo = best_lo.max(g.at_lower());
        }
        best_lo = best_lo.max(self.end.lo);
        if self.end.hi > best_hi {
            best_hi = self.end.hi;
            witness = PreciseReal::from_rational(&half(), self.spec.precision.bits);
            witness_exact = Some(half());
        }
        let lo_axis = self.axis.lo / 2;
        let hi_axis = self.axis.hi / 2;
        CountResult {
            value_lo: best_lo + lo_axis,
            value_hi: best_hi + hi_axis,
            witness_x: witness,
            witness_exact,
            breakpoint_count: self.groups.len() as u64,
            samples_evaluated: self.samples_evaluated(),
            certified: self.certified() && best_lo == best_hi,
        }
    }
}

impl Breakpoint {
    pub fn is_at_start(&self) -> bool {
        self.exact.as_ref().is_some_and(|e| e.is_zero())
    }

    pub fn is_at_end(&self) -> bool {
        self.exact.as_ref().is_some_and(|e| e == &half())
    }

    pub fn to_f64(&self) -> f64 {
        self.x.to_f64()
    }
}

/// `N(g, d)` with the evidence behind it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountResult {
    pub value_lo: u64,
    pub value_hi: u64,
    /// A sample where `value_hi` is attained.
    pub witness_x: PreciseReal,
    /// The same sample when it is rational.
    pub witness_exact: Option<BigRational>,
    pub breakpoint_count: u64,
    pub samples_evaluated: u64,
    pub certified: bool,
}

impl CountResult {
    pub fn value(&self) -> Option<u64> {
        self.certified.then_some(self.value_hi)
    }
}

impl fmt::Display for CountResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.value_lo == self.value_hi {
            write!(f, "{}", self.value_hi)
        } else {
            write!(f, "[{}, {}]", self.value_lo, self.value_hi)
        }
    }
}

/// Sign of `u sqrt(d) + w` for rationals `u, w` and `d >= 0`.
fn sign_surd(u: &BigRational, d: &BigRational, w: &BigRational) -> Ordering {
    let zero = BigRational::zero();
    let p = if d.is_zero() {
        Ordering::Equal
    } else {
        u.cmp(&zero)
    };
    let q = w.cmp(&zero);
    if p == Ordering::Equal || p == q {
        return if q == Ordering::Equal { p } else { q };
    }
    if q == Ordering::Equal {
        return p;
    }
    match (u * u * d).cmp(&(w * w)) {
        Ordering::Greater => p,
        Ordering::Less => q,
        Ordering::Equal => Ordering::Equal,
    }
}

/// Sign of `u1 sqrt(d1) + u2 sqrt(d2) + c`, exactly.
fn sign_two_surds(
    u1: &BigRational,
    d1: &BigRational,
    u2: &BigRational,
    d2: &BigRational,
    c: &BigRational,
) -> Ordering {
    let zero = BigRational::zero();
    let p = if d1.is_zero() {
        Ordering::Equal
    } else {
        u1.cmp(&zero)
    };
    let q = sign_surd(u2, d2, c);
    if p == Ordering::Equal {
        return q;
    }
    if q == Ordering::Equal || p == q {
        return p;
    }
    // |P| vs |Q| via P^2 - Q^2 = u1^2 d1 - u2^2 d2 - c^2 - 2 u2 c sqrt(d2)
    let two = BigRational::from_integer(2.into());
    let w = u1 * u1 * d1 - u2 * u2 * d2 - c * c;
    match sign_surd(&(-(two * u2 * c)), d2, &w) {
        Ordering::Greater => p,
        Ordering::Less => q,
        Ordering::Equal => Ordering::Equal,
    }
}

fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| BigRational::new(n, d))
}

struct SweepBuilder<'a> {
    counter: Counter,
    spec: &'a CountSpec,
}

impl SweepBuilder<'_> {
    /// Order of `sqrt(R^2 - 3 b^2)` relative to the rational `m`.
    fn cmp_half_width(&self, b: i64, m: &BigRational) -> Result<Ordering, Error> {
        if m.is_negative() {
            return Ok(Ordering::Greater);
        }
        let q = m * m + rat(3 * b * b);
        Ok(self.counter.threshold.compare_rational(&q)?.reverse())
    }

    /// Exact position `(sign * sqrt(R^2 - 3 b^2) - a) / b` compared between
    /// two events; only available for rational radii.
    fn exact_cmp(&self, e: &Event, f: &Event, r2: &BigRational) -> Ordering {
        let (b1, b2) = (rat(e.b()), rat(f.b()));
        let d1 = r2 - rat(3 * e.b() * e.b());
        let d2 = r2 - rat(3 * f.b() * f.b());
        let u1 = rat(e.sign) / &b1;
        let u2 = -(rat(f.sign) / &b2);
        let c = rat(f.a()) / &b2 - rat(e.a()) / &b1;
        sign_two_surds(&u1, &d1, &u2, &d2, &c)
    }

    fn enclose(&self, e: &Event, bits: u32) -> PreciseReal {
        if let Some(x) = &e.exact {
            return PreciseReal::from_rational(x, bits);
        }
        let s = self
            .counter
            .half_width(e.b(), bits)
            .expect("row admits points");
        let s = if e.sign < 0 { s.neg() } else { s };
        s.sub(&PreciseReal::from_integer(e.a(), bits))
            .div(&PreciseReal::from_integer(e.b(), bits))
            .expect("b > 0")
    }

    fn events(&self) -> Result<Vec<Event>, Error> {
        let bits = self.spec.precision.bits;
        let mut out = Vec::new();
        for b in self.counter.rows()? {
            let Some(s) = self.counter.half_width(b, bits) else {
                continue;
            };
            let hb = PreciseReal::from_rational(&BigRational::new(b.into(), 2.into()), bits);
            // entering: a in [-s - b/2, -s]
            let lo = to_i64(&s.neg().sub(&hb).lo().floor())? - 1;
            let hi = to_i64(&s.neg().hi().ceil())? + 1;
            for a in lo..=hi {
                if a.unsigned_abs().gcd(&(b as u64)) != 1 {
                    continue;
                }
                // 0 <= -s - a <= b/2  <=>  s <= -a  and  s >= -a - b/2
                let low = self.cmp_half_width(b, &rat(-a))?;
                let high = self.cmp_half_width(b, &(rat(-a) - rat(b) * half()))?;
                if low == Ordering::Greater || high == Ordering::Less {
                    continue;
                }
                let exact = if low == Ordering::Equal {
                    Some(BigRational::zero())
                } else if high == Ordering::Equal {
                    Some(half())
                } else {
                    None
                };
                let exact = exact.or_else(|| self.rational_position(a, b, -1));
                self.push(&mut out, a, b, -1, exact, bits);
            }
            // leaving: a in [s - b/2, s]
            let lo = to_i64(&s.sub(&hb).lo().floor())? - 1;
            let hi = to_i64(&s.hi().ceil())? + 1;
            for a in lo..=hi {
                if a.unsigned_abs().gcd(&(b as u64)) != 1 {
                    continue;
                }
                // 0 <= s - a <= b/2  <=>  s >= a  and  s <= a + b/2
                let low = self.cmp_half_width(b, &rat(a))?;
                let high = self.cmp_half_width(b, &(rat(a) + rat(b) * half()))?;
                if low == Ordering::Less || high == Ordering::Greater {
                    continue;
                }
                let exact = if low == Ordering::Equal {
                    Some(BigRational::zero())
                } else if high == Ordering::Equal {
                    Some(half())
                } else {
                    None
                };
                let exact = exact.or_else(|| self.rational_position(a, b, 1));
                self.push(&mut out, a, b, 1, exact, bits);
            }
        }
        Ok(out)
    }

    /// `(sign * sqrt(R^2 - 3 b^2) - a) / b` when it is rational.
    fn rational_position(&self, a: i64, b: i64, sign: i64) -> Option<BigRational> {
        let SquaredRadius::Rational(r2) = self.counter.threshold.squared() else {
            return None;
        };
        let s = rational_sqrt(&(r2 - rat(3 * b * b)))?;
        Some((rat(sign) * s - rat(a)) / rat(b))
    }

    fn push(
        &self,
        out: &mut Vec<Event>,
        a: i64,
        b: i64,
        sign: i64,
        exact: Option<BigRational>,
        bits: u32,
    ) {
        let crossing = if sign < 0 {
            Crossing::Enter
        } else {
            Crossing::Leave
        };
        let mut e = Event {
            generator: Generator {
                vector: IntVector::new(a, b),
                crossing,
            },
            sign,
            exact,
            enclosure: PreciseReal::from_integer(0, bits),
        };
        e.enclosure = self.enclose(&e, bits);
        out.push(e);
    }

    /// Splits events sorted by lower endpoint into runs whose enclosures
    /// chain-overlap.
    fn clusters(mut events: Vec<Event>) -> Vec<Vec<Event>> {
        events.sort_by(|e, f| {
            e.enclosure
                .lo()
                .cmp(f.enclosure.lo())
                .then_with(|| e.enclosure.hi().cmp(f.enclosure.hi()))
        });
        let mut out: Vec<Vec<Event>> = Vec::new();
        let mut reach: Option<crate::precise::Dyadic> = None;
        for e in events {
            let joins = reach.as_ref().is_some_and(|r| e.enclosure.lo() <= r);
            if joins {
                let r = reach.take().expect("set");
                reach = Some(r.max(e.enclosure.hi().clone()));
                out.last_mut().expect("nonempty").push(e);
            } else {
                reach = Some(e.enclosure.hi().clone());
                out.push(vec![e]);
            }
        }
        out
    }

    /// Orders a cluster of overlapping events into groups of equal position.
    fn resolve(&self, cluster: Vec<Event>, bits: u32, out: &mut Vec<(Vec<Event>, bool)>) {
        if cluster.len() == 1 {
            out.push((cluster, true));
            return;
        }
        if let SquaredRadius::Rational(r2) = self.counter.threshold.squared() {
            let mut sorted = cluster;
            sorted.sort_by(|e, f| self.exact_cmp(e, f, r2));
            let mut group: Vec<Event> = Vec::new();
            for e in sorted {
                if let Some(last) = group.last() {
                    if self.exact_cmp(last, &e, r2) != Ordering::Equal {
                        out.push((std::mem::take(&mut group), true));
                    }
                }
                group.push(e);
            }
            out.push((group, true));
            return;
        }
        let next = self.spec.precision.ladder().find(|&b| b > bits);
        let Some(next) = next else {
            // cannot separate within the cap
            out.push((cluster, false));
            return;
        };
        let refined: Vec<Event> = cluster
            .into_iter()
            .map(|mut e| {
                e.enclosure = self.enclose(&e, next);
                e
            })
            .collect();
        for sub in Self::clusters(refined) {
            self.resolve(sub, next, out);
        }
    }

    fn build(&self) -> Result<Sweep, Error> {
        let bits = self.spec.precision.bits;
        let events = self.events()?;
        let mut ordered = Vec::new();
        for cluster in Self::clusters(events) {
            self.resolve(cluster, bits, &mut ordered);
        }
        let zero = BigRational::zero();
        let axis = self.counter.axis_count()?;
        let start = self.counter.upper_count(&zero)?;
        let end_direct = self.counter.upper_count(&half())?;
        let mut groups = Vec::with_capacity(ordered.len());
        let mut gap = start.lo;
        for (i, (members, resolved)) in ordered.into_iter().enumerate() {
            let entering = members
                .iter()
                .filter(|e| e.generator.crossing == Crossing::Enter)
                .count() as u64;
            let leaving = members.len() as u64 - entering;
            let exact = members.iter().find_map(|e| e.exact.clone());
            let x = members
                .iter()
                .map(|e| e.enclosure.clone())
                .min_by(|p, q| p.width().cmp(&q.width()))
                .expect("nonempty group");
            let breakpoint = Breakpoint {
                x,
                generators: members.iter().map(|e| e.generator).collect(),
                exact,
                resolved,
            };
            if i == 0 && breakpoint.is_at_start() {
                // points entering at x = 0 are already in the direct count there
                gap = start.lo.checked_sub(entering).ok_or_else(|| {
                    Error::Inconsistent("sweep count at x = 0 went negative".into())
                })?;
            }
            let before = gap;
            let at = before + entering;
            let after = at
                .checked_sub(leaving)
                .ok_or_else(|| Error::Inconsistent("sweep count went negative".into()))?;
            gap = after;
            groups.push(SweepGroup {
                breakpoint,
                entering,
                leaving,
                before,
                at,
                after,
            });
        }
        let end_swept = match groups.last() {
            Some(g) if g.breakpoint.is_at_end() => g.at,
            _ => gap,
        };
        if start.is_exact() && end_direct.is_exact() && end_swept != end_direct.lo {
            return Err(Error::Inconsistent(format!(
                "sweep reaches {end_swept} at x = 1/2 but the direct count is {}",
                end_direct.lo
            )));
        }
        Ok(Sweep {
            spec: self.spec.clone(),
            axis,
            start,
            end: end_direct,
            groups,
        })
    }
}

/// Sweeps `x` over `[0, 1/2]`, tracking the count across every breakpoint.
pub fn sweep(spec: &CountSpec) -> Result<Sweep, Error> {
    SweepBuilder {
        counter: Counter::new(spec),
        spec,
    }
    .build()
}

/// Breakpoints in `[0, 1/2]`, ascending, coincident ones merged.
pub fn breakpoints(spec: &CountSpec) -> Result<Vec<Breakpoint>, Error> {
    Ok(sweep(spec)?.breakpoints())
}

/// `N(g, d)`: half the maximum raw count over `x` in `[0, 1/2]`.
///
/// If the breakpoints cannot be placed within the precision cap the result
/// is an uncertified interval: the endpoint counts below, and above every
/// primitive point that might lie in the disk for some `x`.
pub fn n_gd(spec: &CountSpec) -> Result<CountResult, Error> {
    match sweep(spec) {
        Ok(s) => Ok(s.result()),
        Err(Error::PrecisionExhausted { .. }) => fallback_bounds(spec),
        Err(e) => Err(e),
    }
}

fn fallback_bounds(spec: &CountSpec) -> Result<CountResult, Error> {
    let counter = Counter::new(spec);
    let bits = spec.precision.bits;
    let start = counter.raw_count(&BigRational::zero())?;
    let end = counter.raw_count(&half())?;
    let (lo, witness) = if end.lo > start.lo {
        (end.lo, half())
    } else {
        (start.lo, BigRational::zero())
    };
    // points whose closest approach over x in [0, 1/2] is possibly inside
    let mut reach = counter.axis_count()?.hi / 2;
    for b in counter.rows()? {
        let Some(w) = counter.half_width(b, bits) else {
            continue;
        };
        let hb = PreciseReal::from_rational(&BigRational::new(b.into(), 2.into()), bits);
        let first = to_i64(&w.neg().sub(&hb).lo().floor())? - 1;
        let last = to_i64(&w.hi().ceil())? + 1;
        for a in first..=last {
            if a.unsigned_abs().gcd(&(b as u64)) != 1 {
                continue;
            }
            let (near, far) = (rat(a), rat(a) + rat(b) * half());
            let closest = if !near.is_positive() && !far.is_negative() {
                BigRational::zero()
            } else {
                let (n2, f2) = (&near * &near, &far * &far);
                if n2 < f2 {
                    n2
                } else {
                    f2
                }
            };
            if counter.membership(&(closest + rat(3 * b * b)))? != Membership::Outside {
                reach += 1;
            }
        }
    }
    Ok(CountResult {
        value_lo: lo / 2,
        value_hi: reach.max(lo / 2),
        witness_x: PreciseReal::from_rational(&witness, bits),
        witness_exact: Some(witness),
        breakpoint_count: 0,
        samples_evaluated: 2,
        certified: false,
    })
}

/// Half the maximum raw count over the grid `x = i / (2 n)`, `i = 0..=n`.
///
/// Independent of the sweep; a lower bound for [`n_gd`] that is exact once
/// the grid step is below the smallest gap between breakpoints.
pub fn n_gd_oracle(spec: &CountSpec, grid_size: u64) -> Result<u64, Error> {
    if grid_size < 2 {
        return Err(Error::InvalidInput("grid size must be at least 2".into()));
    }
    let counter = Counter::new(spec);
    let threads = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(16) as u64;
    let chunk = (grid_size + 1).div_ceil(threads);
    let results: Vec<Result<u64, Error>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                let counter = &counter;
                scope.spawn(move || -> Result<u64, Error> {
                    let mut best = 0u64;
                    let first = t * chunk;
                    let last = ((t + 1) * chunk).min(grid_size + 1);
                    for i in first..last {
                        let x = BigRational::new(i.into(), (2 * grid_size).into());
                        let c = counter.raw_count(&x)?;
                        let v = c.value().ok_or(Error::PrecisionExhausted {
                            bits: spec.precision.max_bits,
                        })?;
                        best = best.max(v);
                    }
                    Ok(best)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("oracle worker panicked"))
            .collect()
    });
    let mut best = 0;
    for r in results {
        best = best.max(r?);
    }
    Ok(best / 2)
}

/// `4 sqrt(3) (g + 1/2)^2 pi`
pub fn envelope(g: &BigRational, bits: u32) -> Result<PreciseReal, Error> {
    if !g.is_positive() {
        return Err(Error::InvalidInput(format!("g must be positive, got {g}")));
    }
    let shifted = g + half();
    let factor = rat(4) * &shifted * &shifted;
    let w = bits + 8;
    Ok(PreciseReal::sqrt3(w)
        .mul(&PreciseReal::pi(w))
        .mul_rational(&factor)
        .with_bits(bits))
}

/// `#{(r, s) != 0 : r^2 + s^2 <= m}`
fn disk_points(m: u64) -> u64 {
    let mut total = 0u64;
    let r_max = m.sqrt();
    for r in 0..=r_max {
        let s = (m - r * r).sqrt();
        let row = 2 * s + 1;
        total += if r == 0 { row } else { 2 * row };
    }
    total - 1
}

/// Fraction of nonzero integer pairs in the disk of the given radius that
/// are coprime, via Mobius inversion over common divisors.
pub fn coprime_density(radius: u64) -> Result<BigRational, Error> {
    if radius == 0 {
        return Err(Error::InvalidInput("radius must be at least 1".into()));
    }
    let n = radius as usize;
    let mut mobius = vec![1i64; n + 1];
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i);
            mobius[i] = -1;
        }
        for &p in &primes {
            if i * p > n {
                break;
            }
            composite[i * p] = true;
            if i % p == 0 {
                mobius[i * p] = 0;
                break;
            }
            mobius[i * p] = -mobius[i];
        }
    }
    let r2 = radius * radius;
    let all = disk_points(r2);
    let mut coprime: i64 = 0;
    for (k, &mu) in mobius.iter().enumerate().skip(1) {
        if mu != 0 {
            let k = k as u64;
            coprime += mu * disk_points(r2 / (k * k)) as i64;
        }
    }
    Ok(BigRational::new(coprime.into(), all.into()))
}

/// `6 / pi^2`
pub fn dirichlet_density(bits: u32) -> PreciseReal {
    let w = bits + 8;
    PreciseReal::from_integer(6, w)
        .div(&PreciseReal::pi(w).square())
        .expect("pi is nonzero")
        .with_bits(bits)
}
