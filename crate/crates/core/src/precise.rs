//! Outward-rounded interval arithmetic on dyadic endpoints.
//!
//! Every operation returns an interval guaranteed to contain the exact
//! result. Endpoints are `mantissa * 2^exponent` with arbitrary-size
//! mantissas, rounded to the working precision after each operation.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

pub const DEFAULT_PRECISION_BITS: u32 = 64;
pub const DEFAULT_MAX_PRECISION_BITS: u32 = 1024;

/// Guard bits carried by constant evaluation.
const GUARD_BITS: u32 = 32;

/// Outcome of comparing two enclosures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Comparison {
    Less,
    Greater,
    /// The enclosures overlap; the order of the true values is unknown.
    Undecided,
}

impl Comparison {
    pub fn to_ordering(self) -> Option<Ordering> {
        match self {
            Comparison::Less => Some(Ordering::Less),
            Comparison::Greater => Some(Ordering::Greater),
            Comparison::Undecided => None,
        }
    }
}

/// Starting precision and escalation cap, in bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Precision {
    pub bits: u32,
    pub max_bits: u32,
}

impl Default for Precision {
    fn default() -> Self {
        Precision {
            bits: DEFAULT_PRECISION_BITS,
            max_bits: DEFAULT_MAX_PRECISION_BITS,
        }
    }
}

impl Precision {
    pub fn new(bits: u32, max_bits: u32) -> Result<Self, Error> {
        if bits < 8 {
            return Err(Error::InvalidInput(format!(
                "precision must be at least 8 bits, got {bits}"
            )));
        }
        if max_bits < bits {
            return Err(Error::InvalidInput(format!(
                "maximum precision {max_bits} is below starting precision {bits}"
            )));
        }
        Ok(Precision { bits, max_bits })
    }

    /// Precisions tried in order: `bits`, doubling, ending exactly at `max_bits`.
    pub fn ladder(&self) -> impl Iterator<Item = u32> {
        let max = self.max_bits;
        let mut next = Some(self.bits);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur >= max {
                None
            } else {
                Some(cur.saturating_mul(2).min(max))
            };
            Some(cur)
        })
    }
}

/// Runs `attempt` at increasing precision until it produces a value.
pub fn escalate<T>(
    policy: Precision,
    mut attempt: impl FnMut(u32) -> Option<T>,
) -> Result<T, Error> {
    for bits in policy.ladder() {
        if let Some(v) = attempt(bits) {
            return Ok(v);
        }
    }
    Err(Error::PrecisionExhausted {
        bits: policy.max_bits,
    })
}

/// Exact binary fraction `mantissa * 2^exponent`.
#[derive(Clone, Debug)]
pub struct Dyadic {
    mantissa: BigInt,
    exponent: i64,
}

fn pow2(shift: u64) -> BigInt {
    BigInt::one() << shift
}

impl Dyadic {
    pub fn new(mantissa: BigInt, exponent: i64) -> Self {
        Dyadic { mantissa, exponent }
    }

    pub fn zero() -> Self {
        Dyadic::new(BigInt::zero(), 0)
    }

    pub fn from_integer(n: BigInt) -> Self {
        Dyadic::new(n, 0)
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn signum(&self) -> i32 {
        if self.mantissa.is_positive() {
            1
        } else if self.mantissa.is_negative() {
            -1
        } else {
            0
        }
    }

    /// Both mantissas rescaled to the smaller exponent.
    fn aligned(&self, other: &Dyadic) -> (BigInt, BigInt, i64) {
        let e = self.exponent.min(other.exponent);
        let a = &self.mantissa << (self.exponent - e) as u64;
        let b = &other.mantissa << (other.exponent - e) as u64;
        (a, b, e)
    }

    pub fn add(&self, other: &Dyadic) -> Dyadic {
        let (a, b, e) = self.aligned(other);
        Dyadic::new(a + b, e)
    }

    pub fn sub(&self, other: &Dyadic) -> Dyadic {
        let (a, b, e) = self.aligned(other);
        Dyadic::new(a - b, e)
    }

    pub fn mul(&self, other: &Dyadic) -> Dyadic {
        Dyadic::new(
            &self.mantissa * &other.mantissa,
            self.exponent + other.exponent,
        )
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic::new(-&self.mantissa, self.exponent)
    }

    pub fn half(&self) -> Dyadic {
        Dyadic::new(self.mantissa.clone(), self.exponent - 1)
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exponent >= 0 {
            BigRational::from_integer(&self.mantissa << self.exponent as u64)
        } else {
            BigRational::new(self.mantissa.clone(), pow2((-self.exponent) as u64))
        }
    }

    pub fn to_f64(&self) -> f64 {
        let bits = self.mantissa.bits() as i64;
        if bits <= 60 {
            let m = self.mantissa.to_f64().unwrap_or(f64::NAN);
            return m * 2f64.powi(self.exponent.clamp(-2000, 2000) as i32);
        }
        let shift = bits - 60;
        let m = (&self.mantissa >> shift as u64)
            .to_f64()
            .unwrap_or(f64::NAN);
        m * 2f64.powi((self.exponent + shift).clamp(-2000, 2000) as i32)
    }

    /// Largest integer not above this value.
    pub fn floor(&self) -> BigInt {
        if self.exponent >= 0 {
            &self.mantissa << self.exponent as u64
        } else {
            self.mantissa.div_floor(&pow2((-self.exponent) as u64))
        }
    }

    /// Smallest integer not below this value.
    pub fn ceil(&self) -> BigInt {
        if self.exponent >= 0 {
            &self.mantissa << self.exponent as u64
        } else {
            self.mantissa.div_ceil(&pow2((-self.exponent) as u64))
        }
    }

    fn round(&self, bits: u32, up: bool) -> Dyadic {
        let len = self.mantissa.bits();
        if len <= bits as u64 {
            return self.clone();
        }
        let shift = len - bits as u64;
        let d = pow2(shift);
        let m = if up {
            self.mantissa.div_ceil(&d)
        } else {
            self.mantissa.div_floor(&d)
        };
        Dyadic::new(m, self.exponent + shift as i64)
    }

    pub fn round_down(&self, bits: u32) -> Dyadic {
        self.round(bits, false)
    }

    pub fn round_up(&self, bits: u32) -> Dyadic {
        self.round(bits, true)
    }

    fn from_rational(q: &BigRational, bits: u32, up: bool) -> Dyadic {
        if q.is_zero() {
            return Dyadic::zero();
        }
        let num = q.numer();
        let den = q.denom();
        let scale = bits as i64 + 2 + den.bits() as i64 - num.bits() as i64;
        let (n, d) = if scale >= 0 {
            (num << scale as u64, den.clone())
        } else {
            (num.clone(), den << (-scale) as u64)
        };
        let m = if up { n.div_ceil(&d) } else { n.div_floor(&d) };
        Dyadic::new(m, -scale)
    }

    pub fn from_rational_floor(q: &BigRational, bits: u32) -> Dyadic {
        Dyadic::from_rational(q, bits, false)
    }

    pub fn from_rational_ceil(q: &BigRational, bits: u32) -> Dyadic {
        Dyadic::from_rational(q, bits, true)
    }

    /// Exact comparison against a rational.
    pub fn cmp_rational(&self, q: &BigRational) -> Ordering {
        // m 2^e  vs  n / d   <=>   m d 2^max(e,0)  vs  n 2^max(-e,0)
        let (lhs, rhs) = if self.exponent >= 0 {
            (
                (&self.mantissa * q.denom()) << self.exponent as u64,
                q.numer().clone(),
            )
        } else {
            (
                &self.mantissa * q.denom(),
                q.numer() << (-self.exponent) as u64,
            )
        };
        lhs.cmp(&rhs)
    }
}

impl PartialEq for Dyadic {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Dyadic {}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = self.aligned(other);
        a.cmp(&b)
    }
}

fn min_of(xs: &[Dyadic]) -> &Dyadic {
    xs.iter().min().expect("nonempty")
}

fn max_of(xs: &[Dyadic]) -> &Dyadic {
    xs.iter().max().expect("nonempty")
}

/// Closed interval `[lo, hi]` enclosing a real number.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreciseReal {
    lo: Dyadic,
    hi: Dyadic,
    bits: u32,
}

impl PreciseReal {
    fn from_bounds(lo: Dyadic, hi: Dyadic, bits: u32) -> Self {
        debug_assert!(lo <= hi, "inverted enclosure");
        PreciseReal {
            lo: lo.round_down(bits),
            hi: hi.round_up(bits),
            bits,
        }
    }

    pub fn from_integer(n: impl Into<BigInt>, bits: u32) -> Self {
        let d = Dyadic::from_integer(n.into());
        PreciseReal::from_bounds(d.clone(), d, bits)
    }

    pub fn from_rational(q: &BigRational, bits: u32) -> Self {
        if q.is_integer() && q.numer().bits() <= bits as u64 {
            let d = Dyadic::from_integer(q.numer().clone());
            return PreciseReal {
                lo: d.clone(),
                hi: d,
                bits,
            };
        }
        PreciseReal {
            lo: Dyadic::from_rational_floor(q, bits),
            hi: Dyadic::from_rational_ceil(q, bits),
            bits,
        }
    }

    /// Enclosure of `[lo, hi]` given as rationals.
    pub fn between(lo: &BigRational, hi: &BigRational, bits: u32) -> Self {
        PreciseReal {
            lo: Dyadic::from_rational_floor(lo, bits),
            hi: Dyadic::from_rational_ceil(hi, bits),
            bits,
        }
    }

    /// Enclosure of pi via Machin's formula with a rigorous truncation bound.
    pub fn pi(bits: u32) -> Self {
        let w = bits + GUARD_BITS;
        let (a, ka) = atan_inverse_fixed(5, w);
        let (b, kb) = atan_inverse_fixed(239, w);
        let value = BigInt::from(16) * a - BigInt::from(4) * b;
        // each arctangent is off by at most (terms + 1) units in the last place
        let err = BigInt::from(16 * (ka + 1) + 4 * (kb + 1));
        let e = -(w as i64);
        PreciseReal::from_bounds(
            Dyadic::new(&value - &err, e),
            Dyadic::new(&value + &err, e),
            bits,
        )
    }

    pub fn sqrt3(bits: u32) -> Self {
        PreciseReal::from_integer(3, bits + 4)
            .sqrt()
            .expect("3 is positive")
            .with_bits(bits)
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn with_bits(&self, bits: u32) -> Self {
        PreciseReal::from_bounds(self.lo.clone(), self.hi.clone(), bits)
    }

    pub fn midpoint(&self) -> BigRational {
        self.lo.add(&self.hi).half().to_rational()
    }

    pub fn radius(&self) -> BigRational {
        self.hi.sub(&self.lo).half().to_rational()
    }

    pub fn width(&self) -> Dyadic {
        self.hi.sub(&self.lo)
    }

    pub fn to_f64(&self) -> f64 {
        self.lo.add(&self.hi).half().to_f64()
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains_rational(&self, q: &BigRational) -> bool {
        self.lo.cmp_rational(q) != Ordering::Greater && self.hi.cmp_rational(q) != Ordering::Less
    }

    pub fn contains_zero(&self) -> bool {
        self.lo.signum() <= 0 && self.hi.signum() >= 0
    }

    pub fn overlaps(&self, other: &PreciseReal) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn compare(&self, other: &PreciseReal) -> Comparison {
        if self.hi < other.lo {
            Comparison::Less
        } else if self.lo > other.hi {
            Comparison::Greater
        } else {
            Comparison::Undecided
        }
    }

    pub fn compare_rational(&self, q: &BigRational) -> Comparison {
        if self.hi.cmp_rational(q) == Ordering::Less {
            Comparison::Less
        } else if self.lo.cmp_rational(q) == Ordering::Greater {
            Comparison::Greater
        } else {
            Comparison::Undecided
        }
    }

    pub fn compare_zero(&self) -> Comparison {
        if self.hi.signum() < 0 {
            Comparison::Less
        } else if self.lo.signum() > 0 {
            Comparison::Greater
        } else {
            Comparison::Undecided
        }
    }

    fn result_bits(&self, other: &PreciseReal) -> u32 {
        self.bits.max(other.bits)
    }

    pub fn add(&self, other: &PreciseReal) -> PreciseReal {
        PreciseReal::from_bounds(
            self.lo.add(&other.lo),
            self.hi.add(&other.hi),
            self.result_bits(other),
        )
    }

    pub fn sub(&self, other: &PreciseReal) -> PreciseReal {
        PreciseReal::from_bounds(
            self.lo.sub(&other.hi),
            self.hi.sub(&other.lo),
            self.result_bits(other),
        )
    }

    pub fn neg(&self) -> PreciseReal {
        PreciseReal {
            lo: self.hi.neg(),
            hi: self.lo.neg(),
            bits: self.bits,
        }
    }

    pub fn mul(&self, other: &PreciseReal) -> PreciseReal {
        let products = [
            self.lo.mul(&other.lo),
            self.lo.mul(&other.hi),
            self.hi.mul(&other.lo),
            self.hi.mul(&other.hi),
        ];
        PreciseReal::from_bounds(
            min_of(&products).clone(),
            max_of(&products).clone(),
            self.result_bits(other),
        )
    }

    pub fn square(&self) -> PreciseReal {
        let a = self.lo.mul(&self.lo);
        let b = self.hi.mul(&self.hi);
        let hi = a.clone().max(b.clone());
        let lo = if self.contains_zero() {
            Dyadic::zero()
        } else {
            a.min(b)
        };
        PreciseReal::from_bounds(lo, hi, self.bits)
    }

    pub fn abs(&self) -> PreciseReal {
        if self.lo.signum() >= 0 {
            self.clone()
        } else if self.hi.signum() <= 0 {
            self.neg()
        } else {
            let hi = self.lo.neg().max(self.hi.clone());
            PreciseReal::from_bounds(Dyadic::zero(), hi, self.bits)
        }
    }

    pub fn mul_rational(&self, q: &BigRational) -> PreciseReal {
        self.mul(&PreciseReal::from_rational(q, self.bits))
    }

    /// Quotient enclosure, or `None` when the divisor may vanish.
    pub fn div(&self, other: &PreciseReal) -> Option<PreciseReal> {
        if other.contains_zero() {
            return None;
        }
        let bits = self.result_bits(other);
        let a = [self.lo.to_rational(), self.hi.to_rational()];
        let b = [other.lo.to_rational(), other.hi.to_rational()];
        let mut lo: Option<Dyadic> = None;
        let mut hi: Option<Dyadic> = None;
        for x in &a {
            for y in &b {
                let q = x / y;
                let down = Dyadic::from_rational_floor(&q, bits);
                let up = Dyadic::from_rational_ceil(&q, bits);
                lo = Some(match lo {
                    Some(l) if l <= down => l,
                    _ => down,
                });
                hi = Some(match hi {
                    Some(h) if h >= up => h,
                    _ => up,
                });
            }
        }
        Some(PreciseReal::from_bounds(lo?, hi?, bits))
    }

    /// Square root enclosure. Negative parts of the input are clamped to
    /// zero; `None` when the whole interval is negative.
    pub fn sqrt(&self) -> Option<PreciseReal> {
        if self.hi.signum() < 0 {
            return None;
        }
        let lo = if self.lo.signum() <= 0 {
            Dyadic::zero()
        } else {
            sqrt_dyadic(&self.lo, self.bits, false)
        };
        let hi = sqrt_dyadic(&self.hi, self.bits, true);
        Some(PreciseReal::from_bounds(lo, hi, self.bits))
    }

    /// Decimal rendering of the midpoint with `digits` fractional digits.
    pub fn to_decimal(&self, digits: usize) -> String {
        crate::decimal::format_decimal(&self.midpoint(), digits)
    }
}

impl fmt::Display for PreciseReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(12))
    }
}

/// Directed-rounded square root of a nonnegative dyadic.
fn sqrt_dyadic(x: &Dyadic, bits: u32, up: bool) -> Dyadic {
    if x.is_zero() {
        return Dyadic::zero();
    }
    let mag = x.mantissa.bits() as i64 + x.exponent;
    let mut k = bits as i64 + 2 - mag / 2;
    if (x.exponent + 2 * k) < 0 {
        k = (-x.exponent + 1) / 2;
    }
    let t = x.exponent + 2 * k;
    debug_assert!(t >= 0);
    let n = &x.mantissa << t as u64;
    let r = n.sqrt();
    let r = if up && &r * &r != n { r + 1 } else { r };
    Dyadic::new(r, -k)
}

/// `floor(2^w * atan(1/n))` up to the returned number of summed terms, each
/// term exact up to one unit.
fn atan_inverse_fixed(n: u32, w: u32) -> (BigInt, u32) {
    let n2 = BigInt::from(n) * BigInt::from(n);
    let mut power = pow2(w as u64) / BigInt::from(n);
    let mut sum = BigInt::zero();
    let mut k: u32 = 0;
    while !power.is_zero() {
        let term = &power / BigInt::from(2 * k + 1);
        if k.is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &n2;
        k += 1;
    }
    (sum, k)
}
