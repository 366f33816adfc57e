//! Exact arithmetic in the field Q(sqrt 3).
//!
//! Basis coordinates are read as decimals or multiples of `sqrt3`, so Gram
//! entries, determinants and normalized coordinates all stay in this field
//! and lattice reduction never needs an approximate comparison.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::decimal::{format_fraction, parse_rational};
use crate::error::Error;
use crate::precise::{escalate, PreciseReal, Precision};

/// `rational + surd * sqrt(3)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadReal {
    rational: BigRational,
    surd: BigRational,
}

fn three() -> BigRational {
    BigRational::from_integer(BigInt::from(3))
}

impl QuadReal {
    pub fn new(rational: BigRational, surd: BigRational) -> Self {
        QuadReal { rational, surd }
    }

    pub fn zero() -> Self {
        QuadReal::from_rational(BigRational::zero())
    }

    pub fn one() -> Self {
        QuadReal::from_rational(BigRational::one())
    }

    pub fn sqrt3() -> Self {
        QuadReal::new(BigRational::zero(), BigRational::one())
    }

    pub fn from_rational(q: BigRational) -> Self {
        QuadReal::new(q, BigRational::zero())
    }

    pub fn from_integer(n: i64) -> Self {
        QuadReal::from_rational(BigRational::from_integer(n.into()))
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.rational
    }

    pub fn surd_part(&self) -> &BigRational {
        &self.surd
    }

    /// The value as a rational, when it has no sqrt(3) component.
    pub fn as_rational(&self) -> Option<&BigRational> {
        self.surd.is_zero().then_some(&self.rational)
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.surd.is_zero()
    }

    /// Exact sign.
    pub fn signum(&self) -> Ordering {
        let r = self.rational.cmp(&BigRational::zero());
        let s = self.surd.cmp(&BigRational::zero());
        if s == Ordering::Equal || r == s {
            return if r == Ordering::Equal { s } else { r };
        }
        if r == Ordering::Equal {
            return s;
        }
        // opposite signs: compare r^2 with 3 s^2
        let r2 = &self.rational * &self.rational;
        let s2 = &self.surd * &self.surd * three();
        match r2.cmp(&s2) {
            Ordering::Greater => r,
            Ordering::Less => s,
            Ordering::Equal => Ordering::Equal,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    pub fn abs(&self) -> QuadReal {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn scale(&self, k: &BigRational) -> QuadReal {
        QuadReal::new(&self.rational * k, &self.surd * k)
    }

    pub fn scale_int(&self, k: i64) -> QuadReal {
        self.scale(&BigRational::from_integer(k.into()))
    }

    pub fn square(&self) -> QuadReal {
        self * self
    }

    /// `None` for zero.
    pub fn recip(&self) -> Option<QuadReal> {
        // 1/(r + s√3) = (r - s√3) / (r² - 3s²); the norm vanishes only at zero
        let norm = &self.rational * &self.rational - &self.surd * &self.surd * three();
        if norm.is_zero() {
            return None;
        }
        Some(QuadReal::new(&self.rational / &norm, -(&self.surd / &norm)))
    }

    pub fn checked_div(&self, other: &QuadReal) -> Option<QuadReal> {
        Some(self * &other.recip()?)
    }

    pub fn enclose(&self, bits: u32) -> PreciseReal {
        let r = PreciseReal::from_rational(&self.rational, bits + 8);
        if self.surd.is_zero() {
            return r.with_bits(bits);
        }
        let s = PreciseReal::sqrt3(bits + 8).mul_rational(&self.surd);
        r.add(&s).with_bits(bits)
    }

    /// Exact floor, found by enclosure and confirmed by exact sign tests.
    pub fn floor(&self) -> BigInt {
        if let Some(q) = self.as_rational() {
            return q.floor().to_integer();
        }
        let guess = escalate(Precision::new(64, 1 << 16).expect("valid"), |bits| {
            let e = self.enclose(bits);
            let lo = e.lo().floor();
            (lo == e.hi().floor()).then_some(lo)
        });
        let mut k = guess.unwrap_or_else(|_| self.enclose(64).lo().floor());
        // irrational values never sit on an integer, so these loops settle quickly
        while (self - &QuadReal::from_rational(BigRational::from_integer(k.clone()))).is_negative()
        {
            k -= 1;
        }
        while !(self - &QuadReal::from_rational(BigRational::from_integer(&k + 1))).is_negative() {
            k += 1;
        }
        k
    }

    /// Nearest integer, ties rounded up.
    pub fn round(&self) -> BigInt {
        let half = QuadReal::from_rational(BigRational::new(1.into(), 2.into()));
        (self + &half).floor()
    }

    pub fn to_f64(&self) -> f64 {
        self.enclose(64).to_f64()
    }
}

impl PartialOrd for QuadReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadReal {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum()
    }
}

impl Add for &QuadReal {
    type Output = QuadReal;
    fn add(self, rhs: &QuadReal) -> QuadReal {
        QuadReal::new(&self.rational + &rhs.rational, &self.surd + &rhs.surd)
    }
}

impl Sub for &QuadReal {
    type Output = QuadReal;
    fn sub(self, rhs: &QuadReal) -> QuadReal {
        QuadReal::new(&self.rational - &rhs.rational, &self.surd - &rhs.surd)
    }
}

impl Mul for &QuadReal {
    type Output = QuadReal;
    fn mul(self, rhs: &QuadReal) -> QuadReal {
        QuadReal::new(
            &self.rational * &rhs.rational + &self.surd * &rhs.surd * three(),
            &self.rational * &rhs.surd + &self.surd * &rhs.rational,
        )
    }
}

impl Add for QuadReal {
    type Output = QuadReal;
    fn add(self, rhs: QuadReal) -> QuadReal {
        &self + &rhs
    }
}

impl Sub for QuadReal {
    type Output = QuadReal;
    fn sub(self, rhs: QuadReal) -> QuadReal {
        &self - &rhs
    }
}

impl Mul for QuadReal {
    type Output = QuadReal;
    fn mul(self, rhs: QuadReal) -> QuadReal {
        &self * &rhs
    }
}

impl Neg for QuadReal {
    type Output = QuadReal;
    fn neg(self) -> QuadReal {
        QuadReal::new(-self.rational, -self.surd)
    }
}

impl From<BigRational> for QuadReal {
    fn from(q: BigRational) -> Self {
        QuadReal::from_rational(q)
    }
}

/// Accepts a decimal or fraction, optionally followed by `sqrt3`
/// (`sqrt3`, `-sqrt3`, `2*sqrt3`, `0.5sqrt3`).
impl FromStr for QuadReal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let t = s.trim();
        let Some(head) = t.strip_suffix("sqrt3") else {
            return Ok(QuadReal::from_rational(parse_rational(t)?));
        };
        let head = head.trim().trim_end_matches('*').trim();
        let coeff = match head {
            "" | "+" => BigRational::one(),
            "-" => -BigRational::one(),
            h => parse_rational(h)?,
        };
        Ok(QuadReal::new(BigRational::zero(), coeff))
    }
}

impl fmt::Display for QuadReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.rational.is_zero(), self.surd.is_zero()) {
            (_, true) => write!(f, "{}", format_fraction(&self.rational)),
            (true, false) => write!(f, "{}*sqrt3", format_fraction(&self.surd)),
            (false, false) => {
                let sign = if self.surd.is_negative() { '-' } else { '+' };
                write!(
                    f,
                    "{}{sign}{}*sqrt3",
                    format_fraction(&self.rational),
                    format_fraction(&self.surd.abs())
                )
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qr(s: &str) -> QuadReal {
        s.parse().unwrap()
    }

    #[test]
    fn parses_surd_tokens() {
        assert_eq!(qr("sqrt3"), QuadReal::sqrt3());
        assert_eq!(qr("-sqrt3"), -QuadReal::sqrt3());
        assert_eq!(qr("2*sqrt3"), QuadReal::sqrt3().scale_int(2));
        assert_eq!(
            qr("0.5sqrt3"),
            QuadReal::new(BigRational::zero(), BigRational::new(1.into(), 2.into()))
        );
        assert_eq!(
            qr("1.25"),
            QuadReal::from_rational(BigRational::new(5.into(), 4.into()))
        );
        assert!("sqrt2".parse::<QuadReal>().is_err());
    }

    #[test]
    fn exact_sign_near_cancellation() {
        // 1.7320508 - sqrt3 < 0, 1.7320509 - sqrt3 > 0
        assert!((qr("1.7320508") - QuadReal::sqrt3()).is_negative());
        assert!((qr("1.7320509") - QuadReal::sqrt3()).is_positive());
        // 7 - 4 sqrt3 > 0 (= (2 - sqrt3)^2)
        let x = QuadReal::from_integer(7) - QuadReal::sqrt3().scale_int(4);
        assert!(x.is_positive());
        assert!(x.to_f64() > 0.0 && x.to_f64() < 0.1);
    }

    #[test]
    fn reciprocal_round_trips() {
        let x = QuadReal::from_integer(2) + QuadReal::sqrt3();
        let inv = x.recip().unwrap();
        assert_eq!(&x * &inv, QuadReal::one());
        assert!(QuadReal::zero().recip().is_none());
    }

    #[test]
    fn floor_and_round() {
        assert_eq!(QuadReal::sqrt3().floor(), BigInt::from(1));
        assert_eq!((-QuadReal::sqrt3()).floor(), BigInt::from(-2));
        assert_eq!(QuadReal::sqrt3().scale_int(5).floor(), BigInt::from(8));
        assert_eq!(qr("2.5").round(), BigInt::from(3));
        assert_eq!(qr("-2.5").round(), BigInt::from(-2));
        assert_eq!(QuadReal::sqrt3().round(), BigInt::from(2));
    }

    #[test]
    fn enclosure_contains_value() {
        let x = qr("3/7") + QuadReal::sqrt3().scale_int(-2);
        let e = x.enclose(80);
        let sq = e.sub(&PreciseReal::from_rational(
            &BigRational::new(3.into(), 7.into()),
            80,
        ));
        let s = PreciseReal::sqrt3(80).mul_rational(&BigRational::from_integer((-2).into()));
        assert!(sq.overlaps(&s));
    }

    #[test]
    fn display_forms() {
        assert_eq!(qr("1/2").to_string(), "1/2");
        assert_eq!(qr("-2*sqrt3").to_string(), "-2*sqrt3");
        assert_eq!((qr("1") - QuadReal::sqrt3()).to_string(), "1-1*sqrt3");
    }
}
