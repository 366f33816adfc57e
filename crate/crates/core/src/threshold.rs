//! Certified comparison of exact quantities against a squared radius.
//!
//! A squared radius is either rational (exact comparisons) or a rational
//! multiple of pi squared. In the second case an exact algebraic value can
//! never equal the threshold unless the multiple is zero, so escalating the
//! enclosure precision always separates the two.

use std::cmp::Ordering;

use num_rational::BigRational;
use num_traits::Zero;

use crate::error::Error;
use crate::precise::{escalate, Comparison, PreciseReal, Precision};
use crate::quad::QuadReal;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SquaredRadius {
    Rational(BigRational),
    /// `coefficient * pi^2`
    PiSquared(BigRational),
}

impl SquaredRadius {
    pub fn enclose(&self, bits: u32) -> PreciseReal {
        match self {
            SquaredRadius::Rational(q) => PreciseReal::from_rational(q, bits),
            SquaredRadius::PiSquared(c) => {
                let pi = PreciseReal::pi(bits + 8);
                pi.square().mul_rational(c).with_bits(bits)
            }
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, SquaredRadius::Rational(_))
    }
}

/// A squared radius together with its precision policy and a cached
/// enclosure at the starting precision.
#[derive(Clone, Debug)]
pub struct Threshold {
    squared: SquaredRadius,
    policy: Precision,
    base: PreciseReal,
}

impl Threshold {
    pub fn new(squared: SquaredRadius, policy: Precision) -> Self {
        let base = squared.enclose(policy.bits);
        Threshold {
            squared,
            policy,
            base,
        }
    }

    pub fn rational(q: BigRational, policy: Precision) -> Self {
        Threshold::new(SquaredRadius::Rational(q), policy)
    }

    pub fn pi_squared(coefficient: BigRational, policy: Precision) -> Self {
        Threshold::new(SquaredRadius::PiSquared(coefficient), policy)
    }

    pub fn squared(&self) -> &SquaredRadius {
        &self.squared
    }

    pub fn policy(&self) -> Precision {
        self.policy
    }

    /// Enclosure of the squared radius at the starting precision.
    pub fn base_enclosure(&self) -> &PreciseReal {
        &self.base
    }

    pub fn enclosure(&self, bits: u32) -> PreciseReal {
        if bits == self.policy.bits {
            self.base.clone()
        } else {
            self.squared.enclose(bits)
        }
    }

    /// Enclosure of the radius itself.
    pub fn radius_enclosure(&self, bits: u32) -> PreciseReal {
        self.enclosure(bits)
            .sqrt()
            .expect("squared radius is nonnegative")
    }

    /// Certified order of `value` relative to the squared radius.
    pub fn compare_rational(&self, value: &BigRational) -> Result<Ordering, Error> {
        match &self.squared {
            SquaredRadius::Rational(q) => Ok(value.cmp(q)),
            SquaredRadius::PiSquared(c) if c.is_zero() => Ok(value.cmp(c)),
            SquaredRadius::PiSquared(_) => {
                if let Some(o) = self.base.compare_rational(value).to_ordering() {
                    return Ok(o.reverse());
                }
                escalate(self.policy, |bits| {
                    self.squared
                        .enclose(bits)
                        .compare_rational(value)
                        .to_ordering()
                        .map(Ordering::reverse)
                })
            }
        }
    }

    pub fn compare_quad(&self, value: &QuadReal) -> Result<Ordering, Error> {
        if let Some(q) = value.as_rational() {
            return self.compare_rational(q);
        }
        match &self.squared {
            SquaredRadius::Rational(q) => Ok(value.cmp(&QuadReal::from_rational(q.clone()))),
            SquaredRadius::PiSquared(c) if c.is_zero() => Ok(value.signum()),
            SquaredRadius::PiSquared(_) => escalate(self.policy, |bits| {
                let v = value.enclose(bits);
                match v.compare(&self.enclosure(bits)) {
                    Comparison::Undecided => None,
                    c => c.to_ordering(),
                }
            }),
        }
    }

    /// Whether `value <= R^2` (closed disk).
    pub fn admits_rational(&self, value: &BigRational) -> Result<bool, Error> {
        Ok(self.compare_rational(value)? != Ordering::Greater)
    }

    pub fn admits_quad(&self, value: &QuadReal) -> Result<bool, Error> {
        Ok(self.compare_quad(value)? != Ordering::Greater)
    }
}
