//! Boundary equations for horizontal surfaces in framed Seifert fibered
//! spaces.
//!
//! With fiber invariants `(alpha_i, beta_i)` and boundary curves
//! `c_ij = (u_ij, v_ij)` on the boundary tori, a horizontal surface meeting
//! each regular fiber `u` times satisfies
//!
//! ```text
//! sum_j u_ij = u != 0                          (every torus i)
//! u * sum_i beta_i / alpha_i + sum_ij v_ij / u_ij = 0
//! ```
//!
//! Coordinates are taken in whatever framing the caller uses. All
//! arithmetic is exact.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::Error;

/// A singular fiber of type `(alpha, beta)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fiber {
    pub alpha: i64,
    pub beta: i64,
}

impl Fiber {
    pub fn new(alpha: i64, beta: i64) -> Result<Self, Error> {
        if alpha < 2 {
            return Err(Error::InvalidInput(format!(
                "fiber multiplicity must be at least 2, got {alpha}"
            )));
        }
        if alpha.gcd(&beta) != 1 {
            return Err(Error::InvalidInput(format!(
                "fiber invariants {alpha}/{beta} are not coprime"
            )));
        }
        Ok(Fiber { alpha, beta })
    }

    pub fn ratio(&self) -> BigRational {
        BigRational::new(self.beta.into(), self.alpha.into())
    }
}

impl fmt::Display for Fiber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.alpha, self.beta)
    }
}

impl std::str::FromStr for Fiber {
    type Err = Error;
    /// `alpha/beta`
    fn from_str(s: &str) -> Result<Self, Error> {
        let (a, b) = s
            .split_once('/')
            .ok_or_else(|| Error::Parse(format!("fiber {s:?} is not alpha/beta")))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<i64>()
                .map_err(|_| Error::Parse(format!("bad integer {t:?} in fiber {s:?}")))
        };
        Fiber::new(parse(a)?, parse(b)?)
    }
}

/// `(g; h; alpha_1, beta_1; ...; alpha_k, beta_k)`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeifertPresentation {
    genus: u64,
    boundary_count: u64,
    fibers: Vec<Fiber>,
}

impl SeifertPresentation {
    pub fn new(genus: u64, boundary_count: u64, fibers: Vec<Fiber>) -> Result<Self, Error> {
        if boundary_count == 0 {
            return Err(Error::InvalidInput(
                "at least one boundary torus is required".into(),
            ));
        }
        Ok(SeifertPresentation {
            genus,
            boundary_count,
            fibers,
        })
    }

    pub fn genus(&self) -> u64 {
        self.genus
    }

    pub fn boundary_count(&self) -> u64 {
        self.boundary_count
    }

    pub fn fibers(&self) -> &[Fiber] {
        &self.fibers
    }

    /// `sum beta_i / alpha_i`
    pub fn fiber_sum(&self) -> BigRational {
        self.fibers
            .iter()
            .fold(BigRational::zero(), |acc, f| acc + f.ratio())
    }
}

/// A boundary curve `(u, v)`; `u` counts intersections with the fiber.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Curve {
    pub u: i64,
    pub v: i64,
}

impl Curve {
    pub const fn new(u: i64, v: i64) -> Self {
        Curve { u, v }
    }
}

/// Boundary curves grouped by torus, with the fiber intersection number.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundarySystem {
    pub tori: Vec<Vec<Curve>>,
    pub u_fiber: i64,
}

impl BoundarySystem {
    pub fn new(tori: Vec<Vec<Curve>>, u_fiber: i64) -> Self {
        BoundarySystem { tori, u_fiber }
    }

    /// Parses `u,v;u,v|u,v`: `|` separates tori, `;` separates curves.
    pub fn parse(text: &str, u_fiber: i64) -> Result<Self, Error> {
        let mut tori = Vec::new();
        for torus in text.split('|') {
            let mut curves = Vec::new();
            for curve in torus.split(';').map(str::trim).filter(|c| !c.is_empty()) {
                let (u, v) = curve
                    .split_once(',')
                    .ok_or_else(|| Error::Parse(format!("curve {curve:?} is not u,v")))?;
                let int = |t: &str| {
                    t.trim()
                        .parse::<i64>()
                        .map_err(|_| Error::Parse(format!("bad integer {t:?} in curve {curve:?}")))
                };
                curves.push(Curve::new(int(u)?, int(v)?));
            }
            tori.push(curves);
        }
        Ok(BoundarySystem { tori, u_fiber })
    }
}

/// Per torus: whether its `u` values sum to `u_fiber != 0`.
pub fn check_fiber_sums(sys: &BoundarySystem) -> Vec<bool> {
    sys.tori
        .iter()
        .map(|curves| {
            sys.u_fiber != 0
                && curves.iter().map(|c| c.u as i128).sum::<i128>() == sys.u_fiber as i128
        })
        .collect()
}

/// `u * sum beta_i / alpha_i + sum v_ij / u_ij`
pub fn euler_relation_value(
    pres: &SeifertPresentation,
    sys: &BoundarySystem,
) -> Result<BigRational, Error> {
    let mut total = BigRational::from_integer(sys.u_fiber.into()) * pres.fiber_sum();
    for c in sys.tori.iter().flatten() {
        if c.u == 0 {
            return Err(Error::ZeroU);
        }
        total += BigRational::new(c.v.into(), c.u.into());
    }
    Ok(total)
}

/// Whether the Euler relation holds exactly.
pub fn check_euler_relation(
    pres: &SeifertPresentation,
    sys: &BoundarySystem,
) -> Result<bool, Error> {
    Ok(euler_relation_value(pres, sys)?.is_zero())
}

/// The slope forced on a single boundary torus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolvedSlope {
    /// Primitive `(u0, v0)` with `u0 > 0`.
    pub u0: i64,
    pub v0: i64,
    /// Multiplicities `m_j`, all of one sign, with `sum m_j u0 = u`.
    pub multiplicities: Vec<i64>,
    /// The fiber sum vanished, so the relation only forces `v0 = 0`.
    pub degenerate: bool,
}

impl SolvedSlope {
    /// The boundary system `c_j = m_j (u0, v0)` on one torus.
    pub fn expand(&self, u_fiber: i64) -> BoundarySystem {
        let curves = self
            .multiplicities
            .iter()
            .map(|&m| Curve::new(m * self.u0, m * self.v0))
            .collect();
        BoundarySystem::new(vec![curves], u_fiber)
    }
}

impl fmt::Display for SolvedSlope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.u0, self.v0)
    }
}

/// Splits `total` into `parts` nonzero integers of its sign, as evenly as
/// possible, larger parts first.
fn split_evenly(total: i64, parts: u64) -> Option<Vec<i64>> {
    let parts_i = i64::try_from(parts).ok()?;
    if parts_i == 0 || total.unsigned_abs() < parts {
        return None;
    }
    let sign = total.signum();
    let (base, extra) = total.abs().div_rem(&parts_i);
    Some(
        (0..parts_i)
            .map(|j| sign * (base + i64::from(j < extra)))
            .collect(),
    )
}

/// Solves for the common slope of `n_curves` parallel boundary curves on
/// the single boundary torus.
///
/// With `c_j = m_j (u0, v0)` the relation reads
/// `u * sum beta/alpha + n v0 / u0 = 0`, so `v0 / u0 = -(u / n) sum beta/alpha`.
/// The multiplicities must then be nonzero integers of one sign adding up
/// to `u / u0`.
pub fn solve_slope(
    pres: &SeifertPresentation,
    u_fiber: i64,
    n_curves: u64,
) -> Result<SolvedSlope, Error> {
    if pres.boundary_count != 1 {
        return Err(Error::InvalidInput(format!(
            "slope solving needs exactly one boundary torus, got {}",
            pres.boundary_count
        )));
    }
    if u_fiber == 0 {
        return Err(Error::ZeroU);
    }
    if n_curves == 0 {
        return Err(Error::InvalidInput("at least one curve is required".into()));
    }
    let sum = pres.fiber_sum();
    let ratio = -(BigRational::from_integer(u_fiber.into())
        / BigRational::from_integer(n_curves.into()))
        * &sum;
    let to_i64 = |n: &BigInt| n.to_i64().ok_or(Error::Overflow);
    let u0 = to_i64(ratio.denom())?;
    let v0 = to_i64(ratio.numer())?;
    if u_fiber % u0 != 0 {
        return Err(Error::Inconsistent(format!(
            "slope {u0},{v0} does not divide the fiber intersection {u_fiber}"
        )));
    }
    let multiplicities = split_evenly(u_fiber / u0, n_curves).ok_or_else(|| {
        Error::Inconsistent(format!(
            "{} copies of slope {u0},{v0} cannot meet the fiber {u_fiber} times",
            n_curves
        ))
    })?;
    Ok(SolvedSlope {
        u0,
        v0,
        multiplicities,
        degenerate: sum.is_zero(),
    })
}
