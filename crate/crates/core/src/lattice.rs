//! Plane lattices: Gauss reduction, the canonical frame `d(1,0), d(x,y)`,
//! primitivity, and enumeration of short lattice vectors.
//!
//! Basis coordinates are exact elements of Q(sqrt 3), so reduction steps
//! are decided exactly. Only comparisons against transcendental radii go
//! through interval enclosures.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::Error;
use crate::precise::{escalate, Comparison, PreciseReal, Precision};
use crate::quad::QuadReal;
use crate::threshold::Threshold;

/// Integer coordinates `(a, b)` of the lattice point `a e1 + b e2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct IntVector {
    pub a: i64,
    pub b: i64,
}

impl IntVector {
    pub const fn new(a: i64, b: i64) -> Self {
        IntVector { a, b }
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    /// `gcd(|a|, |b|)` with `gcd(n, 0) = |n|`.
    pub fn content(&self) -> u64 {
        self.a.unsigned_abs().gcd(&self.b.unsigned_abs())
    }

    pub fn is_primitive(&self) -> Result<bool, Error> {
        if self.is_zero() {
            return Err(Error::ZeroVector);
        }
        Ok(self.content() == 1)
    }

    pub fn neg(&self) -> IntVector {
        IntVector::new(-self.a, -self.b)
    }

    /// Enumeration order: by `b`, then by `a`.
    pub fn cmp_lex(&self, other: &IntVector) -> Ordering {
        (self.b, self.a).cmp(&(other.b, other.a))
    }
}

impl fmt::Display for IntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a, self.b)
    }
}

pub fn is_primitive(v: IntVector) -> Result<bool, Error> {
    v.is_primitive()
}

pub type PlaneVector = [QuadReal; 2];

fn dot(u: &PlaneVector, v: &PlaneVector) -> QuadReal {
    &(&u[0] * &v[0]) + &(&u[1] * &v[1])
}

fn cross(u: &PlaneVector, v: &PlaneVector) -> QuadReal {
    &(&u[0] * &v[1]) - &(&u[1] * &v[0])
}

fn combine(m: i64, u: &PlaneVector, n: i64, v: &PlaneVector) -> PlaneVector {
    [
        &u[0].scale_int(m) + &v[0].scale_int(n),
        &u[1].scale_int(m) + &v[1].scale_int(n),
    ]
}

/// Two plane vectors spanning a lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeBasis {
    e1: PlaneVector,
    e2: PlaneVector,
}

impl LatticeBasis {
    pub fn new(e1: PlaneVector, e2: PlaneVector) -> Result<Self, Error> {
        if cross(&e1, &e2).is_zero() {
            return Err(Error::DegenerateBasis);
        }
        Ok(LatticeBasis { e1, e2 })
    }

    pub fn from_rationals(e1: [BigRational; 2], e2: [BigRational; 2]) -> Result<Self, Error> {
        let [a, b] = e1;
        let [c, d] = e2;
        LatticeBasis::new([a.into(), b.into()], [c.into(), d.into()])
    }

    pub fn from_integers(e1: [i64; 2], e2: [i64; 2]) -> Result<Self, Error> {
        LatticeBasis::new(
            [QuadReal::from_integer(e1[0]), QuadReal::from_integer(e1[1])],
            [QuadReal::from_integer(e2[0]), QuadReal::from_integer(e2[1])],
        )
    }

    pub fn e1(&self) -> &PlaneVector {
        &self.e1
    }

    pub fn e2(&self) -> &PlaneVector {
        &self.e2
    }

    pub fn determinant(&self) -> QuadReal {
        cross(&self.e1, &self.e2)
    }

    pub fn area(&self) -> QuadReal {
        self.determinant().abs()
    }

    /// `(|e1|^2, e1.e2, |e2|^2)`
    pub fn gram(&self) -> (QuadReal, QuadReal, QuadReal) {
        (
            dot(&self.e1, &self.e1),
            dot(&self.e1, &self.e2),
            dot(&self.e2, &self.e2),
        )
    }

    /// `m e1 + n e2`
    pub fn point(&self, m: i64, n: i64) -> PlaneVector {
        combine(m, &self.e1, n, &self.e2)
    }

    pub fn transformed(&self, t: &Unimodular) -> Result<LatticeBasis, Error> {
        let [[a, b], [c, d]] = t.0;
        LatticeBasis::new(self.point(a, b), self.point(c, d))
    }
}

pub fn squared_norm(v: &PlaneVector) -> QuadReal {
    dot(v, v)
}

/// Integer change of basis with determinant `+-1`. Row `i` holds the
/// coefficients of output vector `i` in the input basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Unimodular(pub [[i64; 2]; 2]);

impl Unimodular {
    pub const IDENTITY: Unimodular = Unimodular([[1, 0], [0, 1]]);

    pub fn determinant(&self) -> i128 {
        let [[a, b], [c, d]] = self.0;
        a as i128 * d as i128 - b as i128 * c as i128
    }

    pub fn is_unimodular(&self) -> bool {
        self.determinant().abs() == 1
    }

    /// `self * other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &Unimodular) -> Result<Unimodular, Error> {
        let m = |i: usize, j: usize| -> Result<i64, Error> {
            let x = (self.0[i][0] as i128) * (other.0[0][j] as i128)
                + (self.0[i][1] as i128) * (other.0[1][j] as i128);
            i64::try_from(x).map_err(|_| Error::Overflow)
        };
        Ok(Unimodular([[m(0, 0)?, m(0, 1)?], [m(1, 0)?, m(1, 1)?]]))
    }

    fn swap_rows(&mut self) {
        self.0.swap(0, 1);
    }

    fn negate_row(&mut self, i: usize) {
        self.0[i] = [-self.0[i][0], -self.0[i][1]];
    }

    fn sub_row_multiple(&mut self, target: usize, m: i64, source: usize) -> Result<(), Error> {
        for j in 0..2 {
            let prod = m.checked_mul(self.0[source][j]).ok_or(Error::Overflow)?;
            self.0[target][j] = self.0[target][j].checked_sub(prod).ok_or(Error::Overflow)?;
        }
        Ok(())
    }
}

/// A Gauss-reduced basis together with the transform that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedBasis {
    basis: LatticeBasis,
    transform: Unimodular,
}

impl ReducedBasis {
    pub fn basis(&self) -> &LatticeBasis {
        &self.basis
    }

    pub fn transform(&self) -> &Unimodular {
        &self.transform
    }
}

/// Gauss-Lagrange reduction.
///
/// On return `|e1| <= |e2| <= |e1 +- e2|`, `e1` is a shortest nonzero vector
/// of the lattice and `e1 . e2 >= 0`, so the angle between them lies in
/// `[pi/3, pi/2]`.
pub fn reduce(basis: &LatticeBasis) -> Result<ReducedBasis, Error> {
    if basis.determinant().is_zero() {
        return Err(Error::DegenerateBasis);
    }
    let mut u = basis.e1.clone();
    let mut v = basis.e2.clone();
    let mut t = Unimodular::IDENTITY;
    let mut nu = squared_norm(&u);
    let mut nv = squared_norm(&v);
    loop {
        if nv < nu {
            std::mem::swap(&mut u, &mut v);
            std::mem::swap(&mut nu, &mut nv);
            t.swap_rows();
        }
        let ratio = dot(&u, &v).checked_div(&nu).ok_or(Error::DegenerateBasis)?;
        // ties at 1/2 are left alone so reduced bases are fixed points
        if ratio.abs().scale_int(2) <= QuadReal::one() {
            break;
        }
        let mu = ratio.round();
        let m = mu.to_i64().ok_or(Error::Overflow)?;
        v = combine(-m, &u, 1, &v);
        t.sub_row_multiple(1, m, 0)?;
        nv = squared_norm(&v);
        if nv >= nu {
            break;
        }
    }
    if dot(&u, &v).is_negative() {
        v = [-v[0].clone(), -v[1].clone()];
        t.negate_row(1);
    }
    Ok(ReducedBasis {
        basis: LatticeBasis { e1: u, e2: v },
        transform: t,
    })
}

/// Lattice in the frame `e1' = d(1,0)`, `e2' = d(x,y)` with `0 <= x <= 1/2`.
///
/// `d` is stored squared so every field stays exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizedBasis {
    d_squared: QuadReal,
    x: QuadReal,
    y: QuadReal,
}

impl NormalizedBasis {
    pub fn new(d_squared: QuadReal, x: QuadReal, y: QuadReal) -> Result<Self, Error> {
        if !d_squared.is_positive() {
            return Err(Error::InvalidInput("d must be positive".into()));
        }
        let half = QuadReal::from_rational(BigRational::new(1.into(), 2.into()));
        if x.is_negative() || x > half {
            return Err(Error::InvalidInput(format!("x = {x} outside [0, 1/2]")));
        }
        if !y.is_positive() {
            return Err(Error::InvalidInput("y must be positive".into()));
        }
        if &x.square() + &y.square() < QuadReal::one() {
            return Err(Error::InvalidInput(
                "x^2 + y^2 < 1: d is not the minimum".into(),
            ));
        }
        Ok(NormalizedBasis { d_squared, x, y })
    }

    /// The extremal lattice `d(1,0), d(x, sqrt 3)` with rational `d`.
    pub fn canonical(d: &BigRational, x: QuadReal) -> Result<Self, Error> {
        NormalizedBasis::new(QuadReal::from_rational(d * d), x, QuadReal::sqrt3())
    }

    pub fn d_squared(&self) -> &QuadReal {
        &self.d_squared
    }

    pub fn d(&self, bits: u32) -> PreciseReal {
        self.d_squared
            .enclose(bits + 4)
            .sqrt()
            .expect("positive")
            .with_bits(bits)
    }

    pub fn x(&self) -> &QuadReal {
        &self.x
    }

    pub fn y(&self) -> &QuadReal {
        &self.y
    }

    /// `d^2 y`, the area of a fundamental parallelogram.
    pub fn area(&self) -> QuadReal {
        &self.d_squared * &self.y
    }

    /// Whether `y >= sqrt 3`, i.e. the area is at least `d^2 sqrt 3`.
    pub fn meets_area_floor(&self) -> bool {
        self.y >= QuadReal::sqrt3()
    }

    /// `|a e1' + b e2'|^2 = d^2 ((a + b x)^2 + (b y)^2)`
    pub fn squared_length(&self, v: IntVector) -> QuadReal {
        let a = QuadReal::from_integer(v.a);
        let b = QuadReal::from_integer(v.b);
        let first = &a + &(&b * &self.x);
        let second = &b * &self.y;
        &self.d_squared * &(&first.square() + &second.square())
    }

    pub fn length(&self, v: IntVector, bits: u32) -> PreciseReal {
        self.squared_length(v)
            .enclose(bits + 4)
            .sqrt()
            .expect("nonnegative")
            .with_bits(bits)
    }
}

/// Moves a reduced basis into the canonical frame by a rotation and, if
/// needed, a reflection.
pub fn normalize(reduced: &ReducedBasis) -> NormalizedBasis {
    let (n1, g12, _) = reduced.basis.gram();
    let det = reduced.basis.determinant().abs();
    let x = g12.checked_div(&n1).expect("nonzero basis vector").abs();
    let y = det.checked_div(&n1).expect("nonzero basis vector");
    NormalizedBasis {
        d_squared: n1,
        x,
        y,
    }
}

/// Reduces and normalizes in one step.
pub fn normalize_basis(basis: &LatticeBasis) -> Result<NormalizedBasis, Error> {
    Ok(normalize(&reduce(basis)?))
}

/// All nonzero `(a, b)` with `|a e1' + b e2'|^2 <= R^2`, sorted by `(b, a)`.
pub fn enumerate_short(
    basis: &NormalizedBasis,
    bound: &Threshold,
    primitive_only: bool,
) -> Result<Vec<IntVector>, Error> {
    let bits = bound.policy().bits;
    let r2 = bound.enclosure(bits);
    let d2 = basis.d_squared.enclose(bits);
    let x = basis.x.enclose(bits);
    let y2 = basis.y.square().enclose(bits);
    let reach = r2.div(&d2).ok_or(Error::DegenerateBasis)?;
    let b_max = reach
        .div(&y2)
        .ok_or(Error::DegenerateBasis)?
        .sqrt()
        .map(|s| s.hi().floor())
        .unwrap_or_else(BigInt::zero);
    let b_max = b_max.to_i64().ok_or(Error::Overflow)?;
    let mut out = Vec::new();
    for b in -b_max..=b_max {
        let bb = PreciseReal::from_integer(b, bits);
        let slack = reach.sub(&bb.square().mul(&y2));
        let Some(w) = slack.sqrt() else { continue };
        let center = bb.mul(&x).neg();
        let lo = center
            .sub(&w)
            .lo()
            .floor()
            .to_i64()
            .ok_or(Error::Overflow)?;
        let hi = center.add(&w).hi().ceil().to_i64().ok_or(Error::Overflow)?;
        for a in lo..=hi {
            let v = IntVector::new(a, b);
            if v.is_zero() || (primitive_only && v.content() != 1) {
                continue;
            }
            if bound.admits_quad(&basis.squared_length(v))? {
                out.push(v);
            }
        }
    }
    out.sort_by(IntVector::cmp_lex);
    Ok(out)
}

/// Outcome of checking `|e1| + |e2| < 3 A^2` where `sqrt(3) A^2` is the area.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DiameterCertificate {
    /// `|e1| >= 1` and `A >= |e1|`.
    pub hypotheses_hold: bool,
    pub bound_holds: bool,
}

pub fn diameter_certificate(
    reduced: &ReducedBasis,
    policy: Precision,
) -> Result<DiameterCertificate, Error> {
    let (n1, _, n2) = reduced.basis.gram();
    let area = reduced.basis.area();
    // A >= |e1|  <=>  area / sqrt3 >= |e1|^2  <=>  area >= sqrt3 |e1|^2
    let hypotheses_hold = n1 >= QuadReal::one() && area >= &QuadReal::sqrt3() * &n1;
    // 3 A^2 = sqrt3 * area
    let target = &QuadReal::sqrt3() * &area;
    let bound_holds = escalate(policy, |bits| {
        let l1 = n1.enclose(bits + 4).sqrt()?;
        let l2 = n2.enclose(bits + 4).sqrt()?;
        match l1.add(&l2).compare(&target.enclose(bits + 4)) {
            Comparison::Less => Some(true),
            Comparison::Greater => Some(false),
            Comparison::Undecided => None,
        }
    })?;
    Ok(DiameterCertificate {
        hypotheses_hold,
        bound_holds,
    })
}

/// Integer coefficients of `v` in terms of the basis, when it is a lattice
/// point.
pub fn coordinates(basis: &LatticeBasis, v: &PlaneVector) -> Option<(BigInt, BigInt)> {
    let det = basis.determinant();
    let m = cross(v, &basis.e2).checked_div(&det)?;
    let n = cross(&basis.e1, v).checked_div(&det)?;
    let m = m.as_rational()?.clone();
    let n = n.as_rational()?.clone();
    (m.is_integer() && n.is_integer()).then(|| (m.to_integer(), n.to_integer()))
}

impl fmt::Display for NormalizedBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d^2={}, x={}, y={}", self.d_squared, self.x, self.y)
    }
}
