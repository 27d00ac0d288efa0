//! Period-domain membership and monodromy of one-parameter degenerations.
//!
//! A degeneration is ingested through its monodromy `T` on the lattice. Some
//! power `T^m` is unipotent; its logarithm `N` has `N^3 = 0` and the nilpotency
//! order gives the type. The image of `N` (type II) or `N^2` (type III) is an
//! isotropic rational subspace, which names the boundary stratum the family
//! limits to.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::json;
use crate::lattice::intmat::{self, IntMatrix, RatMatrix};
use crate::lattice::{
    BoundaryStratumDescriptor, IsotropicQuotient, Lattice, LatticeError, LatticeVector,
    RationalSubspace,
};

/// `2*3*5*7*11`.
pub const DEFAULT_M_MAX: u64 = 2310;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DegenerationError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("monodromy must be a {0}x{0} matrix")]
    Shape(usize),
    #[error("monodromy does not preserve the bilinear form")]
    NotFormPreserving,
    #[error("monodromy is not invertible over the integers (determinant {0})")]
    NotUnimodular(String),
    #[error("monodromy is not quasi-unipotent: characteristic polynomial keeps the non-cyclotomic factor {residual:?} (ascending coefficients)")]
    NotQuasiUnipotent { residual: Vec<String> },
    #[error("smallest unipotent power is {order}, above the search limit {limit}")]
    OrderExceedsLimit { order: u64, limit: u64 },
    #[error("log-monodromy has N^3 != 0, impossible for weight-two K3 type")]
    NilpotencyTooHigh,
    #[error("type I degeneration (N = 0) has no boundary stratum")]
    NoBoundaryStratum,
    #[error("boundary vector must have positive norm, got {0}")]
    NonPositiveBoundaryVector(f64),
    #[error("boundary vector has {found} coordinates, quotient rank is {expected}")]
    BoundaryVectorLength { expected: usize, found: usize },
}

pub type Result<T> = std::result::Result<T, DegenerationError>;

/// A vector `w = x + i y` in `L (x) C` with rational coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodPoint {
    pub re: Vec<BigRational>,
    pub im: Vec<BigRational>,
    /// Allowed `|(w,w)|`; zero for exact points.
    pub tolerance: f64,
}

impl PeriodPoint {
    pub fn exact(re: Vec<BigRational>, im: Vec<BigRational>) -> Self {
        PeriodPoint {
            re,
            im,
            tolerance: 0.0,
        }
    }

    /// Converts floating coordinates exactly (every finite double is rational).
    pub fn numeric(re: &[f64], im: &[f64], tolerance: f64) -> Option<Self> {
        let conv = |v: &[f64]| -> Option<Vec<BigRational>> {
            v.iter().map(|&x| BigRational::from_float(x)).collect()
        };
        Some(PeriodPoint {
            re: conv(re)?,
            im: conv(im)?,
            tolerance,
        })
    }
}

/// Outcome of [`is_in_domain`], with the residuals it was decided on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainCheck {
    pub inside: bool,
    /// `(w, w)` as `[re, im]`.
    pub self_pairing: [f64; 2],
    /// `(w, conj w)`.
    pub hermitian_norm: f64,
}

/// Tests `(w,w) = 0` (within tolerance) and `(w, conj w) > 0`.
pub fn is_in_domain(
    l: &Lattice,
    p: &PeriodPoint,
) -> std::result::Result<DomainCheck, LatticeError> {
    let xx = l.pairing_rational(&p.re, &p.re)?;
    let yy = l.pairing_rational(&p.im, &p.im)?;
    let xy = l.pairing_rational(&p.re, &p.im)?;
    let two = BigRational::from_integer(BigInt::from(2));
    let ww_re = &xx - &yy;
    let ww_im = &two * &xy;
    let herm = &xx + &yy;
    let modulus_sq = &ww_re * &ww_re + &ww_im * &ww_im;
    let tol = BigRational::from_float(p.tolerance.max(0.0)).unwrap_or_else(BigRational::zero);
    let inside = modulus_sq <= &tol * &tol && herm.is_positive();
    Ok(DomainCheck {
        inside,
        self_pairing: [to_f64(&ww_re), to_f64(&ww_im)],
        hermitian_norm: to_f64(&herm),
    })
}

fn to_f64(q: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

/// A point `[e, v]` of a line stratum: oriented isotropic `e`, and `v` in
/// `(e^perp / e) (x) R` with positive norm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub e: LatticeVector,
    pub positive_orientation: bool,
    pub v: Vec<f64>,
}

impl BoundaryPoint {
    pub fn new(
        quotient: &IsotropicQuotient,
        v: Vec<f64>,
        positive_orientation: bool,
    ) -> Result<Self> {
        let rank = quotient.lattice.rank();
        if v.len() != rank {
            return Err(DegenerationError::BoundaryVectorLength {
                expected: rank,
                found: v.len(),
            });
        }
        let norm = quadratic_value(quotient.lattice.gram(), &v);
        if norm.is_nan() || norm <= 0.0 {
            return Err(DegenerationError::NonPositiveBoundaryVector(norm));
        }
        Ok(BoundaryPoint {
            e: quotient.isotropic.clone(),
            positive_orientation,
            v,
        })
    }
}

pub(crate) fn quadratic_value(gram: &[Vec<i64>], v: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (i, row) in gram.iter().enumerate() {
        for (j, g) in row.iter().enumerate() {
            acc += v[i] * (*g as f64) * v[j];
        }
    }
    acc
}

/// Monodromy matrix with its unipotency index and exact logarithm.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonodromyData {
    /// Columns are images of the basis vectors.
    #[serde(rename = "T")]
    pub t: Vec<Vec<i64>>,
    /// Smallest `m` with `T^m` unipotent.
    pub m: u64,
    /// `N = log(T^m)`.
    #[serde(rename = "N", with = "json::rational_rows")]
    pub n: Vec<Vec<BigRational>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DegenerationType {
    #[serde(rename = "I")]
    TypeI,
    #[serde(rename = "II")]
    TypeII,
    #[serde(rename = "III")]
    TypeIII,
}

fn totient(mut k: u64) -> u64 {
    let mut out = k;
    let mut p = 2;
    while p * p <= k {
        if k.is_multiple_of(p) {
            while k.is_multiple_of(p) {
                k /= p;
            }
            out -= out / p;
        }
        p += 1;
    }
    if k > 1 {
        out -= out / k;
    }
    out
}

fn mobius(mut k: u64) -> i32 {
    let mut sign = 1;
    let mut p = 2;
    while p * p <= k {
        if k.is_multiple_of(p) {
            k /= p;
            if k.is_multiple_of(p) {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if k > 1 {
        sign = -sign;
    }
    sign
}

fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `Phi_k(x) = prod_{d | k} (x^d - 1)^{mu(k/d)}`.
fn cyclotomic(k: u64) -> Vec<BigInt> {
    let mut num = vec![BigInt::one()];
    let mut den = vec![BigInt::one()];
    for d in (1..=k).filter(|d| k.is_multiple_of(*d)) {
        let mut f = vec![BigInt::zero(); d as usize + 1];
        f[0] = -BigInt::one();
        f[d as usize] = BigInt::one();
        match mobius(k / d) {
            1 => num = poly_mul(&num, &f),
            -1 => den = poly_mul(&den, &f),
            _ => {}
        }
    }
    intmat::poly_div_exact(&num, &den).expect("cyclotomic quotient is exact")
}

/// Orders of the roots of unity among the eigenvalues, or the leftover
/// non-cyclotomic factor of the characteristic polynomial.
fn eigenvalue_orders(t: &IntMatrix) -> std::result::Result<Vec<u64>, Vec<BigInt>> {
    let n = t.len() as u64;
    let mut rem = intmat::charpoly(t);
    let mut orders = Vec::new();
    // phi(k) >= sqrt(k/2), so every k with phi(k) <= n is at most 2 n^2
    for k in 1..=(2 * n * n).max(2) {
        if totient(k) > n {
            continue;
        }
        let phi = cyclotomic(k);
        while rem.len() > 1 {
            match intmat::poly_div_exact(&rem, &phi) {
                Some(q) => {
                    rem = q;
                    if !orders.contains(&k) {
                        orders.push(k);
                    }
                }
                None => break,
            }
        }
        if rem.len() == 1 {
            break;
        }
    }
    if rem.len() == 1 {
        Ok(orders)
    } else {
        Err(rem)
    }
}

/// Finds the unipotency index `m` and the exact logarithm of `T^m`.
pub fn monodromy_log(t: &[Vec<i64>], l: &Lattice, m_max: u64) -> Result<MonodromyData> {
    let n = l.rank();
    if t.len() != n || t.iter().any(|r| r.len() != n) {
        return Err(DegenerationError::Shape(n));
    }
    if !crate::lattice::preserves_form(l, t) {
        return Err(DegenerationError::NotFormPreserving);
    }
    let tb = intmat::from_i64(t);
    let det = intmat::determinant(&tb);
    if det.abs() != BigInt::one() {
        return Err(DegenerationError::NotUnimodular(det.to_string()));
    }
    let orders = eigenvalue_orders(&tb).map_err(|rem| DegenerationError::NotQuasiUnipotent {
        residual: rem.iter().map(ToString::to_string).collect(),
    })?;
    let m = orders.iter().fold(1u64, |acc, &k| acc.lcm(&k));
    if m > m_max {
        return Err(DegenerationError::OrderExceedsLimit {
            order: m,
            limit: m_max,
        });
    }
    let mut nil = intmat::matrix_power(&tb, m);
    for (i, row) in nil.iter_mut().enumerate() {
        row[i] -= BigInt::one();
    }
    let nil_q = intmat::to_rational(&nil);
    let mut log = vec![vec![BigRational::zero(); n]; n];
    let mut power = nil_q.clone();
    for k in 1..=n {
        if intmat::is_zero_matrix(&power) {
            break;
        }
        let coeff = BigRational::new(
            if k % 2 == 1 {
                BigInt::one()
            } else {
                -BigInt::one()
            },
            BigInt::from(k),
        );
        for (lr, pr) in log.iter_mut().zip(&power) {
            for (a, b) in lr.iter_mut().zip(pr) {
                *a += &coeff * b;
            }
        }
        power = intmat::rat_mul(&power, &nil_q);
    }
    debug_assert!(intmat::is_zero_matrix(&power), "T^m - I must be nilpotent");
    debug_assert!(is_infinitesimal_isometry(l, &log));
    Ok(MonodromyData {
        t: t.to_vec(),
        m,
        n: log,
    })
}

/// `N^T G + G N = 0`.
pub fn is_infinitesimal_isometry(l: &Lattice, n: &RatMatrix) -> bool {
    let g = l.gram_rational();
    let a = intmat::rat_mul(&intmat::transpose(n), &g);
    let b = intmat::rat_mul(&g, n);
    a.iter()
        .zip(&b)
        .all(|(ra, rb)| ra.iter().zip(rb).all(|(x, y)| (x + y).is_zero()))
}

pub fn classify_degeneration(md: &MonodromyData) -> Result<DegenerationType> {
    if intmat::is_zero_matrix(&md.n) {
        return Ok(DegenerationType::TypeI);
    }
    let n2 = intmat::rat_mul(&md.n, &md.n);
    if intmat::is_zero_matrix(&n2) {
        return Ok(DegenerationType::TypeII);
    }
    let n3 = intmat::rat_mul(&n2, &md.n);
    if intmat::is_zero_matrix(&n3) {
        return Ok(DegenerationType::TypeIII);
    }
    Err(DegenerationError::NilpotencyTooHigh)
}

/// Column space of `m` as a rational subspace.
fn image(m: &RatMatrix) -> std::result::Result<RationalSubspace, LatticeError> {
    let (rows, _) = intmat::rref(&intmat::transpose(m));
    RationalSubspace::new(rows)
}

/// Saturated isotropic subspace named by the degeneration: `im N^2` for
/// type III (a line), `im N` for type II (a plane).
pub fn limit_boundary_stratum(
    md: &MonodromyData,
    l: &Lattice,
) -> Result<BoundaryStratumDescriptor> {
    let span = match classify_degeneration(md)? {
        DegenerationType::TypeI => return Err(DegenerationError::NoBoundaryStratum),
        DegenerationType::TypeII => image(&md.n)?,
        DegenerationType::TypeIII => image(&intmat::rat_mul(&md.n, &md.n))?,
    };
    Ok(l.classify_boundary(&span)?)
}
