//! Integral lattices with symmetric bilinear forms.
//!
//! Builds the K3 lattice `E8(-1)^2 + U^3`, its polarized sublattices
//! `lambda^perp`, and classifies isotropic lines and planes into boundary
//! strata data. All arithmetic is exact.

pub mod intmat;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::json;
use intmat::{IntMatrix, RatMatrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("gram matrix is not square")]
    NotSquare,
    #[error("gram matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("empty lattice")]
    Empty,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("bilinear form is degenerate")]
    Degenerate,
    #[error("zero vector")]
    ZeroVector,
    #[error("vector is not isotropic (pairing {0})")]
    NotIsotropic(String),
    #[error("subspace is not isotropic")]
    SubspaceNotIsotropic,
    #[error("vector is not primitive")]
    NotPrimitive,
    #[error("isotropic subspaces of dimension {0} have no boundary stratum (expected 1 or 2)")]
    UnsupportedDimension(usize),
    #[error("subspace basis is linearly dependent")]
    DependentBasis,
    #[error("vector is not orthogonal to the isotropic vector")]
    NotOrthogonal,
    #[error("vector does not lie in the lattice spanned by the basis")]
    NotInLattice,
    #[error("integer overflow converting an exact result to i64")]
    Overflow,
    #[error("polarization degree must be positive")]
    InvalidDegree,
}

pub type Result<T> = std::result::Result<T, LatticeError>;

/// Integer symmetric bilinear form on `Z^rank`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "LatticeJson", into = "LatticeJson")]
pub struct Lattice {
    gram: Vec<Vec<i64>>,
    labels: Option<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct LatticeJson {
    rank: usize,
    gram: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl TryFrom<LatticeJson> for Lattice {
    type Error = LatticeError;

    fn try_from(j: LatticeJson) -> Result<Self> {
        if j.rank != j.gram.len() {
            return Err(LatticeError::DimensionMismatch {
                expected: j.rank,
                found: j.gram.len(),
            });
        }
        Lattice::new(j.gram, j.labels)
    }
}

impl From<Lattice> for LatticeJson {
    fn from(l: Lattice) -> Self {
        LatticeJson {
            rank: l.rank(),
            gram: l.gram,
            labels: l.labels,
        }
    }
}

/// Inertia `(positive, negative)` of a nondegenerate form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub positive: usize,
    pub negative: usize,
}

/// Element of a lattice in its basis coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticeVector(pub Vec<i64>);

impl LatticeVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_big(&self) -> Vec<BigInt> {
        self.0.iter().map(|&x| BigInt::from(x)).collect()
    }

    pub fn to_rational(&self) -> Vec<BigRational> {
        self.0
            .iter()
            .map(|&x| BigRational::from_integer(BigInt::from(x)))
            .collect()
    }
}

impl From<Vec<i64>> for LatticeVector {
    fn from(v: Vec<i64>) -> Self {
        LatticeVector(v)
    }
}

pub(crate) fn to_i64(x: &BigInt) -> Result<i64> {
    x.to_i64().ok_or(LatticeError::Overflow)
}

pub(crate) fn rows_to_i64(m: &IntMatrix) -> Result<Vec<Vec<i64>>> {
    m.iter().map(|r| r.iter().map(to_i64).collect()).collect()
}

/// Cartan matrix of E8 (Bourbaki labelling: chain 1-3-4-5-6-7-8, node 2 on 4).
const E8_EDGES: [(usize, usize); 7] = [(0, 2), (1, 3), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7)];

impl Lattice {
    pub fn new(gram: Vec<Vec<i64>>, labels: Option<Vec<String>>) -> Result<Self> {
        let n = gram.len();
        if n == 0 {
            return Err(LatticeError::Empty);
        }
        if gram.iter().any(|r| r.len() != n) {
            return Err(LatticeError::NotSquare);
        }
        for i in 0..n {
            for j in i + 1..n {
                if gram[i][j] != gram[j][i] {
                    return Err(LatticeError::NotSymmetric(i, j));
                }
            }
        }
        if let Some(l) = &labels {
            if l.len() != n {
                return Err(LatticeError::DimensionMismatch {
                    expected: n,
                    found: l.len(),
                });
            }
        }
        Ok(Lattice { gram, labels })
    }

    /// The hyperbolic plane `U`, gram `[[0,1],[1,0]]`.
    pub fn hyperbolic_plane() -> Self {
        Lattice::new(
            vec![vec![0, 1], vec![1, 0]],
            Some(vec!["e".into(), "f".into()]),
        )
        .expect("valid gram")
    }

    /// `E8(-1)`: the negated E8 Cartan matrix.
    pub fn e8_negative() -> Self {
        let mut g = vec![vec![0i64; 8]; 8];
        for (i, row) in g.iter_mut().enumerate() {
            row[i] = -2;
        }
        for &(i, j) in &E8_EDGES {
            g[i][j] = 1;
            g[j][i] = 1;
        }
        let labels = (1..=8).map(|i| format!("a{i}")).collect();
        Lattice::new(g, Some(labels)).expect("valid gram")
    }

    /// Orthogonal direct sum; labels are prefixed by the summand index.
    pub fn direct_sum(parts: &[Lattice]) -> Self {
        let n: usize = parts.iter().map(Lattice::rank).sum();
        let mut g = vec![vec![0i64; n]; n];
        let mut labels = Vec::with_capacity(n);
        let mut off = 0;
        for (k, p) in parts.iter().enumerate() {
            for i in 0..p.rank() {
                for j in 0..p.rank() {
                    g[off + i][off + j] = p.gram[i][j];
                }
                let base = p
                    .labels
                    .as_ref()
                    .map_or_else(|| format!("b{i}"), |l| l[i].clone());
                labels.push(format!("{k}.{base}"));
            }
            off += p.rank();
        }
        Lattice::new(g, Some(labels)).expect("block sum of symmetric matrices")
    }

    /// Same basis with the form multiplied by `k`.
    pub fn scaled(&self, k: i64) -> Self {
        let g = self
            .gram
            .iter()
            .map(|r| r.iter().map(|x| x * k).collect())
            .collect();
        Lattice::new(g, self.labels.clone()).expect("scaling keeps symmetry")
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn gram_big(&self) -> IntMatrix {
        intmat::from_i64(&self.gram)
    }

    pub fn gram_rational(&self) -> RatMatrix {
        intmat::to_rational(&self.gram_big())
    }

    pub fn determinant(&self) -> BigInt {
        intmat::determinant(&self.gram_big())
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.rank() {
            return Err(LatticeError::DimensionMismatch {
                expected: self.rank(),
                found: len,
            });
        }
        Ok(())
    }

    /// `G v` as a big-integer vector.
    pub(crate) fn apply_gram(&self, v: &[BigInt]) -> Vec<BigInt> {
        self.gram
            .iter()
            .map(|row| {
                row.iter()
                    .zip(v)
                    .filter(|(g, _)| **g != 0)
                    .map(|(g, x)| x * *g)
                    .sum()
            })
            .collect()
    }

    pub(crate) fn pairing_big(&self, v: &[BigInt], w: &[BigInt]) -> BigInt {
        self.apply_gram(w).iter().zip(v).map(|(a, b)| a * b).sum()
    }

    /// `v^T G w` for integral vectors.
    pub fn pairing(&self, v: &LatticeVector, w: &LatticeVector) -> Result<BigInt> {
        self.check_len(v.len())?;
        self.check_len(w.len())?;
        Ok(self.pairing_big(&v.to_big(), &w.to_big()))
    }

    /// `v^T G w` for rational vectors.
    pub fn pairing_rational(&self, v: &[BigRational], w: &[BigRational]) -> Result<BigRational> {
        self.check_len(v.len())?;
        self.check_len(w.len())?;
        let mut acc = BigRational::zero();
        for (i, vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for (j, wj) in w.iter().enumerate() {
                let g = self.gram[i][j];
                if g != 0 && !wj.is_zero() {
                    acc += vi * wj * BigInt::from(g);
                }
            }
        }
        Ok(acc)
    }

    /// Exact inertia by symmetric rational elimination.
    pub fn signature(&self) -> Result<Signature> {
        let (inertia, _) = intmat::symmetric_inertia(&self.gram_rational());
        if inertia.zero > 0 {
            return Err(LatticeError::Degenerate);
        }
        Ok(Signature {
            positive: inertia.positive,
            negative: inertia.negative,
        })
    }

    pub fn is_primitive(&self, v: &LatticeVector) -> Result<bool> {
        self.check_len(v.len())?;
        let g = intmat::gcd_all(&v.to_big());
        if g.is_zero() {
            return Err(LatticeError::ZeroVector);
        }
        Ok(g.is_one())
    }

    /// `gcd { (v, w) : w in L }`, the positive generator of `(v, L)`.
    pub fn divisibility(&self, v: &LatticeVector) -> Result<u64> {
        self.check_len(v.len())?;
        let big = v.to_big();
        if big.iter().all(Zero::is_zero) {
            return Err(LatticeError::ZeroVector);
        }
        let g = intmat::gcd_all(&self.apply_gram(&big));
        if g.is_zero() {
            return Err(LatticeError::Degenerate);
        }
        g.to_u64().ok_or(LatticeError::Overflow)
    }

    /// Saturated integral basis (rows) of `{x in L : (x, s) = 0 for all s in S}`.
    pub fn orthogonal_complement(&self, s: &RationalSubspace) -> Result<Vec<Vec<i64>>> {
        if let Some(v) = s.basis.first() {
            self.check_len(v.len())?;
        }
        let rows = intmat::primitive_rows(&s.basis);
        let g = self.gram_big();
        let constraints = intmat::int_mul(&rows, &g);
        let kernel = intmat::integer_kernel(&constraints, self.rank());
        rows_to_i64(&kernel)
    }

    /// The form restricted to the sublattice spanned by `basis` (rows).
    pub fn sublattice(&self, basis: &[Vec<i64>]) -> Result<Lattice> {
        for b in basis {
            self.check_len(b.len())?;
        }
        let b = intmat::from_i64(basis);
        let g = intmat::int_mul(
            &intmat::int_mul(&b, &self.gram_big()),
            &intmat::transpose(&b),
        );
        Lattice::new(rows_to_i64(&g)?, None)
    }

    /// The induced form on `e^perp / <e>` for a primitive isotropic `e`.
    pub fn quotient_by_isotropic(&self, e: &LatticeVector) -> Result<IsotropicQuotient> {
        self.check_len(e.len())?;
        if !self.is_primitive(e)? {
            return Err(LatticeError::NotPrimitive);
        }
        let norm = self.pairing(e, e)?;
        if !norm.is_zero() {
            return Err(LatticeError::NotIsotropic(norm.to_string()));
        }
        let span = RationalSubspace::from_integer_rows(std::slice::from_ref(&e.0))?;
        let perp = intmat::from_i64(&self.orthogonal_complement(&span)?);
        // coordinates of e in the perp basis; integral because perp is saturated
        let coords = intmat::solve_left(&intmat::to_rational(&perp), &e.to_rational())
            .ok_or(LatticeError::NotInLattice)?;
        if coords.iter().any(|c| !c.is_integer()) {
            return Err(LatticeError::NotInLattice);
        }
        let c: Vec<BigInt> = coords.iter().map(|q| q.to_integer()).collect();
        let (_, w) = intmat::unimodular_completion(&c).ok_or(LatticeError::NotPrimitive)?;
        let adapted = intmat::int_mul(&w, &perp);
        debug_assert_eq!(adapted[0], e.to_big());
        let perp_basis = rows_to_i64(&adapted)?;
        let lifts: Vec<Vec<i64>> = perp_basis[1..].to_vec();
        let lattice = self.sublattice(&lifts)?;
        Ok(IsotropicQuotient {
            isotropic: e.clone(),
            lattice,
            lifts,
            perp_basis,
        })
    }

    /// Saturates `s`, checks isotropy and dimension, and attaches the
    /// quotient lattice and invariants.
    pub fn classify_boundary(&self, s: &RationalSubspace) -> Result<BoundaryStratumDescriptor> {
        let dim = s.dim();
        if dim == 0 {
            return Err(LatticeError::UnsupportedDimension(0));
        }
        self.check_len(s.basis[0].len())?;
        for a in &s.basis {
            for b in &s.basis {
                if !self.pairing_rational(a, b)?.is_zero() {
                    return Err(LatticeError::SubspaceNotIsotropic);
                }
            }
        }
        if dim > 2 {
            return Err(LatticeError::UnsupportedDimension(dim));
        }
        let generators = rows_to_i64(&intmat::saturate(
            &intmat::primitive_rows(&s.basis),
            self.rank(),
        ))?;
        debug_assert_eq!(generators.len(), dim);
        let gen_q = intmat::to_rational(&intmat::from_i64(&generators));
        let change_of_basis = s
            .basis
            .iter()
            .map(|v| intmat::solve_left(&gen_q, v).ok_or(LatticeError::NotInLattice))
            .collect::<Result<RatMatrix>>()?;
        let invariants = self.stratum_invariants(&generators)?;
        let (kind, quotient) = if dim == 1 {
            let e = LatticeVector(generators[0].clone());
            (StratumKind::Line, Some(self.quotient_by_isotropic(&e)?))
        } else {
            (StratumKind::Plane, None)
        };
        Ok(BoundaryStratumDescriptor {
            kind,
            generators,
            change_of_basis,
            quotient,
            invariants,
        })
    }

    fn stratum_invariants(&self, generators: &[Vec<i64>]) -> Result<StratumInvariants> {
        let mut div_all = BigInt::zero();
        let mut class = Vec::new();
        let mut order = BigInt::one();
        for g in generators {
            let big: Vec<BigInt> = g.iter().map(|&x| BigInt::from(x)).collect();
            let d = intmat::gcd_all(&self.apply_gram(&big));
            if d.is_zero() {
                return Err(LatticeError::Degenerate);
            }
            div_all = div_all.gcd(&d);
            for x in &big {
                let q = BigRational::new(x.clone(), d.clone());
                let frac = &q - q.floor();
                order = order.lcm(frac.denom());
                class.push(frac);
            }
        }
        Ok(StratumInvariants {
            divisibility: div_all.to_u64().ok_or(LatticeError::Overflow)?,
            discriminant_class: class,
            class_order: order.to_u64().ok_or(LatticeError::Overflow)?,
        })
    }
}

/// Rational subspace of `L (x) Q` given by a basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalSubspace {
    #[serde(with = "json::rational_rows")]
    basis: Vec<Vec<BigRational>>,
}

impl RationalSubspace {
    pub fn new(basis: Vec<Vec<BigRational>>) -> Result<Self> {
        if let Some(first) = basis.first() {
            if basis.iter().any(|v| v.len() != first.len()) {
                return Err(LatticeError::DimensionMismatch {
                    expected: first.len(),
                    found: basis
                        .iter()
                        .map(Vec::len)
                        .find(|&l| l != first.len())
                        .unwrap_or(0),
                });
            }
            if intmat::rank(&basis) != basis.len() {
                return Err(LatticeError::DependentBasis);
            }
        }
        Ok(RationalSubspace { basis })
    }

    pub fn from_integer_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Self::new(intmat::to_rational(&intmat::from_i64(rows)))
    }

    pub fn basis(&self) -> &[Vec<BigRational>] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// `e^perp / <e>` with the data needed to move between coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsotropicQuotient {
    pub isotropic: LatticeVector,
    /// Induced form on the quotient, in the basis given by `lifts`.
    pub lattice: Lattice,
    /// Representatives in the ambient lattice of the quotient basis.
    pub lifts: Vec<Vec<i64>>,
    /// Basis of `e^perp` whose first vector is `e`, followed by `lifts`.
    pub perp_basis: Vec<Vec<i64>>,
}

impl IsotropicQuotient {
    /// Quotient coordinates of an ambient vector lying in `e^perp`.
    pub fn project(&self, ambient: &LatticeVector, form: &Lattice) -> Result<Vec<i64>> {
        if !form.pairing(ambient, &self.isotropic)?.is_zero() {
            return Err(LatticeError::NotOrthogonal);
        }
        let basis = intmat::to_rational(&intmat::from_i64(&self.perp_basis));
        let y =
            intmat::solve_left(&basis, &ambient.to_rational()).ok_or(LatticeError::NotInLattice)?;
        y[1..]
            .iter()
            .map(|q| {
                if q.is_integer() {
                    to_i64(&q.to_integer())
                } else {
                    Err(LatticeError::NotInLattice)
                }
            })
            .collect()
    }

    /// Ambient representative of quotient coordinates.
    pub fn lift(&self, coords: &[i64]) -> Result<LatticeVector> {
        if coords.len() != self.lifts.len() {
            return Err(LatticeError::DimensionMismatch {
                expected: self.lifts.len(),
                found: coords.len(),
            });
        }
        let n = self.isotropic.len();
        let mut out = vec![BigInt::zero(); n];
        for (c, row) in coords.iter().zip(&self.lifts) {
            for (o, x) in out.iter_mut().zip(row) {
                *o += BigInt::from(*c) * BigInt::from(*x);
            }
        }
        Ok(LatticeVector(
            out.iter().map(to_i64).collect::<Result<_>>()?,
        ))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StratumKind {
    Line,
    Plane,
}

/// Isometry-invariant data attached to a boundary stratum.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratumInvariants {
    /// gcd of `(g, L)` over the generators.
    pub divisibility: u64,
    /// Classes of `g / div(g)` in `L^dual / L`, as fractional coordinates.
    #[serde(with = "json::rational_vec")]
    pub discriminant_class: Vec<BigRational>,
    /// Order of the subgroup those classes generate coordinatewise.
    pub class_order: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryStratumDescriptor {
    pub kind: StratumKind,
    /// Saturated integral basis of the isotropic subspace.
    pub generators: Vec<Vec<i64>>,
    /// Input basis expressed in `generators` (rows).
    #[serde(with = "json::rational_rows")]
    pub change_of_basis: Vec<Vec<BigRational>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub quotient: Option<IsotropicQuotient>,
    pub invariants: StratumInvariants,
}

/// `E8(-1)^2 + U^3`, rank 22, signature (3,19), unimodular.
pub fn build_k3_lattice() -> Lattice {
    let e8 = Lattice::e8_negative();
    let u = Lattice::hyperbolic_plane();
    Lattice::direct_sum(&[e8.clone(), e8, u.clone(), u.clone(), u])
}

/// Index of the first `U` block inside [`build_k3_lattice`].
pub const K3_FIRST_U: usize = 16;

/// `lambda^perp` inside the K3 lattice for `lambda = e + d f` in the first `U`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolarizedLattice {
    pub ambient: Lattice,
    pub lambda: LatticeVector,
    /// Rows: basis of `lambda^perp` in ambient coordinates.
    pub embedding: Vec<Vec<i64>>,
    pub lattice: Lattice,
}

impl PolarizedLattice {
    pub fn to_ambient(&self, coords: &[i64]) -> Result<LatticeVector> {
        if coords.len() != self.embedding.len() {
            return Err(LatticeError::DimensionMismatch {
                expected: self.embedding.len(),
                found: coords.len(),
            });
        }
        let mut out = vec![BigInt::zero(); self.ambient.rank()];
        for (c, row) in coords.iter().zip(&self.embedding) {
            for (o, x) in out.iter_mut().zip(row) {
                *o += BigInt::from(*c) * BigInt::from(*x);
            }
        }
        Ok(LatticeVector(
            out.iter().map(to_i64).collect::<Result<_>>()?,
        ))
    }

    /// Coordinates in the polarized basis of an ambient vector orthogonal to lambda.
    pub fn from_ambient(&self, x: &LatticeVector) -> Result<LatticeVector> {
        if !self.ambient.pairing(x, &self.lambda)?.is_zero() {
            return Err(LatticeError::NotOrthogonal);
        }
        let basis = intmat::to_rational(&intmat::from_i64(&self.embedding));
        let y = intmat::solve_left(&basis, &x.to_rational()).ok_or(LatticeError::NotInLattice)?;
        let coords = y
            .iter()
            .map(|q| {
                if q.is_integer() {
                    to_i64(&q.to_integer())
                } else {
                    Err(LatticeError::NotInLattice)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LatticeVector(coords))
    }
}

pub fn build_polarized_lattice(d: u32) -> Result<PolarizedLattice> {
    if d == 0 {
        return Err(LatticeError::InvalidDegree);
    }
    let ambient = build_k3_lattice();
    let mut lambda = vec![0i64; ambient.rank()];
    lambda[K3_FIRST_U] = 1;
    lambda[K3_FIRST_U + 1] = i64::from(d);
    let lambda = LatticeVector(lambda);
    let span = RationalSubspace::from_integer_rows(std::slice::from_ref(&lambda.0))?;
    let embedding = ambient.orthogonal_complement(&span)?;
    let lattice = ambient.sublattice(&embedding)?;
    Ok(PolarizedLattice {
        ambient,
        lambda,
        embedding,
        lattice,
    })
}

/// Matrix (columns are images of basis vectors) of the Eichler transvection
/// `y -> y - (x,y) e + (e,y) x - (x,x)/2 (e,y) e` for isotropic `e` and
/// `x` orthogonal to `e` with `(x,x)` even. It is an integral isometry.
pub fn eichler_transvection(
    l: &Lattice,
    e: &LatticeVector,
    x: &LatticeVector,
) -> Result<Vec<Vec<i64>>> {
    let ee = l.pairing(e, e)?;
    if !ee.is_zero() {
        return Err(LatticeError::NotIsotropic(ee.to_string()));
    }
    if !l.pairing(e, x)?.is_zero() {
        return Err(LatticeError::NotOrthogonal);
    }
    let xx = l.pairing(x, x)?;
    if xx.is_odd() {
        return Err(LatticeError::NotInLattice);
    }
    let half = xx / 2;
    let n = l.rank();
    let eb = e.to_big();
    let xb = x.to_big();
    let ge = l.apply_gram(&eb);
    let gx = l.apply_gram(&xb);
    let mut m = vec![vec![0i64; n]; n];
    for j in 0..n {
        // (e, b_j) and (x, b_j)
        let ej = &ge[j];
        let xj = &gx[j];
        for i in 0..n {
            let mut v = if i == j {
                BigInt::one()
            } else {
                BigInt::zero()
            };
            v -= xj * &eb[i];
            v += ej * &xb[i];
            v -= &half * ej * &eb[i];
            m[i][j] = to_i64(&v)?;
        }
    }
    Ok(m)
}

/// True iff `m^T G m = G` (columns of `m` are images of basis vectors).
pub fn preserves_form(l: &Lattice, m: &[Vec<i64>]) -> bool {
    let n = l.rank();
    if m.len() != n || m.iter().any(|r| r.len() != n) {
        return false;
    }
    let mb = intmat::from_i64(m);
    let lhs = intmat::int_mul(
        &intmat::int_mul(&intmat::transpose(&mb), &l.gram_big()),
        &mb,
    );
    lhs == l.gram_big()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn hyperbolic_pairing() {
        let u = Lattice::hyperbolic_plane();
        let p = u
            .pairing(&LatticeVector(vec![1, 0]), &LatticeVector(vec![0, 1]))
            .unwrap();
        assert_eq!(p, BigInt::from(1));
        assert_eq!(
            u.signature().unwrap(),
            Signature {
                positive: 1,
                negative: 1
            }
        );
    }

    #[test]
    fn e8_root_has_norm_minus_two() {
        let e8 = Lattice::e8_negative();
        let mut v = vec![0; 8];
        v[3] = 1;
        let v = LatticeVector(v);
        assert_eq!(e8.pairing(&v, &v).unwrap(), BigInt::from(-2));
        assert_eq!(e8.determinant(), BigInt::from(1));
        assert_eq!(
            e8.signature().unwrap(),
            Signature {
                positive: 0,
                negative: 8
            }
        );
    }

    #[test]
    fn polarization_vector_has_norm_2d() {
        let k3 = build_k3_lattice();
        let d = 5;
        let mut v = vec![0; 22];
        v[K3_FIRST_U] = 1;
        v[K3_FIRST_U + 1] = d;
        let v = LatticeVector(v);
        assert_eq!(k3.pairing(&v, &v).unwrap(), BigInt::from(2 * d));
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let u = Lattice::hyperbolic_plane();
        let err = u
            .pairing(&LatticeVector(vec![1]), &LatticeVector(vec![0, 1]))
            .unwrap_err();
        assert_eq!(
            err,
            LatticeError::DimensionMismatch {
                expected: 2,
                found: 1
            }
        );
    }

    #[test]
    fn primitivity_and_divisibility() {
        let k3 = build_k3_lattice();
        let mut v = vec![0; 22];
        v[0] = 2;
        assert!(!k3.is_primitive(&LatticeVector(v)).unwrap());
        let u = Lattice::hyperbolic_plane();
        assert_eq!(u.divisibility(&LatticeVector(vec![1, 0])).unwrap(), 1);
        let u2 = u.scaled(2);
        assert_eq!(u2.divisibility(&LatticeVector(vec![0, 2])).unwrap(), 4);
        assert_eq!(u2.divisibility(&LatticeVector(vec![0, 1])).unwrap(), 2);
        assert_eq!(
            u.is_primitive(&LatticeVector(vec![0, 0])).unwrap_err(),
            LatticeError::ZeroVector
        );
    }

    #[test]
    fn isotropic_vector_is_its_own_complement_in_u() {
        let u = Lattice::hyperbolic_plane();
        let s = RationalSubspace::from_integer_rows(&[vec![1, 0]]).unwrap();
        assert_eq!(u.orthogonal_complement(&s).unwrap(), vec![vec![1, 0]]);
    }

    #[test]
    fn quotient_of_two_hyperbolic_planes() {
        let u = Lattice::hyperbolic_plane();
        let uu = Lattice::direct_sum(&[u.clone(), u]);
        let quot = uu
            .quotient_by_isotropic(&LatticeVector(vec![1, 0, 0, 0]))
            .unwrap();
        assert_eq!(quot.lattice.rank(), 2);
        assert_eq!(quot.lattice.gram(), &[vec![0, 1], vec![1, 0]]);
        // lifts differing by e project to the same class
        let a = LatticeVector(vec![0, 0, 1, 0]);
        let b = LatticeVector(vec![3, 0, 1, 0]);
        assert_eq!(
            quot.project(&a, &uu).unwrap(),
            quot.project(&b, &uu).unwrap()
        );
        assert_eq!(
            quot.project(&LatticeVector(vec![0, 1, 0, 0]), &uu)
                .unwrap_err(),
            LatticeError::NotOrthogonal
        );
    }

    #[test]
    fn quotient_rejects_bad_vectors() {
        let u = Lattice::hyperbolic_plane();
        let uu = Lattice::direct_sum(&[u.clone(), u]);
        assert!(matches!(
            uu.quotient_by_isotropic(&LatticeVector(vec![1, 1, 0, 0])),
            Err(LatticeError::NotIsotropic(_))
        ));
        assert_eq!(
            uu.quotient_by_isotropic(&LatticeVector(vec![2, 0, 0, 0]))
                .unwrap_err(),
            LatticeError::NotPrimitive
        );
    }

    #[test]
    fn classify_saturates_and_records_change_of_basis() {
        let u = Lattice::hyperbolic_plane();
        let uu = Lattice::direct_sum(&[u.clone(), u]);
        let s = RationalSubspace::new(vec![vec![q(3), q(0), q(0), q(0)]]).unwrap();
        let desc = uu.classify_boundary(&s).unwrap();
        assert_eq!(desc.kind, StratumKind::Line);
        assert_eq!(desc.generators, vec![vec![1, 0, 0, 0]]);
        assert_eq!(desc.change_of_basis, vec![vec![q(3)]]);
        let plane =
            RationalSubspace::from_integer_rows(&[vec![1, 0, 0, 0], vec![0, 0, 1, 0]]).unwrap();
        let desc = uu.classify_boundary(&plane).unwrap();
        assert_eq!(desc.kind, StratumKind::Plane);
        assert!(desc.quotient.is_none());
        let bad = RationalSubspace::from_integer_rows(&[vec![1, 1, 0, 0]]).unwrap();
        assert_eq!(
            uu.classify_boundary(&bad).unwrap_err(),
            LatticeError::SubspaceNotIsotropic
        );
    }

    #[test]
    fn three_dimensional_isotropic_subspace_is_rejected() {
        let u = Lattice::hyperbolic_plane();
        let u3 = Lattice::direct_sum(&[u.clone(), u.clone(), u]);
        let s = RationalSubspace::from_integer_rows(&[
            vec![1, 0, 0, 0, 0, 0],
            vec![0, 0, 1, 0, 0, 0],
            vec![0, 0, 0, 0, 1, 0],
        ])
        .unwrap();
        assert_eq!(
            u3.classify_boundary(&s).unwrap_err(),
            LatticeError::UnsupportedDimension(3)
        );
    }

    #[test]
    fn json_roundtrip_and_validation() {
        let l = Lattice::hyperbolic_plane();
        let s = serde_json::to_string(&l).unwrap();
        assert!(s.contains("\"rank\":2"));
        let back: Lattice = serde_json::from_str(&s).unwrap();
        assert_eq!(back, l);
        let bad = r#"{"rank":2,"gram":[[0,1],[2,0]]}"#;
        assert!(serde_json::from_str::<Lattice>(bad).is_err());
    }

    #[test]
    fn dependent_subspace_rejected() {
        let err = RationalSubspace::from_integer_rows(&[vec![1, 2], vec![2, 4]]).unwrap_err();
        assert_eq!(err, LatticeError::DependentBasis);
    }
}
