//! Dense univariate polynomials over exact fields, plus floating root finding.
//!
//! Coefficients are stored in ascending order and kept trimmed, so the zero
//! polynomial is the empty vector.

use std::fmt::Debug;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub trait Field: Clone + PartialEq + Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn inv(&self) -> Self;
    fn from_u64(n: u64) -> Self;
}

/// Gaussian rationals `Q(i)`.
pub type Qi = Complex<BigRational>;

impl Field for Qi {
    fn zero() -> Self {
        Complex::new(BigRational::zero(), BigRational::zero())
    }
    fn one() -> Self {
        Complex::new(BigRational::one(), BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn inv(&self) -> Self {
        Complex::inv(self)
    }
    fn from_u64(n: u64) -> Self {
        Complex::new(
            BigRational::from_integer(BigInt::from(n)),
            BigRational::zero(),
        )
    }
}

pub const MODULUS: u64 = 998_244_353;

/// Residues modulo [`MODULUS`], a prime with `MODULUS = 1 (mod 4)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fp(pub u64);

impl Fp {
    pub fn pow(self, mut e: u64) -> Fp {
        let mut base = self.0;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % MODULUS;
            }
            base = base * base % MODULUS;
            e >>= 1;
        }
        Fp(acc)
    }

    /// A square root of `-1`.
    pub fn sqrt_minus_one() -> Fp {
        Fp(3).pow((MODULUS - 1) / 4)
    }

    pub fn from_bigint(n: &BigInt) -> Fp {
        let m = BigInt::from(MODULUS);
        let r = ((n % &m) + &m) % &m;
        Fp(r.to_u64().expect("residue fits"))
    }

    /// `None` when the denominator vanishes.
    pub fn from_rational(q: &BigRational) -> Option<Fp> {
        let den = Fp::from_bigint(q.denom());
        if den.0 == 0 {
            return None;
        }
        Some(Fp::from_bigint(q.numer()).mul(&den.inv()))
    }

    pub fn from_qi(z: &Qi) -> Option<Fp> {
        let re = Fp::from_rational(&z.re)?;
        let im = Fp::from_rational(&z.im)?;
        Some(re.add(&im.mul(&Fp::sqrt_minus_one())))
    }
}

impl Field for Fp {
    fn zero() -> Self {
        Fp(0)
    }
    fn one() -> Self {
        Fp(1)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
    fn add(&self, o: &Self) -> Self {
        Fp((self.0 + o.0) % MODULUS)
    }
    fn sub(&self, o: &Self) -> Self {
        Fp((self.0 + MODULUS - o.0) % MODULUS)
    }
    fn mul(&self, o: &Self) -> Self {
        Fp(self.0 * o.0 % MODULUS)
    }
    fn inv(&self) -> Self {
        assert!(self.0 != 0, "inverse of zero");
        self.pow(MODULUS - 2)
    }
    fn from_u64(n: u64) -> Self {
        Fp(n % MODULUS)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Poly<F: Field> {
    c: Vec<F>,
}

impl<F: Field> Poly<F> {
    pub fn new(mut c: Vec<F>) -> Self {
        while c.last().is_some_and(Field::is_zero) {
            c.pop();
        }
        Poly { c }
    }

    pub fn zero() -> Self {
        Poly { c: Vec::new() }
    }

    pub fn one() -> Self {
        Poly { c: vec![F::one()] }
    }

    pub fn coeffs(&self) -> &[F] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&F> {
        self.c.last()
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let z = F::zero();
        Poly::new(
            (0..n)
                .map(|i| self.c.get(i).unwrap_or(&z).add(o.c.get(i).unwrap_or(&z)))
                .collect(),
        )
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let z = F::zero();
        Poly::new(
            (0..n)
                .map(|i| self.c.get(i).unwrap_or(&z).sub(o.c.get(i).unwrap_or(&z)))
                .collect(),
        )
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![F::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Poly::new(out)
    }

    pub fn scale(&self, s: &F) -> Self {
        Poly::new(self.c.iter().map(|a| a.mul(s)).collect())
    }

    pub fn derivative(&self) -> Self {
        Poly::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, a)| a.mul(&F::from_u64(k as u64)))
                .collect(),
        )
    }

    pub fn eval(&self, x: &F) -> F {
        self.c
            .iter()
            .rev()
            .fold(F::zero(), |acc, a| acc.mul(x).add(a))
    }

    pub fn monic(&self) -> Self {
        match self.lead() {
            Some(l) => self.scale(&l.inv()),
            None => Poly::zero(),
        }
    }

    /// Quotient and remainder; panics on a zero divisor.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by the zero polynomial");
        let inv = d.c[dd].inv();
        let mut r = self.c.clone();
        if r.len() <= dd {
            return (Poly::zero(), Poly::new(r));
        }
        let mut q = vec![F::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let coef = r[k + dd].mul(&inv);
            if !coef.is_zero() {
                for (j, dj) in d.c.iter().enumerate() {
                    r[k + j] = r[k + j].sub(&coef.mul(dj));
                }
            }
            q[k] = coef;
        }
        r.truncate(dd);
        (Poly::new(q), Poly::new(r))
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, o: &Self) -> Self {
        let mut a = self.monic();
        let mut b = o.monic();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.monic();
        }
        a
    }

    pub fn div_exact(&self, d: &Self) -> Self {
        let (q, r) = self.div_rem(d);
        debug_assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    /// Yun's decomposition `f = c * prod_k P_k^k` with squarefree, pairwise
    /// coprime monic `P_k`; entry `k - 1` holds `P_k`.
    pub fn squarefree_decomposition(&self) -> Vec<Self> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let fp = f.derivative();
        let a0 = f.gcd(&fp);
        let mut b = f.div_exact(&a0);
        let mut c = fp.div_exact(&a0);
        let mut d = c.sub(&b.derivative());
        while b.degree().unwrap_or(0) > 0 {
            let a = b.gcd(&d);
            b = b.div_exact(&a);
            c = d.div_exact(&a);
            d = c.sub(&b.derivative());
            out.push(a);
        }
        while out.last().is_some_and(|p| p.degree() == Some(0)) {
            out.pop();
        }
        out
    }
}

impl Poly<Qi> {
    /// Exact image of floating coefficients (every finite double is dyadic).
    pub fn from_complex(c: &[Complex64]) -> Option<Self> {
        let conv = |x: f64| BigRational::from_float(x);
        let coeffs = c
            .iter()
            .map(|z| Some(Complex::new(conv(z.re)?, conv(z.im)?)))
            .collect::<Option<Vec<_>>>()?;
        Some(Poly::new(coeffs))
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        self.c
            .iter()
            .map(|z| {
                Complex64::new(
                    z.re.to_f64().unwrap_or(f64::NAN),
                    z.im.to_f64().unwrap_or(f64::NAN),
                )
            })
            .collect()
    }

    /// Reduction modulo the prime; `None` if a denominator is divisible by it.
    pub fn to_fp(&self) -> Option<Poly<Fp>> {
        Some(Poly::new(
            self.c.iter().map(Fp::from_qi).collect::<Option<Vec<_>>>()?,
        ))
    }

    /// Order of vanishing at `z0`; `None` for the zero polynomial.
    pub fn order_at(&self, z0: &Qi) -> Option<u32> {
        if self.is_zero() {
            return None;
        }
        let mut p = self.clone();
        let mut k = 0;
        while Field::is_zero(&p.eval(z0)) {
            p = p.derivative();
            k += 1;
        }
        Some(k)
    }
}

/// `true` when `f` certifiably has no repeated roots over `Q(i)`: its
/// reduction keeps its degree and is coprime to its derivative.
pub fn certified_squarefree(f: &Poly<Qi>) -> bool {
    let Some(fp) = f.to_fp() else { return false };
    if fp.degree() != f.degree() {
        return false;
    }
    let d = fp.derivative();
    if d.degree().map(|k| k + 1) != f.degree() {
        return false;
    }
    fp.gcd(&d).degree() == Some(0)
}

pub fn eval_complex(c: &[Complex64], z: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::zero(), |acc, a| acc * z + a)
}

pub fn derivative_complex(c: &[Complex64]) -> Vec<Complex64> {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(k, a)| a * k as f64)
        .collect()
}

fn trimmed(c: &[Complex64]) -> &[Complex64] {
    let mut n = c.len();
    while n > 0 && c[n - 1] == Complex64::zero() {
        n -= 1;
    }
    &c[..n]
}

/// Coefficients of `p(x + s)`.
fn taylor_shift(c: &[Complex64], s: Complex64) -> Vec<Complex64> {
    let mut out = c.to_vec();
    let n = out.len();
    for k in 0..n {
        for j in (k..n - 1).rev() {
            let next = out[j + 1];
            out[j] += s * next;
        }
    }
    out
}

fn companion_eigenvalues(c: &[Complex64]) -> Option<Vec<Complex64>> {
    let n = c.len() - 1;
    let lead = c[n];
    let mut comp = DMatrix::<Complex64>::zeros(n, n);
    for i in 1..n {
        comp[(i, i - 1)] = Complex64::one();
    }
    for i in 0..n {
        comp[(i, n - 1)] = -c[i] / lead;
    }
    let (_, t) = comp.try_schur(f64::EPSILON, 2_000)?.unpack();
    Some((0..n).map(|i| t[(i, i)]).collect())
}

/// All complex roots with multiplicity, from companion-matrix eigenvalues
/// polished by Newton steps on the input polynomial. Highly symmetric
/// companion matrices can stall the QR iteration; a shifted variable breaks
/// the symmetry.
pub fn roots(c: &[Complex64]) -> Option<Vec<Complex64>> {
    let c = trimmed(c);
    let n = c.len().checked_sub(1)?;
    if n == 0 {
        return Some(Vec::new());
    }
    let scale = c
        .iter()
        .take(n)
        .map(|a| (a / c[n]).norm())
        .fold(0.0, f64::max)
        .max(1e-3);
    let shifts =
        [0.0, 0.137, 0.291, 0.533].map(|r| Complex64::from_polar(r * scale.min(1.0), 0.61));
    let eig = shifts.iter().find_map(|&s| {
        let shifted = if s == Complex64::zero() {
            c.to_vec()
        } else {
            taylor_shift(c, s)
        };
        companion_eigenvalues(&shifted).map(|v| v.into_iter().map(|z| z + s).collect::<Vec<_>>())
    })?;
    let dc = derivative_complex(c);
    let out = eig
        .into_iter()
        .map(|z| polish(c, &dc, z))
        .collect::<Vec<_>>();
    out.iter()
        .all(|z| z.re.is_finite() && z.im.is_finite())
        .then_some(out)
}

/// Newton polishing; keeps the starting point if a step does not reduce the residual.
pub fn polish(c: &[Complex64], dc: &[Complex64], mut z: Complex64) -> Complex64 {
    let mut res = eval_complex(c, z).norm();
    for _ in 0..50 {
        let d = eval_complex(dc, z);
        if d == Complex64::zero() {
            break;
        }
        let next = z - eval_complex(c, z) / d;
        let next_res = eval_complex(c, next).norm();
        if next_res.is_nan() || next_res >= res {
            break;
        }
        let step = (next - z).norm();
        z = next;
        res = next_res;
        if step <= 1e-16 * z.norm().max(1.0) {
            break;
        }
    }
    z
}
