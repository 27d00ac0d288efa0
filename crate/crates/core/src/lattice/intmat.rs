//! Exact integer and rational matrix routines.
//!
//! Everything here works on `BigInt` / `BigRational` so that ranks, kernels,
//! signatures and determinants are certificates rather than estimates.
//! Matrices are row-major `Vec<Vec<_>>`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type IntMatrix = Vec<Vec<BigInt>>;
pub type RatMatrix = Vec<Vec<BigRational>>;

pub fn int_identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect()
        })
        .collect()
}

pub fn rat_identity(n: usize) -> RatMatrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                })
                .collect()
        })
        .collect()
}

pub fn from_i64(m: &[Vec<i64>]) -> IntMatrix {
    m.iter()
        .map(|row| row.iter().map(|&x| BigInt::from(x)).collect())
        .collect()
}

pub fn to_rational(m: &IntMatrix) -> RatMatrix {
    m.iter()
        .map(|row| {
            row.iter()
                .map(|x| BigRational::from_integer(x.clone()))
                .collect()
        })
        .collect()
}

pub fn transpose<T: Clone>(m: &[Vec<T>]) -> Vec<Vec<T>> {
    if m.is_empty() {
        return Vec::new();
    }
    let cols = m[0].len();
    (0..cols)
        .map(|j| m.iter().map(|row| row[j].clone()).collect())
        .collect()
}

pub fn int_mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut acc = BigInt::zero();
                    for k in 0..inner {
                        if !row[k].is_zero() && !b[k][j].is_zero() {
                            acc += &row[k] * &b[k][j];
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub fn rat_mul(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut acc = BigRational::zero();
                    for k in 0..inner {
                        if !row[k].is_zero() && !b[k][j].is_zero() {
                            acc += &row[k] * &b[k][j];
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub fn int_mat_vec(a: &IntMatrix, v: &[BigInt]) -> Vec<BigInt> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

pub fn is_zero_matrix<T: Zero>(m: &[Vec<T>]) -> bool {
    m.iter().all(|row| row.iter().all(Zero::is_zero))
}

/// Extended gcd: returns `(g, x, y)` with `x*a + y*b = g >= 0`.
pub fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

pub fn gcd_all<'a, I: IntoIterator<Item = &'a BigInt>>(it: I) -> BigInt {
    it.into_iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

/// Applies the unimodular column operation
/// `col_p <- x col_p + y col_q`, `col_q <- -s col_p + r col_q` (det `x r + y s = 1`).
fn column_op(
    m: &mut IntMatrix,
    p: usize,
    q: usize,
    x: &BigInt,
    y: &BigInt,
    r: &BigInt,
    s: &BigInt,
) {
    for row in m.iter_mut() {
        let a = row[p].clone();
        let b = row[q].clone();
        row[p] = x * &a + y * &b;
        row[q] = r * &b - s * &a;
    }
}

/// Basis (as rows) of the integer kernel `{x in Z^n : a x = 0}`.
///
/// Column-style Hermite elimination with the unimodular transform tracked; the
/// trailing columns of the transform span the kernel, so the result is always
/// saturated. The returned basis is put in row Hermite normal form.
pub fn integer_kernel(a: &IntMatrix, n: usize) -> IntMatrix {
    let mut work = a.clone();
    let mut u = int_identity(n);
    let mut pivot = 0;
    for r in 0..work.len() {
        if pivot == n {
            break;
        }
        for j in pivot + 1..n {
            if work[r][j].is_zero() {
                continue;
            }
            let (g, x, y) = ext_gcd(&work[r][pivot], &work[r][j]);
            let p = &work[r][pivot] / &g;
            let q = &work[r][j] / &g;
            column_op(&mut work, pivot, j, &x, &y, &p, &q);
            column_op(&mut u, pivot, j, &x, &y, &p, &q);
        }
        if !work[r][pivot].is_zero() {
            pivot += 1;
        }
    }
    let kernel: IntMatrix = (pivot..n)
        .map(|j| (0..n).map(|i| u[i][j].clone()).collect())
        .collect();
    hermite_rows(&kernel)
}

/// Row Hermite normal form of a full-row-rank integer matrix (zero rows dropped).
pub fn hermite_rows(m: &IntMatrix) -> IntMatrix {
    if m.is_empty() {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut h = m.clone();
    let mut row = 0;
    for col in 0..cols {
        if row == h.len() {
            break;
        }
        for i in row + 1..h.len() {
            if h[i][col].is_zero() {
                continue;
            }
            let (g, x, y) = ext_gcd(&h[row][col], &h[i][col]);
            let p = &h[row][col] / &g;
            let q = &h[i][col] / &g;
            let top = h[row].clone();
            let bot = h[i].clone();
            for c in 0..cols {
                h[row][c] = &x * &top[c] + &y * &bot[c];
                h[i][c] = &p * &bot[c] - &q * &top[c];
            }
        }
        if h[row][col].is_zero() {
            continue;
        }
        if h[row][col].is_negative() {
            for c in 0..cols {
                h[row][c] = -h[row][c].clone();
            }
        }
        let piv = h[row][col].clone();
        for i in 0..row {
            let f = h[i][col].div_floor(&piv);
            if !f.is_zero() {
                for c in 0..cols {
                    let t = &f * &h[row][c];
                    h[i][c] -= t;
                }
            }
        }
        row += 1;
    }
    h.truncate(row);
    h
}

/// Nonzero invariant factors of the Smith normal form.
pub fn smith_invariants(m: &IntMatrix) -> Vec<BigInt> {
    let mut a = m.clone();
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut out = Vec::new();
    let mut k = 0;
    while k < rows.min(cols) {
        // smallest nonzero entry of the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in k..rows {
            for j in k..cols {
                if !a[i][j].is_zero() && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        a.swap(k, bi);
        for row in a.iter_mut() {
            row.swap(k, bj);
        }
        let mut clean = true;
        for i in k + 1..rows {
            let f = a[i][k].div_floor(&a[k][k]);
            if !f.is_zero() {
                for c in k..cols {
                    let t = &f * &a[k][c];
                    a[i][c] -= t;
                }
            }
            if !a[i][k].is_zero() {
                clean = false;
            }
        }
        for j in k + 1..cols {
            let f = a[k][j].div_floor(&a[k][k]);
            if !f.is_zero() {
                for r in k..rows {
                    let t = &f * &a[r][k];
                    a[r][j] -= t;
                }
            }
            if !a[k][j].is_zero() {
                clean = false;
            }
        }
        if !clean {
            continue;
        }
        // pivot must divide the whole trailing block
        let mut offender = None;
        'search: for i in k + 1..rows {
            for j in k + 1..cols {
                if !a[i][j].is_multiple_of(&a[k][k]) {
                    offender = Some(i);
                    break 'search;
                }
            }
        }
        if let Some(i) = offender {
            for c in k..cols {
                let t = a[i][c].clone();
                a[k][c] += t;
            }
            continue;
        }
        out.push(a[k][k].abs());
        k += 1;
    }
    out
}

/// Saturation in `Z^n` of the row span of `rows`.
pub fn saturate(rows: &IntMatrix, n: usize) -> IntMatrix {
    let annihilator = integer_kernel(rows, n);
    integer_kernel(&annihilator, n)
}

/// True iff the rows span a saturated sublattice (all invariant factors are 1).
pub fn is_saturated(rows: &IntMatrix) -> bool {
    let inv = smith_invariants(rows);
    inv.len() == rows.len() && inv.iter().all(One::is_one)
}

/// Reduced row echelon form over Q; returns the nonzero rows and pivot columns.
pub fn rref(m: &RatMatrix) -> (RatMatrix, Vec<usize>) {
    let mut a = m.clone();
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..cols {
                    let t = &f * &a[r][j];
                    a[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    a.truncate(r);
    (a, pivots)
}

pub fn rank(m: &RatMatrix) -> usize {
    rref(m).1.len()
}

/// Finds `y` with `sum_i y_i * basis[i] = target`, if one exists.
pub fn solve_left(basis: &RatMatrix, target: &[BigRational]) -> Option<Vec<BigRational>> {
    let k = basis.len();
    let n = target.len();
    // augmented system: columns are basis vectors, rhs target
    let mut aug: RatMatrix = (0..n)
        .map(|j| {
            let mut row: Vec<BigRational> = (0..k).map(|i| basis[i][j].clone()).collect();
            row.push(target[j].clone());
            row
        })
        .collect();
    let (red, pivots) = rref(&aug);
    if pivots.contains(&k) {
        return None;
    }
    let mut y = vec![BigRational::zero(); k];
    for (row, &p) in red.iter().zip(&pivots) {
        y[p] = row[k].clone();
    }
    aug.clear();
    Some(y)
}

/// Clears denominators row by row, returning primitive integer rows spanning
/// the same rational lines.
pub fn primitive_rows(m: &RatMatrix) -> IntMatrix {
    m.iter()
        .map(|row| {
            let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            let ints: Vec<BigInt> = row.iter().map(|x| (x * &lcm).to_integer()).collect();
            let g = gcd_all(&ints);
            if g.is_zero() {
                ints
            } else {
                ints.into_iter().map(|x| x / &g).collect()
            }
        })
        .collect()
}

/// Fraction-free (Bareiss) determinant.
pub fn determinant(m: &IntMatrix) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

/// Inertia of a symmetric rational matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Inertia {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

/// Inertia by symmetric congruence elimination (LDL^T with 2x2 fix-ups).
///
/// Also returns the product of the pivots, which equals the determinant
/// because every congruence used has determinant +-1.
pub fn symmetric_inertia(m: &RatMatrix) -> (Inertia, BigRational) {
    let n = m.len();
    let mut a = m.clone();
    let mut pos = 0;
    let mut neg = 0;
    let mut det = BigRational::one();
    let mut k = 0;
    while k < n {
        if a[k][k].is_zero() {
            if let Some(i) = (k + 1..n).find(|&i| !a[i][i].is_zero()) {
                swap_sym(&mut a, k, i);
            } else if let Some((i, j)) = (k..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| !a[i][j].is_zero())
            {
                // j > i >= k, so the swap leaves j in place
                swap_sym(&mut a, k, i);
                // row/col k += row/col j makes the diagonal 2 a_kj != 0
                for c in 0..n {
                    let t = a[j][c].clone();
                    a[k][c] += t;
                }
                for r in 0..n {
                    let t = a[r][j].clone();
                    a[r][k] += t;
                }
            } else {
                return (
                    Inertia {
                        positive: pos,
                        negative: neg,
                        zero: n - k,
                    },
                    BigRational::zero(),
                );
            }
        }
        let p = a[k][k].clone();
        if p.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        det *= &p;
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &p;
            for j in k + 1..n {
                let t = &f * &a[k][j];
                a[i][j] -= t;
            }
            a[i][k] = BigRational::zero();
        }
        for j in k + 1..n {
            a[k][j] = BigRational::zero();
        }
        k += 1;
    }
    (
        Inertia {
            positive: pos,
            negative: neg,
            zero: 0,
        },
        det,
    )
}

fn swap_sym(a: &mut RatMatrix, i: usize, j: usize) {
    if i == j {
        return;
    }
    a.swap(i, j);
    for row in a.iter_mut() {
        row.swap(i, j);
    }
}

/// For a primitive row vector `c`, returns `(v, v_inv)` unimodular with
/// `c * v = (1, 0, ..., 0)`; equivalently the first row of `v_inv` is `c`.
pub fn unimodular_completion(c: &[BigInt]) -> Option<(IntMatrix, IntMatrix)> {
    let k = c.len();
    if k == 0 {
        return None;
    }
    let mut row = c.to_vec();
    let mut v = int_identity(k);
    let mut v_inv = int_identity(k);
    for j in 1..k {
        if row[j].is_zero() {
            continue;
        }
        let (g, x, y) = ext_gcd(&row[0], &row[j]);
        let p = &row[0] / &g;
        let q = &row[j] / &g;
        row[0] = g;
        row[j] = BigInt::zero();
        column_op(&mut v, 0, j, &x, &y, &p, &q);
        // inverse transform acts on rows: [[p, q], [-y, x]]
        let r0 = v_inv[0].clone();
        let rj = v_inv[j].clone();
        for c in 0..k {
            v_inv[0][c] = &p * &r0[c] + &q * &rj[c];
            v_inv[j][c] = &x * &rj[c] - &y * &r0[c];
        }
    }
    if row[0] == -BigInt::one() {
        for r in v.iter_mut() {
            r[0] = -r[0].clone();
        }
        for c in 0..k {
            v_inv[0][c] = -v_inv[0][c].clone();
        }
    } else if !row[0].is_one() {
        return None;
    }
    Some((v, v_inv))
}

/// Characteristic polynomial `det(xI - m)`, ascending coefficients, via
/// Faddeev-LeVerrier (all divisions exact over Z).
pub fn charpoly(m: &IntMatrix) -> Vec<BigInt> {
    let n = m.len();
    let mut coeffs = vec![BigInt::zero(); n + 1];
    coeffs[n] = BigInt::one();
    let mut mk = vec![vec![BigInt::zero(); n]; n];
    for k in 1..=n {
        let mut next = int_mul(m, &mk);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += &coeffs[n - k + 1];
        }
        mk = next;
        let am = int_mul(m, &mk);
        let trace: BigInt = (0..n).map(|i| am[i][i].clone()).sum();
        coeffs[n - k] = -trace / BigInt::from(k);
    }
    coeffs
}

/// Exact polynomial division over Z by a monic divisor; `None` if not exact.
pub fn poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Option<Vec<BigInt>> {
    let mut rem: Vec<BigInt> = num.to_vec();
    while rem.len() > 1 && rem.last().is_some_and(Zero::is_zero) {
        rem.pop();
    }
    let dd = den.len() - 1;
    debug_assert!(den[dd].is_one());
    if rem.len() < den.len() {
        return if rem.iter().all(Zero::is_zero) {
            Some(vec![BigInt::zero()])
        } else {
            None
        };
    }
    let qlen = rem.len() - dd;
    let mut quot = vec![BigInt::zero(); qlen];
    for i in (0..qlen).rev() {
        let c = rem[i + dd].clone();
        if c.is_zero() {
            continue;
        }
        for (j, d) in den.iter().enumerate() {
            rem[i + j] -= &c * d;
        }
        quot[i] = c;
    }
    if rem.iter().all(Zero::is_zero) {
        Some(quot)
    } else {
        None
    }
}

pub fn matrix_power(m: &IntMatrix, mut e: u64) -> IntMatrix {
    let mut base = m.clone();
    let mut acc = int_identity(m.len());
    while e > 0 {
        if e & 1 == 1 {
            acc = int_mul(&acc, &base);
        }
        e >>= 1;
        if e > 0 {
            base = int_mul(&base, &base);
        }
    }
    acc
}
