//! Periods of `dx/y` on `y^2 = x^3 + a x + b`.
//!
//! With roots `e1, e2, e3` the integral of `dx/y` from `e_j` to infinity
//! along a ray is `2 R_F(0, e_j - e_k, e_j - e_l)`, so the cycle around that
//! ray has period `4 R_F(...)`. Any two of the three cycles form a basis. The
//! principal branch is valid once no root difference is real, which a unit
//! rotation `x -> c x` arranges; periods pick up the factor `c^(-1/2)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::json;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiberPeriods {
    #[serde(with = "json::complex")]
    pub omega1: Complex64,
    #[serde(with = "json::complex")]
    pub omega2: Complex64,
    #[serde(with = "json::complex")]
    pub tau: Complex64,
    /// `|j(tau) - j(a, b)| / (1 + |j(a, b)|)`.
    pub j_mismatch: f64,
    /// Set when the Carlson branch failed the j check and the basis came
    /// from path integration.
    pub fallback: bool,
}

impl FiberPeriods {
    /// `Im(omega2 * conj(omega1))`, the covolume of the period lattice.
    pub fn density(&self) -> f64 {
        (self.omega2 * self.omega1.conj()).im
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum PeriodError {
    #[error("singular fiber: 4a^3 + 27b^2 = {0:e} relative to the coefficient scale")]
    Singular(f64),
    #[error("period computation failed: {0}")]
    Failed(String),
}

pub const J_TOLERANCE: f64 = 1e-6;

/// Relative size below which the discriminant is treated as zero.
pub const SINGULAR_TOLERANCE: f64 = 1e-13;

pub fn j_algebraic(a: Complex64, b: Complex64) -> Complex64 {
    let a3 = 4.0 * a * a * a;
    1728.0 * a3 / (a3 + 27.0 * b * b)
}

/// Moves `tau` into the standard fundamental domain.
pub fn reduce_tau(mut tau: Complex64) -> Complex64 {
    for _ in 0..1000 {
        tau.re -= tau.re.round();
        if tau.norm_sqr() < 1.0 - 1e-15 {
            tau = -1.0 / tau;
        } else {
            break;
        }
    }
    tau
}

fn divisor_power_sum(n: u64, k: u32) -> f64 {
    (1..=n)
        .filter(|d| n.is_multiple_of(*d))
        .map(|d| (d as f64).powi(k as i32))
        .sum()
}

/// `j(tau) = 1728 E4^3 / (E4^3 - E6^2)` from q-expansions after reduction.
pub fn j_of_tau(tau: Complex64) -> Complex64 {
    let t = reduce_tau(tau);
    let q = (Complex64::i() * 2.0 * PI * t).exp();
    let mut e4 = Complex64::new(1.0, 0.0);
    let mut e6 = Complex64::new(1.0, 0.0);
    let mut qn = Complex64::new(1.0, 0.0);
    for n in 1..=40u64 {
        qn *= q;
        if qn.norm() < 1e-300 {
            break;
        }
        e4 += 240.0 * divisor_power_sum(n, 3) * qn;
        e6 -= 504.0 * divisor_power_sum(n, 5) * qn;
    }
    let e43 = e4 * e4 * e4;
    1728.0 * e43 / (e43 - e6 * e6)
}

/// Carlson's symmetric integral `R_F(x, y, z)` by duplication; arguments
/// off the negative real axis, at most one zero.
pub fn carlson_rf(mut x: Complex64, mut y: Complex64, mut z: Complex64) -> Complex64 {
    for _ in 0..200 {
        let mu = (x + y + z) / 3.0;
        let dx = (mu - x) / mu;
        let dy = (mu - y) / mu;
        let dz = (mu - z) / mu;
        let eps = dx.norm().max(dy.norm()).max(dz.norm());
        if eps < 1e-3 {
            let e2 = dx * dy - dz * dz;
            let e3 = dx * dy * dz;
            let series = 1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0;
            return series / mu.sqrt();
        }
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lambda = sx * sy + sx * sz + sy * sz;
        x = (x + lambda) / 4.0;
        y = (y + lambda) / 4.0;
        z = (z + lambda) / 4.0;
    }
    Complex64::new(f64::NAN, f64::NAN)
}

/// Roots of `x^3 + a x + b` by Cardano, polished with Newton steps.
pub fn cubic_roots(a: Complex64, b: Complex64) -> [Complex64; 3] {
    let d0 = -3.0 * a;
    let d1 = 27.0 * b;
    let disc = (d1 * d1 - 4.0 * d0 * d0 * d0).sqrt();
    let plus = (d1 + disc) / 2.0;
    let minus = (d1 - disc) / 2.0;
    let big = if plus.norm() >= minus.norm() {
        plus
    } else {
        minus
    };
    let c = big.cbrt();
    let omega = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
    let mut out = [Complex64::default(); 3];
    let mut ck = c;
    for r in out.iter_mut() {
        *r = if ck.norm() == 0.0 {
            Complex64::default()
        } else {
            -(ck + d0 / ck) / 3.0
        };
        ck *= omega;
        for _ in 0..3 {
            let f = *r * *r * *r + a * *r + b;
            let df = 3.0 * *r * *r + a;
            if df.norm() == 0.0 {
                break;
            }
            *r -= f / df;
        }
    }
    out
}

/// Rotation `c` (unit modulus) keeping every root difference well away from
/// the real axis.
fn choose_rotation(e: &[Complex64; 3]) -> Complex64 {
    let diffs = [e[0] - e[1], e[0] - e[2], e[1] - e[2]];
    let score = |c: Complex64| {
        diffs
            .iter()
            .map(|d| (d / c).arg().sin().abs())
            .fold(f64::INFINITY, f64::min)
    };
    (0..12)
        .map(|k| Complex64::from_polar(1.0, PI * k as f64 / 12.0))
        .max_by(|p, q| score(*p).total_cmp(&score(*q)))
        .expect("non-empty candidate list")
}

fn sort_roots(e: &mut [Complex64; 3]) {
    e.sort_by(|p, q| p.re.total_cmp(&q.re).then(p.im.total_cmp(&q.im)));
}

/// Oriented basis from two periods, or `None` if they are (nearly) collinear.
fn oriented(w1: Complex64, w2: Complex64) -> Option<(Complex64, Complex64)> {
    let cross = (w2 * w1.conj()).im;
    if cross.abs() <= 1e-12 * w1.norm() * w2.norm() {
        return None;
    }
    Some(if cross > 0.0 { (w1, w2) } else { (w1, -w2) })
}

fn j_mismatch(tau: Complex64, j_alg: Complex64) -> f64 {
    (j_of_tau(tau) - j_alg).norm() / (1.0 + j_alg.norm())
}

pub fn fiber_periods(a: Complex64, b: Complex64) -> Result<FiberPeriods, PeriodError> {
    let scale = 4.0 * a.norm().powi(3) + 27.0 * b.norm_sqr();
    let disc = 4.0 * a * a * a + 27.0 * b * b;
    if scale == 0.0 || disc.norm() <= SINGULAR_TOLERANCE * scale {
        return Err(PeriodError::Singular(if scale == 0.0 {
            0.0
        } else {
            disc.norm() / scale
        }));
    }
    let j_alg = j_algebraic(a, b);
    let mut e = cubic_roots(a, b);
    sort_roots(&mut e);
    let c = choose_rotation(&e);
    let u = e.map(|r| r / c);
    let back = c.sqrt().inv();
    let h: Vec<Complex64> = (0..3)
        .map(|j| {
            let (k, l) = ((j + 1) % 3, (j + 2) % 3);
            4.0 * carlson_rf(Complex64::default(), u[j] - u[k], u[j] - u[l]) * back
        })
        .collect();
    let mut best: Option<FiberPeriods> = None;
    for (p, q) in [(0, 1), (0, 2), (1, 2)] {
        let Some((w1, w2)) = oriented(h[p], h[q]) else {
            continue;
        };
        let tau = w2 / w1;
        let mismatch = j_mismatch(tau, j_alg);
        let cand = FiberPeriods {
            omega1: w1,
            omega2: w2,
            tau,
            j_mismatch: mismatch,
            fallback: false,
        };
        if mismatch < J_TOLERANCE {
            return Ok(cand);
        }
        if best.is_none_or(|bp| mismatch < bp.j_mismatch) {
            best = Some(cand);
        }
    }
    match path_periods(&e) {
        Some((w1, w2)) => {
            let tau = w2 / w1;
            Ok(FiberPeriods {
                omega1: w1,
                omega2: w2,
                tau,
                j_mismatch: j_mismatch(tau, j_alg),
                fallback: true,
            })
        }
        None => best
            .map(|mut bp| {
                bp.fallback = true;
                bp
            })
            .ok_or_else(|| PeriodError::Failed("no independent pair of periods".into())),
    }
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_8,
];
const GK_WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Gauss-Kronrod 7/15 on `[lo, hi]`: (Kronrod value, error estimate).
fn gk15(f: &dyn Fn(f64) -> Complex64, lo: f64, hi: f64) -> (Complex64, f64) {
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let fc = f(c);
    let mut k = fc * GK_WK[7];
    let mut g = fc * GK_WG[3];
    for i in 0..7 {
        let x = h * GK_NODES[i];
        let s = f(c - x) + f(c + x);
        k += s * GK_WK[i];
        if i % 2 == 1 {
            g += s * GK_WG[i / 2];
        }
    }
    (k * h, ((k - g) * h).norm())
}

/// Adaptive Gauss-Kronrod quadrature of a complex integrand.
pub fn integrate(f: &dyn Fn(f64) -> Complex64, lo: f64, hi: f64, tol: f64) -> Option<Complex64> {
    let mut stack = vec![(lo, hi, 0u32)];
    let mut total = Complex64::default();
    let mut evals = 0usize;
    while let Some((a, b, depth)) = stack.pop() {
        let (v, err) = gk15(f, a, b);
        evals += 1;
        if !(v.re.is_finite() && v.im.is_finite()) || evals > 20_000 {
            return None;
        }
        if err <= tol * (b - a) / (hi - lo) || depth >= 40 {
            total += v;
        } else {
            let m = 0.5 * (a + b);
            stack.push((m, b, depth + 1));
            stack.push((a, m, depth + 1));
        }
    }
    Some(total)
}

/// `2 * integral of dx/y` along the segment `[e_j, e_k]`. With
/// `x = e_j + s (e_k - e_j)` and `s = (1 - cos phi) / 2` the endpoint
/// singularities cancel; `(x - e_l) / (e_j - e_l)` turns through less than a
/// half-turn, so its principal root is continuous along the path.
fn segment_period(ej: Complex64, ek: Complex64, el: Complex64) -> Option<Complex64> {
    let ref_root = (ej - el).sqrt();
    let slope = (ek - ej) / (ej - el);
    let f = move |phi: f64| {
        let s = 0.5 * (1.0 - phi.cos());
        let ratio = 1.0 + s * slope;
        1.0 / (Complex64::i() * ref_root * ratio.sqrt())
    };
    let v = integrate(&f, 0.0, PI, 1e-13 / ref_root.norm())?;
    Some(2.0 * v)
}

/// Periods of the cycles around `[e1, e2]` and `[e2, e3]`, oriented.
pub fn path_periods(e: &[Complex64; 3]) -> Option<(Complex64, Complex64)> {
    let p = segment_period(e[0], e[1], e[2])?;
    let q = segment_period(e[1], e[2], e[0])?;
    oriented(p, q)
}

/// Real coordinates of `w` in the basis `(w1, w2)` (as vectors of `R^2`).
pub fn lattice_coordinates(w: Complex64, w1: Complex64, w2: Complex64) -> [f64; 2] {
    let det = w1.re * w2.im - w1.im * w2.re;
    [
        (w.re * w2.im - w.im * w2.re) / det,
        (w1.re * w.im - w1.im * w.re) / det,
    ]
}
