//! Elliptic K3 fibrations `y^2 = x^3 + A(z) x + B(z)` over the sphere.
//!
//! `A` and `B` have degree at most 8 and 12 and are sections of `O(8)` and
//! `O(12)`; in the chart `w = 1/z` they read `w^8 A(1/w)` and `w^12 B(1/w)`.
//! Every `f64` coefficient is an exact dyadic rational, so vanishing orders
//! are decided by exact arithmetic over `Q(i)`. Floating point is only used
//! to locate roots whose multiplicity is already known.

pub mod kodaira;
pub mod mesh;
pub mod periods;
pub mod poly;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::json;
use kodaira::{Classification, KodairaType};
pub use mesh::{mesh_metric, mesh_metric_with, MeshOptions};
pub use periods::{fiber_periods, FiberPeriods, PeriodError};
use poly::{Poly, Qi};

pub const MAX_DEGREE_A: usize = 8;
pub const MAX_DEGREE_B: usize = 12;

/// Minimum separation between distinct singular fibers.
pub const DEFAULT_CLUSTER_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WeierstrassError {
    #[error("coefficient list {which} has degree {degree}, above {max}")]
    DegreeTooHigh {
        which: &'static str,
        degree: usize,
        max: usize,
    },
    #[error("coefficients must be finite")]
    NonFinite,
    #[error("discriminant 4A^3 + 27B^2 vanishes identically")]
    DiscriminantZero,
    #[error("equation is not minimal at {location}: ord A = {ord_a}, ord B = {ord_b}")]
    NonMinimal {
        location: FiberLocation,
        ord_a: String,
        ord_b: String,
    },
    #[error("singular fibers at {first} and {second} are closer than {tolerance:e}")]
    AmbiguousRoots {
        first: FiberLocation,
        second: FiberLocation,
        tolerance: f64,
    },
    #[error("root finding failed: {0}")]
    RootFinding(String),
    #[error("point {point} is within {distance:e} of a singular fiber")]
    TooNearSingular { point: FiberLocation, distance: f64 },
    #[error(transparent)]
    Period(#[from] PeriodError),
    #[error("mesh is disconnected ({components} components); shrink the puncture radius")]
    Disconnected { components: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, WeierstrassError>;

/// A point of the sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FiberLocation {
    Finite(Complex64),
    Infinity,
}

impl std::fmt::Display for FiberLocation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FiberLocation::Finite(z) => write!(f, "z = {} {:+}i", z.re, z.im),
            FiberLocation::Infinity => f.write_str("z = infinity"),
        }
    }
}

impl Serialize for FiberLocation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            FiberLocation::Finite(z) => [z.re, z.im].serialize(s),
            FiberLocation::Infinity => s.serialize_str("infinity"),
        }
    }
}

impl<'de> Deserialize<'de> for FiberLocation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Pair([f64; 2]),
            Name(String),
        }
        match Raw::deserialize(d)? {
            Raw::Pair([re, im]) => Ok(FiberLocation::Finite(Complex64::new(re, im))),
            Raw::Name(s) if s == "infinity" => Ok(FiberLocation::Infinity),
            Raw::Name(s) => Err(serde::de::Error::custom(format!("unknown location {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Chart {
    /// Affine coordinate `z`.
    Z,
    /// `w = 1/z`.
    W,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FamilyJson", into = "FamilyJson")]
pub struct WeierstrassFamily {
    a: Vec<Complex64>,
    b: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct FamilyJson {
    #[serde(rename = "A", with = "json::complex_vec")]
    a: Vec<Complex64>,
    #[serde(rename = "B", with = "json::complex_vec")]
    b: Vec<Complex64>,
}

impl TryFrom<FamilyJson> for WeierstrassFamily {
    type Error = WeierstrassError;
    fn try_from(j: FamilyJson) -> Result<Self> {
        WeierstrassFamily::new(j.a, j.b)
    }
}

impl From<WeierstrassFamily> for FamilyJson {
    fn from(f: WeierstrassFamily) -> Self {
        FamilyJson { a: f.a, b: f.b }
    }
}

fn trim(mut c: Vec<Complex64>) -> Vec<Complex64> {
    while c.last().is_some_and(|z| *z == Complex64::default()) {
        c.pop();
    }
    c
}

fn pad(c: &[Complex64], len: usize) -> Vec<Complex64> {
    let mut out = c.to_vec();
    out.resize(len, Complex64::default());
    out
}

impl WeierstrassFamily {
    /// Coefficients in ascending degree. Rejects degrees above (8, 12),
    /// non-finite values and an identically vanishing discriminant.
    pub fn new(a: Vec<Complex64>, b: Vec<Complex64>) -> Result<Self> {
        if a.iter()
            .chain(&b)
            .any(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(WeierstrassError::NonFinite);
        }
        let a = trim(a);
        let b = trim(b);
        for (which, c, max) in [("A", &a, MAX_DEGREE_A), ("B", &b, MAX_DEGREE_B)] {
            if c.len() > max + 1 {
                return Err(WeierstrassError::DegreeTooHigh {
                    which,
                    degree: c.len() - 1,
                    max,
                });
            }
        }
        let f = WeierstrassFamily { a, b };
        if f.exact_discriminant(Chart::Z).is_zero() {
            return Err(WeierstrassError::DiscriminantZero);
        }
        Ok(f)
    }

    /// Real-coefficient convenience constructor.
    pub fn from_real(a: &[f64], b: &[f64]) -> Result<Self> {
        let c = |v: &[f64]| v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        WeierstrassFamily::new(c(a), c(b))
    }

    pub fn a(&self) -> &[Complex64] {
        &self.a
    }

    pub fn b(&self) -> &[Complex64] {
        &self.b
    }

    /// Coefficients of `A` and `B` in the given chart, padded to full length.
    pub fn chart_coefficients(&self, chart: Chart) -> (Vec<Complex64>, Vec<Complex64>) {
        let a = pad(&self.a, MAX_DEGREE_A + 1);
        let b = pad(&self.b, MAX_DEGREE_B + 1);
        match chart {
            Chart::Z => (a, b),
            Chart::W => (a.into_iter().rev().collect(), b.into_iter().rev().collect()),
        }
    }

    pub fn eval(&self, chart: Chart, p: Complex64) -> (Complex64, Complex64) {
        let (a, b) = self.chart_coefficients(chart);
        (poly::eval_complex(&a, p), poly::eval_complex(&b, p))
    }

    pub fn exact_coefficients(&self, chart: Chart) -> (Poly<Qi>, Poly<Qi>) {
        let (a, b) = self.chart_coefficients(chart);
        (
            Poly::from_complex(&a).expect("finite coefficients"),
            Poly::from_complex(&b).expect("finite coefficients"),
        )
    }

    pub fn exact_discriminant(&self, chart: Chart) -> Poly<Qi> {
        let (a, b) = self.exact_coefficients(chart);
        exact_delta(&a, &b)
    }

    /// `(1 - t) self + t other`, coefficientwise.
    pub fn interpolate(&self, other: &WeierstrassFamily, t: f64) -> Result<WeierstrassFamily> {
        let mix = |p: &[Complex64], q: &[Complex64], n: usize| {
            let (p, q) = (pad(p, n), pad(q, n));
            p.iter()
                .zip(&q)
                .map(|(x, y)| x * (1.0 - t) + y * t)
                .collect()
        };
        WeierstrassFamily::new(
            mix(&self.a, &other.a, MAX_DEGREE_A + 1),
            mix(&self.b, &other.b, MAX_DEGREE_B + 1),
        )
    }
}

fn exact_delta(a: &Poly<Qi>, b: &Poly<Qi>) -> Poly<Qi> {
    use poly::Field;
    let four = Qi::from_u64(4);
    let tw7 = Qi::from_u64(27);
    a.mul(a).mul(a).scale(&four).add(&b.mul(b).scale(&tw7))
}

/// `4A^3 + 27B^2` in the affine chart, ascending coefficients, each the
/// correctly rounded value of the exact coefficient.
pub fn discriminant(f: &WeierstrassFamily) -> Vec<Complex64> {
    f.exact_discriminant(Chart::Z).to_complex()
}

/// Vanishing order `ord` at a fiber; `None` means the coefficient is
/// identically zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberOrders {
    pub a: Option<u32>,
    pub b: Option<u32>,
    pub delta: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularFiber {
    pub location: FiberLocation,
    pub orders: FiberOrders,
    pub kodaira_type: KodairaType,
    pub euler_number: u32,
}

fn fmt_order(o: Option<u32>) -> String {
    o.map_or_else(|| "infinity".into(), |k| k.to_string())
}

fn make_fiber(location: FiberLocation, orders: FiberOrders) -> Result<Option<SingularFiber>> {
    match kodaira::classify(orders.a, orders.b, orders.delta) {
        Classification::Smooth => Ok(None),
        Classification::Singular(t) => Ok(Some(SingularFiber {
            location,
            orders,
            kodaira_type: t,
            euler_number: t.euler_number(),
        })),
        Classification::NonMinimal => Err(WeierstrassError::NonMinimal {
            location,
            ord_a: fmt_order(orders.a),
            ord_b: fmt_order(orders.b),
        }),
        Classification::Inconsistent => Err(WeierstrassError::RootFinding(format!(
            "inconsistent orders {orders:?} at {location}"
        ))),
    }
}

/// Splits the squarefree `p` by the exact vanishing order of `g` at its
/// roots: `gcd(p, g, g', ..., g^(k-1))` collects roots of order at least `k`.
fn split_by_order(p: &Poly<Qi>, g: &Poly<Qi>) -> Vec<(Option<u32>, Poly<Qi>)> {
    if g.is_zero() {
        return vec![(None, p.clone())];
    }
    let mut out = Vec::new();
    let mut cur = p.monic();
    let mut deriv = g.clone();
    let mut ord = 0;
    loop {
        let h = cur.gcd(&deriv);
        let exact = cur.div_exact(&h);
        if exact.degree().unwrap_or(0) > 0 {
            out.push((Some(ord), exact));
        }
        if h.degree().unwrap_or(0) == 0 {
            break;
        }
        cur = h;
        deriv = deriv.derivative();
        ord += 1;
    }
    out
}

fn piece_roots(p: &Poly<Qi>) -> Result<Vec<Complex64>> {
    poly::roots(&p.to_complex()).ok_or_else(|| {
        WeierstrassError::RootFinding("eigenvalue iteration did not converge".into())
    })
}

/// Affine singular fibers with their exact orders; roots located numerically.
fn affine_fibers(f: &WeierstrassFamily) -> Result<Vec<SingularFiber>> {
    let (a, b) = f.exact_coefficients(Chart::Z);
    let delta = exact_delta(&a, &b);
    let mut out = Vec::new();
    if poly::certified_squarefree(&delta) {
        for z in piece_roots(&delta)? {
            let orders = FiberOrders {
                a: Some(0),
                b: Some(0),
                delta: 1,
            };
            out.extend(make_fiber(FiberLocation::Finite(z), orders)?);
        }
        return Ok(out);
    }
    for (k, part) in delta.squarefree_decomposition().iter().enumerate() {
        if part.degree().unwrap_or(0) == 0 {
            continue;
        }
        for (oa, pa) in split_by_order(part, &a) {
            for (ob, pab) in split_by_order(&pa, &b) {
                let orders = FiberOrders {
                    a: oa,
                    b: ob,
                    delta: k as u32 + 1,
                };
                for z in piece_roots(&pab)? {
                    out.extend(make_fiber(FiberLocation::Finite(z), orders)?);
                }
            }
        }
    }
    Ok(out)
}

fn fiber_at_infinity(f: &WeierstrassFamily) -> Result<Option<SingularFiber>> {
    let (a, b) = f.exact_coefficients(Chart::W);
    let origin = <Qi as poly::Field>::zero();
    let delta = exact_delta(&a, &b);
    let orders = FiberOrders {
        a: a.order_at(&origin),
        b: b.order_at(&origin),
        delta: delta.order_at(&origin).expect("discriminant is nonzero"),
    };
    make_fiber(FiberLocation::Infinity, orders)
}

fn location_key(l: &FiberLocation) -> (u8, f64, f64) {
    match l {
        FiberLocation::Finite(z) => (0, z.re, z.im),
        FiberLocation::Infinity => (1, 0.0, 0.0),
    }
}

/// All singular fibers over the sphere, sorted with the fiber at infinity
/// last. Errors on non-minimal points and on distinct fibers closer than
/// `cluster_tolerance`.
pub fn singular_fibers_with(
    f: &WeierstrassFamily,
    cluster_tolerance: f64,
) -> Result<Vec<SingularFiber>> {
    let mut fibers = affine_fibers(f)?;
    fibers.extend(fiber_at_infinity(f)?);
    fibers.sort_by(|p, q| {
        let (kp, kq) = (location_key(&p.location), location_key(&q.location));
        kp.0.cmp(&kq.0)
            .then(kp.1.total_cmp(&kq.1))
            .then(kp.2.total_cmp(&kq.2))
    });
    let finite: Vec<(usize, Complex64)> = fibers
        .iter()
        .enumerate()
        .filter_map(|(i, s)| match s.location {
            FiberLocation::Finite(z) => Some((i, z)),
            FiberLocation::Infinity => None,
        })
        .collect();
    for (x, &(i, zi)) in finite.iter().enumerate() {
        for &(j, zj) in &finite[x + 1..] {
            if (zi - zj).norm() <= cluster_tolerance {
                return Err(WeierstrassError::AmbiguousRoots {
                    first: fibers[i].location,
                    second: fibers[j].location,
                    tolerance: cluster_tolerance,
                });
            }
        }
    }
    Ok(fibers)
}

pub fn singular_fibers(f: &WeierstrassFamily) -> Result<Vec<SingularFiber>> {
    singular_fibers_with(f, DEFAULT_CLUSTER_TOLERANCE)
}

pub fn euler_sum(fibers: &[SingularFiber]) -> u32 {
    fibers.iter().map(|s| s.euler_number).sum()
}

/// Exact local analysis at a point whose coordinates are taken as exact
/// dyadic rationals; `Ok(None)` for a smooth fiber.
pub fn fiber_at(f: &WeierstrassFamily, location: FiberLocation) -> Result<Option<SingularFiber>> {
    match location {
        FiberLocation::Infinity => fiber_at_infinity(f),
        FiberLocation::Finite(z) => {
            let (a, b) = f.exact_coefficients(Chart::Z);
            let z0 = Poly::from_complex(&[z])
                .ok_or(WeierstrassError::NonFinite)?
                .coeffs()
                .first()
                .cloned()
                .unwrap_or_else(<Qi as poly::Field>::zero);
            let delta = exact_delta(&a, &b);
            let orders = FiberOrders {
                a: a.order_at(&z0),
                b: b.order_at(&z0),
                delta: delta.order_at(&z0).expect("discriminant is nonzero"),
            };
            make_fiber(location, orders)
        }
    }
}

/// Distinct zeros of the discriminant over the sphere, without
/// classification (so also for non-minimal equations).
pub fn discriminant_zeros(f: &WeierstrassFamily) -> Result<Vec<FiberLocation>> {
    let delta = f.exact_discriminant(Chart::Z);
    let reduced = if poly::certified_squarefree(&delta) {
        delta
    } else {
        delta.div_exact(&delta.gcd(&delta.derivative()))
    };
    let mut out: Vec<FiberLocation> = piece_roots(&reduced)?
        .into_iter()
        .map(FiberLocation::Finite)
        .collect();
    let origin = <Qi as poly::Field>::zero();
    if f.exact_discriminant(Chart::W).order_at(&origin) != Some(0) {
        out.push(FiberLocation::Infinity);
    }
    Ok(out)
}

/// Periods and metric density over the punctured sphere of one family.
#[derive(Clone, Debug)]
pub struct DensityField {
    family: WeierstrassFamily,
    zeros: Vec<FiberLocation>,
    z_coeffs: (Vec<Complex64>, Vec<Complex64>),
    w_coeffs: (Vec<Complex64>, Vec<Complex64>),
    /// Evaluation closer than this to a fiber is refused.
    pub min_distance: f64,
}

impl DensityField {
    pub fn new(family: &WeierstrassFamily) -> Result<Self> {
        Ok(DensityField {
            family: family.clone(),
            zeros: discriminant_zeros(family)?,
            z_coeffs: family.chart_coefficients(Chart::Z),
            w_coeffs: family.chart_coefficients(Chart::W),
            min_distance: 1e-12,
        })
    }

    pub fn family(&self) -> &WeierstrassFamily {
        &self.family
    }

    pub fn discriminant_zeros(&self) -> &[FiberLocation] {
        &self.zeros
    }

    /// Fiber positions in a chart's coordinate (those at the chart's infinity omitted).
    pub fn punctures(&self, chart: Chart) -> Vec<Complex64> {
        self.zeros
            .iter()
            .filter_map(|loc| match (chart, *loc) {
                (Chart::Z, FiberLocation::Finite(z)) => Some(z),
                (Chart::Z, FiberLocation::Infinity) => None,
                (Chart::W, FiberLocation::Finite(z)) => {
                    (z != Complex64::default()).then(|| z.inv())
                }
                (Chart::W, FiberLocation::Infinity) => Some(Complex64::default()),
            })
            .collect()
    }

    pub fn distance_to_fibers(&self, chart: Chart, p: Complex64) -> f64 {
        self.punctures(chart)
            .iter()
            .map(|q| (p - q).norm())
            .fold(f64::INFINITY, f64::min)
    }

    fn location(chart: Chart, p: Complex64) -> FiberLocation {
        match chart {
            Chart::Z => FiberLocation::Finite(p),
            Chart::W if p == Complex64::default() => FiberLocation::Infinity,
            Chart::W => FiberLocation::Finite(p.inv()),
        }
    }

    pub fn periods(&self, chart: Chart, p: Complex64) -> Result<FiberPeriods> {
        let (ca, cb) = match chart {
            Chart::Z => &self.z_coeffs,
            Chart::W => &self.w_coeffs,
        };
        let a = poly::eval_complex(ca, p);
        let b = poly::eval_complex(cb, p);
        match fiber_periods(a, b) {
            Err(PeriodError::Singular(_)) => Err(WeierstrassError::TooNearSingular {
                point: Self::location(chart, p),
                distance: self.distance_to_fibers(chart, p),
            }),
            other => Ok(other?),
        }
    }

    /// `rho = Im(omega2 conj(omega1))`; the metric is `rho |dp|^2` in the chart.
    pub fn density(&self, chart: Chart, p: Complex64) -> Result<f64> {
        let d = self.distance_to_fibers(chart, p);
        if d < self.min_distance {
            return Err(WeierstrassError::TooNearSingular {
                point: Self::location(chart, p),
                distance: d,
            });
        }
        Ok(self.periods(chart, p)?.density())
    }
}

/// Special Kähler density at an affine point.
pub fn metric_density(f: &WeierstrassFamily, z: Complex64) -> Result<f64> {
    DensityField::new(f)?.density(Chart::Z, z)
}

/// Result of continuing a period basis once around a circle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoopMonodromy {
    /// Row `i` holds the coordinates of the continued `omega_i` in the
    /// starting basis.
    pub matrix: [[i64; 2]; 2],
    /// Largest distance of a coordinate from the nearest integer before rounding.
    pub deviation: f64,
    pub steps: usize,
}

impl LoopMonodromy {
    pub fn trace(&self) -> i64 {
        self.matrix[0][0] + self.matrix[1][1]
    }

    pub fn determinant(&self) -> i64 {
        self.matrix[0][0] * self.matrix[1][1] - self.matrix[0][1] * self.matrix[1][0]
    }

    /// Rank of `T - I`.
    pub fn rank_minus_identity(&self) -> usize {
        let m = [
            [self.matrix[0][0] - 1, self.matrix[0][1]],
            [self.matrix[1][0], self.matrix[1][1] - 1],
        ];
        if m.iter().flatten().all(|&x| x == 0) {
            0
        } else if m[0][0] * m[1][1] - m[0][1] * m[1][0] == 0 {
            1
        } else {
            2
        }
    }
}

fn round_coords(w: Complex64, basis: (Complex64, Complex64)) -> ([f64; 2], [i64; 2], f64) {
    let m = periods::lattice_coordinates(w, basis.0, basis.1);
    let r = [m[0].round(), m[1].round()];
    let dev = (m[0] - r[0]).abs().max((m[1] - r[1]).abs());
    (m, [r[0] as i64, r[1] as i64], dev)
}

/// Coefficients `(c0, c1)` with `∮ g dx/y^3 = c0 ∮ dx/y + c1 ∮ x dx/y` on
/// `y^2 = x^3 + a x + b`, for `g = g0 + g1 x + g2 x^2`.
fn gauss_manin_reduce(a: Complex64, b: Complex64, g: [f64; 3]) -> (Complex64, Complex64) {
    let det = -(4.0 * a * a * a + 27.0 * b * b) / 12.0;
    let rhs0 = g[0] - a * g[2] / 3.0;
    let p1 = (-(a * a) / 3.0 * g[1] - 1.5 * b * rhs0) / det;
    let p2 = (a * rhs0 - 1.5 * b * g[1]) / det;
    (p1 / 2.0, -p2 / 2.0)
}

/// Derivative of `(omega, eta)` along the curve with `(a, b)` moving at `(da, db)`.
fn gauss_manin_step(
    a: Complex64,
    b: Complex64,
    da: Complex64,
    db: Complex64,
    y: [Complex64; 2],
) -> [Complex64; 2] {
    let int = |g: [f64; 3]| {
        let (c0, c1) = gauss_manin_reduce(a, b, g);
        c0 * y[0] + c1 * y[1]
    };
    let (i1, ix, ix2) = (
        int([1.0, 0.0, 0.0]),
        int([0.0, 1.0, 0.0]),
        int([0.0, 0.0, 1.0]),
    );
    [-0.5 * (da * ix + db * i1), -0.5 * (da * ix2 + db * ix)]
}

/// Analytic continuation of the period basis around `center + radius e^{it}`,
/// integrating the Gauss-Manin system for `(∮ dx/y, ∮ x dx/y)` with adaptive RK4.
pub fn loop_monodromy(
    field: &DensityField,
    chart: Chart,
    center: Complex64,
    radius: f64,
) -> Result<LoopMonodromy> {
    use std::f64::consts::TAU;
    let clearance = field
        .punctures(chart)
        .iter()
        .map(|q| ((q - center).norm() - radius).abs())
        .fold(f64::INFINITY, f64::min);
    if radius <= 0.0 || clearance < 1e-6 * radius {
        return Err(WeierstrassError::InvalidParameter(
            "loop passes through a singular fiber".into(),
        ));
    }
    let (ca, cb) = match chart {
        Chart::Z => &field.z_coeffs,
        Chart::W => &field.w_coeffs,
    };
    let (dca, dcb) = (poly::derivative_complex(ca), poly::derivative_complex(cb));
    let coeffs = |t: f64| {
        let p = center + Complex64::from_polar(radius, t);
        let dp = Complex64::new(0.0, 1.0) * Complex64::from_polar(radius, t);
        (
            poly::eval_complex(ca, p),
            poly::eval_complex(cb, p),
            poly::eval_complex(&dca, p) * dp,
            poly::eval_complex(&dcb, p) * dp,
        )
    };
    let rhs = |t: f64, y: &[Complex64; 4]| -> [Complex64; 4] {
        let (a, b, da, db) = coeffs(t);
        let u = gauss_manin_step(a, b, da, db, [y[0], y[1]]);
        let v = gauss_manin_step(a, b, da, db, [y[2], y[3]]);
        [u[0], u[1], v[0], v[1]]
    };

    // eta from the derivative of the Carlson periods at t = 0
    let start = field.periods(chart, center + radius)?;
    let basis = (start.omega1, start.omega2);
    let h = 1e-3;
    let mut deriv = [Complex64::default(); 2];
    for (k, w) in [(-2.0, 1.0), (-1.0, -8.0), (1.0, 8.0), (2.0, -1.0)] {
        let fresh = field.periods(chart, center + Complex64::from_polar(radius, k * h))?;
        let fb = (fresh.omega1, fresh.omega2);
        for (i, om) in [basis.0, basis.1].into_iter().enumerate() {
            let (_, r, _) = round_coords(om, fb);
            deriv[i] += (fb.0 * r[0] as f64 + fb.1 * r[1] as f64) * (w / (12.0 * h));
        }
    }
    let (a, b, da, db) = coeffs(0.0);
    let (c0x, c1x) = gauss_manin_reduce(a, b, [0.0, 1.0, 0.0]);
    let (c01, c11) = gauss_manin_reduce(a, b, [1.0, 0.0, 0.0]);
    let denom = da * c1x + db * c11;
    let eta = |om: Complex64, d: Complex64| (-2.0 * d - (da * c0x + db * c01) * om) / denom;
    let mut y = [
        basis.0,
        eta(basis.0, deriv[0]),
        basis.1,
        eta(basis.1, deriv[1]),
    ];

    let rk4 = |t: f64, y: &[Complex64; 4], dt: f64| -> [Complex64; 4] {
        let add = |y: &[Complex64; 4], k: &[Complex64; 4], s: f64| -> [Complex64; 4] {
            std::array::from_fn(|i| y[i] + k[i] * s)
        };
        let k1 = rhs(t, y);
        let k2 = rhs(t + dt / 2.0, &add(y, &k1, dt / 2.0));
        let k3 = rhs(t + dt / 2.0, &add(y, &k2, dt / 2.0));
        let k4 = rhs(t + dt, &add(y, &k3, dt));
        std::array::from_fn(|i| y[i] + (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (dt / 6.0))
    };
    let scale = |y: &[Complex64; 4]| y[0].norm().max(y[2].norm());
    let (mut t, mut dt, mut steps) = (0.0, TAU / 256.0, 0usize);
    while t < TAU {
        dt = dt.min(TAU - t);
        let full = rk4(t, &y, dt);
        let half = rk4(t + dt / 2.0, &rk4(t, &y, dt / 2.0), dt / 2.0);
        let err = [0, 2]
            .iter()
            .map(|&i| (full[i] - half[i]).norm())
            .fold(0.0, f64::max)
            / scale(&y);
        if err > 1e-12 && dt > 1e-9 {
            dt /= 2.0;
            continue;
        }
        if steps > 1_000_000 || !err.is_finite() {
            return Err(WeierstrassError::InvalidParameter(
                "period continuation did not converge".into(),
            ));
        }
        // Richardson extrapolation of the two estimates
        y = std::array::from_fn(|i| half[i] + (half[i] - full[i]) / 15.0);
        t += dt;
        steps += 1;
        if err < 1e-14 {
            dt *= 2.0;
        }
    }
    let (_, r1, d1) = round_coords(y[0], basis);
    let (_, r2, d2) = round_coords(y[2], basis);
    Ok(LoopMonodromy {
        matrix: [r1, r2],
        deviation: d1.max(d2),
        steps,
    })
}
