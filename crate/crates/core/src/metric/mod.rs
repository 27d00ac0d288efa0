//! Finite metric spaces and the model limit spaces compared against them.

pub mod gh;
pub mod torus;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::weierstrass::{Chart, FiberLocation};
pub use gh::{gh_lower, gh_upper, GhOptions};
pub use torus::{flat_torus_space, FlatTorus, TorusGrid, DENSE_LIMIT};

/// Additive slack for metric axioms of floating-point constructions.
pub const METRIC_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("metric space needs at least {0} point(s)")]
    TooFewPoints(usize),
    #[error("distance matrix row {row} has length {found}, expected {expected}")]
    NotSquare {
        row: usize,
        found: usize,
        expected: usize,
    },
    #[error("entry ({i}, {j}) = {value} is not a finite nonnegative distance")]
    BadEntry { i: usize, j: usize, value: f64 },
    #[error("diagonal entry {0} is nonzero")]
    NonzeroDiagonal(usize),
    #[error("asymmetric entries at ({i}, {j}): {a} vs {b}")]
    Asymmetric { i: usize, j: usize, a: f64, b: f64 },
    #[error("triangle inequality fails: d({i},{k}) = {direct} > d({i},{j}) + d({j},{k}) = {via}")]
    Triangle {
        i: usize,
        j: usize,
        k: usize,
        direct: f64,
        via: f64,
    },
    #[error("diameter is zero; cannot rescale")]
    ZeroDiameter,
    #[error("labels: {0}")]
    Labels(String),
    #[error("involution: {0}")]
    Involution(String),
    #[error("carrier mismatch: {0}")]
    CarrierMismatch(String),
    #[error("gram matrix: {0}")]
    Gram(String),
    #[error("{points} points exceed the limit {limit} for a dense distance matrix")]
    TooLarge { points: usize, limit: usize },
}

pub type Result<T> = std::result::Result<T, MetricError>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpaceJson", into = "SpaceJson")]
pub struct FiniteMetricSpace {
    dist: Vec<Vec<f64>>,
    labels: Option<Vec<String>>,
    meta: BTreeMap<String, Value>,
}

#[derive(Serialize, Deserialize)]
struct SpaceJson {
    n: usize,
    dist: Vec<Vec<f64>>,
    #[serde(default)]
    meta: BTreeMap<String, Value>,
}

impl TryFrom<SpaceJson> for FiniteMetricSpace {
    type Error = MetricError;
    fn try_from(j: SpaceJson) -> Result<Self> {
        if j.dist.len() != j.n {
            return Err(MetricError::NotSquare {
                row: j.dist.len(),
                found: j.dist.len(),
                expected: j.n,
            });
        }
        let mut meta = j.meta;
        let labels = match meta.remove("labels") {
            None => None,
            Some(v) => Some(
                serde_json::from_value::<Vec<String>>(v)
                    .map_err(|e| MetricError::Labels(e.to_string()))?,
            ),
        };
        let mut m = FiniteMetricSpace::new(j.dist)?;
        m.meta = meta;
        match labels {
            Some(l) => m.with_labels(l),
            None => Ok(m),
        }
    }
}

impl From<FiniteMetricSpace> for SpaceJson {
    fn from(m: FiniteMetricSpace) -> Self {
        let mut meta = m.meta;
        if let Some(l) = m.labels {
            meta.insert("labels".into(), Value::from(l));
        }
        SpaceJson {
            n: m.dist.len(),
            dist: m.dist,
            meta,
        }
    }
}

impl FiniteMetricSpace {
    /// Validates shape, diagonal, symmetry and the triangle inequality
    /// (within [`METRIC_TOLERANCE`]).
    pub fn new(dist: Vec<Vec<f64>>) -> Result<Self> {
        let m = FiniteMetricSpace::from_trusted(dist);
        m.validate(METRIC_TOLERANCE)?;
        Ok(m)
    }

    /// Skips the `O(n^3)` axiom check; for constructions that are metrics
    /// by design.
    pub(crate) fn from_trusted(dist: Vec<Vec<f64>>) -> Self {
        FiniteMetricSpace {
            dist,
            labels: None,
            meta: BTreeMap::new(),
        }
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        let n = self.dist.len();
        if n == 0 {
            return Err(MetricError::TooFewPoints(1));
        }
        for (i, row) in self.dist.iter().enumerate() {
            if row.len() != n {
                return Err(MetricError::NotSquare {
                    row: i,
                    found: row.len(),
                    expected: n,
                });
            }
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() || v < 0.0 {
                    return Err(MetricError::BadEntry { i, j, value: v });
                }
            }
            if row[i] != 0.0 {
                return Err(MetricError::NonzeroDiagonal(i));
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                let (a, b) = (self.dist[i][j], self.dist[j][i]);
                if (a - b).abs() > tol {
                    return Err(MetricError::Asymmetric { i, j, a, b });
                }
            }
        }
        for j in 0..n {
            let dj = &self.dist[j];
            for i in 0..n {
                let dij = self.dist[i][j];
                let di = &self.dist[i];
                for k in 0..n {
                    if di[k] > dij + dj[k] + tol {
                        return Err(MetricError::Triangle {
                            i,
                            j,
                            k,
                            direct: di[k],
                            via: dij + dj[k],
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n() {
            return Err(MetricError::Labels(format!(
                "{} labels for {} points",
                labels.len(),
                self.n()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn with_meta(mut self, key: &str, value: Value) -> Self {
        self.meta.insert(key.to_string(), value);
        self
    }

    pub fn n(&self) -> usize {
        self.dist.len()
    }

    pub fn dist(&self) -> &[Vec<f64>] {
        &self.dist
    }

    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i][j]
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn meta(&self) -> &BTreeMap<String, Value> {
        &self.meta
    }

    /// Largest entry.
    pub fn diameter(&self) -> f64 {
        diameter(self)
    }

    /// Multiplies every distance by `c > 0`.
    pub fn scaled(&self, c: f64) -> FiniteMetricSpace {
        let mut out = self.clone();
        for row in &mut out.dist {
            for v in row.iter_mut() {
                *v *= c;
            }
        }
        out
    }

    /// Same space with points reordered: point `i` of the result is point
    /// `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> FiniteMetricSpace {
        let dist = perm
            .iter()
            .map(|&i| perm.iter().map(|&j| self.dist[i][j]).collect())
            .collect();
        FiniteMetricSpace {
            dist,
            labels: self
                .labels
                .as_ref()
                .map(|l| perm.iter().map(|&i| l[i].clone()).collect()),
            meta: self.meta.clone(),
        }
    }

    /// Largest distance from each point.
    pub fn eccentricities(&self) -> Vec<f64> {
        self.dist
            .iter()
            .map(|r| r.iter().copied().fold(0.0, f64::max))
            .collect()
    }
}

pub fn diameter(m: &FiniteMetricSpace) -> f64 {
    m.dist.iter().flatten().copied().fold(0.0, f64::max)
}

/// Uniform rescaling to diameter exactly one.
pub fn rescale_to_diameter_one(m: &FiniteMetricSpace) -> Result<FiniteMetricSpace> {
    if m.n() < 2 {
        return Err(MetricError::TooFewPoints(2));
    }
    let d = m.diameter();
    if d <= 0.0 {
        return Err(MetricError::ZeroDiameter);
    }
    let mut out = m.clone();
    for row in out.dist.iter_mut() {
        for v in row.iter_mut() {
            *v /= d;
        }
    }
    Ok(out)
}

/// `samples` equally spaced points of `[0, 1]`.
pub fn segment_space(samples: usize) -> Result<FiniteMetricSpace> {
    if samples < 2 {
        return Err(MetricError::TooFewPoints(2));
    }
    let h = (samples - 1) as f64;
    let dist = (0..samples)
        .map(|i| {
            (0..samples)
                .map(|j| (i as f64 - j as f64).abs() / h)
                .collect()
        })
        .collect();
    let labels = (0..samples).map(|i| format!("s{i}")).collect();
    FiniteMetricSpace::from_trusted(dist)
        .with_meta("kind", Value::from("segment"))
        .with_labels(labels)
}

/// Checks that `sigma` is an involution preserving distances within `tol`.
pub fn check_involution(m: &FiniteMetricSpace, sigma: &[usize], tol: f64) -> Result<()> {
    let n = m.n();
    if sigma.len() != n {
        return Err(MetricError::Involution(format!(
            "permutation has length {}, space has {} points",
            sigma.len(),
            n
        )));
    }
    for (i, &s) in sigma.iter().enumerate() {
        if s >= n {
            return Err(MetricError::Involution(format!(
                "image {s} of {i} out of range"
            )));
        }
        if sigma[s] != i {
            return Err(MetricError::Involution(format!("sigma(sigma({i})) != {i}")));
        }
    }
    for i in 0..n {
        for j in 0..n {
            let a = m.d(i, j);
            let b = m.d(sigma[i], sigma[j]);
            if (a - b).abs() > tol {
                return Err(MetricError::Involution(format!(
                    "not isometric: d({i},{j}) = {a}, d(sigma {i}, sigma {j}) = {b}"
                )));
            }
        }
    }
    Ok(())
}

/// Orbit representatives (smallest index of each orbit), in increasing order.
pub fn orbit_representatives(sigma: &[usize]) -> Vec<usize> {
    (0..sigma.len()).filter(|&i| sigma[i] >= i).collect()
}

/// Quotient by an isometric involution: `d([x],[y]) = min(d(x,y), d(x,sigma y))`.
pub fn quotient_by_involution(m: &FiniteMetricSpace, sigma: &[usize]) -> Result<FiniteMetricSpace> {
    check_involution(m, sigma, METRIC_TOLERANCE)?;
    let reps = orbit_representatives(sigma);
    let dist = reps
        .iter()
        .map(|&x| {
            reps.iter()
                .map(|&y| {
                    if x == y {
                        0.0
                    } else {
                        m.d(x, y).min(m.d(x, sigma[y]))
                    }
                })
                .collect()
        })
        .collect();
    let mut out = FiniteMetricSpace::from_trusted(dist);
    out.meta = m.meta.clone();
    out.meta
        .insert("quotient".into(), Value::from("involution"));
    if let Some(l) = &m.labels {
        out.labels = Some(reps.iter().map(|&i| l[i].clone()).collect());
    }
    Ok(out)
}

/// `max |d1 - d2| / 2` over a shared carrier, an upper bound for the
/// Gromov-Hausdorff distance.
pub fn same_carrier_distance(m1: &FiniteMetricSpace, m2: &FiniteMetricSpace) -> Result<f64> {
    if m1.n() != m2.n() {
        return Err(MetricError::CarrierMismatch(format!(
            "{} vs {} points",
            m1.n(),
            m2.n()
        )));
    }
    if let (Some(a), Some(b)) = (m1.labels(), m2.labels()) {
        if a != b {
            return Err(MetricError::CarrierMismatch("labels differ".into()));
        }
    }
    let mut worst: f64 = 0.0;
    for (r1, r2) in m1.dist.iter().zip(&m2.dist) {
        for (a, b) in r1.iter().zip(r2) {
            worst = worst.max((a - b).abs());
        }
    }
    Ok(0.5 * worst)
}

/// A node of a sampled sphere, in one of the two charts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpherePoint {
    pub chart: Chart,
    pub coord: [f64; 2],
}

/// Base sphere of an elliptic K3 with its special Kähler metric, sampled at
/// landmark nodes of a two-chart mesh.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TropicalK3Mesh {
    /// Landmark distances, rescaled to diameter one.
    pub space: FiniteMetricSpace,
    pub landmarks: Vec<SpherePoint>,
    /// Density `rho` at each landmark, in its own chart.
    pub density: Vec<f64>,
    pub punctures: Vec<FiberLocation>,
    /// Landmark diameter before rescaling.
    pub raw_diameter: f64,
    pub normalized: bool,
    pub resolution: usize,
    pub puncture_radius: f64,
    pub nodes: usize,
    pub edges: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_examples() {
        let s2 = segment_space(2).unwrap();
        assert_eq!(s2.dist(), &[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let s3 = segment_space(3).unwrap();
        assert_eq!(s3.d(1, 0), 0.5);
        assert_eq!(s3.d(1, 2), 0.5);
        for k in 2..40 {
            assert_eq!(segment_space(k).unwrap().diameter(), 1.0);
        }
        assert_eq!(segment_space(1).unwrap_err(), MetricError::TooFewPoints(2));
    }

    #[test]
    fn rescale_examples() {
        let s3 = segment_space(3).unwrap();
        assert_eq!(rescale_to_diameter_one(&s3).unwrap(), s3);
        let big = s3.scaled(4.0);
        assert_eq!(rescale_to_diameter_one(&big).unwrap().dist(), s3.dist());
        let point = FiniteMetricSpace::new(vec![vec![0.0]]).unwrap();
        assert_eq!(
            rescale_to_diameter_one(&point).unwrap_err(),
            MetricError::TooFewPoints(2)
        );
        let zero = FiniteMetricSpace::new(vec![vec![0.0, 0.0], vec![0.0, 0.0]]).unwrap();
        assert_eq!(
            rescale_to_diameter_one(&zero).unwrap_err(),
            MetricError::ZeroDiameter
        );
    }

    #[test]
    fn axioms_enforced() {
        assert!(matches!(
            FiniteMetricSpace::new(vec![vec![0.0, 1.0], vec![2.0, 0.0]]),
            Err(MetricError::Asymmetric { .. })
        ));
        assert!(matches!(
            FiniteMetricSpace::new(vec![
                vec![0.0, 1.0, 3.0],
                vec![1.0, 0.0, 1.0],
                vec![3.0, 1.0, 0.0]
            ]),
            Err(MetricError::Triangle { .. })
        ));
        assert!(matches!(
            FiniteMetricSpace::new(vec![vec![0.0, -1.0], vec![-1.0, 0.0]]),
            Err(MetricError::BadEntry { .. })
        ));
    }

    #[test]
    fn identity_quotient_is_isometric() {
        let s = segment_space(5).unwrap();
        let id: Vec<usize> = (0..5).collect();
        assert_eq!(quotient_by_involution(&s, &id).unwrap().dist(), s.dist());
    }

    #[test]
    fn reflection_of_segment_folds_it() {
        let s = segment_space(5).unwrap();
        let sigma = vec![4, 3, 2, 1, 0];
        let q = quotient_by_involution(&s, &sigma).unwrap();
        assert_eq!(q.n(), 3);
        assert_eq!(q.diameter(), 0.5);
        assert!(quotient_by_involution(&s, &[1, 0, 2, 3, 4]).is_err());
        assert!(quotient_by_involution(&s, &[1, 2, 0, 3, 4]).is_err());
    }

    #[test]
    fn same_carrier_examples() {
        let s = segment_space(7).unwrap();
        assert_eq!(same_carrier_distance(&s, &s).unwrap(), 0.0);
        let eps = 0.125;
        let t = s.scaled(1.0 + eps);
        assert!((same_carrier_distance(&s, &t).unwrap() - 0.5 * eps * s.diameter()).abs() < 1e-15);
        assert!(same_carrier_distance(&s, &segment_space(6).unwrap()).is_err());
    }

    #[test]
    fn json_roundtrip_keeps_labels() {
        let s = segment_space(3).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        assert!(text.starts_with("{\"n\":3,\"dist\":"));
        let back: FiniteMetricSpace = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        let bad = r#"{"n":2,"dist":[[0,1],[2,0]]}"#;
        assert!(serde_json::from_str::<FiniteMetricSpace>(bad).is_err());
    }
}
