//! Flat tori `R^i / Z^i` with a constant metric, sampled on the grid
//! `(Z/s)^i`, and their quotients by `x -> -x`.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{FiniteMetricSpace, MetricError, Result};

/// Largest point count materialized as a dense matrix.
pub const DENSE_LIMIT: usize = 4096;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TorusJson", into = "TorusJson")]
pub struct FlatTorus {
    gram: Vec<Vec<f64>>,
    eig_min: f64,
    eig_max: f64,
}

#[derive(Serialize, Deserialize)]
struct TorusJson {
    gram: Vec<Vec<f64>>,
}

impl TryFrom<TorusJson> for FlatTorus {
    type Error = MetricError;
    fn try_from(j: TorusJson) -> Result<Self> {
        FlatTorus::new(j.gram)
    }
}

impl From<FlatTorus> for TorusJson {
    fn from(t: FlatTorus) -> Self {
        TorusJson { gram: t.gram }
    }
}

impl FlatTorus {
    /// `gram[a][b]` is the inner product of the lattice generators `a`, `b`.
    pub fn new(gram: Vec<Vec<f64>>) -> Result<Self> {
        let i = gram.len();
        if !(1..=4).contains(&i) {
            return Err(MetricError::Gram(format!("rank {i} outside 1..=4")));
        }
        if gram.iter().any(|r| r.len() != i) {
            return Err(MetricError::Gram("not square".into()));
        }
        if gram.iter().flatten().any(|v| !v.is_finite()) {
            return Err(MetricError::Gram("non-finite entry".into()));
        }
        for a in 0..i {
            for b in 0..a {
                if gram[a][b] != gram[b][a] {
                    return Err(MetricError::Gram(format!("asymmetric at ({a}, {b})")));
                }
            }
        }
        let m = DMatrix::from_fn(i, i, |a, b| gram[a][b]);
        let eig = m.symmetric_eigenvalues();
        let eig_min = eig.min();
        let eig_max = eig.max();
        if eig_min <= 0.0 {
            return Err(MetricError::Gram(format!(
                "not positive definite (smallest eigenvalue {eig_min})"
            )));
        }
        Ok(FlatTorus {
            gram,
            eig_min,
            eig_max,
        })
    }

    pub fn identity(rank: usize) -> Result<Self> {
        FlatTorus::new(
            (0..rank)
                .map(|a| (0..rank).map(|b| if a == b { 1.0 } else { 0.0 }).collect())
                .collect(),
        )
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<f64>] {
        &self.gram
    }

    pub fn quadratic(&self, v: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (a, row) in self.gram.iter().enumerate() {
            for (b, g) in row.iter().enumerate() {
                acc += v[a] * g * v[b];
            }
        }
        acc
    }

    /// Translate box half-width that provably contains a shortest
    /// representative of any class with coordinates in `[-1/2, 1/2]`:
    /// the minimizer `v` has `|v|_G <= |delta|_G <= sqrt(eig_max * i / 4)`,
    /// so `|v|_inf <= sqrt(eig_max * i / (4 eig_min))`.
    pub fn search_radius(&self) -> i64 {
        let i = self.rank() as f64;
        ((self.eig_max * i / (4.0 * self.eig_min)).sqrt() + 0.5).ceil() as i64
    }

    /// Length of the shortest vector in `delta + Z^i`, searching translates
    /// in `[-radius, radius]^i` around the reduced representative.
    pub fn norm_mod_lattice(&self, delta: &[f64], radius: i64) -> f64 {
        let i = self.rank();
        let reduced: Vec<f64> = delta.iter().map(|x| x - x.round()).collect();
        let width = (2 * radius + 1) as usize;
        let total = width.pow(i as u32);
        let mut best = f64::INFINITY;
        let mut v = vec![0.0; i];
        for code in 0..total {
            let mut c = code;
            for d in 0..i {
                let shift = (c % width) as i64 - radius;
                c /= width;
                v[d] = reduced[d] + shift as f64;
            }
            best = best.min(self.quadratic(&v));
        }
        best.sqrt()
    }
}

/// The grid `(Z/s)^i` on a flat torus. Distances depend only on the offset,
/// so one table of `s^i` values serves every pair.
#[derive(Clone, Debug)]
pub struct TorusGrid {
    torus: FlatTorus,
    s: usize,
    table: Vec<f64>,
}

impl TorusGrid {
    pub fn new(torus: &FlatTorus, samples_per_axis: usize) -> Result<Self> {
        if samples_per_axis == 0 {
            return Err(MetricError::TooFewPoints(1));
        }
        let i = torus.rank();
        let s = samples_per_axis;
        let n = s.checked_pow(i as u32).ok_or(MetricError::TooLarge {
            points: usize::MAX,
            limit: usize::MAX,
        })?;
        let radius = torus.search_radius();
        let raw: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|k| {
                let delta: Vec<f64> = digits(k, s, i)
                    .iter()
                    .map(|&d| d as f64 / s as f64)
                    .collect();
                torus.norm_mod_lattice(&delta, radius)
            })
            .collect();
        let mut grid = TorusGrid {
            torus: torus.clone(),
            s,
            table: Vec::new(),
        };
        // offsets k and -k must agree bit for bit
        grid.table = (0..n).map(|k| raw[k].min(raw[grid.negate(k)])).collect();
        Ok(grid)
    }

    pub fn torus(&self) -> &FlatTorus {
        &self.torus
    }

    pub fn samples_per_axis(&self) -> usize {
        self.s
    }

    pub fn n(&self) -> usize {
        self.table.len()
    }

    /// Grid digits of point `p` (coordinates `digits / s`).
    pub fn digits(&self, p: usize) -> Vec<usize> {
        digits(p, self.s, self.torus.rank())
    }

    pub fn coordinates(&self, p: usize) -> Vec<f64> {
        self.digits(p)
            .iter()
            .map(|&d| d as f64 / self.s as f64)
            .collect()
    }

    fn offset(&self, p: usize, q: usize) -> usize {
        let (mut p, mut q) = (p, q);
        let (mut k, mut place) = (0, 1);
        for _ in 0..self.torus.rank() {
            let d = (q % self.s + self.s - p % self.s) % self.s;
            k += d * place;
            place *= self.s;
            p /= self.s;
            q /= self.s;
        }
        k
    }

    pub fn distance(&self, p: usize, q: usize) -> f64 {
        self.table[self.offset(p, q)]
    }

    /// Image of `p` under `x -> -x`.
    pub fn negate(&self, p: usize) -> usize {
        let (mut p, mut out, mut place) = (p, 0, 1);
        for _ in 0..self.torus.rank() {
            out += ((self.s - p % self.s) % self.s) * place;
            place *= self.s;
            p /= self.s;
        }
        out
    }

    pub fn involution(&self) -> Vec<usize> {
        (0..self.n()).map(|p| self.negate(p)).collect()
    }

    /// Distance in the quotient by `x -> -x` between the classes of `p` and `q`.
    pub fn quotient_distance(&self, p: usize, q: usize) -> f64 {
        self.distance(p, q).min(self.distance(p, self.negate(q)))
    }

    /// One point per class of `x -> -x`, the smaller index of each pair.
    pub fn quotient_representatives(&self) -> Vec<usize> {
        (0..self.n()).filter(|&p| self.negate(p) >= p).collect()
    }

    fn label(&self, p: usize) -> String {
        let parts: Vec<String> = self.digits(p).iter().map(|d| d.to_string()).collect();
        format!("t{}", parts.join("_"))
    }

    fn dense(
        &self,
        points: &[usize],
        f: impl Fn(usize, usize) -> f64 + Sync,
    ) -> Result<FiniteMetricSpace> {
        if points.len() > DENSE_LIMIT {
            return Err(MetricError::TooLarge {
                points: points.len(),
                limit: DENSE_LIMIT,
            });
        }
        let dist = points
            .par_iter()
            .map(|&p| {
                points
                    .iter()
                    .map(|&q| if p == q { 0.0 } else { f(p, q) })
                    .collect()
            })
            .collect();
        let labels = points.iter().map(|&p| self.label(p)).collect();
        FiniteMetricSpace::from_trusted(dist)
            .with_meta("kind", Value::from("flat_torus"))
            .with_meta("rank", Value::from(self.torus.rank()))
            .with_meta("samples_per_axis", Value::from(self.s))
            .with_meta(
                "gram",
                serde_json::to_value(self.torus.gram()).expect("finite"),
            )
            .with_labels(labels)
    }

    pub fn space(&self) -> Result<FiniteMetricSpace> {
        let all: Vec<usize> = (0..self.n()).collect();
        self.dense(&all, |p, q| self.distance(p, q))
    }

    pub fn quotient_space(&self) -> Result<FiniteMetricSpace> {
        let reps = self.quotient_representatives();
        Ok(self
            .dense(&reps, |p, q| self.quotient_distance(p, q))?
            .with_meta("quotient", Value::from("minus_one")))
    }

    /// Largest grid distance, from the offset table.
    pub fn diameter(&self) -> f64 {
        self.table.iter().copied().fold(0.0, f64::max)
    }

    /// Largest quotient distance over all pairs of classes.
    pub fn quotient_diameter(&self) -> f64 {
        let reps = self.quotient_representatives();
        reps.par_iter()
            .map(|&p| {
                reps.iter()
                    .map(|&q| self.quotient_distance(p, q))
                    .fold(0.0, f64::max)
            })
            .reduce(|| 0.0, f64::max)
    }
}

fn digits(mut k: usize, s: usize, i: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(i);
    for _ in 0..i {
        out.push(k % s);
        k /= s;
    }
    out
}

/// Grid samples of a flat torus with the induced metric.
pub fn flat_torus_space(torus: &FlatTorus, samples_per_axis: usize) -> Result<FiniteMetricSpace> {
    TorusGrid::new(torus, samples_per_axis)?.space()
}
