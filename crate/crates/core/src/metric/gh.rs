//! Gromov-Hausdorff bounds between finite metric spaces.
//!
//! Lower bounds come from invariants that a correspondence of distortion
//! `delta` moves by at most `delta`: the diameter, the set of distance values
//! and the set of eccentricities. Upper bounds are `1/2` the distortion of
//! explicit correspondences found by seeded greedy construction and local
//! search.

use std::cmp::Ordering;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::FiniteMetricSpace;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GhOptions {
    /// Randomized restarts of the correspondence search.
    pub iterations: usize,
    pub seed: u64,
}

impl Default for GhOptions {
    fn default() -> Self {
        GhOptions {
            iterations: 200,
            seed: 0,
        }
    }
}

/// Hausdorff distance between two finite subsets of the line.
fn hausdorff_1d(a: &[f64], b: &[f64]) -> f64 {
    let sorted = |v: &[f64]| {
        let mut s = v.to_vec();
        s.sort_by(f64::total_cmp);
        s.dedup();
        s
    };
    let (a, b) = (sorted(a), sorted(b));
    let one_sided = |from: &[f64], to: &[f64]| {
        from.iter()
            .map(|&x| {
                let k = to.partition_point(|&y| y < x);
                let right = to.get(k).map_or(f64::INFINITY, |&y| y - x);
                let left = if k > 0 { x - to[k - 1] } else { f64::INFINITY };
                left.min(right)
            })
            .fold(0.0, f64::max)
    };
    one_sided(&a, &b).max(one_sided(&b, &a))
}

/// Certified lower bound on the Gromov-Hausdorff distance.
pub fn gh_lower(m1: &FiniteMetricSpace, m2: &FiniteMetricSpace) -> f64 {
    let diam = (m1.diameter() - m2.diameter()).abs();
    let values = |m: &FiniteMetricSpace| m.dist().iter().flatten().copied().collect::<Vec<_>>();
    let dist_sets = hausdorff_1d(&values(m1), &values(m2));
    let ecc = hausdorff_1d(&m1.eccentricities(), &m2.eccentricities());
    0.5 * diam.max(dist_sets).max(ecc)
}

/// Sort key making the search independent of point order and argument order.
fn point_signature(m: &FiniteMetricSpace, i: usize) -> Vec<f64> {
    let mut row = m.dist()[i].clone();
    row.sort_by(f64::total_cmp);
    row.reverse();
    row
}

fn cmp_rows(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or_else(|| a.len().cmp(&b.len()))
}

fn canonical(m: &FiniteMetricSpace) -> (FiniteMetricSpace, Vec<Vec<f64>>) {
    let sigs: Vec<Vec<f64>> = (0..m.n()).map(|i| point_signature(m, i)).collect();
    let mut perm: Vec<usize> = (0..m.n()).collect();
    perm.sort_by(|&a, &b| cmp_rows(&sigs[a], &sigs[b]).then(a.cmp(&b)));
    let sorted_sigs = perm.iter().map(|&i| sigs[i].clone()).collect();
    (m.permuted(&perm), sorted_sigs)
}

fn space_order(
    a: &(FiniteMetricSpace, Vec<Vec<f64>>),
    b: &(FiniteMetricSpace, Vec<Vec<f64>>),
) -> Ordering {
    a.0.n().cmp(&b.0.n()).then_with(|| {
        a.1.iter()
            .zip(&b.1)
            .map(|(x, y)| cmp_rows(x, y))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    })
}

/// A correspondence stored as maps `f: X -> Y` and `g: Y -> X`; its pairs
/// are `(x, f x)` and `(g y, y)`.
struct Search<'a> {
    x: &'a [Vec<f64>],
    y: &'a [Vec<f64>],
}

impl Search<'_> {
    fn pairs(&self, f: &[usize], g: &[usize]) -> Vec<(usize, usize)> {
        f.iter()
            .enumerate()
            .map(|(i, &j)| (i, j))
            .chain(g.iter().enumerate().map(|(j, &i)| (i, j)))
            .collect()
    }

    /// Worst distortion of `(a, b)` against every pair.
    fn pair_cost(&self, a: usize, b: usize, pairs: &[(usize, usize)]) -> f64 {
        pairs
            .iter()
            .map(|&(p, q)| (self.x[a][p] - self.y[b][q]).abs())
            .fold(0.0, f64::max)
    }

    fn distortion(&self, pairs: &[(usize, usize)]) -> f64 {
        pairs
            .iter()
            .map(|&(a, b)| self.pair_cost(a, b, pairs))
            .fold(0.0, f64::max)
    }

    /// Proportional index alignment; the identity when sizes agree.
    fn aligned(&self) -> (Vec<usize>, Vec<usize>) {
        let (n, m) = (self.x.len(), self.y.len());
        let map = |k: usize, from: usize, to: usize| {
            if from <= 1 {
                0
            } else {
                ((k as f64) * (to - 1) as f64 / (from - 1) as f64).round() as usize
            }
        };
        (
            (0..n).map(|i| map(i, n, m)).collect(),
            (0..m).map(|j| map(j, m, n)).collect(),
        )
    }

    fn greedy(&self, rng: &mut ChaCha8Rng) -> (Vec<usize>, Vec<usize>) {
        let (n, m) = (self.x.len(), self.y.len());
        let mut f = vec![usize::MAX; n];
        let mut g = vec![usize::MAX; m];
        let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(n + m);
        let x0 = rng.gen_range(0..n);
        let y0 = rng.gen_range(0..m);
        f[x0] = y0;
        pairs.push((x0, y0));
        let mut xs: Vec<usize> = (0..n).filter(|&i| i != x0).collect();
        xs.shuffle(rng);
        for i in xs {
            let j = (0..m)
                .min_by(|&a, &b| {
                    self.pair_cost(i, a, &pairs)
                        .total_cmp(&self.pair_cost(i, b, &pairs))
                })
                .expect("nonempty");
            f[i] = j;
            pairs.push((i, j));
        }
        let mut ys: Vec<usize> = (0..m).collect();
        ys.shuffle(rng);
        for j in ys {
            let i = (0..n)
                .min_by(|&a, &b| {
                    self.pair_cost(a, j, &pairs)
                        .total_cmp(&self.pair_cost(b, j, &pairs))
                })
                .expect("nonempty");
            g[j] = i;
            pairs.push((i, j));
        }
        (f, g)
    }

    /// Reassigns the endpoint of the worst pair while that lowers its cost.
    fn improve(&self, f: &mut [usize], g: &mut [usize]) -> f64 {
        let (n, m) = (self.x.len(), self.y.len());
        let mut current = self.distortion(&self.pairs(f, g));
        for _ in 0..4 * (n + m) {
            let pairs = self.pairs(f, g);
            let costs: Vec<f64> = pairs
                .iter()
                .map(|&(a, b)| self.pair_cost(a, b, &pairs))
                .collect();
            let worst = (0..pairs.len())
                .max_by(|&a, &b| costs[a].total_cmp(&costs[b]).then(b.cmp(&a)))
                .expect("nonempty");
            let others: Vec<(usize, usize)> = pairs
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != worst)
                .map(|(_, &p)| p)
                .collect();
            let (a, b) = pairs[worst];
            let improved = if worst < n {
                let best = (0..m)
                    .min_by(|&p, &q| {
                        self.pair_cost(a, p, &others)
                            .total_cmp(&self.pair_cost(a, q, &others))
                    })
                    .expect("nonempty");
                let before = f[a];
                f[a] = best;
                (before, true)
            } else {
                let best = (0..n)
                    .min_by(|&p, &q| {
                        self.pair_cost(p, b, &others)
                            .total_cmp(&self.pair_cost(q, b, &others))
                    })
                    .expect("nonempty");
                let before = g[b];
                g[b] = best;
                (before, false)
            };
            let next = self.distortion(&self.pairs(f, g));
            if next < current {
                current = next;
            } else {
                match improved {
                    (before, true) => f[a] = before,
                    (before, false) => g[b] = before,
                }
                break;
            }
        }
        current
    }
}

/// Upper bound `1/2 * min distortion` over the searched correspondences.
/// Symmetric in its arguments and, for spaces without repeated distance
/// rows, independent of point order.
pub fn gh_upper(m1: &FiniteMetricSpace, m2: &FiniteMetricSpace, opts: &GhOptions) -> f64 {
    let c1 = canonical(m1);
    let c2 = canonical(m2);
    let (a, b) = if space_order(&c1, &c2) == Ordering::Greater {
        (c2, c1)
    } else {
        (c1, c2)
    };
    let search = Search {
        x: a.0.dist(),
        y: b.0.dist(),
    };
    let (mut f, mut g) = search.aligned();
    let mut best = search.improve(&mut f, &mut g);
    if best == 0.0 {
        return 0.0;
    }
    let restarts: f64 = (0..opts.iterations)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(
                opts.seed ^ (k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15),
            );
            let (mut f, mut g) = search.greedy(&mut rng);
            search.improve(&mut f, &mut g)
        })
        .reduce(|| f64::INFINITY, f64::min);
    best = best.min(restarts);
    0.5 * best
}
