//! Graph approximation of the base sphere with the special Kähler metric.
//!
//! Each chart carries a square grid on `[-2, 2]^2` restricted to the disk of
//! radius 2, so the charts overlap on the annulus `1/2 < |z| < 2`. Grid nodes
//! are joined along a 32-direction stencil and every edge is weighted by
//! Simpson's rule for `int sqrt(rho) |dp|`. Densities are tabulated once on
//! the half-spaced grid, which contains every edge midpoint.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{Chart, DensityField, Result, WeierstrassError, WeierstrassFamily};
use crate::metric::{FiniteMetricSpace, SpherePoint, TropicalK3Mesh};

/// Half-width of the square sampled in each chart.
const CHART_RADIUS: f64 = 2.0;
/// Primitive steps `(dx, dy)` with `dx > 0` or `dx = 0, dy > 0` and `max(|dx|, |dy|) <= 3`.
const STENCIL: [(i64, i64); 16] = [
    (1, 0),
    (0, 1),
    (1, 1),
    (1, -1),
    (1, 2),
    (2, 1),
    (1, -2),
    (2, -1),
    (1, 3),
    (3, 1),
    (1, -3),
    (3, -1),
    (2, 3),
    (3, 2),
    (2, -3),
    (3, -2),
];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshOptions {
    /// Grid cells per axis of each chart.
    pub resolution: usize,
    pub puncture_radius: f64,
    /// Number of sphere points kept in the output metric space.
    pub landmarks: usize,
}

impl Default for MeshOptions {
    fn default() -> Self {
        MeshOptions {
            resolution: 200,
            puncture_radius: 1e-3,
            landmarks: 64,
        }
    }
}

/// `n` nearly uniform points of the sphere, each in the chart where it has
/// modulus at most one.
pub fn landmark_points(n: usize) -> Vec<SpherePoint> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let height = 1.0 - (2 * i + 1) as f64 / n as f64;
            let r = (1.0 - height * height).sqrt();
            let theta = golden * i as f64;
            // stereographic projection from the north pole
            let z = Complex64::new(r * theta.cos(), r * theta.sin()) / (1.0 - height);
            if z.norm() <= 1.0 {
                SpherePoint {
                    chart: Chart::Z,
                    coord: [z.re, z.im],
                }
            } else {
                let w = z.inv();
                SpherePoint {
                    chart: Chart::W,
                    coord: [w.re, w.im],
                }
            }
        })
        .collect()
}

struct ChartGrid {
    chart: Chart,
    n: usize,
    h: f64,
    punctures: Vec<Complex64>,
    /// `rho` on the half-spaced grid, `NaN` where unusable.
    half: Vec<f64>,
    /// Graph node id of grid node `(i, j)`.
    node: Vec<Option<usize>>,
}

impl ChartGrid {
    fn half_point(&self, k: usize, l: usize) -> Complex64 {
        let s = self.h / 2.0;
        Complex64::new(-CHART_RADIUS + k as f64 * s, -CHART_RADIUS + l as f64 * s)
    }

    fn half_index(&self, k: usize, l: usize) -> usize {
        k * (2 * self.n + 1) + l
    }

    fn half_rho(&self, k: usize, l: usize) -> f64 {
        self.half[self.half_index(k, l)]
    }

    fn node_at(&self, i: i64, j: i64) -> Option<usize> {
        let n = self.n as i64;
        if i < 0 || j < 0 || i > n || j > n {
            return None;
        }
        self.node[(i * (n + 1) + j) as usize]
    }

    fn grid_point(&self, i: usize, j: usize) -> Complex64 {
        self.half_point(2 * i, 2 * j)
    }

    fn segment_clear(&self, p: Complex64, q: Complex64, radius: f64) -> bool {
        self.punctures
            .iter()
            .all(|&c| segment_distance(p, q, c) >= radius)
    }
}

fn segment_distance(p: Complex64, q: Complex64, c: Complex64) -> f64 {
    let d = q - p;
    let len2 = d.norm_sqr();
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((c - p) * d.conj()).re / len2).clamp(0.0, 1.0)
    };
    (p + d * t - c).norm()
}

fn simpson(length: f64, rho: [f64; 3]) -> f64 {
    length / 6.0 * (rho[0].sqrt() + 4.0 * rho[1].sqrt() + rho[2].sqrt())
}

/// `rho` at `p`, or `NaN` when `p` is too close to a fiber.
fn rho_or_nan(field: &DensityField, chart: Chart, p: Complex64) -> Result<f64> {
    match field.density(chart, p) {
        Ok(r) if r.is_finite() && r > 0.0 => Ok(r),
        Ok(_) | Err(WeierstrassError::TooNearSingular { .. }) => Ok(f64::NAN),
        Err(e) => Err(e),
    }
}

fn build_chart(
    field: &DensityField,
    chart: Chart,
    n: usize,
    radius: f64,
    next_id: &mut usize,
) -> Result<ChartGrid> {
    let m = 2 * n + 1;
    let mut grid = ChartGrid {
        chart,
        n,
        h: 2.0 * CHART_RADIUS / n as f64,
        punctures: field.punctures(chart),
        half: Vec::new(),
        node: Vec::new(),
    };
    let g = &grid;
    grid.half = (0..m * m)
        .into_par_iter()
        .map(|idx| {
            let p = g.half_point(idx / m, idx % m);
            if p.norm() > CHART_RADIUS * (1.0 + 1e-12) {
                Ok(f64::NAN)
            } else {
                rho_or_nan(field, chart, p)
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut node = vec![None; (n + 1) * (n + 1)];
    for i in 0..=n {
        for j in 0..=n {
            let p = grid.grid_point(i, j);
            let near = grid.punctures.iter().any(|&c| (p - c).norm() < radius);
            if !near && grid.half_rho(2 * i, 2 * j).is_finite() {
                node[i * (n + 1) + j] = Some(*next_id);
                *next_id += 1;
            }
        }
    }
    grid.node = node;
    Ok(grid)
}

fn chart_edges(grid: &ChartGrid, radius: f64) -> Vec<(usize, usize, f64)> {
    let n = grid.n as i64;
    let mut edges = Vec::new();
    for i in 0..=n {
        for j in 0..=n {
            let Some(u) = grid.node_at(i, j) else {
                continue;
            };
            for &(dx, dy) in &STENCIL {
                let Some(v) = grid.node_at(i + dx, j + dy) else {
                    continue;
                };
                let rho = [
                    grid.half_rho(2 * i as usize, 2 * j as usize),
                    grid.half_rho((2 * i + dx) as usize, (2 * j + dy) as usize),
                    grid.half_rho(2 * (i + dx) as usize, 2 * (j + dy) as usize),
                ];
                if rho.iter().any(|r| !r.is_finite()) {
                    continue;
                }
                let p = grid.grid_point(i as usize, j as usize);
                let q = grid.grid_point((i + dx) as usize, (j + dy) as usize);
                if !grid.segment_clear(p, q, radius) {
                    continue;
                }
                edges.push((u, v, simpson((q - p).norm(), rho)));
            }
        }
    }
    edges
}

/// Edges from an arbitrary chart point to the corners of its grid cell.
fn attach(
    field: &DensityField,
    grid: &ChartGrid,
    p: Complex64,
    radius: f64,
) -> Result<Vec<(usize, f64)>> {
    let rho_p = rho_or_nan(field, grid.chart, p)?;
    if !rho_p.is_finite() {
        return Ok(Vec::new());
    }
    let i0 = ((p.re + CHART_RADIUS) / grid.h).floor() as i64;
    let j0 = ((p.im + CHART_RADIUS) / grid.h).floor() as i64;
    let mut out = Vec::new();
    // widen the block when a puncture hides the cell corners
    for ring in 0..4i64 {
        for i in i0 - ring..=i0 + 1 + ring {
            for j in j0 - ring..=j0 + 1 + ring {
                let on_ring =
                    i == i0 - ring || i == i0 + 1 + ring || j == j0 - ring || j == j0 + 1 + ring;
                let Some(v) = grid.node_at(i, j) else {
                    continue;
                };
                if !on_ring {
                    continue;
                }
                let q = grid.grid_point(i as usize, j as usize);
                if !grid.segment_clear(p, q, radius) {
                    continue;
                }
                let rho_m = rho_or_nan(field, grid.chart, (p + q) / 2.0)?;
                let rho_q = grid.half_rho(2 * i as usize, 2 * j as usize);
                if rho_m.is_finite() {
                    out.push((v, simpson((q - p).norm(), [rho_p, rho_m, rho_q])));
                }
            }
        }
        if !out.is_empty() {
            break;
        }
    }
    Ok(out)
}

struct Graph {
    offsets: Vec<usize>,
    targets: Vec<(usize, f64)>,
}

impl Graph {
    fn new(nodes: usize, edges: &[(usize, usize, f64)]) -> Graph {
        let mut degree = vec![0usize; nodes + 1];
        for &(u, v, _) in edges {
            degree[u + 1] += 1;
            degree[v + 1] += 1;
        }
        for k in 0..nodes {
            degree[k + 1] += degree[k];
        }
        let offsets = degree;
        let mut fill = offsets.clone();
        let mut targets = vec![(0, 0.0); 2 * edges.len()];
        for &(u, v, w) in edges {
            targets[fill[u]] = (v, w);
            fill[u] += 1;
            targets[fill[v]] = (u, w);
            fill[v] += 1;
        }
        Graph { offsets, targets }
    }

    fn nodes(&self) -> usize {
        self.offsets.len() - 1
    }

    fn dijkstra(&self, source: usize) -> Vec<f64> {
        #[derive(PartialEq)]
        struct Key(f64);
        impl Eq for Key {}
        impl PartialOrd for Key {
            fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
                Some(self.cmp(other))
            }
        }
        impl Ord for Key {
            fn cmp(&self, other: &Self) -> std::cmp::Ordering {
                self.0.total_cmp(&other.0)
            }
        }

        let mut dist = vec![f64::INFINITY; self.nodes()];
        let mut heap = BinaryHeap::new();
        dist[source] = 0.0;
        heap.push(Reverse((Key(0.0), source)));
        while let Some(Reverse((Key(d), u))) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for &(v, w) in &self.targets[self.offsets[u]..self.offsets[u + 1]] {
                let nd = d + w;
                if nd < dist[v] {
                    dist[v] = nd;
                    heap.push(Reverse((Key(nd), v)));
                }
            }
        }
        dist
    }
}

/// Landmark distance matrix of the meshed sphere, rescaled to diameter one.
pub fn mesh_metric(
    f: &WeierstrassFamily,
    resolution: usize,
    puncture_radius: f64,
) -> Result<TropicalK3Mesh> {
    mesh_metric_with(
        f,
        &MeshOptions {
            resolution,
            puncture_radius,
            ..MeshOptions::default()
        },
    )
}

pub fn mesh_metric_with(f: &WeierstrassFamily, opts: &MeshOptions) -> Result<TropicalK3Mesh> {
    if opts.resolution < 4 {
        return Err(WeierstrassError::InvalidParameter(format!(
            "resolution {} is below 4",
            opts.resolution
        )));
    }
    if !(opts.puncture_radius > 0.0 && opts.puncture_radius < 0.5) {
        return Err(WeierstrassError::InvalidParameter(format!(
            "puncture radius {} is outside (0, 0.5)",
            opts.puncture_radius
        )));
    }
    if opts.landmarks < 2 {
        return Err(WeierstrassError::InvalidParameter(
            "at least 2 landmarks are needed".into(),
        ));
    }
    let field = DensityField::new(f)?;
    let r = opts.puncture_radius;
    let mut next_id = 0;
    let zg = build_chart(&field, Chart::Z, opts.resolution, r, &mut next_id)?;
    let wg = build_chart(&field, Chart::W, opts.resolution, r, &mut next_id)?;

    let mut edges = chart_edges(&zg, r);
    edges.extend(chart_edges(&wg, r));

    // glue: W nodes over the annulus attach to the Z cell around 1/w
    let n = opts.resolution;
    let glue: Vec<(usize, Complex64)> = (0..=n)
        .flat_map(|i| (0..=n).map(move |j| (i, j)))
        .filter_map(|(i, j)| {
            let w = wg.grid_point(i, j);
            let id = wg.node[i * (n + 1) + j]?;
            (w.norm() > 0.5 && w.norm() < CHART_RADIUS).then(|| (id, w.inv()))
        })
        .collect();
    let glued = glue
        .par_iter()
        .map(|&(id, z)| {
            Ok(attach(&field, &zg, z, r)?
                .into_iter()
                .map(move |(v, w)| (id, v, w)))
        })
        .collect::<Result<Vec<_>>>()?;
    edges.extend(glued.into_iter().flatten());

    let points = landmark_points(opts.landmarks);
    let mut landmark_ids = Vec::with_capacity(points.len());
    let mut density = Vec::with_capacity(points.len());
    for sp in &points {
        let p = Complex64::new(sp.coord[0], sp.coord[1]);
        let grid = if sp.chart == Chart::Z { &zg } else { &wg };
        let links = attach(&field, grid, p, r)?;
        if links.is_empty() {
            return Err(WeierstrassError::InvalidParameter(format!(
                "landmark {:?} lies inside a puncture disk",
                sp.coord
            )));
        }
        let id = next_id;
        next_id += 1;
        edges.extend(links.into_iter().map(|(v, w)| (id, v, w)));
        landmark_ids.push(id);
        density.push(field.density(sp.chart, p)?);
    }

    let graph = Graph::new(next_id, &edges);
    let rows: Vec<Vec<f64>> = landmark_ids
        .par_iter()
        .map(|&s| {
            let d = graph.dijkstra(s);
            landmark_ids.iter().map(|&t| d[t]).collect()
        })
        .collect();
    let mut component = vec![usize::MAX; rows.len()];
    let mut components = 0;
    for a in 0..rows.len() {
        if component[a] == usize::MAX {
            for b in 0..rows.len() {
                if rows[a][b].is_finite() {
                    component[b] = components;
                }
            }
            components += 1;
        }
    }
    if components > 1 {
        return Err(WeierstrassError::Disconnected { components });
    }
    let k = rows.len();
    let mut dist = vec![vec![0.0; k]; k];
    for a in 0..k {
        for b in a + 1..k {
            let d = rows[a][b].min(rows[b][a]);
            dist[a][b] = d;
            dist[b][a] = d;
        }
    }
    let raw_diameter = dist.iter().flatten().copied().fold(0.0, f64::max);
    for row in &mut dist {
        for v in row.iter_mut() {
            *v /= raw_diameter;
        }
    }
    let labels = (0..k).map(|i| format!("L{i}")).collect();
    let space = FiniteMetricSpace::new(dist)
        .and_then(|m| m.with_labels(labels))
        .map_err(|e| WeierstrassError::InvalidParameter(e.to_string()))?
        .with_meta("kind", json!("tropical_k3"))
        .with_meta("resolution", json!(opts.resolution))
        .with_meta("puncture_radius", json!(opts.puncture_radius));
    Ok(TropicalK3Mesh {
        space,
        landmarks: points,
        density,
        punctures: field.discriminant_zeros().to_vec(),
        raw_diameter,
        normalized: true,
        resolution: opts.resolution,
        puncture_radius: opts.puncture_radius,
        nodes: graph.nodes(),
        edges: edges.len(),
    })
}
