//! Diameter-one metric spaces attached to points of the compactified moduli
//! space, and numerical continuity probes along paths.
//!
//! | variant              | space                                          |
//! |----------------------|------------------------------------------------|
//! | `boundary_line`      | base sphere of an elliptic K3 with its special Kähler metric |
//! | `boundary_point`     | the unit segment                               |
//! | `kummer_interior`    | flat 4-torus modulo `-1`                       |
//! | `deep_stratum_torus` | flat torus of rank 1 to 3 modulo `-1`          |

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::metric::{
    gh_lower, gh_upper, rescale_to_diameter_one, same_carrier_distance, segment_space,
    FiniteMetricSpace, FlatTorus, GhOptions, MetricError, TorusGrid, DENSE_LIMIT,
};
use crate::period_domain::BoundaryPoint;
use crate::weierstrass::{mesh_metric, WeierstrassError, WeierstrassFamily};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CollapseError {
    #[error(transparent)]
    Weierstrass(#[from] WeierstrassError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("incompatible path: {0}")]
    Path(String),
}

pub type Result<T> = std::result::Result<T, CollapseError>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum CollapseInput {
    /// A point `[e, v]` of a line stratum, given through a Weierstrass
    /// realization. The lattice data is carried along, not checked.
    BoundaryLine {
        family: WeierstrassFamily,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        boundary: Option<BoundaryPoint>,
    },
    BoundaryPoint,
    KummerInterior {
        torus: FlatTorus,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        samples: Option<usize>,
    },
    DeepStratumTorus {
        torus: FlatTorus,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        samples: Option<usize>,
    },
}

impl CollapseInput {
    pub fn variant(&self) -> &'static str {
        match self {
            CollapseInput::BoundaryLine { .. } => "boundary_line",
            CollapseInput::BoundaryPoint => "boundary_point",
            CollapseInput::KummerInterior { .. } => "kummer_interior",
            CollapseInput::DeepStratumTorus { .. } => "deep_stratum_torus",
        }
    }

    fn check(&self) -> Result<()> {
        match self {
            CollapseInput::KummerInterior { torus, .. } if torus.rank() != 4 => {
                Err(CollapseError::Input(format!(
                    "kummer_interior needs a rank 4 torus, got rank {}",
                    torus.rank()
                )))
            }
            CollapseInput::DeepStratumTorus { torus, .. } if torus.rank() > 3 => {
                Err(CollapseError::Input(format!(
                    "deep_stratum_torus needs rank 1 to 3, got rank {}",
                    torus.rank()
                )))
            }
            _ => Ok(()),
        }
    }

    /// Point `t` of the straight segment from `self` to `other`.
    pub fn interpolate(&self, other: &CollapseInput, t: f64) -> Result<CollapseInput> {
        use CollapseInput::*;
        let mix_torus = |a: &FlatTorus, b: &FlatTorus| -> Result<FlatTorus> {
            if a.rank() != b.rank() {
                return Err(CollapseError::Path("torus ranks differ".into()));
            }
            let gram = a
                .gram()
                .iter()
                .zip(b.gram())
                .map(|(r, s)| {
                    r.iter()
                        .zip(s)
                        .map(|(x, y)| x * (1.0 - t) + y * t)
                        .collect()
                })
                .collect();
            Ok(FlatTorus::new(gram)?)
        };
        let same_samples = |a: &Option<usize>, b: &Option<usize>| {
            if a == b {
                Ok(*a)
            } else {
                Err(CollapseError::Path("sample counts differ".into()))
            }
        };
        match (self, other) {
            (
                BoundaryLine {
                    family: a,
                    boundary,
                },
                BoundaryLine { family: b, .. },
            ) => Ok(BoundaryLine {
                family: a.interpolate(b, t)?,
                boundary: boundary.clone(),
            }),
            (BoundaryPoint, BoundaryPoint) => Ok(BoundaryPoint),
            (
                KummerInterior {
                    torus: a,
                    samples: sa,
                },
                KummerInterior {
                    torus: b,
                    samples: sb,
                },
            ) => Ok(KummerInterior {
                torus: mix_torus(a, b)?,
                samples: same_samples(sa, sb)?,
            }),
            (
                DeepStratumTorus {
                    torus: a,
                    samples: sa,
                },
                DeepStratumTorus {
                    torus: b,
                    samples: sb,
                },
            ) => Ok(DeepStratumTorus {
                torus: mix_torus(a, b)?,
                samples: same_samples(sa, sb)?,
            }),
            (a, b) => Err(CollapseError::Path(format!(
                "cannot interpolate {} to {}",
                a.variant(),
                b.variant()
            ))),
        }
    }
}

/// Samples per axis for a torus of the given rank: the requested count, or
/// the largest whose `-1` quotient still fits a dense matrix.
pub fn torus_samples(rank: usize, requested: Option<usize>, resolution: usize) -> usize {
    if let Some(s) = requested {
        return s;
    }
    let mut s = resolution.max(1);
    while s > 1
        && s.checked_pow(rank as u32)
            .is_none_or(|n| n / 2 + 8 > DENSE_LIMIT)
    {
        s -= 1;
    }
    s
}

fn torus_quotient(torus: &FlatTorus, samples: usize) -> Result<FiniteMetricSpace> {
    let grid = TorusGrid::new(torus, samples)?;
    Ok(rescale_to_diameter_one(&grid.quotient_space()?)?)
}

/// The diameter-one metric space attached to `input`.
pub fn phi(
    input: &CollapseInput,
    resolution: usize,
    puncture_radius: f64,
) -> Result<FiniteMetricSpace> {
    input.check()?;
    let out = match input {
        CollapseInput::BoundaryLine { family, boundary } => {
            let mesh = mesh_metric(family, resolution, puncture_radius)?;
            let mut space = mesh
                .space
                .with_meta("raw_diameter", json!(mesh.raw_diameter));
            if let Some(b) = boundary {
                space = space.with_meta("boundary", serde_json::to_value(b).expect("plain data"));
            }
            space
        }
        CollapseInput::BoundaryPoint => segment_space(resolution)?,
        CollapseInput::KummerInterior { torus, samples }
        | CollapseInput::DeepStratumTorus { torus, samples } => {
            let s = torus_samples(torus.rank(), *samples, resolution);
            torus_quotient(torus, s)?
        }
    };
    Ok(out.with_meta("variant", json!(input.variant())))
}

fn check_path(path: &[CollapseInput]) -> Result<()> {
    if path.len() < 2 {
        return Err(CollapseError::Path(format!(
            "{} point(s), need at least 2",
            path.len()
        )));
    }
    let v = path[0].variant();
    if let Some(p) = path.iter().find(|p| p.variant() != v) {
        return Err(CollapseError::Path(format!(
            "mixes {v} with {}",
            p.variant()
        )));
    }
    Ok(())
}

fn step_distances(spaces: &[FiniteMetricSpace]) -> Result<Vec<f64>> {
    spaces
        .windows(2)
        .map(|w| {
            same_carrier_distance(&w[0], &w[1]).map_err(|e| match e {
                MetricError::CarrierMismatch(m) => CollapseError::Path(m),
                e => e.into(),
            })
        })
        .collect()
}

/// Same-carrier distances between the images of consecutive path points.
pub fn continuity_probe(
    path: &[CollapseInput],
    resolution: usize,
    puncture_radius: f64,
) -> Result<Vec<f64>> {
    check_path(path)?;
    let spaces = path
        .par_iter()
        .map(|p| phi(p, resolution, puncture_radius))
        .collect::<Result<Vec<_>>>()?;
    step_distances(&spaces)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Refinement {
    /// Distances along the path with half the parameter step.
    pub fine: Vec<f64>,
    /// Coarse steps `k` where a fine step `2k` or `2k + 1` is larger.
    pub violations: Vec<usize>,
    pub monotone: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    /// Path parameters of the coarse points.
    pub steps: Vec<f64>,
    pub distances: Vec<f64>,
    pub refinement: Option<Refinement>,
}

/// Probe of the straight path from `from` to `to` in `steps` steps, with the
/// refinement run on `2 * steps` steps. Coarse points are the even fine
/// points, so both runs share their evaluations.
pub fn interpolation_probe(
    from: &CollapseInput,
    to: &CollapseInput,
    steps: usize,
    resolution: usize,
    puncture_radius: f64,
) -> Result<ProbeReport> {
    if steps == 0 {
        return Err(CollapseError::Path("need at least one step".into()));
    }
    let fine_n = 2 * steps;
    let ts: Vec<f64> = (0..=fine_n).map(|k| k as f64 / fine_n as f64).collect();
    let inputs = ts
        .iter()
        .map(|&t| from.interpolate(to, t))
        .collect::<Result<Vec<_>>>()?;
    check_path(&inputs)?;
    let spaces = inputs
        .par_iter()
        .map(|p| phi(p, resolution, puncture_radius))
        .collect::<Result<Vec<_>>>()?;
    let fine = step_distances(&spaces)?;
    let coarse_spaces: Vec<FiniteMetricSpace> = spaces.iter().step_by(2).cloned().collect();
    let distances = step_distances(&coarse_spaces)?;
    let violations: Vec<usize> = (0..steps)
        .filter(|&k| fine[2 * k] > distances[k] || fine[2 * k + 1] > distances[k])
        .collect();
    Ok(ProbeReport {
        steps: ts.iter().step_by(2).copied().collect(),
        distances,
        refinement: Some(Refinement {
            fine,
            monotone: violations.is_empty(),
            violations,
        }),
    })
}

/// Family whose 24 discriminant zeros split into two clusters of twelve,
/// shrinking to `0` and `infinity` as `eps -> 0`.
pub fn two_cluster_family(eps: f64) -> Result<WeierstrassFamily> {
    let e4 = eps.powi(4);
    let e6 = eps.powi(6);
    let mut a = vec![0.0; 9];
    a[0] = -e4;
    a[4] = 1.0 + e4 * e4;
    a[8] = -e4;
    let mut b = vec![0.0; 13];
    b[0] = -e6;
    b[6] = 1.0 + e6 * e6;
    b[12] = -e6;
    Ok(WeierstrassFamily::from_real(&a, &b)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Type2Sample {
    pub eps: f64,
    pub raw_diameter: f64,
    pub gh_lower: f64,
    pub gh_upper: f64,
}

/// Gromov-Hausdorff bounds from the meshed sphere of `two_cluster_family(eps)`
/// to the unit segment, for each `eps`. Exploratory output only.
pub fn type2_limit_probe(
    eps: &[f64],
    resolution: usize,
    puncture_radius: f64,
    segment_samples: usize,
    gh: &GhOptions,
) -> Result<Vec<Type2Sample>> {
    let segment = segment_space(segment_samples)?;
    eps.iter()
        .map(|&e| {
            let mesh = mesh_metric(&two_cluster_family(e)?, resolution, puncture_radius)?;
            Ok(Type2Sample {
                eps: e,
                raw_diameter: mesh.raw_diameter,
                gh_lower: gh_lower(&mesh.space, &segment),
                gh_upper: gh_upper(&mesh.space, &segment, gh),
            })
        })
        .collect()
}

/// Convenience: the torus `diag(1, 1 + t)` path used for calibration.
pub fn diagonal_torus(t: f64) -> Result<FlatTorus> {
    Ok(FlatTorus::new(vec![vec![1.0, 0.0], vec![0.0, 1.0 + t]])?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weierstrass::singular_fibers;

    fn square4() -> FlatTorus {
        FlatTorus::identity(4).unwrap()
    }

    #[test]
    fn boundary_point_is_the_segment() {
        let m = phi(&CollapseInput::BoundaryPoint, 17, 1e-3).unwrap();
        assert_eq!(m.dist(), segment_space(17).unwrap().dist());
        assert_eq!(m.diameter(), 1.0);
    }

    #[test]
    fn folded_circle_is_a_segment() {
        let input = CollapseInput::DeepStratumTorus {
            torus: FlatTorus::identity(1).unwrap(),
            samples: Some(16),
        };
        let m = phi(&input, 0, 1e-3).unwrap();
        let seg = segment_space(9).unwrap();
        assert_eq!(m.n(), 9);
        for i in 0..9 {
            for j in 0..9 {
                assert!((m.d(i, j) - seg.d(i, j)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn kummer_has_diameter_one_and_matches_brute_force() {
        let input = CollapseInput::KummerInterior {
            torus: square4(),
            samples: Some(4),
        };
        let m = phi(&input, 0, 1e-3).unwrap();
        assert_eq!(m.diameter(), 1.0);
        // 16 half-period points plus pairs of the other 240 points
        assert_eq!(m.n(), 16 + 120);
        // square 4-torus mod -1: the largest distance is |(1/2,1/2,1/2,1/2)| = 1
        let grid = TorusGrid::new(&square4(), 4).unwrap();
        assert_eq!(grid.quotient_diameter(), 1.0);
    }

    #[test]
    fn rank_checks() {
        let bad = CollapseInput::KummerInterior {
            torus: FlatTorus::identity(2).unwrap(),
            samples: None,
        };
        assert!(matches!(phi(&bad, 8, 1e-3), Err(CollapseError::Input(_))));
        let bad = CollapseInput::DeepStratumTorus {
            torus: square4(),
            samples: None,
        };
        assert!(matches!(phi(&bad, 8, 1e-3), Err(CollapseError::Input(_))));
    }

    #[test]
    fn sample_caps() {
        assert_eq!(torus_samples(4, None, 150), 9);
        assert_eq!(torus_samples(1, None, 150), 150);
        assert_eq!(torus_samples(3, Some(5), 150), 5);
        for rank in 1..=4 {
            let s = torus_samples(rank, None, 1000);
            assert!(s.pow(rank as u32) / 2 + 8 <= DENSE_LIMIT);
        }
    }

    #[test]
    fn constant_path_is_zero() {
        let input = CollapseInput::DeepStratumTorus {
            torus: diagonal_torus(0.3).unwrap(),
            samples: Some(6),
        };
        let d = continuity_probe(&[input.clone(), input.clone(), input], 0, 1e-3).unwrap();
        assert_eq!(d, vec![0.0, 0.0]);
    }

    #[test]
    fn mixed_paths_rejected() {
        let a = CollapseInput::BoundaryPoint;
        let b = CollapseInput::DeepStratumTorus {
            torus: diagonal_torus(0.0).unwrap(),
            samples: None,
        };
        assert!(matches!(
            continuity_probe(&[a.clone(), b], 8, 1e-3),
            Err(CollapseError::Path(_))
        ));
        assert!(matches!(
            continuity_probe(&[a], 8, 1e-3),
            Err(CollapseError::Path(_))
        ));
    }

    #[test]
    fn torus_path_is_lipschitz_and_refines() {
        let from = CollapseInput::DeepStratumTorus {
            torus: diagonal_torus(0.0).unwrap(),
            samples: Some(8),
        };
        let to = CollapseInput::DeepStratumTorus {
            torus: diagonal_torus(1.0).unwrap(),
            samples: Some(8),
        };
        let report = interpolation_probe(&from, &to, 5, 0, 1e-3).unwrap();
        assert_eq!(report.steps.len(), 6);
        let r = report.refinement.unwrap();
        assert!(r.monotone, "{:?}", r.violations);
        let dt = 0.2;
        for d in &report.distances {
            assert!(*d > 0.0 && *d <= dt);
        }
    }

    #[test]
    fn two_cluster_family_is_a_k3() {
        let f = two_cluster_family(0.5).unwrap();
        let fibers = singular_fibers(&f).unwrap();
        assert_eq!(crate::weierstrass::euler_sum(&fibers), 24);
    }

    #[test]
    fn json_round_trip() {
        let input = CollapseInput::KummerInterior {
            torus: square4(),
            samples: Some(3),
        };
        let s = serde_json::to_string(&input).unwrap();
        assert!(s.contains("\"variant\":\"kummer_interior\""));
        assert_eq!(serde_json::from_str::<CollapseInput>(&s).unwrap(), input);
        let p: CollapseInput = serde_json::from_str(r#"{"variant":"boundary_point"}"#).unwrap();
        assert_eq!(p, CollapseInput::BoundaryPoint);
    }
}
