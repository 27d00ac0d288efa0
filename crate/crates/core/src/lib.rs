//! Desk-scale computations around collapsing K3 surfaces.
//!
//! * [`lattice`]: the K3 lattice, polarized lattices and isotropic boundary data.
//! * [`period_domain`]: period-domain membership and monodromy classification
//!   of one-parameter degenerations.
//! * [`weierstrass`]: elliptic K3 fibrations in Weierstrass form, singular
//!   fibers, fiber periods and the special Kähler metric on the base.
//! * [`metric`]: finite metric spaces, flat tori and their `-1` quotients,
//!   Gromov-Hausdorff bounds.
//! * [`collapse`]: the map from boundary data to diameter-one metric spaces
//!   and continuity probes along paths.
//! * [`cli`]: the `k3c` command line front end.

#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod collapse;
pub mod json;
pub mod lattice;
pub mod metric;
pub mod period_domain;
pub mod weierstrass;
