//! Heater placement and pipe-network design for orchard frost protection.
//!
//! `k` hot-air heaters are placed on a discrete grid of candidate sites and
//! connected by a minimum-length pipe tree. The placement trades pipe length
//! against robust heat-coverage violations at check points, with every
//! heater's output known only up to an interval factor.
//!
//! The crate is organised bottom-up:
//!
//! * [`instance`]: orchard geometry, grid generation and the heat-influence model.
//! * [`graph`]: weighted graphs over candidate sites, Kruskal MST, k-tree checks.
//! * [`milp`]: a solver-agnostic MILP representation plus the k-MST and
//!   robust-coverage formulation.
//! * [`solver`]: a built-in branch-and-bound solver (dense bounded dual
//!   simplex underneath), MPS export/import and solution files.
//! * [`heuristic`]: the equal-area partition + Kruskal baseline.
//! * [`evaluation`]: design plans, violation analysis, Pareto sweeps and the
//!   exhaustive oracle.
//! * [`layout`]: end-to-end optimisation of an instance.
//! * [`render`]: deterministic SVG output.

pub mod error;
pub mod evaluation;
pub mod geometry;
pub mod graph;
pub mod heuristic;
pub mod instance;
pub mod layout;
pub mod milp;
pub mod plan_file;
pub mod render;
pub mod solver;

pub use error::{Error, Result};
pub use evaluation::{DesignPlan, ParetoRecord, Provenance};
pub use geometry::Point2D;
pub use instance::{GridParams, OrchardInstance};
