//! Random dyadic lattices on finite metric spaces.
//!
//! The crate builds nested random grids and the cube structure they induce,
//! enumerates proper colorings exactly, classifies good and bad cubes, and
//! estimates the probabilities the construction is designed to control.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod coloring;
pub mod error;
pub mod goodness;
pub mod grid;
pub mod lattice;
pub mod measures;
pub mod metric;
pub mod stats;

pub use coloring::{Fraction, ProperColoring};
pub use error::{Error, Result};
pub use goodness::{GoodnessParams, LatticeSampler};
pub use grid::{Grid, GridHierarchy, GridSampler, HierarchyOptions, SamplingMode};
pub use lattice::{Cube, CubeAtlas, CubeLevel, LatticeForest};
pub use measures::WeightedMeasure;
pub use metric::{BallMode, FiniteMetricSpace, SpaceKind};
