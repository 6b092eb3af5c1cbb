//! Finite-volume solver for the mildly compressible Euler equations of a
//! dry atmosphere on a uniform 2D grid, stabilised by an evolve-filter-relax
//! step. Everything numerical is generic over [`scalar::Real`] (`f32` or
//! `f64`); the aliases below fix it to `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod driver;
pub mod error;
pub mod evolve;
pub mod filter;
pub mod linalg;
pub mod mesh;
pub mod relax;
pub mod scalar;
pub mod thermo;

pub use error::{Error, Result};

pub type Grid = mesh::Grid<f64>;
pub type FaceField = mesh::FaceField<f64>;
pub type VectorField = mesh::VectorField<f64>;
pub type BoundarySpec = mesh::BoundarySpec<f64>;
pub type Constants = thermo::Constants<f64>;
pub type State = thermo::State<f64>;
pub type SparseOperator = linalg::SparseOperator<f64>;
pub type SolverConfig = linalg::SolverConfig<f64>;
pub type Evolver = evolve::Evolver<f64>;
pub type IntermediateState = evolve::IntermediateState<f64>;
pub type FilterConfig = filter::FilterConfig<f64>;
pub type IndicatorField = filter::IndicatorField<f64>;
pub type RelaxParams = relax::RelaxParams<f64>;
pub type BenchmarkSpec = bench::BenchmarkSpec<f64>;
pub type Simulation = driver::Simulation<f64>;
