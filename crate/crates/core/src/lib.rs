//! Ground states of the discrete Kirchhoff–Choquard equation
//!
//! ```text
//! −(a + b∫|∇u|²) Δu + V u = (R_α ∗ F(u)) f(u)   on Z³
//! ```
//!
//! truncated to finite boxes: lattice primitives, the Green's function `R_α`,
//! the energy `J`, a Nehari-manifold minimizer and sampled checks of the
//! variational structure.

pub mod energy;
pub mod config;
pub mod error;
pub mod field_io;
pub mod kernel;
pub mod lattice;
pub mod nehari;
pub mod solver;
pub mod verify;

pub use energy::{EnergyModel, EnergyParts, Nonlinearity, PotentialSpec, PowerLaw, ProblemSpec};
pub use error::{Error, Result};
pub use kernel::{build_kernel, build_kernel_with, GreenKernel, KernelCache, KernelMethod};
pub use lattice::{BoundaryMode, Field, Index3, LatticeBox};
pub use nehari::{fiber_coefficients, nehari_scale, project_to_nehari, FiberCoefficients};
pub use solver::{solve_ground_state, InitialGuess, SolveConfig, SolveReport};
