//! Spectral laboratory for the SU(2) spinor/quaternion generalizations of the
//! nonlinear Schrödinger equation.
//!
//! The crate evolves the scalar NLS baseline and two SU(2) systems on a
//! periodic grid, builds their Lax pairs and measures zero-curvature
//! residuals, applies the Hamiltonian/symplectic operators, and runs the
//! bi-normal curve flows that the systems describe geometrically.

pub mod algebra;
pub mod error;
pub mod geomflow;
pub mod grid;
pub mod initial;
pub mod integrator;
pub mod io;
pub mod laxpair;
pub mod systems;

pub use num_complex::Complex64 as C64;

pub use algebra::{
    AlgebraTag, Mat2, Quaternion, SmallMatrix, Spinor, SU2Generator,
};
pub use error::{QnlsError, Result};
pub use grid::{MeanPolicy, PeriodicGrid, SpinorField};
pub use integrator::{EvolutionConfig, Scheme, State, SystemSpec, Trajectory};
pub use laxpair::{LaxField, ZeroCurvatureReport};
pub use systems::{GaugeConstants, StateNls, StateSys1, StateSys2};
