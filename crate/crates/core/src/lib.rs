//! Principal p-Laplacian eigenvalues, p-capacities, Cheeger and Maz'ya
//! constants on planar grids and radially symmetric balls, together with a
//! harness that checks the classical isoperimetric-type inequalities linking
//! them.

pub mod capacity;
pub mod discretize;
mod energy;
pub mod error;
pub mod geometry;
pub mod spectral;
pub mod verify;

pub use error::{PfkError, Result};
pub use geometry::Domain;
