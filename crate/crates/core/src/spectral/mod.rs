//! Principal eigenvalue solvers and the special functions behind the
//! verification constants.

mod grid;
pub(crate) mod ode;
mod radial;
pub mod special;

pub use grid::eigen_grid;
pub use radial::eigen_radial_shoot;
pub use special::{bessel_j, bessel_zero, gamma_fn, ln_gamma};

use crate::discretize::GridField;
use crate::error::{PfkError, Result};

/// Samples of a radial profile `u(r)` on `[0, R]`, `u(0) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pub n: usize,
    pub r: Vec<f64>,
    pub u: Vec<f64>,
}

impl RadialProfile {
    /// Piecewise-linear interpolation; zero beyond the last sample.
    pub fn eval(&self, s: f64) -> f64 {
        let last = *self.r.last().expect("nonempty profile");
        if s >= last {
            return 0.0;
        }
        let k = self.r.partition_point(|&x| x <= s).max(1);
        let (r0, r1) = (self.r[k - 1], self.r[k]);
        let t = (s - r0) / (r1 - r0);
        self.u[k - 1] + t * (self.u[k] - self.u[k - 1])
    }

    pub fn radius(&self) -> f64 {
        *self.r.last().expect("nonempty profile")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Eigenfunction {
    Grid(GridField),
    Radial(RadialProfile),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    pub lambda: f64,
    pub eigenfunction: Eigenfunction,
    pub iterations: usize,
    /// Relative eigenvalue change (grid) or relative bracket width (radial) at exit.
    pub residual: f64,
    pub converged: bool,
    /// Rayleigh quotient of the returned eigenfunction.
    pub rayleigh_quotient: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Relative eigenvalue change that ends the outer iteration.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Relative objective decrease that ends an inner convex solve.
    pub inner_tolerance: f64,
    pub inner_max_iterations: usize,
    /// Random positive initial field instead of the constant one.
    pub seed: Option<u64>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-6,
            max_iterations: 500,
            inner_tolerance: 1e-12,
            inner_max_iterations: 100,
            seed: None,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) || !(self.inner_tolerance > 0.0) {
            return Err(PfkError::InvalidInput("solver tolerances must be positive".into()));
        }
        if self.max_iterations == 0 || self.inner_max_iterations == 0 {
            return Err(PfkError::InvalidInput("iteration caps must be at least 1".into()));
        }
        Ok(())
    }
}
