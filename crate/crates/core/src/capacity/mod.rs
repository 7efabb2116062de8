//! Variational p-capacities, the Cheeger constant and the Maz'ya constant.

mod cheeger;
mod condenser;
mod mazya;

pub use cheeger::cheeger_constant;
pub use condenser::{condenser_capacity, point_capacity, CapacityResult, CondenserProblem, PointCapacity};
pub use mazya::{mazya_estimate, MazyaCandidate, MazyaEstimate};

use serde::Serialize;

use crate::error::{check_exponent, PfkError, Result};
use crate::geometry::{unit_sphere_area, Domain};

/// Which closed form a ball capacity came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BallCapacityCase {
    /// `1 <= p < n`: the closed ball relative to the whole space.
    WholeSpace,
    /// `p = n`: the whole-space capacity vanishes.
    Critical,
    /// `p > n`: the centre point relative to the open ball.
    PointInBall,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BallCapacity {
    pub value: f64,
    pub case: BallCapacityCase,
}

/// `(p-1)^(p-1)`-style power with the convention `0^0 = 1` at `p = 1`.
fn pow_pm1(x: f64, p: f64) -> f64 {
    if p == 1.0 {
        1.0
    } else {
        x.powf(p - 1.0)
    }
}

/// Closed-form capacities attached to the ball `B_r` in `R^n`:
/// `n w_n |(n-p)/(p-1)|^(p-1) r^(n-p)` for `p != n`, zero for `p = n`.
pub fn ball_capacity(n: usize, p: f64, r: f64) -> Result<BallCapacity> {
    if n < 2 {
        return Err(PfkError::InvalidDimension(n as i64));
    }
    check_exponent(p, false)?;
    if !(r > 0.0) || !r.is_finite() {
        return Err(PfkError::InvalidInput(format!("radius must be positive, got {r}")));
    }
    let nf = n as f64;
    let area = unit_sphere_area(n)?;
    if p == nf {
        return Ok(BallCapacity {
            value: 0.0,
            case: BallCapacityCase::Critical,
        });
    }
    let ratio = if p == 1.0 { 1.0 } else { ((nf - p) / (p - 1.0)).abs() };
    let value = area * pow_pm1(ratio, p) * r.powf(nf - p);
    let case = if p < nf {
        BallCapacityCase::WholeSpace
    } else {
        BallCapacityCase::PointInBall
    };
    Ok(BallCapacity { value, case })
}

/// `cap_p(closed B_rho; B_R)` for concentric balls, `0 < rho < R`.
///
/// `n w_n |(p-n)/(p-1)|^(p-1) / |R^a - rho^a|^(p-1)` with `a = (p-n)/(p-1)`;
/// `n w_n / ln(R/rho)^(n-1)` at `p = n`; the sphere area `n w_n rho^(n-1)` at `p = 1`.
pub fn concentric_capacity(n: usize, p: f64, rho: f64, big_r: f64) -> Result<f64> {
    if n < 2 {
        return Err(PfkError::InvalidDimension(n as i64));
    }
    check_exponent(p, false)?;
    if !(rho > 0.0 && rho < big_r && big_r.is_finite()) {
        return Err(PfkError::InvalidCondenser(format!(
            "concentric balls need 0 < rho < R, got rho = {rho}, R = {big_r}"
        )));
    }
    let nf = n as f64;
    let area = unit_sphere_area(n)?;
    if p == 1.0 {
        return Ok(area * rho.powf(nf - 1.0));
    }
    if p == nf {
        return Ok(area / (big_r / rho).ln().powf(nf - 1.0));
    }
    let a = (p - nf) / (p - 1.0);
    let num = (a.abs()).powf(p - 1.0);
    let den = (big_r.powf(a) - rho.powf(a)).abs().powf(p - 1.0);
    Ok(area * num / den)
}

/// `cap_1(K; R^n)` for convex `K`, i.e. its perimeter.
pub fn cap1_convex(k: &Domain) -> Result<f64> {
    if !k.is_convex() {
        return Err(PfkError::Unsupported(format!(
            "cap_1 closed form needs a convex set, got {}",
            k.label()
        )));
    }
    Ok(k.perimeter())
}
