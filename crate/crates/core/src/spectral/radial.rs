//! Radial shooting for the principal eigenvalue of a ball.

use crate::error::{check_exponent, PfkError, Result};

use super::ode::{integrate, OdeSettings};
use super::{EigenResult, Eigenfunction, RadialProfile};

/// Radial eigenproblem state: `[u, w, int |u'|^p r^(n-1), int |u|^p r^(n-1)]`
/// with `w = |u'|^(p-2) u'`.
type State = [f64; 4];

struct Shooter {
    n: f64,
    p: f64,
    radius: f64,
    eps: f64,
}

enum Outcome {
    /// `u` reached zero before the boundary.
    Overshoot,
    /// `u` stayed positive on the whole interval.
    Undershoot,
}

impl Shooter {
    fn rhs(&self, lambda: f64, r: f64, y: &State) -> State {
        let (n, p) = (self.n, self.p);
        let du = y[1].signum() * y[1].abs().powf(1.0 / (p - 1.0));
        let up = y[0].abs().powf(p - 2.0) * y[0];
        let dw = -(n - 1.0) * y[1] / r - lambda * up;
        let rn = r.powf(n - 1.0);
        [du, dw, du.abs().powf(p) * rn, y[0].abs().powf(p) * rn]
    }

    /// Two-term series at `r = eps` for `u(0) = 1`, `u'(0) = 0`.
    fn start(&self, lambda: f64) -> State {
        let (n, p, e) = (self.n, self.p, self.eps);
        let q = p / (p - 1.0);
        let c = (lambda / n).powf(1.0 / (p - 1.0));
        let u = 1.0 - (p - 1.0) / p * c * e.powf(q);
        let w = -lambda * e / n;
        let grad = c.powf(p) * e.powf(q + n) / (q + n);
        let mass = e.powf(n) / n;
        [u, w, grad, mass]
    }

    fn settings(&self) -> OdeSettings {
        OdeSettings {
            rtol: 1e-12,
            atol: 1e-15,
            initial_step: self.eps,
            max_steps: 2_000_000,
        }
    }

    fn shoot(&self, lambda: f64) -> Result<Outcome> {
        let mut crossed = false;
        let (_, end) = integrate(
            |r, y| self.rhs(lambda, r, y),
            self.eps,
            self.start(lambda),
            self.radius,
            self.settings(),
            |_, y| {
                crossed = y[0] <= 0.0;
                !crossed
            },
        )?;
        Ok(if crossed || end[0] <= 0.0 {
            Outcome::Overshoot
        } else {
            Outcome::Undershoot
        })
    }

    fn profile(&self, lambda: f64) -> Result<(RadialProfile, State)> {
        let mut r = vec![0.0];
        let mut u = vec![1.0];
        let (_, end) = integrate(
            |s, y| self.rhs(lambda, s, y),
            self.eps,
            self.start(lambda),
            self.radius,
            self.settings(),
            |s, y| {
                r.push(s);
                u.push(y[0].max(0.0));
                true
            },
        )?;
        Ok((
            RadialProfile {
                n: self.n as usize,
                r,
                u,
            },
            end,
        ))
    }
}

/// Lower bound `n^(2-p) p^(p-1) (p-1)^(1-p) R^(-p)` for the ball eigenvalue.
fn ball_lower_bound(n: f64, p: f64, radius: f64) -> f64 {
    n.powf(2.0 - p) * p.powf(p - 1.0) * (p - 1.0).powf(1.0 - p) * radius.powf(-p)
}

/// Principal eigenvalue of the ball `B_R` in `R^n` by shooting on `lambda`.
///
/// `tol` bounds the final bracket width; bisection continues to near machine
/// precision regardless, so the returned profile's Rayleigh quotient matches
/// `lambda` closely.
pub fn eigen_radial_shoot(n: usize, p: f64, radius: f64, tol: f64) -> Result<EigenResult> {
    if n < 2 {
        return Err(PfkError::InvalidDimension(n as i64));
    }
    check_exponent(p, true)?;
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(PfkError::InvalidDomain(format!("radius must be positive, got {radius}")));
    }
    if !(tol > 0.0) {
        return Err(PfkError::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    let sh = Shooter {
        n: n as f64,
        p,
        radius,
        eps: 1e-6 * radius,
    };
    let mut lo = 0.5 * ball_lower_bound(n as f64, p, radius);
    let mut hi = 2.0 * lo;
    if matches!(sh.shoot(lo)?, Outcome::Overshoot) {
        return Err(PfkError::Bracket {
            lo,
            hi,
            detail: "lower bracket end already overshoots".into(),
        });
    }
    let mut expansions = 0;
    while !matches!(sh.shoot(hi)?, Outcome::Overshoot) {
        lo = hi;
        hi *= 4.0;
        expansions += 1;
        if expansions > 200 || !hi.is_finite() {
            return Err(PfkError::Bracket {
                lo,
                hi,
                detail: "no overshoot found while expanding".into(),
            });
        }
    }
    let mut iterations = 0;
    let target = tol.min(1e-13 * hi);
    while hi - lo > target && iterations < 200 {
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match sh.shoot(mid)? {
            Outcome::Overshoot => hi = mid,
            Outcome::Undershoot => lo = mid,
        }
    }
    let lambda = 0.5 * (lo + hi);
    let (profile, end) = sh.profile(lo)?;
    let rayleigh = end[2] / end[3];
    Ok(EigenResult {
        lambda,
        eigenfunction: Eigenfunction::Radial(profile),
        iterations,
        residual: (hi - lo) / lambda,
        converged: hi - lo <= tol,
        rayleigh_quotient: rayleigh,
    })
}
