use crate::discretize::{contour_measure, fitted_distance, rasterize};
use crate::error::{PfkError, Result};
use crate::geometry::{Domain, Shape};

const GENERIC_RESOLUTION: usize = 256;
const GENERIC_LEVELS: usize = 200;

/// Cheeger constant `h = inf A(boundary S)/V(S)` over subsets `S`.
///
/// Balls use `n/R`; convex planar domains solve `Area(inner parallel set at t) = pi t^2`
/// for `t` and return `1/t`; other planar domains take the best ratio over the
/// distance-function superlevel sets and the domain itself.
pub fn cheeger_constant(d: &Domain) -> Result<f64> {
    if let Shape::Ball { n, radius, .. } = d.shape() {
        return Ok(*n as f64 / radius);
    }
    if d.dim() != 2 {
        return Err(PfkError::UnsupportedDimension(d.dim()));
    }
    if d.is_convex() {
        convex_planar(d)
    } else {
        generic_planar(d)
    }
}

fn convex_planar(d: &Domain) -> Result<f64> {
    let g = |t: f64| -> Result<f64> { Ok(d.inner_parallel_area(t)? - std::f64::consts::PI * t * t) };
    let (mut lo, mut hi) = (0.0, d.inradius());
    let (glo, ghi) = (g(lo)?, g(hi)?);
    if !(glo > 0.0 && ghi < 0.0) {
        return Err(PfkError::Bracket {
            lo,
            hi,
            detail: format!("inner parallel area does not cross pi t^2 (values {glo}, {ghi})"),
        });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Ok(2.0 / (lo + hi))
}

fn generic_planar(d: &Domain) -> Result<f64> {
    let m = rasterize(d, GENERIC_RESOLUTION)?;
    let dist = fitted_distance(&m);
    let top = dist.iter().cloned().fold(0.0, f64::max);
    let mut best = d.perimeter() / d.volume();
    for k in 1..GENERIC_LEVELS {
        let t = top * k as f64 / GENERIC_LEVELS as f64;
        let (area, length) = contour_measure(m.frame(), &dist, t);
        if area > 0.0 && length > 0.0 {
            best = best.min(length / area);
        }
    }
    Ok(best)
}
