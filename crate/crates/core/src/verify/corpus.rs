use std::sync::Arc;

use crate::discretize::{fitted_distance, GridField, GridMask};
use crate::error::{PfkError, Result};
use crate::geometry::Domain;

use super::RadialFunction;

/// Test functions on a planar mask of `d`: the boundary distance and radial
/// profiles centred at (or near) the incentre. Profiles with an empty
/// support on the mask are dropped.
pub fn grid_corpus(d: &Domain, mask: &Arc<GridMask>) -> Result<Vec<(String, GridField)>> {
    if d.dim() != 2 {
        return Err(PfkError::UnsupportedDimension(d.dim()));
    }
    let (c, inradius) = d.incenter_2d();
    let rho = 0.9 * inradius;
    let mut out = Vec::new();
    let dist = fitted_distance(mask);
    out.push(("distance".to_string(), GridField::new(mask.clone(), dist)?));
    let profiles = [
        (RadialFunction::tent(2, rho)?, c),
        (RadialFunction::bump(2, rho)?, c),
        (RadialFunction::gaussian(2, rho)?, c),
        (RadialFunction::tent(2, 0.6 * rho)?, [c[0] + 0.3 * rho, c[1]]),
    ];
    for (k, (f, centre)) in profiles.iter().enumerate() {
        let field = f.to_grid(mask.clone(), *centre)?;
        if field.max_abs() > 0.0 {
            let name = if k == 3 { "offset_tent".to_string() } else { f.label.clone() };
            out.push((name, field));
        }
    }
    Ok(out)
}

/// Decreasing radial test functions on `B_R` in `R^n`.
pub fn radial_corpus(n: usize, radius: f64) -> Result<Vec<RadialFunction>> {
    Ok(vec![
        RadialFunction::tent(n, radius)?,
        RadialFunction::bump(n, radius)?,
        RadialFunction::gaussian(n, radius)?,
        RadialFunction::power(n, radius, 0.5)?,
        RadialFunction::talenti(n, radius)?,
    ])
}
