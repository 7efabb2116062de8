use std::sync::Arc;

use serde::Serialize;

use crate::discretize::{distance_transform, fitted_distance, rasterize, rasterize_on, GridField, GridMask};
use crate::energy::{minimize, InnerSettings, Stencil};
use crate::error::{check_exponent, PfkError, Result};
use crate::geometry::Domain;
use crate::spectral::SolverOptions;

/// A condenser `(K, O)` on a common grid: the potential is 1 on the cells of
/// `inner` and 0 outside `outer`.
#[derive(Debug, Clone, PartialEq)]
pub struct CondenserProblem {
    inner: GridMask,
    outer: GridMask,
    p: f64,
}

impl CondenserProblem {
    /// Both masks must share a frame; every inner cell and its eight
    /// neighbours must lie inside `outer`.
    pub fn new(inner: GridMask, outer: GridMask, p: f64) -> Result<Self> {
        check_exponent(p, false)?;
        if !inner.same_frame(&outer) {
            return Err(PfkError::InvalidCondenser("inner and outer masks use different grids".into()));
        }
        if inner.is_empty() {
            return Err(PfkError::InvalidCondenser("inner set is empty".into()));
        }
        let fr = *outer.frame();
        for k in inner.cells() {
            let (i, j) = fr.coords(k);
            for dj in -1i64..=1 {
                for di in -1i64..=1 {
                    let (x, y) = (i as i64 + di, j as i64 + dj);
                    let ok = x >= 0
                        && y >= 0
                        && (x as usize) < fr.nx
                        && (y as usize) < fr.ny
                        && outer.is_inside(fr.index(x as usize, y as usize));
                    if !ok {
                        return Err(PfkError::InvalidCondenser(
                            "inner set must stay one cell layer inside the outer set".into(),
                        ));
                    }
                }
            }
        }
        Ok(Self { inner, outer, p })
    }

    /// Rasterize `outer` at `resolution` and `inner` on the same grid.
    pub fn from_domains(inner: &Domain, outer: &Domain, p: f64, resolution: usize) -> Result<Self> {
        let o = rasterize(outer, resolution)?;
        let k = rasterize_on(inner, *o.frame())?;
        Self::new(k, o, p)
    }

    pub fn inner(&self) -> &GridMask {
        &self.inner
    }

    pub fn outer(&self) -> &GridMask {
        &self.outer
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn with_p(&self, p: f64) -> Result<Self> {
        check_exponent(p, false)?;
        Ok(Self { p, ..self.clone() })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapacityResult {
    /// Minimal discrete energy `sum |grad f|^p h^2`.
    pub value: f64,
    pub potential: GridField,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimize the discrete p-energy over potentials equal to 1 on the inner
/// cells, 0 outside the outer cells and clamped to `[0, 1]`.
pub fn condenser_capacity(prob: &CondenserProblem, opts: &SolverOptions) -> Result<CapacityResult> {
    check_exponent(prob.p, true)?;
    opts.validate()?;
    let mut st = Stencil::from_mask(&prob.outer, prob.p);
    st.fix_inner(&prob.inner);
    let n = st.frame.len();

    // initial guess: harmonic-like blend of the distances to both boundaries
    let to_outer = fitted_distance(&prob.outer);
    let complement: Vec<bool> = prob.inner.inside().iter().map(|&b| !b).collect();
    let to_inner = distance_transform(&GridMask::from_cells(*prob.inner.frame(), complement)?).into_values();
    let mut v: Vec<f64> = (0..n)
        .map(|k| {
            if prob.inner.is_inside(k) {
                1.0
            } else if !prob.outer.is_inside(k) {
                0.0
            } else {
                to_outer[k] / (to_outer[k] + to_inner[k])
            }
        })
        .collect();
    let rhs = vec![0.0; n];
    let outcome = minimize(
        &st,
        &rhs,
        &mut v,
        InnerSettings {
            tolerance: opts.inner_tolerance,
            max_iterations: opts.inner_max_iterations.max(opts.max_iterations),
            lower: 0.0,
            upper: 1.0,
        },
    );
    let value = st.energy(&v);
    for k in 0..n {
        if !prob.outer.is_inside(k) {
            v[k] = 0.0;
        }
    }
    Ok(CapacityResult {
        value,
        potential: GridField::from_parts_unchecked(Arc::new(prob.outer.clone()), v),
        iterations: outcome.iterations,
        converged: outcome.converged,
    })
}

/// Capacity of a point relative to a planar domain, `p > 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointCapacity {
    /// Extrapolated to zero cell size.
    pub value: f64,
    /// Single-cell capacity at the coarse and fine resolutions.
    pub coarse: f64,
    pub fine: f64,
    pub converged: bool,
}

/// Capacity of the incentre relative to `d`, from single-cell condensers at
/// `resolution` and `2 * resolution`.
///
/// A single fixed cell acts like a disk of radius `c h`, for which
/// `cap^(-1/(p-1))` is affine in `h^a`, `a = (p-2)/(p-1)`; the two solves are
/// combined to remove that term.
pub fn point_capacity(d: &Domain, p: f64, resolution: usize, opts: &SolverOptions) -> Result<PointCapacity> {
    check_exponent(p, true)?;
    if d.dim() != 2 {
        return Err(PfkError::UnsupportedDimension(d.dim()));
    }
    if p <= 2.0 {
        return Err(PfkError::InvalidExponent {
            p,
            reason: "points have zero capacity unless p exceeds the dimension",
        });
    }
    let (centre, _) = d.incenter_2d();
    let single = |res: usize| -> Result<(f64, f64, bool)> {
        let outer = rasterize(d, res)?;
        let fr = *outer.frame();
        let k = outer
            .cells()
            .min_by(|&a, &b| {
                let (ca, cb) = (fr.center_of(a), fr.center_of(b));
                let da = (ca[0] - centre[0]).hypot(ca[1] - centre[1]);
                let db = (cb[0] - centre[0]).hypot(cb[1] - centre[1]);
                da.total_cmp(&db)
            })
            .ok_or(PfkError::ResolutionTooCoarse(res))?;
        let mut cells = vec![false; fr.len()];
        cells[k] = true;
        let prob = CondenserProblem::new(GridMask::from_cells(fr, cells)?, outer, p)?;
        let r = condenser_capacity(&prob, opts)?;
        Ok((r.value, fr.h, r.converged))
    };
    let (c1, h1, ok1) = single(resolution)?;
    let (c2, h2, ok2) = single(2 * resolution)?;
    let a = (p - 2.0) / (p - 1.0);
    let g = |c: f64| c.powf(-1.0 / (p - 1.0));
    let (w1, w2) = (h1.powf(a), h2.powf(a));
    let g0 = (g(c2) * w1 - g(c1) * w2) / (w1 - w2);
    if !(g0 > 0.0) {
        return Err(PfkError::NotConverged("point capacity extrapolation left the admissible range".into()));
    }
    Ok(PointCapacity {
        value: g0.powf(-(p - 1.0)),
        coarse: c1,
        fine: c2,
        converged: ok1 && ok2,
    })
}
