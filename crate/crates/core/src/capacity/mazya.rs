use rayon::prelude::*;
use serde::Serialize;

use crate::capacity::{concentric_capacity, condenser_capacity, CondenserProblem};
use crate::discretize::{rasterize_on, superlevel_mask, GridField, GridMask};
use crate::error::{check_exponent, PfkError, Result};
use crate::geometry::{unit_ball_volume, Domain, Shape};
use crate::spectral::{EigenResult, Eigenfunction, RadialProfile, SolverOptions};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MazyaCandidate {
    pub description: String,
    pub capacity: f64,
    pub volume: f64,
    pub ratio: f64,
}

/// Upper estimate of `gamma_p = inf cap_p(closure S; domain) / V(S)` over a
/// finite candidate family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MazyaEstimate {
    pub gamma_upper: f64,
    pub witness: String,
    pub family_size: usize,
    pub candidates: Vec<MazyaCandidate>,
}

/// Candidates are the eigenfunction superlevel sets at `family_size` quantile
/// thresholds and `family_size` shrunken copies of `d`. Candidates that are
/// empty or touch the boundary layer are skipped. A radial eigenfunction on a
/// ball uses concentric balls with closed-form capacities.
pub fn mazya_estimate(d: &Domain, p: f64, eig: &EigenResult, family_size: usize) -> Result<MazyaEstimate> {
    check_exponent(p, true)?;
    if family_size == 0 {
        return Err(PfkError::InvalidInput("family size must be at least 1".into()));
    }
    let candidates = match &eig.eigenfunction {
        Eigenfunction::Radial(profile) => radial_family(d, p, profile, family_size)?,
        Eigenfunction::Grid(field) => grid_family(d, p, field, family_size)?,
    };
    let best = candidates
        .iter()
        .min_by(|a, b| a.ratio.total_cmp(&b.ratio))
        .ok_or_else(|| PfkError::NotConverged("no admissible candidate set".into()))?;
    Ok(MazyaEstimate {
        gamma_upper: best.ratio,
        witness: best.description.clone(),
        family_size: candidates.len(),
        candidates: candidates.clone(),
    })
}

fn fractions(k: usize) -> impl Iterator<Item = f64> {
    (1..=k).map(move |i| i as f64 / (k + 1) as f64)
}

fn radial_family(d: &Domain, p: f64, profile: &RadialProfile, k: usize) -> Result<Vec<MazyaCandidate>> {
    let Shape::Ball { n, radius, .. } = d.shape() else {
        return Err(PfkError::InvalidInput(format!(
            "radial eigenfunction given for {}",
            d.label()
        )));
    };
    let (n, big_r) = (*n, *radius);
    let w = unit_ball_volume(n)?;
    let top = profile.u.iter().cloned().fold(0.0, f64::max);
    let mut family = Vec::with_capacity(2 * k);
    let mut push = |rho: f64, description: String| -> Result<()> {
        if !(rho > 0.0 && rho < big_r) {
            return Ok(());
        }
        let capacity = concentric_capacity(n, p, rho, big_r)?;
        let volume = w * rho.powi(n as i32);
        family.push(MazyaCandidate {
            description,
            capacity,
            volume,
            ratio: capacity / volume,
        });
        Ok(())
    };
    for q in fractions(k) {
        let t = q * top;
        // the profile decreases, so {u >= t} is the ball up to the last sample above t
        let idx = profile.u.iter().rposition(|&u| u >= t).unwrap_or(0);
        let rho = profile.r[idx];
        push(rho, format!("superlevel set u >= {t:.6} (ball of radius {rho:.6})"))?;
    }
    for s in fractions(k) {
        push(s * big_r, format!("concentric copy scaled by {s:.6}"))?;
    }
    Ok(family)
}

fn grid_family(d: &Domain, p: f64, field: &GridField, k: usize) -> Result<Vec<MazyaCandidate>> {
    let outer = field.mask().clone();
    let mut sorted: Vec<f64> = field
        .mask()
        .cells()
        .map(|c| field.values()[c].abs())
        .collect();
    sorted.sort_by(f64::total_cmp);
    let mut jobs: Vec<(GridMask, Option<f64>, String)> = Vec::with_capacity(2 * k);
    for q in fractions(k) {
        let t = sorted[((q * sorted.len() as f64) as usize).min(sorted.len() - 1)];
        if t <= 0.0 {
            continue;
        }
        let m = superlevel_mask(field, t)?;
        jobs.push((m, None, format!("superlevel set |u| >= {t:.6} (quantile {q:.4})")));
    }
    for s in fractions(k) {
        let copy = d.shrunk(s)?;
        let m = rasterize_on(&copy, *outer.frame())?;
        jobs.push((m, Some(copy.volume()), format!("shrunken copy scaled by {s:.6}")));
    }
    let opts = SolverOptions::default();
    let results: Vec<Option<MazyaCandidate>> = jobs
        .into_par_iter()
        .map(|(inner, exact_volume, description)| -> Result<Option<MazyaCandidate>> {
            if inner.is_empty() {
                return Ok(None);
            }
            let volume = exact_volume.unwrap_or_else(|| inner.area());
            let prob = match CondenserProblem::new(inner, outer.clone(), p) {
                Ok(prob) => prob,
                Err(PfkError::InvalidCondenser(_)) => return Ok(None),
                Err(e) => return Err(e),
            };
            let capacity = condenser_capacity(&prob, &opts)?.value;
            Ok(Some(MazyaCandidate {
                description,
                capacity,
                volume,
                ratio: capacity / volume,
            }))
        })
        .collect::<Result<_>>()?;
    Ok(results.into_iter().flatten().collect())
}
