use std::f64::consts::PI;
use std::sync::Arc;

use crate::capacity::{
    cap1_convex, cheeger_constant, concentric_capacity, condenser_capacity, mazya_estimate, point_capacity,
    CondenserProblem,
};
use crate::discretize::{grad_p_integral, lp_integral, rasterize, GridField};
use crate::error::{PfkError, Result};
use crate::geometry::{unit_ball_volume, Domain, Shape};
use crate::spectral::{eigen_grid, eigen_radial_shoot, gamma_fn, EigenResult};

use super::{grid_corpus, radial_corpus, CheckContext, CheckReport, RadialFunction, Relation, VerifyConfig};

const SHOOT_TOL: f64 = 1e-10;
const NEAR_SHARP_RESOLUTION: usize = 256;
const NEAR_SHARP_WIDTH: f64 = 0.05;
/// Largest exponent `4 pi f^2` evaluated in the exponential functional.
const EXP_CAP: f64 = 700.0;

fn ball_radius(d: &Domain) -> Option<f64> {
    match d.shape() {
        Shape::Ball { radius, .. } => Some(*radius),
        _ => None,
    }
}

fn grid_eigen(d: &Domain, p: f64, cfg: &VerifyConfig) -> Result<EigenResult> {
    let m = rasterize(d, cfg.resolution)?;
    let r = eigen_grid(&m, p, &cfg.solver)?;
    if !r.converged {
        return Err(PfkError::NotConverged(format!(
            "grid eigenvalue on {} at p = {p} (residual {:.3e})",
            d.label(),
            r.residual
        )));
    }
    Ok(r)
}

/// Grid eigenpair for planar domains, shooting for balls in higher dimension.
fn own_eigen(d: &Domain, p: f64, cfg: &VerifyConfig) -> Result<EigenResult> {
    if d.dim() == 2 {
        grid_eigen(d, p, cfg)
    } else if let Some(r) = ball_radius(d) {
        eigen_radial_shoot(d.dim(), p, r, SHOOT_TOL)
    } else {
        Err(PfkError::UnsupportedDimension(d.dim()))
    }
}

/// Shooting for balls of any dimension, the grid solver for other planar domains.
pub fn principal_eigenvalue(d: &Domain, p: f64, cfg: &VerifyConfig) -> Result<EigenResult> {
    match ball_radius(d) {
        Some(r) => eigen_radial_shoot(d.dim(), p, r, SHOOT_TOL),
        None => own_eigen(d, p, cfg),
    }
}

/// Eigenvalues shared by the per-`(domain, p)` checks.
pub(crate) struct EigenPair {
    pub own: Result<EigenResult>,
    pub radial: Option<Result<EigenResult>>,
    pub star: Result<f64>,
    pub unit: Result<f64>,
}

impl EigenPair {
    pub fn compute(d: &Domain, p: f64, cfg: &VerifyConfig) -> Self {
        let n = d.dim();
        let w = unit_ball_volume(n);
        let star = w.and_then(|w| {
            let r = (d.volume() / w).powf(1.0 / n as f64);
            Ok(eigen_radial_shoot(n, p, r, SHOOT_TOL)?.lambda)
        });
        Self {
            own: own_eigen(d, p, cfg),
            radial: ball_radius(d).map(|r| eigen_radial_shoot(n, p, r, SHOOT_TOL)),
            star,
            unit: eigen_radial_shoot(n, p, 1.0, SHOOT_TOL).map(|e| e.lambda),
        }
    }
}

fn outcome(
    name: &str,
    reference: &str,
    relation: Relation,
    tol: f64,
    ctx: CheckContext,
    sides: Result<(f64, f64)>,
) -> CheckReport {
    match sides {
        Ok((lhs, rhs)) => CheckReport::evaluate(name, reference, lhs, rhs, relation, tol, ctx),
        Err(e) => CheckReport::errored(name, reference, relation, tol, ctx, &e),
    }
}

fn grid_ctx(d: &Domain, p: f64, cfg: &VerifyConfig) -> CheckContext {
    let ctx = CheckContext::new().domain(d.label()).n(d.dim()).p(p);
    if d.dim() == 2 {
        ctx.resolution(cfg.resolution)
    } else {
        ctx
    }
}

pub(crate) fn faber_krahn_with(d: &Domain, p: f64, pair: &EigenPair, cfg: &VerifyConfig) -> Vec<CheckReport> {
    let tol = cfg.tolerances.get("faber_krahn");
    let ctx = grid_ctx(d, p, cfg);
    let n = d.dim() as f64;
    let own = pair.own.as_ref().map(|e| e.lambda).map_err(Clone::clone);
    let plain = own.clone().and_then(|l| Ok((l, pair.star.clone()?)));
    let scaled = own.and_then(|l| {
        let w = unit_ball_volume(d.dim())?;
        Ok((l * d.volume().powf(p / n), pair.unit.clone()? * w.powf(p / n)))
    });
    vec![
        outcome("faber_krahn", "p-Faber-Krahn inequality", Relation::Ge, tol, ctx.clone(), plain),
        outcome(
            "faber_krahn_scaled",
            "scale-free p-Faber-Krahn inequality",
            Relation::Ge,
            tol,
            ctx,
            scaled,
        ),
    ]
}

/// `lambda_p(d) >= lambda_p(d*)` and `lambda_p(d) V^(p/n) >= lambda_p(B_1) w_n^(p/n)`.
pub fn check_faber_krahn(d: &Domain, p: f64, cfg: &VerifyConfig) -> Vec<CheckReport> {
    faber_krahn_with(d, p, &EigenPair::compute(d, p, cfg), cfg)
}

pub(crate) fn cheeger_bound_with(d: &Domain, p: f64, lambda: Result<f64>, cfg: &VerifyConfig) -> CheckReport {
    let tol = cfg.tolerances.get("cheeger_bound");
    let sides = cheeger_constant(d).and_then(|h| {
        if p == 1.0 {
            let l1 = match ball_radius(d) {
                Some(r) => d.dim() as f64 / r,
                None => h,
            };
            Ok((l1, h))
        } else {
            Ok((lambda?, p.powf(-p) * h.powf(p)))
        }
    });
    let ctx = if p == 1.0 {
        CheckContext::new().domain(d.label()).n(d.dim()).p(p)
    } else {
        grid_ctx(d, p, cfg)
    };
    outcome("cheeger_bound", "Cheeger lower bound", Relation::Ge, tol, ctx, sides)
}

/// `lambda_p >= (h/p)^p`; at `p = 1` the row compares `lambda_1` with `h`.
pub fn check_cheeger_bound(d: &Domain, p: f64, cfg: &VerifyConfig) -> CheckReport {
    let lambda = if p == 1.0 {
        Ok(f64::NAN)
    } else {
        own_eigen(d, p, cfg).map(|e| e.lambda)
    };
    cheeger_bound_with(d, p, lambda, cfg)
}

/// `lambda_p(B_1) >= n^(2-p) p^(p-1) (p-1)^(1-p)`.
pub fn check_bhattacharya(n: usize, p: f64, cfg: &VerifyConfig) -> CheckReport {
    let sides = eigen_radial_shoot(n, p, 1.0, SHOOT_TOL).map(|e| {
        let nf = n as f64;
        (e.lambda, nf.powf(2.0 - p) * p.powf(p - 1.0) * (p - 1.0).powf(1.0 - p))
    });
    outcome(
        "bhattacharya",
        "Bhattacharya lower bound for the ball",
        Relation::Ge,
        cfg.tolerances.get("bhattacharya"),
        CheckContext::new().domain(format!("ball(n={n},r=1)")).n(n).p(p),
        sides,
    )
}

pub(crate) fn mazya_with(d: &Domain, p: f64, pair: &EigenPair, cfg: &VerifyConfig) -> Vec<CheckReport> {
    let tol = cfg.tolerances.get("mazya");
    let reference = "Maz'ya capacity-volume sandwich";
    let eig = match &pair.radial {
        Some(r) => r,
        None => &pair.own,
    };
    let mut ctx = CheckContext::new().domain(d.label()).n(d.dim()).p(p);
    if pair.radial.is_none() {
        ctx = ctx.resolution(cfg.resolution);
    }
    let est = eig
        .as_ref()
        .map_err(Clone::clone)
        .and_then(|e| Ok((e.lambda, mazya_estimate(d, p, e, cfg.mazya_family)?)));
    match est {
        Ok((lambda, est)) => {
            let ctx = ctx.detail(format!("witness: {}; family size {}", est.witness, est.family_size));
            let width = p.powf(p) * (p - 1.0).powf(1.0 - p);
            vec![
                CheckReport::evaluate("mazya_lower", reference, est.gamma_upper, lambda, Relation::Ge, tol, ctx.clone()),
                CheckReport::evaluate("mazya_upper", reference, est.gamma_upper, width * lambda, Relation::Le, 0.0, ctx)
                    .reported(),
            ]
        }
        Err(e) => vec![
            CheckReport::errored("mazya_lower", reference, Relation::Ge, tol, ctx.clone(), &e),
            CheckReport::errored("mazya_upper", reference, Relation::Le, 0.0, ctx, &e).reported(),
        ],
    }
}

/// Asserted: `gamma_upper >= lambda_p`. Reported: `gamma_upper <= p^p (p-1)^(1-p) lambda_p`.
pub fn check_mazya_sandwich(d: &Domain, p: f64, cfg: &VerifyConfig) -> Vec<CheckReport> {
    mazya_with(d, p, &EigenPair::compute(d, p, cfg), cfg)
}

fn format_series(ps: &[f64], vs: &[f64]) -> String {
    ps.iter()
        .zip(vs)
        .map(|(p, v)| format!("p={p}: {v:.6}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn largest_step_ratio(vs: &[f64]) -> f64 {
    vs.windows(2).map(|w| w[1] / w[0]).fold(f64::NEG_INFINITY, f64::max)
}

/// `lambda_p` decreases along `p = 2, 1.5, 1.25, 1.1` and `lambda_1.1` is within
/// the tolerance of the Cheeger constant.
pub fn check_limit_p1(d: &Domain, cfg: &VerifyConfig) -> Vec<CheckReport> {
    let ps = [2.0, 1.5, 1.25, 1.1];
    let reference = "p -> 1 limit of the principal eigenvalue";
    let tol = cfg.tolerances.get("limit_p1");
    let values: Result<Vec<f64>> = ps.iter().map(|&p| Ok(principal_eigenvalue(d, p, cfg)?.lambda)).collect();
    let mut ctx = CheckContext::new().domain(d.label()).n(d.dim());
    if ball_radius(d).is_none() {
        ctx = ctx.resolution(cfg.resolution);
    }
    match values.and_then(|v| Ok((cheeger_constant(d)?, v))) {
        Ok((h, v)) => {
            let ctx = ctx.detail(format_series(&ps, &v));
            vec![
                CheckReport::evaluate("limit_p1_monotone", reference, largest_step_ratio(&v), 1.0, Relation::Le, 0.0, ctx.clone()),
                CheckReport::evaluate("limit_p1_cheeger", reference, v[3], h, Relation::Approx, tol, ctx.p(1.1)),
            ]
        }
        Err(e) => vec![
            CheckReport::errored("limit_p1_monotone", reference, Relation::Le, 0.0, ctx.clone(), &e),
            CheckReport::errored("limit_p1_cheeger", reference, Relation::Approx, tol, ctx, &e),
        ],
    }
}

/// `lambda_32^(1/32)` against `1/inradius`, and the geometric limit inequality
/// `lambda_p^(1/p) V^(1/n) >= w_n^(1/n)` at `p = 32`.
pub fn check_limit_pinf(d: &Domain, cfg: &VerifyConfig) -> Vec<CheckReport> {
    let ps = [4.0, 8.0, 16.0, 32.0];
    let reference = "p -> infinity limit of the principal eigenvalue";
    let tol = cfg.tolerances.get("limit_pinf");
    let tol_geo = cfg.tolerances.get("limit_pinf_geometric");
    let roots: Result<Vec<f64>> = ps
        .iter()
        .map(|&p| Ok(principal_eigenvalue(d, p, cfg)?.lambda.powf(1.0 / p)))
        .collect();
    let mut ctx = CheckContext::new().domain(d.label()).n(d.dim()).p(32.0);
    if ball_radius(d).is_none() {
        ctx = ctx.resolution(cfg.resolution);
    }
    match roots.and_then(|r| Ok((unit_ball_volume(d.dim())?, r))) {
        Ok((w, r)) => {
            let n = d.dim() as f64;
            let ctx = ctx.detail(format_series(&ps, &r));
            vec![
                CheckReport::evaluate("limit_pinf_inradius", reference, r[3], 1.0 / d.inradius(), Relation::Approx, tol, ctx.clone()),
                CheckReport::evaluate(
                    "limit_pinf_geometric",
                    "geometric limit inequality",
                    r[3] * d.volume().powf(1.0 / n),
                    w.powf(1.0 / n),
                    Relation::Ge,
                    tol_geo,
                    ctx,
                ),
            ]
        }
        Err(e) => vec![
            CheckReport::errored("limit_pinf_inradius", reference, Relation::Approx, tol, ctx.clone(), &e),
            CheckReport::errored("limit_pinf_geometric", "geometric limit inequality", Relation::Ge, tol_geo, ctx, &e),
        ],
    }
}

/// `integral |grad f| / ||f||_2` for a disk indicator mollified over the
/// radial band `[1 - width, 1]`.
pub fn mollified_disk_ratio(resolution: usize, width: f64) -> Result<f64> {
    let d = Domain::ball(2, 1.0)?;
    let m = Arc::new(rasterize(&d, resolution)?);
    let f = GridField::from_fn(m, |x| ((1.0 - x[0].hypot(x[1])) / width).clamp(0.0, 1.0))?;
    Ok(grad_p_integral(&f, 1.0)? / lp_integral(&f, 2.0)?.sqrt())
}

/// Sharp `p = 1` statements in the plane: `h V^(1/2)`, `cap_1 V^(-1/2)` and
/// `integral |grad f| / ||f||_2`, each at least `2 sqrt(pi)`, plus a near-equality probe.
pub fn check_sharp_p1_triad(corpus: &[(String, GridField)], d: &Domain, cfg: &VerifyConfig) -> Vec<CheckReport> {
    let tol = cfg.tolerances.get("sharp_p1");
    let sharp = 2.0 * PI.sqrt();
    let ctx = CheckContext::new().domain(d.label()).n(d.dim()).p(1.0);
    if d.dim() != 2 {
        let e = PfkError::UnsupportedDimension(d.dim());
        return vec![CheckReport::errored("sharp_p1_cheeger", "sharp 1-Faber-Krahn inequality", Relation::Ge, tol, ctx, &e)];
    }
    let v = d.volume();
    let mut out = vec![outcome(
        "sharp_p1_cheeger",
        "sharp 1-Faber-Krahn inequality",
        Relation::Ge,
        tol,
        ctx.clone(),
        cheeger_constant(d).map(|h| (h * v.sqrt(), sharp)),
    )];
    if d.is_convex() {
        out.push(outcome(
            "sharp_p1_capacity",
            "sharp isocapacitary inequality at p = 1",
            Relation::Ge,
            tol,
            ctx.clone(),
            cap1_convex(d).map(|c| (c / v.sqrt(), sharp)),
        ));
    }
    for (name, f) in corpus {
        let sides = grad_p_integral(f, 1.0).and_then(|g| Ok((g / lp_integral(f, 2.0)?.sqrt(), sharp)));
        out.push(outcome(
            "sharp_p1_sobolev",
            "sharp (1, 2)-Sobolev inequality",
            Relation::Ge,
            tol,
            ctx.clone().resolution(cfg.resolution).detail(format!("f = {name}")),
            sides,
        ));
    }
    out.push(outcome(
        "sharp_p1_near_sharp",
        "sharp (1, 2)-Sobolev inequality",
        Relation::Le,
        cfg.tolerances.get("sharp_p1_near_sharp"),
        CheckContext::new()
            .domain("ball(n=2,r=1)")
            .n(2)
            .p(1.0)
            .resolution(NEAR_SHARP_RESOLUTION)
            .detail(format!("mollified disk indicator, width {NEAR_SHARP_WIDTH}")),
        mollified_disk_ratio(NEAR_SHARP_RESOLUTION, NEAR_SHARP_WIDTH).map(|r| (r, sharp)),
    ));
    out
}

/// Sharp Sobolev constant
/// `n w_n^(p/n) ((n-p)/(p-1))^(p-1) (Gamma(n/p) Gamma(n+1-n/p) / Gamma(n))^(p/n)`, `1 < p < n`.
pub fn kappa3(p: f64, n: usize) -> Result<f64> {
    let nf = n as f64;
    if !(p > 1.0 && p < nf) {
        return Err(PfkError::InvalidExponent {
            p,
            reason: "the Sobolev constant needs 1 < p < n",
        });
    }
    let w = unit_ball_volume(n)?;
    let g = gamma_fn(nf / p)? * gamma_fn(nf + 1.0 - nf / p)? / gamma_fn(nf)?;
    Ok(nf * w.powf(p / nf) * ((nf - p) / (p - 1.0)).powf(p - 1.0) * g.powf(p / nf))
}

/// `kappa3(2, 3) = 3 (pi/2)^(4/3)` and the approach `kappa3(p, 2) -> 2 sqrt(pi)`
/// along `ps`, measured by the largest ratio of consecutive gaps.
pub fn check_kappa3(ps: &[f64], cfg: &VerifyConfig) -> Vec<CheckReport> {
    let reference = "best Sobolev constants";
    let tol = cfg.tolerances.get("kappa3_value");
    let value = outcome(
        "kappa3_value",
        reference,
        Relation::Approx,
        tol,
        CheckContext::new().n(3).p(2.0),
        kappa3(2.0, 3).map(|k| (k, 3.0 * (PI / 2.0).powf(4.0 / 3.0))),
    );
    let gaps: Result<Vec<f64>> = ps.iter().map(|&p| Ok((kappa3(p, 2)? - 2.0 * PI.sqrt()).abs())).collect();
    let ctx = CheckContext::new().n(2);
    let limit = match gaps {
        Ok(g) => CheckReport::evaluate(
            "kappa3_limit",
            reference,
            largest_step_ratio(&g),
            1.0,
            Relation::Le,
            0.0,
            ctx.detail(format!("gaps to 2 sqrt(pi): {}", format_series(ps, &g))),
        ),
        Err(e) => CheckReport::errored("kappa3_limit", reference, Relation::Le, 0.0, ctx, &e),
    };
    vec![value, limit]
}

/// Radial Sobolev quotients against `kappa3(p, n)` and the consequence
/// `lambda_p(B_1) w_n^(p/n) >= kappa3(p, n)`.
pub fn check_sobolev_p(corpus: &[RadialFunction], n: usize, p: f64, cfg: &VerifyConfig) -> Vec<CheckReport> {
    let tol = cfg.tolerances.get("sobolev");
    let reference = "sharp Sobolev inequality";
    let nf = n as f64;
    let ctx = CheckContext::new().n(n).p(p);
    let k = match kappa3(p, n) {
        Ok(k) => k,
        Err(e) => return vec![CheckReport::errored("sobolev_p", reference, Relation::Ge, tol, ctx, &e)],
    };
    let q = p * nf / (nf - p);
    let mut out = Vec::new();
    for f in corpus {
        let sides = if f.n != n {
            Err(PfkError::InvalidInput(format!("{} lives in dimension {}", f.label, f.n)))
        } else {
            f.grad_p_integral(p)
                .and_then(|g| Ok((g / f.lp_integral(q)?.powf((nf - p) / nf), k)))
        };
        let detail = format!("f = {}, R = {}", f.label, f.radius);
        out.push(outcome("sobolev_p", reference, Relation::Ge, tol, ctx.clone().detail(detail), sides));
    }
    let chain = eigen_radial_shoot(n, p, 1.0, SHOOT_TOL)
        .and_then(|e| Ok((e.lambda * unit_ball_volume(n)?.powf(p / nf), k)));
    out.push(outcome(
        "sobolev_p_chain",
        "Sobolev constant bounds the scale-free eigenvalue",
        Relation::Ge,
        tol,
        ctx.domain(format!("ball(n={n},r=1)")),
        chain,
    ));
    out
}

/// `V(B_rho)/V(B_R) = exp(-(n^n w_n / cap_n)^(1/(n-1)))` for concentric balls.
pub fn check_moser_concentric(n: usize, pairs: &[(f64, f64)], cfg: &VerifyConfig) -> Vec<CheckReport> {
    let tol = cfg.tolerances.get("moser_trudinger_identity");
    pairs
        .iter()
        .map(|&(rho, big_r)| {
            let sides = unit_ball_volume(n).and_then(|w| {
                let nf = n as f64;
                let cap = concentric_capacity(n, nf, rho, big_r)?;
                let rhs = (-(nf.powf(nf) * w / cap).powf(1.0 / (nf - 1.0))).exp();
                Ok(((rho / big_r).powf(nf), rhs))
            });
            outcome(
                "moser_trudinger_identity",
                "capacity-volume equality for concentric balls",
                Relation::Approx,
                tol,
                CheckContext::new().n(n).p(n as f64).detail(format!("rho = {rho}, R = {big_r}")),
                sides,
            )
        })
        .collect()
}

/// Planar exponential-integrability checks: the functional lower bound for each
/// corpus function, the capacity-volume inequality for grid condensers, and
/// the reported eigenvalue form.
pub fn check_moser_trudinger(d: &Domain, corpus: &[(String, GridField)], cfg: &VerifyConfig) -> Vec<CheckReport> {
    let tol = cfg.tolerances.get("moser_trudinger");
    let ctx = CheckContext::new().domain(d.label()).n(2).p(2.0).resolution(cfg.resolution);
    if d.dim() != 2 {
        let e = PfkError::UnsupportedDimension(d.dim());
        return vec![CheckReport::errored("moser_trudinger_functional", "Moser-Trudinger inequality", Relation::Ge, tol, ctx, &e)];
    }
    let mut out = Vec::new();
    let mut best: Option<f64> = None;
    for (name, f) in corpus {
        let sides = exp_functional(f);
        if let Ok((lhs, _)) = sides {
            best = Some(best.map_or(lhs, |b: f64| b.max(lhs)));
        }
        out.push(outcome(
            "moser_trudinger_functional",
            "Moser-Trudinger inequality",
            Relation::Ge,
            tol,
            ctx.clone().detail(format!("f = {name}")),
            sides,
        ));
    }
    let (centre, inr) = d.incenter_2d();
    let mut sets: Vec<(String, Result<Domain>)> = [0.3, 0.5, 0.7]
        .iter()
        .map(|&s| (format!("shrunken copy {s}"), d.shrunk(s)))
        .collect();
    for s in [0.3, 0.6] {
        sets.push((format!("incentre disk {s}"), Domain::ball_at(2, s * inr, centre.to_vec())));
    }
    for (label, k) in sets {
        let sides = k.and_then(|k| {
            let prob = CondenserProblem::from_domains(&k, d, 2.0, cfg.resolution)?;
            let cap = condenser_capacity(&prob, &cfg.solver)?.value;
            Ok((k.volume() / d.volume(), (-4.0 * PI / cap).exp()))
        });
        if matches!(sides, Err(PfkError::InvalidCondenser(_))) {
            continue;
        }
        out.push(outcome(
            "moser_trudinger_capacity",
            "capacity-volume inequality at p = n",
            Relation::Le,
            tol,
            ctx.clone().detail(label),
            sides,
        ));
    }
    let reported = own_eigen(d, 2.0, cfg).and_then(|e| {
        let b = best.ok_or_else(|| PfkError::InvalidInput("no admissible corpus function".into()))?;
        Ok((e.lambda * d.volume() * b / (4.0 * PI), 1.0))
    });
    out.push(
        outcome(
            "moser_trudinger_faber_krahn",
            "n-Faber-Krahn inequality from exponential integrability",
            Relation::Ge,
            0.0,
            ctx.detail("corpus supremum of the exponential functional"),
            reported,
        )
        .reported(),
    );
    out
}

/// `(V^(-1) int exp(4 pi g^2), 4 pi V^(-1) int g^2)` for `g = f / ||grad f||_2`.
fn exp_functional(f: &GridField) -> Result<(f64, f64)> {
    let e = grad_p_integral(f, 2.0)?;
    let g = if e > 0.0 { f.scaled(1.0 / e.sqrt()) } else { f.clone() };
    let peak = 4.0 * PI * g.max_abs().powi(2);
    if peak > EXP_CAP {
        return Err(PfkError::InvalidInput(format!(
            "amplitude cap exceeded: 4 pi max f^2 = {peak:.1} > {EXP_CAP}"
        )));
    }
    let m = g.mask();
    let cell = m.frame().cell_area();
    let v = m.area();
    let integral: f64 = m.cells().map(|k| (4.0 * PI * g.values()[k].powi(2)).exp()).sum::<f64>() * cell;
    Ok((integral / v, 4.0 * PI * lp_integral(&g, 2.0)? / v))
}

/// `E_{n,p}(d) = V^((p-n)/n) * cap_p(best point; d)`: closed form on balls,
/// extrapolated grid point capacity at the incentre otherwise.
pub fn point_constant(d: &Domain, p: f64, cfg: &VerifyConfig) -> Result<f64> {
    let n = d.dim() as f64;
    if !(p > n) {
        return Err(PfkError::InvalidExponent {
            p,
            reason: "points have positive capacity only for p > n",
        });
    }
    if ball_radius(d).is_some() {
        let w = unit_ball_volume(d.dim())?;
        return Ok(n * w.powf(p / n) * ((p - n) / (p - 1.0)).powf(p - 1.0));
    }
    let cap = point_capacity(d, p, cfg.resolution, &cfg.solver)?;
    Ok(d.volume().powf((p - n) / n) * cap.value)
}

/// Statements for `p > n`: eigenvalue, capacity and `(p, infinity)`-Sobolev
/// forms, each bounded below by `E_{n,p}(d)`.
pub fn check_p_gt_n(d: &Domain, p: f64, cfg: &VerifyConfig) -> Vec<CheckReport> {
    let tol = cfg.tolerances.get("p_gt_n");
    let n = d.dim();
    let nf = n as f64;
    let ctx = grid_ctx(d, p, cfg);
    let e_hat = match point_constant(d, p, cfg) {
        Ok(e) => e,
        Err(e) => {
            return vec![CheckReport::errored("p_gt_n_eigen", "(p, infinity)-Sobolev inequality", Relation::Ge, tol, ctx, &e)]
        }
    };
    let v = d.volume();
    let scale = v.powf((p - nf) / nf);
    let a = (p - nf) / (p - 1.0);
    let mut out = vec![outcome(
        "p_gt_n_eigen",
        "eigenvalue bound from the point capacity",
        Relation::Ge,
        tol,
        ctx.clone(),
        own_eigen(d, p, cfg).map(|e| (e.lambda * v.powf(p / nf), e_hat)),
    )];
    let cap_ref = "(p, (p-n)/n)-capacity-volume inequality";
    let sob_ref = "(p, infinity)-Sobolev inequality";
    if n == 2 {
        let (centre, inr) = d.incenter_2d();
        let mut sets: Vec<(String, Result<Domain>)> =
            [0.25, 0.5].iter().map(|&s| (format!("shrunken copy {s}"), d.shrunk(s))).collect();
        for s in [0.1, 0.3, 0.6] {
            sets.push((format!("incentre disk {s}"), Domain::ball_at(2, s * inr, centre.to_vec())));
        }
        for (label, k) in sets {
            let sides = k.and_then(|k| {
                let prob = CondenserProblem::from_domains(&k, d, p, cfg.resolution)?;
                Ok((condenser_capacity(&prob, &cfg.solver)?.value * scale, e_hat))
            });
            if matches!(sides, Err(PfkError::InvalidCondenser(_))) {
                continue;
            }
            out.push(outcome("p_gt_n_capacity", cap_ref, Relation::Ge, tol, ctx.clone().detail(label), sides));
        }
        let corpus = rasterize(d, cfg.resolution).map(Arc::new).and_then(|m| {
            let mut c = grid_corpus(d, &m)?;
            c.push(("capacity_profile".to_string(), RadialFunction::power(2, inr, a)?.to_grid(m, centre)?));
            Ok(c)
        });
        match corpus {
            Ok(c) => {
                for (name, f) in c {
                    let sides = grad_p_integral(&f, p).map(|g| (g / f.max_abs().powf(p) * scale, e_hat));
                    out.push(outcome("p_gt_n_sobolev", sob_ref, Relation::Ge, tol, ctx.clone().detail(format!("f = {name}")), sides));
                }
            }
            Err(e) => out.push(CheckReport::errored("p_gt_n_sobolev", sob_ref, Relation::Ge, tol, ctx, &e)),
        }
    } else if let Some(r) = ball_radius(d) {
        for s in [0.1, 0.3, 0.5, 0.7] {
            let sides = concentric_capacity(n, p, s * r, r).map(|c| (c * scale, e_hat));
            out.push(outcome("p_gt_n_capacity", cap_ref, Relation::Ge, tol, ctx.clone().detail(format!("concentric ball {s}")), sides));
        }
        let corpus = radial_corpus(n, r).and_then(|mut c| {
            c.push(RadialFunction::power(n, r, a)?);
            Ok(c)
        });
        match corpus {
            Ok(c) => {
                for f in c {
                    let sides = f.grad_p_integral(p).map(|g| (g / f.sup().powf(p) * scale, e_hat));
                    out.push(outcome("p_gt_n_sobolev", sob_ref, Relation::Ge, tol, ctx.clone().detail(format!("f = {}", f.label)), sides));
                }
            }
            Err(e) => out.push(CheckReport::errored("p_gt_n_sobolev", sob_ref, Relation::Ge, tol, ctx, &e)),
        }
    }
    out
}
