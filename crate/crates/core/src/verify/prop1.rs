use serde::Serialize;

use crate::capacity::{ball_capacity, concentric_capacity, condenser_capacity, CondenserProblem};
use crate::discretize::{grad_p_integral, superlevel_mask, GridField, GridMask};
use crate::error::{check_exponent, PfkError, Result};
use crate::geometry::{unit_ball_volume, Domain, Shape};
use crate::spectral::eigen_radial_shoot;

use super::{CheckContext, CheckReport, RadialFunction, Relation, VerifyConfig};

/// Which capacitary upper bound for `lambda_p` of the symmetrized domain applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Prop1Case {
    P1,
    PIn1n,
    Pn,
    PGtN,
}

impl Prop1Case {
    pub fn for_exponent(n: usize, p: f64) -> Result<Self> {
        check_exponent(p, false)?;
        let nf = n as f64;
        Ok(if p == 1.0 {
            Prop1Case::P1
        } else if p < nf {
            Prop1Case::PIn1n
        } else if p == nf {
            Prop1Case::Pn
        } else {
            Prop1Case::PGtN
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Prop1Case::P1 => "p1",
            Prop1Case::PIn1n => "p_in_1n",
            Prop1Case::Pn => "pn",
            Prop1Case::PGtN => "p_gt_n",
        }
    }
}

#[derive(Debug, Clone)]
pub enum TestFunction {
    Grid(GridField),
    Radial(RadialFunction),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prop1Bound {
    pub case: Prop1Case,
    /// Bound with `levels` quadrature nodes.
    pub bound: f64,
    /// Bound with `2 * levels` nodes.
    pub refined: f64,
    /// `lambda_p` of the equal-volume ball.
    pub lambda_star: f64,
    pub levels: usize,
}

struct Setup {
    n: usize,
    p: f64,
    w: f64,
    r_star: f64,
}

impl Setup {
    fn constant(&self, case: Prop1Case) -> f64 {
        let (n, p, w) = (self.n as f64, self.p, self.w);
        match case {
            Prop1Case::P1 => (n * w.powf(1.0 / n)).powf(n / (n - 1.0)),
            Prop1Case::PIn1n | Prop1Case::PGtN => {
                (n.powf(n) * w.powf(p)).powf(1.0 / (n - p))
                    * ((n - p).abs() / (p - 1.0)).powf(n * (p - 1.0) / (n - p))
            }
            Prop1Case::Pn => 1.0 / (w * self.r_star.powf(n)),
        }
    }

    /// Integrand in `t` as a function of `cap_p(level set; domain)`.
    fn integrand(&self, case: Prop1Case, c: f64) -> Result<f64> {
        let (n, p, w, r) = (self.n as f64, self.p, self.w, self.r_star);
        Ok(match case {
            Prop1Case::P1 => {
                let whole = ball_capacity(self.n, 1.0, r)?.value;
                whole.min(c).powf(n / (n - 1.0))
            }
            Prop1Case::PIn1n => {
                let whole = ball_capacity(self.n, p, r)?.value;
                (whole.powf(1.0 / (1.0 - p)) + c.powf(1.0 / (1.0 - p))).powf(n * (1.0 - p) / (n - p))
            }
            Prop1Case::Pn => {
                (-(n.powf(n / (n - 1.0)) * w.powf(1.0 / (n - 1.0)) * c.powf(1.0 / (1.0 - n)))).exp()
            }
            Prop1Case::PGtN => {
                let point = ball_capacity(self.n, p, r)?.value;
                let base = point.powf(1.0 / (1.0 - p)) - c.powf(1.0 / (1.0 - p));
                base.max(0.0).powf(n * (p - 1.0) / (p - n))
            }
        })
    }
}

/// Cells of `m` whose eight neighbours lie in `outer`.
fn erode(m: &GridMask, outer: &GridMask) -> Result<GridMask> {
    let fr = *m.frame();
    let mut keep = vec![false; fr.len()];
    for k in m.cells() {
        let (i, j) = fr.coords(k);
        keep[k] = (-1i64..=1).all(|dj| {
            (-1i64..=1).all(|di| {
                let (x, y) = (i as i64 + di, j as i64 + dj);
                x >= 0
                    && y >= 0
                    && (x as usize) < fr.nx
                    && (y as usize) < fr.ny
                    && outer.is_inside(fr.index(x as usize, y as usize))
            })
        });
    }
    GridMask::from_cells(fr, keep)
}

/// Right-hand side of the capacitary bound `lambda_p(ball of equal volume) <= bound`
/// for test function `f`, by midpoint quadrature in `t^p` over `levels` and
/// `2 * levels` uniform levels of `[0, sup |f|]`.
///
/// Radial functions on balls use closed-form concentric capacities; grid
/// functions use the grid condenser on their superlevel sets, trimmed to one
/// cell inside the domain.
pub fn prop1_bound(
    case: Prop1Case,
    d: &Domain,
    p: f64,
    f: &TestFunction,
    levels: usize,
    cfg: &VerifyConfig,
) -> Result<Prop1Bound> {
    let n = d.dim();
    if Prop1Case::for_exponent(n, p)? != case {
        return Err(PfkError::InvalidInput(format!(
            "case {} does not match p = {p}, n = {n}",
            case.name()
        )));
    }
    if levels == 0 {
        return Err(PfkError::InvalidInput("at least one quadrature level is needed".into()));
    }
    let w = unit_ball_volume(n)?;
    let r_star = (d.volume() / w).powf(1.0 / n as f64);
    let setup = Setup { n, p, w, r_star };

    let (numerator, sup): (f64, f64) = match f {
        TestFunction::Radial(g) => {
            let Shape::Ball { radius, .. } = d.shape() else {
                return Err(PfkError::InvalidInput("radial test functions need a ball".into()));
            };
            if g.n != n || (g.radius - radius).abs() > 1e-12 * radius {
                return Err(PfkError::InvalidInput("radial test function lives on another ball".into()));
            }
            if !g.is_decreasing() {
                return Err(PfkError::InvalidInput(format!("profile {} is not decreasing", g.label)));
            }
            (g.grad_p_integral(p)?, g.sup())
        }
        TestFunction::Grid(g) => {
            if case == Prop1Case::P1 {
                return Err(PfkError::Unsupported("grid test functions need p > 1".into()));
            }
            if n != 2 {
                return Err(PfkError::UnsupportedDimension(n));
            }
            (grad_p_integral(g, p)?, g.max_abs())
        }
    };
    if !(sup > 0.0) {
        return Err(PfkError::InvalidInput("test function vanishes identically".into()));
    }

    let capacity = |t: f64| -> Result<Option<f64>> {
        match f {
            TestFunction::Radial(g) => {
                let rho = g.superlevel_radius(t);
                if rho <= 0.0 {
                    return Ok(None);
                }
                Ok(Some(concentric_capacity(n, p, rho, g.radius)?))
            }
            TestFunction::Grid(g) => {
                let inner = erode(&superlevel_mask(g, t)?, g.mask())?;
                if inner.is_empty() {
                    return Ok(None);
                }
                let prob = CondenserProblem::new(inner, g.mask().clone(), p)?;
                Ok(Some(condenser_capacity(&prob, &cfg.solver)?.value))
            }
        }
    };
    let denominator = |k_levels: usize| -> Result<f64> {
        let dt = sup / k_levels as f64;
        let mut total = 0.0;
        for k in 0..k_levels {
            let t = (k as f64 + 0.5) * dt;
            if let Some(c) = capacity(t)? {
                let weight = if case == Prop1Case::P1 { 1.0 } else { p * t.powf(p - 1.0) };
                total += setup.integrand(case, c)? * weight * dt;
            }
        }
        Ok(total)
    };
    let k_num = setup.constant(case) * numerator;
    let coarse = denominator(levels)?;
    let fine = denominator(2 * levels)?;
    if !(coarse > 0.0 && fine > 0.0) {
        return Err(PfkError::NotConverged("bound denominator vanished".into()));
    }
    let lambda_star = if case == Prop1Case::P1 {
        n as f64 / r_star
    } else {
        eigen_radial_shoot(n, p, r_star, 1e-10)?.lambda
    };
    Ok(Prop1Bound {
        case,
        bound: k_num / coarse,
        refined: k_num / fine,
        lambda_star,
        levels,
    })
}

/// `lambda_p(ball) <= bound` and the level-doubling stability of the bound.
pub fn check_prop1(case: Prop1Case, d: &Domain, p: f64, f: &TestFunction, cfg: &VerifyConfig) -> Vec<CheckReport> {
    let name = format!("prop1_{}", case.name());
    let refine_name = format!("{name}_refinement");
    let reference = "capacitary upper bound for the ball eigenvalue";
    let label = match f {
        TestFunction::Radial(g) => g.label.clone(),
        TestFunction::Grid(_) => "grid".to_string(),
    };
    let mut ctx = CheckContext::new().domain(d.label()).n(d.dim()).p(p).detail(format!("f = {label}"));
    if matches!(f, TestFunction::Grid(_)) {
        ctx = ctx.resolution(cfg.resolution);
    }
    let tol = cfg.tolerances.get("prop1");
    let refine_tol = cfg.tolerances.get("prop1_refinement");
    match prop1_bound(case, d, p, f, cfg.prop1_levels, cfg) {
        Ok(b) => vec![
            CheckReport::evaluate(&name, reference, b.lambda_star, b.bound, Relation::Le, tol, ctx.clone()),
            CheckReport::evaluate(&refine_name, reference, b.refined, b.bound, Relation::Approx, refine_tol, ctx),
        ],
        Err(e) => vec![
            CheckReport::errored(&name, reference, Relation::Le, tol, ctx.clone(), &e),
            CheckReport::errored(&refine_name, reference, Relation::Approx, refine_tol, ctx, &e),
        ],
    }
}
