//! One test per acceptance criterion. Each prints a single
//! `criterion NN PASS|FAIL: ...` line and asserts the outcome.

use std::f64::consts::PI;
use std::process::Command;
use std::sync::{Arc, OnceLock};
use std::time::{Duration, Instant};

use pfk_core::capacity::{
    ball_capacity, condenser_capacity, concentric_capacity, point_capacity, BallCapacityCase, CondenserProblem,
};
use pfk_core::discretize::{grad_p_integral, rasterize, rasterize_on, schwarz_rearrange, GridField};
use pfk_core::geometry::unit_ball_volume;
use pfk_core::spectral::{bessel_zero, eigen_grid, eigen_radial_shoot, SolverOptions};
use pfk_core::verify::{
    check_bhattacharya, check_faber_krahn, check_kappa3, check_limit_p1, check_limit_pinf, check_moser_concentric,
    check_p_gt_n, check_prop1, grid_corpus, kappa3, point_constant, CheckReport, Prop1Case, RadialFunction,
    TestFunction, VerifyConfig,
};
use pfk_core::Domain;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

fn verdict(n: u32, ok: bool, detail: impl AsRef<str>) {
    println!("criterion {n:02} {}: {}", if ok { "PASS" } else { "FAIL" }, detail.as_ref());
    assert!(ok, "criterion {n} failed: {}", detail.as_ref());
}

fn cfg(resolution: usize) -> VerifyConfig {
    VerifyConfig {
        resolution,
        ..VerifyConfig::default()
    }
}

fn describe(reports: &[CheckReport]) -> String {
    reports
        .iter()
        .filter(|r| r.is_failure())
        .map(|r| format!("{} lhs={:.6} rhs={:.6} margin={:.3e}", r.name, r.lhs, r.rhs, r.margin))
        .collect::<Vec<_>>()
        .join("; ")
}

/// Two default catalog runs at four threads, shared by the catalog criteria.
fn catalog_runs() -> &'static (Vec<u8>, Vec<u8>, i32) {
    static RUNS: OnceLock<(Vec<u8>, Vec<u8>, i32)> = OnceLock::new();
    RUNS.get_or_init(|| {
        let run = || {
            Command::new(env!("CARGO_BIN_EXE_pfk"))
                .args(["verify", "--catalog", "default", "--jobs", "4", "--format", "json"])
                .env_remove("PFK_DEFAULT_RESOLUTION")
                .output()
                .expect("binary runs")
        };
        let a = run();
        let b = run();
        (a.stdout, b.stdout, a.status.code().unwrap_or(-1))
    })
}

fn catalog_reports() -> Vec<Value> {
    let v: Value = serde_json::from_slice(&catalog_runs().0).expect("json report");
    v["reports"].as_array().expect("reports").clone()
}

fn is_ball_label(r: &Value) -> bool {
    r["context"]["domain"].as_str().is_some_and(|d| d.starts_with("ball"))
}

#[test]
fn criterion_01_radial_shooting() {
    let j0 = bessel_zero(0.0, 1).unwrap();
    let l2 = eigen_radial_shoot(2, 2.0, 1.0, 1e-12).unwrap().lambda;
    let l3 = eigen_radial_shoot(3, 2.0, 1.0, 1e-12).unwrap().lambda;
    let (e2, e3) = ((l2 - j0 * j0).abs(), (l3 - PI * PI).abs());
    verdict(1, e2 <= 1e-8 && e3 <= 1e-8, format!("|n=2 error| = {e2:.2e}, |n=3 error| = {e3:.2e}"));
}

#[test]
fn criterion_02_grid_eigensolver() {
    let j0 = bessel_zero(0.0, 1).unwrap();
    let cases = [
        (Domain::ball(2, 1.0).unwrap(), j0 * j0),
        (Domain::rectangle(1.0, 1.0).unwrap(), 2.0 * PI * PI),
        (Domain::rectangle(2.0, 1.0).unwrap(), 1.25 * PI * PI),
    ];
    let mut ok = true;
    let mut detail = Vec::new();
    for (d, exact) in cases {
        let t = Instant::now();
        let e = eigen_grid(&rasterize(&d, 128).unwrap(), 2.0, &SolverOptions::default()).unwrap();
        let (err, dt) = ((e.lambda - exact).abs() / exact, t.elapsed());
        ok &= err <= 0.01 && dt <= Duration::from_secs(60) && e.converged;
        detail.push(format!("{} rel err {err:.2e} in {:.1}s", d.label(), dt.as_secs_f64()));
    }
    verdict(2, ok, detail.join(", "));
}

#[test]
fn criterion_03_faber_krahn_rigidity() {
    let s = PI.sqrt();
    let square = Domain::rectangle(s, s).unwrap();
    let disk = Domain::ball(2, 1.0).unwrap();
    let c = cfg(128);
    let tol = c.tolerances.get("faber_krahn");
    let mut ok = true;
    let mut detail = Vec::new();
    for p in [1.5, 2.0, 3.0] {
        let sq = check_faber_krahn(&square, p, &c);
        let bb = check_faber_krahn(&disk, p, &c);
        let strict = sq.iter().all(|r| r.pass && r.relative_gap() > tol);
        let rigid = bb.iter().all(|r| r.pass && r.relative_gap().abs() <= tol);
        ok &= strict && rigid;
        detail.push(format!(
            "p={p}: square gap {:.3}, disk gap {:.2e}",
            sq[0].relative_gap(),
            bb[0].relative_gap()
        ));
    }
    verdict(3, ok, detail.join(", "));
}

#[test]
fn criterion_04_cheeger_bound() {
    let reports = catalog_reports();
    let rows: Vec<&Value> = reports.iter().filter(|r| r["name"] == "cheeger_bound").collect();
    let bad = rows.iter().filter(|r| r["pass"] != true).count();
    let p1_balls: Vec<&&Value> = rows.iter().filter(|r| r["context"]["p"] == 1.0 && is_ball_label(r)).collect();
    let exact = !p1_balls.is_empty() && p1_balls.iter().all(|r| r["lhs"] == r["rhs"]);
    let exponents: std::collections::BTreeSet<String> = rows.iter().map(|r| r["context"]["p"].to_string()).collect();
    verdict(
        4,
        bad == 0 && exact && exponents.len() == 6,
        format!("{} rows over p in {exponents:?}, {bad} failures, p=1 ball rows exact: {exact}", rows.len()),
    );
}

#[test]
fn criterion_05_bhattacharya() {
    let c = VerifyConfig::default();
    let mut failures = 0;
    let mut total = 0;
    for n in [2, 3] {
        for k in 1..=20 {
            let p = 1.05 + (10.0 - 1.05) * k as f64 / 20.0;
            let r = check_bhattacharya(n, p, &c);
            total += 1;
            if !r.pass {
                failures += 1;
            }
        }
    }
    verdict(5, failures == 0, format!("{total} cases, {failures} failures"));
}

#[test]
fn criterion_06_mazya_sandwich() {
    let reports = catalog_reports();
    let lower: Vec<&Value> = reports.iter().filter(|r| r["name"] == "mazya_lower").collect();
    let upper_balls: Vec<&Value> = reports.iter().filter(|r| r["name"] == "mazya_upper" && is_ball_label(r)).collect();
    let lower_bad = lower.iter().filter(|r| r["pass"] != true).count();
    let upper_bad = upper_balls.iter().filter(|r| r["pass"] != true).count();
    verdict(
        6,
        !lower.is_empty() && !upper_balls.is_empty() && lower_bad == 0 && upper_bad == 0,
        format!(
            "asserted half {}/{} pass, reported half on balls {}/{} hold",
            lower.len() - lower_bad,
            lower.len(),
            upper_balls.len() - upper_bad,
            upper_balls.len()
        ),
    );
}

#[test]
fn criterion_07_capacity() {
    let opts = SolverOptions::default();
    let prob = CondenserProblem::from_domains(&Domain::ball(2, 0.5).unwrap(), &Domain::ball(2, 1.0).unwrap(), 2.0, 256).unwrap();
    let grid = condenser_capacity(&prob, &opts).unwrap().value;
    let exact = 2.0 * PI / 2f64.ln();
    let err = (grid - exact).abs() / exact;

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut violations = 0;
    let slack = 1e-9;
    for k in 0..50 {
        let p = rng.gen_range(1.5..3.0);
        let (rho, big) = if k % 2 == 0 {
            // inner sets nested, outer fixed
            let r1 = rng.gen_range(0.1..0.35);
            let r2 = r1 + rng.gen_range(0.05..0.3);
            let outer = rasterize(&Domain::ball(2, 1.0).unwrap(), 32).unwrap();
            let fr = *outer.frame();
            let cap = |r: f64| {
                let inner = rasterize_on(&Domain::ball(2, r).unwrap(), fr).unwrap();
                condenser_capacity(&CondenserProblem::new(inner, outer.clone(), p).unwrap(), &opts).unwrap().value
            };
            (cap(r1), cap(r2))
        } else {
            // outer sets nested, inner fixed: capacity decreases as the outer set grows
            let a = rng.gen_range(0.6..0.9);
            let b = rng.gen_range(a + 0.05..1.0);
            let outer_big = rasterize(&Domain::ball(2, 1.0).unwrap(), 32).unwrap();
            let fr = *outer_big.frame();
            let inner = rasterize_on(&Domain::ball(2, 0.25).unwrap(), fr).unwrap();
            let cap = |r: f64| {
                let outer = rasterize_on(&Domain::ball(2, r).unwrap(), fr).unwrap();
                condenser_capacity(&CondenserProblem::new(inner.clone(), outer, p).unwrap(), &opts).unwrap().value
            };
            (cap(b), cap(a))
        };
        if rho > big * (1.0 + slack) {
            violations += 1;
        }
    }
    verdict(
        7,
        err <= 0.02 && violations == 0,
        format!("grid {grid:.6} vs {exact:.6} (rel err {err:.2e}); 50 nested pairs, {violations} monotonicity violations"),
    );
}

/// 8-point Gauss-Legendre on `[a, b]`.
fn gauss(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    const X: [f64; 4] = [0.183_434_642_495_649_8, 0.525_532_409_916_329, 0.796_666_477_413_626_7, 0.960_289_856_497_536_3];
    const W: [f64; 4] = [0.362_683_783_378_362, 0.313_706_645_877_887_3, 0.222_381_034_453_374_47, 0.101_228_536_290_376_26];
    let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
    h * X.iter().zip(W).map(|(x, w)| w * (f(m - h * x) + f(m + h * x))).sum::<f64>()
}

/// Integral over `(0, 1]` on geometrically graded panels.
fn graded(f: &dyn Fn(f64) -> f64) -> f64 {
    let q: f64 = 0.7;
    (0..600).map(|k| gauss(f, q.powi(k + 1), q.powi(k))).sum()
}

/// Dirichlet p-energy of the closed-form minimizing profile.
fn profile_energy(n: usize, p: f64, r: f64) -> f64 {
    let nf = n as f64;
    let area = nf * unit_ball_volume(n).unwrap();
    if p < nf {
        // u = (s/r)^(-(n-p)/(p-1)) on s > r, with s = r/t
        let b = (nf - p) / (p - 1.0);
        area * graded(&|t: f64| {
            let lt = t.ln();
            (p * ((b / r).ln() + (b + 1.0) * lt) + (nf - 1.0) * (r.ln() - lt) + r.ln() - 2.0 * lt).exp()
        })
    } else if p == nf {
        // u = ln(R/s)/L on r < s < R = r e^L, in the variable ln s
        let len: f64 = 1e12;
        let lo = r.ln();
        area * gauss(&|_x: f64| (1.0 / len).powf(nf), lo, lo + len)
    } else {
        // u = 1 - (s/r)^a on 0 < s < r
        let a = (p - nf) / (p - 1.0);
        area * graded(&|t: f64| {
            let lt = t.ln();
            (p * ((a / r).ln() + (a - 1.0) * lt) + (nf - 1.0) * (r.ln() + lt) + r.ln()).exp()
        })
    }
}

#[test]
fn criterion_08_ball_capacity_formulas() {
    let triples: [(usize, f64, f64); 20] = [
        (2, 1.2, 1.0),
        (2, 1.5, 0.5),
        (3, 1.5, 2.0),
        (3, 2.0, 1.0),
        (3, 2.5, 0.7),
        (4, 2.0, 1.3),
        (4, 3.0, 1.0),
        (5, 2.5, 0.8),
        (2, 2.0, 1.0),
        (3, 3.0, 0.5),
        (4, 4.0, 2.0),
        (2, 3.0, 1.0),
        (2, 4.0, 0.5),
        (2, 6.0, 2.0),
        (3, 4.0, 1.0),
        (3, 5.0, 1.5),
        (3, 8.0, 0.3),
        (4, 6.0, 1.0),
        (2, 2.5, 1.0),
        (5, 7.0, 1.0),
    ];
    let mut worst: f64 = 0.0;
    let mut cases = std::collections::BTreeSet::new();
    for (n, p, r) in triples {
        let c = ball_capacity(n, p, r).unwrap();
        cases.insert(format!("{:?}", c.case));
        let q = profile_energy(n, p, r);
        let err = if c.case == BallCapacityCase::Critical {
            (q - c.value).abs()
        } else {
            (q - c.value).abs() / c.value
        };
        worst = worst.max(err);
    }
    verdict(8, worst <= 1e-10 && cases.len() == 3, format!("20 triples over {cases:?}, worst deviation {worst:.2e}"));
}

#[test]
fn criterion_09_rearrangement() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut mismatches = 0;
    for _ in 0..100 {
        let d = Domain::rectangle(rng.gen_range(0.5..2.0), rng.gen_range(0.5..2.0)).unwrap();
        let m = Arc::new(rasterize(&d, rng.gen_range(8..24)).unwrap());
        let vals: Vec<f64> = (0..m.frame().len())
            .map(|k| if m.is_inside(k) { rng.gen_range(0.0..1.0) } else { 0.0 })
            .collect();
        let f = GridField::new(m, vals).unwrap();
        let g = schwarz_rearrange(&f).unwrap();
        let sorted = |h: &GridField| {
            let mut v: Vec<f64> = h.mask().cells().map(|k| h.values()[k]).collect();
            v.sort_by(f64::total_cmp);
            v
        };
        if sorted(&f) != sorted(&g) {
            mismatches += 1;
        }
    }

    let mut violations = 0;
    let mut worst: f64 = 0.0;
    let mut quantized: f64 = 0.0;
    for (a, b) in [(2.0, 1.0), (1.0, 1.0)] {
        let d = Domain::rectangle(a, b).unwrap();
        let m = Arc::new(rasterize(&d, 256).unwrap());
        let mut fields = grid_corpus(&d, &m).unwrap();
        let sines = GridField::from_fn(m.clone(), |x| ((PI * (x[0] / a + 0.5)).sin() * (PI * (x[1] / b + 0.5)).sin()).max(0.0)).unwrap();
        let skew = GridField::from_fn(m.clone(), |x| {
            let (u, v) = (x[0] / a + 0.5, x[1] / b + 0.5);
            (u * (1.0 - u) * v * (1.0 - v) * (1.0 + u)).max(0.0)
        })
        .unwrap();
        fields.push(("sine_product".into(), sines));
        fields.push(("skew_polynomial".into(), skew));
        for (name, f) in fields {
            let star = schwarz_rearrange(&f).unwrap();
            for p in [1.0, 2.0, 3.0] {
                let ratio = grad_p_integral(&star, p).unwrap() / grad_p_integral(&f, p).unwrap();
                if name == "distance" {
                    // values on multiples of h: the rearrangement is a staircase
                    quantized = quantized.max(ratio);
                    continue;
                }
                worst = worst.max(ratio);
                if ratio > 1.05 {
                    violations += 1;
                }
            }
        }
    }
    verdict(
        9,
        mismatches == 0 && violations == 0,
        format!(
            "100 random fields, {mismatches} multiset mismatches; Polya-Szego worst ratio {worst:.4} over smooth fields, \
             {violations} violations (grid distance field, not asserted: {quantized:.4})"
        ),
    );
}

#[test]
fn criterion_10_prop1_evaluators() {
    let c = VerifyConfig::default();
    let mut ok = true;
    let mut detail = Vec::new();
    for (case, n, p) in [(Prop1Case::PIn1n, 3, 2.0), (Prop1Case::Pn, 2, 2.0), (Prop1Case::PGtN, 2, 3.0)] {
        let ball = Domain::ball(n, 1.0).unwrap();
        let f = TestFunction::Radial(RadialFunction::tent(n, 1.0).unwrap());
        let reports = check_prop1(case, &ball, p, &f, &c);
        ok &= reports.len() == 2 && reports.iter().all(|r| r.pass);
        detail.push(format!(
            "{}(n={n},p={p}): bound {:.4} vs {:.4}, refinement change {:.2e}",
            case.name(),
            reports[0].lhs,
            reports[0].rhs,
            reports.get(1).map_or(f64::NAN, |r| r.lhs)
        ));
    }
    verdict(10, ok, detail.join("; "));
}

#[test]
fn criterion_11_moser_trudinger_identity() {
    let pairs = [
        (0.5, 1.0),
        (0.1, 1.0),
        (0.25, 2.0),
        (0.9, 1.0),
        (1.0, 3.0),
        (0.01, 0.5),
        (2.0, 2.5),
        (0.3, 0.31),
        (0.001, 10.0),
        (4.0, 7.0),
    ];
    let reports = check_moser_concentric(2, &pairs, &VerifyConfig::default());
    let worst = reports.iter().map(|r| (r.lhs - r.rhs).abs() / r.rhs).fold(0.0, f64::max);
    verdict(
        11,
        reports.len() == 10 && reports.iter().all(|r| r.pass && r.tolerance <= 1e-12),
        format!("10 pairs, worst relative deviation {worst:.2e}"),
    );
}

#[test]
fn criterion_12_sharp_constants() {
    let reports = check_kappa3(&[1.5, 1.1, 1.01], &VerifyConfig::default());
    let value = &reports[0];
    let limit = &reports[1];
    let gaps: Vec<String> = [1.5, 1.1, 1.01]
        .iter()
        .map(|&p| format!("{:.4}", kappa3(p, 2).unwrap() - 2.0 * PI.sqrt()))
        .collect();
    verdict(
        12,
        value.pass && limit.pass,
        format!(
            "kappa3(2,3) error {:.2e}; gaps to 2 sqrt(pi) along 1.5, 1.1, 1.01: {} (largest step ratio {:.3})",
            (value.lhs - value.rhs).abs(),
            gaps.join(", "),
            limit.lhs
        ),
    );
}

#[test]
fn criterion_13_limits() {
    let c = cfg(128);
    let mut reports = Vec::new();
    for d in [Domain::ball(2, 1.0).unwrap(), Domain::rectangle(2.0, 1.0).unwrap()] {
        reports.extend(check_limit_pinf(&d, &c).into_iter().filter(|r| r.name == "limit_pinf_inradius"));
    }
    for d in [Domain::ball(2, 1.0).unwrap(), Domain::rectangle(1.0, 1.0).unwrap()] {
        reports.extend(check_limit_p1(&d, &c));
    }
    let detail = reports
        .iter()
        .map(|r| {
            format!(
                "{} {}: {:.4} vs {:.4} {}",
                r.name,
                r.context.domain.as_deref().unwrap_or(""),
                r.lhs,
                r.rhs,
                if r.pass { "ok" } else { "FAIL" }
            )
        })
        .collect::<Vec<_>>()
        .join("; ");
    verdict(13, reports.iter().all(|r| r.pass), detail);
}

#[test]
fn criterion_14_p_greater_than_n() {
    let c = VerifyConfig::default();
    let disk = Domain::ball(2, 1.0).unwrap();
    let closed = point_constant(&disk, 3.0, &c).unwrap();
    let grid = point_capacity(&disk, 3.0, c.resolution, &c.solver).unwrap().value * PI.sqrt();
    let err = (grid - closed).abs() / closed;
    let mut reports = Vec::new();
    for d in [disk.clone(), Domain::rectangle(1.0, 1.0).unwrap()] {
        for p in [3.0, 4.0] {
            reports.extend(check_p_gt_n(&d, p, &c));
        }
    }
    let failures = describe(&reports);
    let closed_ok = (closed - PI.powf(1.5) / 2.0).abs() < 1e-12;
    verdict(
        14,
        closed_ok && err <= 0.05 && failures.is_empty() && !reports.is_empty(),
        format!("E(disk) grid {grid:.5} vs {closed:.5} (rel err {err:.2e}); {} checks, failures: [{failures}]", reports.len()),
    );
}

#[test]
fn criterion_15_determinism() {
    let (a, b, code) = catalog_runs();
    verdict(
        15,
        a == b && !a.is_empty() && *code == 0,
        format!("two runs with 4 jobs: {} bytes, identical: {}, exit code {code}", a.len(), a == b),
    );
}

#[test]
fn concentric_closed_form_is_consistent() {
    // sanity for the oracle used by criterion 7
    let v = concentric_capacity(2, 2.0, 0.5, 1.0).unwrap();
    assert!((v - 2.0 * PI / 2f64.ln()).abs() < 1e-12);
    assert!((kappa3(2.0, 3).unwrap() - 3.0 * (PI / 2.0).powf(4.0 / 3.0)).abs() < 1e-10);
    let tent = RadialFunction::tent(2, 1.0).unwrap();
    assert!(tent.grad_p_integral(2.0).unwrap() > 0.0);
}
