//! Gamma function, Bessel functions of the first kind and their zeros.

use std::f64::consts::PI;

use crate::error::{PfkError, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_sum(x: f64) -> f64 {
    // x is the shifted argument (original - 1)
    let mut a = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    a
}

/// `Gamma(x)` for `x > 0`.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(PfkError::OutOfDomain(x));
    }
    Ok(gamma_pos(x))
}

fn gamma_pos(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma_pos(1.0 - x));
    }
    if x.fract() == 0.0 && x <= 171.0 {
        return (1..x as u64).fold(1.0, |acc, k| acc * k as f64);
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * lanczos_sum(z)
}

/// `ln Gamma(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(PfkError::OutOfDomain(x));
    }
    Ok(ln_gamma_pos(x))
}

fn ln_gamma_pos(x: f64) -> f64 {
    if x < 0.5 {
        return (PI / (PI * x).sin()).ln() - ln_gamma_pos(1.0 - x);
    }
    if x < 20.0 {
        return gamma_pos(x).ln();
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln()
}

const SERIES_LIMIT: f64 = 10.0;

/// Bessel function of the first kind `J_nu(x)` for `nu >= 0`, `x >= 0`.
pub fn bessel_j(nu: f64, x: f64) -> Result<f64> {
    if !(nu >= 0.0) || !nu.is_finite() {
        return Err(PfkError::OutOfDomain(nu));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(PfkError::OutOfDomain(x));
    }
    if x == 0.0 {
        return Ok(if nu == 0.0 { 1.0 } else { 0.0 });
    }
    Ok(if x <= SERIES_LIMIT {
        bessel_series(nu, x)
    } else {
        bessel_miller(nu, x)
    })
}

/// Ascending series `sum (-1)^k (x/2)^(2k+nu) / (k! Gamma(k+nu+1))`.
fn bessel_series(nu: f64, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = (nu * half.ln() - ln_gamma_pos(nu + 1.0)).exp();
    let mut sum = term;
    let q = -half * half;
    for k in 1..300 {
        let kf = k as f64;
        term *= q / (kf * (kf + nu));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// Miller's downward recurrence normalized by
/// `(x/2)^nu = sum_k w_k J_{nu+2k}(x)`, `w_0 = Gamma(nu+1)`,
/// `w_k = (nu+2k) Gamma(nu+k) / k!`.
fn bessel_miller(nu: f64, x: f64) -> f64 {
    let mut top = (x + 15.0 * x.cbrt() + 40.0).ceil() as usize;
    if top % 2 == 1 {
        top += 1;
    }
    let weight = |k: usize| -> f64 {
        if k == 0 {
            gamma_pos(nu + 1.0)
        } else {
            let kf = k as f64;
            (nu + 2.0 * kf) * (ln_gamma_pos(nu + kf) - ln_gamma_pos(kf + 1.0)).exp()
        }
    };
    let mut above = 0.0; // J_{nu+n+1}
    let mut here = 1e-300; // J_{nu+n}
    let mut norm = if top % 2 == 0 { weight(top / 2) * here } else { 0.0 };
    for n in (1..=top).rev() {
        let below = 2.0 * (nu + n as f64) / x * here - above;
        above = here;
        here = below;
        let m = n - 1;
        if m % 2 == 0 {
            norm += weight(m / 2) * here;
        }
        if here.abs() > 1e250 {
            here *= 1e-250;
            above *= 1e-250;
            norm *= 1e-250;
        }
    }
    let scale = (nu * (0.5 * x).ln()).exp();
    here / norm * scale
}

/// `k`-th positive zero of `J_nu`, bracketed by a sign scan and bisected to
/// an interval of width `1e-12` or less.
pub fn bessel_zero(nu: f64, k: usize) -> Result<f64> {
    if !(nu >= 0.0) || !nu.is_finite() {
        return Err(PfkError::OutOfDomain(nu));
    }
    if k == 0 {
        return Err(PfkError::InvalidInput("zero index k must be at least 1".into()));
    }
    const STEP: f64 = 0.1;
    let mut a = nu.max(STEP);
    let mut fa = bessel_j(nu, a)?;
    let mut found = 0;
    loop {
        let b = a + STEP;
        let fb = bessel_j(nu, b)?;
        if fa == 0.0 {
            found += 1;
            if found == k {
                return Ok(a);
            }
        } else if fa.signum() != fb.signum() && fb != 0.0 {
            found += 1;
            if found == k {
                return bisect_zero(nu, a, b, fa);
            }
        }
        a = b;
        fa = fb;
        if a > nu + 4.0 * k as f64 + 10.0 * (k as f64 + nu) {
            return Err(PfkError::Bracket {
                lo: nu,
                hi: a,
                detail: format!("fewer than {k} sign changes of J_{nu}"),
            });
        }
    }
}

fn bisect_zero(nu: f64, mut lo: f64, mut hi: f64, mut flo: f64) -> Result<f64> {
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = bessel_j(nu, mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
