//! Discrete p-Dirichlet energy on a grid and a bound-constrained
//! Newton-CG minimizer for `(1/p) E(v) - <b, v>`.

use crate::discretize::{link_lengths, GridFrame, GridMask, MIN_CROSSING};

/// Cell state and link weights for one energy functional.
#[derive(Debug, Clone)]
pub(crate) struct Stencil {
    pub frame: GridFrame,
    pub p: f64,
    /// `1 / (h * length factor)` for the forward x and y links of each cell.
    wx: Vec<f64>,
    wy: Vec<f64>,
    pub free: Vec<bool>,
}

impl Stencil {
    /// Stencil whose free cells are the mask's inside cells.
    pub fn from_mask(mask: &GridMask, p: f64) -> Self {
        let (lx, ly) = link_lengths(mask, p);
        let h = mask.frame().h;
        Self {
            frame: *mask.frame(),
            p,
            wx: lx.iter().map(|l| 1.0 / (h * l)).collect(),
            wy: ly.iter().map(|l| 1.0 / (h * l)).collect(),
            free: mask.inside().to_vec(),
        }
    }

    /// Mark the cells of `inner` as fixed. Links across its boundary take
    /// their length from the crossing recorded on `inner`, re-measured from
    /// the free (outer) endpoint.
    pub fn fix_inner(&mut self, inner: &GridMask) {
        let h = self.frame.h;
        let nx = self.frame.nx;
        let e = (self.p - 1.0) / self.p;
        let weight = |theta: f64| {
            if theta == 1.0 {
                1.0 / h
            } else {
                let free_side = (1.0 - theta).clamp(MIN_CROSSING, 1.0);
                1.0 / (h * free_side.powf(e))
            }
        };
        let links = inner.links();
        for k in 0..self.frame.len() {
            let (i, j) = self.frame.coords(k);
            if i + 1 < nx && inner.is_inside(k) != inner.is_inside(k + 1) {
                self.wx[k] = weight(links.map_or(1.0, |l| l.x[k]));
            }
            if j + 1 < self.frame.ny && inner.is_inside(k) != inner.is_inside(k + nx) {
                self.wy[k] = weight(links.map_or(1.0, |l| l.y[k]));
            }
            if inner.is_inside(k) {
                self.free[k] = false;
            }
        }
    }

    fn neighbours(&self, k: usize) -> (Option<usize>, Option<usize>) {
        let (i, j) = self.frame.coords(k);
        (
            (i + 1 < self.frame.nx).then(|| k + 1),
            (j + 1 < self.frame.ny).then(|| k + self.frame.nx),
        )
    }

    fn grad_at(&self, u: &[f64], k: usize) -> (f64, f64) {
        let (ex, ey) = self.neighbours(k);
        let vx = ex.map_or(0.0, |e| u[e]);
        let vy = ey.map_or(0.0, |e| u[e]);
        ((vx - u[k]) * self.wx[k], (vy - u[k]) * self.wy[k])
    }

    /// `E(u) = sum |g|^p h^2`.
    pub fn energy(&self, u: &[f64]) -> f64 {
        let p = self.p;
        let mut total = 0.0;
        for k in 0..self.frame.len() {
            let (gx, gy) = self.grad_at(u, k);
            let s = gx * gx + gy * gy;
            if s > 0.0 {
                total += if p == 2.0 { s } else { s.powf(0.5 * p) };
            }
        }
        total * self.frame.cell_area()
    }

    /// Gradient of `(1/p) E` with respect to every cell value.
    pub fn gradient(&self, u: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|g| *g = 0.0);
        let p = self.p;
        let a2 = self.frame.cell_area();
        for k in 0..self.frame.len() {
            let (gx, gy) = self.grad_at(u, k);
            let s = gx * gx + gy * gy;
            if s == 0.0 {
                continue;
            }
            let a = if p == 2.0 { 1.0 } else { s.powf(0.5 * p - 1.0) } * a2;
            let (ex, ey) = self.neighbours(k);
            let cx = a * gx * self.wx[k];
            let cy = a * gy * self.wy[k];
            if let Some(e) = ex {
                out[e] += cx;
            }
            if let Some(e) = ey {
                out[e] += cy;
            }
            out[k] -= cx + cy;
        }
    }
}

/// Per-cell regularized Hessian blocks `h^2 a (I + (p-2) g g^T / s)`.
struct Hessian {
    hxx: Vec<f64>,
    hxy: Vec<f64>,
    hyy: Vec<f64>,
}

impl Hessian {
    fn assemble(st: &Stencil, u: &[f64], eps2: f64) -> Self {
        let n = st.frame.len();
        let (mut hxx, mut hxy, mut hyy) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        let p = st.p;
        let a2 = st.frame.cell_area();
        for k in 0..n {
            let (gx, gy) = st.grad_at(u, k);
            let s = gx * gx + gy * gy + eps2;
            let a = if p == 2.0 { 1.0 } else { s.powf(0.5 * p - 1.0) } * a2;
            let c = (p - 2.0) / s;
            hxx[k] = a * (1.0 + c * gx * gx);
            hxy[k] = a * c * gx * gy;
            hyy[k] = a * (1.0 + c * gy * gy);
        }
        Self { hxx, hxy, hyy }
    }

    fn apply(&self, st: &Stencil, d: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|g| *g = 0.0);
        for k in 0..st.frame.len() {
            let (dx, dy) = st.grad_at(d, k);
            if dx == 0.0 && dy == 0.0 {
                continue;
            }
            let rx = (self.hxx[k] * dx + self.hxy[k] * dy) * st.wx[k];
            let ry = (self.hxy[k] * dx + self.hyy[k] * dy) * st.wy[k];
            let (ex, ey) = st.neighbours(k);
            if let Some(e) = ex {
                out[e] += rx;
            }
            if let Some(e) = ey {
                out[e] += ry;
            }
            out[k] -= rx + ry;
        }
    }

    fn diagonal(&self, st: &Stencil, out: &mut [f64]) {
        out.iter_mut().for_each(|g| *g = 0.0);
        for k in 0..st.frame.len() {
            let (wx, wy) = (st.wx[k], st.wy[k]);
            let (ex, ey) = st.neighbours(k);
            if let Some(e) = ex {
                out[e] += self.hxx[k] * wx * wx;
            }
            if let Some(e) = ey {
                out[e] += self.hyy[k] * wy * wy;
            }
            out[k] += self.hxx[k] * wx * wx + 2.0 * self.hxy[k] * wx * wy + self.hyy[k] * wy * wy;
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct InnerSettings {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct InnerOutcome {
    pub iterations: usize,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Minimize `(1/p) E(v) - <rhs, v>` over the free cells of `st`, subject to
/// `lower <= v <= upper`. Non-free cells keep their values in `v`.
pub(crate) fn minimize(st: &Stencil, rhs: &[f64], v: &mut [f64], cfg: InnerSettings) -> InnerOutcome {
    let n = st.frame.len();
    let p = st.p;
    for k in 0..n {
        if st.free[k] {
            v[k] = v[k].clamp(cfg.lower, cfg.upper);
        }
    }
    let objective = |v: &[f64]| st.energy(v) / p - dot(rhs, v);
    let scale_of = |v: &[f64]| st.energy(v) / p + dot(rhs, v).abs();

    let mut g = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut r = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut q = vec![0.0; n];
    let mut hd = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut trial = v.to_vec();
    let mut active = vec![false; n];

    let mut j = objective(v);
    let mut converged = false;
    let mut iterations = 0;
    let mut stalls = 0;
    let mut g0 = f64::NAN;

    while iterations < cfg.max_iterations {
        iterations += 1;
        st.gradient(v, &mut g);
        for k in 0..n {
            g[k] -= rhs[k];
            active[k] = !st.free[k]
                || (v[k] <= cfg.lower && g[k] > 0.0)
                || (v[k] >= cfg.upper && g[k] < 0.0);
            if active[k] {
                g[k] = 0.0;
            }
        }
        let gnorm = dot(&g, &g).sqrt();
        if gnorm == 0.0 {
            converged = true;
            break;
        }
        if g0.is_nan() {
            g0 = gnorm;
        }

        // regularization proportional to the typical squared gradient
        let mean_s = {
            let mut acc = 0.0;
            let mut cnt = 0usize;
            for k in 0..n {
                if st.free[k] {
                    let (gx, gy) = st.grad_at(v, k);
                    acc += gx * gx + gy * gy;
                    cnt += 1;
                }
            }
            acc / cnt.max(1) as f64
        };
        let eps2 = (1e-10 * mean_s).max(1e-300);
        let hess = Hessian::assemble(st, v, eps2);
        hess.diagonal(st, &mut diag);

        // preconditioned CG on the inactive free cells
        let eta = (gnorm / g0).clamp(1e-12, 0.1);
        d.iter_mut().for_each(|x| *x = 0.0);
        for k in 0..n {
            r[k] = if active[k] { 0.0 } else { -g[k] };
            z[k] = if active[k] || diag[k] <= 0.0 { 0.0 } else { r[k] / diag[k] };
        }
        q.copy_from_slice(&z);
        let mut rz = dot(&r, &z);
        let r0 = dot(&r, &r).sqrt();
        for _ in 0..(4 * n).min(5000) {
            hess.apply(st, &q, &mut hd);
            for k in 0..n {
                if active[k] {
                    hd[k] = 0.0;
                }
            }
            let qhq = dot(&q, &hd);
            if !(qhq > 0.0) {
                break;
            }
            let alpha = rz / qhq;
            for k in 0..n {
                d[k] += alpha * q[k];
                r[k] -= alpha * hd[k];
            }
            if dot(&r, &r).sqrt() <= eta * r0 {
                break;
            }
            for k in 0..n {
                z[k] = if active[k] || diag[k] <= 0.0 { 0.0 } else { r[k] / diag[k] };
            }
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for k in 0..n {
                q[k] = z[k] + beta * q[k];
            }
        }
        let mut slope = dot(&g, &d);
        if !(slope < 0.0) {
            for k in 0..n {
                d[k] = if active[k] || diag[k] <= 0.0 { 0.0 } else { -g[k] / diag[k] };
            }
            slope = dot(&g, &d);
        }
        let decrement = -slope;
        let scale = scale_of(v).max(f64::MIN_POSITIVE);
        if decrement <= cfg.tolerance * scale {
            converged = true;
            break;
        }

        let mut step = 1.0;
        let mut accepted = false;
        for attempt in 0..120 {
            if attempt == 60 {
                // Newton direction unusable: fall back to scaled steepest descent
                for k in 0..n {
                    d[k] = if active[k] || diag[k] <= 0.0 { 0.0 } else { -g[k] / diag[k] };
                }
                slope = dot(&g, &d);
                step = 1.0;
            }
            for k in 0..n {
                trial[k] = if st.free[k] {
                    (v[k] + step * d[k]).clamp(cfg.lower, cfg.upper)
                } else {
                    v[k]
                };
            }
            let jt = objective(&trial);
            if jt <= j + 1e-4 * step * slope {
                let decrease = j - jt;
                v.copy_from_slice(&trial);
                j = jt;
                accepted = true;
                if decrease <= cfg.tolerance * scale {
                    stalls += 1;
                } else {
                    stalls = 0;
                }
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            // no representable decrease left along a descent direction
            converged = decrement <= 1e-6 * scale;
            break;
        }
        if stalls >= 2 {
            converged = true;
            break;
        }
    }
    InnerOutcome {
        iterations,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretize::{grad_p_sum, rasterize};
    use crate::geometry::Domain;

    #[test]
    fn energy_matches_grad_p_sum() {
        let m = rasterize(&Domain::ball(2, 1.0).unwrap(), 32).unwrap();
        let u: Vec<f64> = (0..m.frame().len())
            .map(|k| if m.is_inside(k) { 1.0 + (k % 7) as f64 * 0.1 } else { 0.0 })
            .collect();
        for p in [1.0, 1.5, 2.0, 3.0] {
            let st = Stencil::from_mask(&m, p);
            let a = st.energy(&u);
            let b = grad_p_sum(&m, &u, p);
            assert!((a - b).abs() <= 1e-13 * b);
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let m = rasterize(&Domain::rectangle(1.0, 0.7).unwrap(), 8).unwrap();
        let u: Vec<f64> = (0..m.frame().len())
            .map(|k| if m.is_inside(k) { ((k * 37) % 11) as f64 * 0.1 + 0.2 } else { 0.0 })
            .collect();
        for p in [1.5, 2.0, 3.5] {
            let st = Stencil::from_mask(&m, p);
            let mut g = vec![0.0; u.len()];
            st.gradient(&u, &mut g);
            for k in m.cells() {
                let step = 1e-6;
                let mut up = u.clone();
                up[k] += step;
                let mut dn = u.clone();
                dn[k] -= step;
                let fd = (st.energy(&up) - st.energy(&dn)) / (2.0 * step * p);
                assert!((fd - g[k]).abs() <= 1e-6 * (1.0 + g[k].abs()), "p={p} k={k}: {fd} vs {}", g[k]);
            }
        }
    }

    #[test]
    fn quadratic_case_solves_poisson() {
        // p = 2, rhs = h^2: the minimizer solves the discrete Poisson problem,
        // whose residual must vanish on free cells.
        let m = rasterize(&Domain::rectangle(1.0, 1.0).unwrap(), 16).unwrap();
        let st = Stencil::from_mask(&m, 2.0);
        let rhs: Vec<f64> = (0..m.frame().len())
            .map(|k| if m.is_inside(k) { m.h() * m.h() } else { 0.0 })
            .collect();
        let mut v = vec![0.0; rhs.len()];
        let out = minimize(
            &st,
            &rhs,
            &mut v,
            InnerSettings {
                tolerance: 1e-14,
                max_iterations: 50,
                lower: f64::NEG_INFINITY,
                upper: f64::INFINITY,
            },
        );
        assert!(out.converged);
        let mut g = vec![0.0; v.len()];
        st.gradient(&v, &mut g);
        for k in m.cells() {
            assert!((g[k] - rhs[k]).abs() < 1e-7 * rhs[k]);
        }
    }
}
