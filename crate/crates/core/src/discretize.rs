//! Uniform cell-centred grids over planar domains.
//!
//! Cell `(i, j)` (column `i`, row `j`) has centre `origin + ((i + 0.5) h, (j + 0.5) h)`
//! and linear index `j * nx + i`. Values outside the mask are zero.
//!
//! Masks rasterized from a [`Domain`] also record, for every forward link
//! between an inside and an outside cell, where the true boundary crosses
//! the link. The gradient functional uses this to shorten boundary links,
//! which turns the first-order Dirichlet treatment into one that is exact
//! for 1D profiles.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{check_exponent, PfkError, Result};
use crate::geometry::Domain;

/// Smallest admissible crossing fraction; keeps boundary links bounded away from zero.
pub(crate) const MIN_CROSSING: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridFrame {
    pub origin: [f64; 2],
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridFrame {
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    /// `(column, row)` of a linear index.
    pub fn coords(&self, k: usize) -> (usize, usize) {
        (k % self.nx, k / self.nx)
    }

    pub fn center_of(&self, k: usize) -> [f64; 2] {
        let (i, j) = self.coords(k);
        [
            self.origin[0] + (i as f64 + 0.5) * self.h,
            self.origin[1] + (j as f64 + 0.5) * self.h,
        ]
    }

    pub fn cell_area(&self) -> f64 {
        self.h * self.h
    }
}

/// Boundary crossing fractions per forward link, measured from the inside
/// endpoint in units of `h`; `1.0` where no crossing is recorded.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Links {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridMask {
    frame: GridFrame,
    inside: Vec<bool>,
    count: usize,
    links: Option<Links>,
}

impl GridMask {
    /// Mask from explicit cell flags, without boundary geometry.
    pub fn from_cells(frame: GridFrame, inside: Vec<bool>) -> Result<Self> {
        if !(frame.h.is_finite() && frame.h > 0.0) || frame.is_empty() {
            return Err(PfkError::InvalidInput("grid frame needs h > 0 and nonzero extents".into()));
        }
        if inside.len() != frame.len() {
            return Err(PfkError::InvalidInput(format!(
                "mask has {} cells, frame has {}",
                inside.len(),
                frame.len()
            )));
        }
        let count = inside.iter().filter(|&&b| b).count();
        Ok(Self {
            frame,
            inside,
            count,
            links: None,
        })
    }

    pub fn frame(&self) -> &GridFrame {
        &self.frame
    }

    pub fn h(&self) -> f64 {
        self.frame.h
    }

    pub fn is_inside(&self, k: usize) -> bool {
        self.inside[k]
    }

    pub fn inside(&self) -> &[bool] {
        &self.inside
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// `count * h^2`.
    pub fn area(&self) -> f64 {
        self.count as f64 * self.frame.cell_area()
    }

    pub fn has_boundary_geometry(&self) -> bool {
        self.links.is_some()
    }

    pub(crate) fn links(&self) -> Option<&Links> {
        self.links.as_ref()
    }

    /// Same cells, no boundary geometry.
    pub fn without_boundary_geometry(&self) -> GridMask {
        GridMask {
            links: None,
            ..self.clone()
        }
    }

    pub fn is_subset_of(&self, other: &GridMask) -> bool {
        self.frame == other.frame
            && self.inside.iter().zip(&other.inside).all(|(&a, &b)| !a || b)
    }

    pub fn same_frame(&self, other: &GridMask) -> bool {
        self.frame == other.frame
    }

    /// Indices of inside cells in increasing order.
    pub fn cells(&self) -> impl Iterator<Item = usize> + '_ {
        self.inside
            .iter()
            .enumerate()
            .filter_map(|(k, &b)| b.then_some(k))
    }
}

/// Rasterize a planar domain at `resolution` cells across its longer side.
pub fn rasterize(d: &Domain, resolution: usize) -> Result<GridMask> {
    if d.dim() != 2 {
        return Err(PfkError::UnsupportedDimension(d.dim()));
    }
    if resolution == 0 {
        return Err(PfkError::ResolutionTooCoarse(0));
    }
    let (lo, hi) = d.bounding_box()?;
    let side = (hi[0] - lo[0]).max(hi[1] - lo[1]);
    let h = side / resolution as f64;
    let mut frame = [0.0; 2];
    let mut ext = [0usize; 2];
    for k in 0..2 {
        let cells = ((hi[k] - lo[k]) / h - 1e-9).ceil().max(1.0) as usize;
        ext[k] = cells + 2;
        let mid = 0.5 * (lo[k] + hi[k]);
        frame[k] = mid - 0.5 * ext[k] as f64 * h;
    }
    let frame = GridFrame {
        origin: frame,
        h,
        nx: ext[0],
        ny: ext[1],
    };
    let mask = rasterize_on(d, frame)?;
    if mask.is_empty() {
        return Err(PfkError::ResolutionTooCoarse(resolution));
    }
    Ok(mask)
}

/// Rasterize a planar domain on a given frame; the result may be empty.
pub fn rasterize_on(d: &Domain, frame: GridFrame) -> Result<GridMask> {
    if d.dim() != 2 {
        return Err(PfkError::UnsupportedDimension(d.dim()));
    }
    let inside: Vec<bool> = (0..frame.len())
        .map(|k| d.contains(frame.center_of(k)))
        .collect();
    let mut mask = GridMask::from_cells(frame, inside)?;
    let crossing = |from: usize, dir: [f64; 2]| {
        (d.ray_exit(frame.center_of(from), dir) / frame.h).clamp(MIN_CROSSING, 1.0)
    };
    let mut lx = vec![1.0; frame.len()];
    let mut ly = vec![1.0; frame.len()];
    for j in 0..frame.ny {
        for i in 0..frame.nx {
            let k = frame.index(i, j);
            if i + 1 < frame.nx {
                let e = k + 1;
                match (mask.inside[k], mask.inside[e]) {
                    (true, false) => lx[k] = crossing(k, [1.0, 0.0]),
                    (false, true) => lx[k] = crossing(e, [-1.0, 0.0]),
                    _ => {}
                }
            }
            if j + 1 < frame.ny {
                let e = k + frame.nx;
                match (mask.inside[k], mask.inside[e]) {
                    (true, false) => ly[k] = crossing(k, [0.0, 1.0]),
                    (false, true) => ly[k] = crossing(e, [0.0, -1.0]),
                    _ => {}
                }
            }
        }
    }
    mask.links = Some(Links { x: lx, y: ly });
    Ok(mask)
}

/// A real function on the cells of a mask, zero outside it.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    mask: Arc<GridMask>,
    values: Vec<f64>,
}

impl GridField {
    pub fn new(mask: Arc<GridMask>, values: Vec<f64>) -> Result<Self> {
        if values.len() != mask.frame.len() {
            return Err(PfkError::InvalidInput(format!(
                "field has {} values, mask has {} cells",
                values.len(),
                mask.frame.len()
            )));
        }
        for (k, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(PfkError::InvalidInput(format!("non-finite value at cell {k}")));
            }
            if !mask.inside[k] && v != 0.0 {
                return Err(PfkError::InvalidInput(format!(
                    "nonzero value {v} outside the mask at cell {k}"
                )));
            }
        }
        Ok(Self { mask, values })
    }

    pub fn zeros(mask: Arc<GridMask>) -> Self {
        let n = mask.frame.len();
        Self {
            mask,
            values: vec![0.0; n],
        }
    }

    /// Samples `f` at inside cell centres.
    pub fn from_fn(mask: Arc<GridMask>, f: impl Fn([f64; 2]) -> f64) -> Result<Self> {
        let values = (0..mask.frame.len())
            .map(|k| {
                if mask.inside[k] {
                    f(mask.frame.center_of(k))
                } else {
                    0.0
                }
            })
            .collect();
        Self::new(mask, values)
    }

    pub(crate) fn from_parts_unchecked(mask: Arc<GridMask>, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), mask.frame.len());
        Self { mask, values }
    }

    pub fn mask(&self) -> &GridMask {
        &self.mask
    }

    pub fn mask_arc(&self) -> &Arc<GridMask> {
        &self.mask
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<GridField> {
        let values = self
            .values
            .iter()
            .zip(&self.mask.inside)
            .map(|(&v, &ins)| if ins { f(v) } else { 0.0 })
            .collect();
        GridField::new(self.mask.clone(), values)
    }

    pub fn scaled(&self, c: f64) -> GridField {
        GridField {
            mask: self.mask.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    /// CSV export: a JSON header line `# {"origin":..,"h":..,"nx":..,"ny":..}`
    /// followed by `ny` rows of `nx` values (row 0 first).
    pub fn to_csv(&self) -> String {
        let f = &self.mask.frame;
        let header = serde_json::to_string(f).expect("frame serializes");
        let mut out = format!("# {header}\n");
        for j in 0..f.ny {
            let row: Vec<String> = (0..f.nx)
                .map(|i| format!("{:e}", self.values[f.index(i, j)]))
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Effective link length factors `theta^((p-1)/p)` for the x and y forward
/// links of every cell.
pub(crate) fn link_lengths(mask: &GridMask, p: f64) -> (Vec<f64>, Vec<f64>) {
    let n = mask.frame.len();
    match &mask.links {
        None => (vec![1.0; n], vec![1.0; n]),
        Some(l) => {
            let e = (p - 1.0) / p;
            let f = |t: &f64| if *t == 1.0 { 1.0 } else { t.powf(e) };
            (l.x.iter().map(f).collect(), l.y.iter().map(f).collect())
        }
    }
}

/// Sum over all cells of `|forward-difference gradient|^p h^2`, with zero
/// values beyond the mask and the array.
pub fn grad_p_integral(f: &GridField, p: f64) -> Result<f64> {
    check_exponent(p, false)?;
    Ok(grad_p_sum(f.mask(), &f.values, p))
}

pub(crate) fn grad_p_sum(mask: &GridMask, u: &[f64], p: f64) -> f64 {
    let fr = &mask.frame;
    let (lx, ly) = link_lengths(mask, p);
    let h = fr.h;
    let mut total = 0.0;
    for j in 0..fr.ny {
        for i in 0..fr.nx {
            let k = fr.index(i, j);
            let ex = if i + 1 < fr.nx { u[k + 1] } else { 0.0 };
            let ey = if j + 1 < fr.ny { u[k + fr.nx] } else { 0.0 };
            let gx = (ex - u[k]) / (h * lx[k]);
            let gy = (ey - u[k]) / (h * ly[k]);
            let s = gx * gx + gy * gy;
            if s > 0.0 {
                total += if p == 2.0 { s } else { s.powf(0.5 * p) };
            }
        }
    }
    total * fr.cell_area()
}

/// Sum over cells of `|f|^p h^2`.
pub fn lp_integral(f: &GridField, p: f64) -> Result<f64> {
    check_exponent(p, false)?;
    Ok(lp_sum(&f.values, p) * f.mask.frame.cell_area())
}

pub(crate) fn lp_sum(u: &[f64], p: f64) -> f64 {
    u.iter()
        .map(|v| if p == 2.0 { v * v } else { v.abs().powf(p) })
        .sum()
}

/// Cells of the field's mask with `|f| >= t`. The result carries no boundary geometry.
pub fn superlevel_mask(f: &GridField, t: f64) -> Result<GridMask> {
    if !(t >= 0.0) {
        return Err(PfkError::InvalidInput(format!("level {t} must be >= 0")));
    }
    let inside = f
        .values
        .iter()
        .zip(&f.mask.inside)
        .map(|(v, &ins)| ins && v.abs() >= t)
        .collect();
    GridMask::from_cells(f.mask.frame, inside)
}

/// Exact Euclidean distance from each inside cell centre to the nearest
/// outside cell centre (cells beyond the array count as outside).
pub fn distance_transform(m: &GridMask) -> GridField {
    let fr = &m.frame;
    let (w, hgt) = (fr.nx + 2, fr.ny + 2);
    let big = 1e30;
    let mut g = vec![0.0f64; w * hgt];
    for j in 0..fr.ny {
        for i in 0..fr.nx {
            if m.inside[fr.index(i, j)] {
                g[(j + 1) * w + i + 1] = big;
            }
        }
    }
    // columns, then rows
    let mut buf = vec![0.0; w.max(hgt)];
    let mut out = vec![0.0; w.max(hgt)];
    for i in 0..w {
        for j in 0..hgt {
            buf[j] = g[j * w + i];
        }
        edt_1d(&buf[..hgt], &mut out[..hgt]);
        for j in 0..hgt {
            g[j * w + i] = out[j];
        }
    }
    for j in 0..hgt {
        buf[..w].copy_from_slice(&g[j * w..(j + 1) * w]);
        edt_1d(&buf[..w], &mut out[..w]);
        g[j * w..(j + 1) * w].copy_from_slice(&out[..w]);
    }
    let values = (0..fr.len())
        .map(|k| {
            if m.inside[k] {
                let (i, j) = fr.coords(k);
                g[(j + 1) * w + i + 1].sqrt() * fr.h
            } else {
                0.0
            }
        })
        .collect();
    GridField::from_parts_unchecked(Arc::new(m.clone()), values)
}

/// Distance transform sharpened by the recorded boundary crossings: a cell
/// next to a crossing is no farther from the boundary than that crossing.
pub(crate) fn fitted_distance(m: &GridMask) -> Vec<f64> {
    let mut d = distance_transform(m).into_values();
    let Some(links) = &m.links else { return d };
    let fr = &m.frame;
    let h = fr.h;
    for k in 0..fr.len() {
        let (i, j) = fr.coords(k);
        let pairs = [
            ((i + 1 < fr.nx).then(|| k + 1), links.x[k]),
            ((j + 1 < fr.ny).then(|| k + fr.nx), links.y[k]),
        ];
        for (e, theta) in pairs {
            let Some(e) = e else { continue };
            if m.inside[k] && !m.inside[e] {
                d[k] = d[k].min(theta * h);
            } else if !m.inside[k] && m.inside[e] {
                d[e] = d[e].min(theta * h);
            }
        }
    }
    d
}

/// Lower envelope of parabolas (Felzenszwalb-Huttenlocher) for squared distances.
fn edt_1d(f: &[f64], d: &mut [f64]) {
    let n = f.len();
    let mut v = vec![0usize; n];
    let mut z = vec![0.0f64; n + 1];
    let mut k = 0usize;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in 1..n {
        loop {
            let r = v[k];
            let s = ((f[q] + (q * q) as f64) - (f[r] + (r * r) as f64)) / (2.0 * (q as f64 - r as f64));
            if s <= z[k] && k > 0 {
                k -= 1;
                continue;
            }
            if s <= z[k] {
                // k == 0: replace the only parabola
                v[0] = q;
                z[0] = f64::NEG_INFINITY;
                z[1] = f64::INFINITY;
                break;
            }
            k += 1;
            v[k] = q;
            z[k] = s;
            z[k + 1] = f64::INFINITY;
            break;
        }
    }
    k = 0;
    for q in 0..n {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let r = v[k];
        d[q] = (q as f64 - r as f64).powi(2) + f[r];
    }
}

/// Decreasing radial rearrangement at cell level.
///
/// The source has `k` inside cells. The target grid has the same spacing and
/// is centred at the origin; its mask is the `k` cells nearest the origin
/// (ties by row, then column), and the sorted source values are laid out in
/// that order. Boundary links of the target come from the circle of area
/// `k h^2`, widened if needed so that every included centre lies inside it.
pub fn schwarz_rearrange(f: &GridField) -> Result<GridField> {
    if let Some(v) = f.values.iter().find(|v| **v < 0.0) {
        return Err(PfkError::InvalidInput(format!(
            "rearrangement needs nonnegative values, found {v}"
        )));
    }
    let k = f.mask.count;
    if k == 0 {
        return Err(PfkError::InvalidInput("cannot rearrange on an empty mask".into()));
    }
    let h = f.mask.frame.h;
    let r_equal = (k as f64 / std::f64::consts::PI).sqrt() * h;
    let half = (r_equal / h).ceil() as usize + 3;
    let m = 2 * half;
    let frame = GridFrame {
        origin: [-(half as f64) * h, -(half as f64) * h],
        h,
        nx: m,
        ny: m,
    };
    let dist2 = |c: usize| {
        let x = frame.center_of(c);
        x[0] * x[0] + x[1] * x[1]
    };
    let mut order: Vec<usize> = (0..frame.len()).collect();
    order.sort_by(|&a, &b| {
        dist2(a)
            .total_cmp(&dist2(b))
            .then_with(|| frame.coords(a).1.cmp(&frame.coords(b).1))
            .then_with(|| frame.coords(a).0.cmp(&frame.coords(b).0))
    });
    let last = dist2(order[k - 1]).sqrt();
    let radius = r_equal.max(last + MIN_CROSSING * h);

    let mut inside = vec![false; frame.len()];
    for &c in &order[..k] {
        inside[c] = true;
    }
    let mut sorted: Vec<f64> = f.mask.cells().map(|c| f.values[c]).collect();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut values = vec![0.0; frame.len()];
    for (slot, &c) in order[..k].iter().enumerate() {
        values[c] = sorted[slot];
    }

    let mut mask = GridMask::from_cells(frame, inside)?;
    let r2 = radius * radius;
    let crossing = |a: usize, b: usize| {
        let (pa, pb) = (frame.center_of(a), frame.center_of(b));
        let (da, db) = (dist2(a), dist2(b));
        if da < r2 && db > r2 {
            // solve |pa + t (pb - pa)| = radius for t in (0, 1)
            let d = [pb[0] - pa[0], pb[1] - pa[1]];
            let bq = pa[0] * d[0] + pa[1] * d[1];
            let aq = d[0] * d[0] + d[1] * d[1];
            let t = (-bq + (bq * bq - aq * (da - r2)).sqrt()) / aq;
            t.clamp(MIN_CROSSING, 1.0)
        } else {
            1.0
        }
    };
    let mut lx = vec![1.0; frame.len()];
    let mut ly = vec![1.0; frame.len()];
    for j in 0..m {
        for i in 0..m {
            let c = frame.index(i, j);
            for (e, slot) in [(i + 1 < m).then(|| c + 1), (j + 1 < m).then(|| c + m)]
                .into_iter()
                .zip([&mut lx, &mut ly])
            {
                let Some(e) = e else { continue };
                match (mask.inside[c], mask.inside[e]) {
                    (true, false) => slot[c] = crossing(c, e),
                    (false, true) => slot[c] = crossing(e, c),
                    _ => {}
                }
            }
        }
    }
    mask.links = Some(Links { x: lx, y: ly });
    Ok(GridField::from_parts_unchecked(Arc::new(mask), values))
}

/// Area and boundary length of `{v > level}` for values sampled at cell
/// centres, by marching squares over the dual grid. Values beyond the array
/// are taken from the nearest cell, so the array border should lie below the level.
pub fn contour_measure(frame: &GridFrame, values: &[f64], level: f64) -> (f64, f64) {
    let h = frame.h;
    let (nx, ny) = (frame.nx, frame.ny);
    let mut area = 0.0;
    let mut length = 0.0;
    for j in 0..ny.saturating_sub(1) {
        for i in 0..nx.saturating_sub(1) {
            // corners counterclockwise: (i,j), (i+1,j), (i+1,j+1), (i,j+1)
            let pos = [[0.0, 0.0], [h, 0.0], [h, h], [0.0, h]];
            let val = [
                values[frame.index(i, j)] - level,
                values[frame.index(i + 1, j)] - level,
                values[frame.index(i + 1, j + 1)] - level,
                values[frame.index(i, j + 1)] - level,
            ];
            let above = val.map(|v| v > 0.0);
            if above.iter().all(|&a| !a) {
                continue;
            }
            if above.iter().all(|&a| a) {
                area += h * h;
                continue;
            }
            let mut poly: Vec<([f64; 2], bool)> = Vec::with_capacity(8);
            for c in 0..4 {
                let d = (c + 1) % 4;
                if above[c] {
                    poly.push((pos[c], false));
                }
                if above[c] != above[d] {
                    let t = val[c] / (val[c] - val[d]);
                    poly.push((
                        [
                            pos[c][0] + t * (pos[d][0] - pos[c][0]),
                            pos[c][1] + t * (pos[d][1] - pos[c][1]),
                        ],
                        true,
                    ));
                }
            }
            let n = poly.len();
            let mut twice = 0.0;
            for a in 0..n {
                let (pa, ca) = poly[a];
                let (pb, cb) = poly[(a + 1) % n];
                twice += pa[0] * pb[1] - pb[0] * pa[1];
                // an edge between two crossing points that leaves the cell
                // boundary is a contour piece
                if ca && cb && !same_square_edge(pa, pb, h) {
                    length += (pb[0] - pa[0]).hypot(pb[1] - pa[1]);
                }
            }
            area += 0.5 * twice;
        }
    }
    (area, length)
}

fn same_square_edge(a: [f64; 2], b: [f64; 2], h: f64) -> bool {
    (0..2).any(|k| (a[k] == b[k]) && (a[k] == 0.0 || a[k] == h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn unit_square() -> Domain {
        Domain::rectangle(1.0, 1.0).unwrap()
    }

    #[test]
    fn square_rasterizes_to_exact_block() {
        let m = rasterize(&unit_square(), 4).unwrap();
        assert_eq!(m.h(), 0.25);
        assert_eq!((m.frame().nx, m.frame().ny), (6, 6));
        assert_eq!(m.count(), 16);
        for j in 0..6 {
            for i in 0..6 {
                let expect = (1..5).contains(&i) && (1..5).contains(&j);
                assert_eq!(m.is_inside(m.frame().index(i, j)), expect);
            }
        }
        assert_relative_eq!(m.area(), 1.0);
    }

    #[test]
    fn disk_area_converges() {
        let disk = Domain::ball(2, 1.0).unwrap();
        let m = rasterize(&disk, 128).unwrap();
        assert!((m.area() - PI).abs() / PI < 0.01);
        let coarse = (rasterize(&disk, 4).unwrap().area() - PI).abs();
        let fine = (rasterize(&disk, 256).unwrap().area() - PI).abs();
        assert!(fine < coarse);
    }

    #[test]
    fn rasterize_rejects_bad_input() {
        let ball3 = Domain::ball(3, 1.0).unwrap();
        assert_eq!(rasterize(&ball3, 32), Err(PfkError::UnsupportedDimension(3)));
        assert!(matches!(
            rasterize(&unit_square(), 0),
            Err(PfkError::ResolutionTooCoarse(0))
        ));
    }

    #[test]
    fn zero_field_integrals() {
        let m = Arc::new(rasterize(&unit_square(), 8).unwrap());
        let z = GridField::zeros(m);
        assert_eq!(grad_p_integral(&z, 2.0).unwrap(), 0.0);
        assert_eq!(lp_integral(&z, 3.0).unwrap(), 0.0);
        assert!(matches!(
            grad_p_integral(&z, 0.5),
            Err(PfkError::InvalidExponent { .. })
        ));
    }

    #[test]
    fn ramp_discrete_sum_by_hand() {
        // f(x, y) = x on the unit square centred at the origin, h = 1/4.
        // Inside columns have centres x = -3/8, -1/8, 1/8, 3/8.
        let m = rasterize(&unit_square(), 4).unwrap();
        let plain = Arc::new(m.without_boundary_geometry());
        let f = GridField::from_fn(plain, |x| x[0]).unwrap();
        // x-links per inside row (4 rows): two boundary jumps of 3/8 and three
        // interior steps of 1/4, so sum gx^2 = 2 * 9/4 + 3.
        // y-links: every inside column jumps from 0 and back to 0, so
        // sum gy^2 = 2 * (9/4 + 1/4 + 1/4 + 9/4) = 10.
        let per_row_x = 2.0 * 9.0 / 4.0 + 3.0;
        let total = (4.0 * per_row_x + 10.0) * 0.0625;
        assert_relative_eq!(grad_p_integral(&f, 2.0).unwrap(), total, max_relative = 1e-14);

        // With boundary geometry the exit links are half as long (theta = 1/2),
        // which doubles their squared differences at p = 2.
        let fitted = GridField::from_fn(Arc::new(m), |x| x[0]).unwrap();
        let per_row_x = 2.0 * 2.0 * 9.0 / 4.0 + 3.0;
        let total = (4.0 * per_row_x + 2.0 * 10.0) * 0.0625;
        assert_relative_eq!(grad_p_integral(&fitted, 2.0).unwrap(), total, max_relative = 1e-14);
    }

    #[test]
    fn tent_total_variation() {
        let sq = Domain::rectangle(2.0, 2.0).unwrap();
        let m = Arc::new(rasterize(&sq, 256).unwrap());
        let f = GridField::from_fn(m, |x| (1.0 - x[0].abs().max(x[1].abs())).max(0.0)).unwrap();
        // |grad f| = 1 almost everywhere on the square of area 4
        let tv = grad_p_integral(&f, 1.0).unwrap();
        assert!((tv - 4.0).abs() / 4.0 < 0.02, "tv = {tv}");
    }

    #[test]
    fn lp_of_radial_profile() {
        let m = Arc::new(rasterize(&Domain::ball(2, 1.0).unwrap(), 256).unwrap());
        let f = GridField::from_fn(m, |x| 1.0 - x[0].hypot(x[1])).unwrap();
        let v = lp_integral(&f, 2.0).unwrap();
        assert!((v - PI / 6.0).abs() / (PI / 6.0) < 0.01);
        let ones = GridField::from_fn(Arc::new(rasterize(&unit_square(), 16).unwrap()), |_| 1.0).unwrap();
        assert_relative_eq!(lp_integral(&ones, 1.7).unwrap(), 1.0, max_relative = 1e-14);
    }

    #[test]
    fn superlevel_sets() {
        let m = Arc::new(rasterize(&Domain::ball(2, 1.0).unwrap(), 128).unwrap());
        let f = GridField::from_fn(m.clone(), |x| 1.0 - x[0].hypot(x[1])).unwrap();
        assert_eq!(superlevel_mask(&f, 0.0).unwrap().inside(), m.inside());
        assert!(superlevel_mask(&f, 1.5).unwrap().is_empty());
        let half = superlevel_mask(&f, 0.5).unwrap();
        // disk of radius 1/2, up to one cell layer
        let h = m.h();
        let r_lo = 0.5 - h;
        let r_hi = 0.5 + h;
        assert!(half.area() > PI * r_lo * r_lo && half.area() < PI * r_hi * r_hi);
        assert!(superlevel_mask(&f, -1.0).is_err());
    }

    #[test]
    fn distance_transform_examples() {
        let frame = GridFrame {
            origin: [0.0, 0.0],
            h: 0.5,
            nx: 3,
            ny: 3,
        };
        let mut inside = vec![false; 9];
        inside[4] = true;
        let single = GridMask::from_cells(frame, inside).unwrap();
        assert_eq!(distance_transform(&single).values()[4], 0.5);

        let rect = rasterize(&Domain::rectangle(2.0, 1.0).unwrap(), 256).unwrap();
        let dt = distance_transform(&rect);
        assert!((dt.max_abs() - 0.5).abs() / 0.5 < 0.02);
        let disk = rasterize(&Domain::ball(2, 1.0).unwrap(), 256).unwrap();
        assert!((distance_transform(&disk).max_abs() - 1.0).abs() < 0.02);
    }

    #[test]
    fn distance_transform_matches_brute_force() {
        let d = Domain::polygon(vec![[0.0, 0.0], [3.0, 0.0], [3.0, 1.0], [1.0, 1.0], [1.0, 3.0], [0.0, 3.0]]).unwrap();
        let m = rasterize(&d, 24).unwrap();
        let dt = distance_transform(&m);
        let fr = m.frame();
        for k in m.cells() {
            let c = fr.center_of(k);
            let best = (0..fr.len())
                .filter(|&o| !m.is_inside(o))
                .map(|o| {
                    let e = fr.center_of(o);
                    (e[0] - c[0]).hypot(e[1] - c[1])
                })
                .fold(f64::INFINITY, f64::min);
            assert_relative_eq!(dt.values()[k], best, max_relative = 1e-12);
        }
    }

    #[test]
    fn rearranging_an_indicator_gives_nearest_cells() {
        let m = Arc::new(rasterize(&Domain::rectangle(2.0, 1.0).unwrap(), 32).unwrap());
        let f = GridField::from_fn(m.clone(), |x| if x[0] > 0.3 { 1.0 } else { 0.0 }).unwrap();
        let ones = f.values().iter().filter(|&&v| v == 1.0).count();
        let r = schwarz_rearrange(&f).unwrap();
        assert_eq!(r.mask().count(), m.count());
        let fr = *r.mask().frame();
        let mut by_dist: Vec<usize> = r.mask().cells().collect();
        by_dist.sort_by(|&a, &b| {
            let (ca, cb) = (fr.center_of(a), fr.center_of(b));
            (ca[0].powi(2) + ca[1].powi(2))
                .total_cmp(&(cb[0].powi(2) + cb[1].powi(2)))
                .then(fr.coords(a).1.cmp(&fr.coords(b).1))
                .then(fr.coords(a).0.cmp(&fr.coords(b).0))
        });
        for (rank, &c) in by_dist.iter().enumerate() {
            assert_eq!(r.values()[c], if rank < ones { 1.0 } else { 0.0 });
        }
        assert!(schwarz_rearrange(&f.scaled(-1.0)).is_err());
    }

    #[test]
    fn contour_measure_of_a_disk() {
        let m = rasterize(&Domain::rectangle(3.0, 3.0).unwrap(), 300).unwrap();
        let fr = *m.frame();
        let vals: Vec<f64> = (0..fr.len())
            .map(|k| {
                let c = fr.center_of(k);
                1.0 - c[0].hypot(c[1])
            })
            .collect();
        let (a, l) = contour_measure(&fr, &vals, 0.0);
        assert_relative_eq!(a, PI, max_relative = 1e-3);
        assert_relative_eq!(l, 2.0 * PI, max_relative = 1e-3);
    }

    #[test]
    fn csv_export_has_header_and_rows() {
        let m = Arc::new(rasterize(&unit_square(), 4).unwrap());
        let f = GridField::from_fn(m, |_| 1.0).unwrap();
        let csv = f.to_csv();
        let mut lines = csv.lines();
        let header = lines.next().unwrap();
        assert!(header.starts_with("# {\"origin\":"));
        assert!(header.contains("\"nx\":6"));
        assert_eq!(lines.count(), 6);
    }
}
