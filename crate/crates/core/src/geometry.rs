//! Parametric domains and their geometric functionals.
//!
//! Every domain is validated on construction and immutable afterwards. Balls
//! and annuli carry an arbitrary dimension `n >= 2`; rectangles and polygons
//! are planar. Grid code downstream only accepts planar domains.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::discretize;
use crate::error::{PfkError, Result};

/// Volume of the unit ball in `R^n`.
///
/// Uses the recursion `w_n = 2 pi / n * w_{n-2}` from `w_0 = 1`, `w_1 = 2`,
/// which is exact up to rounding for every integer dimension.
pub fn unit_ball_volume(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(PfkError::InvalidDimension(0));
    }
    let (mut k, mut w) = if n % 2 == 0 { (0, 1.0) } else { (1, 2.0) };
    while k < n {
        k += 2;
        w *= 2.0 * PI / k as f64;
    }
    Ok(w)
}

/// Surface area of the unit sphere `S^{n-1}`, i.e. `n * w_n`.
pub fn unit_sphere_area(n: usize) -> Result<f64> {
    Ok(n as f64 * unit_ball_volume(n)?)
}

/// The geometric variants a [`Domain`] can take.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Ball {
        n: usize,
        radius: f64,
        center: Vec<f64>,
    },
    /// Axis-aligned rectangle `[cx - a/2, cx + a/2] x [cy - b/2, cy + b/2]`.
    Rectangle { a: f64, b: f64, center: [f64; 2] },
    /// Simple polygon with counterclockwise vertices.
    Polygon { vertices: Vec<[f64; 2]> },
    Annulus {
        n: usize,
        inner: f64,
        outer: f64,
        center: Vec<f64>,
    },
}

/// A validated bounded open set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DomainRecord", into = "DomainRecord")]
pub struct Domain {
    shape: Shape,
}

/// Structured-text form of a domain, shared by inline CLI arguments and
/// catalog files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum DomainRecord {
    Ball {
        #[serde(default = "default_dim")]
        n: usize,
        r: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<Vec<f64>>,
    },
    Rectangle {
        a: f64,
        b: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<[f64; 2]>,
    },
    Polygon { vertices: Vec<[f64; 2]> },
    Annulus {
        #[serde(default = "default_dim")]
        n: usize,
        rho: f64,
        r: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<Vec<f64>>,
    },
}

fn default_dim() -> usize {
    2
}

impl TryFrom<DomainRecord> for Domain {
    type Error = PfkError;

    fn try_from(rec: DomainRecord) -> Result<Self> {
        match rec {
            DomainRecord::Ball { n, r, center } => match center {
                Some(c) => Domain::ball_at(n, r, c),
                None => Domain::ball(n, r),
            },
            DomainRecord::Rectangle { a, b, center } => {
                Domain::rectangle_at(a, b, center.unwrap_or([0.0, 0.0]))
            }
            DomainRecord::Polygon { vertices } => Domain::polygon(vertices),
            DomainRecord::Annulus { n, rho, r, center } => {
                let c = center.unwrap_or_else(|| vec![0.0; n]);
                Domain::annulus_at(n, rho, r, c)
            }
        }
    }
}

impl From<Domain> for DomainRecord {
    fn from(d: Domain) -> Self {
        let origin = |c: &[f64]| c.iter().all(|&x| x == 0.0);
        match d.shape {
            Shape::Ball { n, radius, center } => DomainRecord::Ball {
                n,
                r: radius,
                center: (!origin(&center)).then_some(center),
            },
            Shape::Rectangle { a, b, center } => DomainRecord::Rectangle {
                a,
                b,
                center: (!origin(&center)).then_some(center),
            },
            Shape::Polygon { vertices } => DomainRecord::Polygon { vertices },
            Shape::Annulus {
                n,
                inner,
                outer,
                center,
            } => DomainRecord::Annulus {
                n,
                rho: inner,
                r: outer,
                center: (!origin(&center)).then_some(center),
            },
        }
    }
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(PfkError::InvalidDomain(format!(
            "{name} must be positive and finite, got {x}"
        )))
    }
}

fn dimension(n: usize) -> Result<()> {
    if n < 2 {
        Err(PfkError::InvalidDomain(format!(
            "dimension must be at least 2, got {n}"
        )))
    } else {
        Ok(())
    }
}

fn finite_center(c: &[f64], n: usize) -> Result<()> {
    if c.len() != n {
        return Err(PfkError::InvalidDomain(format!(
            "center has {} coordinates, expected {n}",
            c.len()
        )));
    }
    if c.iter().any(|x| !x.is_finite()) {
        return Err(PfkError::InvalidDomain("center is not finite".into()));
    }
    Ok(())
}

impl Domain {
    pub fn ball(n: usize, radius: f64) -> Result<Self> {
        Self::ball_at(n, radius, vec![0.0; n])
    }

    pub fn ball_at(n: usize, radius: f64, center: Vec<f64>) -> Result<Self> {
        dimension(n)?;
        positive("radius", radius)?;
        finite_center(&center, n)?;
        Ok(Self {
            shape: Shape::Ball { n, radius, center },
        })
    }

    /// Rectangle with sides `a` (along x) and `b` (along y), centred at the origin.
    pub fn rectangle(a: f64, b: f64) -> Result<Self> {
        Self::rectangle_at(a, b, [0.0, 0.0])
    }

    pub fn rectangle_at(a: f64, b: f64, center: [f64; 2]) -> Result<Self> {
        positive("side a", a)?;
        positive("side b", b)?;
        finite_center(&center, 2)?;
        Ok(Self {
            shape: Shape::Rectangle { a, b, center },
        })
    }

    /// Simple polygon. Clockwise input is reoriented; self-intersecting or
    /// zero-area input is rejected.
    pub fn polygon(mut vertices: Vec<[f64; 2]>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(PfkError::InvalidDomain(
                "polygon needs at least 3 vertices".into(),
            ));
        }
        if vertices.iter().flatten().any(|x| !x.is_finite()) {
            return Err(PfkError::InvalidDomain("polygon vertex is not finite".into()));
        }
        let area = signed_area(&vertices);
        if area.abs() <= f64::EPSILON * bbox_scale(&vertices).powi(2) {
            return Err(PfkError::InvalidDomain("degenerate polygon (zero area)".into()));
        }
        if area < 0.0 {
            vertices.reverse();
        }
        if !is_simple(&vertices) {
            return Err(PfkError::InvalidDomain(
                "polygon edges intersect (not simple)".into(),
            ));
        }
        Ok(Self {
            shape: Shape::Polygon { vertices },
        })
    }

    pub fn annulus(n: usize, inner: f64, outer: f64) -> Result<Self> {
        Self::annulus_at(n, inner, outer, vec![0.0; n])
    }

    pub fn annulus_at(n: usize, inner: f64, outer: f64, center: Vec<f64>) -> Result<Self> {
        dimension(n)?;
        positive("inner radius", inner)?;
        positive("outer radius", outer)?;
        if inner >= outer {
            return Err(PfkError::InvalidDomain(format!(
                "annulus needs inner < outer, got {inner} >= {outer}"
            )));
        }
        finite_center(&center, n)?;
        Ok(Self {
            shape: Shape::Annulus {
                n,
                inner,
                outer,
                center,
            },
        })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn record(&self) -> DomainRecord {
        self.clone().into()
    }

    pub fn dim(&self) -> usize {
        match &self.shape {
            Shape::Ball { n, .. } | Shape::Annulus { n, .. } => *n,
            Shape::Rectangle { .. } | Shape::Polygon { .. } => 2,
        }
    }

    pub fn is_ball(&self) -> bool {
        matches!(self.shape, Shape::Ball { .. })
    }

    pub fn is_convex(&self) -> bool {
        match &self.shape {
            Shape::Ball { .. } | Shape::Rectangle { .. } => true,
            Shape::Annulus { .. } => false,
            Shape::Polygon { vertices } => is_convex_ccw(vertices),
        }
    }

    /// Short human-readable tag, e.g. `ball(n=2,r=1)`.
    pub fn label(&self) -> String {
        match &self.shape {
            Shape::Ball { n, radius, .. } => format!("ball(n={n},r={radius})"),
            Shape::Rectangle { a, b, .. } => format!("rectangle({a}x{b})"),
            Shape::Polygon { vertices } => format!("polygon({} vertices)", vertices.len()),
            Shape::Annulus {
                n, inner, outer, ..
            } => format!("annulus(n={n},{inner}<r<{outer})"),
        }
    }

    pub fn volume(&self) -> f64 {
        match &self.shape {
            Shape::Ball { n, radius, .. } => ball_volume(*n, *radius),
            Shape::Rectangle { a, b, .. } => a * b,
            Shape::Polygon { vertices } => signed_area(vertices),
            Shape::Annulus {
                n, inner, outer, ..
            } => ball_volume(*n, *outer) - ball_volume(*n, *inner),
        }
    }

    /// Boundary measure; for an annulus both spheres count.
    pub fn perimeter(&self) -> f64 {
        match &self.shape {
            Shape::Ball { n, radius, .. } => sphere_area(*n, *radius),
            Shape::Rectangle { a, b, .. } => 2.0 * (a + b),
            Shape::Polygon { vertices } => polygon_perimeter(vertices),
            Shape::Annulus {
                n, inner, outer, ..
            } => sphere_area(*n, *outer) + sphere_area(*n, *inner),
        }
    }

    /// Largest distance from an interior point to the boundary.
    pub fn inradius(&self) -> f64 {
        match &self.shape {
            Shape::Ball { radius, .. } => *radius,
            Shape::Rectangle { a, b, .. } => 0.5 * a.min(*b),
            Shape::Annulus { inner, outer, .. } => 0.5 * (outer - inner),
            Shape::Polygon { .. } => self.incenter_2d().1,
        }
    }

    /// A point realizing the inradius together with the inradius. Planar
    /// domains only; for an annulus any point of the middle circle works and
    /// the one on the positive x axis is returned.
    pub fn incenter_2d(&self) -> ([f64; 2], f64) {
        match &self.shape {
            Shape::Ball { center, radius, .. } => ([center[0], center[1]], *radius),
            Shape::Rectangle { a, b, center } => (*center, 0.5 * a.min(*b)),
            Shape::Annulus {
                inner,
                outer,
                center,
                ..
            } => (
                [center[0] + 0.5 * (inner + outer), center[1]],
                0.5 * (outer - inner),
            ),
            Shape::Polygon { vertices } => polygon_incenter(self, vertices),
        }
    }

    /// Equal-volume ball centred at the origin.
    pub fn schwarz_ball(&self) -> Domain {
        let n = self.dim();
        let w = unit_ball_volume(n).expect("n >= 2");
        let r = (self.volume() / w).powf(1.0 / n as f64);
        Domain::ball(n, r).expect("positive volume")
    }

    /// `perimeter / volume^((n-1)/n)`; at least `n w_n^(1/n)`.
    pub fn isoperimetric_ratio(&self) -> f64 {
        let n = self.dim() as f64;
        self.perimeter() / self.volume().powf((n - 1.0) / n)
    }

    /// Dilation `x -> c x` about the origin.
    pub fn scaled(&self, c: f64) -> Result<Domain> {
        positive("scale factor", c)?;
        let scale = |v: &[f64]| v.iter().map(|x| x * c).collect::<Vec<_>>();
        match &self.shape {
            Shape::Ball { n, radius, center } => Domain::ball_at(*n, radius * c, scale(center)),
            Shape::Rectangle { a, b, center } => {
                Domain::rectangle_at(a * c, b * c, [center[0] * c, center[1] * c])
            }
            Shape::Polygon { vertices } => {
                Domain::polygon(vertices.iter().map(|v| [v[0] * c, v[1] * c]).collect())
            }
            Shape::Annulus {
                n,
                inner,
                outer,
                center,
            } => Domain::annulus_at(*n, inner * c, outer * c, scale(center)),
        }
    }

    /// Homothetic copy shrunk by `s` about the domain's centre (centroid for
    /// polygons).
    pub fn shrunk(&self, s: f64) -> Result<Domain> {
        positive("shrink factor", s)?;
        match &self.shape {
            Shape::Ball { n, radius, center } => Domain::ball_at(*n, radius * s, center.clone()),
            Shape::Rectangle { a, b, center } => Domain::rectangle_at(a * s, b * s, *center),
            Shape::Polygon { vertices } => {
                let c = polygon_centroid(vertices);
                Domain::polygon(
                    vertices
                        .iter()
                        .map(|v| [c[0] + s * (v[0] - c[0]), c[1] + s * (v[1] - c[1])])
                        .collect(),
                )
            }
            Shape::Annulus {
                n,
                inner,
                outer,
                center,
            } => Domain::annulus_at(*n, inner * s, outer * s, center.clone()),
        }
    }

    /// Axis-aligned bounding box `(min, max)` of a planar domain.
    pub fn bounding_box(&self) -> Result<([f64; 2], [f64; 2])> {
        match &self.shape {
            Shape::Ball { n: 2, radius, center } | Shape::Annulus { n: 2, outer: radius, center, .. } => Ok((
                [center[0] - radius, center[1] - radius],
                [center[0] + radius, center[1] + radius],
            )),
            Shape::Rectangle { a, b, center } => Ok((
                [center[0] - 0.5 * a, center[1] - 0.5 * b],
                [center[0] + 0.5 * a, center[1] + 0.5 * b],
            )),
            Shape::Polygon { vertices } => {
                let mut lo = [f64::INFINITY; 2];
                let mut hi = [f64::NEG_INFINITY; 2];
                for v in vertices {
                    for k in 0..2 {
                        lo[k] = lo[k].min(v[k]);
                        hi[k] = hi[k].max(v[k]);
                    }
                }
                Ok((lo, hi))
            }
            _ => Err(PfkError::UnsupportedDimension(self.dim())),
        }
    }

    /// Membership test for a planar point (open set: boundary points are outside).
    pub fn contains(&self, x: [f64; 2]) -> bool {
        match &self.shape {
            Shape::Ball { radius, center, .. } => {
                sq(x[0] - center[0]) + sq(x[1] - center[1]) < radius * radius
            }
            Shape::Rectangle { a, b, center } => {
                (x[0] - center[0]).abs() < 0.5 * a && (x[1] - center[1]).abs() < 0.5 * b
            }
            Shape::Polygon { vertices } => point_in_polygon(vertices, x),
            Shape::Annulus {
                inner,
                outer,
                center,
                ..
            } => {
                let r2 = sq(x[0] - center[0]) + sq(x[1] - center[1]);
                inner * inner < r2 && r2 < outer * outer
            }
        }
    }

    /// Euclidean distance from a planar point to the boundary.
    pub fn boundary_distance(&self, x: [f64; 2]) -> f64 {
        match &self.shape {
            Shape::Ball { radius, center, .. } => {
                ((x[0] - center[0]).hypot(x[1] - center[1]) - radius).abs()
            }
            Shape::Rectangle { a, b, center } => {
                let dx = (x[0] - center[0]).abs() - 0.5 * a;
                let dy = (x[1] - center[1]).abs() - 0.5 * b;
                if dx <= 0.0 && dy <= 0.0 {
                    (-dx).min(-dy)
                } else {
                    dx.max(0.0).hypot(dy.max(0.0))
                }
            }
            Shape::Polygon { vertices } => polygon_edges(vertices)
                .map(|(p, q)| segment_distance(x, p, q))
                .fold(f64::INFINITY, f64::min),
            Shape::Annulus {
                inner,
                outer,
                center,
                ..
            } => {
                let r = (x[0] - center[0]).hypot(x[1] - center[1]);
                (r - inner).abs().min((outer - r).abs())
            }
        }
    }

    /// Distance from an interior point `x` along the unit direction `dir` to
    /// the first boundary crossing.
    pub fn ray_exit(&self, x: [f64; 2], dir: [f64; 2]) -> f64 {
        match &self.shape {
            Shape::Ball { radius, center, .. } => {
                circle_exit([x[0] - center[0], x[1] - center[1]], dir, *radius)
            }
            Shape::Rectangle { a, b, center } => {
                let mut t = f64::INFINITY;
                let half = [0.5 * a, 0.5 * b];
                for k in 0..2 {
                    let rel = x[k] - center[k];
                    if dir[k] > 0.0 {
                        t = t.min((half[k] - rel) / dir[k]);
                    } else if dir[k] < 0.0 {
                        t = t.min((-half[k] - rel) / dir[k]);
                    }
                }
                t.max(0.0)
            }
            Shape::Polygon { vertices } => polygon_edges(vertices)
                .filter_map(|(p, q)| ray_segment(x, dir, p, q))
                .fold(f64::INFINITY, f64::min),
            Shape::Annulus {
                inner,
                outer,
                center,
                ..
            } => {
                let rel = [x[0] - center[0], x[1] - center[1]];
                let t_out = circle_exit(rel, dir, *outer);
                match circle_entry(rel, dir, *inner) {
                    Some(t_in) => t_out.min(t_in),
                    None => t_out,
                }
            }
        }
    }

    /// Area of the inner parallel set `{x : dist(x, boundary) > t}` of a
    /// convex planar domain.
    pub fn inner_parallel_area(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(PfkError::InvalidInput(format!("offset {t} must be >= 0")));
        }
        match &self.shape {
            Shape::Ball { n: 2, radius, .. } => Ok(PI * sq((radius - t).max(0.0))),
            Shape::Rectangle { a, b, .. } => {
                Ok((a - 2.0 * t).max(0.0) * (b - 2.0 * t).max(0.0))
            }
            Shape::Polygon { vertices } if is_convex_ccw(vertices) => {
                Ok(signed_area(&inset_convex(vertices, t)).max(0.0))
            }
            _ => Err(PfkError::Unsupported(format!(
                "inner parallel area needs a convex planar domain, got {}",
                self.label()
            ))),
        }
    }
}

fn sq(x: f64) -> f64 {
    x * x
}

fn ball_volume(n: usize, r: f64) -> f64 {
    unit_ball_volume(n).expect("n >= 2") * r.powi(n as i32)
}

fn sphere_area(n: usize, r: f64) -> f64 {
    unit_sphere_area(n).expect("n >= 2") * r.powi(n as i32 - 1)
}

fn bbox_scale(v: &[[f64; 2]]) -> f64 {
    v.iter()
        .flat_map(|p| p.iter())
        .fold(0.0f64, |m, x| m.max(x.abs()))
        .max(1.0)
}

fn polygon_edges(v: &[[f64; 2]]) -> impl Iterator<Item = ([f64; 2], [f64; 2])> + '_ {
    (0..v.len()).map(move |i| (v[i], v[(i + 1) % v.len()]))
}

/// Shoelace formula; positive for counterclockwise order.
pub(crate) fn signed_area(v: &[[f64; 2]]) -> f64 {
    0.5 * polygon_edges(v)
        .map(|(p, q)| p[0] * q[1] - q[0] * p[1])
        .sum::<f64>()
}

fn polygon_perimeter(v: &[[f64; 2]]) -> f64 {
    polygon_edges(v)
        .map(|(p, q)| (q[0] - p[0]).hypot(q[1] - p[1]))
        .sum()
}

fn polygon_centroid(v: &[[f64; 2]]) -> [f64; 2] {
    let a = signed_area(v);
    let (mut cx, mut cy) = (0.0, 0.0);
    for (p, q) in polygon_edges(v) {
        let cross = p[0] * q[1] - q[0] * p[1];
        cx += (p[0] + q[0]) * cross;
        cy += (p[1] + q[1]) * cross;
    }
    [cx / (6.0 * a), cy / (6.0 * a)]
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn is_convex_ccw(v: &[[f64; 2]]) -> bool {
    let n = v.len();
    (0..n).all(|i| cross(v[i], v[(i + 1) % n], v[(i + 2) % n]) >= 0.0)
}

fn segments_intersect(p1: [f64; 2], p2: [f64; 2], q1: [f64; 2], q2: [f64; 2]) -> bool {
    let d1 = cross(q1, q2, p1);
    let d2 = cross(q1, q2, p2);
    let d3 = cross(p1, p2, q1);
    let d4 = cross(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    let on = |a: [f64; 2], b: [f64; 2], c: [f64; 2], d: f64| {
        d == 0.0
            && c[0] >= a[0].min(b[0])
            && c[0] <= a[0].max(b[0])
            && c[1] >= a[1].min(b[1])
            && c[1] <= a[1].max(b[1])
    };
    on(q1, q2, p1, d1) || on(q1, q2, p2, d2) || on(p1, p2, q1, d3) || on(p1, p2, q2, d4)
}

fn is_simple(v: &[[f64; 2]]) -> bool {
    let n = v.len();
    for i in 0..n {
        let (a1, a2) = (v[i], v[(i + 1) % n]);
        if a1 == a2 {
            return false;
        }
        for j in i + 1..n {
            // adjacent edges share a vertex by construction
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            if segments_intersect(a1, a2, v[j], v[(j + 1) % n]) {
                return false;
            }
        }
    }
    true
}

fn point_in_polygon(v: &[[f64; 2]], x: [f64; 2]) -> bool {
    let mut inside = false;
    for (p, q) in polygon_edges(v) {
        if segment_distance(x, p, q) == 0.0 {
            return false;
        }
        if (p[1] > x[1]) != (q[1] > x[1]) {
            let xc = p[0] + (x[1] - p[1]) / (q[1] - p[1]) * (q[0] - p[0]);
            if x[0] < xc {
                inside = !inside;
            }
        }
    }
    inside
}

fn segment_distance(x: [f64; 2], p: [f64; 2], q: [f64; 2]) -> f64 {
    let d = [q[0] - p[0], q[1] - p[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let t = (((x[0] - p[0]) * d[0] + (x[1] - p[1]) * d[1]) / len2).clamp(0.0, 1.0);
    (x[0] - p[0] - t * d[0]).hypot(x[1] - p[1] - t * d[1])
}

fn ray_segment(x: [f64; 2], dir: [f64; 2], p: [f64; 2], q: [f64; 2]) -> Option<f64> {
    let e = [q[0] - p[0], q[1] - p[1]];
    let denom = dir[0] * e[1] - dir[1] * e[0];
    if denom == 0.0 {
        return None;
    }
    let w = [p[0] - x[0], p[1] - x[1]];
    let t = (w[0] * e[1] - w[1] * e[0]) / denom;
    let s = (w[0] * dir[1] - w[1] * dir[0]) / denom;
    (t >= 0.0 && (0.0..=1.0).contains(&s)).then_some(t)
}

/// Exit distance from a point inside the circle of radius `r` about the origin.
fn circle_exit(rel: [f64; 2], dir: [f64; 2], r: f64) -> f64 {
    let b = rel[0] * dir[0] + rel[1] * dir[1];
    let c = rel[0] * rel[0] + rel[1] * rel[1] - r * r;
    (-b + (b * b - c).max(0.0).sqrt()).max(0.0)
}

/// Entry distance into the disk of radius `r` from a point outside it, if the ray hits.
fn circle_entry(rel: [f64; 2], dir: [f64; 2], r: f64) -> Option<f64> {
    let b = rel[0] * dir[0] + rel[1] * dir[1];
    let c = rel[0] * rel[0] + rel[1] * rel[1] - r * r;
    let disc = b * b - c;
    if disc < 0.0 {
        return None;
    }
    let t = -b - disc.sqrt();
    (t >= 0.0).then_some(t)
}

/// Inner parallel polygon of a convex CCW polygon: clip by every edge's
/// half-plane shifted inwards by `t`.
fn inset_convex(v: &[[f64; 2]], t: f64) -> Vec<[f64; 2]> {
    let mut poly: Vec<[f64; 2]> = v.to_vec();
    for (p, q) in polygon_edges(v) {
        let e = [q[0] - p[0], q[1] - p[1]];
        let len = e[0].hypot(e[1]);
        // inward normal of a CCW edge
        let nrm = [-e[1] / len, e[0] / len];
        let offset = nrm[0] * p[0] + nrm[1] * p[1] + t;
        let side = |x: [f64; 2]| nrm[0] * x[0] + nrm[1] * x[1] - offset;
        let mut out = Vec::with_capacity(poly.len() + 1);
        for i in 0..poly.len() {
            let a = poly[i];
            let b = poly[(i + 1) % poly.len()];
            let (sa, sb) = (side(a), side(b));
            if sa >= 0.0 {
                out.push(a);
            }
            if (sa >= 0.0) != (sb >= 0.0) {
                let s = sa / (sa - sb);
                out.push([a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]);
            }
        }
        poly = out;
        if poly.len() < 3 {
            return Vec::new();
        }
    }
    poly
}

/// Maximum of the boundary distance: coarse candidates from a distance
/// transform, refined by compass search on the exact distance.
fn polygon_incenter(d: &Domain, vertices: &[[f64; 2]]) -> ([f64; 2], f64) {
    const RESOLUTION: usize = 256;
    const CANDIDATES: usize = 8;
    let mask = discretize::rasterize(d, RESOLUTION).expect("valid polygon rasterizes");
    let dt = discretize::distance_transform(&mask);
    let mut cells: Vec<usize> = (0..dt.values().len())
        .filter(|&k| mask.is_inside(k))
        .collect();
    cells.sort_by(|&a, &b| dt.values()[b].total_cmp(&dt.values()[a]).then(a.cmp(&b)));
    let h = mask.frame().h;
    let objective = |x: [f64; 2]| {
        if point_in_polygon(vertices, x) {
            d.boundary_distance(x)
        } else {
            -d.boundary_distance(x)
        }
    };
    const D: f64 = std::f64::consts::FRAC_1_SQRT_2;
    const DIRECTIONS: [[f64; 2]; 8] = [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0], [D, D], [-D, D], [D, -D], [-D, -D]];
    let mut best = ([0.0, 0.0], f64::NEG_INFINITY);
    for &k in cells.iter().take(CANDIDATES) {
        let mut x = mask.frame().center_of(k);
        let mut fx = objective(x);
        let mut step = h;
        while step > 1e-12 * h.max(1.0) {
            let mut moved = false;
            for dir in DIRECTIONS {
                let y = [x[0] + step * dir[0], x[1] + step * dir[1]];
                let fy = objective(y);
                if fy > fx {
                    x = y;
                    fx = fy;
                    moved = true;
                }
            }
            if !moved {
                step *= 0.5;
            }
        }
        if fx > best.1 {
            best = (x, fx);
        }
    }
    best
}
