use std::fmt;
use std::sync::Arc;

use crate::discretize::{GridField, GridMask};
use crate::error::{PfkError, Result};
use crate::geometry::unit_sphere_area;

const GAUSS_NODES: [f64; 8] = [
    -0.960_289_856_497_536_3,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GAUSS_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_26,
    0.222_381_034_453_374_47,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362,
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_47,
    0.101_228_536_290_376_26,
];
const PANELS: usize = 2000;

/// `n w_n * integral_0^R g(r) r^(n-1) dr`, i.e. the integral of the radial
/// function `g(|x|)` over `B_R`. Panels are graded towards the origin so that
/// integrable singularities at `r = 0` are resolved.
pub fn radial_integral(n: usize, radius: f64, g: impl Fn(f64) -> f64) -> Result<f64> {
    let area = unit_sphere_area(n)?;
    let node = |k: usize| radius * (k as f64 / PANELS as f64).powi(3);
    let mut total = 0.0;
    for k in 0..PANELS {
        let (a, b) = (node(k), node(k + 1));
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        let mut s = 0.0;
        for (x, w) in GAUSS_NODES.iter().zip(GAUSS_WEIGHTS) {
            let r = mid + half * x;
            s += w * g(r) * r.powi(n as i32 - 1);
        }
        total += half * s;
    }
    Ok(area * total)
}

type Profile = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A radial test function `f(|x|)` on `B_R` in `R^n` with `f(R) = 0`, given
/// with its derivative.
#[derive(Clone)]
pub struct RadialFunction {
    pub n: usize,
    pub radius: f64,
    pub label: String,
    value: Profile,
    slope: Profile,
}

impl fmt::Debug for RadialFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialFunction")
            .field("n", &self.n)
            .field("radius", &self.radius)
            .field("label", &self.label)
            .finish()
    }
}

impl RadialFunction {
    pub fn new(
        n: usize,
        radius: f64,
        label: impl Into<String>,
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        slope: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if n < 2 {
            return Err(PfkError::InvalidDimension(n as i64));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(PfkError::InvalidInput(format!("radius must be positive, got {radius}")));
        }
        Ok(Self {
            n,
            radius,
            label: label.into(),
            value: Arc::new(value),
            slope: Arc::new(slope),
        })
    }

    /// `1 - r/R`.
    pub fn tent(n: usize, radius: f64) -> Result<Self> {
        Self::new(n, radius, "tent", move |r| 1.0 - r / radius, move |_| -1.0 / radius)
    }

    /// `1 - (r/R)^a`; with `a = (p-n)/(p-1)` this is the point-capacity potential.
    pub fn power(n: usize, radius: f64, a: f64) -> Result<Self> {
        if !(a > 0.0) {
            return Err(PfkError::InvalidInput(format!("exponent must be positive, got {a}")));
        }
        Self::new(
            n,
            radius,
            format!("power({a:.4})"),
            move |r| 1.0 - (r / radius).powf(a),
            move |r| -a / radius * (r / radius).powf(a - 1.0),
        )
    }

    /// `(1 - (r/R)^2)^2`.
    pub fn bump(n: usize, radius: f64) -> Result<Self> {
        Self::new(
            n,
            radius,
            "bump",
            move |r| (1.0 - (r / radius).powi(2)).powi(2),
            move |r| -4.0 * r / (radius * radius) * (1.0 - (r / radius).powi(2)),
        )
    }

    /// `exp(-4 r^2/R^2) - exp(-4)`.
    pub fn gaussian(n: usize, radius: f64) -> Result<Self> {
        Self::new(
            n,
            radius,
            "gaussian",
            move |r| (-4.0 * (r / radius).powi(2)).exp() - (-4.0f64).exp(),
            move |r| -8.0 * r / (radius * radius) * (-4.0 * (r / radius).powi(2)).exp(),
        )
    }

    /// `(1 + r^2)^(-1/2) - (1 + R^2)^(-1/2)`: the Sobolev extremal shape for
    /// `n = 3, p = 2`, shifted to vanish at `R`.
    pub fn talenti(n: usize, radius: f64) -> Result<Self> {
        let tail = (1.0 + radius * radius).powf(-0.5);
        Self::new(
            n,
            radius,
            "talenti",
            move |r| (1.0 + r * r).powf(-0.5) - tail,
            move |r| -r * (1.0 + r * r).powf(-1.5),
        )
    }

    pub fn eval(&self, r: f64) -> f64 {
        if r >= self.radius {
            0.0
        } else {
            (self.value)(r)
        }
    }

    pub fn slope(&self, r: f64) -> f64 {
        if r >= self.radius {
            0.0
        } else {
            (self.slope)(r)
        }
    }

    pub fn sup(&self) -> f64 {
        self.eval(0.0).abs()
    }

    /// `integral |grad f|^p dV`.
    pub fn grad_p_integral(&self, p: f64) -> Result<f64> {
        radial_integral(self.n, self.radius, |r| self.slope(r).abs().powf(p))
    }

    /// `integral |f|^q dV`.
    pub fn lp_integral(&self, q: f64) -> Result<f64> {
        radial_integral(self.n, self.radius, |r| self.eval(r).abs().powf(q))
    }

    /// Radius of `{f >= t}` for a profile that decreases from `f(0)` to 0.
    pub fn superlevel_radius(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return self.radius;
        }
        if t > self.sup() {
            return 0.0;
        }
        let (mut lo, mut hi) = (0.0, self.radius);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if self.eval(mid) >= t {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// Whether `f` decreases on a sample of 1000 radii.
    pub fn is_decreasing(&self) -> bool {
        let k = 1000;
        (1..=k).all(|i| {
            let (a, b) = ((i - 1) as f64 / k as f64, i as f64 / k as f64);
            self.eval(b * self.radius) <= self.eval(a * self.radius)
        })
    }

    /// Samples `f(|x - c|)` on a planar mask.
    pub fn to_grid(&self, mask: Arc<GridMask>, c: [f64; 2]) -> Result<GridField> {
        if self.n != 2 {
            return Err(PfkError::UnsupportedDimension(self.n));
        }
        GridField::from_fn(mask, |x| self.eval((x[0] - c[0]).hypot(x[1] - c[1])))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn integrates_polynomials() {
        // volume of B_2 in R^3
        assert_relative_eq!(radial_integral(3, 2.0, |_| 1.0).unwrap(), 32.0 * PI / 3.0, max_relative = 1e-13);
        // integral of r^2 over the unit disk
        assert_relative_eq!(radial_integral(2, 1.0, |r| r * r).unwrap(), PI / 2.0, max_relative = 1e-13);
    }

    #[test]
    fn tent_integrals() {
        let f = RadialFunction::tent(2, 1.0).unwrap();
        assert_relative_eq!(f.grad_p_integral(2.0).unwrap(), PI, max_relative = 1e-12);
        assert_relative_eq!(f.lp_integral(2.0).unwrap(), PI / 6.0, max_relative = 1e-12);
        assert_relative_eq!(f.superlevel_radius(0.25), 0.75, max_relative = 1e-12);
        assert!(f.is_decreasing());
    }

    #[test]
    fn singular_power_profile() {
        // 1 - r^(1/2) in the unit disk at p = 3 has energy equal to the point capacity pi/2
        let f = RadialFunction::power(2, 1.0, 0.5).unwrap();
        assert_relative_eq!(f.grad_p_integral(3.0).unwrap(), PI / 2.0, max_relative = 1e-6);
    }
}
