//! Closest-point projection onto smooth parametric closed curves.

use super::vec2::Vec2;

pub trait CurveParam {
    fn at(&self, t: f64) -> Vec2;
    fn d1(&self, t: f64) -> Vec2;
    fn d2(&self, t: f64) -> Vec2;
}

pub struct EllipseCurve {
    pub center: Vec2,
    pub a: f64,
    pub b: f64,
}

impl CurveParam for EllipseCurve {
    fn at(&self, t: f64) -> Vec2 {
        self.center + Vec2::new(self.a * t.cos(), self.b * t.sin())
    }
    fn d1(&self, t: f64) -> Vec2 {
        Vec2::new(-self.a * t.sin(), self.b * t.cos())
    }
    fn d2(&self, t: f64) -> Vec2 {
        Vec2::new(-self.a * t.cos(), -self.b * t.sin())
    }
}

/// Polar graph `r(θ) = r0 + Σ ac[k-1] cos kθ + Σ as[k-1] sin kθ` about `center`.
pub struct FourierCurve<'a> {
    pub center: Vec2,
    pub base: f64,
    pub cos_coeffs: &'a [f64],
    pub sin_coeffs: &'a [f64],
}

impl FourierCurve<'_> {
    pub fn radius(&self, t: f64) -> f64 {
        let mut r = self.base;
        for (i, c) in self.cos_coeffs.iter().enumerate() {
            r += c * ((i + 1) as f64 * t).cos();
        }
        for (i, s) in self.sin_coeffs.iter().enumerate() {
            r += s * ((i + 1) as f64 * t).sin();
        }
        r
    }

    pub fn radius_d1(&self, t: f64) -> f64 {
        let mut r = 0.0;
        for (i, c) in self.cos_coeffs.iter().enumerate() {
            let k = (i + 1) as f64;
            r -= c * k * (k * t).sin();
        }
        for (i, s) in self.sin_coeffs.iter().enumerate() {
            let k = (i + 1) as f64;
            r += s * k * (k * t).cos();
        }
        r
    }

    pub fn radius_d2(&self, t: f64) -> f64 {
        let mut r = 0.0;
        for (i, c) in self.cos_coeffs.iter().enumerate() {
            let k = (i + 1) as f64;
            r -= c * k * k * (k * t).cos();
        }
        for (i, s) in self.sin_coeffs.iter().enumerate() {
            let k = (i + 1) as f64;
            r -= s * k * k * (k * t).sin();
        }
        r
    }

    /// Radius of curvature of the polar graph at angle `t`.
    pub fn curvature_radius(&self, t: f64) -> f64 {
        let r = self.radius(t);
        let r1 = self.radius_d1(t);
        let r2 = self.radius_d2(t);
        let num = (r * r + r1 * r1).powf(1.5);
        let den = r * r + 2.0 * r1 * r1 - r * r2;
        num / den
    }
}

impl CurveParam for FourierCurve<'_> {
    fn at(&self, t: f64) -> Vec2 {
        self.center + Vec2::from_angle(t) * self.radius(t)
    }
    fn d1(&self, t: f64) -> Vec2 {
        let e_r = Vec2::from_angle(t);
        let e_t = e_r.perp();
        e_r * self.radius_d1(t) + e_t * self.radius(t)
    }
    fn d2(&self, t: f64) -> Vec2 {
        let e_r = Vec2::from_angle(t);
        let e_t = e_r.perp();
        e_r * (self.radius_d2(t) - self.radius(t)) + e_t * (2.0 * self.radius_d1(t))
    }
}

/// Outward unit normal of a counterclockwise parametric curve.
pub fn outward_normal<C: CurveParam>(curve: &C, t: f64) -> Vec2 {
    let tangent = curve.d1(t);
    Vec2::new(tangent.y, -tangent.x).normalized()
}

/// Distance from `x` to the curve, with the parameter of the nearest point.
///
/// Coarse scan over `seeds` equispaced parameters, golden-section refinement
/// around the best seed, then a few Newton polishing steps on the stationarity
/// condition `(p(t)-x)·p'(t) = 0`.
pub fn nearest_on_curve<C: CurveParam>(curve: &C, x: Vec2, seeds: usize) -> (f64, f64) {
    let dist2 = |t: f64| (curve.at(t) - x).norm_sq();
    let tau = std::f64::consts::TAU;
    let mut best_t = 0.0;
    let mut best_d = f64::INFINITY;
    for i in 0..seeds {
        let t = tau * i as f64 / seeds as f64;
        let d = dist2(t);
        if d < best_d {
            best_d = d;
            best_t = t;
        }
    }

    let window = 1.5 * tau / seeds as f64;
    let (mut lo, mut hi) = (best_t - window, best_t + window);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut t1 = hi - phi * (hi - lo);
    let mut t2 = lo + phi * (hi - lo);
    let (mut f1, mut f2) = (dist2(t1), dist2(t2));
    for _ in 0..48 {
        if f1 < f2 {
            hi = t2;
            t2 = t1;
            f2 = f1;
            t1 = hi - phi * (hi - lo);
            f1 = dist2(t1);
        } else {
            lo = t1;
            t1 = t2;
            f1 = f2;
            t2 = lo + phi * (hi - lo);
            f2 = dist2(t2);
        }
    }
    let mut t = 0.5 * (lo + hi);

    for _ in 0..4 {
        let delta = curve.at(t) - x;
        let v = curve.d1(t);
        let g = delta.dot(v);
        let h = v.norm_sq() + delta.dot(curve.d2(t));
        if h.abs() < 1e-300 {
            break;
        }
        let step = g / h;
        if !step.is_finite() || step.abs() > window {
            break;
        }
        t -= step;
    }

    let refined = (curve.at(t) - x).norm();
    let coarse = best_d.sqrt();
    if refined <= coarse {
        (t, refined)
    } else {
        (best_t, coarse)
    }
}
