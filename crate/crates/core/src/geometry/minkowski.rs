//! The offset domain `Ω = G + B_R`.

use serde::{Deserialize, Serialize};

use super::curve::outward_normal;
use super::domain::{fourier_curve, DomainKind, DomainSpec};
use super::vec2::{Rect, Vec2};
use super::Sdf;
use crate::{Error, Result};

/// Minkowski sum of an inner domain with an open ball of radius `R`.
///
/// Membership is exact: `x ∈ Ω ⇔ sdf_G(x) < R`. The signed distance
/// `sdf_G(x) − R` is the true offset distance for convex analytic kinds;
/// elsewhere it is still sign-exact and accurate away from the medial axis.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MinkowskiDomain {
    pub inner: DomainSpec,
    pub radius: f64,
}

pub fn minkowski_sum_ball(inner: DomainSpec, radius: f64) -> Result<MinkowskiDomain> {
    if !(radius > 0.0) {
        return Err(Error::NonPositiveRadius(radius));
    }
    Ok(MinkowskiDomain { inner, radius })
}

impl MinkowskiDomain {
    pub fn diameter(&self) -> f64 {
        self.inner.diameter() + 2.0 * self.radius
    }

    /// Inradius of the offset domain (inner inradius plus the offset).
    pub fn inradius(&self) -> f64 {
        self.inner.inradius() + self.radius
    }

    pub fn extent(&self, omega: Vec2) -> f64 {
        self.inner.extent(omega) + self.radius
    }

    /// Points of `∂Ω` with outward normals, obtained by pushing boundary
    /// samples of `G` outward along their normals.
    pub fn boundary_samples(&self, n: usize) -> Vec<(Vec2, Vec2)> {
        boundary_samples_with_normals(&self.inner, n)
            .into_iter()
            .map(|(p, nu)| (p + nu * self.radius, nu))
            .collect()
    }
}

impl Sdf for MinkowskiDomain {
    fn signed_distance(&self, p: Vec2) -> f64 {
        self.inner.signed_distance(p) - self.radius
    }

    fn bounding_box(&self) -> Rect {
        self.inner.bounding_box().inflated(self.radius)
    }
}

/// Quasi-uniform boundary samples of a domain paired with outward unit
/// normals. Parametric kinds use analytic normals; polygons use edge
/// normals; implicit kinds fall back to the signed-distance gradient.
pub fn boundary_samples_with_normals(domain: &DomainSpec, n: usize) -> Vec<(Vec2, Vec2)> {
    match domain.kind() {
        DomainKind::Disk(p) => (0..n)
            .map(|i| {
                let t = std::f64::consts::TAU * i as f64 / n as f64;
                let nu = Vec2::from_angle(t);
                (p.center + nu * p.radius, nu)
            })
            .collect(),
        DomainKind::Ellipse(p) => {
            let pts = domain.boundary_loops(n).remove(0);
            let [a, b] = p.semi_axes;
            pts.into_iter()
                .map(|q| {
                    let rel = q - p.center;
                    let nu = Vec2::new(rel.x / (a * a), rel.y / (b * b)).normalized();
                    (q, nu)
                })
                .collect()
        }
        DomainKind::FourierDisk(params) => {
            let curve = fourier_curve(params);
            let pts = domain.boundary_loops(n).remove(0);
            pts.into_iter()
                .map(|q| {
                    let t = (q - params.center).angle();
                    (q, outward_normal(&curve, t))
                })
                .collect()
        }
        _ => {
            let loops = domain.boundary_loops(n);
            let mut out = Vec::new();
            for lp in &loops {
                let m = lp.len();
                for i in 0..m {
                    let prev = lp[(i + m - 1) % m];
                    let next = lp[(i + 1) % m];
                    // CCW orientation: outward normal is the clockwise
                    // rotation of the local tangent.
                    let tangent = (next - prev).normalized();
                    let nu = Vec2::new(tangent.y, -tangent.x);
                    out.push((lp[i], nu));
                }
            }
            out
        }
    }
}
