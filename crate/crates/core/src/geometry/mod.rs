//! Analytic planar domain kernel: signed distances, offsets, reflections,
//! caps and critical-plane search.

mod boundary;
mod cap;
mod curve;
mod domain;
mod minkowski;
mod parallel;
#[cfg(test)]
mod tests;
mod vec2;

pub use boundary::{marching_squares, polyline_length, resample_closed, BoundaryProximity};
pub use curve::{outward_normal, CurveParam, EllipseCurve, FourierCurve};
pub use cap::{
    critical_position, reflected_cap_contained, CapDecomposition, ContactCase,
    CriticalSearchParams,
};
pub use domain::{
    DiskParams, DomainKind, DomainSpec, EllipseParams, FourierDiskParams, PolygonParams,
    UnionParams,
};
pub use minkowski::{boundary_samples_with_normals, minkowski_sum_ball, MinkowskiDomain};
pub use parallel::{parallel_set, ParallelSet};
pub use vec2::{Rect, Vec2};

use serde::{Deserialize, Serialize};

/// Common surface for anything that exposes a signed distance
/// (negative inside, positive outside) and a finite bounding box.
pub trait Sdf {
    fn signed_distance(&self, p: Vec2) -> f64;
    fn bounding_box(&self) -> Rect;

    fn contains(&self, p: Vec2) -> bool {
        self.signed_distance(p) < 0.0
    }

    /// Outward unit normal from a central difference of the signed distance.
    fn normal(&self, p: Vec2) -> Vec2 {
        let e = 1e-6 * (1.0 + p.norm());
        let gx = self.signed_distance(p + Vec2::new(e, 0.0))
            - self.signed_distance(p - Vec2::new(e, 0.0));
        let gy = self.signed_distance(p + Vec2::new(0.0, e))
            - self.signed_distance(p - Vec2::new(0.0, e));
        Vec2::new(gx, gy).normalized()
    }
}

/// Oriented hyperplane `{ x : x·omega = lambda }`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperplaneFrame {
    pub omega: Vec2,
    pub lambda: f64,
}

impl HyperplaneFrame {
    /// Builds a frame, normalizing `omega`. Fails on a zero direction.
    pub fn new(omega: Vec2, lambda: f64) -> crate::Result<Self> {
        let n = omega.norm();
        if n < 1e-12 || !omega.is_finite() {
            return Err(crate::Error::InvalidSpec(
                "hyperplane direction must be a nonzero finite vector".into(),
            ));
        }
        Ok(HyperplaneFrame {
            omega: omega / n,
            lambda,
        })
    }

    /// Signed coordinate of `x` along the frame direction, relative to the plane.
    pub fn height(&self, x: Vec2) -> f64 {
        x.dot(self.omega) - self.lambda
    }
}

/// Mirror image of `x` about the plane of `frame`.
pub fn reflect(x: Vec2, frame: &HyperplaneFrame) -> Vec2 {
    x - frame.omega * (2.0 * frame.height(x))
}
