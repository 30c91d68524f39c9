//! Critical-plane search for the method of moving planes.
//!
//! For a direction `ω` the plane `x·ω = λ` slides down from the extent
//! `M = sup x·ω` and the reflected right-hand cap `G^λ` is tested for
//! containment in `G`. The critical offset is the infimum `m` such that
//! containment holds on `(m, M)`; at `m` the reflected cap is internally
//! tangent to `∂G`, or the plane is orthogonal to `∂G` where they meet.

use serde::{Deserialize, Serialize};

use super::boundary::BoundaryProximity;
use super::domain::{DomainKind, DomainSpec};
use super::vec2::Vec2;
use super::{reflect, HyperplaneFrame, Sdf};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContactCase {
    InteriorTangency,
    OrthogonalContact,
    Both,
}

/// Outcome of the critical-plane search along one direction.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CapDecomposition {
    pub omega: Vec2,
    /// `sup { x·ω : x ∈ G }`.
    pub extent: f64,
    /// Critical plane offset `m`.
    pub critical_m: f64,
    pub case_kind: ContactCase,
    /// Tangency point on `∂G`, cap side (its mirror image touches `∂G`).
    pub tangency_point: Option<Vec2>,
    /// Contact point on `∂G ∩ π_m` where the normal is orthogonal to `ω`.
    pub orthogonal_point: Option<Vec2>,
    /// `−max` signed escape of the reflected arc at the critical offset.
    pub containment_margin: f64,
}

impl CapDecomposition {
    pub fn frame(&self) -> HyperplaneFrame {
        HyperplaneFrame {
            omega: self.omega,
            lambda: self.critical_m,
        }
    }

    /// Primary contact witness (tangency preferred when both exist).
    pub fn witness(&self) -> Vec2 {
        self.tangency_point
            .or(self.orthogonal_point)
            .expect("cap decomposition always stores a witness")
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CriticalSearchParams {
    /// Dense boundary polyline size used for cap sampling.
    pub boundary_samples: usize,
    /// Containment tolerance: reflected arc points may stick out by this much.
    pub containment_tol: f64,
    pub coarse_steps: usize,
    pub bisection_steps: usize,
    /// Max |n·ω| for an orthogonal-contact witness.
    pub normal_angle_tol: f64,
}

impl CriticalSearchParams {
    pub fn for_domain(domain: &DomainSpec) -> Self {
        CriticalSearchParams {
            boundary_samples: 8192,
            containment_tol: 2.0 * domain.diameter() / 256.0,
            coarse_steps: 256,
            bisection_steps: 40,
            normal_angle_tol: 0.08,
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.containment_tol = tol;
        self
    }
}

struct ArcTester<'a> {
    kind: &'a DomainKind,
    proximity: BoundaryProximity,
    points: Vec<Vec2>,
    normals: Vec<Vec2>,
    heights: Vec<f64>,
    spacing: f64,
}

impl ArcTester<'_> {
    /// Signed escape of a reflected point: ≤ 0 inside, boundary distance outside.
    fn escape(&self, q: Vec2) -> f64 {
        let d = self.proximity.distance(q);
        if is_inside(self.kind, q) {
            -d
        } else {
            d
        }
    }

    /// Max escape over the reflected cap arc `{x ∈ ∂G : x·ω > λ}`.
    fn max_escape(&self, omega: Vec2, lambda: f64) -> f64 {
        let frame = HyperplaneFrame { omega, lambda };
        // An empty cap stays at -inf: containment holds vacuously.
        let mut worst = f64::NEG_INFINITY;
        for (i, &p) in self.points.iter().enumerate() {
            if self.heights[i] > lambda {
                worst = worst.max(self.escape(reflect(p, &frame)));
            }
        }
        worst
    }
}

/// Cheap exact membership test (no distance computation).
fn is_inside(kind: &DomainKind, x: Vec2) -> bool {
    match kind {
        DomainKind::Disk(p) => (x - p.center).norm() < p.radius,
        DomainKind::Ellipse(p) => {
            let rel = x - p.center;
            (rel.x / p.semi_axes[0]).powi(2) + (rel.y / p.semi_axes[1]).powi(2) < 1.0
        }
        DomainKind::FourierDisk(p) => {
            let rel = x - p.center;
            let curve = super::domain::fourier_curve(p);
            rel.norm() < curve.radius(rel.angle())
        }
        DomainKind::Polygon(p) => super::boundary::polygon_signed_distance(&p.vertices, x) < 0.0,
        DomainKind::Union(p) => p.members.iter().any(|m| is_inside(m, x)),
    }
}

/// Finds the critical plane offset for `G` along `omega`.
pub fn critical_position(
    domain: &DomainSpec,
    omega: Vec2,
    params: &CriticalSearchParams,
) -> Result<CapDecomposition> {
    let omega = omega.normalized();
    let tol = params.containment_tol;

    let loops = domain.boundary_loops(params.boundary_samples);
    let mut points = Vec::new();
    let mut normals = Vec::new();
    for lp in &loops {
        let m = lp.len();
        for i in 0..m {
            let prev = lp[(i + m - 1) % m];
            let next = lp[(i + 1) % m];
            let tangent = (next - prev).normalized();
            points.push(lp[i]);
            normals.push(Vec2::new(tangent.y, -tangent.x));
        }
    }
    let perimeter: f64 = loops
        .iter()
        .map(|lp| super::boundary::polyline_length(lp, true))
        .sum();
    let spacing = perimeter / points.len() as f64;
    let heights: Vec<f64> = points.iter().map(|p| p.dot(omega)).collect();
    let tester = ArcTester {
        kind: domain.kind(),
        proximity: BoundaryProximity::new(&loops),
        points,
        normals,
        heights,
        spacing,
    };

    let extent = domain.extent(omega);
    let lower = -domain.extent(-omega);
    let step = (extent - lower) / params.coarse_steps as f64;

    // Coarse descent: find the first offset where containment fails.
    let mut ok = extent;
    let mut fail = None;
    for k in 1..=params.coarse_steps {
        let lambda = extent - k as f64 * step;
        if tester.max_escape(omega, lambda) > tol {
            fail = Some(lambda);
            break;
        }
        ok = lambda;
    }
    let Some(mut fail) = fail else {
        return Err(Error::NoCriticalPosition {
            ox: omega.x,
            oy: omega.y,
        });
    };

    for _ in 0..params.bisection_steps {
        let mid = 0.5 * (ok + fail);
        if tester.max_escape(omega, mid) > tol {
            fail = mid;
        } else {
            ok = mid;
        }
    }
    let m = ok;
    let margin = -tester.max_escape(omega, m);

    // Witness classification at the critical offset.
    let frame = HyperplaneFrame { omega, lambda: m };
    let off_plane = (2.0 * tester.spacing).max(tol);
    let mut tangency: Option<(Vec2, f64)> = None;
    let mut orthogonal: Option<(Vec2, f64)> = None;
    for i in 0..tester.points.len() {
        let p = tester.points[i];
        let height = tester.heights[i] - m;
        if height > off_plane {
            let escape = tester.escape(reflect(p, &frame));
            if tangency.map_or(true, |(_, best)| escape > best) {
                tangency = Some((p, escape));
            }
        }
        if height.abs() <= 2.0 * tester.spacing + tol {
            let alignment = tester.normals[i].dot(omega).abs();
            if orthogonal.map_or(true, |(_, best)| alignment < best) {
                orthogonal = Some((p, alignment));
            }
        }
    }

    let tangency_ok = tangency.map_or(false, |(_, escape)| escape >= -3.0 * tol);
    let orthogonal_ok = orthogonal.map_or(false, |(_, a)| a <= params.normal_angle_tol);
    let (case_kind, tangency_point, orthogonal_point) = match (tangency_ok, orthogonal_ok) {
        (true, true) => (
            ContactCase::Both,
            tangency.map(|(p, _)| p),
            orthogonal.map(|(p, _)| p),
        ),
        (true, false) => (ContactCase::InteriorTangency, tangency.map(|(p, _)| p), None),
        (false, true) => (
            ContactCase::OrthogonalContact,
            None,
            orthogonal.map(|(p, _)| p),
        ),
        (false, false) => {
            // Numerically ambiguous contact; report the closer candidate.
            let esc = tangency.map_or(f64::NEG_INFINITY, |(_, e)| e);
            if esc >= -10.0 * tol || orthogonal.is_none() {
                (ContactCase::InteriorTangency, tangency.map(|(p, _)| p), None)
            } else {
                (
                    ContactCase::OrthogonalContact,
                    None,
                    orthogonal.map(|(p, _)| p),
                )
            }
        }
    };

    Ok(CapDecomposition {
        omega,
        extent,
        critical_m: m,
        case_kind,
        tangency_point,
        orthogonal_point,
        containment_margin: margin,
    })
}

/// Containment predicate `G^λ ⊂ G` at tolerance `tol`, exposed for
/// property checks and brute-force scans.
pub fn reflected_cap_contained(
    domain: &DomainSpec,
    omega: Vec2,
    lambda: f64,
    samples: usize,
    tol: f64,
) -> bool {
    let omega = omega.normalized();
    let frame = HyperplaneFrame { omega, lambda };
    let loops = domain.boundary_loops(samples);
    for lp in &loops {
        for &p in lp {
            if p.dot(omega) > lambda && domain.signed_distance(reflect(p, &frame)) > tol {
                return false;
            }
        }
    }
    true
}
