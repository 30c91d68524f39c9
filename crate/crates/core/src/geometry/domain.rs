//! Domain specifications and their signed-distance evaluators.

use serde::{Deserialize, Serialize};

use super::boundary;
use super::curve::{nearest_on_curve, CurveParam, EllipseCurve, FourierCurve};
use super::vec2::{Rect, Vec2};
use super::Sdf;
use crate::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiskParams {
    pub center: Vec2,
    pub radius: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EllipseParams {
    pub center: Vec2,
    /// Semi-axis lengths along x and y.
    pub semi_axes: [f64; 2],
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FourierDiskParams {
    pub center: Vec2,
    pub base_radius: f64,
    /// `cos_coeffs[k-1]` multiplies `cos(kθ)`.
    #[serde(default)]
    pub cos_coeffs: Vec<f64>,
    /// `sin_coeffs[k-1]` multiplies `sin(kθ)`.
    #[serde(default)]
    pub sin_coeffs: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolygonParams {
    pub vertices: Vec<Vec2>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnionParams {
    pub members: Vec<DomainKind>,
}

/// Raw, unvalidated domain description. This is the on-disk JSON shape:
/// `{"kind": "...", "params": {...}}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum DomainKind {
    Disk(DiskParams),
    Ellipse(EllipseParams),
    FourierDisk(FourierDiskParams),
    Polygon(PolygonParams),
    Union(UnionParams),
}

impl DomainKind {
    fn validate(&self) -> Result<()> {
        match self {
            DomainKind::Disk(p) => {
                if !(p.radius > 0.0) || !p.center.is_finite() {
                    return Err(Error::InvalidSpec(format!(
                        "disk radius must be positive and finite, got {}",
                        p.radius
                    )));
                }
            }
            DomainKind::Ellipse(p) => {
                let [a, b] = p.semi_axes;
                if !(a > 0.0 && b > 0.0) || !p.center.is_finite() {
                    return Err(Error::InvalidSpec(format!(
                        "ellipse semi-axes must be positive, got ({a}, {b})"
                    )));
                }
            }
            DomainKind::FourierDisk(p) => {
                if !(p.base_radius > 0.0) || !p.center.is_finite() {
                    return Err(Error::InvalidSpec(
                        "fourier_disk base radius must be positive".into(),
                    ));
                }
                let amp = fourier_amplitude(p);
                if !(amp < p.base_radius) {
                    return Err(Error::InvalidSpec(format!(
                        "fourier_disk perturbation amplitude {amp} must stay below base radius {}",
                        p.base_radius
                    )));
                }
            }
            DomainKind::Polygon(p) => {
                if p.vertices.len() < 3 {
                    return Err(Error::InvalidSpec(
                        "polygon needs at least three vertices".into(),
                    ));
                }
                if p.vertices.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidSpec("polygon vertices must be finite".into()));
                }
                if boundary::polygon_area(&p.vertices).abs() < 1e-14 {
                    return Err(Error::InvalidSpec("polygon is degenerate".into()));
                }
            }
            DomainKind::Union(p) => {
                if p.members.is_empty() {
                    return Err(Error::InvalidSpec("union needs at least one member".into()));
                }
                for m in &p.members {
                    m.validate()?;
                }
            }
        }
        Ok(())
    }

    fn raw_signed_distance(&self, x: Vec2) -> f64 {
        match self {
            DomainKind::Disk(p) => (x - p.center).norm() - p.radius,
            DomainKind::Ellipse(p) => {
                let [a, b] = p.semi_axes;
                let rel = x - p.center;
                let q = (rel.x / a).powi(2) + (rel.y / b).powi(2);
                if rel.norm() < 1e-15 {
                    return -a.min(b);
                }
                let curve = EllipseCurve {
                    center: p.center,
                    a,
                    b,
                };
                let (_, dist) = nearest_on_curve(&curve, x, 64);
                if q < 1.0 {
                    -dist
                } else {
                    dist
                }
            }
            DomainKind::FourierDisk(p) => {
                let curve = fourier_curve(p);
                let rel = x - p.center;
                let inside = rel.norm() < curve.radius(rel.angle());
                let (_, dist) = nearest_on_curve(&curve, x, 32);
                if inside {
                    -dist
                } else {
                    dist
                }
            }
            DomainKind::Polygon(p) => boundary::polygon_signed_distance(&p.vertices, x),
            DomainKind::Union(p) => p
                .members
                .iter()
                .map(|m| m.raw_signed_distance(x))
                .fold(f64::INFINITY, f64::min),
        }
    }

    fn raw_bounding_box(&self) -> Rect {
        match self {
            DomainKind::Disk(p) => Rect::new(
                p.center - Vec2::new(p.radius, p.radius),
                p.center + Vec2::new(p.radius, p.radius),
            ),
            DomainKind::Ellipse(p) => {
                let half = Vec2::new(p.semi_axes[0], p.semi_axes[1]);
                Rect::new(p.center - half, p.center + half)
            }
            DomainKind::FourierDisk(p) => {
                let r = p.base_radius + fourier_amplitude(p);
                Rect::new(p.center - Vec2::new(r, r), p.center + Vec2::new(r, r))
            }
            DomainKind::Polygon(p) => {
                let mut min = p.vertices[0];
                let mut max = p.vertices[0];
                for v in &p.vertices {
                    min = Vec2::new(min.x.min(v.x), min.y.min(v.y));
                    max = Vec2::new(max.x.max(v.x), max.y.max(v.y));
                }
                Rect::new(min, max)
            }
            DomainKind::Union(p) => {
                let mut rect = p.members[0].raw_bounding_box();
                for m in &p.members[1..] {
                    rect = rect.union(&m.raw_bounding_box());
                }
                rect
            }
        }
    }

    fn raw_extent(&self, omega: Vec2) -> f64 {
        match self {
            DomainKind::Disk(p) => p.center.dot(omega) + p.radius,
            DomainKind::Ellipse(p) => {
                let [a, b] = p.semi_axes;
                p.center.dot(omega) + ((a * omega.x).powi(2) + (b * omega.y).powi(2)).sqrt()
            }
            DomainKind::FourierDisk(p) => {
                let curve = fourier_curve(p);
                support_on_curve(&curve, omega)
            }
            DomainKind::Polygon(p) => p
                .vertices
                .iter()
                .map(|v| v.dot(omega))
                .fold(f64::NEG_INFINITY, f64::max),
            DomainKind::Union(p) => p
                .members
                .iter()
                .map(|m| m.raw_extent(omega))
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// Rigid rotation about `origin`. Ellipses only admit quarter-turn
    /// multiples since the parametrization is axis-aligned.
    pub fn rotated_about(&self, origin: Vec2, angle: f64) -> Result<DomainKind> {
        let rot = |v: Vec2| origin + (v - origin).rotated(angle);
        Ok(match self {
            DomainKind::Disk(p) => DomainKind::Disk(DiskParams {
                center: rot(p.center),
                radius: p.radius,
            }),
            DomainKind::Ellipse(p) => {
                let quarter = angle / std::f64::consts::FRAC_PI_2;
                if (quarter - quarter.round()).abs() > 1e-12 {
                    return Err(Error::InvalidSpec(
                        "ellipse rotation is only supported for quarter turns".into(),
                    ));
                }
                let [a, b] = p.semi_axes;
                let swapped = (quarter.round() as i64).rem_euclid(2) == 1;
                DomainKind::Ellipse(EllipseParams {
                    center: rot(p.center),
                    semi_axes: if swapped { [b, a] } else { [a, b] },
                })
            }
            DomainKind::FourierDisk(p) => {
                // r(θ - φ): rotate each mode pair by kφ.
                let modes = p.cos_coeffs.len().max(p.sin_coeffs.len());
                let mut cos_coeffs = vec![0.0; modes];
                let mut sin_coeffs = vec![0.0; modes];
                for k in 1..=modes {
                    let a = p.cos_coeffs.get(k - 1).copied().unwrap_or(0.0);
                    let b = p.sin_coeffs.get(k - 1).copied().unwrap_or(0.0);
                    let (s, c) = (k as f64 * angle).sin_cos();
                    cos_coeffs[k - 1] = a * c - b * s;
                    sin_coeffs[k - 1] = a * s + b * c;
                }
                DomainKind::FourierDisk(FourierDiskParams {
                    center: rot(p.center),
                    base_radius: p.base_radius,
                    cos_coeffs,
                    sin_coeffs,
                })
            }
            DomainKind::Polygon(p) => DomainKind::Polygon(PolygonParams {
                vertices: p.vertices.iter().map(|&v| rot(v)).collect(),
            }),
            DomainKind::Union(p) => DomainKind::Union(UnionParams {
                members: p
                    .members
                    .iter()
                    .map(|m| m.rotated_about(origin, angle))
                    .collect::<Result<_>>()?,
            }),
        })
    }

    pub fn translated(&self, v: Vec2) -> DomainKind {
        match self {
            DomainKind::Disk(p) => DomainKind::Disk(DiskParams {
                center: p.center + v,
                radius: p.radius,
            }),
            DomainKind::Ellipse(p) => DomainKind::Ellipse(EllipseParams {
                center: p.center + v,
                semi_axes: p.semi_axes,
            }),
            DomainKind::FourierDisk(p) => {
                let mut q = p.clone();
                q.center = p.center + v;
                DomainKind::FourierDisk(q)
            }
            DomainKind::Polygon(p) => DomainKind::Polygon(PolygonParams {
                vertices: p.vertices.iter().map(|&w| w + v).collect(),
            }),
            DomainKind::Union(p) => DomainKind::Union(UnionParams {
                members: p.members.iter().map(|m| m.translated(v)).collect(),
            }),
        }
    }
}

pub(super) fn fourier_curve(p: &FourierDiskParams) -> FourierCurve<'_> {
    FourierCurve {
        center: p.center,
        base: p.base_radius,
        cos_coeffs: &p.cos_coeffs,
        sin_coeffs: &p.sin_coeffs,
    }
}

fn fourier_amplitude(p: &FourierDiskParams) -> f64 {
    p.cos_coeffs.iter().map(|c| c.abs()).sum::<f64>()
        + p.sin_coeffs.iter().map(|s| s.abs()).sum::<f64>()
}

fn support_on_curve<C: CurveParam>(curve: &C, omega: Vec2) -> f64 {
    let f = |t: f64| curve.at(t).dot(omega);
    let tau = std::f64::consts::TAU;
    let n = 512;
    let mut best_t = 0.0;
    let mut best = f64::NEG_INFINITY;
    for i in 0..n {
        let t = tau * i as f64 / n as f64;
        let v = f(t);
        if v > best {
            best = v;
            best_t = t;
        }
    }
    let (mut lo, mut hi) = (best_t - tau / n as f64, best_t + tau / n as f64);
    for _ in 0..60 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if f(m1) < f(m2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    f(0.5 * (lo + hi))
}

/// Cached geometric invariants computed once at construction.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DomainMetrics {
    pub diameter: f64,
    /// Optimal uniform interior-ball radius.
    pub rho: f64,
    /// Radius of the largest inscribed ball.
    pub inradius: f64,
    pub bounding_box: Rect,
}

/// Validated inner domain `G` with cached metrics.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "DomainKind", into = "DomainKind")]
pub struct DomainSpec {
    kind: DomainKind,
    metrics: DomainMetrics,
}

impl TryFrom<DomainKind> for DomainSpec {
    type Error = Error;
    fn try_from(kind: DomainKind) -> Result<Self> {
        DomainSpec::new(kind)
    }
}

impl From<DomainSpec> for DomainKind {
    fn from(spec: DomainSpec) -> DomainKind {
        spec.kind
    }
}

impl DomainSpec {
    pub fn new(kind: DomainKind) -> Result<Self> {
        kind.validate()?;
        let metrics = compute_metrics(&kind)?;
        Ok(DomainSpec { kind, metrics })
    }

    pub fn disk(center: Vec2, radius: f64) -> Result<Self> {
        Self::new(DomainKind::Disk(DiskParams { center, radius }))
    }

    pub fn ellipse(center: Vec2, a: f64, b: f64) -> Result<Self> {
        Self::new(DomainKind::Ellipse(EllipseParams {
            center,
            semi_axes: [a, b],
        }))
    }

    pub fn fourier_disk(
        center: Vec2,
        base_radius: f64,
        cos_coeffs: Vec<f64>,
        sin_coeffs: Vec<f64>,
    ) -> Result<Self> {
        Self::new(DomainKind::FourierDisk(FourierDiskParams {
            center,
            base_radius,
            cos_coeffs,
            sin_coeffs,
        }))
    }

    pub fn polygon(vertices: Vec<Vec2>) -> Result<Self> {
        // Normalize to counterclockwise so outward normals are consistent.
        let mut vertices = vertices;
        if boundary::polygon_area(&vertices) < 0.0 {
            vertices.reverse();
        }
        Self::new(DomainKind::Polygon(PolygonParams { vertices }))
    }

    pub fn union(members: Vec<DomainKind>) -> Result<Self> {
        Self::new(DomainKind::Union(UnionParams { members }))
    }

    pub fn kind(&self) -> &DomainKind {
        &self.kind
    }

    pub fn diameter(&self) -> f64 {
        self.metrics.diameter
    }

    /// Optimal interior-ball radius. Closed form for disks and ellipses,
    /// discrete curvature estimate capped by the inradius otherwise.
    pub fn rho(&self) -> f64 {
        self.metrics.rho
    }

    pub fn inradius(&self) -> f64 {
        self.metrics.inradius
    }

    /// Largest `x·omega` over the domain.
    pub fn extent(&self, omega: Vec2) -> f64 {
        self.kind.raw_extent(omega.normalized())
    }

    /// Closed boundary loops as dense polylines, counterclockwise.
    pub fn boundary_loops(&self, points_hint: usize) -> Vec<Vec<Vec2>> {
        boundary::boundary_loops(&self.kind, points_hint)
    }

    /// Area centroid from the boundary polyline (shoelace formula).
    pub fn centroid(&self) -> Vec2 {
        let loops = self.boundary_loops(4096);
        boundary::loops_centroid(&loops)
    }

    pub fn translated(&self, v: Vec2) -> DomainSpec {
        DomainSpec::new(self.kind.translated(v)).expect("translation preserves validity")
    }

    pub fn rotated_about(&self, origin: Vec2, angle: f64) -> Result<DomainSpec> {
        DomainSpec::new(self.kind.rotated_about(origin, angle)?)
    }
}

impl Sdf for DomainSpec {
    fn signed_distance(&self, p: Vec2) -> f64 {
        self.kind.raw_signed_distance(p)
    }

    fn bounding_box(&self) -> Rect {
        self.metrics.bounding_box
    }
}

fn compute_metrics(kind: &DomainKind) -> Result<DomainMetrics> {
    let bounding_box = kind.raw_bounding_box();
    let (diameter, rho, inradius) = match kind {
        DomainKind::Disk(p) => (2.0 * p.radius, p.radius, p.radius),
        DomainKind::Ellipse(p) => {
            let [a, b] = p.semi_axes;
            let (major, minor) = (a.max(b), a.min(b));
            (2.0 * major, minor * minor / major, minor)
        }
        _ => {
            let loops = boundary::boundary_loops(kind, 2048);
            if loops.is_empty() {
                return Err(Error::InvalidSpec(
                    "domain boundary could not be extracted".into(),
                ));
            }
            let diameter = boundary::loops_diameter(&loops);
            let inradius = inradius_estimate(kind, &bounding_box);
            let min_curvature = boundary::loops_min_curvature_radius(&loops);
            (diameter, min_curvature.min(inradius), inradius)
        }
    };
    Ok(DomainMetrics {
        diameter,
        rho,
        inradius,
        bounding_box,
    })
}

/// Coarse grid scan for the deepest interior point, then local pattern search.
fn inradius_estimate(kind: &DomainKind, bbox: &Rect) -> f64 {
    let n = 96;
    let mut best = 0.0_f64;
    let mut best_p = bbox.center();
    for j in 0..=n {
        for i in 0..=n {
            let p = Vec2::new(
                bbox.min.x + bbox.width() * i as f64 / n as f64,
                bbox.min.y + bbox.height() * j as f64 / n as f64,
            );
            let depth = -kind.raw_signed_distance(p);
            if depth > best {
                best = depth;
                best_p = p;
            }
        }
    }
    let mut step = bbox.width().max(bbox.height()) / n as f64;
    for _ in 0..24 {
        let mut improved = false;
        for dir in [
            Vec2::new(1.0, 0.0),
            Vec2::new(-1.0, 0.0),
            Vec2::new(0.0, 1.0),
            Vec2::new(0.0, -1.0),
        ] {
            let q = best_p + dir * step;
            let depth = -kind.raw_signed_distance(q);
            if depth > best {
                best = depth;
                best_p = q;
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    best
}
