//! Boundary traces: sampling, the Lipschitz deviation seminorm, extrema,
//! normal derivatives on the outer boundary and oscillation on inner
//! parallel surfaces.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::{boundary_samples_with_normals, DomainSpec, MinkowskiDomain, Sdf, Vec2};
use crate::grid::{fmt_sig, ScalarField};
use crate::{Error, Result};

/// Exact pair enumeration is used up to this many samples; beyond it the
/// seminorm subsamples pairs deterministically.
pub const EXACT_PAIR_LIMIT: usize = 4096;

/// Arc-length-ordered samples of `∂G` with outward unit normals.
#[derive(Clone, Debug)]
pub struct BoundarySamples {
    pub points: Vec<Vec2>,
    pub normals: Vec<Vec2>,
}

/// Samples plus the solution values at the sample points.
#[derive(Clone, Debug)]
pub struct BoundaryTrace {
    pub points: Vec<Vec2>,
    pub normals: Vec<Vec2>,
    pub values: Vec<f64>,
}

/// Quasi-uniform arc-length sampling of `∂G`.
pub fn sample_boundary(domain: &DomainSpec, n: usize) -> BoundarySamples {
    let n = n.max(4);
    let samples = boundary_samples_with_normals(domain, n);
    let (points, normals) = samples.into_iter().unzip();
    BoundarySamples { points, normals }
}

impl BoundarySamples {
    /// Evaluates the field at every sample. Every point must sit inside the
    /// field's domain with a two-cell margin.
    pub fn with_values(&self, u: &ScalarField) -> Result<BoundaryTrace> {
        let h = u.mask().h;
        let mut values = Vec::with_capacity(self.points.len());
        for &p in &self.points {
            if !u.mask().has_margin(p, 2.0 * h) {
                return Err(Error::OutOfDomain { x: p.x, y: p.y });
            }
            values.push(u.interpolate(p)?);
        }
        Ok(BoundaryTrace {
            points: self.points.clone(),
            normals: self.normals.clone(),
            values,
        })
    }
}

impl BoundaryTrace {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `s,x,y,u,nu_x,nu_y` rows in arc order.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "s,x,y,u,nu_x,nu_y")?;
        let mut s = 0.0;
        for i in 0..self.points.len() {
            if i > 0 {
                s += self.points[i].dist(self.points[i - 1]);
            }
            let p = self.points[i];
            let nu = self.normals[i];
            writeln!(
                w,
                "{},{},{},{},{},{}",
                fmt_sig(s),
                fmt_sig(p.x),
                fmt_sig(p.y),
                fmt_sig(self.values[i]),
                fmt_sig(nu.x),
                fmt_sig(nu.y)
            )?;
        }
        Ok(())
    }
}

/// The deviation seminorm `sup |u(x)-u(y)| / |x-y|` over distinct boundary
/// samples (chordal distances). Exact pair enumeration up to
/// [`EXACT_PAIR_LIMIT`]; stratified deterministic subsampling beyond.
pub fn lipschitz_seminorm(trace: &BoundaryTrace, seed: u64) -> f64 {
    let n = trace.len();
    if n < 2 {
        return 0.0;
    }
    let indices: Vec<usize> = if n <= EXACT_PAIR_LIMIT {
        (0..n).collect()
    } else {
        // One index per stratum, jittered with a fixed seed.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = EXACT_PAIR_LIMIT;
        let mut picked: Vec<usize> = (0..m)
            .map(|k| {
                let lo = k * n / m;
                let hi = (((k + 1) * n) / m).max(lo + 1).min(n);
                rng.gen_range(lo..hi)
            })
            .collect();
        picked.dedup();
        picked
    };
    let mut best = 0.0f64;
    for (a, &i) in indices.iter().enumerate() {
        for &j in &indices[a + 1..] {
            let d = trace.points[i].dist(trace.points[j]);
            if d > 1e-14 {
                best = best.max((trace.values[i] - trace.values[j]).abs() / d);
            }
        }
    }
    best
}

/// Min and max of the trace values.
pub fn boundary_extrema(trace: &BoundaryTrace) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in &trace.values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    (lo, hi)
}

/// Exterior normal derivative of `u` on `∂Ω`, sampled at `n` points.
///
/// One-sided second-order differencing along the inward normal with the
/// Dirichlet value pinned at the boundary point itself.
pub fn normal_derivative(u: &ScalarField, domain: &MinkowskiDomain, n: usize) -> Vec<f64> {
    let h = u.mask().h;
    let delta = 2.0 * h;
    let g = u.boundary_value();
    domain
        .boundary_samples(n)
        .into_iter()
        .map(|(p, nu)| {
            let f1 = u.interpolate(p - nu * delta).unwrap_or(g);
            let f2 = u.interpolate(p - nu * (2.0 * delta)).unwrap_or(f1);
            // d/dt u(p - t nu) at t = 0 equals -u_nu.
            let inward = (4.0 * (f1 - g) - (f2 - g)) / (2.0 * delta);
            -inward
        })
        .collect()
}

/// Oscillation `max - min` of `u` over the inner parallel surface of `∂Ω`
/// at depth `t`, sampled by marching boundary samples inward and projecting
/// back onto the level set of the signed distance.
pub fn parallel_oscillation(
    u: &ScalarField,
    domain: &MinkowskiDomain,
    t: f64,
    n: usize,
) -> Result<f64> {
    if !(t >= 0.0) || t >= domain.inradius() {
        return Err(Error::Precondition(format!(
            "parallel depth {t} outside [0, inradius = {})",
            domain.inradius()
        )));
    }
    if t == 0.0 {
        // The trace itself: Dirichlet data, zero oscillation by definition.
        return Ok(0.0);
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut kept = 0usize;
    for (p, nu) in domain.boundary_samples(n) {
        let mut x = p - nu * t;
        // Projection onto { sdf = -t } via damped signed-distance Newton.
        for _ in 0..3 {
            let err = domain.signed_distance(x) + t;
            x -= domain.normal(x) * err;
        }
        if (domain.signed_distance(x) + t).abs() > 0.05 * t {
            continue;
        }
        let Ok(v) = u.interpolate(x) else { continue };
        lo = lo.min(v);
        hi = hi.max(v);
        kept += 1;
    }
    if kept < 16.max(n / 4) {
        return Err(Error::DegenerateSurface { t });
    }
    Ok(hi - lo)
}

/// Maximum tangential difference quotient along adjacent samples; the
/// cheaper cross-check estimator for the seminorm.
pub fn tangential_seminorm_estimate(trace: &BoundaryTrace) -> f64 {
    let n = trace.len();
    let mut best = 0.0f64;
    for i in 0..n {
        let j = (i + 1) % n;
        let d = trace.points[i].dist(trace.points[j]);
        if d > 1e-14 {
            best = best.max((trace.values[i] - trace.values[j]).abs() / d);
        }
    }
    best
}
