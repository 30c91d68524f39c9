//! Numerical verification of the Harnack machinery: pointwise bounds for
//! positive discrete-harmonic fields, covering chains of disjoint balls,
//! and their counting bound.

use serde::{Deserialize, Serialize};

use crate::constants::semilinear_harnack_constant;
use crate::geometry::{HyperplaneFrame, Rect, Sdf, Vec2};
use crate::grid::{CellKind, ScalarField};
use crate::{Error, Result};

/// Interior Harnack factors for a positive harmonic function on `B_r(x₀)`
/// evaluated at offset `d = |x − x₀| < r`:
/// `lower = r^(N-2)·(r-d)/(r+d)^(N-1)`, `upper = r^(N-2)·(r+d)/(r-d)^(N-1)`.
pub fn harnack_factors(n: u32, r: f64, d: f64) -> Result<(f64, f64)> {
    if !(d >= 0.0 && d < r) {
        return Err(Error::InvalidHarnackOffset { d, r });
    }
    let rp = r.powi(n as i32 - 2);
    let lower = rp * (r - d) / (r + d).powi(n as i32 - 1);
    let upper = rp * (r + d) / (r - d).powi(n as i32 - 1);
    Ok((lower, upper))
}

/// Checks the half-radius Harnack bound for a nonnegative discrete-harmonic
/// field: every grid node of `B_{r/2}(center)` satisfies
/// `lower·w(center) ≤ w(x) ≤ upper·w(center)` with the factors at `d = r/2`,
/// up to an additive slack of `5h·w(center)`.
pub fn verify_pointwise_harnack(
    w: &ScalarField,
    center: Vec2,
    r: f64,
    harmonic_tol: f64,
) -> Result<bool> {
    let mask = w.mask();
    let h = mask.h;
    let (lower, upper) = harnack_factors(2, r, 0.5 * r)?;

    let mut checked = 0usize;
    for j in 1..mask.ny - 1 {
        for i in 1..mask.nx - 1 {
            let p = mask.node(i, j);
            let dist = p.dist(center);
            if dist >= r - h {
                continue;
            }
            let v = w.value_at(mask.index(i, j));
            if v.is_nan() {
                continue;
            }
            if v < -1e-12 {
                return Err(Error::Precondition(format!(
                    "field is negative ({v}) inside the Harnack ball"
                )));
            }
            let lap = w.laplacian_plain(i, j);
            if lap.is_finite() && lap.abs() > harmonic_tol {
                return Err(Error::NotHarmonic {
                    residual: lap.abs(),
                    tol: harmonic_tol,
                });
            }
            checked += 1;
        }
    }
    if checked == 0 {
        return Err(Error::Precondition(
            "Harnack ball contains no grid nodes".into(),
        ));
    }

    let w0 = w.interpolate(center)?;
    let slack = 5.0 * h * w0.abs().max(1.0);
    for j in 0..mask.ny {
        for i in 0..mask.nx {
            let p = mask.node(i, j);
            if p.dist(center) > 0.5 * r {
                continue;
            }
            let v = w.value_at(mask.index(i, j));
            if v.is_nan() {
                continue;
            }
            if v < lower * w0 - slack || v > upper * w0 + slack {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Checks the quarter-radius Harnack bound `sup ≤ C·inf` on `B_{r/4}` for a
/// nonnegative field solving `Δw + c(x)·w = 0` with `|c| ≤ L`.
pub fn verify_semilinear_harnack<C: Fn(Vec2) -> f64>(
    w: &ScalarField,
    center: Vec2,
    r: f64,
    l: f64,
    c: C,
    residual_tol: f64,
) -> Result<bool> {
    let mask = w.mask();
    let h = mask.h;
    let mut sup = f64::NEG_INFINITY;
    let mut inf = f64::INFINITY;
    for j in 1..mask.ny - 1 {
        for i in 1..mask.nx - 1 {
            let p = mask.node(i, j);
            let dist = p.dist(center);
            if dist >= r - h {
                continue;
            }
            let v = w.value_at(mask.index(i, j));
            if v.is_nan() {
                continue;
            }
            if v < -1e-12 {
                return Err(Error::Precondition(format!(
                    "field is negative ({v}) inside the ball"
                )));
            }
            let coeff = c(p);
            if coeff.abs() > l + 1e-12 {
                return Err(Error::Precondition(format!(
                    "reaction coefficient {coeff} exceeds the stated bound {l}"
                )));
            }
            let res = w.laplacian_plain(i, j) + coeff * v;
            if res.is_finite() && res.abs() > residual_tol {
                return Err(Error::NotSolution {
                    residual: res.abs(),
                    tol: residual_tol,
                });
            }
            if dist <= 0.25 * r {
                sup = sup.max(v);
                inf = inf.min(v);
            }
        }
    }
    if !sup.is_finite() || !inf.is_finite() {
        return Err(Error::Precondition(
            "quarter ball contains no grid nodes".into(),
        ));
    }
    let bound = semilinear_harnack_constant(2, r, l);
    Ok(sup <= bound * inf + 5.0 * h * sup.abs().max(1.0))
}

/// Upper bound for the number of chain balls: `(2·diam D₂)^N / R^N`.
pub fn chain_bound(n: u32, diam2: f64, r: f64) -> f64 {
    (2.0 * diam2 / r).powi(n as i32)
}

/// A host region for chain construction: a base domain optionally cut by a
/// half-space `{ x·ω > λ }`.
pub struct HalfDomain<'a> {
    pub base: &'a dyn Sdf,
    pub cut: Option<HyperplaneFrame>,
}

impl Sdf for HalfDomain<'_> {
    fn signed_distance(&self, p: Vec2) -> f64 {
        let d = self.base.signed_distance(p);
        match &self.cut {
            Some(frame) => d.max(-frame.height(p)),
            None => d,
        }
    }

    fn bounding_box(&self) -> Rect {
        self.base.bounding_box()
    }
}

/// Chain of pairwise-disjoint balls of radius `R/4` with consecutive
/// closures touching, linking two interior points of the eroded region.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HarnackChain {
    pub centers: Vec<Vec2>,
    pub ball_radius: f64,
    pub margin: f64,
    pub start: Vec2,
    pub end: Vec2,
}

impl HarnackChain {
    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// Audits the chain invariants against its host region.
    pub fn audit(&self, region: &dyn Sdf, diam2: f64) -> Result<()> {
        let r4 = self.ball_radius;
        let spacing = 2.0 * r4;
        let eps = 1e-9 * spacing.max(1.0);
        let n = self.centers.len();
        for i in 0..n {
            for j in i + 1..n {
                let d = self.centers[i].dist(self.centers[j]);
                if d < spacing - eps {
                    return Err(Error::ChainInvariant(format!(
                        "balls {i} and {j} overlap (centers {d} apart, need {spacing})"
                    )));
                }
                if j == i + 1 && d > spacing + eps {
                    return Err(Error::ChainInvariant(format!(
                        "consecutive closures {i},{j} do not touch ({d} apart)"
                    )));
                }
            }
        }
        for (i, c) in self.centers.iter().enumerate() {
            let clearance = -region.signed_distance(*c);
            if clearance < self.margin - 1e-6 {
                return Err(Error::ChainInvariant(format!(
                    "ball {i} center clearance {clearance} below margin {}",
                    self.margin
                )));
            }
        }
        let covered = |p: Vec2| {
            self.centers
                .iter()
                .any(|c| c.dist(p) <= r4 + eps)
        };
        if !covered(self.start) || !covered(self.end) {
            return Err(Error::ChainInvariant(
                "endpoints are not covered by ball closures".into(),
            ));
        }
        let bound = chain_bound(2, diam2, 4.0 * r4);
        if (n as f64) > bound {
            return Err(Error::ChainInvariant(format!(
                "{n} balls exceed the counting bound {bound}"
            )));
        }
        Ok(())
    }
}

/// Builds a Harnack chain from `y` to `z` inside `region` eroded by `R/2`.
///
/// Breadth-first search on a grid of the eroded region provides a corridor
/// polyline; centers are then marched along it at exact spacing `R/2` so
/// that consecutive closed balls of radius `R/4` touch.
pub fn build_chain(region: &dyn Sdf, r: f64, y: Vec2, z: Vec2) -> Result<HarnackChain> {
    let margin = 0.5 * r;
    let r4 = 0.25 * r;
    for (label, p) in [("start", y), ("end", z)] {
        let clearance = -region.signed_distance(p);
        if clearance < margin - 1e-9 {
            return Err(Error::Precondition(format!(
                "{label} point clearance {clearance} is below R/2 = {margin}"
            )));
        }
    }
    if y.dist(z) <= r4 {
        return Ok(HarnackChain {
            centers: vec![y],
            ball_radius: r4,
            margin,
            start: y,
            end: z,
        });
    }

    // Corridor by BFS on the grid of the (slightly deeper) eroded region.
    let h_path = r / 16.0;
    let erosion = margin + h_path;
    let bbox = region.bounding_box();
    let nx = (bbox.width() / h_path).ceil() as usize + 1;
    let ny = (bbox.height() / h_path).ceil() as usize + 1;
    let node = |i: usize, j: usize| {
        bbox.min + Vec2::new(i as f64 * h_path, j as f64 * h_path)
    };
    let deep_inside = |p: Vec2| -region.signed_distance(p) >= erosion;
    let nearest_cell = |p: Vec2| {
        let i = ((p.x - bbox.min.x) / h_path).round() as isize;
        let j = ((p.y - bbox.min.y) / h_path).round() as isize;
        (
            i.clamp(0, nx as isize - 1) as usize,
            j.clamp(0, ny as isize - 1) as usize,
        )
    };

    let start = nearest_cell(y);
    let goal = nearest_cell(z);
    let idx = |i: usize, j: usize| j * nx + i;
    let mut prev = vec![usize::MAX; nx * ny];
    let mut queue = std::collections::VecDeque::new();
    // Seed from the start point even if its rounded cell is slightly shallow.
    prev[idx(start.0, start.1)] = idx(start.0, start.1);
    queue.push_back(start);
    let mut found = false;
    while let Some((i, j)) = queue.pop_front() {
        if (i, j) == goal {
            found = true;
            break;
        }
        for (di, dj) in [(1isize, 0isize), (-1, 0), (0, 1), (0, -1)] {
            let ii = i as isize + di;
            let jj = j as isize + dj;
            if ii < 0 || jj < 0 || ii >= nx as isize || jj >= ny as isize {
                continue;
            }
            let (ii, jj) = (ii as usize, jj as usize);
            if prev[idx(ii, jj)] != usize::MAX {
                continue;
            }
            if !deep_inside(node(ii, jj)) && (ii, jj) != goal {
                continue;
            }
            prev[idx(ii, jj)] = idx(i, j);
            queue.push_back((ii, jj));
        }
    }
    if !found {
        return Err(Error::NoPath { erosion });
    }
    let mut path = vec![z];
    let mut cur = idx(goal.0, goal.1);
    let start_idx = idx(start.0, start.1);
    while cur != start_idx {
        path.push(Vec2::new(
            bbox.min.x + (cur % nx) as f64 * h_path,
            bbox.min.y + (cur / nx) as f64 * h_path,
        ));
        cur = prev[cur];
    }
    path.push(y);
    path.reverse();

    // March centers along the corridor at exact chord spacing R/2.
    let spacing = 2.0 * r4;
    let mut centers = vec![y];
    let mut seg = 0usize;
    let mut pos = y;
    'outer: loop {
        let last = *centers.last().unwrap();
        if last.dist(z) <= r4 {
            break;
        }
        if last.dist(z) <= spacing {
            // Final ball placed toward the endpoint at exact spacing.
            let dir = (z - last).normalized();
            centers.push(last + dir * spacing);
            break;
        }
        // First crossing of the spacing circle along the remaining polyline.
        loop {
            if seg + 1 >= path.len() {
                // Numerical corner case: step straight at the endpoint.
                let dir = (z - last).normalized();
                centers.push(last + dir * spacing);
                continue 'outer;
            }
            let a = pos;
            let b = path[seg + 1];
            if last.dist(b) >= spacing {
                let t = circle_crossing(a, b, last, spacing);
                let c = a.lerp(b, t);
                pos = c;
                centers.push(c);
                continue 'outer;
            }
            pos = b;
            seg += 1;
        }
    }

    let chain = HarnackChain {
        centers,
        ball_radius: r4,
        margin,
        start: y,
        end: z,
    };
    Ok(chain)
}

/// Smallest `t ∈ [0,1]` with `|a + t(b-a) - c| = radius`, assuming
/// `|a - c| ≤ radius ≤ |b - c|`.
fn circle_crossing(a: Vec2, b: Vec2, c: Vec2, radius: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if a.lerp(b, mid).dist(c) < radius {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Seeded family of positive harmonic polynomials `Re/Im` parts of complex
/// cubics plus an offset keeping the minimum above 0.1 on the given box.
pub fn positive_harmonic_samples(
    seed: u64,
    count: usize,
    bbox: Rect,
) -> Vec<impl Fn(Vec2) -> f64 + Clone> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let coeffs: [(f64, f64); 4] = [
            (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
        ];
        let raw = move |p: Vec2| {
            // Real part of sum c_k z^k.
            let (mut zx, mut zy) = (1.0f64, 0.0f64);
            let mut acc = 0.0;
            for (re, im) in coeffs {
                acc += re * zx - im * zy;
                let nzx = zx * p.x - zy * p.y;
                let nzy = zx * p.y + zy * p.x;
                zx = nzx;
                zy = nzy;
            }
            acc
        };
        // Offset so the minimum over the box corners/edges stays above 0.1.
        let mut min_v = f64::INFINITY;
        let steps = 32;
        for j in 0..=steps {
            for i in 0..=steps {
                let p = Vec2::new(
                    bbox.min.x + bbox.width() * i as f64 / steps as f64,
                    bbox.min.y + bbox.height() * j as f64 / steps as f64,
                );
                min_v = min_v.min(raw(p));
            }
        }
        let offset = 0.1 - min_v.min(0.0) + 0.1;
        out.push(move |p: Vec2| raw(p) + offset);
    }
    out
}

/// Max-norm of the plain five-point Laplacian over interior nodes; the
/// harmonicity witness for sampled polynomial fields.
pub fn plain_laplacian_max(w: &ScalarField) -> f64 {
    let mask = w.mask();
    let mut worst = 0.0f64;
    for j in 1..mask.ny - 1 {
        for i in 1..mask.nx - 1 {
            if mask.kind(i, j) != CellKind::Interior {
                continue;
            }
            let lap = w.laplacian_plain(i, j);
            if lap.is_finite() {
                worst = worst.max(lap.abs());
            }
        }
    }
    worst
}
