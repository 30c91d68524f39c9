//! Boundary polylines: parametric sampling, marching squares for implicit
//! kinds, arc-length resampling and discrete curvature.

use super::curve::{CurveParam, EllipseCurve};
use super::domain::{fourier_curve, DomainKind};
use super::vec2::{Rect, Vec2};

/// Signed area of a simple polygon (positive when counterclockwise).
pub fn polygon_area(vertices: &[Vec2]) -> f64 {
    let n = vertices.len();
    let mut acc = 0.0;
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        acc += a.x * b.y - b.x * a.y;
    }
    0.5 * acc
}

pub fn polygon_signed_distance(vertices: &[Vec2], x: Vec2) -> f64 {
    let n = vertices.len();
    let mut dist_sq = f64::INFINITY;
    let mut inside = false;
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        dist_sq = dist_sq.min(segment_distance_sq(a, b, x));
        // Even-odd crossing test.
        if (a.y > x.y) != (b.y > x.y) {
            let t = (x.y - a.y) / (b.y - a.y);
            if x.x < a.x + t * (b.x - a.x) {
                inside = !inside;
            }
        }
    }
    let d = dist_sq.sqrt();
    if inside {
        -d
    } else {
        d
    }
}

fn segment_distance_sq(a: Vec2, b: Vec2, x: Vec2) -> f64 {
    let ab = b - a;
    let len_sq = ab.norm_sq();
    let t = if len_sq == 0.0 {
        0.0
    } else {
        ((x - a).dot(ab) / len_sq).clamp(0.0, 1.0)
    };
    (a + ab * t - x).norm_sq()
}

pub fn polyline_length(points: &[Vec2], closed: bool) -> f64 {
    let mut len = 0.0;
    for w in points.windows(2) {
        len += w[0].dist(w[1]);
    }
    if closed && points.len() > 1 {
        len += points[points.len() - 1].dist(points[0]);
    }
    len
}

/// Resamples a closed polyline to `n` points equispaced in arc length.
pub fn resample_closed(points: &[Vec2], n: usize) -> Vec<Vec2> {
    assert!(points.len() >= 2 && n >= 1);
    let total = polyline_length(points, true);
    let mut out = Vec::with_capacity(n);
    let step = total / n as f64;
    let mut target = 0.0;
    let mut acc = 0.0;
    let mut seg = 0;
    for _ in 0..n {
        while seg < points.len() {
            let a = points[seg];
            let b = points[(seg + 1) % points.len()];
            let len = a.dist(b);
            if acc + len >= target || seg == points.len() - 1 {
                let t = if len == 0.0 {
                    0.0
                } else {
                    ((target - acc) / len).clamp(0.0, 1.0)
                };
                out.push(a.lerp(b, t));
                break;
            }
            acc += len;
            seg += 1;
        }
        target += step;
    }
    out
}

/// Closed boundary loops for a domain kind, counterclockwise, roughly
/// `points_hint` points in total.
pub fn boundary_loops(kind: &DomainKind, points_hint: usize) -> Vec<Vec<Vec2>> {
    let n = points_hint.max(16);
    match kind {
        DomainKind::Disk(p) => {
            let pts = (0..n)
                .map(|i| {
                    let t = std::f64::consts::TAU * i as f64 / n as f64;
                    p.center + Vec2::from_angle(t) * p.radius
                })
                .collect();
            vec![pts]
        }
        DomainKind::Ellipse(p) => {
            let curve = EllipseCurve {
                center: p.center,
                a: p.semi_axes[0],
                b: p.semi_axes[1],
            };
            vec![parametric_loop(&curve, n)]
        }
        DomainKind::FourierDisk(p) => {
            let curve = fourier_curve(p);
            vec![parametric_loop(&curve, n)]
        }
        DomainKind::Polygon(p) => vec![resample_closed(&p.vertices, n)],
        DomainKind::Union(_) => {
            let bbox = marching_bbox(kind);
            let res = 512.max(2 * points_hint.min(4096));
            let loops = marching_squares(|x| kind_sdf(kind, x), &bbox, res);
            loops
                .into_iter()
                .filter(|lp| lp.len() >= 8)
                .map(|lp| {
                    let len = polyline_length(&lp, true);
                    let total: f64 = kind_perimeter_hint(kind);
                    let share = ((len / total) * n as f64).ceil().max(16.0) as usize;
                    resample_closed(&lp, share)
                })
                .collect()
        }
    }
}

fn kind_sdf(kind: &DomainKind, x: Vec2) -> f64 {
    // Only membership fidelity matters for contour extraction.
    match kind {
        DomainKind::Union(p) => p
            .members
            .iter()
            .map(|m| kind_sdf(m, x))
            .fold(f64::INFINITY, f64::min),
        DomainKind::Disk(p) => (x - p.center).norm() - p.radius,
        DomainKind::Ellipse(p) => {
            // Radial gap along the ray from the center; sign-exact.
            let rel = x - p.center;
            let scale = ((rel.x / p.semi_axes[0]).powi(2) + (rel.y / p.semi_axes[1]).powi(2))
                .sqrt();
            if scale == 0.0 {
                -p.semi_axes[0].min(p.semi_axes[1])
            } else {
                rel.norm() * (1.0 - 1.0 / scale)
            }
        }
        DomainKind::FourierDisk(p) => {
            let curve = fourier_curve(p);
            let rel = x - p.center;
            rel.norm() - curve.radius(rel.angle())
        }
        DomainKind::Polygon(p) => polygon_signed_distance(&p.vertices, x),
    }
}

fn kind_perimeter_hint(kind: &DomainKind) -> f64 {
    let bbox = marching_bbox(kind);
    2.0 * (bbox.width() + bbox.height())
}

fn marching_bbox(kind: &DomainKind) -> Rect {
    match kind {
        DomainKind::Union(p) => {
            let mut r = marching_bbox(&p.members[0]);
            for m in &p.members[1..] {
                r = r.union(&marching_bbox(m));
            }
            r.inflated(0.05 * (r.width() + r.height()))
        }
        DomainKind::Disk(p) => Rect::new(
            p.center - Vec2::new(p.radius, p.radius),
            p.center + Vec2::new(p.radius, p.radius),
        )
        .inflated(0.1 * p.radius),
        DomainKind::Ellipse(p) => {
            let half = Vec2::new(p.semi_axes[0], p.semi_axes[1]);
            Rect::new(p.center - half, p.center + half).inflated(0.1 * half.norm())
        }
        DomainKind::FourierDisk(p) => {
            let r = 2.0 * p.base_radius;
            Rect::new(p.center - Vec2::new(r, r), p.center + Vec2::new(r, r))
        }
        DomainKind::Polygon(p) => {
            let mut min = p.vertices[0];
            let mut max = p.vertices[0];
            for v in &p.vertices {
                min = Vec2::new(min.x.min(v.x), min.y.min(v.y));
                max = Vec2::new(max.x.max(v.x), max.y.max(v.y));
            }
            Rect::new(min, max).inflated(0.05 * (max - min).norm().max(1e-6))
        }
    }
}

fn parametric_loop<C: CurveParam>(curve: &C, n: usize) -> Vec<Vec2> {
    // Dense parametric sampling, then arc-length resampling.
    let dense = 8 * n;
    let pts: Vec<Vec2> = (0..dense)
        .map(|i| curve.at(std::f64::consts::TAU * i as f64 / dense as f64))
        .collect();
    resample_closed(&pts, n)
}

/// Max pairwise distance over all loop points.
pub fn loops_diameter(loops: &[Vec<Vec2>]) -> f64 {
    let pts: Vec<Vec2> = loops.iter().flatten().copied().collect();
    let stride = (pts.len() / 1024).max(1);
    let sampled: Vec<Vec2> = pts.iter().copied().step_by(stride).collect();
    let mut best = 0.0_f64;
    for (i, &a) in sampled.iter().enumerate() {
        for &b in &sampled[i + 1..] {
            best = best.max(a.dist(b));
        }
    }
    best
}

/// Min circumradius over consecutive point triples (discrete curvature radius).
pub fn loops_min_curvature_radius(loops: &[Vec<Vec2>]) -> f64 {
    let mut best = f64::INFINITY;
    for lp in loops {
        let n = lp.len();
        if n < 8 {
            continue;
        }
        for i in 0..n {
            let a = lp[i];
            let b = lp[(i + 1) % n];
            let c = lp[(i + 2) % n];
            let area2 = ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y)).abs();
            if area2 < 1e-300 {
                continue; // collinear: infinite radius
            }
            let r = a.dist(b) * b.dist(c) * c.dist(a) / (2.0 * area2);
            best = best.min(r);
        }
    }
    best
}

/// Area centroid of a set of closed loops via the shoelace formula.
pub fn loops_centroid(loops: &[Vec<Vec2>]) -> Vec2 {
    let mut area = 0.0;
    let mut cx = 0.0;
    let mut cy = 0.0;
    for lp in loops {
        let n = lp.len();
        for i in 0..n {
            let a = lp[i];
            let b = lp[(i + 1) % n];
            let cross = a.x * b.y - b.x * a.y;
            area += cross;
            cx += (a.x + b.x) * cross;
            cy += (a.y + b.y) * cross;
        }
    }
    area *= 0.5;
    if area.abs() < 1e-300 {
        return Vec2::ZERO;
    }
    Vec2::new(cx / (6.0 * area), cy / (6.0 * area))
}

/// Zero-contour extraction on a uniform grid. Returns closed loops oriented
/// counterclockwise (positive enclosed area).
pub fn marching_squares<F: Fn(Vec2) -> f64>(f: F, bbox: &Rect, res: usize) -> Vec<Vec<Vec2>> {
    let nx = res;
    let ny = res;
    let hx = bbox.width() / nx as f64;
    let hy = bbox.height() / ny as f64;
    let value = |i: usize, j: usize| {
        f(Vec2::new(
            bbox.min.x + i as f64 * hx,
            bbox.min.y + j as f64 * hy,
        ))
    };
    let mut grid = vec![0.0f64; (nx + 1) * (ny + 1)];
    for j in 0..=ny {
        for i in 0..=nx {
            let mut v = value(i, j);
            if v == 0.0 {
                v = 1e-12; // nudge exact zeros off the contour
            }
            grid[j * (nx + 1) + i] = v;
        }
    }
    let at = |i: usize, j: usize| grid[j * (nx + 1) + i];
    let interp = |a: Vec2, va: f64, b: Vec2, vb: f64| a.lerp(b, va / (va - vb));

    // Collect segments keyed by quantized endpoints, then chain them.
    let mut segments: Vec<(Vec2, Vec2)> = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let p00 = Vec2::new(bbox.min.x + i as f64 * hx, bbox.min.y + j as f64 * hy);
            let p10 = p00 + Vec2::new(hx, 0.0);
            let p01 = p00 + Vec2::new(0.0, hy);
            let p11 = p00 + Vec2::new(hx, hy);
            let (v00, v10, v01, v11) = (at(i, j), at(i + 1, j), at(i, j + 1), at(i + 1, j + 1));
            let mut idx = 0u8;
            if v00 < 0.0 {
                idx |= 1;
            }
            if v10 < 0.0 {
                idx |= 2;
            }
            if v11 < 0.0 {
                idx |= 4;
            }
            if v01 < 0.0 {
                idx |= 8;
            }
            if idx == 0 || idx == 15 {
                continue;
            }
            let bottom = || interp(p00, v00, p10, v10);
            let right = || interp(p10, v10, p11, v11);
            let top = || interp(p01, v01, p11, v11);
            let left = || interp(p00, v00, p01, v01);
            // Segments oriented with the negative (inside) region on the left.
            let segs: &[(Vec2, Vec2)] = &match idx {
                1 => [(left(), bottom())],
                2 => [(bottom(), right())],
                3 => [(left(), right())],
                4 => [(right(), top())],
                5 => {
                    let center = 0.25 * (v00 + v10 + v01 + v11);
                    if center < 0.0 {
                        return_two(
                            (left(), top()),
                            (right(), bottom()),
                            &mut segments,
                        );
                        continue;
                    } else {
                        return_two(
                            (left(), bottom()),
                            (right(), top()),
                            &mut segments,
                        );
                        continue;
                    }
                }
                6 => [(bottom(), top())],
                7 => [(left(), top())],
                8 => [(top(), left())],
                9 => [(top(), bottom())],
                10 => {
                    let center = 0.25 * (v00 + v10 + v01 + v11);
                    if center < 0.0 {
                        return_two(
                            (bottom(), left()),
                            (top(), right()),
                            &mut segments,
                        );
                        continue;
                    } else {
                        return_two(
                            (top(), left()),
                            (bottom(), right()),
                            &mut segments,
                        );
                        continue;
                    }
                }
                11 => [(top(), right())],
                12 => [(right(), left())],
                13 => [(right(), bottom())],
                14 => [(bottom(), left())],
                _ => unreachable!(),
            };
            segments.extend_from_slice(segs);
        }
    }
    chain_segments(segments, hx.min(hy) * 1e-6)
}

fn return_two(a: (Vec2, Vec2), b: (Vec2, Vec2), out: &mut Vec<(Vec2, Vec2)>) {
    out.push(a);
    out.push(b);
}

fn chain_segments(segments: Vec<(Vec2, Vec2)>, tol: f64) -> Vec<Vec<Vec2>> {
    use std::collections::HashMap;
    let key = |p: Vec2| {
        (
            (p.x / tol).round() as i64,
            (p.y / tol).round() as i64,
        )
    };
    let mut by_start: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, seg) in segments.iter().enumerate() {
        by_start.entry(key(seg.0)).or_default().push(i);
    }
    let mut used = vec![false; segments.len()];
    let mut loops = Vec::new();
    for start in 0..segments.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let mut pts = vec![segments[start].0, segments[start].1];
        loop {
            let tail = *pts.last().unwrap();
            let Some(candidates) = by_start.get(&key(tail)) else {
                break;
            };
            let next = candidates.iter().copied().find(|&i| !used[i]);
            let Some(i) = next else { break };
            used[i] = true;
            if segments[i].1.dist(pts[0]) < tol {
                break; // loop closed
            }
            pts.push(segments[i].1);
        }
        if pts.len() >= 3 && pts.last().unwrap().dist(pts[0]) < 10.0 * tol.max(1e-12) {
            pts.pop();
        }
        if pts.len() >= 3 {
            if polygon_area(&pts) < 0.0 {
                pts.reverse();
            }
            loops.push(pts);
        }
    }
    loops
}

/// Fast unsigned distance queries against a dense boundary polyline,
/// bucketed on a uniform spatial grid. Used by the critical-plane search
/// where millions of near-boundary proximity tests are needed.
pub struct BoundaryProximity {
    segments: Vec<(Vec2, Vec2)>,
    bbox: Rect,
    cell: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<u32>>,
}

impl BoundaryProximity {
    pub fn new(loops: &[Vec<Vec2>]) -> Self {
        let mut segments = Vec::new();
        for lp in loops {
            let n = lp.len();
            for i in 0..n {
                segments.push((lp[i], lp[(i + 1) % n]));
            }
        }
        let mut bbox = Rect::new(segments[0].0, segments[0].0);
        for (a, b) in &segments {
            for p in [a, b] {
                bbox.min = Vec2::new(bbox.min.x.min(p.x), bbox.min.y.min(p.y));
                bbox.max = Vec2::new(bbox.max.x.max(p.x), bbox.max.y.max(p.y));
            }
        }
        let span = bbox.width().max(bbox.height()).max(1e-9);
        bbox = bbox.inflated(0.05 * span);
        let target = (segments.len() as f64).sqrt().ceil() as usize;
        let nx = target.clamp(8, 256);
        let ny = nx;
        let cell = (bbox.width() / nx as f64).max(bbox.height() / ny as f64);
        let mut buckets = vec![Vec::new(); nx * ny];
        for (i, (a, b)) in segments.iter().enumerate() {
            let min_x = a.x.min(b.x);
            let max_x = a.x.max(b.x);
            let min_y = a.y.min(b.y);
            let max_y = a.y.max(b.y);
            let i0 = (((min_x - bbox.min.x) / cell).floor() as isize).clamp(0, nx as isize - 1);
            let i1 = (((max_x - bbox.min.x) / cell).floor() as isize).clamp(0, nx as isize - 1);
            let j0 = (((min_y - bbox.min.y) / cell).floor() as isize).clamp(0, ny as isize - 1);
            let j1 = (((max_y - bbox.min.y) / cell).floor() as isize).clamp(0, ny as isize - 1);
            for j in j0..=j1 {
                for ii in i0..=i1 {
                    buckets[j as usize * nx + ii as usize].push(i as u32);
                }
            }
        }
        BoundaryProximity {
            segments,
            bbox,
            cell,
            nx,
            ny,
            buckets,
        }
    }

    /// Unsigned distance from `p` to the polyline.
    pub fn distance(&self, p: Vec2) -> f64 {
        let ci = (((p.x - self.bbox.min.x) / self.cell).floor() as isize)
            .clamp(0, self.nx as isize - 1) as usize;
        let cj = (((p.y - self.bbox.min.y) / self.cell).floor() as isize)
            .clamp(0, self.ny as isize - 1) as usize;
        let mut best = f64::INFINITY;
        // Expand rings until the found distance is certified.
        for ring in 0..self.nx.max(self.ny) {
            let mut any = false;
            let lo_i = ci.saturating_sub(ring);
            let hi_i = (ci + ring).min(self.nx - 1);
            let lo_j = cj.saturating_sub(ring);
            let hi_j = (cj + ring).min(self.ny - 1);
            for j in lo_j..=hi_j {
                for i in lo_i..=hi_i {
                    let on_ring = ring == 0
                        || i == lo_i
                        || i == hi_i
                        || j == lo_j
                        || j == hi_j;
                    if !on_ring {
                        continue;
                    }
                    for &s in &self.buckets[j * self.nx + i] {
                        let (a, b) = self.segments[s as usize];
                        best = best.min(segment_distance_sq(a, b, p));
                        any = true;
                    }
                }
            }
            if any && best.sqrt() < ring as f64 * self.cell {
                break;
            }
        }
        best.sqrt()
    }
}
