//! Domain rasterization with cut-cell boundary legs.

use crate::geometry::{Rect, Sdf, Vec2};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellKind {
    Interior,
    /// Inside the domain but at least one axis arm crosses the boundary
    /// within one grid spacing.
    BoundaryAdjacent,
    Exterior,
}

/// Axis order for cut-cell legs: east, west, north, south.
pub const LEG_DIRS: [(isize, isize); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];

/// Node-centered rasterization of a domain.
///
/// Nodes sit at `origin + (i, j)·h`. Every inside node carries four
/// fractional legs in `(0, 1]`: the distance (in units of `h`) to the
/// boundary along each axis arm, clipped at the neighboring node.
#[derive(Clone, Debug)]
pub struct GridMask {
    pub origin: Vec2,
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
    kinds: Vec<CellKind>,
    legs: Vec<[f64; 4]>,
}

impl GridMask {
    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn node(&self, i: usize, j: usize) -> Vec2 {
        self.origin + Vec2::new(i as f64 * self.h, j as f64 * self.h)
    }

    #[inline]
    pub fn kind(&self, i: usize, j: usize) -> CellKind {
        self.kinds[self.index(i, j)]
    }

    #[inline]
    pub fn kind_at(&self, idx: usize) -> CellKind {
        self.kinds[idx]
    }

    #[inline]
    pub fn legs_at(&self, idx: usize) -> [f64; 4] {
        self.legs[idx]
    }

    pub fn is_inside(&self, i: usize, j: usize) -> bool {
        self.kind(i, j) != CellKind::Exterior
    }

    pub fn position(&self, idx: usize) -> Vec2 {
        let (i, j) = (idx % self.nx, idx / self.nx);
        self.node(i, j)
    }

    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    pub fn inside_count(&self) -> usize {
        self.kinds
            .iter()
            .filter(|k| **k != CellKind::Exterior)
            .count()
    }

    pub fn interior_count(&self) -> usize {
        self.kinds
            .iter()
            .filter(|k| **k == CellKind::Interior)
            .count()
    }

    /// Indices of all non-exterior nodes, row-major.
    pub fn inside_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.kinds
            .iter()
            .enumerate()
            .filter(|(_, k)| **k != CellKind::Exterior)
            .map(|(i, _)| i)
    }

    /// Floor cell coordinates of a physical point, if within the node lattice.
    pub fn cell_of(&self, p: Vec2) -> Option<(usize, usize, f64, f64)> {
        let fx = (p.x - self.origin.x) / self.h;
        let fy = (p.y - self.origin.y) / self.h;
        if fx < 0.0 || fy < 0.0 {
            return None;
        }
        let i = fx.floor() as usize;
        let j = fy.floor() as usize;
        if i + 1 >= self.nx || j + 1 >= self.ny {
            return None;
        }
        Some((i, j, fx - i as f64, fy - j as f64))
    }

    /// True when the four lattice nodes around `p` and their immediate
    /// neighbors within `margin` are all non-exterior.
    pub fn has_margin(&self, p: Vec2, margin: f64) -> bool {
        let Some((i, j, _, _)) = self.cell_of(p) else {
            return false;
        };
        let reach = (margin / self.h).ceil() as isize;
        for dj in -reach..=reach + 1 {
            for di in -reach..=reach + 1 {
                let ii = i as isize + di;
                let jj = j as isize + dj;
                if ii < 0 || jj < 0 || ii >= self.nx as isize || jj >= self.ny as isize {
                    return false;
                }
                let q = self.node(ii as usize, jj as usize);
                if (q - p).x.abs() <= margin && (q - p).y.abs() <= margin {
                    if self.kind(ii as usize, jj as usize) == CellKind::Exterior {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Rasterizes `domain` at spacing `h`. The grid covers the bounding box
/// padded by two cells, so every inside node has in-lattice neighbors.
pub fn rasterize<T: Sdf + ?Sized>(domain: &T, h: f64) -> Result<GridMask> {
    if !(h > 0.0) {
        return Err(Error::Precondition(format!(
            "grid spacing must be positive, got {h}"
        )));
    }
    let bbox: Rect = domain.bounding_box().inflated(2.0 * h);
    let nx = (bbox.width() / h).ceil() as usize + 1;
    let ny = (bbox.height() / h).ceil() as usize + 1;
    if nx.saturating_mul(ny) > 80_000_000 {
        return Err(Error::Precondition(format!(
            "grid of {nx} x {ny} nodes is too large"
        )));
    }
    let origin = bbox.min;
    let mut sdf = vec![0.0f64; nx * ny];
    for j in 0..ny {
        for i in 0..nx {
            sdf[j * nx + i] =
                domain.signed_distance(origin + Vec2::new(i as f64 * h, j as f64 * h));
        }
    }

    let inside = |i: isize, j: isize| -> bool {
        i >= 0 && j >= 0 && (i as usize) < nx && (j as usize) < ny && sdf[j as usize * nx + i as usize] < 0.0
    };

    let mut kinds = vec![CellKind::Exterior; nx * ny];
    let mut legs = vec![[1.0f64; 4]; nx * ny];
    let mut interior = 0usize;
    for j in 0..ny {
        for i in 0..nx {
            let idx = j * nx + i;
            if sdf[idx] >= 0.0 {
                continue;
            }
            let mut cut = false;
            let mut node_legs = [1.0f64; 4];
            for (a, (di, dj)) in LEG_DIRS.iter().enumerate() {
                if !inside(i as isize + di, j as isize + dj) {
                    cut = true;
                    let p = origin + Vec2::new(i as f64 * h, j as f64 * h);
                    let q = p + Vec2::new(*di as f64 * h, *dj as f64 * h);
                    node_legs[a] = boundary_fraction(domain, p, q);
                }
            }
            kinds[idx] = if cut {
                CellKind::BoundaryAdjacent
            } else {
                interior += 1;
                CellKind::Interior
            };
            legs[idx] = node_legs;
        }
    }
    if interior == 0 {
        return Err(Error::EmptyDomain);
    }
    Ok(GridMask {
        origin,
        h,
        nx,
        ny,
        kinds,
        legs,
    })
}

/// Fraction `θ ∈ (0, 1]` of the segment `p → q` before the boundary
/// crossing, located by bisection on the signed distance.
fn boundary_fraction<T: Sdf + ?Sized>(domain: &T, p: Vec2, q: Vec2) -> f64 {
    debug_assert!(domain.signed_distance(p) < 0.0);
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    if domain.signed_distance(q) < 0.0 {
        // Neighbor node outside the lattice but inside the domain can't
        // happen with a padded bounding box; treat as a full leg.
        return 1.0;
    }
    // Bisection to ~1e-10 of a cell.
    for _ in 0..36 {
        let mid = 0.5 * (lo + hi);
        if domain.signed_distance(p.lerp(q, mid)) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let theta = 0.5 * (lo + hi);
    theta.max(1e-6)
}
