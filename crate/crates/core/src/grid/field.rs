//! Grid-sampled scalar fields with boundary-aware interpolation.

use std::io::Write;
use std::sync::Arc;

use super::mask::{CellKind, GridMask, LEG_DIRS};
use crate::geometry::Vec2;
use crate::{Error, Result};

/// A scalar field on the non-exterior nodes of a [`GridMask`].
///
/// Queries between the boundary and the first inside node are served by a
/// linear extension through the Dirichlet boundary value on the cut legs.
#[derive(Clone, Debug)]
pub struct ScalarField {
    mask: Arc<GridMask>,
    values: Vec<f64>,
    extended: Vec<f64>,
    boundary_value: f64,
}

impl ScalarField {
    /// Wraps solved nodal values (full lattice, NaN on exterior nodes);
    /// builds the one-ring extension used by interpolation.
    pub fn from_values(mask: Arc<GridMask>, values: Vec<f64>, boundary_value: f64) -> Self {
        assert_eq!(values.len(), mask.len());
        let extended = build_extension(&mask, &values, boundary_value);
        ScalarField {
            mask,
            values,
            extended,
            boundary_value,
        }
    }

    /// Samples an analytic function at every lattice node (exterior included);
    /// useful for synthetic fields in tests and verification suites.
    pub fn from_fn<F: Fn(Vec2) -> f64>(mask: Arc<GridMask>, f: F) -> Self {
        let mut values = vec![f64::NAN; mask.len()];
        for idx in 0..mask.len() {
            values[idx] = f(mask.position(idx));
        }
        let extended = values.clone();
        ScalarField {
            mask,
            values,
            extended,
            boundary_value: 0.0,
        }
    }

    pub fn mask(&self) -> &GridMask {
        &self.mask
    }

    pub fn mask_arc(&self) -> Arc<GridMask> {
        Arc::clone(&self.mask)
    }

    pub fn boundary_value(&self) -> f64 {
        self.boundary_value
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn value_at(&self, idx: usize) -> f64 {
        self.values[idx]
    }

    /// Bilinear interpolation from the four surrounding nodes.
    pub fn interpolate(&self, p: Vec2) -> Result<f64> {
        let (i, j, fx, fy) = self
            .mask
            .cell_of(p)
            .ok_or(Error::OutOfDomain { x: p.x, y: p.y })?;
        let v00 = self.extended[self.mask.index(i, j)];
        let v10 = self.extended[self.mask.index(i + 1, j)];
        let v01 = self.extended[self.mask.index(i, j + 1)];
        let v11 = self.extended[self.mask.index(i + 1, j + 1)];
        let v = (1.0 - fx) * (1.0 - fy) * v00
            + fx * (1.0 - fy) * v10
            + (1.0 - fx) * fy * v01
            + fx * fy * v11;
        if v.is_nan() {
            return Err(Error::OutOfDomain { x: p.x, y: p.y });
        }
        Ok(v)
    }

    /// Catmull-Rom bicubic interpolation (4x4 stencil); higher-order
    /// cross-check for the bilinear path.
    pub fn interpolate_bicubic(&self, p: Vec2) -> Result<f64> {
        let (i, j, fx, fy) = self
            .mask
            .cell_of(p)
            .ok_or(Error::OutOfDomain { x: p.x, y: p.y })?;
        if i == 0 || j == 0 || i + 2 >= self.mask.nx || j + 2 >= self.mask.ny {
            return self.interpolate(p);
        }
        let mut rows = [0.0f64; 4];
        for (r, jj) in (j - 1..=j + 2).enumerate() {
            let mut cols = [0.0f64; 4];
            for (c, ii) in (i - 1..=i + 2).enumerate() {
                cols[c] = self.extended[self.mask.index(ii, jj)];
            }
            rows[r] = catmull_rom(cols, fx);
        }
        let v = catmull_rom(rows, fy);
        if v.is_nan() {
            // Fall back near the boundary where the wide stencil is cut.
            return self.interpolate(p);
        }
        Ok(v)
    }

    /// Central-difference gradient of the interpolated field, step `h`.
    pub fn gradient(&self, p: Vec2) -> Result<Vec2> {
        let h = self.mask.h;
        let gx =
            (self.interpolate(p + Vec2::new(h, 0.0))? - self.interpolate(p - Vec2::new(h, 0.0))?)
                / (2.0 * h);
        let gy =
            (self.interpolate(p + Vec2::new(0.0, h))? - self.interpolate(p - Vec2::new(0.0, h))?)
                / (2.0 * h);
        Ok(Vec2::new(gx, gy))
    }

    /// Plain five-point Laplacian at an inside node with four inside
    /// neighbors; NaN when the stencil is incomplete.
    pub fn laplacian_plain(&self, i: usize, j: usize) -> f64 {
        if i == 0 || j == 0 || i + 1 >= self.mask.nx || j + 1 >= self.mask.ny {
            return f64::NAN;
        }
        let h2 = self.mask.h * self.mask.h;
        let c = self.values[self.mask.index(i, j)];
        let e = self.values[self.mask.index(i + 1, j)];
        let w = self.values[self.mask.index(i - 1, j)];
        let n = self.values[self.mask.index(i, j + 1)];
        let s = self.values[self.mask.index(i, j - 1)];
        (e + w + n + s - 4.0 * c) / h2
    }

    /// Max and min over non-exterior nodes.
    pub fn range(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for idx in self.mask.inside_indices() {
            let v = self.values[idx];
            lo = lo.min(v);
            hi = hi.max(v);
        }
        (lo, hi)
    }

    /// Max gradient magnitude over interior nodes (central differences).
    pub fn max_gradient_norm(&self) -> f64 {
        let m = &self.mask;
        let mut best = 0.0f64;
        for j in 1..m.ny - 1 {
            for i in 1..m.nx - 1 {
                if m.kind(i, j) != CellKind::Interior {
                    continue;
                }
                let gx = self.extended[m.index(i + 1, j)] - self.extended[m.index(i - 1, j)];
                let gy = self.extended[m.index(i, j + 1)] - self.extended[m.index(i, j - 1)];
                if gx.is_nan() || gy.is_nan() {
                    continue;
                }
                best = best.max(Vec2::new(gx, gy).norm() / (2.0 * m.h));
            }
        }
        best
    }

    /// Max absolute second differences (xx, yy, xy) over interior nodes;
    /// a crude `max |D²u|` surrogate.
    pub fn max_second_derivative(&self) -> f64 {
        let m = &self.mask;
        let h2 = m.h * m.h;
        let mut best = 0.0f64;
        for j in 1..m.ny - 1 {
            for i in 1..m.nx - 1 {
                if m.kind(i, j) != CellKind::Interior {
                    continue;
                }
                let c = self.values[m.index(i, j)];
                let xx = self.values[m.index(i + 1, j)] + self.values[m.index(i - 1, j)] - 2.0 * c;
                let yy = self.values[m.index(i, j + 1)] + self.values[m.index(i, j - 1)] - 2.0 * c;
                let xy = self.values[m.index(i + 1, j + 1)] + self.values[m.index(i - 1, j - 1)]
                    - self.values[m.index(i + 1, j - 1)]
                    - self.values[m.index(i - 1, j + 1)];
                for v in [xx / h2, yy / h2, xy / (4.0 * h2)] {
                    if v.is_finite() {
                        best = best.max(v.abs());
                    }
                }
            }
        }
        best
    }

    /// Dumps `ix,iy,x,y,value` rows for non-exterior nodes, row-major.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "ix,iy,x,y,value")?;
        for j in 0..self.mask.ny {
            for i in 0..self.mask.nx {
                if self.mask.kind(i, j) == CellKind::Exterior {
                    continue;
                }
                let p = self.mask.node(i, j);
                writeln!(
                    w,
                    "{},{},{},{},{}",
                    i,
                    j,
                    fmt_sig(p.x),
                    fmt_sig(p.y),
                    fmt_sig(self.values[self.mask.index(i, j)])
                )?;
            }
        }
        Ok(())
    }
}

/// 12-significant-digit float formatting shared by all CSV writers.
pub fn fmt_sig(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    format!("{v:.11e}")
}

fn catmull_rom(v: [f64; 4], t: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    0.5 * ((2.0 * v[1])
        + (-v[0] + v[2]) * t
        + (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) * t2
        + (-v[0] + 3.0 * v[1] - 3.0 * v[2] + v[3]) * t3)
}

/// Linear extension of inside values through the boundary condition onto
/// the first ring of exterior nodes.
fn build_extension(mask: &GridMask, values: &[f64], g: f64) -> Vec<f64> {
    let mut ext = values.to_vec();
    let nx = mask.nx as isize;
    let ny = mask.ny as isize;
    for j in 0..ny {
        for i in 0..nx {
            let idx = (j * nx + i) as usize;
            if mask.kind_at(idx) != CellKind::Exterior {
                continue;
            }
            let mut acc = 0.0f64;
            let mut count = 0usize;
            for (a, (di, dj)) in LEG_DIRS.iter().enumerate() {
                // Inside neighbor whose cut leg points back at this node.
                let ii = i - di;
                let jj = j - dj;
                if ii < 0 || jj < 0 || ii >= nx || jj >= ny {
                    continue;
                }
                let nidx = (jj * nx + ii) as usize;
                if mask.kind_at(nidx) != CellKind::BoundaryAdjacent {
                    continue;
                }
                let theta = mask.legs_at(nidx)[a];
                if theta >= 1.0 {
                    continue;
                }
                let u = values[nidx];
                acc += u + (g - u) / theta;
                count += 1;
            }
            if count > 0 {
                ext[idx] = acc / count as f64;
            }
        }
    }
    ext
}
