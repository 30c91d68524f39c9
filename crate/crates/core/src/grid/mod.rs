//! Uniform Cartesian rasterization and grid-sampled scalar fields.

mod field;
mod mask;

pub use field::{fmt_sig, ScalarField};
pub use mask::{rasterize, CellKind, GridMask, LEG_DIRS};
