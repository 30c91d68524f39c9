//! Inner parallel sets `{ x ∈ G : dist(x, ∂G) > s }`.

use super::domain::DomainSpec;
use super::vec2::{Rect, Vec2};
use super::Sdf;
use crate::{Error, Result};

/// Membership predicate for the subset of `G` parallel to `∂G` at depth `s`.
pub struct ParallelSet<'a> {
    domain: &'a DomainSpec,
    depth: f64,
}

/// Requires `0 ≤ s < rho(G)`; deeper sets may be empty or disconnected.
pub fn parallel_set(domain: &DomainSpec, s: f64) -> Result<ParallelSet<'_>> {
    if !(0.0..domain.rho()).contains(&s) {
        return Err(Error::DepthExceedsRho {
            s,
            rho: domain.rho(),
        });
    }
    Ok(ParallelSet { domain, depth: s })
}

impl ParallelSet<'_> {
    pub fn depth(&self) -> f64 {
        self.depth
    }
}

impl Sdf for ParallelSet<'_> {
    fn signed_distance(&self, p: Vec2) -> f64 {
        self.domain.signed_distance(p) + self.depth
    }

    fn bounding_box(&self) -> Rect {
        self.domain.bounding_box()
    }
}
