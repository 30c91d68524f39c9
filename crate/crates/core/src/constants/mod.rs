//! Explicit constants of the stability analysis, in closed form and, where
//! the underlying result is non-constructive, as empirical estimators.
//!
//! The formula constants grow like `base^(diam/R)^N` and overflow f64 for
//! small offsets, so every one is carried both as a plain value (possibly
//! infinite) and in the log10 domain.

use serde::{Deserialize, Serialize};

use crate::geometry::{DomainSpec, Sdf};
use crate::grid::ScalarField;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstMode {
    Formula,
    Empirical,
}

/// Dimensional base of the chained interior Harnack inequality:
/// `3^(2^N) · 2^((N-2)·2^N)`. Exact integer powers for small `N`; the
/// log10 companion covers the overflowing range.
pub fn harnack_base(n: u32) -> f64 {
    if n > 16 {
        return f64::INFINITY;
    }
    let p = 1i32 << n;
    3f64.powi(p) * 2f64.powi((n as i32 - 2) * p)
}

pub fn log10_harnack_base(n: u32) -> f64 {
    let p = 2f64.powi(n as i32);
    p * 3f64.log10() + (n as f64 - 2.0) * p * 2f64.log10()
}

/// Growth constant accumulated along a Harnack chain of balls linking two
/// interior points: `3·max(2^(N-2)·R, diam₁)·2^(N-2)·base^(diam₂/R)^N`.
pub fn chain_growth_constant(n: u32, r: f64, diam1: f64, diam2: f64) -> f64 {
    let pre = 3.0 * (2f64.powi(n as i32 - 2) * r).max(diam1) * 2f64.powi(n as i32 - 2);
    pre * harnack_base(n).powf((diam2 / r).powi(n as i32))
}

pub fn log10_chain_growth_constant(n: u32, r: f64, diam1: f64, diam2: f64) -> f64 {
    let pre = 3.0 * (2f64.powi(n as i32 - 2) * r).max(diam1) * 2f64.powi(n as i32 - 2);
    pre.log10() + (diam2 / r).powi(n as i32) * log10_harnack_base(n)
}

/// Constant bounding the reflected difference by the boundary seminorm on
/// the critical cap:
/// `max(1, 2·diamG/ρ, 2ρC'') · max(R, diamG/2^(N-2)) · base^(2 + diamG/R)^N`.
pub fn cap_bound_constant(n: u32, r: f64, diam_g: f64, rho: f64, c_dprime: f64) -> f64 {
    let pre = 1f64.max(2.0 * diam_g / rho).max(2.0 * rho * c_dprime)
        * r.max(diam_g / 2f64.powi(n as i32 - 2));
    pre * harnack_base(n).powf((2.0 + diam_g / r).powi(n as i32))
}

pub fn log10_cap_bound_constant(n: u32, r: f64, diam_g: f64, rho: f64, c_dprime: f64) -> f64 {
    let pre = 1f64.max(2.0 * diam_g / rho).max(2.0 * rho * c_dprime)
        * r.max(diam_g / 2f64.powi(n as i32 - 2));
    pre.log10() + (2.0 + diam_g / r).powi(n as i32) * log10_harnack_base(n)
}

/// Harnack constant for `Δw + c·w = 0` with `|c| ≤ L` on a ball of radius
/// `r`: `base^(√N + √(L·r))`.
pub fn semilinear_harnack_constant(n: u32, r: f64, l: f64) -> f64 {
    harnack_base(n).powf((n as f64).sqrt() + (l * r).sqrt())
}

pub fn log10_semilinear_harnack_constant(n: u32, r: f64, l: f64) -> f64 {
    ((n as f64).sqrt() + (l * r).sqrt()) * log10_harnack_base(n)
}

/// Empirical linear growth rate of `u` off the inner boundary:
/// `min (u(x) − min_∂G u) / dist(x, ∂G)` over inside nodes at depth ≥ 2h.
pub fn empirical_k(u: &ScalarField, g: &DomainSpec, min_boundary: f64) -> Result<f64> {
    let mask = u.mask();
    let h = mask.h;
    let mut k = f64::INFINITY;
    for idx in mask.inside_indices() {
        let p = mask.position(idx);
        let depth = -g.signed_distance(p);
        if depth < 2.0 * h {
            continue;
        }
        k = k.min((u.value_at(idx) - min_boundary) / depth);
    }
    if !(k > 0.0) {
        return Err(Error::NonPositiveK(k));
    }
    Ok(k)
}

/// Empirical lower bound for the exterior normal derivative magnitude.
pub fn empirical_d0(normal_derivatives: &[f64]) -> Result<f64> {
    let d0 = normal_derivatives
        .iter()
        .map(|&d| -d)
        .fold(f64::INFINITY, f64::min);
    if !(d0 > 0.0) {
        return Err(Error::NonPositiveD0(d0));
    }
    Ok(d0)
}

/// One constant with its log10 companion and provenance tag.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct TaggedConstant {
    /// Plain value; `inf` when not representable.
    pub value: f64,
    pub log10: f64,
    pub mode: ConstMode,
}

impl TaggedConstant {
    pub fn formula(value: f64, log10: f64) -> Self {
        TaggedConstant {
            value,
            log10,
            mode: ConstMode::Formula,
        }
    }

    pub fn empirical(value: f64) -> Self {
        TaggedConstant {
            value,
            log10: value.log10(),
            mode: ConstMode::Empirical,
        }
    }
}

/// Every explicit constant of the stability pipeline for one configuration.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConstantsBundle {
    pub n_dim: u32,
    pub r: f64,
    pub diam_g: f64,
    pub diam_omega: f64,
    pub rho: f64,
    pub c_n: f64,
    pub log10_c_n: f64,
    /// Projection-stretch constant for near-tangency arcs (configurable).
    pub c_dprime: f64,
    /// Bound on `w` over the critical cap per unit seminorm.
    pub cap_bound: TaggedConstant,
    /// Linear lower-bound slope of `u` against the boundary distance.
    pub k: TaggedConstant,
    /// `(cap_bound + diamG) / K`.
    pub c_star: TaggedConstant,
    /// Final stability constant `16·N·(1 + diamG)·C*`.
    pub c_final: TaggedConstant,
    /// Seminorm smallness threshold `ρ / (4 C*)`.
    pub eps_threshold: f64,
    pub log10_eps_threshold: f64,
    /// Optional semilinear data.
    pub lipschitz: Option<f64>,
    pub d0: Option<f64>,
    /// Empirical boundary-Harnack ratio, when measured.
    pub boundary_harnack_ratio: Option<f64>,
    /// Empirical upper-bound slope of `u` against the boundary distance.
    pub k2: Option<f64>,
}

#[derive(Clone, Copy, Debug)]
pub struct AssembleInputs {
    pub n_dim: u32,
    pub r: f64,
    pub diam_g: f64,
    pub rho: f64,
    pub c_dprime: f64,
    pub cap_bound: TaggedConstant,
    pub k: f64,
}

/// Assembles the bundle enforcing the defining identities exactly in the
/// linear domain (and consistently in log10 where the values overflow).
pub fn assemble(inputs: AssembleInputs) -> Result<ConstantsBundle> {
    let AssembleInputs {
        n_dim,
        r,
        diam_g,
        rho,
        c_dprime,
        cap_bound,
        k,
    } = inputs;
    if !(k > 0.0) {
        return Err(Error::NonPositiveK(k));
    }
    let c_star_value = (cap_bound.value + diam_g) / k;
    let log10_c_star = if cap_bound.value.is_finite() {
        (cap_bound.value + diam_g).log10() - k.log10()
    } else {
        // diam_g is negligible against an overflowing cap bound.
        cap_bound.log10 - k.log10()
    };
    let c_star = TaggedConstant {
        value: c_star_value,
        log10: log10_c_star,
        mode: cap_bound.mode,
    };
    let final_pre = 16.0 * n_dim as f64 * (1.0 + diam_g);
    let c_final = TaggedConstant {
        value: final_pre * c_star.value,
        log10: final_pre.log10() + c_star.log10,
        mode: cap_bound.mode,
    };
    let eps_threshold = rho / (4.0 * c_star.value);
    let log10_eps_threshold = (rho / 4.0).log10() - c_star.log10;
    Ok(ConstantsBundle {
        n_dim,
        r,
        diam_g,
        diam_omega: diam_g + 2.0 * r,
        rho,
        c_n: harnack_base(n_dim),
        log10_c_n: log10_harnack_base(n_dim),
        c_dprime,
        cap_bound,
        k: TaggedConstant::empirical(k),
        c_star,
        c_final,
        eps_threshold,
        log10_eps_threshold,
        lipschitz: None,
        d0: None,
        boundary_harnack_ratio: None,
        k2: None,
    })
}

/// Formula-mode bundle for a concrete configuration.
pub fn formula_bundle(
    n_dim: u32,
    r: f64,
    diam_g: f64,
    rho: f64,
    c_dprime: f64,
    k: f64,
) -> Result<ConstantsBundle> {
    let cap = TaggedConstant::formula(
        cap_bound_constant(n_dim, r, diam_g, rho, c_dprime),
        log10_cap_bound_constant(n_dim, r, diam_g, rho, c_dprime),
    );
    assemble(AssembleInputs {
        n_dim,
        r,
        diam_g,
        rho,
        c_dprime,
        cap_bound: cap,
        k,
    })
}
