//! Quantitative moving-planes engine: reflected differences on critical
//! caps, the plane-symmetric core, the approximate center of symmetry and
//! the certified radius gap.

use serde::{Deserialize, Serialize};

use crate::constants::{
    self, cap_bound_constant, log10_cap_bound_constant, AssembleInputs, ConstMode,
    ConstantsBundle, TaggedConstant,
};
use crate::geometry::{
    critical_position, minkowski_sum_ball, reflect, CapDecomposition, ContactCase,
    CriticalSearchParams, DomainSpec, MinkowskiDomain, Sdf, Vec2,
};
use crate::grid::ScalarField;
use crate::solver::{
    self, solve_semilinear, solve_torsion, SemilinearProblem, SolveStats, DEFAULT_LINEAR_TOL,
    DEFAULT_SEMILINEAR_TOL,
};
use crate::traces::{
    boundary_extrema, lipschitz_seminorm, normal_derivative, sample_boundary, BoundaryTrace,
};
use crate::{Error, Result};

/// Node-wise difference `w(x) = u(x^m) − u(x)` over the critical cap of Ω,
/// restricted to the connected component of the inner cap touching the
/// contact witness.
#[derive(Clone, Debug)]
pub struct ReflectedDifference {
    pub omega: Vec2,
    pub m: f64,
    /// `w` on cap nodes, NaN elsewhere (lattice layout of the field mask).
    pub values: Vec<f64>,
    pub cap_nodes: Vec<usize>,
    /// Nodes of the inner-cap component seeded at the witness ball.
    pub component: Vec<usize>,
    pub min_w: f64,
    /// Positivity relaxation threshold `4h·max|∇u|`.
    pub eta: f64,
    /// Max `|w|` over nodes within half a cell of the critical plane.
    pub plane_residual: f64,
}

/// Computes the reflected difference for a solved field on `Ω = G + B_R`.
pub fn reflected_difference(
    u: &ScalarField,
    domain: &MinkowskiDomain,
    cap: &CapDecomposition,
) -> Result<ReflectedDifference> {
    let mask = u.mask();
    let h = mask.h;
    let frame = cap.frame();
    let eta = 4.0 * h * u.max_gradient_norm();

    let mut values = vec![f64::NAN; mask.len()];
    let mut cap_nodes = Vec::new();
    let mut min_w = f64::INFINITY;
    let mut plane_residual = 0.0f64;
    for idx in mask.inside_indices() {
        let p = mask.position(idx);
        let height = frame.height(p);
        if height <= 0.0 {
            continue;
        }
        let q = reflect(p, &frame);
        let w = match u.interpolate(q) {
            Ok(uq) => uq - u.value_at(idx),
            Err(_) => {
                // Reflected slivers hugging ∂Ω carry no information; a deep
                // failure means the plane sits below its critical offset.
                if domain.signed_distance(p) > -2.0 * h {
                    continue;
                }
                return Err(Error::OutOfDomain { x: q.x, y: q.y });
            }
        };
        values[idx] = w;
        cap_nodes.push(idx);
        min_w = min_w.min(w);
        if height <= 0.5 * h {
            plane_residual = plane_residual.max(w.abs());
        }
    }
    if cap_nodes.is_empty() {
        return Err(Error::Precondition(format!(
            "critical cap for direction ({}, {}) contains no grid nodes",
            cap.omega.x, cap.omega.y
        )));
    }

    // Flood fill of the inner-cap component intersecting B_R(witness).
    let g = &domain.inner;
    let witness = cap.witness();
    let in_inner_cap = |idx: usize| {
        let p = mask.position(idx);
        frame.height(p) > 0.0 && g.signed_distance(p) < 0.0
    };
    let mut component = Vec::new();
    let mut seen = vec![false; mask.len()];
    let mut queue: std::collections::VecDeque<usize> = mask
        .inside_indices()
        .filter(|&idx| in_inner_cap(idx) && mask.position(idx).dist(witness) < domain.radius)
        .collect();
    if queue.is_empty() {
        // Witness ball misses the lattice (very thin cap): seed at the node
        // nearest to the witness.
        if let Some(best) = mask
            .inside_indices()
            .filter(|&idx| in_inner_cap(idx))
            .min_by(|&a, &b| {
                mask.position(a)
                    .dist(witness)
                    .total_cmp(&mask.position(b).dist(witness))
            })
        {
            queue.push_back(best);
        }
    }
    for &idx in &queue {
        seen[idx] = true;
    }
    while let Some(idx) = queue.pop_front() {
        component.push(idx);
        let (i, j) = (idx % mask.nx, idx / mask.nx);
        for (di, dj) in [(1isize, 0isize), (-1, 0), (0, 1), (0, -1)] {
            let ii = i as isize + di;
            let jj = j as isize + dj;
            if ii < 0 || jj < 0 || ii >= mask.nx as isize || jj >= mask.ny as isize {
                continue;
            }
            let nidx = mask.index(ii as usize, jj as usize);
            if seen[nidx] || !in_inner_cap(nidx) || values[nidx].is_nan() {
                continue;
            }
            seen[nidx] = true;
            queue.push_back(nidx);
        }
    }

    Ok(ReflectedDifference {
        omega: cap.omega,
        m: cap.critical_m,
        values,
        cap_nodes,
        component,
        min_w,
        eta,
        plane_residual,
    })
}

/// Supremum of `w` over the restricted inner-cap component.
pub fn sup_wm(w: &ReflectedDifference) -> f64 {
    w.component
        .iter()
        .map(|&idx| w.values[idx])
        .fold(f64::NEG_INFINITY, f64::max)
}

/// The plane-symmetric open set `X`: the inner cap glued to its mirror
/// image across the critical plane.
#[derive(Clone, Debug)]
pub struct SymmetricCore {
    pub omega: Vec2,
    pub m: f64,
    domain: DomainSpec,
}

pub fn symmetric_core(g: &DomainSpec, cap: &CapDecomposition) -> SymmetricCore {
    SymmetricCore {
        omega: cap.omega,
        m: cap.critical_m,
        domain: g.clone(),
    }
}

impl SymmetricCore {
    /// Membership; reflection-symmetric by construction.
    pub fn contains(&self, p: Vec2) -> bool {
        let frame = crate::geometry::HyperplaneFrame {
            omega: self.omega,
            lambda: self.m,
        };
        let d = frame.height(p);
        if d >= 0.0 {
            self.domain.signed_distance(p) < 0.0
        } else {
            self.domain.signed_distance(reflect(p, &frame)) < 0.0
        }
    }

    pub fn frame(&self) -> crate::geometry::HyperplaneFrame {
        crate::geometry::HyperplaneFrame {
            omega: self.omega,
            lambda: self.m,
        }
    }
}

/// Max distance from the sampled boundary of `X` to `∂G`. The cap-side arc
/// lies on `∂G`; only mirrored points can deviate.
pub fn core_gap(core: &SymmetricCore, g: &DomainSpec, samples: usize) -> f64 {
    let frame = core.frame();
    let mut worst = 0.0f64;
    for lp in g.boundary_loops(samples) {
        for p in lp {
            if frame.height(p) >= 0.0 {
                let q = reflect(p, &frame);
                worst = worst.max(g.signed_distance(q).abs());
            }
        }
    }
    worst
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SandwichOutcome {
    pub s: f64,
    pub threshold: f64,
    pub checked_inner: usize,
    pub checked_outer: usize,
    pub violations_inner: usize,
    pub violations_outer: usize,
    pub passed: bool,
}

/// Verifies `G_∥^s ⊂ X ⊂ G` on random samples.
///
/// Errors with `HypothesisViolated` when the seminorm is not below
/// `ρ/(4C*)`, and rejects depths outside `(C*·seminorm, ρ/2)`.
#[allow(clippy::too_many_arguments)]
pub fn sandwich_check(
    g: &DomainSpec,
    core: &SymmetricCore,
    s: f64,
    seminorm: f64,
    c_star: f64,
    samples: usize,
    slack: f64,
    seed: u64,
) -> Result<SandwichOutcome> {
    use rand::{Rng, SeedableRng};
    let rho = g.rho();
    let threshold = rho / (4.0 * c_star);
    if seminorm >= threshold {
        return Err(Error::HypothesisViolated {
            seminorm,
            threshold,
        });
    }
    let (lo, hi) = (c_star * seminorm, 0.5 * rho);
    if !(s > lo && s < hi) {
        return Err(Error::InvalidSandwichDepth { s, lo, hi });
    }
    let bbox = g.bounding_box();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut out = SandwichOutcome {
        s,
        threshold,
        checked_inner: 0,
        checked_outer: 0,
        violations_inner: 0,
        violations_outer: 0,
        passed: false,
    };
    let mut tested = 0usize;
    while tested < samples {
        let p = Vec2::new(
            rng.gen_range(bbox.min.x..bbox.max.x),
            rng.gen_range(bbox.min.y..bbox.max.y),
        );
        let sdf = g.signed_distance(p);
        if sdf >= 0.0 {
            continue;
        }
        tested += 1;
        let in_core = core.contains(p);
        // Inner inclusion: the deep parallel set must lie inside X;
        // points within `slack` of the depth threshold are exempt.
        if sdf < -s - slack {
            out.checked_inner += 1;
            if !in_core {
                out.violations_inner += 1;
            }
        }
        // Outer inclusion: X must stay inside G (up to containment slack,
        // which the mirrored cap inherits from the plane search).
        if in_core {
            out.checked_outer += 1;
            if sdf > slack {
                out.violations_outer += 1;
            }
        }
    }
    out.passed = out.violations_inner == 0 && out.violations_outer == 0;
    Ok(out)
}

/// Intersection of the critical planes for the coordinate directions.
pub fn approximate_center(caps: &[CapDecomposition]) -> Result<Vec2> {
    let mut m1 = None;
    let mut m2 = None;
    for cap in caps {
        if (cap.omega - Vec2::new(1.0, 0.0)).norm() < 1e-9 {
            m1 = Some(cap.critical_m);
        }
        if (cap.omega - Vec2::new(0.0, 1.0)).norm() < 1e-9 {
            m2 = Some(cap.critical_m);
        }
    }
    match (m1, m2) {
        (Some(x), Some(y)) => Ok(Vec2::new(x, y)),
        _ => Err(Error::Precondition(
            "center needs critical positions for both coordinate directions".into(),
        )),
    }
}

/// Extremal distances from `o` to the sampled boundary of `G`.
pub fn stability_radii(g: &DomainSpec, o: Vec2, samples: usize) -> (f64, f64) {
    let mut r_i = f64::INFINITY;
    let mut r_e = 0.0f64;
    for lp in g.boundary_loops(samples.max(1024)) {
        for p in lp {
            let d = p.dist(o);
            r_i = r_i.min(d);
            r_e = r_e.max(d);
        }
    }
    (r_i, r_e)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DirectionReport {
    pub omega: Vec2,
    pub extent: f64,
    pub critical_m: f64,
    pub case_kind: ContactCase,
    pub witness: Vec2,
    pub sup_w: f64,
    pub min_w: f64,
    pub eta: f64,
    pub plane_residual: f64,
    pub core_gap: f64,
    /// `sup_w / seminorm`; the empirical cap-bound ratio.
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SemilinearReport {
    pub d0: Option<f64>,
    pub c2_norm: f64,
    pub lipschitz: f64,
    pub smallness_threshold: Option<f64>,
    /// Whether `R < d0 / (2·‖u‖_C²)` held (None when d0 is unavailable).
    pub smallness_ok: Option<bool>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SandwichSummary {
    Passed(SandwichOutcome),
    Failed(SandwichOutcome),
    HypothesisViolated { seminorm: f64, threshold: f64 },
    DepthUnavailable { s: f64, lo: f64, hi: f64 },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StabilityReport {
    pub problem: String,
    pub mode: ConstMode,
    pub h: f64,
    pub r: f64,
    pub trace_samples: usize,
    pub seminorm: f64,
    pub trace_min: f64,
    pub trace_max: f64,
    pub center: Vec2,
    pub r_i: f64,
    pub r_e: f64,
    pub gap: f64,
    /// Sampled check of `B_{r_i+R}(O) ⊂ Ω ⊂ B_{r_e+R}(O)`.
    pub ball_inclusions_ok: bool,
    pub directions: Vec<DirectionReport>,
    pub constants: ConstantsBundle,
    pub certificate_ratio: f64,
    pub log10_certificate_slack: Option<f64>,
    pub certificate_pass: bool,
    pub sandwich: SandwichSummary,
    pub solve: SolveStats,
    pub max_gradient: f64,
    pub semilinear: Option<SemilinearReport>,
}

#[derive(Clone, Debug)]
pub enum ProblemChoice {
    Torsion,
    Semilinear(SemilinearProblem),
}

impl ProblemChoice {
    pub fn label(&self) -> &'static str {
        match self {
            ProblemChoice::Torsion => "torsion",
            ProblemChoice::Semilinear(_) => "semilinear",
        }
    }
}

#[derive(Clone, Debug)]
pub struct CertifyParams {
    /// Grid spacing; defaults to `diam(Ω)/256`.
    pub h: Option<f64>,
    pub trace_samples: usize,
    pub mode: ConstMode,
    pub c_dprime: f64,
    pub seed: u64,
    /// Extra diagnostic directions beyond the two coordinate axes.
    pub extra_directions: usize,
    pub sandwich_samples: usize,
    pub linear_tol: f64,
    pub semilinear_tol: f64,
}

impl Default for CertifyParams {
    fn default() -> Self {
        CertifyParams {
            h: None,
            trace_samples: 1024,
            mode: ConstMode::Empirical,
            c_dprime: 2.0,
            seed: 42,
            extra_directions: 0,
            sandwich_samples: 10_000,
            linear_tol: DEFAULT_LINEAR_TOL,
            semilinear_tol: DEFAULT_SEMILINEAR_TOL,
        }
    }
}

/// One moving-planes pass for a single direction on a solved field.
pub fn run_direction(
    u: &ScalarField,
    domain: &MinkowskiDomain,
    omega: Vec2,
    search: &CriticalSearchParams,
    seminorm: f64,
) -> Result<DirectionReport> {
    let g = &domain.inner;
    let cap = critical_position(g, omega, search)?;
    let w = reflected_difference(u, domain, &cap)?;
    let sup = sup_wm(&w);
    let core = symmetric_core(g, &cap);
    let gap = core_gap(&core, g, 2048);
    Ok(DirectionReport {
        omega: cap.omega,
        extent: cap.extent,
        critical_m: cap.critical_m,
        case_kind: cap.case_kind,
        witness: cap.witness(),
        sup_w: sup,
        min_w: w.min_w,
        eta: w.eta,
        plane_residual: w.plane_residual,
        core_gap: gap,
        ratio: if seminorm > 0.0 { sup / seminorm } else { 0.0 },
    })
}

/// Full pipeline: solve, trace, per-direction moving planes, center, radii,
/// constants, certificate, sandwich.
pub fn certify(
    g: &DomainSpec,
    r: f64,
    problem: &ProblemChoice,
    params: &CertifyParams,
) -> Result<StabilityReport> {
    let domain = minkowski_sum_ball(g.clone(), r)?;
    let h = params.h.unwrap_or(domain.diameter() / 256.0);

    let (u, stats) = match problem {
        ProblemChoice::Torsion => solve_torsion(&domain, h, params.linear_tol)?,
        ProblemChoice::Semilinear(p) => solve_semilinear(&domain, p, h, params.semilinear_tol)?,
    };
    certify_with_field(g, &domain, &u, stats, problem, params)
}

/// Pipeline stage after the solve; exposed so sweeps can reuse fields.
pub fn certify_with_field(
    g: &DomainSpec,
    domain: &MinkowskiDomain,
    u: &ScalarField,
    stats: SolveStats,
    problem: &ProblemChoice,
    params: &CertifyParams,
) -> Result<StabilityReport> {
    let h = u.mask().h;
    let r = domain.radius;
    let samples = sample_boundary(g, params.trace_samples);
    let trace: BoundaryTrace = samples.with_values(u)?;
    let seminorm = lipschitz_seminorm(&trace, params.seed);
    let (trace_min, trace_max) = boundary_extrema(&trace);

    let search = CriticalSearchParams::for_domain(g).with_tol(2.0 * h);
    let mut directions = Vec::new();
    let mut omegas = vec![Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)];
    for k in 1..=params.extra_directions {
        let theta = std::f64::consts::PI * k as f64 / (params.extra_directions + 1) as f64;
        if (theta - std::f64::consts::FRAC_PI_2).abs() > 1e-9 {
            omegas.push(Vec2::from_angle(theta));
        }
    }
    for omega in omegas {
        directions.push(run_direction(u, domain, omega, &search, seminorm)?);
    }

    let coordinate_caps: Vec<CapDecomposition> = directions
        .iter()
        .take(2)
        .map(|d| CapDecomposition {
            omega: d.omega,
            extent: d.extent,
            critical_m: d.critical_m,
            case_kind: d.case_kind,
            tangency_point: Some(d.witness),
            orthogonal_point: None,
            containment_margin: 0.0,
        })
        .collect();
    let center = approximate_center(&coordinate_caps)?;
    let (r_i, r_e) = stability_radii(g, center, 2048);
    let gap = r_e - r_i;

    // Sampled ball inclusions for Ω.
    let tol_ball = 2.0 * h + 1e-6;
    let ball_inclusions_ok = domain.boundary_samples(720).iter().all(|(p, _)| {
        let d = p.dist(center);
        d >= r_i + domain.radius - tol_ball && d <= r_e + domain.radius + tol_ball
    });

    // Constants.
    let k = constants::empirical_k(u, g, trace_min)?;
    let cap_tag = match params.mode {
        ConstMode::Formula => TaggedConstant::formula(
            cap_bound_constant(2, r, g.diameter(), g.rho(), params.c_dprime),
            log10_cap_bound_constant(2, r, g.diameter(), g.rho(), params.c_dprime),
        ),
        ConstMode::Empirical => {
            let ratio = directions
                .iter()
                .map(|d| d.ratio)
                .fold(0.0f64, f64::max)
                .max(1e-9);
            TaggedConstant::empirical(ratio)
        }
    };
    let mut bundle = constants::assemble(AssembleInputs {
        n_dim: 2,
        r,
        diam_g: g.diameter(),
        rho: g.rho(),
        c_dprime: params.c_dprime,
        cap_bound: cap_tag,
        k,
    })?;

    // Certificate: gap ≤ C_final · seminorm, compared in the log domain
    // when the formula constant overflows.
    let rhs_log10 = bundle.c_final.log10 + seminorm.log10();
    let certificate_pass = if gap <= 0.0 {
        true
    } else {
        gap.log10() <= rhs_log10
    };
    let certificate_ratio = if bundle.c_final.value.is_finite() {
        gap / (bundle.c_final.value * seminorm)
    } else {
        0.0
    };
    let log10_certificate_slack = if gap > 0.0 && seminorm > 0.0 {
        Some(rhs_log10 - gap.log10())
    } else {
        None
    };

    // Sandwich test at the canonical depth 2·C*·seminorm.
    let c_star = bundle.c_star.value;
    let s = 2.0 * c_star * seminorm;
    let worst_dir = directions
        .iter()
        .take(2)
        .max_by(|a, b| a.core_gap.total_cmp(&b.core_gap))
        .expect("coordinate directions present");
    let core = symmetric_core(
        g,
        &CapDecomposition {
            omega: worst_dir.omega,
            extent: worst_dir.extent,
            critical_m: worst_dir.critical_m,
            case_kind: worst_dir.case_kind,
            tangency_point: Some(worst_dir.witness),
            orthogonal_point: None,
            containment_margin: 0.0,
        },
    );
    let sandwich = if !c_star.is_finite() {
        SandwichSummary::DepthUnavailable {
            s: f64::INFINITY,
            lo: f64::INFINITY,
            hi: 0.5 * g.rho(),
        }
    } else {
        match sandwich_check(
            g,
            &core,
            s,
            seminorm,
            c_star,
            params.sandwich_samples,
            2.0 * h,
            params.seed,
        ) {
            Ok(outcome) if outcome.passed => SandwichSummary::Passed(outcome),
            Ok(outcome) => SandwichSummary::Failed(outcome),
            Err(Error::HypothesisViolated {
                seminorm,
                threshold,
            }) => SandwichSummary::HypothesisViolated {
                seminorm,
                threshold,
            },
            Err(Error::InvalidSandwichDepth { s, lo, hi }) => {
                SandwichSummary::DepthUnavailable { s, lo, hi }
            }
            Err(e) => return Err(e),
        }
    };

    // Semilinear extras.
    let semilinear = if let ProblemChoice::Semilinear(p) = problem {
        let derivs = normal_derivative(u, domain, params.trace_samples);
        let d0 = p.d0.or_else(|| constants::empirical_d0(&derivs).ok());
        let c2 = solver::c2_norm_estimate(u);
        let (_, u_max) = u.range();
        let lipschitz = p.lipschitz_on(u_max);
        bundle.lipschitz = Some(lipschitz);
        bundle.d0 = d0;
        let smallness_threshold = d0.map(|d| 0.5 * d / c2);
        Some(SemilinearReport {
            d0,
            c2_norm: c2,
            lipschitz,
            smallness_threshold,
            smallness_ok: smallness_threshold.map(|t| r < t),
        })
    } else {
        None
    };

    Ok(StabilityReport {
        problem: problem.label().to_string(),
        mode: params.mode,
        h,
        r,
        trace_samples: params.trace_samples,
        seminorm,
        trace_min,
        trace_max,
        center,
        r_i,
        r_e,
        gap,
        ball_inclusions_ok,
        directions,
        constants: bundle,
        certificate_ratio,
        log10_certificate_slack,
        certificate_pass,
        sandwich,
        solve: stats,
        max_gradient: u.max_gradient_norm(),
        semilinear,
    })
}
