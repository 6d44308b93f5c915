//! Verification runs behind the subcommands. Each returns a serializable report with a
//! pass flag; the acceptance tests call these directly.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::linalg::{child_seed, random_density, random_unitary, C64};
use crate::measurement::{OrthonormalBasis, ProjectorDecomposition};
use crate::oracle::{
    minimize_over_block_diagonal, minimize_over_scalar_blocks, BlockObjective, OracleConfig,
};
use crate::quantifiers::{
    coherence_alpha, coherence_weight, delta_c, robustness, scalar_block_minimum, DeltaKind, ReferenceFrame,
    SolverConfig,
};
use crate::spin::{build_spin_example, embed_qubit, qubit_state, spin_delta_closed_forms};
use crate::usd::{usd_extrema_numeric, usd_min2_sum_of_roots, usd_min_analytic, UsdGridConfig};

#[derive(Debug, Clone, Serialize)]
pub struct Theorem1Row {
    pub trial: usize,
    pub dim: usize,
    pub rank: usize,
    pub alpha: f64,
    pub closed_form: f64,
    pub oracle: f64,
    pub gap: f64,
    pub oracle_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Theorem1Report {
    pub rows: Vec<Theorem1Row>,
    pub max_gap: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Closed-form α-quantifier against the scalar-block oracle on random bases.
///
/// Trial t draws a state of dimension dims[t mod |dims|] and rank 1 + t mod dim and a Haar
/// basis, both from child seeds of `seed`.
pub fn theorem1_report(
    dims: &[usize],
    alphas: &[f64],
    trials: usize,
    seed: u64,
    tolerance: f64,
    cfg: &OracleConfig,
) -> Result<Theorem1Report> {
    let cells: Vec<(usize, f64)> = (0..trials)
        .flat_map(|t| alphas.iter().map(move |&a| (t, a)))
        .collect();
    let rows = cells
        .into_par_iter()
        .map(|(t, alpha)| {
            let dim = dims[t % dims.len()];
            let rank = 1 + t % dim;
            let rho = random_density(dim, rank, child_seed(seed, 2 * t as u64));
            let basis = OrthonormalBasis::new(random_unitary(dim, child_seed(seed, 2 * t as u64 + 1)))?;
            let closed = coherence_alpha(&rho, &ReferenceFrame::basis(basis.clone()), alpha)?.as_f64();
            let r =
                minimize_over_scalar_blocks(&rho, &ProjectorDecomposition::from_basis(&basis), alpha, cfg)?;
            Ok(Theorem1Row {
                trial: t,
                dim,
                rank,
                alpha,
                closed_form: closed,
                oracle: r.min_value,
                gap: (closed - r.min_value).abs(),
                oracle_residual: r.residual,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_gap = rows.iter().map(|r| r.gap).fold(0.0, f64::max);
    Ok(Theorem1Report {
        passed: rows.iter().all(|r| r.gap <= tolerance),
        rows,
        max_gap,
        tolerance,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DegenerateRow {
    pub state: usize,
    pub alpha: f64,
    /// Spectral-sum formula Σ_j tr(Π_j ρ^α)^{1/α} (or H(p) − S(ρ)).
    pub spectral_sum: f64,
    /// Minimum over all block-diagonal states.
    pub true_minimum: f64,
    /// Minimum over σ = Σ ξ_j Π_j in closed form.
    pub scalar_closed_form: f64,
    pub scalar_oracle: f64,
    pub full_oracle: f64,
    pub full_oracle_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DegenerateReport {
    pub rows: Vec<DegenerateRow>,
    /// max |scalar oracle − scalar closed form|.
    pub max_scalar_gap: f64,
    /// max (full oracle − scalar oracle); positive means the full search did worse.
    pub max_full_excess: f64,
    /// max (scalar oracle − full oracle): how far restricting to scalar blocks overshoots.
    pub max_scalar_overshoot: f64,
    /// max |full oracle − true minimum|.
    pub max_full_vs_true: f64,
    /// max (true minimum − spectral sum).
    pub max_spectral_sum_deficit: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Spectral-sum formula, true minimum and both oracles on the spin decomposition.
pub fn degenerate_report(
    states: usize,
    alphas: &[f64],
    seed: u64,
    tolerance: f64,
    cfg: &OracleConfig,
) -> Result<DegenerateReport> {
    let p = build_spin_example().decomposition;
    let frame = ReferenceFrame::luders(p.clone());
    let cells: Vec<(usize, f64)> = (0..states)
        .flat_map(|s| alphas.iter().map(move |&a| (s, a)))
        .collect();
    let rows = cells
        .into_par_iter()
        .map(|(s, alpha)| {
            let rho = random_density(4, 1 + s % 4, child_seed(seed, s as u64));
            let q = coherence_alpha(&rho, &frame, alpha)?;
            let scalar = minimize_over_scalar_blocks(&rho, &p, alpha, cfg)?;
            let full = minimize_over_block_diagonal(&rho, &p, &BlockObjective::Divergence(alpha), cfg)?;
            Ok(DegenerateRow {
                state: s,
                alpha,
                spectral_sum: q.printed.unwrap_or(f64::NAN),
                true_minimum: q.as_f64(),
                scalar_closed_form: scalar_block_minimum(&rho, &p, alpha)?,
                scalar_oracle: scalar.min_value,
                full_oracle: full.min_value,
                full_oracle_residual: full.residual,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max = |f: &dyn Fn(&DegenerateRow) -> f64| rows.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
    let max_scalar_gap = max(&|r| (r.scalar_oracle - r.scalar_closed_form).abs());
    let max_full_excess = max(&|r| r.full_oracle - r.scalar_oracle);
    Ok(DegenerateReport {
        max_scalar_overshoot: max(&|r| r.scalar_oracle - r.full_oracle),
        max_full_vs_true: max(&|r| (r.full_oracle - r.true_minimum).abs()),
        max_spectral_sum_deficit: max(&|r| r.true_minimum - r.spectral_sum),
        passed: max_scalar_gap <= tolerance && max_full_excess <= tolerance,
        max_scalar_gap,
        max_full_excess,
        tolerance,
        rows,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SpinRow {
    pub u: f64,
    pub abs_v: f64,
    pub arg_v: f64,
    pub delta_l1: f64,
    pub delta_c1: f64,
    pub delta_c2: f64,
    pub delta_robustness: f64,
    pub delta_weight: f64,
    pub pipeline_l1: f64,
    pub pipeline_c1: f64,
    pub pipeline_c2: f64,
    pub qubit_robustness: f64,
    pub qubit_weight: f64,
}

impl SpinRow {
    /// Largest disagreement of ℓ1, C₁, C₂ with the generic pipeline.
    pub fn entropic_error(&self) -> f64 {
        (self.delta_l1 - self.pipeline_l1)
            .abs()
            .max((self.delta_c1 - self.pipeline_c1).abs())
            .max((self.delta_c2 - self.pipeline_c2).abs())
    }

    /// Largest disagreement of robustness and weight with the solver on the qubit.
    pub fn solver_error(&self) -> f64 {
        (self.delta_robustness - self.qubit_robustness)
            .abs()
            .max((self.delta_weight - self.qubit_weight).abs())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SpinReport {
    pub rows: Vec<SpinRow>,
    pub max_entropic_error: f64,
    pub max_solver_error: f64,
    pub entropic_tolerance: f64,
    pub solver_tolerance: f64,
    pub passed: bool,
}

/// u_i = (i + ½)/n, |v| = k/(n − 1)·√(u(1−u)), arg v = 2πm/phases.
pub fn spin_report(n: usize, phases: usize) -> Result<SpinReport> {
    let ex = build_spin_example();
    let n = n.max(2);
    let cells: Vec<(usize, usize, usize)> = (0..n)
        .flat_map(|i| (0..n).flat_map(move |k| (0..phases).map(move |m| (i, k, m))))
        .collect();
    let solver = SolverConfig::default();
    let rows = cells
        .into_par_iter()
        .map(|(i, k, m)| {
            let u = (i as f64 + 0.5) / n as f64;
            let abs_v = (u * (1.0 - u)).sqrt() * k as f64 / (n - 1) as f64;
            let arg_v = 2.0 * std::f64::consts::PI * m as f64 / phases as f64;
            let v = C64::from_polar(abs_v, arg_v);
            let d = spin_delta_closed_forms(u, v)?;
            let rho = embed_qubit(u, v)?;
            let (b, p) = (&ex.refinement, &ex.decomposition);
            let q = qubit_state(u, v)?;
            let comp = ReferenceFrame::basis(OrthonormalBasis::computational(2));
            Ok(SpinRow {
                u,
                abs_v,
                arg_v,
                delta_l1: d.l1,
                delta_c1: d.c1,
                delta_c2: d.c2,
                delta_robustness: d.robustness,
                delta_weight: d.weight,
                pipeline_l1: delta_c(&rho, b, p, DeltaKind::L1)?,
                pipeline_c1: delta_c(&rho, b, p, DeltaKind::Alpha(1.0))?,
                pipeline_c2: delta_c(&rho, b, p, DeltaKind::Alpha(2.0))?,
                qubit_robustness: robustness(&q, &comp, &solver)?.as_f64(),
                qubit_weight: coherence_weight(&q, &comp, &solver)?.as_f64(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_entropic_error = rows.iter().map(SpinRow::entropic_error).fold(0.0, f64::max);
    let max_solver_error = rows.iter().map(SpinRow::solver_error).fold(0.0, f64::max);
    let (entropic_tolerance, solver_tolerance) = (1e-9, 1e-4);
    Ok(SpinReport {
        passed: max_entropic_error <= entropic_tolerance && max_solver_error <= solver_tolerance,
        rows,
        max_entropic_error,
        max_solver_error,
        entropic_tolerance,
        solver_tolerance,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralSumFinding {
    /// States and α values checked on the spin decomposition.
    pub cases: usize,
    /// Cases where the spectral sum falls below the true minimum by more than 1e-9.
    pub below_true_minimum: usize,
    pub max_deficit: f64,
    pub worst_state: usize,
    pub worst_alpha: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Min2Finding {
    pub eta: f64,
    /// √(1−η) + √η as printed for the α = 2 minimum.
    pub printed: f64,
    /// 2√(η(1−η)) from C₂ = f² − 1 at |θ±⟩.
    pub derived: f64,
    pub numeric: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DegenerateFinding {
    pub states: usize,
    pub alphas: Vec<f64>,
    pub max_scalar_gap: f64,
    pub max_full_excess: f64,
    pub max_scalar_overshoot: f64,
    pub max_full_vs_true: f64,
    pub max_spectral_sum_deficit: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Discrepancies {
    pub spectral_sum_formula: SpectralSumFinding,
    pub min2: Vec<Min2Finding>,
    pub theorem1_degenerate: DegenerateFinding,
}

/// Findings where printed formulas and computed values part ways.
pub fn discrepancy_report(seed: u64, states: usize, cfg: &OracleConfig) -> Result<Discrepancies> {
    let alphas = [0.5, 1.0, 2.0];
    let deg = degenerate_report(states, &alphas, seed, cfg.tolerance, cfg)?;
    let worst = deg
        .rows
        .iter()
        .max_by(|a, b| (a.true_minimum - a.spectral_sum).total_cmp(&(b.true_minimum - b.spectral_sum)));
    let spectral_sum_formula = SpectralSumFinding {
        cases: deg.rows.len(),
        below_true_minimum: deg
            .rows
            .iter()
            .filter(|r| r.spectral_sum < r.true_minimum - 1e-9)
            .count(),
        max_deficit: deg.max_spectral_sum_deficit,
        worst_state: worst.map_or(0, |r| r.state),
        worst_alpha: worst.map_or(f64::NAN, |r| r.alpha),
    };
    let grid = UsdGridConfig {
        domain: crate::oracle::PureStateDomain {
            n_vartheta: 181,
            n_varphi: 361,
        },
        oracle: *cfg,
    };
    let min2 = [0.1, 0.3, 0.5, 0.7, 0.9]
        .into_par_iter()
        .map(|eta| {
            Ok(Min2Finding {
                eta,
                printed: usd_min2_sum_of_roots(eta)?,
                derived: usd_min_analytic(eta, 2.0)?,
                numeric: usd_extrema_numeric(eta, 2.0, &grid)?.min.value,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Discrepancies {
        spectral_sum_formula,
        min2,
        theorem1_degenerate: DegenerateFinding {
            states,
            alphas: alphas.to_vec(),
            max_scalar_gap: deg.max_scalar_gap,
            max_full_excess: deg.max_full_excess,
            max_scalar_overshoot: deg.max_scalar_overshoot,
            max_full_vs_true: deg.max_full_vs_true,
            max_spectral_sum_deficit: deg.max_spectral_sum_deficit,
        },
    })
}
