//! Brute-force minimizers over invariant sets and randomized property suites.
//!
//! Nothing here uses the closed forms of [`crate::quantifiers`]; the minimizers search
//! the invariant set directly and confirm their argmin with the generic divergence.

mod nelder_mead;
mod properties;
mod pure;

pub use properties::{property_check, random_luders_frame, PropertyId, PropertyReport, Violation};
pub use pure::{minimize_over_pure_states, Extremum, PureStateDomain, PureStateExtrema};

use rayon::prelude::*;
use serde::Serialize;

use crate::divergence::{check_alpha, divergence_from_eigen, is_alpha_one, quantum_divergence};
use crate::error::{Error, Result};
use crate::linalg::{
    child_seed, ell1_norm, power_of, psd_eigen, random_density, shannon_entropy, CMatrix, DensityMatrix,
    EigenDecomposition, C64,
};
use crate::measurement::{OrthonormalBasis, ProjectorDecomposition};

/// Search settings shared by the minimizers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleConfig {
    /// Lattice points per free dimension (at most three free dimensions are gridded at full density).
    pub grid_density: usize,
    pub multistarts: usize,
    /// Local-descent sweeps, or Nelder-Mead iterations per parameter.
    pub refine_iters: usize,
    pub seed: u64,
    pub tolerance: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            grid_density: 64,
            multistarts: 16,
            refine_iters: 200,
            seed: 0,
            tolerance: 1e-6,
        }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_density < 8 {
            return Err(Error::InvalidParameter(format!(
                "grid_density must be at least 8, got {}",
                self.grid_density
            )));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidParameter("tolerance must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OracleMode {
    ScalarBlocks,
    FullBlockDiagonal,
}

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub min_value: f64,
    pub argmin: DensityMatrix,
    pub mode: OracleMode,
    /// Scalar blocks: gap between the search value and the generic divergence at the argmin.
    /// Full blocks: gap between the two best independent starts.
    pub residual: f64,
}

/// Objective of [`minimize_over_block_diagonal`].
#[derive(Debug, Clone)]
pub enum BlockObjective {
    /// D_α(ρ‖δ).
    Divergence(f64),
    /// ‖ρ − δ‖_ℓ1 in the given basis.
    L1(OrthonormalBasis),
}

/// Block weights in the simplex parameterization w_j = ξ_j dim(Π_j).
struct ScalarObjective {
    alpha: f64,
    /// α ≠ 1: d_j^{α−1} tr(Π_j ρ^α); α = 1: tr(Π_j ρ).
    coef: Vec<f64>,
    dims: Vec<f64>,
    /// −S(ρ) at α = 1.
    offset: f64,
}

const CARRIES_WEIGHT: f64 = 1e-14;

impl ScalarObjective {
    fn eval(&self, w: &[f64]) -> f64 {
        if is_alpha_one(self.alpha) {
            let mut s = self.offset;
            for ((&p, &wj), &d) in self.coef.iter().zip(w).zip(&self.dims) {
                if p > CARRIES_WEIGHT {
                    if wj <= 0.0 {
                        return f64::INFINITY;
                    }
                    s -= p * (wj / d).ln();
                }
            }
            s
        } else {
            let mut s = 0.0;
            for (&cj, &wj) in self.coef.iter().zip(w) {
                if cj > CARRIES_WEIGHT {
                    if wj <= 0.0 {
                        if self.alpha > 1.0 {
                            return f64::INFINITY;
                        }
                        continue;
                    }
                    s += cj * wj.powf(1.0 - self.alpha);
                }
            }
            (s - 1.0) / (self.alpha - 1.0)
        }
    }
}

/// All w on the simplex with entries in {0, 1/g, …, 1}.
fn simplex_lattice(n: usize, g: usize) -> Vec<Vec<f64>> {
    fn rec(n: usize, left: usize, g: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
        if cur.len() + 1 == n {
            cur.push(left);
            out.push(cur.iter().map(|&k| k as f64 / g as f64).collect());
            cur.pop();
            return;
        }
        for k in 0..=left {
            cur.push(k);
            rec(n, left - k, g, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, g, g, &mut Vec::with_capacity(n), &mut out);
    out
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Lattice resolution: full density up to three free dimensions, then coarsened to the same point budget.
fn lattice_density(n_blocks: usize, density: usize) -> usize {
    let free = n_blocks.saturating_sub(1);
    if free <= 3 {
        return density;
    }
    let budget = binomial(density + 3, 3);
    let mut g = density;
    while g > 1 && binomial(g + free, free) > budget {
        g -= 1;
    }
    g
}

/// Pairwise exchange descent on the simplex: moves mass between two blocks at a time.
fn pairwise_descent(obj: &ScalarObjective, mut w: Vec<f64>, sweeps: usize) -> (Vec<f64>, f64) {
    let n = w.len();
    let mut fw = obj.eval(&w);
    for _ in 0..sweeps.max(1) {
        let start = fw;
        for i in 0..n {
            for j in i + 1..n {
                let total = w[i] + w[j];
                if total <= 0.0 {
                    continue;
                }
                let mut trial = w.clone();
                let g = |t: f64| {
                    let mut x = trial.clone();
                    x[i] = t;
                    x[j] = total - t;
                    obj.eval(&x)
                };
                let (t, ft) = nelder_mead::golden_section(&g, 0.0, total, 1e-15 * total.max(1e-300));
                if ft < fw {
                    trial[i] = t;
                    trial[j] = total - t;
                    w = trial;
                    fw = ft;
                }
            }
        }
        if !(start - fw > 1e-16 * (1.0 + fw.abs())) {
            break;
        }
    }
    (w, fw)
}

/// Minimizes D_α(ρ‖Σ_j ξ_j Π_j) over ξ_j ≥ 0 with Σ_j ξ_j dim(Π_j) = 1.
///
/// Simplex lattice over w_j = ξ_j dim(Π_j), then pairwise exchange descent from the best
/// lattice points. The argmin is re-evaluated with the generic divergence.
pub fn minimize_over_scalar_blocks(
    rho: &DensityMatrix,
    p: &ProjectorDecomposition,
    alpha: f64,
    cfg: &OracleConfig,
) -> Result<OracleResult> {
    check_alpha(alpha)?;
    cfg.validate()?;
    check_dim(rho, p)?;
    let eig = psd_eigen(rho.matrix())?;
    let dims: Vec<f64> = p.block_dims().iter().map(|&d| d as f64).collect();
    let obj = if is_alpha_one(alpha) {
        ScalarObjective {
            alpha,
            coef: p
                .blocks_of(rho.matrix())
                .iter()
                .map(|b| b.trace().re.max(0.0))
                .collect(),
            dims: dims.clone(),
            offset: -shannon_entropy(&eig.values),
        }
    } else {
        let powered = power_of(&eig, alpha);
        ScalarObjective {
            alpha,
            coef: p
                .blocks_of(&powered)
                .iter()
                .zip(&dims)
                .map(|(b, d)| d.powf(alpha - 1.0) * b.trace().re.max(0.0))
                .collect(),
            dims: dims.clone(),
            offset: 0.0,
        }
    };

    let lattice = simplex_lattice(p.len(), lattice_density(p.len(), cfg.grid_density));
    let mut scored: Vec<(f64, Vec<f64>)> = lattice
        .into_par_iter()
        .map(|w| (obj.eval(&w), w))
        .filter(|(f, _)| f.is_finite())
        .collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));
    scored.truncate(cfg.multistarts.max(1));
    if scored.is_empty() {
        // every lattice point has a zero weight on a populated block
        scored.push((
            f64::INFINITY,
            dims.iter().map(|d| d / dims.iter().sum::<f64>()).collect(),
        ));
    }
    let total_dim: f64 = dims.iter().sum();
    let (w, f) = scored
        .into_par_iter()
        .map(|(_, w)| {
            // interior shift towards the maximally mixed state
            let shifted: Vec<f64> = w
                .iter()
                .zip(&dims)
                .map(|(wj, d)| (1.0 - 1e-6) * wj + 1e-6 * d / total_dim)
                .collect();
            pairwise_descent(&obj, shifted, cfg.refine_iters)
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least one start");

    let blocks: Vec<CMatrix> = w
        .iter()
        .zip(&dims)
        .map(|(wj, &d)| CMatrix::identity(d as usize, d as usize).scale(wj / d))
        .collect();
    let delta = p.assemble(&blocks);
    let confirmed = quantum_divergence(rho.matrix(), &delta, alpha)?.value.as_f64();
    Ok(OracleResult {
        min_value: confirmed,
        argmin: DensityMatrix::from_trusted(delta),
        mode: OracleMode::ScalarBlocks,
        residual: (confirmed - f).abs(),
    })
}

fn check_dim(rho: &DensityMatrix, p: &ProjectorDecomposition) -> Result<()> {
    if rho.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: rho.dim(),
        });
    }
    Ok(())
}

/// Lower-triangular factors L_j, packed as n_j diagonal entries then (Re, Im) of the strict lower part.
struct CholeskyParams {
    dims: Vec<usize>,
}

impl CholeskyParams {
    fn len(&self) -> usize {
        self.dims.iter().map(|n| n * n).sum()
    }

    fn blocks(&self, x: &[f64]) -> Vec<CMatrix> {
        let mut k = 0;
        self.dims
            .iter()
            .map(|&n| {
                let mut l = CMatrix::zeros(n, n);
                for a in 0..n {
                    l[(a, a)] = C64::new(x[k], 0.0);
                    k += 1;
                }
                for a in 0..n {
                    for b in 0..a {
                        l[(a, b)] = C64::new(x[k], x[k + 1]);
                        k += 2;
                    }
                }
                &l * l.adjoint()
            })
            .collect()
    }

    fn state(&self, p: &ProjectorDecomposition, x: &[f64]) -> Option<CMatrix> {
        let m = p.assemble(&self.blocks(x));
        let tr = m.trace().re;
        (tr > 1e-300 && tr.is_finite()).then(|| m.unscale(tr))
    }

    /// Parameters of a block-diagonal state (mixed with 1e−6 of the maximally mixed state).
    fn encode(&self, p: &ProjectorDecomposition, delta: &CMatrix) -> Vec<f64> {
        let d = p.dim() as f64;
        let mut x = Vec::with_capacity(self.len());
        for block in p.blocks_of(delta) {
            let n = block.nrows();
            let shifted = block.scale(1.0 - 1e-6) + CMatrix::identity(n, n).scale(1e-6 / d);
            let l = nalgebra::Cholesky::new(shifted)
                .map(|c| c.l())
                .unwrap_or_else(|| CMatrix::identity(n, n).scale((1.0 / d).sqrt()));
            for a in 0..n {
                x.push(l[(a, a)].re);
            }
            for a in 0..n {
                for b in 0..a {
                    x.push(l[(a, b)].re);
                    x.push(l[(a, b)].im);
                }
            }
        }
        x
    }
}

/// Minimizes the objective over all block-diagonal states by multistart Nelder-Mead on
/// Cholesky factors of the blocks. For divergences one start is the scalar-block argmin.
pub fn minimize_over_block_diagonal(
    rho: &DensityMatrix,
    p: &ProjectorDecomposition,
    objective: &BlockObjective,
    cfg: &OracleConfig,
) -> Result<OracleResult> {
    cfg.validate()?;
    check_dim(rho, p)?;
    if p.dim() > 8 {
        return Err(Error::InvalidParameter(format!(
            "block-diagonal search is limited to dimension 8, got {}",
            p.dim()
        )));
    }
    let d = p.dim();
    let params = CholeskyParams { dims: p.block_dims() };
    let rho_eig = psd_eigen(rho.matrix())?;
    let seeded = match objective {
        BlockObjective::Divergence(alpha) => {
            check_alpha(*alpha)?;
            minimize_over_scalar_blocks(rho, p, *alpha, cfg)?
                .argmin
                .matrix()
                .clone()
        }
        BlockObjective::L1(basis) => {
            if basis.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: basis.dim(),
                });
            }
            let w: Vec<CMatrix> = p
                .blocks_of(rho.matrix())
                .iter()
                .map(|b| {
                    let n = b.nrows();
                    CMatrix::identity(n, n).scale(b.trace().re / n as f64)
                })
                .collect();
            p.assemble(&w)
        }
    };
    let eval = |x: &[f64]| -> f64 {
        let Some(delta) = params.state(p, x) else {
            return f64::INFINITY;
        };
        match objective {
            BlockObjective::Divergence(alpha) => match psd_eigen(&delta) {
                Ok(e) => finite_or_inf(&rho_eig, &e, *alpha),
                Err(_) => f64::INFINITY,
            },
            BlockObjective::L1(basis) => ell1_norm(&basis.represent(&(rho.matrix() - &delta))),
        }
    };

    let mut starts = vec![seeded, CMatrix::identity(d, d).unscale(d as f64)];
    for k in 0..cfg.multistarts.saturating_sub(2) {
        let r = random_density(d, d, child_seed(cfg.seed, k as u64));
        starts.push(p.pinch(r.matrix()));
    }
    let n_par = params.len();
    let mut runs: Vec<(f64, Vec<f64>)> = starts
        .par_iter()
        .map(|s| {
            let x0 = params.encode(p, s);
            let step: Vec<f64> = x0.iter().map(|v| 0.1 * v.abs() + 0.02).collect();
            let r = nelder_mead::minimize(&eval, &x0, &step, cfg.refine_iters * n_par, 12);
            (r.f, r.x)
        })
        .collect();
    runs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (best_f, best_x) = runs[0].clone();
    let residual = runs.get(1).map_or(0.0, |r| (r.0 - best_f).abs());
    let argmin = params
        .state(p, &best_x)
        .ok_or(Error::SolverNonConvergence { residual })?;
    Ok(OracleResult {
        min_value: best_f,
        argmin: DensityMatrix::from_trusted(argmin),
        mode: OracleMode::FullBlockDiagonal,
        residual,
    })
}

fn finite_or_inf(a: &EigenDecomposition, b: &EigenDecomposition, alpha: f64) -> f64 {
    divergence_from_eigen(a, b, alpha).value.as_f64()
}

#[cfg(test)]
mod tests;
