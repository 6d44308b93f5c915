//! Monotonicity under selective operations whose Kraus operators keep the invariant set.

use rand::seq::SliceRandom;
use serde::Serialize;

use super::{closest_invariant_state, coherence_alpha, ReferenceFrame};
use crate::divergence::{check_alpha, is_alpha_one};
use crate::error::{Error, Result};
use crate::linalg::{
    c, child_seed, gaussian_matrix, ket_bra, max_abs_diff, psd_eigen, real, rng_from_seed, CMatrix,
    DensityMatrix,
};
use crate::measurement::{KrausChannel, ProjectorDecomposition};

/// Both sides of Σ_i q_i^α s_i^{1−α} C_α(ρ_i) ≤ C_α(ρ).
#[derive(Debug, Clone, Serialize)]
pub struct Theorem2Report {
    pub lhs: f64,
    pub rhs: f64,
    /// q_i = tr(K_i ρ K_i†).
    pub q: Vec<f64>,
    /// s_i = tr(K_i δ* K_i†).
    pub s: Vec<f64>,
    /// ω_i = q_i^α s_i^{1−α} / Σ_k q_k^α s_k^{1−α}.
    pub weights: Vec<f64>,
}

/// Invariant states spanning the block-diagonal operators of `p`.
fn spanning_invariant_states(p: &ProjectorDecomposition) -> Vec<CMatrix> {
    let mut out = Vec::new();
    for f in p.frames() {
        let n = f.ncols();
        for a in 0..n {
            let ya = f.column(a).into_owned();
            out.push(ket_bra(&ya));
            for b in a + 1..n {
                let yb = f.column(b).into_owned();
                let s = std::f64::consts::FRAC_1_SQRT_2;
                out.push(ket_bra(&((&ya + &yb) * real(s))));
                out.push(ket_bra(&((&ya + &yb * c(0.0, 1.0)) * real(s))));
            }
        }
    }
    out
}

/// Checks K_i 𝒥 K_i† ⊆ 𝒥 on a spanning set of invariant states.
///
/// On failure the error carries the offending Kraus index and input state.
pub fn verify_block_preserving(channel: &KrausChannel, p: &ProjectorDecomposition) -> Result<()> {
    if channel.dim_in() != p.dim() || channel.dim_out() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: channel.dim_in(),
        });
    }
    for delta in spanning_invariant_states(p) {
        for (i, k) in channel.kraus().iter().enumerate() {
            let out = k * &delta * k.adjoint();
            let deviation = max_abs_diff(&p.pinch(&out), &out);
            if deviation > 1e-10 {
                return Err(Error::NotBlockPreserving {
                    kraus_index: i,
                    deviation,
                    witness: Box::new(delta),
                });
            }
        }
    }
    Ok(())
}

/// Evaluates both sides of the selective monotonicity inequality for a Lüders frame.
pub fn theorem2_check(
    rho: &DensityMatrix,
    channel: &KrausChannel,
    p: &ProjectorDecomposition,
    alpha: f64,
) -> Result<Theorem2Report> {
    check_alpha(alpha)?;
    if alpha > 2.0 {
        return Err(Error::InvalidParameter(format!(
            "the inequality is only established for alpha in (0, 2], got {alpha}"
        )));
    }
    verify_block_preserving(channel, p)?;
    let frame = ReferenceFrame::luders(p.clone());
    let rhs = coherence_alpha(rho, &frame, alpha)?.as_f64();
    let delta = closest_invariant_state(rho, p, alpha)?.optimal;

    let mut lhs = 0.0;
    let mut q = Vec::new();
    let mut s = Vec::new();
    let mut raw = Vec::new();
    for k in channel.kraus() {
        let out = k * rho.matrix() * k.adjoint();
        let qi = out.trace().re.max(0.0);
        let si = (k * delta.matrix() * k.adjoint()).trace().re.max(0.0);
        let factor = if is_alpha_one(alpha) {
            qi
        } else if qi == 0.0 {
            0.0
        } else if si == 0.0 {
            if alpha < 1.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            qi.powf(alpha) * si.powf(1.0 - alpha)
        };
        if factor > 0.0 && qi > 1e-14 {
            let rho_i = DensityMatrix::from_trusted(out.unscale(qi));
            lhs += factor * coherence_alpha(&rho_i, &frame, alpha)?.as_f64();
        }
        q.push(qi);
        s.push(si);
        raw.push(factor);
    }
    let total: f64 = raw.iter().sum();
    let weights = raw.iter().map(|r| r / total).collect();
    Ok(Theorem2Report {
        lhs,
        rhs,
        q,
        s,
        weights,
    })
}

/// Random channel whose Kraus operators map every block into a block.
///
/// Each operator carries an independent random permutation σ of equal-dimension blocks
/// and Gaussian maps H_j → H_σ(j); the set is then normalized by (Σ K†K)^{-1/2}, which is
/// block-diagonal and keeps the structure.
pub fn random_block_preserving_channel(
    p: &ProjectorDecomposition,
    n_kraus: usize,
    seed: u64,
) -> Result<KrausChannel> {
    if n_kraus == 0 {
        return Err(Error::InvalidParameter("need at least one Kraus operator".into()));
    }
    let d = p.dim();
    let dims = p.block_dims();
    let mut raw = Vec::with_capacity(n_kraus);
    for i in 0..n_kraus {
        let mut rng = rng_from_seed(child_seed(seed, i as u64));
        let mut sigma: Vec<usize> = (0..p.len()).collect();
        // permute within groups of equal dimension so each K_i is square on every block
        let mut groups: Vec<usize> = dims.clone();
        groups.sort_unstable();
        groups.dedup();
        for g in groups {
            let members: Vec<usize> = (0..p.len()).filter(|&j| dims[j] == g).collect();
            let mut shuffled = members.clone();
            shuffled.shuffle(&mut rng);
            for (a, b) in members.iter().zip(shuffled) {
                sigma[*a] = b;
            }
        }
        let mut k = CMatrix::zeros(d, d);
        for j in 0..p.len() {
            let target = sigma[j];
            let e = gaussian_matrix(dims[target], dims[j], &mut rng);
            k += p.frame(target) * e * p.frame(j).adjoint();
        }
        raw.push(k);
    }
    let m = raw
        .iter()
        .fold(CMatrix::zeros(d, d), |acc, k| acc + k.adjoint() * k);
    let eig = psd_eigen(&m)?;
    if eig.values[0] <= 1e-12 * eig.max_value() {
        return Err(Error::InvalidParameter("degenerate random Kraus set".into()));
    }
    let inv_sqrt = eig.map(|x| 1.0 / x.sqrt());
    KrausChannel::new(raw.into_iter().map(|k| k * &inv_sqrt).collect())
}
