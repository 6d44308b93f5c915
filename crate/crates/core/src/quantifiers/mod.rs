//! Coherence quantifiers for basis, Lüders and POVM reference frames.
//!
//! Basis frames are rank-one Lüders frames and share one code path. For a Lüders
//! frame with degenerate blocks the minimum of D_α(ρ‖δ) over all block-diagonal
//! states δ is
//!
//! C_α = ((tr (Φ(ρ^α))^{1/α})^α − 1) / (α − 1),  δ* ∝ (Φ(ρ^α))^{1/α},
//!
//! with Φ the pinching Σ_j Π_j · Π_j; at α = 1 it is S(Φ(ρ)) − S(ρ). Both reduce to
//! the spectral-sum formulas Σ_j tr(Π_j ρ^α)^{1/α} and H(p_j) − S(ρ) when every block is
//! one-dimensional. For degenerate blocks the spectral-sum forms are still computed and
//! returned in [`QuantifierResult::printed`]; they can fall below the true minimum.

mod barrier;
mod theorem2;

pub use barrier::SolverConfig;
pub use theorem2::{
    random_block_preserving_channel, theorem2_check, verify_block_preserving, Theorem2Report,
};

use serde::Serialize;

use crate::divergence::{check_alpha, is_alpha_one, DivergenceValue};
use crate::error::{Error, Result};
use crate::linalg::{
    embed_block, power_of, psd_eigen, shannon_entropy, tol, CMatrix, DensityMatrix, Hermitian,
};
use crate::measurement::{
    naimark_completion, NaimarkBasis, OrthonormalBasis, ProjectorDecomposition, RankOnePovm,
};

use barrier::{hermitian_basis, Lmi};

/// Reference frame of a coherence quantifier.
#[derive(Debug, Clone)]
pub enum ReferenceFrame {
    Basis(OrthonormalBasis),
    /// Lüders frame; the representation basis (a refinement) fixes the ℓ1 quantifier.
    Luders {
        decomposition: ProjectorDecomposition,
        representation: Option<OrthonormalBasis>,
    },
    Povm {
        povm: RankOnePovm,
        naimark: NaimarkBasis,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FrameTag {
    Basis,
    Luders,
    Povm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QuantifierKind {
    Alpha,
    RelativeEntropy,
    L1,
    Robustness,
    Weight,
}

impl ReferenceFrame {
    pub fn basis(b: OrthonormalBasis) -> Self {
        Self::Basis(b)
    }

    pub fn luders(p: ProjectorDecomposition) -> Self {
        Self::Luders {
            decomposition: p,
            representation: None,
        }
    }

    /// Lüders frame with a representation basis, which must refine `p`.
    pub fn luders_in(p: ProjectorDecomposition, representation: OrthonormalBasis) -> Result<Self> {
        representation.block_assignment(&p)?;
        Ok(Self::Luders {
            decomposition: p,
            representation: Some(representation),
        })
    }

    pub fn povm(povm: RankOnePovm) -> Result<Self> {
        let naimark = naimark_completion(&povm)?;
        Ok(Self::Povm { povm, naimark })
    }

    pub fn tag(&self) -> FrameTag {
        match self {
            Self::Basis(_) => FrameTag::Basis,
            Self::Luders { .. } => FrameTag::Luders,
            Self::Povm { .. } => FrameTag::Povm,
        }
    }

    /// Dimension of the states the frame accepts.
    pub fn dim(&self) -> usize {
        match self {
            Self::Basis(b) => b.dim(),
            Self::Luders { decomposition, .. } => decomposition.dim(),
            Self::Povm { povm, .. } => povm.dim(),
        }
    }

    /// Decomposition whose invariant set is minimized over (on the dilated space for POVMs).
    pub fn decomposition(&self) -> ProjectorDecomposition {
        match self {
            Self::Basis(b) => ProjectorDecomposition::from_basis(b),
            Self::Luders { decomposition, .. } => decomposition.clone(),
            Self::Povm { naimark, .. } => ProjectorDecomposition::from_basis(naimark.basis()),
        }
    }

    /// The state as seen by [`Self::decomposition`]: diag(ρ, 0) for POVMs.
    fn lift(&self, rho: &DensityMatrix) -> CMatrix {
        match self {
            Self::Povm { naimark, povm } => embed_block(rho.matrix(), naimark.dim() - povm.dim()),
            _ => rho.matrix().clone(),
        }
    }

    fn check(&self, rho: &DensityMatrix) -> Result<()> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: rho.dim(),
            });
        }
        Ok(())
    }
}

/// A quantifier value with its provenance.
#[derive(Debug, Clone)]
pub struct QuantifierResult {
    pub value: DivergenceValue,
    pub kind: QuantifierKind,
    /// α for divergence quantifiers, 1 for relative entropy, 0 otherwise.
    pub alpha: f64,
    pub frame: FrameTag,
    /// A closest invariant state (on the dilated space for POVM frames).
    pub witness: Option<DensityMatrix>,
    /// Spectral-sum formula value for Lüders frames (equal to `value` for rank-one blocks).
    pub printed: Option<f64>,
    /// Duality-gap bound of numerically solved quantifiers.
    pub residual: Option<f64>,
}

impl QuantifierResult {
    pub fn as_f64(&self) -> f64 {
        self.value.as_f64()
    }

    fn finite(kind: QuantifierKind, alpha: f64, frame: FrameTag, value: f64) -> Self {
        Self {
            value: DivergenceValue::Finite(value),
            kind,
            alpha,
            frame,
            witness: None,
            printed: None,
            residual: None,
        }
    }
}

/// Candidates for the closest invariant state under a Lüders frame.
#[derive(Debug, Clone)]
pub struct ClosestInvariantState {
    /// Σ_j b_j Π_j with b_j = tr(Π_j ρ^α)^{1/α} / Σ_k tr(Π_k ρ^α)^{1/α}.
    pub printed: Hermitian,
    /// Σ_j b_j dim(Π_j); differs from 1 when blocks are degenerate.
    pub printed_trace: f64,
    /// `printed` rescaled to unit trace.
    pub normalized: DensityMatrix,
    /// Minimizer of D_α(ρ‖δ) over all block-diagonal states.
    pub optimal: DensityMatrix,
}

fn pinched_power(rho: &CMatrix, p: &ProjectorDecomposition, alpha: f64) -> Result<CMatrix> {
    let eig = psd_eigen(rho)?;
    Ok(p.pinch(&power_of(&eig, alpha)))
}

/// Per-block weights tr(Π_j M).
fn block_traces(p: &ProjectorDecomposition, m: &CMatrix) -> Vec<f64> {
    p.blocks_of(m).iter().map(|b| b.trace().re.max(0.0)).collect()
}

pub fn closest_invariant_state(
    rho: &DensityMatrix,
    p: &ProjectorDecomposition,
    alpha: f64,
) -> Result<ClosestInvariantState> {
    check_alpha(alpha)?;
    if rho.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: rho.dim(),
        });
    }
    let (b, optimal) = if is_alpha_one(alpha) {
        let b = block_traces(p, rho.matrix());
        (b, DensityMatrix::from_trusted(p.pinch(rho.matrix())))
    } else {
        let m = pinched_power(rho.matrix(), p, alpha)?;
        let roots: Vec<f64> = block_traces(p, &m).iter().map(|x| x.powf(1.0 / alpha)).collect();
        let norm: f64 = roots.iter().sum();
        let root = power_of(&psd_eigen(&m)?, 1.0 / alpha);
        let tr = root.trace().re;
        (
            roots.iter().map(|r| r / norm).collect(),
            DensityMatrix::from_trusted(root.unscale(tr)),
        )
    };
    let dims = p.block_dims();
    let printed = p.assemble(
        &b.iter()
            .zip(&dims)
            .map(|(bj, &n)| CMatrix::identity(n, n).scale(*bj))
            .collect::<Vec<_>>(),
    );
    let printed_trace: f64 = b.iter().zip(&dims).map(|(bj, &n)| bj * n as f64).sum();
    Ok(ClosestInvariantState {
        normalized: DensityMatrix::from_trusted(printed.unscale(printed_trace)),
        printed: Hermitian::from_trusted(printed),
        printed_trace,
        optimal,
    })
}

fn alpha_from_sum(s: f64, alpha: f64) -> f64 {
    (s.powf(alpha) - 1.0) / (alpha - 1.0)
}

/// Coherence α-quantifier min_δ D_α(ρ‖δ) over the frame's invariant states.
pub fn coherence_alpha(rho: &DensityMatrix, frame: &ReferenceFrame, alpha: f64) -> Result<QuantifierResult> {
    check_alpha(alpha)?;
    frame.check(rho)?;
    if is_alpha_one(alpha) {
        return coherence_relent(rho, frame);
    }
    if let ReferenceFrame::Povm { povm, naimark } = frame {
        return povm_alpha(rho, povm, Some(naimark), alpha);
    }
    let p = frame.decomposition();
    let m = pinched_power(rho.matrix(), &p, alpha)?;
    let root = power_of(&psd_eigen(&m)?, 1.0 / alpha);
    let s = root.trace().re;
    let printed_sum: f64 = block_traces(&p, &m).iter().map(|x| x.powf(1.0 / alpha)).sum();
    let mut r = QuantifierResult::finite(
        QuantifierKind::Alpha,
        alpha,
        frame.tag(),
        alpha_from_sum(s, alpha),
    );
    r.witness = Some(DensityMatrix::from_trusted(root.unscale(s)));
    if frame.tag() == FrameTag::Luders {
        r.printed = Some(alpha_from_sum(printed_sum, alpha));
    }
    Ok(r)
}

/// min D_α(ρ‖σ) over σ = Σ_j ξ_j Π_j (one scalar per block).
///
/// With m_j = tr(Π_j ρ^α) and d_j = rank Π_j the optimum is σ ∝ Σ_j (d_j^{−1} m_j)^{1/α} Π_j,
/// giving ((Σ_j d_j^{1−1/α} m_j^{1/α})^α − 1)/(α − 1); at α = 1 it is
/// H(p) + Σ_j p_j ln d_j − S(ρ) with p_j = tr(Π_j ρ).
pub fn scalar_block_minimum(rho: &DensityMatrix, p: &ProjectorDecomposition, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if rho.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: rho.dim(),
        });
    }
    let dims = p.block_dims();
    if is_alpha_one(alpha) {
        let s_rho = shannon_entropy(&psd_eigen(rho.matrix())?.values);
        let probs = block_traces(p, rho.matrix());
        let spread: f64 = probs.iter().zip(&dims).map(|(q, &n)| q * (n as f64).ln()).sum();
        return Ok(shannon_entropy(&probs) + spread - s_rho);
    }
    let m = pinched_power(rho.matrix(), p, alpha)?;
    let s: f64 = block_traces(p, &m)
        .iter()
        .zip(&dims)
        .map(|(mj, &n)| (n as f64).powf(1.0 - 1.0 / alpha) * mj.max(0.0).powf(1.0 / alpha))
        .sum();
    Ok(alpha_from_sum(s, alpha))
}

/// Relative entropy of coherence.
pub fn coherence_relent(rho: &DensityMatrix, frame: &ReferenceFrame) -> Result<QuantifierResult> {
    frame.check(rho)?;
    let s_rho = shannon_entropy(&psd_eigen(rho.matrix())?.values);
    let tag = frame.tag();
    let mut r = match frame {
        ReferenceFrame::Povm { povm, naimark } => {
            let p = povm.expectations(rho.matrix());
            let mut r = QuantifierResult::finite(
                QuantifierKind::RelativeEntropy,
                1.0,
                tag,
                shannon_entropy(&p) - s_rho,
            );
            r.witness = Some(DensityMatrix::from_trusted(
                naimark.basis().dephase(&frame.lift(rho)),
            ));
            r
        }
        _ => {
            let p = frame.decomposition();
            let pinched = p.pinch(rho.matrix());
            let s_out = shannon_entropy(&psd_eigen(&pinched)?.values);
            let mut r = QuantifierResult::finite(QuantifierKind::RelativeEntropy, 1.0, tag, s_out - s_rho);
            if tag == FrameTag::Luders {
                r.printed = Some(shannon_entropy(&block_traces(&p, rho.matrix())) - s_rho);
            }
            r.witness = Some(DensityMatrix::from_trusted(pinched));
            r
        }
    };
    r.alpha = 1.0;
    Ok(r)
}

/// ℓ1 coherence: moduli of the off-block matrix elements in the frame's representation.
pub fn coherence_l1(rho: &DensityMatrix, frame: &ReferenceFrame) -> Result<QuantifierResult> {
    frame.check(rho)?;
    let tag = frame.tag();
    let (elements, blocks, witness) = match frame {
        ReferenceFrame::Basis(b) => (
            b.represent(rho.matrix()),
            (0..b.len()).collect::<Vec<_>>(),
            b.dephase(rho.matrix()),
        ),
        ReferenceFrame::Luders {
            decomposition,
            representation,
        } => {
            let rep = representation.as_ref().ok_or(Error::MissingRepresentation)?;
            (
                rep.represent(rho.matrix()),
                rep.block_assignment(decomposition)?,
                decomposition.pinch(rho.matrix()),
            )
        }
        ReferenceFrame::Povm { povm, naimark } => (
            povm.represent(rho.matrix()),
            (0..povm.len()).collect(),
            naimark.basis().dephase(&frame.lift(rho)),
        ),
    };
    let n = elements.nrows();
    let mut sum = 0.0;
    for a in 0..n {
        for b in 0..n {
            if blocks[a] != blocks[b] {
                sum += elements[(a, b)].norm();
            }
        }
    }
    let mut r = QuantifierResult::finite(QuantifierKind::L1, 0.0, tag, sum);
    r.witness = Some(DensityMatrix::from_trusted(witness));
    Ok(r)
}

/// α-quantifier of a rank-one POVM, evaluated in the principal space through ⟨μ_j|ρ^α|μ_j⟩.
pub fn povm_coherence(rho: &DensityMatrix, povm: &RankOnePovm, alpha: f64) -> Result<QuantifierResult> {
    povm_alpha(rho, povm, None, alpha)
}

fn povm_alpha(
    rho: &DensityMatrix,
    povm: &RankOnePovm,
    naimark: Option<&NaimarkBasis>,
    alpha: f64,
) -> Result<QuantifierResult> {
    check_alpha(alpha)?;
    if rho.dim() != povm.dim() {
        return Err(Error::DimensionMismatch {
            expected: povm.dim(),
            found: rho.dim(),
        });
    }
    let owned;
    let naimark = match naimark {
        Some(n) => n,
        None => {
            owned = naimark_completion(povm)?;
            &owned
        }
    };
    if is_alpha_one(alpha) {
        let frame = ReferenceFrame::Povm {
            povm: povm.clone(),
            naimark: naimark.clone(),
        };
        return coherence_relent(rho, &frame);
    }
    let q: Vec<f64> = povm
        .expectations(&power_of(&psd_eigen(rho.matrix())?, alpha))
        .into_iter()
        .map(|x| x.max(0.0).powf(1.0 / alpha))
        .collect();
    let s: f64 = q.iter().sum();
    let mut r = QuantifierResult::finite(
        QuantifierKind::Alpha,
        alpha,
        FrameTag::Povm,
        alpha_from_sum(s, alpha),
    );
    let nb = naimark.basis();
    let mut delta = CMatrix::zeros(nb.dim(), nb.dim());
    for (j, qj) in q.iter().enumerate() {
        let w = nb.vector(j);
        delta += &w * w.adjoint() * crate::linalg::real(qj / s);
    }
    r.witness = Some(DensityMatrix::from_trusted(delta));
    Ok(r)
}

/// Block-diagonal Hermitian parameterization in the frame's adapted coordinates.
struct BlockParams {
    /// Parameter matrices embedded in d × d.
    a: Vec<CMatrix>,
    /// Objective weight tr(A_i).
    trace: Vec<f64>,
}

fn block_params(frames: &[CMatrix]) -> BlockParams {
    let d = frames.first().map_or(0, |f| f.nrows());
    let mut a = Vec::new();
    let mut trace = Vec::new();
    for f in frames {
        let n = f.ncols();
        for e in hermitian_basis(n) {
            trace.push(e.trace().re);
            a.push(f * e * f.adjoint());
        }
    }
    debug_assert!(a.iter().all(|m| m.nrows() == d));
    BlockParams { a, trace }
}

fn assemble(params: &BlockParams, x: &[f64], d: usize) -> CMatrix {
    params
        .a
        .iter()
        .zip(x)
        .fold(CMatrix::zeros(d, d), |acc, (ai, xi)| acc + ai.scale(*xi))
}

/// Robustness min{r ≥ 0 : (ρ + rτ)/(1 + r) invariant} = min{tr X : X ⪰ ρ, X block-diagonal} − 1.
pub fn robustness(
    rho: &DensityMatrix,
    frame: &ReferenceFrame,
    cfg: &SolverConfig,
) -> Result<QuantifierResult> {
    frame.check(rho)?;
    let p = frame.decomposition();
    let r = frame.lift(rho);
    let d = r.nrows();
    let params = block_params(p.frames());
    let lmi = Lmi {
        a0: -r.clone(),
        a: params.a.clone(),
    };
    // X = 2I
    let x0: Vec<f64> = p
        .frames()
        .iter()
        .flat_map(|f| {
            let n = f.ncols();
            (0..n * n).map(move |k| if k < n { 2.0 } else { 0.0 })
        })
        .collect();
    let sol = barrier::minimize(&params.trace, &[lmi], x0, cfg)?;
    let x = assemble(&params, &sol.x, d);
    let tr = x.trace().re;
    let mut out = QuantifierResult::finite(QuantifierKind::Robustness, 0.0, frame.tag(), (tr - 1.0).max(0.0));
    out.witness = Some(DensityMatrix::from_trusted(p.pinch(&x).unscale(tr)));
    out.residual = Some(sol.gap);
    Ok(out)
}

/// Coherence weight min{w : ρ = (1 − w)δ + wϱ} = 1 − max{tr Y : 0 ⪯ Y ⪯ ρ, Y block-diagonal}.
pub fn coherence_weight(
    rho: &DensityMatrix,
    frame: &ReferenceFrame,
    cfg: &SolverConfig,
) -> Result<QuantifierResult> {
    frame.check(rho)?;
    let p = frame.decomposition();
    let r = frame.lift(rho);
    let d = r.nrows();
    let eig = psd_eigen(&r)?;
    let support = eig.support_indices();
    let v = CMatrix::from_columns(&support.iter().map(|&k| eig.vector(k)).collect::<Vec<_>>());
    let kernel = CMatrix::identity(d, d) - &v * v.adjoint();

    // Y_j lives on ran(ρ) ∩ H_j.
    let mut faces = Vec::new();
    for f in p.frames() {
        let e = crate::linalg::eig_matrix(&(f.adjoint() * &kernel * f));
        let cols: Vec<_> = (0..e.dim())
            .filter(|&k| e.values[k] < 1e-9)
            .map(|k| f * e.vector(k))
            .collect();
        if !cols.is_empty() {
            faces.push(CMatrix::from_columns(&cols));
        }
    }
    let tag = frame.tag();
    if faces.is_empty() {
        let mut out = QuantifierResult::finite(QuantifierKind::Weight, 0.0, tag, 1.0);
        out.residual = Some(0.0);
        return Ok(out);
    }

    let lambda_min = support
        .iter()
        .map(|&k| eig.values[k])
        .fold(f64::INFINITY, f64::min);
    let s0 = 0.5 * lambda_min;
    let mut lmis = Vec::new();
    let mut c = Vec::new();
    let mut x0 = Vec::new();
    let mut embedded = Vec::new();
    let mut offset = 0;
    let total: usize = faces.iter().map(|t| t.ncols() * t.ncols()).sum();
    for t in &faces {
        let n = t.ncols();
        let basis = hermitian_basis(n);
        let mut a = vec![CMatrix::zeros(n, n); total];
        for (k, e) in basis.iter().enumerate() {
            a[offset + k] = e.clone();
            c.push(-e.trace().re);
            x0.push(if k < n { s0 } else { 0.0 });
            embedded.push(t * e * t.adjoint());
        }
        lmis.push(Lmi {
            a0: CMatrix::zeros(n, n),
            a,
        });
        offset += basis.len();
    }
    let vt = v.adjoint();
    lmis.push(Lmi {
        a0: &vt * &r * &v,
        a: embedded.iter().map(|m| -(&vt * m * &v)).collect(),
    });
    let sol = barrier::minimize(&c, &lmis, x0, cfg)?;
    let y = embedded
        .iter()
        .zip(&sol.x)
        .fold(CMatrix::zeros(d, d), |acc, (m, xi)| acc + m.scale(*xi));
    let tr = y.trace().re;
    let mut out = QuantifierResult::finite(QuantifierKind::Weight, 0.0, tag, (1.0 - tr).clamp(0.0, 1.0));
    if tr > tol::SUPP {
        out.witness = Some(DensityMatrix::from_trusted(y.unscale(tr)));
    }
    out.residual = Some(sol.gap);
    Ok(out)
}

/// Which quantifier [`delta_c`] compares.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeltaKind {
    L1,
    /// α-quantifier; α = 1 is the relative entropy.
    Alpha(f64),
    Robustness,
    Weight,
}

/// Generic quantifier dispatch.
pub fn quantify(
    rho: &DensityMatrix,
    frame: &ReferenceFrame,
    kind: DeltaKind,
    cfg: &SolverConfig,
) -> Result<QuantifierResult> {
    match kind {
        DeltaKind::L1 => coherence_l1(rho, frame),
        DeltaKind::Alpha(a) => coherence_alpha(rho, frame, a),
        DeltaKind::Robustness => robustness(rho, frame, cfg),
        DeltaKind::Weight => coherence_weight(rho, frame, cfg),
    }
}

/// Δc(ρ) = C^(ℬ)(ρ) − C^(𝒫)(ρ) for a basis ℬ refining 𝒫; ℬ also fixes the Lüders ℓ1 representation.
pub fn delta_c(
    rho: &DensityMatrix,
    b: &OrthonormalBasis,
    p: &ProjectorDecomposition,
    kind: DeltaKind,
) -> Result<f64> {
    let luders = ReferenceFrame::luders_in(p.clone(), b.clone())?;
    let basis = ReferenceFrame::basis(b.clone());
    let cfg = SolverConfig::default();
    let cb = quantify(rho, &basis, kind, &cfg)?.as_f64();
    let cp = quantify(rho, &luders, kind, &cfg)?.as_f64();
    Ok(cb - cp)
}

#[cfg(test)]
mod tests;
