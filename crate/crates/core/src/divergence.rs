//! Classical and quantum Tsallis relative entropies.
//!
//! For `0 < α ≠ 1` the quantum divergence of PSD operators is
//! `(tr(A^α B^{1-α}) - tr A) / (α - 1)` with the trace taken over ran(B);
//! at `α = 1` it is the Umegaki relative entropy `tr(A ln A - A ln B)`.
//! For `α ≥ 1` a support violation ran(A) ⊄ ran(B) yields
//! [`DivergenceValue::Infinite`]; for `α < 1` no support condition applies.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{psd_eigen, tol, CMatrix, EigenDecomposition};

/// Below this distance from 1 the entropic (α = 1) formula is used.
pub const ALPHA_ONE_WINDOW: f64 = 1e-6;

/// Max squared leakage of ran(A) outside ran(B) tolerated by the support check.
const LEAK_TOL: f64 = 1e-10;

pub fn is_alpha_one(alpha: f64) -> bool {
    (alpha - 1.0).abs() < ALPHA_ONE_WINDOW
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "alpha must be a finite positive number, got {alpha}"
        )))
    }
}

/// A divergence value: finite, or the +∞ sentinel of a support violation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum DivergenceValue {
    Finite(f64),
    Infinite,
}

impl DivergenceValue {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Self::Infinite)
    }

    pub fn finite(&self) -> Option<f64> {
        match self {
            Self::Finite(v) => Some(*v),
            Self::Infinite => None,
        }
    }

    /// Numeric view for comparisons, mapping the sentinel to `f64::INFINITY`.
    pub fn as_f64(&self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

/// Quantum divergence together with a flag raised when a rank decision was close to the cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Divergence {
    pub value: DivergenceValue,
    pub borderline_support: bool,
}

/// Probability vector with entries ≥ 0 summing to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.iter().any(|&p| !(p >= -tol::TRACE) || !p.is_finite()) {
            return Err(Error::InvalidParameter(
                "probabilities must be finite and non-negative".into(),
            ));
        }
        let sum: f64 = entries.iter().sum();
        if (sum - 1.0).abs() > tol::TRACE {
            return Err(Error::BadTrace { trace: sum });
        }
        Ok(Self(entries.into_iter().map(|p| p.max(0.0)).collect()))
    }

    pub fn entries(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Tsallis relative α-entropy of probability vectors (α = 1: Kullback-Leibler).
pub fn classical_divergence(
    p: &ProbabilityVector,
    q: &ProbabilityVector,
    alpha: f64,
) -> Result<DivergenceValue> {
    check_alpha(alpha)?;
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            found: q.len(),
        });
    }
    Ok(classical_divergence_raw(p.entries(), q.entries(), alpha))
}

/// Unchecked form used for internal weight vectors.
pub(crate) fn classical_divergence_raw(p: &[f64], q: &[f64], alpha: f64) -> DivergenceValue {
    let one = is_alpha_one(alpha);
    let mut acc = 0.0;
    for (&pj, &qj) in p.iter().zip(q) {
        if pj <= 0.0 {
            continue;
        }
        if qj <= 0.0 {
            if one || alpha > 1.0 {
                return DivergenceValue::Infinite;
            }
            continue;
        }
        acc += if one {
            pj * (pj / qj).ln()
        } else {
            pj.powf(alpha) * qj.powf(1.0 - alpha)
        };
    }
    if one {
        DivergenceValue::Finite(acc)
    } else {
        DivergenceValue::Finite((acc - 1.0) / (alpha - 1.0))
    }
}

/// Quantum Tsallis α-divergence D_α(A‖B) of PSD operators.
pub fn quantum_divergence(a: &CMatrix, b: &CMatrix, alpha: f64) -> Result<Divergence> {
    check_alpha(alpha)?;
    if a.nrows() != b.nrows() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: b.nrows(),
        });
    }
    let ea = psd_eigen(a)?;
    let eb = psd_eigen(b)?;
    Ok(divergence_from_eigen(&ea, &eb, alpha))
}

fn near_cutoff(eig: &EigenDecomposition) -> bool {
    let cut = eig.support_cutoff();
    cut > 0.0 && eig.values.iter().any(|&x| x > cut * 1e-3 && x < cut * 1e3)
}

/// Divergence from precomputed spectral decompositions of A and B.
pub fn divergence_from_eigen(ea: &EigenDecomposition, eb: &EigenDecomposition, alpha: f64) -> Divergence {
    let sa = ea.support_indices();
    let sb = eb.support_indices();
    // overlaps |⟨a_i|b_j⟩|²
    let w = ea.vectors.adjoint() * &eb.vectors;
    let overlap = |i: usize, j: usize| w[(i, j)].norm_sqr();

    let mut borderline = near_cutoff(ea) || near_cutoff(eb);
    let one = is_alpha_one(alpha);

    let max_leak = sa
        .iter()
        .map(|&i| 1.0 - sb.iter().map(|&j| overlap(i, j)).sum::<f64>())
        .fold(0.0, f64::max);
    if max_leak > LEAK_TOL * 1e-3 && max_leak < LEAK_TOL * 1e3 {
        borderline = true;
    }
    if (one || alpha > 1.0) && max_leak > LEAK_TOL {
        return Divergence {
            value: DivergenceValue::Infinite,
            borderline_support: borderline,
        };
    }

    let trace_a: f64 = ea.values.iter().sum();
    let value = if one {
        let entropy_part: f64 = sa.iter().map(|&i| ea.values[i] * ea.values[i].ln()).sum();
        let mut cross = 0.0;
        for &i in &sa {
            for &j in &sb {
                cross += ea.values[i] * eb.values[j].ln() * overlap(i, j);
            }
        }
        entropy_part - cross
    } else {
        let mut s = 0.0;
        for &i in &sa {
            let ai = ea.values[i].powf(alpha);
            for &j in &sb {
                s += ai * eb.values[j].powf(1.0 - alpha) * overlap(i, j);
            }
        }
        (s - trace_a) / (alpha - 1.0)
    };
    Divergence {
        value: DivergenceValue::Finite(value),
        borderline_support: borderline,
    }
}
