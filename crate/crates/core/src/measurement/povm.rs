//! Rank-one POVMs and their Naimark completion.

use super::OrthonormalBasis;
use crate::error::{Error, Result};
use crate::linalg::{identity, max_abs_diff, tol, unitarity_deviation, CMatrix, CVector, C64};

/// Rank-one POVM {|μ_j⟩⟨μ_j|}: sub-normalized vectors with Σ |μ_j⟩⟨μ_j| = I.
#[derive(Debug, Clone, PartialEq)]
pub struct RankOnePovm {
    /// d × N, column j is |μ_j⟩.
    mu: CMatrix,
}

impl RankOnePovm {
    pub fn new(mu_vectors: &[CVector]) -> Result<Self> {
        let d = mu_vectors.first().map_or(0, |v| v.len());
        if d == 0 || mu_vectors.iter().any(|v| v.len() != d) {
            return Err(Error::InvalidParameter(
                "POVM vectors must be non-empty and share one dimension".into(),
            ));
        }
        let mut mu = CMatrix::zeros(d, mu_vectors.len());
        for (j, v) in mu_vectors.iter().enumerate() {
            mu.set_column(j, v);
        }
        Self::from_matrix(mu)
    }

    /// From the d × N matrix [[μ_ij]] whose columns are the vectors.
    pub fn from_matrix(mu: CMatrix) -> Result<Self> {
        if mu.ncols() < mu.nrows() {
            return Err(Error::InvalidParameter(format!(
                "a rank-one POVM in dimension {} needs at least that many elements, got {}",
                mu.nrows(),
                mu.ncols()
            )));
        }
        let dev = max_abs_diff(&(&mu * mu.adjoint()), &identity(mu.nrows()));
        if dev > tol::CLOSE {
            return Err(Error::Incomplete { deviation: dev });
        }
        Ok(Self { mu })
    }

    pub fn from_basis(basis: &OrthonormalBasis) -> Self {
        Self {
            mu: basis.matrix().clone(),
        }
    }

    pub fn dim(&self) -> usize {
        self.mu.nrows()
    }

    /// Number of outcomes N.
    pub fn len(&self) -> usize {
        self.mu.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.ncols() == 0
    }

    pub fn mu(&self, j: usize) -> CVector {
        self.mu.column(j).into_owned()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mu
    }

    /// Matrix elements ⟨μ_i|M|μ_j⟩.
    pub fn represent(&self, m: &CMatrix) -> CMatrix {
        self.mu.adjoint() * m * &self.mu
    }

    /// Outcome weights ⟨μ_j|M|μ_j⟩.
    pub fn expectations(&self, m: &CMatrix) -> Vec<f64> {
        let r = self.represent(m);
        (0..self.len()).map(|j| r[(j, j)].re).collect()
    }
}

/// Orthonormal basis of C^N whose top d rows reproduce the POVM vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct NaimarkBasis {
    basis: OrthonormalBasis,
    top_dim: usize,
}

impl NaimarkBasis {
    pub fn basis(&self) -> &OrthonormalBasis {
        &self.basis
    }

    /// N × N unitary whose columns are the completed vectors.
    pub fn matrix(&self) -> &CMatrix {
        self.basis.matrix()
    }

    /// Dimension d of the principal space.
    pub fn principal_dim(&self) -> usize {
        self.top_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// The original μ-block (first d rows).
    pub fn top_block(&self) -> CMatrix {
        self.matrix().rows(0, self.top_dim).into_owned()
    }

    /// Applies diag(I_d, V) to every basis vector, V a unitary on the ancilla space.
    pub fn rotate_ancilla(&self, v: &CMatrix) -> Result<Self> {
        let extra = self.dim() - self.top_dim;
        if v.nrows() != extra || v.ncols() != extra {
            return Err(Error::DimensionMismatch {
                expected: extra,
                found: v.nrows(),
            });
        }
        let dev = unitarity_deviation(v);
        if dev > tol::CLOSE {
            return Err(Error::NotOrthonormal { deviation: dev });
        }
        let mut m = self.matrix().clone();
        let bottom = v * m.rows(self.top_dim, extra);
        m.rows_mut(self.top_dim, extra).copy_from(&bottom);
        Ok(Self {
            basis: OrthonormalBasis::new(m)?,
            top_dim: self.top_dim,
        })
    }

    /// Multiplies the ancilla block by the phase e^{iγ}.
    pub fn with_phase(&self, gamma: f64) -> Result<Self> {
        let extra = self.dim() - self.top_dim;
        self.rotate_ancilla(&identity(extra).map(|z| z * C64::from_polar(1.0, gamma)))
    }
}

/// Completes the d × N matrix [[μ_ij]] to an N × N unitary.
///
/// Its d rows are orthonormal; new rows come from canonical unit rows orthogonalized
/// by modified Gram-Schmidt, skipping candidates whose residual is below the support
/// tolerance. The completion is deterministic.
pub fn naimark_completion(povm: &RankOnePovm) -> Result<NaimarkBasis> {
    let (d, n) = povm.matrix().shape();
    let dev = max_abs_diff(&(povm.matrix() * povm.matrix().adjoint()), &identity(d));
    if dev > tol::CLOSE {
        return Err(Error::Incomplete { deviation: dev });
    }
    // Rows of the target unitary, stored as conjugated columns.
    let mut cols: Vec<CVector> = (0..d).map(|i| povm.matrix().row(i).adjoint()).collect();
    for k in 0..n {
        if cols.len() == n {
            break;
        }
        let mut cand = CVector::zeros(n);
        cand[k] = C64::new(1.0, 0.0);
        for _pass in 0..2 {
            for q in &cols {
                let proj = q.dotc(&cand);
                cand -= q * proj;
            }
        }
        let norm = cand.norm();
        if norm < tol::SUPP {
            continue;
        }
        cols.push(cand.unscale(norm));
    }
    if cols.len() != n {
        return Err(Error::BadDecomposition(
            "Naimark completion could not find enough rows".into(),
        ));
    }
    let mut m = CMatrix::from_columns(&cols).adjoint();
    // keep the principal block bit-identical to the input
    m.rows_mut(0, d).copy_from(povm.matrix());
    let dev = unitarity_deviation(&m);
    if dev > tol::CLOSE {
        return Err(Error::NotOrthonormal { deviation: dev });
    }
    Ok(NaimarkBasis {
        basis: OrthonormalBasis::new(m)?,
        top_dim: d,
    })
}
