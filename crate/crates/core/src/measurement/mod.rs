//! Projective measurements and the channels they induce.
//!
//! A [`ProjectorDecomposition`] stores, next to its projectors, an orthonormal
//! frame for every block; everything downstream (refinements, block-diagonal
//! parameterizations, the robustness solver) works in those frames.

mod povm;

pub use povm::{naimark_completion, NaimarkBasis, RankOnePovm};

use crate::error::{Error, Result};
use crate::linalg::{
    eig_hermitian, eig_matrix, identity, ket_bra, max_abs_diff, tol, unitarity_deviation, CMatrix, CVector,
    DensityMatrix, Hermitian,
};

/// Default relative gap below which eigenvalues are merged into one block.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-8;

/// An orthogonal resolution of the identity {Π_j}.
#[derive(Debug, Clone)]
pub struct ProjectorDecomposition {
    projectors: Vec<Hermitian>,
    frames: Vec<CMatrix>,
    labels: Option<Vec<f64>>,
}

impl ProjectorDecomposition {
    /// Validates idempotence, mutual orthogonality and completeness.
    pub fn new(projectors: Vec<CMatrix>) -> Result<Self> {
        let first = projectors
            .first()
            .ok_or_else(|| Error::BadDecomposition("empty projector list".into()))?;
        let d = first.nrows();
        let mut sum = CMatrix::zeros(d, d);
        let mut herm = Vec::with_capacity(projectors.len());
        for (j, p) in projectors.iter().enumerate() {
            if p.nrows() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: p.nrows(),
                });
            }
            let h = Hermitian::new(p.clone())?;
            let dev = max_abs_diff(&(h.matrix() * h.matrix()), h.matrix());
            if dev > tol::EIG {
                return Err(Error::BadDecomposition(format!(
                    "projector {j} is not idempotent (deviation {dev:e})"
                )));
            }
            if h.trace() < 0.5 {
                return Err(Error::BadDecomposition(format!("projector {j} is zero")));
            }
            sum += h.matrix();
            herm.push(h);
        }
        for j in 0..herm.len() {
            for k in j + 1..herm.len() {
                let prod = herm[j].matrix() * herm[k].matrix();
                let dev = prod.iter().map(|z| z.norm()).fold(0.0, f64::max);
                if dev > tol::EIG {
                    return Err(Error::BadDecomposition(format!(
                        "projectors {j} and {k} are not orthogonal (deviation {dev:e})"
                    )));
                }
            }
        }
        let dev = max_abs_diff(&sum, &identity(d));
        if dev > tol::CLOSE {
            return Err(Error::Incomplete { deviation: dev });
        }
        let frames = herm.iter().map(frame_of_projector).collect();
        Ok(Self {
            projectors: herm,
            frames,
            labels: None,
        })
    }

    /// Builds the decomposition from orthonormal column blocks F_j (Π_j = F_j F_j†).
    pub fn from_frames(frames: Vec<CMatrix>) -> Result<Self> {
        let first = frames
            .first()
            .ok_or_else(|| Error::BadDecomposition("empty frame list".into()))?;
        let d = first.nrows();
        let total: usize = frames.iter().map(|f| f.ncols()).sum();
        if total != d || frames.iter().any(|f| f.nrows() != d || f.ncols() == 0) {
            return Err(Error::BadDecomposition(
                "frame blocks must partition the space".into(),
            ));
        }
        let joined = join_columns(&frames);
        let dev = unitarity_deviation(&joined);
        if dev > tol::CLOSE {
            return Err(Error::NotOrthonormal { deviation: dev });
        }
        Ok(Self::from_trusted_frames(frames))
    }

    pub(crate) fn from_trusted_frames(frames: Vec<CMatrix>) -> Self {
        let projectors = frames
            .iter()
            .map(|f| Hermitian::from_trusted(f * f.adjoint()))
            .collect();
        Self {
            projectors,
            frames,
            labels: None,
        }
    }

    /// Rank-one decomposition {|y⟩⟨y|} of a basis, in basis order.
    pub fn from_basis(basis: &OrthonormalBasis) -> Self {
        let frames = (0..basis.len())
            .map(|k| basis.vectors.columns(k, 1).into_owned())
            .collect();
        Self::from_trusted_frames(frames)
    }

    pub fn with_labels(mut self, labels: Vec<f64>) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.frames[0].nrows()
    }

    /// Number of blocks.
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn projectors(&self) -> &[Hermitian] {
        &self.projectors
    }

    pub fn projector(&self, j: usize) -> &CMatrix {
        self.projectors[j].matrix()
    }

    pub fn block_dims(&self) -> Vec<usize> {
        self.frames.iter().map(|f| f.ncols()).collect()
    }

    /// Orthonormal columns spanning block j.
    pub fn frame(&self, j: usize) -> &CMatrix {
        &self.frames[j]
    }

    pub fn frames(&self) -> &[CMatrix] {
        &self.frames
    }

    /// Eigenvalue attached to each block, when built from an observable.
    pub fn labels(&self) -> Option<&[f64]> {
        self.labels.as_deref()
    }

    pub fn is_rank_one(&self) -> bool {
        self.frames.iter().all(|f| f.ncols() == 1)
    }

    /// Pinching Σ_j Π_j M Π_j of an arbitrary operator.
    pub fn pinch(&self, m: &CMatrix) -> CMatrix {
        let d = self.dim();
        let mut out = CMatrix::zeros(d, d);
        for f in &self.frames {
            let inner = f.adjoint() * m * f;
            out += f * inner * f.adjoint();
        }
        out
    }

    /// Concatenated block frames: a unitary whose columns are ordered block by block.
    pub fn adapted_unitary(&self) -> CMatrix {
        join_columns(&self.frames)
    }

    /// Diagonal blocks F_j† M F_j.
    pub fn blocks_of(&self, m: &CMatrix) -> Vec<CMatrix> {
        self.frames.iter().map(|f| f.adjoint() * m * f).collect()
    }

    /// Σ_j F_j B_j F_j† for per-block matrices B_j.
    pub fn assemble(&self, blocks: &[CMatrix]) -> CMatrix {
        let d = self.dim();
        let mut out = CMatrix::zeros(d, d);
        for (f, b) in self.frames.iter().zip(blocks) {
            out += f * b * f.adjoint();
        }
        out
    }

    fn check_dim(&self, d: usize) -> Result<()> {
        if d != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: d,
            });
        }
        Ok(())
    }
}

pub(crate) fn join_columns(blocks: &[CMatrix]) -> CMatrix {
    let rows = blocks.first().map_or(0, |b| b.nrows());
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMatrix::zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        out.view_mut((0, at), (rows, b.ncols())).copy_from(b);
        at += b.ncols();
    }
    out
}

fn frame_of_projector(p: &Hermitian) -> CMatrix {
    let eig = eig_hermitian(p);
    let cols: Vec<usize> = (0..eig.dim()).filter(|&k| eig.values[k] > 0.5).collect();
    let mut f = CMatrix::zeros(p.dim(), cols.len());
    for (c, &k) in cols.iter().enumerate() {
        f.set_column(c, &eig.vectors.column(k));
    }
    f
}

/// Spectral projectors of an observable, merging eigenvalues whose sorted gaps
/// are below `degeneracy_tol` (relative to max(1, max|λ|)).
pub fn spectral_projectors(x: &Hermitian, degeneracy_tol: f64) -> ProjectorDecomposition {
    let eig = eig_hermitian(x);
    let n = eig.dim();
    let scale = eig.values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut frames = Vec::new();
    let mut labels = Vec::new();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && eig.values[end] - eig.values[end - 1] < degeneracy_tol * scale {
            end += 1;
        }
        frames.push(eig.vectors.columns(start, end - start).into_owned());
        labels.push(eig.values[start..end].iter().sum::<f64>() / (end - start) as f64);
        start = end;
    }
    let mut p = ProjectorDecomposition::from_trusted_frames(frames);
    p.labels = Some(labels);
    p
}

/// Lüders post-measurement state Σ_j Π_j ρ Π_j.
pub fn luders_apply(p: &ProjectorDecomposition, rho: &DensityMatrix) -> Result<DensityMatrix> {
    p.check_dim(rho.dim())?;
    Ok(DensityMatrix::from_trusted(p.pinch(rho.matrix())))
}

/// An orthonormal basis stored as the columns of a unitary, with optional (j, β) block labels.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalBasis {
    vectors: CMatrix,
    labels: Option<Vec<(usize, usize)>>,
}

impl OrthonormalBasis {
    pub fn new(columns: CMatrix) -> Result<Self> {
        if columns.nrows() != columns.ncols() {
            return Err(Error::NotSquare {
                rows: columns.nrows(),
                cols: columns.ncols(),
            });
        }
        let dev = unitarity_deviation(&columns);
        if dev > tol::CLOSE {
            return Err(Error::NotOrthonormal { deviation: dev });
        }
        Ok(Self {
            vectors: columns,
            labels: None,
        })
    }

    pub fn from_vectors(vectors: &[CVector]) -> Result<Self> {
        let d = vectors.len();
        if vectors.iter().any(|v| v.len() != d) {
            return Err(Error::InvalidParameter(
                "a basis needs as many vectors as their dimension".into(),
            ));
        }
        let mut m = CMatrix::zeros(d, d);
        for (k, v) in vectors.iter().enumerate() {
            m.set_column(k, v);
        }
        Self::new(m)
    }

    pub fn computational(dim: usize) -> Self {
        Self {
            vectors: identity(dim),
            labels: None,
        }
    }

    pub fn with_labels(mut self, labels: Vec<(usize, usize)>) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn len(&self) -> usize {
        self.vectors.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.ncols() == 0
    }

    pub fn vector(&self, k: usize) -> CVector {
        self.vectors.column(k).into_owned()
    }

    /// Basis vectors as columns.
    pub fn matrix(&self) -> &CMatrix {
        &self.vectors
    }

    pub fn labels(&self) -> Option<&[(usize, usize)]> {
        self.labels.as_deref()
    }

    /// Matrix elements ⟨y_a|M|y_b⟩.
    pub fn represent(&self, m: &CMatrix) -> CMatrix {
        self.vectors.adjoint() * m * &self.vectors
    }

    /// Σ_y |y⟩⟨y|M|y⟩⟨y|.
    pub fn dephase(&self, m: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim(), self.dim());
        for k in 0..self.len() {
            let y = self.vector(k);
            let w = y.dotc(&(m * &y));
            out += ket_bra(&y) * w;
        }
        out
    }

    /// Block index of every vector under `p`, or an error when the basis does not refine it.
    pub fn block_assignment(&self, p: &ProjectorDecomposition) -> Result<Vec<usize>> {
        if p.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: p.dim(),
                found: self.dim(),
            });
        }
        (0..self.len())
            .map(|k| {
                let y = self.vector(k);
                (0..p.len())
                    .find(|&j| (p.projector(j) * &y - &y).norm() <= 1e-8)
                    .ok_or_else(|| Error::NotRefinement(format!("vector {k} lies in no single block")))
            })
            .collect()
    }
}

/// von Neumann post-measurement state Σ_y |y⟩⟨y|ρ|y⟩⟨y|.
pub fn vonneumann_apply(b: &OrthonormalBasis, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if b.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: b.dim(),
            found: rho.dim(),
        });
    }
    Ok(DensityMatrix::from_trusted(b.dephase(rho.matrix())))
}

/// Basis adapted to the blocks of `p`: block j contributes the columns of F_j U_j.
///
/// Without unitaries the block frames themselves are used. Vectors are ordered block by
/// block and labelled (j, β).
pub fn refinement_basis(
    p: &ProjectorDecomposition,
    block_unitaries: Option<&[CMatrix]>,
) -> Result<OrthonormalBasis> {
    let mut cols = Vec::with_capacity(p.len());
    let mut labels = Vec::new();
    for j in 0..p.len() {
        let f = p.frame(j);
        let n = f.ncols();
        let block = match block_unitaries {
            Some(us) => {
                let u = us.get(j).ok_or_else(|| Error::DimensionMismatch {
                    expected: p.len(),
                    found: us.len(),
                })?;
                if u.nrows() != n || u.ncols() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: u.nrows(),
                    });
                }
                let dev = unitarity_deviation(u);
                if dev > tol::CLOSE {
                    return Err(Error::NotOrthonormal { deviation: dev });
                }
                f * u
            }
            None => f.clone(),
        };
        labels.extend((0..n).map(|beta| (j, beta)));
        cols.push(block);
    }
    OrthonormalBasis::new(join_columns(&cols))?.with_labels(labels)
}

/// Refinement that diagonalizes a compatible operator inside every block.
pub fn refinement_from_operator(p: &ProjectorDecomposition, refiner: &Hermitian) -> Result<OrthonormalBasis> {
    p.check_dim(refiner.dim())?;
    let us: Vec<CMatrix> = (0..p.len())
        .map(|j| {
            let f = p.frame(j);
            eig_matrix(&(f.adjoint() * refiner.matrix() * f)).vectors
        })
        .collect();
    refinement_basis(p, Some(&us))
}

/// Reference for [`is_invariant`].
#[derive(Debug, Clone, Copy)]
pub enum Frame<'a> {
    Projectors(&'a ProjectorDecomposition),
    Basis(&'a OrthonormalBasis),
}

/// Whether ‖Φ(ρ) − ρ‖_max ≤ tol for the frame's measurement channel.
pub fn is_invariant(rho: &CMatrix, frame: Frame<'_>, tol: f64) -> bool {
    let out = match frame {
        Frame::Projectors(p) if p.dim() == rho.nrows() => p.pinch(rho),
        Frame::Basis(b) if b.dim() == rho.nrows() => b.dephase(rho),
        _ => return false,
    };
    max_abs_diff(&out, rho) <= tol
}

/// Completely positive trace-preserving map in Kraus form.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    kraus: Vec<CMatrix>,
}

impl KrausChannel {
    pub fn new(kraus: Vec<CMatrix>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty Kraus list".into()))?;
        let (dout, din) = first.shape();
        let mut sum = CMatrix::zeros(din, din);
        for k in &kraus {
            if k.shape() != (dout, din) {
                return Err(Error::DimensionMismatch {
                    expected: din,
                    found: k.ncols(),
                });
            }
            sum += k.adjoint() * k;
        }
        let dev = max_abs_diff(&sum, &identity(din));
        if dev > tol::CLOSE {
            return Err(Error::Incomplete { deviation: dev });
        }
        Ok(Self { kraus })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            kraus: vec![identity(dim)],
        }
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn dim_in(&self) -> usize {
        self.kraus[0].ncols()
    }

    pub fn dim_out(&self) -> usize {
        self.kraus[0].nrows()
    }

    /// Σ K M K† on an arbitrary operator.
    pub fn apply_matrix(&self, m: &CMatrix) -> CMatrix {
        let d = self.dim_out();
        self.kraus
            .iter()
            .fold(CMatrix::zeros(d, d), |acc, k| acc + k * m * k.adjoint())
    }
}

/// Kraus representation {Π_j} of the Lüders channel.
pub fn channel_from_projectors(p: &ProjectorDecomposition) -> KrausChannel {
    KrausChannel {
        kraus: p.projectors().iter().map(|h| h.matrix().clone()).collect(),
    }
}

pub fn apply_channel(ch: &KrausChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if ch.dim_in() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: ch.dim_in(),
            found: rho.dim(),
        });
    }
    Ok(DensityMatrix::from_trusted(ch.apply_matrix(rho.matrix())))
}
