//! Dense complex Hermitian linear algebra.
//!
//! Everything here works on small dense matrices (dimension at most 16) stored
//! as [`nalgebra::DMatrix`] over [`Complex64`]. Validated wrappers
//! ([`Hermitian`], [`DensityMatrix`]) carry the invariants that the rest of the
//! crate relies on; matrix functions go through a sorted, deterministic
//! eigendecomposition.

mod random;

pub(crate) use random::gaussian_matrix;
pub use random::{
    child_seed, random_cptp, random_density, random_hermitian, random_unitary, rng_from_seed,
    try_random_density,
};

use std::cmp::Ordering;
use std::ops::Deref;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Numerical tolerances shared across the crate.
pub mod tol {
    /// Hermiticity check.
    pub const HERM: f64 = 1e-10;
    /// Unit-trace check.
    pub const TRACE: f64 = 1e-10;
    /// Allowed negativity of eigenvalues before a PSD check fails.
    pub const PSD: f64 = 1e-10;
    /// Eigendecomposition reconstruction / orthonormality.
    pub const EIG: f64 = 1e-10;
    /// Kernel threshold, relative to the largest eigenvalue.
    pub const SUPP: f64 = 1e-9;
    /// Completeness of projector sets, Kraus sets and POVMs.
    pub const CLOSE: f64 = 1e-10;
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn real(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

pub fn zeros(dim: usize) -> CMatrix {
    CMatrix::zeros(dim, dim)
}

pub fn dagger(m: &CMatrix) -> CMatrix {
    m.adjoint()
}

pub fn trace(m: &CMatrix) -> C64 {
    m.trace()
}

/// |v⟩⟨v|
pub fn ket_bra(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

pub fn diag_real(entries: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&DVector::from_iterator(
        entries.len(),
        entries.iter().map(|&x| real(x)),
    ))
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Largest entry-wise modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Inner product ⟨a|b⟩.
pub fn inner(a: &CVector, b: &CVector) -> C64 {
    a.dotc(b)
}

/// ⟨a|M|b⟩
pub fn sandwich(a: &CVector, m: &CMatrix, b: &CVector) -> C64 {
    a.dotc(&(m * b))
}

fn check_square(m: &CMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(())
}

/// Deviation from Hermiticity, max |a_ij - conj(a_ji)|.
pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

fn symmetrize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// A Hermitian operator. Construction symmetrizes away sub-tolerance drift.
#[derive(Debug, Clone, PartialEq)]
pub struct Hermitian(CMatrix);

impl Hermitian {
    pub fn new(m: CMatrix) -> Result<Self> {
        check_square(&m)?;
        let scale = max_abs(&m).max(1.0);
        let deviation = hermiticity_deviation(&m);
        if deviation > tol::HERM * scale {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self(symmetrize(&m)))
    }

    /// Wraps a matrix that is Hermitian by construction.
    pub(crate) fn from_trusted(m: CMatrix) -> Self {
        debug_assert!(hermiticity_deviation(&m) <= 1e-8 * max_abs(&m).max(1.0));
        Self(symmetrize(&m))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }
}

impl Deref for Hermitian {
    type Target = CMatrix;
    fn deref(&self) -> &CMatrix {
        &self.0
    }
}

/// A density matrix: Hermitian, PSD within [`tol::PSD`], unit trace within [`tol::TRACE`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(Hermitian);

impl DensityMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        let h = Hermitian::new(m)?;
        let tr = h.trace();
        if (tr - 1.0).abs() > tol::TRACE {
            return Err(Error::BadTrace { trace: tr });
        }
        let eig = eig_hermitian(&h);
        let min = eig.values[0];
        if min < -tol::PSD {
            return Err(Error::NotPsd { min_eigenvalue: min });
        }
        Ok(Self(h))
    }

    /// Normalizes a PSD matrix to unit trace.
    pub fn from_psd(m: CMatrix) -> Result<Self> {
        let h = Hermitian::new(m)?;
        let tr = h.trace();
        if !(tr > 0.0) {
            return Err(Error::BadTrace { trace: tr });
        }
        Self::new(h.0.unscale(tr))
    }

    /// Pure state |ψ⟩⟨ψ| for a (not necessarily normalized) nonzero vector.
    pub fn pure(psi: &CVector) -> Result<Self> {
        let n = psi.norm();
        if !(n > 0.0) {
            return Err(Error::InvalidParameter("zero state vector".into()));
        }
        let v = psi.unscale(n);
        Ok(Self(Hermitian::from_trusted(ket_bra(&v))))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(Hermitian::from_trusted(identity(dim).unscale(dim as f64)))
    }

    /// Wraps a matrix known to be a state up to rounding (e.g. a channel output).
    pub(crate) fn from_trusted(m: CMatrix) -> Self {
        Self(Hermitian::from_trusted(m))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        self.0.matrix()
    }

    pub fn hermitian(&self) -> &Hermitian {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0.into_matrix()
    }

    /// Convex combination Σ w_i ρ_i.
    pub fn mixture(weights: &[f64], states: &[DensityMatrix]) -> Result<Self> {
        let first = states
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty mixture".into()))?;
        let mut acc = zeros(first.dim());
        for (w, s) in weights.iter().zip(states) {
            if s.dim() != first.dim() {
                return Err(Error::DimensionMismatch {
                    expected: first.dim(),
                    found: s.dim(),
                });
            }
            acc += s.matrix().scale(*w);
        }
        Self::new(acc)
    }
}

impl Deref for DensityMatrix {
    type Target = CMatrix;
    fn deref(&self) -> &CMatrix {
        self.0.matrix()
    }
}

/// Eigenvalues in ascending order with matching orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, k: usize) -> CVector {
        self.vectors.column(k).into_owned()
    }

    pub fn max_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// Threshold below which eigenvalues count as kernel.
    pub fn support_cutoff(&self) -> f64 {
        tol::SUPP * self.max_value().max(0.0)
    }

    /// Indices of eigenvalues above the kernel cutoff.
    pub fn support_indices(&self) -> Vec<usize> {
        let cut = self.support_cutoff();
        (0..self.dim())
            .filter(|&k| self.values[k] > cut && self.values[k] > 0.0)
            .collect()
    }

    /// V diag(f(λ)) V†.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.dim();
        let mut scaled = self.vectors.clone();
        for k in 0..n {
            let fk = f(self.values[k]);
            scaled.column_mut(k).scale_mut(fk);
        }
        &scaled * self.vectors.adjoint()
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.map(|x| x)
    }
}

/// Makes the first non-negligible component real and positive.
fn phase_normalize(v: &mut CVector) {
    if let Some(first) = v.iter().find(|z| z.norm() > 1e-12).copied() {
        let phase = first.conj() / first.norm();
        for z in v.iter_mut() {
            *z *= phase;
        }
    }
}

fn lexicographic(a: &CVector, b: &CVector) -> Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        match x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

/// Deterministic Hermitian eigendecomposition with ascending eigenvalues.
///
/// Eigenvectors are phase-normalized; ties (eigenvalues within [`tol::EIG`]) are
/// ordered lexicographically by their entries.
pub fn eig_hermitian(h: &Hermitian) -> EigenDecomposition {
    eig_matrix(h.matrix())
}

pub(crate) fn eig_matrix(m: &CMatrix) -> EigenDecomposition {
    let n = m.nrows();
    if n == 0 {
        return EigenDecomposition {
            values: vec![],
            vectors: CMatrix::zeros(0, 0),
        };
    }
    let se = SymmetricEigen::new(symmetrize(m));
    let mut pairs: Vec<(f64, CVector)> = (0..n)
        .map(|k| {
            let mut v = se.eigenvectors.column(k).into_owned();
            phase_normalize(&mut v);
            (se.eigenvalues[k], v)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    // Within clusters of tied eigenvalues order by eigenvector entries.
    let scale = pairs.iter().map(|p| p.0.abs()).fold(1.0, f64::max);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && pairs[end].0 - pairs[end - 1].0 <= tol::EIG * scale {
            end += 1;
        }
        if end - start > 1 {
            pairs[start..end].sort_by(|a, b| lexicographic(&a.1, &b.1));
        }
        start = end;
    }

    let mut vectors = CMatrix::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    for (k, (val, vec)) in pairs.into_iter().enumerate() {
        values.push(val);
        vectors.set_column(k, &vec);
    }
    EigenDecomposition { values, vectors }
}

/// Eigendecomposition of a PSD operator; eigenvalues within `-tol::PSD` of zero are clamped.
pub fn psd_eigen(m: &CMatrix) -> Result<EigenDecomposition> {
    check_square(m)?;
    let mut eig = eig_matrix(m);
    let scale = eig.max_value().abs().max(1.0);
    if let Some(&min) = eig.values.first() {
        if min < -tol::PSD * scale {
            return Err(Error::NotPsd { min_eigenvalue: min });
        }
    }
    for v in eig.values.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    Ok(eig)
}

/// A^α for PSD A; kernel eigenvalues map to 0 for every α > 0.
pub fn matrix_power(a: &Hermitian, alpha: f64) -> Result<Hermitian> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "matrix power exponent must be positive, got {alpha}"
        )));
    }
    let eig = psd_eigen(a.matrix())?;
    Ok(Hermitian::from_trusted(power_of(&eig, alpha)))
}

/// Spectral power on an existing decomposition, with the support cutoff applied.
pub(crate) fn power_of(eig: &EigenDecomposition, alpha: f64) -> CMatrix {
    let cut = eig.support_cutoff();
    eig.map(|x| if x > cut && x > 0.0 { x.powf(alpha) } else { 0.0 })
}

/// ln A on ran(A), zero on the kernel.
pub fn matrix_log_support(a: &Hermitian) -> Result<Hermitian> {
    let eig = psd_eigen(a.matrix())?;
    let cut = eig.support_cutoff();
    Ok(Hermitian::from_trusted(eig.map(|x| {
        if x > cut && x > 0.0 {
            x.ln()
        } else {
            0.0
        }
    })))
}

/// Σ_ij |a_ij| in the stored representation.
pub fn ell1_norm(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm()).sum()
}

/// Orthogonal projector onto ran(A).
pub fn support_projector(a: &Hermitian) -> Result<Hermitian> {
    let eig = psd_eigen(a.matrix())?;
    Ok(Hermitian::from_trusted(projector_from(&eig)))
}

pub(crate) fn projector_from(eig: &EigenDecomposition) -> CMatrix {
    let n = eig.dim();
    let mut p = zeros(n);
    for k in eig.support_indices() {
        let v = eig.vector(k);
        p += ket_bra(&v);
    }
    p
}

/// diag(ρ, 0) in dimension d + extra.
pub fn direct_sum_embed(rho: &DensityMatrix, extra: usize) -> DensityMatrix {
    DensityMatrix::from_trusted(embed_block(rho.matrix(), extra))
}

pub(crate) fn embed_block(m: &CMatrix, extra: usize) -> CMatrix {
    let d = m.nrows();
    let mut out = zeros(d + extra);
    out.view_mut((0, 0), (d, d)).copy_from(m);
    out
}

/// von Neumann entropy -tr(ρ ln ρ).
pub fn von_neumann_entropy(rho: &CMatrix) -> Result<f64> {
    let eig = psd_eigen(rho)?;
    Ok(shannon_entropy(&eig.values))
}

/// -Σ p ln p with 0 ln 0 = 0.
pub fn shannon_entropy(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()).sum()
}

/// Modified Gram-Schmidt (applied twice) on the columns of `m`.
pub(crate) fn orthonormalize_columns(m: &CMatrix) -> CMatrix {
    let mut q = m.clone();
    for j in 0..q.ncols() {
        for _pass in 0..2 {
            for k in 0..j {
                let qk = q.column(k).into_owned();
                let proj = qk.dotc(&q.column(j));
                let upd = q.column(j) - qk * proj;
                q.set_column(j, &upd);
            }
        }
        let n = q.column(j).norm();
        q.column_mut(j).unscale_mut(n);
    }
    q
}

/// Max deviation of M†M from the identity.
pub fn unitarity_deviation(m: &CMatrix) -> f64 {
    max_abs_diff(&(m.adjoint() * m), &identity(m.ncols()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pauli_z() -> CMatrix {
        diag_real(&[1.0, -1.0])
    }

    #[test]
    fn identity_spectrum() {
        let eig = eig_hermitian(&Hermitian::new(identity(2)).unwrap());
        assert_eq!(eig.values, vec![1.0, 1.0]);
        assert!(unitarity_deviation(&eig.vectors) < 1e-12);
    }

    #[test]
    fn pauli_z_spectrum() {
        let eig = eig_hermitian(&Hermitian::new(pauli_z()).unwrap());
        assert_abs_diff_eq!(eig.values[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(eig.values[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = CMatrix::from_row_slice(2, 2, &[real(0.0), real(1.0), real(0.0), real(0.0)]);
        assert!(matches!(Hermitian::new(m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn rejects_bad_states() {
        assert!(matches!(
            DensityMatrix::new(diag_real(&[0.6, 0.6])),
            Err(Error::BadTrace { .. })
        ));
        assert!(matches!(
            DensityMatrix::new(diag_real(&[1.5, -0.5])),
            Err(Error::NotPsd { .. })
        ));
    }

    #[test]
    fn random_reconstruction() {
        let h = random_hermitian(4, 11);
        let eig = eig_hermitian(&h);
        assert!(max_abs_diff(&eig.reconstruct(), h.matrix()) <= 1e-12);
        assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn eigendecomposition_is_deterministic() {
        let h = random_hermitian(5, 3);
        let a = eig_hermitian(&h);
        let b = eig_hermitian(&h);
        assert_eq!(a.values, b.values);
        assert_eq!(a.vectors, b.vectors);
    }

    #[test]
    fn power_examples() {
        let rho = Hermitian::new(diag_real(&[0.25, 0.75])).unwrap();
        let half = matrix_power(&rho, 0.5).unwrap();
        assert_abs_diff_eq!(half[(0, 0)].re, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(half[(1, 1)].re, 0.75f64.sqrt(), epsilon = 1e-14);

        let one = matrix_power(&rho, 1.0).unwrap();
        assert!(max_abs_diff(&one, &rho) < 1e-14);

        let psi = CVector::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8)]);
        let pure = DensityMatrix::pure(&psi).unwrap();
        for alpha in [0.3, 0.5, 2.0, 3.7] {
            let p = matrix_power(pure.hermitian(), alpha).unwrap();
            assert!(max_abs_diff(&p, &pure) < 1e-12, "alpha {alpha}");
        }
        assert!(matches!(matrix_power(&rho, 0.0), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn log_examples() {
        let z = matrix_log_support(&Hermitian::new(identity(3)).unwrap()).unwrap();
        assert!(max_abs(&z) < 1e-14);

        let e = std::f64::consts::E;
        let l = matrix_log_support(&Hermitian::new(diag_real(&[e, 1.0])).unwrap()).unwrap();
        assert!(max_abs_diff(&l, &diag_real(&[1.0, 0.0])) < 1e-14);

        let l = matrix_log_support(&Hermitian::new(diag_real(&[0.5, 0.5, 0.0])).unwrap()).unwrap();
        let half = 0.5f64.ln();
        assert!(max_abs_diff(&l, &diag_real(&[half, half, 0.0])) < 1e-14);
    }

    #[test]
    fn ell1_examples() {
        assert_eq!(ell1_norm(&zeros(3)), 0.0);
        let m = CMatrix::from_row_slice(2, 2, &[real(0.0), c(0.0, 1.0), c(0.0, -1.0), real(0.0)]);
        assert_abs_diff_eq!(ell1_norm(&m), 2.0, epsilon = 1e-15);
        // qubit state minus its diagonal: 2|v|
        let v = c(0.1, -0.2);
        let off = CMatrix::from_row_slice(2, 2, &[real(0.0), v.conj(), v, real(0.0)]);
        assert_abs_diff_eq!(ell1_norm(&off), 2.0 * v.norm(), epsilon = 1e-15);
    }

    #[test]
    fn support_examples() {
        let full = random_density(3, 3, 5);
        let p = support_projector(full.hermitian()).unwrap();
        assert!(max_abs_diff(&p, &identity(3)) < 1e-10);

        let k0 = diag_real(&[1.0, 0.0]);
        let p = support_projector(&Hermitian::new(k0.clone()).unwrap()).unwrap();
        assert!(max_abs_diff(&p, &k0) < 1e-14);

        let p = support_projector(&Hermitian::new(diag_real(&[0.3, 0.0, 0.7])).unwrap()).unwrap();
        assert!(max_abs_diff(&p, &diag_real(&[1.0, 0.0, 1.0])) < 1e-14);
    }

    #[test]
    fn embedding() {
        let rho = random_density(2, 2, 9);
        assert_eq!(direct_sum_embed(&rho, 0).matrix(), rho.matrix());
        let big = direct_sum_embed(&rho, 1);
        assert_eq!(big.dim(), 3);
        for k in 0..3 {
            assert_eq!(big[(2, k)], real(0.0));
            assert_eq!(big[(k, 2)], real(0.0));
        }
        assert_abs_diff_eq!(big.hermitian().trace(), 1.0, epsilon = 1e-14);
    }
}
