//! Two-qubit total-spin example: Σz, its degenerate spectral decomposition, the
//! refinement by the total-spin operator, and closed forms for Δc.
//!
//! Computational basis order: |z₀z₀⟩, |z₀z₁⟩, |z₁z₀⟩, |z₁z₁⟩. The 2×2 state (u, v)
//! lives in the middle block written in the {|zz₊⟩, |zz₋⟩} basis with
//! |zz±⟩ = (|z₀z₁⟩ ± |z₁z₀⟩)/√2 and ⟨zz₋|ρ|zz₊⟩ = v.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{c, kron, real, CMatrix, CVector, DensityMatrix, Hermitian, C64};
use crate::measurement::{luders_apply, vonneumann_apply, OrthonormalBasis, ProjectorDecomposition};

#[derive(Debug, Clone)]
pub struct SpinExample {
    /// Σz = σz⊗I + I⊗σz.
    pub observable: Hermitian,
    /// Π₀₀, Π₊ + Π₋, Π₁₁ with labels 2, 0, −2.
    pub decomposition: ProjectorDecomposition,
    /// |z₀z₀⟩, |zz₊⟩, |z₁z₁⟩, |zz₋⟩ labelled (0,0), (1,0), (2,0), (1,1).
    pub refinement: OrthonormalBasis,
    /// Σz + (Σx² + Σy² + Σz²)/2, diagonal in the refinement with eigenvalues 6, 4, 2, 0.
    pub refiner: Hermitian,
}

fn ket(entries: [C64; 4]) -> CVector {
    CVector::from_vec(entries.to_vec())
}

fn zz(sign: f64) -> CVector {
    ket([
        real(0.0),
        real(FRAC_1_SQRT_2),
        real(sign * FRAC_1_SQRT_2),
        real(0.0),
    ])
}

fn basis_ket(k: usize) -> CVector {
    let mut e = [real(0.0); 4];
    e[k] = real(1.0);
    ket(e)
}

fn collective(single: &CMatrix) -> CMatrix {
    let id = CMatrix::identity(2, 2);
    kron(single, &id) + kron(&id, single)
}

fn pauli() -> [CMatrix; 3] {
    let o = real(0.0);
    let i = c(0.0, 1.0);
    [
        CMatrix::from_row_slice(2, 2, &[o, real(1.0), real(1.0), o]),
        CMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
        CMatrix::from_row_slice(2, 2, &[real(1.0), o, o, real(-1.0)]),
    ]
}

pub fn build_spin_example() -> SpinExample {
    let [sx, sy, sz] = pauli().map(|s| collective(&s));
    let refiner = &sz + (&sx * &sx + &sy * &sy + &sz * &sz).scale(0.5);
    let frame = |vs: &[CVector]| CMatrix::from_columns(vs);
    let decomposition = ProjectorDecomposition::from_frames(vec![
        frame(&[basis_ket(0)]),
        frame(&[zz(1.0), zz(-1.0)]),
        frame(&[basis_ket(3)]),
    ])
    .and_then(|p| p.with_labels(vec![2.0, 0.0, -2.0]))
    .expect("spin projectors are an orthogonal resolution of identity");
    let refinement = OrthonormalBasis::from_vectors(&[basis_ket(0), zz(1.0), basis_ket(3), zz(-1.0)])
        .and_then(|b| b.with_labels(vec![(0, 0), (1, 0), (2, 0), (1, 1)]))
        .expect("spin refinement is orthonormal");
    SpinExample {
        observable: Hermitian::new(sz).expect("Σz is Hermitian"),
        decomposition,
        refinement,
        refiner: Hermitian::new(refiner).expect("refiner is Hermitian"),
    }
}

/// Σz value recovered from an eigenvalue of the refiner: 6→2, 4→0, 2→−2, 0→0.
pub fn g(y: f64) -> Option<f64> {
    [(6.0, 2.0), (4.0, 0.0), (2.0, -2.0), (0.0, 0.0)]
        .into_iter()
        .find(|(e, _)| (y - e).abs() < 1e-9)
        .map(|(_, z)| z)
}

/// (von Neumann state in the refinement, Lüders state in the decomposition).
pub fn spin_reductions(ex: &SpinExample, rho: &DensityMatrix) -> Result<(DensityMatrix, DensityMatrix)> {
    Ok((
        vonneumann_apply(&ex.refinement, rho)?,
        luders_apply(&ex.decomposition, rho)?,
    ))
}

fn check_qubit(u: f64, v: C64) -> Result<()> {
    if !(0.0..=1.0).contains(&u) || !v.norm().is_finite() {
        return Err(Error::InvalidParameter(format!("u = {u} outside [0, 1]")));
    }
    let bound = (u * (1.0 - u)).sqrt();
    if v.norm() > bound + 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "|v| = {} exceeds sqrt(u(1-u)) = {bound}",
            v.norm()
        )));
    }
    Ok(())
}

/// The 2×2 matrix [[u, v*], [v, 1−u]].
pub fn qubit_state(u: f64, v: C64) -> Result<DensityMatrix> {
    check_qubit(u, v)?;
    DensityMatrix::new(CMatrix::from_row_slice(
        2,
        2,
        &[real(u), v.conj(), v, real(1.0 - u)],
    ))
}

/// Embeds the {|zz₊⟩, |zz₋⟩} qubit state into the 4×4 computational representation.
pub fn embed_qubit(u: f64, v: C64) -> Result<DensityMatrix> {
    let q = qubit_state(u, v)?;
    let f = CMatrix::from_columns(&[zz(1.0), zz(-1.0)]);
    DensityMatrix::new(&f * q.matrix() * f.adjoint())
}

/// (u, v) of a 4×4 state, read off in the {|zz₊⟩, |zz₋⟩} basis.
pub fn project_qubit(rho: &CMatrix) -> Result<(f64, C64)> {
    if rho.nrows() != 4 || rho.ncols() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: rho.nrows(),
        });
    }
    let p = zz(1.0);
    let m = zz(-1.0);
    let u = p.dotc(&(rho * &p)).re;
    let v = m.dotc(&(rho * &p));
    Ok((u, v))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpinDeltas {
    pub l1: f64,
    pub c1: f64,
    pub c2: f64,
    pub robustness: f64,
    pub weight: f64,
}

fn binary_entropy(x: f64) -> f64 {
    [x, 1.0 - x]
        .into_iter()
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.ln())
        .sum()
}

/// Δc for every kind on the embedded qubit state. The Lüders side vanishes, so each
/// value is the basis quantifier of the qubit.
///
/// The weight is 2|v| when u ≥ |v| and 1−u ≥ |v|; otherwise the smaller diagonal entry
/// m gives m + |v|²/m.
pub fn spin_delta_closed_forms(u: f64, v: C64) -> Result<SpinDeltas> {
    check_qubit(u, v)?;
    let a = v.norm();
    let det = u * (1.0 - u) - a * a;
    let lambda_plus = 0.5 + (0.25 - det).max(0.0).sqrt();
    let c2 = ((u * u + a * a).sqrt() + ((1.0 - u).powi(2) + a * a).sqrt()).powi(2) - 1.0;
    let m = u.min(1.0 - u);
    let weight = if m >= a { 2.0 * a } else { m + a * a / m };
    Ok(SpinDeltas {
        l1: 2.0 * a,
        c1: binary_entropy(u) - binary_entropy(lambda_plus),
        c2,
        robustness: 2.0 * a,
        weight,
    })
}

/// Pure state √u|zz₊⟩ + √(1−u) e^{iφ}|zz₋⟩ as (u, v).
pub fn maximizing_qubit(u: f64, phi: f64) -> (f64, C64) {
    (u, C64::from_polar((u * (1.0 - u)).sqrt(), phi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eig_hermitian, max_abs_diff};
    use crate::measurement::{refinement_from_operator, spectral_projectors, DEFAULT_DEGENERACY_TOL};
    use crate::quantifiers::{delta_c, DeltaKind};
    use proptest::prelude::*;
    use std::f64::consts::{LN_2, PI};

    fn sorted_spectrum(h: &Hermitian) -> Vec<f64> {
        let mut v = eig_hermitian(h).values;
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }

    #[test]
    fn spectra() {
        let ex = build_spin_example();
        let s = sorted_spectrum(&ex.observable);
        for (x, y) in s.iter().zip([2.0, 0.0, 0.0, -2.0]) {
            assert!((x - y).abs() < 1e-12);
        }
        let r = sorted_spectrum(&ex.refiner);
        for (x, y) in r.iter().zip([6.0, 4.0, 2.0, 0.0]) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn refinement_diagonalizes_both_operators() {
        let ex = build_spin_example();
        for (k, y_k) in [6.0, 4.0, 2.0, 0.0].into_iter().enumerate() {
            let e = ex.refinement.vector(k);
            let y = ex.refiner.matrix() * &e;
            assert!((y - e.scale(y_k)).norm() < 1e-12);
            let z = g(y_k).unwrap();
            let sz = ex.observable.matrix() * &e;
            assert!((sz - e.scale(z)).norm() < 1e-12);
        }
        assert_eq!(g(1.0), None);
    }

    #[test]
    fn decomposition_matches_spectral_projectors() {
        let ex = build_spin_example();
        let spectral = spectral_projectors(&ex.observable, DEFAULT_DEGENERACY_TOL);
        assert_eq!(spectral.len(), 3);
        for j in 0..3 {
            let hit =
                (0..3).any(|k| max_abs_diff(spectral.projector(k), ex.decomposition.projector(j)) < 1e-12);
            assert!(hit, "block {j}");
        }
        assert_eq!(ex.decomposition.block_dims(), vec![1, 2, 1]);
        ex.refinement.block_assignment(&ex.decomposition).unwrap();
    }

    #[test]
    fn operator_refinement_spans_the_same_rays() {
        let ex = build_spin_example();
        let b = refinement_from_operator(&ex.decomposition, &ex.refiner).unwrap();
        for k in 0..4 {
            let v = b.vector(k);
            let best = (0..4)
                .map(|m| ex.refinement.vector(m).dotc(&v).norm())
                .fold(0.0, f64::max);
            assert!((best - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn reductions() {
        let ex = build_spin_example();
        let pi00 = DensityMatrix::pure(&basis_ket(0)).unwrap();
        let (vn, lu) = spin_reductions(&ex, &pi00).unwrap();
        assert!(max_abs_diff(vn.matrix(), pi00.matrix()) < 1e-12);
        assert!(max_abs_diff(lu.matrix(), pi00.matrix()) < 1e-12);

        let z01 = DensityMatrix::pure(&basis_ket(1)).unwrap();
        let (vn, lu) = spin_reductions(&ex, &z01).unwrap();
        assert!(max_abs_diff(lu.matrix(), z01.matrix()) < 1e-12);
        let middle = ex.decomposition.projector(1).scale(0.5);
        assert!(max_abs_diff(vn.matrix(), &middle) < 1e-12);
        assert!((vn.hermitian().trace() - 1.0).abs() < 1e-12 && (lu.hermitian().trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn embedding_round_trips() {
        let (u, v) = (0.3, c(0.2, -0.1));
        let rho = embed_qubit(u, v).unwrap();
        let (u2, v2) = project_qubit(rho.matrix()).unwrap();
        assert!((u - u2).abs() < 1e-14 && (v - v2).norm() < 1e-14);
        // ⟨z₀z₁|ρ|z₁z₀⟩ = (u − (1−u) + v − v*)/2
        let expected = real(u - 0.5) + (v - v.conj()).scale(0.5);
        assert!((rho.matrix()[(1, 2)] - expected).norm() < 1e-14);
        assert!(embed_qubit(0.5, real(0.6)).is_err());
        assert!(spin_delta_closed_forms(1.2, real(0.0)).is_err());
    }

    #[test]
    fn special_values() {
        let d = spin_delta_closed_forms(0.4, real(0.0)).unwrap();
        for x in [d.l1, d.c1, d.c2, d.robustness, d.weight] {
            assert!(x.abs() < 1e-15);
        }
        let d = spin_delta_closed_forms(0.5, real(0.5)).unwrap();
        assert!((d.l1 - 1.0).abs() < 1e-15);
        assert!((d.c1 - LN_2).abs() < 1e-12);
        assert!((d.c2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn closed_forms_match_the_pipeline() {
        let ex = build_spin_example();
        for i in 0..6 {
            let u = (i as f64 + 0.5) / 6.0;
            for k in 0..5 {
                let a = (u * (1.0 - u)).sqrt() * k as f64 / 4.0;
                for m in 0..3 {
                    let v = C64::from_polar(a, 2.0 * PI * m as f64 / 3.0);
                    let rho = embed_qubit(u, v).unwrap();
                    let d = spin_delta_closed_forms(u, v).unwrap();
                    let b = &ex.refinement;
                    let p = &ex.decomposition;
                    let l1 = delta_c(&rho, b, p, DeltaKind::L1).unwrap();
                    let c1 = delta_c(&rho, b, p, DeltaKind::Alpha(1.0)).unwrap();
                    let c2 = delta_c(&rho, b, p, DeltaKind::Alpha(2.0)).unwrap();
                    assert!((l1 - d.l1).abs() < 1e-9);
                    assert!((c1 - d.c1).abs() < 1e-9, "u {u} |v| {a}: {c1} vs {}", d.c1);
                    assert!((c2 - d.c2).abs() < 1e-9);
                    let w = delta_c(&rho, b, p, DeltaKind::Weight).unwrap();
                    assert!((w - d.weight).abs() < 1e-4, "u {u} |v| {a}: {w} vs {}", d.weight);
                }
            }
        }
    }

    #[test]
    fn robustness_is_twice_the_coherence() {
        let ex = build_spin_example();
        for (u, v) in [(0.3f64, c(0.2, 0.3)), (0.5, real(0.5)), (0.9, c(0.0, -0.1))] {
            let v = if v.norm() > (u * (1.0 - u)).sqrt() {
                v.scale((u * (1.0 - u)).sqrt() / v.norm())
            } else {
                v
            };
            let rho = embed_qubit(u, v).unwrap();
            let r = delta_c(&rho, &ex.refinement, &ex.decomposition, DeltaKind::Robustness).unwrap();
            assert!((r - 2.0 * v.norm()).abs() < 1e-4);
        }
    }

    proptest! {
        #[test]
        fn entropic_deltas_peak_on_pure_states(u in 0.01f64..0.99, t in 0.0f64..1.0, phi in 0.0f64..std::f64::consts::TAU) {
            let (_, vmax) = maximizing_qubit(u, phi);
            let top = spin_delta_closed_forms(u, vmax).unwrap();
            let mid = spin_delta_closed_forms(u, vmax.scale(t)).unwrap();
            prop_assert!(mid.c1 <= top.c1 + 1e-12);
            prop_assert!(mid.c2 <= top.c2 + 1e-12);
            prop_assert!(mid.l1 <= top.l1 + 1e-12);
        }

        #[test]
        fn deltas_are_monotone_in_the_coherence(u in 0.01f64..0.99, s in 0.0f64..1.0, t in 0.0f64..1.0) {
            let r = (u * (1.0 - u)).sqrt();
            let (lo, hi) = if s < t { (s, t) } else { (t, s) };
            let a = spin_delta_closed_forms(u, real(lo * r)).unwrap();
            let b = spin_delta_closed_forms(u, real(hi * r)).unwrap();
            prop_assert!(a.c1 <= b.c1 + 1e-12 && a.c2 <= b.c2 + 1e-12);
        }
    }
}
