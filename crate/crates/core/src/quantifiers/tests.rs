use super::*;
use crate::linalg::{c, diag_real, identity, max_abs_diff, random_density, random_unitary, real, CVector};
use crate::measurement::{
    apply_channel, channel_from_projectors, is_invariant, refinement_basis, spectral_projectors, Frame,
    KrausChannel, DEFAULT_DEGENERACY_TOL,
};
use approx::assert_abs_diff_eq;
use proptest::prelude::*;

const LN2: f64 = std::f64::consts::LN_2;

fn plus() -> DensityMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    DensityMatrix::pure(&CVector::from_vec(vec![real(s), real(s)])).unwrap()
}

fn comp(d: usize) -> ReferenceFrame {
    ReferenceFrame::basis(OrthonormalBasis::computational(d))
}

/// Blocks of rank (1, 2, 1) in a random frame.
fn degenerate(seed: u64) -> ProjectorDecomposition {
    let u = random_unitary(4, seed);
    let x = Hermitian::new(&u * diag_real(&[-1.0, 0.0, 0.0, 1.0]) * u.adjoint()).unwrap();
    spectral_projectors(&x, DEFAULT_DEGENERACY_TOL)
}

fn qubit(u: f64, v: crate::linalg::C64) -> DensityMatrix {
    DensityMatrix::new(CMatrix::from_row_slice(
        2,
        2,
        &[real(u), v.conj(), v, real(1.0 - u)],
    ))
    .unwrap()
}

#[test]
fn closest_state_examples() {
    let p = ProjectorDecomposition::from_basis(&OrthonormalBasis::computational(2));
    let cis = closest_invariant_state(&plus(), &p, 2.0).unwrap();
    assert!(max_abs_diff(cis.printed.matrix(), &diag_real(&[0.5, 0.5])) < 1e-14);
    assert!(max_abs_diff(&cis.optimal, &diag_real(&[0.5, 0.5])) < 1e-14);

    let rho = random_density(3, 3, 1);
    let p3 = ProjectorDecomposition::from_basis(&OrthonormalBasis::computational(3));
    let cis = closest_invariant_state(&rho, &p3, 1.0).unwrap();
    let diag: Vec<f64> = (0..3).map(|k| rho[(k, k)].re).collect();
    assert!(max_abs_diff(cis.printed.matrix(), &diag_real(&diag)) < 1e-14);

    // fixed point: scalar blocks
    let p = degenerate(4);
    let fixed = DensityMatrix::new(p.assemble(&[
        identity(1).scale(0.1),
        identity(2).scale(0.3),
        identity(1).scale(0.3),
    ]))
    .unwrap();
    for alpha in [0.5, 1.0, 2.0] {
        let cis = closest_invariant_state(&fixed, &p, alpha).unwrap();
        assert!(max_abs_diff(&cis.optimal, &fixed) < 1e-12);
    }

    // degenerate blocks: the printed operator is not normalized
    let cis = closest_invariant_state(&DensityMatrix::maximally_mixed(4), &p, 2.0).unwrap();
    // b ∝ (1, √2, 1) on blocks of rank (1, 2, 1)
    assert_abs_diff_eq!(cis.printed_trace, 2f64.sqrt(), epsilon = 1e-12);
    assert_abs_diff_eq!(cis.normalized.hermitian().trace(), 1.0, epsilon = 1e-12);
    assert!(closest_invariant_state(&plus(), &p, 1.0).is_err());
}

#[test]
fn alpha_examples() {
    let r = coherence_alpha(&plus(), &comp(2), 2.0).unwrap();
    assert_abs_diff_eq!(r.as_f64(), 1.0, epsilon = 1e-14);
    assert!(is_invariant(
        r.witness.as_ref().unwrap(),
        Frame::Basis(&OrthonormalBasis::computational(2)),
        1e-12
    ));

    let inv = DensityMatrix::new(diag_real(&[0.2, 0.8])).unwrap();
    for a in [0.3, 0.5, 1.0, 1.5, 2.0] {
        assert_abs_diff_eq!(
            coherence_alpha(&inv, &comp(2), a).unwrap().as_f64(),
            0.0,
            epsilon = 1e-14
        );
    }
    assert!(coherence_alpha(&plus(), &comp(2), 0.0).is_err());
    assert!(coherence_alpha(&random_density(3, 3, 0), &comp(2), 2.0).is_err());
}

#[test]
fn degenerate_blocks_report_both_values() {
    let p = degenerate(7);
    let frame = ReferenceFrame::luders(p);
    let mixed = DensityMatrix::maximally_mixed(4);
    for alpha in [0.5, 2.0] {
        let r = coherence_alpha(&mixed, &frame, alpha).unwrap();
        assert_abs_diff_eq!(r.as_f64(), 0.0, epsilon = 1e-12);
        // the spectral-sum formula goes negative on this invariant state
        assert!(r.printed.unwrap() < -1e-3);
    }
    let r = coherence_relent(&mixed, &frame).unwrap();
    assert_abs_diff_eq!(r.as_f64(), 0.0, epsilon = 1e-12);
    // H(1/4, 1/2, 1/4) − ln 4
    assert_abs_diff_eq!(r.printed.unwrap(), 1.5 * LN2 - 2.0 * LN2, epsilon = 1e-12);
}

#[test]
fn relent_examples() {
    assert_abs_diff_eq!(
        coherence_relent(&plus(), &comp(2)).unwrap().as_f64(),
        LN2,
        epsilon = 1e-12
    );
    let b = ReferenceFrame::basis(OrthonormalBasis::new(random_unitary(3, 2)).unwrap());
    assert_abs_diff_eq!(
        coherence_relent(&DensityMatrix::maximally_mixed(3), &b)
            .unwrap()
            .as_f64(),
        0.0,
        epsilon = 1e-12
    );
}

#[test]
fn l1_examples() {
    let diag = DensityMatrix::new(diag_real(&[0.1, 0.2, 0.7])).unwrap();
    assert_eq!(coherence_l1(&diag, &comp(3)).unwrap().as_f64(), 0.0);
    let v = c(0.12, -0.2);
    assert_abs_diff_eq!(
        coherence_l1(&qubit(0.4, v), &comp(2)).unwrap().as_f64(),
        2.0 * v.norm(),
        epsilon = 1e-14
    );

    let p = degenerate(1);
    let rho = random_density(4, 4, 3);
    assert!(matches!(
        coherence_l1(&rho, &ReferenceFrame::luders(p.clone())),
        Err(Error::MissingRepresentation)
    ));
    let rep = refinement_basis(&p, None).unwrap();
    let frame = ReferenceFrame::luders_in(p.clone(), rep.clone()).unwrap();
    let got = coherence_l1(&rho, &frame).unwrap().as_f64();
    // Σ_{k≠j} ‖Π_k ρ Π_j‖_ℓ1 in the representation basis
    let r = rep.represent(rho.matrix());
    let off = rep.represent(&(rho.matrix() - p.pinch(rho.matrix())));
    assert_abs_diff_eq!(got, crate::linalg::ell1_norm(&off), epsilon = 1e-12);
    assert!(got < crate::linalg::ell1_norm(&r));
    assert!(ReferenceFrame::luders_in(p, OrthonormalBasis::computational(4)).is_err());
}

#[test]
fn povm_consistency() {
    let u = random_unitary(3, 5);
    let b = OrthonormalBasis::new(u).unwrap();
    let rho = random_density(3, 3, 6);
    let povm = RankOnePovm::from_basis(&b);
    for alpha in [0.5, 1.0, 2.0] {
        let a = povm_coherence(&rho, &povm, alpha).unwrap().as_f64();
        let e = coherence_alpha(&rho, &ReferenceFrame::basis(b.clone()), alpha)
            .unwrap()
            .as_f64();
        assert_abs_diff_eq!(a, e, epsilon = 1e-12);
    }

    // a qubit POVM with four outcomes: rows of a random 4×4 unitary
    let w = random_unitary(4, 8);
    let povm = RankOnePovm::from_matrix(w.rows(0, 2).into_owned()).unwrap();
    let frame = ReferenceFrame::povm(povm.clone()).unwrap();
    let nb = match &frame {
        ReferenceFrame::Povm { naimark, .. } => naimark.clone(),
        _ => unreachable!(),
    };
    let rho = random_density(2, 2, 9);
    let big = crate::linalg::direct_sum_embed(&rho, 2);
    for alpha in [0.3, 0.5, 1.0, 1.5, 2.0] {
        let small = povm_coherence(&rho, &povm, alpha).unwrap();
        let dilated = coherence_alpha(&big, &ReferenceFrame::basis(nb.basis().clone()), alpha).unwrap();
        assert_abs_diff_eq!(small.as_f64(), dilated.as_f64(), epsilon = 1e-10);
        let via_frame = coherence_alpha(&rho, &frame, alpha).unwrap();
        assert_abs_diff_eq!(small.as_f64(), via_frame.as_f64(), epsilon = 1e-12);
    }
    let l1 = coherence_l1(&rho, &frame).unwrap().as_f64();
    let l1_big = coherence_l1(&big, &ReferenceFrame::basis(nb.basis().clone()))
        .unwrap()
        .as_f64();
    assert_abs_diff_eq!(l1, l1_big, epsilon = 1e-12);
}

#[test]
fn robustness_and_weight_on_qubits() {
    let cfg = SolverConfig::default();
    let v = c(0.1, 0.15);
    let rho = qubit(0.35, v);
    let r = robustness(&rho, &comp(2), &cfg).unwrap();
    assert_abs_diff_eq!(r.as_f64(), 2.0 * v.norm(), epsilon = 1e-8);
    assert!(r.residual.unwrap() <= 1e-10);
    let w = coherence_weight(&rho, &comp(2), &cfg).unwrap();
    assert_abs_diff_eq!(w.as_f64(), 2.0 * v.norm(), epsilon = 1e-8);

    let inv = DensityMatrix::new(diag_real(&[0.3, 0.7])).unwrap();
    assert!(robustness(&inv, &comp(2), &cfg).unwrap().as_f64() < 1e-9);
    assert!(coherence_weight(&inv, &comp(2), &cfg).unwrap().as_f64() < 1e-9);

    let w = coherence_weight(&plus(), &comp(2), &cfg).unwrap();
    assert_eq!(w.as_f64(), 1.0);
    let r = robustness(&plus(), &comp(2), &cfg).unwrap();
    assert_abs_diff_eq!(r.as_f64(), 1.0, epsilon = 1e-8);
}

#[test]
fn robustness_and_weight_are_zero_on_block_states() {
    let p = degenerate(11);
    let frame = ReferenceFrame::luders(p.clone());
    let rho = luders_apply_for_test(&p, &random_density(4, 4, 12));
    let cfg = SolverConfig::default();
    assert!(robustness(&rho, &frame, &cfg).unwrap().as_f64() < 1e-9);
    assert!(coherence_weight(&rho, &frame, &cfg).unwrap().as_f64() < 1e-9);
    // rank-deficient invariant state
    let rho = luders_apply_for_test(&p, &random_density(4, 1, 13));
    assert!(coherence_weight(&rho, &frame, &cfg).unwrap().as_f64() < 1e-9);
}

fn luders_apply_for_test(p: &ProjectorDecomposition, rho: &DensityMatrix) -> DensityMatrix {
    crate::measurement::luders_apply(p, rho).unwrap()
}

#[test]
fn theorem2_examples() {
    let p = degenerate(21);
    let rho = random_density(4, 4, 22);
    let id = KrausChannel::identity(4);
    for alpha in [0.5, 1.0, 2.0] {
        let rep = theorem2_check(&rho, &id, &p, alpha).unwrap();
        assert_abs_diff_eq!(rep.lhs, rep.rhs, epsilon = 1e-12);
    }
    let rep = theorem2_check(&rho, &channel_from_projectors(&p), &p, 1.0).unwrap();
    assert!(rep.lhs.abs() < 1e-12 && rep.rhs > 0.0);
    assert_abs_diff_eq!(rep.weights.iter().sum::<f64>(), 1.0, epsilon = 1e-12);

    for seed in 0..5 {
        let ch = random_block_preserving_channel(&p, 3, seed).unwrap();
        for alpha in [0.5, 1.0, 2.0] {
            let rep = theorem2_check(&rho, &ch, &p, alpha).unwrap();
            assert!(rep.lhs <= rep.rhs + 1e-8, "seed {seed} alpha {alpha}: {rep:?}");
        }
    }
    assert!(theorem2_check(&rho, &id, &p, 3.0).is_err());
}

#[test]
fn theorem2_refuses_with_witness() {
    let p = degenerate(31);
    let u = random_unitary(4, 32);
    let ch = KrausChannel::new(vec![u]).unwrap();
    match theorem2_check(&random_density(4, 4, 1), &ch, &p, 0.5) {
        Err(Error::NotBlockPreserving {
            witness, deviation, ..
        }) => {
            assert!(deviation > 1e-10);
            assert!(is_invariant(&witness, Frame::Projectors(&p), 1e-12));
        }
        other => panic!("expected refusal, got {other:?}"),
    }
}

#[test]
fn delta_c_checks_refinement() {
    let p = degenerate(41);
    let rho = random_density(4, 4, 42);
    assert!(matches!(
        delta_c(&rho, &OrthonormalBasis::computational(4), &p, DeltaKind::L1),
        Err(Error::NotRefinement(_))
    ));
    let b = refinement_basis(&p, None).unwrap();
    let diag = DensityMatrix::from_trusted(b.dephase(rho.matrix()));
    for kind in [
        DeltaKind::L1,
        DeltaKind::Alpha(0.5),
        DeltaKind::Alpha(1.0),
        DeltaKind::Robustness,
        DeltaKind::Weight,
    ] {
        assert!(delta_c(&diag, &b, &p, kind).unwrap().abs() < 1e-9, "{kind:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn hierarchy_on_degenerate_frames(seed in 0u64..10_000) {
        let p = degenerate(seed);
        let b = refinement_basis(&p, Some(&[identity(1), random_unitary(2, seed + 1), identity(1)])).unwrap();
        let rho = random_density(4, 4, seed + 2);
        for kind in [DeltaKind::L1, DeltaKind::Alpha(0.5), DeltaKind::Alpha(1.0), DeltaKind::Alpha(2.0), DeltaKind::Robustness, DeltaKind::Weight] {
            let d = delta_c(&rho, &b, &p, kind).unwrap();
            prop_assert!(d >= -1e-9, "{:?}: {}", kind, d);
        }
    }

    #[test]
    fn convexity(seed in 0u64..10_000, ai in 0usize..4) {
        let alpha = [0.5, 1.0, 1.5, 2.0][ai];
        let frame = ReferenceFrame::luders(degenerate(seed));
        let states: Vec<DensityMatrix> = (0..3).map(|k| random_density(4, 1 + k, seed + 10 + k as u64)).collect();
        let w = [0.2, 0.5, 0.3];
        let mix = DensityMatrix::mixture(&w, &states).unwrap();
        let lhs = coherence_alpha(&mix, &frame, alpha).unwrap().as_f64();
        let rhs: f64 = states.iter().zip(w).map(|(s, q)| q * coherence_alpha(s, &frame, alpha).unwrap().as_f64()).sum();
        prop_assert!(lhs <= rhs + 1e-8);
    }

    #[test]
    fn monotone_under_block_preserving_channels(seed in 0u64..10_000, ai in 0usize..3) {
        let alpha = [0.5, 1.0, 2.0][ai];
        let p = degenerate(seed);
        let frame = ReferenceFrame::luders(p.clone());
        let ch = random_block_preserving_channel(&p, 2, seed).unwrap();
        let rho = random_density(4, 4, seed + 5);
        let out = apply_channel(&ch, &rho).unwrap();
        let before = coherence_alpha(&rho, &frame, alpha).unwrap().as_f64();
        let after = coherence_alpha(&out, &frame, alpha).unwrap().as_f64();
        prop_assert!(after <= before + 1e-8);
    }
}
