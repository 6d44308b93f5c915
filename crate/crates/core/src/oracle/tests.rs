use super::*;
use crate::linalg::{diag_real, random_unitary, real, CVector, Hermitian};
use crate::measurement::{spectral_projectors, DEFAULT_DEGENERACY_TOL};
use crate::quantifiers::{coherence_alpha, coherence_l1, scalar_block_minimum, ReferenceFrame};
use proptest::prelude::*;

fn computational(d: usize) -> ProjectorDecomposition {
    ProjectorDecomposition::from_basis(&OrthonormalBasis::computational(d))
}

fn degenerate(seed: u64) -> (ProjectorDecomposition, OrthonormalBasis) {
    let u = random_unitary(4, seed);
    let x = Hermitian::new(&u * diag_real(&[-1.0, 0.0, 0.0, 1.0]) * u.adjoint()).unwrap();
    let p = spectral_projectors(&x, DEFAULT_DEGENERACY_TOL);
    let b = crate::measurement::refinement_basis(&p, None).unwrap();
    (p, b)
}

fn fast() -> OracleConfig {
    OracleConfig {
        multistarts: 6,
        ..OracleConfig::default()
    }
}

#[test]
fn plus_state_relative_entropy() {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let plus = DensityMatrix::pure(&CVector::from_vec(vec![real(s), real(s)])).unwrap();
    let r = minimize_over_scalar_blocks(&plus, &computational(2), 1.0, &OracleConfig::default()).unwrap();
    assert!((r.min_value - std::f64::consts::LN_2).abs() < 1e-9);
    assert!((r.argmin.matrix()[(0, 0)].re - 0.5).abs() < 1e-6);
    assert!(r.residual < 1e-9);
}

#[test]
fn feasible_state_has_zero_minimum() {
    let (p, _) = degenerate(3);
    let delta = p.assemble(&[
        CMatrix::identity(1, 1).scale(0.1),
        CMatrix::identity(2, 2).scale(0.3),
        CMatrix::identity(1, 1).scale(0.3),
    ]);
    let rho = DensityMatrix::new(delta.clone()).unwrap();
    for alpha in [0.5, 1.0, 2.0] {
        let r = minimize_over_scalar_blocks(&rho, &p, alpha, &OracleConfig::default()).unwrap();
        assert!(r.min_value.abs() < 1e-9, "alpha {alpha}: {}", r.min_value);
        assert!(crate::linalg::max_abs_diff(r.argmin.matrix(), &delta) < 1e-5);
    }
}

#[test]
fn rank_one_blocks_match_closed_form() {
    for seed in 0..12 {
        let d = 2 + (seed % 2) as usize;
        let rho = random_density(d, 1 + (seed % 3) as usize % d, 40 + seed);
        let u = random_unitary(d, 90 + seed);
        let b = OrthonormalBasis::new(u).unwrap();
        let p = ProjectorDecomposition::from_basis(&b);
        for alpha in [0.5, 0.9, 1.0, 1.5, 2.0] {
            let closed = coherence_alpha(&rho, &ReferenceFrame::basis(b.clone()), alpha)
                .unwrap()
                .as_f64();
            let r = minimize_over_scalar_blocks(&rho, &p, alpha, &OracleConfig::default()).unwrap();
            assert!(
                (r.min_value - closed).abs() < 1e-6,
                "seed {seed} alpha {alpha}: {} vs {closed}",
                r.min_value
            );
        }
    }
}

#[test]
fn full_search_agrees_on_rank_one_blocks() {
    let rho = random_density(3, 3, 5);
    let p = computational(3);
    for alpha in [0.5, 2.0] {
        let s = minimize_over_scalar_blocks(&rho, &p, alpha, &fast()).unwrap();
        let f = minimize_over_block_diagonal(&rho, &p, &BlockObjective::Divergence(alpha), &fast()).unwrap();
        assert!((s.min_value - f.min_value).abs() < 1e-8);
    }
}

#[test]
fn l1_minimum_is_off_block_sum() {
    let (p, b) = degenerate(8);
    let rho = random_density(4, 2, 12);
    let frame = ReferenceFrame::luders_in(p.clone(), b.clone()).unwrap();
    let closed = coherence_l1(&rho, &frame).unwrap().as_f64();
    let r = minimize_over_block_diagonal(&rho, &p, &BlockObjective::L1(b), &fast()).unwrap();
    assert!(r.min_value >= closed - 1e-9);
    assert!(r.min_value - closed < 1e-5, "{} vs {closed}", r.min_value);
}

#[test]
fn degenerate_blocks_reach_the_pinched_minimum() {
    let (p, _) = degenerate(21);
    let rho = random_density(4, 4, 22);
    let frame = ReferenceFrame::luders(p.clone());
    for alpha in [0.5, 1.0, 2.0] {
        let q = coherence_alpha(&rho, &frame, alpha).unwrap();
        let scalar = minimize_over_scalar_blocks(&rho, &p, alpha, &fast()).unwrap();
        let full =
            minimize_over_block_diagonal(&rho, &p, &BlockObjective::Divergence(alpha), &fast()).unwrap();
        assert!(full.min_value <= scalar.min_value + 1e-9);
        assert!(full.min_value >= q.as_f64() - 1e-9);
        assert!(
            full.min_value - q.as_f64() < 1e-6,
            "alpha {alpha}: {} vs {}",
            full.min_value,
            q.as_f64()
        );
        // the spectral-sum value is not a minimum over the scalar blocks either
        assert!(scalar.min_value >= q.as_f64() - 1e-9);
    }
}

#[test]
fn scalar_oracle_matches_the_constrained_closed_form() {
    for seed in 0..8 {
        let (p, _) = degenerate(100 + seed);
        let rho = random_density(4, 1 + (seed % 4) as usize, 200 + seed);
        for alpha in [0.5, 0.9, 1.0, 1.5, 2.0] {
            let closed = scalar_block_minimum(&rho, &p, alpha).unwrap();
            let r = minimize_over_scalar_blocks(&rho, &p, alpha, &fast()).unwrap();
            assert!(
                (r.min_value - closed).abs() < 1e-6,
                "seed {seed} alpha {alpha}: {} vs {closed}",
                r.min_value
            );
        }
    }
}

#[test]
fn lattice_sizes() {
    assert_eq!(simplex_lattice(3, 4).len(), 15);
    assert_eq!(lattice_density(4, 64), 64);
    assert!(binomial(lattice_density(6, 64) + 5, 5) <= binomial(67, 3));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn oracle_never_beats_the_true_minimum(seed in 0u64..10_000, ai in 0usize..3) {
        let alpha = [0.5, 1.0, 2.0][ai];
        let (p, _) = degenerate(seed);
        let rho = random_density(4, 1 + (seed % 4) as usize, seed + 1);
        let exact = coherence_alpha(&rho, &ReferenceFrame::luders(p.clone()), alpha).unwrap().as_f64();
        let r = minimize_over_scalar_blocks(&rho, &p, alpha, &fast()).unwrap();
        prop_assert!(r.min_value >= exact - 1e-9);
    }

    #[test]
    fn finer_lattice_never_worse(seed in 0u64..10_000) {
        let rho = random_density(3, 3, seed);
        let p = computational(3);
        let coarse = OracleConfig { grid_density: 16, ..fast() };
        let fine = OracleConfig { grid_density: 32, ..fast() };
        let a = minimize_over_scalar_blocks(&rho, &p, 1.5, &coarse).unwrap().min_value;
        let b = minimize_over_scalar_blocks(&rho, &p, 1.5, &fine).unwrap().min_value;
        prop_assert!(b <= a + 1e-6);
    }
}
