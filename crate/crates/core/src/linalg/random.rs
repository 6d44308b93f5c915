//! Seeded random states, unitaries and channels.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{orthonormalize_columns, CMatrix, DensityMatrix, Hermitian, C64};
use crate::error::{Error, Result};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed for the `index`-th worker derived from a parent seed.
pub fn child_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index.wrapping_add(1)))
}

pub(crate) fn gaussian_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re * s, im * s)
    })
}

/// Random density matrix GG†/tr(GG†) with G a dim×rank complex Gaussian matrix.
pub fn random_density(dim: usize, rank: usize, seed: u64) -> DensityMatrix {
    try_random_density(dim, rank, seed).expect("1 <= rank <= dim")
}

pub fn try_random_density(dim: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    if dim == 0 || rank == 0 || rank > dim {
        return Err(Error::InvalidParameter(format!(
            "random_density needs 1 <= rank <= dim, got dim {dim}, rank {rank}"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let g = gaussian_matrix(dim, rank, &mut rng);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    Ok(DensityMatrix::from_trusted(m.unscale(tr)))
}

/// Haar-random unitary: Gram-Schmidt of a Gaussian matrix (positive real R diagonal).
pub fn random_unitary(dim: usize, seed: u64) -> CMatrix {
    let mut rng = rng_from_seed(seed);
    orthonormalize_columns(&gaussian_matrix(dim, dim, &mut rng))
}

/// Random Hermitian matrix (GUE-like).
pub fn random_hermitian(dim: usize, seed: u64) -> Hermitian {
    let mut rng = rng_from_seed(seed);
    let g = gaussian_matrix(dim, dim, &mut rng);
    Hermitian::from_trusted((&g + g.adjoint()).scale(0.5))
}

/// Random channel with `n_kraus` operators (dim_out × dim_in) cut from a random isometry.
pub fn random_cptp(dim_in: usize, dim_out: usize, n_kraus: usize, seed: u64) -> Result<Vec<CMatrix>> {
    if dim_in == 0 || dim_out == 0 || n_kraus == 0 {
        return Err(Error::InvalidParameter(
            "random_cptp needs positive dimensions and at least one Kraus operator".into(),
        ));
    }
    if n_kraus * dim_out < dim_in {
        return Err(Error::InvalidParameter(format!(
            "an isometry needs n_kraus * dim_out >= dim_in ({n_kraus} * {dim_out} < {dim_in})"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let v = orthonormalize_columns(&gaussian_matrix(n_kraus * dim_out, dim_in, &mut rng));
    Ok((0..n_kraus)
        .map(|i| v.rows(i * dim_out, dim_out).into_owned())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eig_hermitian, identity, max_abs_diff, unitarity_deviation};

    #[test]
    fn pure_when_rank_one() {
        let rho = random_density(2, 1, 42);
        let eig = eig_hermitian(rho.hermitian());
        assert!(eig.values[0].abs() < 1e-12);
        assert!((eig.values[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unitary_is_unitary() {
        for seed in 0..5 {
            assert!(unitarity_deviation(&random_unitary(3, seed)) <= 1e-12);
        }
    }

    #[test]
    fn cptp_is_complete() {
        let ks = random_cptp(3, 2, 4, 7).unwrap();
        let sum = ks
            .iter()
            .fold(CMatrix::zeros(3, 3), |acc, k| acc + k.adjoint() * k);
        assert!(max_abs_diff(&sum, &identity(3)) <= 1e-10);
        assert!(random_cptp(4, 1, 2, 0).is_err());
    }

    #[test]
    fn reproducible() {
        assert_eq!(random_density(3, 2, 5), random_density(3, 2, 5));
        assert_eq!(random_unitary(4, 8), random_unitary(4, 8));
        assert_ne!(child_seed(1, 0), child_seed(1, 1));
    }
}
