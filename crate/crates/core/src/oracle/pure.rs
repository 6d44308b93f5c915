//! Extrema of a function of a pure-state parameterization (ϑ, φ) ∈ [0, π/2] × [0, 2π).

use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;
use serde::Serialize;

use super::nelder_mead::{golden_section, minimize};
use super::OracleConfig;

/// Grid over ϑ ∈ [0, π/2] and φ ∈ [0, 2π], both endpoints included; φ is periodic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PureStateDomain {
    pub n_vartheta: usize,
    pub n_varphi: usize,
}

impl Default for PureStateDomain {
    fn default() -> Self {
        Self {
            n_vartheta: 721,
            n_varphi: 1441,
        }
    }
}

impl PureStateDomain {
    fn vartheta(&self, i: usize) -> f64 {
        FRAC_PI_2 * i as f64 / (self.n_vartheta - 1) as f64
    }

    /// Distinct φ samples (the 2π endpoint repeats φ = 0).
    fn n_phi_distinct(&self) -> usize {
        self.n_varphi - 1
    }

    fn varphi(&self, k: usize) -> f64 {
        2.0 * PI * k as f64 / self.n_phi_distinct() as f64
    }

    fn steps(&self) -> (f64, f64) {
        (
            FRAC_PI_2 / (self.n_vartheta - 1) as f64,
            2.0 * PI / self.n_phi_distinct() as f64,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Extremum {
    pub value: f64,
    pub vartheta: f64,
    pub varphi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PureStateExtrema {
    pub min: Extremum,
    pub max: Extremum,
}

fn wrap_phi(phi: f64) -> f64 {
    let w = phi.rem_euclid(2.0 * PI);
    if w >= 2.0 * PI {
        0.0
    } else {
        w
    }
}

/// Dense grid scan, then golden-section passes per coordinate and a Nelder-Mead polish
/// from the best `cfg.multistarts` grid-local extrema of each kind.
pub fn minimize_over_pure_states<F>(
    objective: F,
    domain: &PureStateDomain,
    cfg: &OracleConfig,
) -> PureStateExtrema
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    let domain = PureStateDomain {
        n_vartheta: domain.n_vartheta.max(3),
        n_varphi: domain.n_varphi.max(4),
    };
    let nt = domain.n_vartheta;
    let np = domain.n_phi_distinct();
    let grid: Vec<f64> = (0..nt)
        .into_par_iter()
        .flat_map_iter(|i| {
            let th = domain.vartheta(i);
            (0..np).map(move |k| (th, domain.varphi(k)))
        })
        .map(|(th, ph)| objective(th, ph))
        .collect();
    let min = extremum(&objective, &grid, &domain, cfg, 1.0);
    let max = extremum(&objective, &grid, &domain, cfg, -1.0);
    PureStateExtrema {
        min,
        max: Extremum {
            value: -max.value,
            ..max
        },
    }
}

/// Minimum of sign·objective.
fn extremum<F>(
    objective: &F,
    grid: &[f64],
    domain: &PureStateDomain,
    cfg: &OracleConfig,
    sign: f64,
) -> Extremum
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    let nt = domain.n_vartheta;
    let np = domain.n_phi_distinct();
    let at = |i: usize, k: usize| sign * grid[i * np + k];
    let mut candidates: Vec<(f64, usize, usize)> = (0..nt)
        .into_par_iter()
        .flat_map_iter(|i| {
            (0..np).filter_map(move |k| {
                let v = at(i, k);
                let lower = i.saturating_sub(1);
                let upper = (i + 1).min(nt - 1);
                for a in lower..=upper {
                    for dk in [np - 1, 0, 1] {
                        let b = (k + dk) % np;
                        if (a != i || b != k) && at(a, b) < v {
                            return None;
                        }
                    }
                }
                Some((v, i, k))
            })
        })
        .collect();
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    candidates.truncate(cfg.multistarts.max(1));

    let (ht, hp) = domain.steps();
    let f = |th: f64, ph: f64| sign * objective(th.clamp(0.0, FRAC_PI_2), wrap_phi(ph));
    candidates
        .par_iter()
        .map(|&(v, i, k)| {
            let (mut th, mut ph, mut fv) = (domain.vartheta(i), domain.varphi(k), v);
            for _ in 0..4 {
                let (t, ft) =
                    golden_section(&|t| f(t, ph), (th - ht).max(0.0), (th + ht).min(FRAC_PI_2), 1e-13);
                if ft <= fv {
                    th = t;
                    fv = ft;
                }
                let (q, fq) = golden_section(&|q| f(th, q), ph - hp, ph + hp, 1e-13);
                if fq <= fv {
                    ph = q;
                    fv = fq;
                }
            }
            let polished = minimize(
                &|x: &[f64]| f(x[0], x[1]),
                &[th, ph],
                &[ht / 4.0, hp / 4.0],
                cfg.refine_iters * 2,
                6,
            );
            if polished.f <= fv {
                th = polished.x[0];
                ph = polished.x[1];
                fv = polished.f;
            }
            Extremum {
                value: fv,
                vartheta: th.clamp(0.0, FRAC_PI_2),
                varphi: wrap_phi(ph),
            }
        })
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .expect("a grid always has a local extremum")
}
