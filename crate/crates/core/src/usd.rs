//! Unambiguous discrimination of |θ±⟩ = (cos θ, ±sin θ) with η = ⟨θ+|θ−⟩ = cos 2θ.
//!
//! The measurement is the rank-one POVM |μ±⟩ = (sin θ, ±cos θ)/√(1+η),
//! |μ?⟩ = √(2η/(1+η)) (1, 0), applied to |ψ⟩ = (cos ϑ, e^{iφ} sin ϑ). Coherence of the
//! embedded pure state with respect to the completed basis depends on the outcome
//! distribution (p₊, p₋, p?) only.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::Serialize;

use crate::divergence::{check_alpha, is_alpha_one};
use crate::error::{Error, Result};
use crate::linalg::{c, real, shannon_entropy, CVector};
use crate::measurement::{naimark_completion, NaimarkBasis, RankOnePovm};
use crate::oracle::{minimize_over_pure_states, Extremum, OracleConfig, PureStateDomain};

/// Discrimination scenario, parameterized by the overlap η ∈ (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UsdScenario {
    eta: f64,
    /// Phase of the ancilla components of the completed basis.
    gamma: f64,
}

impl UsdScenario {
    pub fn new(eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "eta must lie in (0, 1) for distinct, non-orthogonal states, got {eta}"
            )));
        }
        Ok(Self { eta, gamma: 0.0 })
    }

    pub fn with_gamma(self, gamma: f64) -> Self {
        Self { gamma, ..self }
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// θ = arccos(η)/2 ∈ (0, π/4).
    pub fn theta(&self) -> f64 {
        self.eta.acos() / 2.0
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// |θ±⟩.
    pub fn state(&self, sign: f64) -> CVector {
        let th = self.theta();
        CVector::from_vec(vec![real(th.cos()), real(sign * th.sin())])
    }

    /// The POVM vectors in outcome order (+, −, ?).
    pub fn povm_vectors(&self) -> [CVector; 3] {
        let th = self.theta();
        let k = 1.0 / (1.0 + self.eta).sqrt();
        [
            CVector::from_vec(vec![real(k * th.sin()), real(k * th.cos())]),
            CVector::from_vec(vec![real(k * th.sin()), real(-k * th.cos())]),
            CVector::from_vec(vec![real((2.0 * self.eta / (1.0 + self.eta)).sqrt()), real(0.0)]),
        ]
    }
}

/// POVM, completed basis and the two states to discriminate.
#[derive(Debug, Clone)]
pub struct UsdSetup {
    pub povm: RankOnePovm,
    pub naimark: NaimarkBasis,
    pub theta_plus: CVector,
    pub theta_minus: CVector,
}

pub fn usd_build(s: &UsdScenario) -> Result<UsdSetup> {
    let povm = RankOnePovm::new(&s.povm_vectors())?;
    let naimark = naimark_completion(&povm)?.with_phase(s.gamma)?;
    Ok(UsdSetup {
        povm,
        naimark,
        theta_plus: s.state(1.0),
        theta_minus: s.state(-1.0),
    })
}

/// Outcome probabilities of a pure input.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UsdProbabilities {
    pub p_plus: f64,
    pub p_minus: f64,
    pub p_inconclusive: f64,
}

impl UsdProbabilities {
    pub fn as_array(&self) -> [f64; 3] {
        [self.p_plus, self.p_minus, self.p_inconclusive]
    }

    /// Value of y²/a² + (z − b)²/b² in the coordinates y = (p₋ − p₊)/√2, z = p?;
    /// at most 1 for every pure input.
    pub fn ellipse_level(&self, eta: f64) -> f64 {
        let a2 = (1.0 - eta) / (2.0 * (1.0 + eta));
        let b = eta / (1.0 + eta);
        let y = (self.p_minus - self.p_plus) / std::f64::consts::SQRT_2;
        y * y / a2 + (self.p_inconclusive - b).powi(2) / (b * b)
    }
}

/// |ψ⟩ = (cos ϑ, e^{iφ} sin ϑ).
pub fn pure_input(vartheta: f64, varphi: f64) -> CVector {
    CVector::from_vec(vec![
        real(vartheta.cos()),
        c(varphi.cos(), varphi.sin()) * vartheta.sin(),
    ])
}

/// Closed-form outcome probabilities.
pub fn usd_probabilities(s: &UsdScenario, vartheta: f64, varphi: f64) -> UsdProbabilities {
    let th = s.theta();
    let eta = s.eta;
    let base = (th + vartheta).sin().powi(2);
    let cross = (2.0 * th).sin() * (2.0 * vartheta).sin();
    let half = varphi / 2.0;
    UsdProbabilities {
        p_plus: (base - cross * half.sin().powi(2)) / (1.0 + eta),
        p_minus: (base - cross * half.cos().powi(2)) / (1.0 + eta),
        p_inconclusive: 2.0 * eta * vartheta.cos().powi(2) / (1.0 + eta),
    }
}

/// Outcome probabilities |⟨μ_j|ψ⟩|² computed from the POVM vectors.
pub fn usd_probabilities_direct(s: &UsdScenario, vartheta: f64, varphi: f64) -> UsdProbabilities {
    let psi = pure_input(vartheta, varphi);
    let p: Vec<f64> = s.povm_vectors().iter().map(|m| m.dotc(&psi).norm_sqr()).collect();
    UsdProbabilities {
        p_plus: p[0],
        p_minus: p[1],
        p_inconclusive: p[2],
    }
}

/// Pure-state α-quantifier of an outcome distribution: the Shannon entropy at α = 1,
/// otherwise (‖p‖_{1/α} − 1)/(α − 1).
pub fn quantifier_from_probabilities(p: &[f64], alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(quantifier_unchecked(p, alpha))
}

fn quantifier_unchecked(p: &[f64], alpha: f64) -> f64 {
    if is_alpha_one(alpha) {
        return shannon_entropy(p);
    }
    let s: f64 = p.iter().map(|x| x.max(0.0).powf(1.0 / alpha)).sum();
    (s.powf(alpha) - 1.0) / (alpha - 1.0)
}

pub fn usd_quantifier_pure(s: &UsdScenario, vartheta: f64, varphi: f64, alpha: f64) -> Result<f64> {
    quantifier_from_probabilities(&usd_probabilities(s, vartheta, varphi).as_array(), alpha)
}

/// Value of the quantifier at |θ±⟩, whose outcome distribution is (1 − η, 0, η).
pub fn usd_at_theta_states(eta: f64, alpha: f64) -> Result<f64> {
    UsdScenario::new(eta)?;
    quantifier_from_probabilities(&[1.0 - eta, 0.0, eta], alpha)
}

/// Analytic maximum and a maximizing (ϑ, φ).
///
/// For η ≥ 1/5 the uniform distribution is reachable at cos²ϑ = (1+η)/(6η), φ = ±π/2,
/// giving (3^{α−1} − 1)/(α − 1); below 1/5 the maximum sits at ϑ = 0.
pub fn usd_max_analytic(eta: f64, alpha: f64) -> Result<Extremum> {
    check_alpha(alpha)?;
    UsdScenario::new(eta)?;
    if eta >= 0.2 {
        let value = quantifier_unchecked(&[1.0 / 3.0; 3], alpha);
        Ok(Extremum {
            value,
            vartheta: ((1.0 + eta) / (6.0 * eta)).sqrt().acos(),
            varphi: FRAC_PI_2,
        })
    } else {
        let pp = (1.0 - eta) / (2.0 * (1.0 + eta));
        Ok(Extremum {
            value: quantifier_unchecked(&[pp, pp, 2.0 * eta / (1.0 + eta)], alpha),
            vartheta: 0.0,
            varphi: 0.0,
        })
    }
}

/// Analytic minimum for α ∈ {1/2, 2}.
///
/// α = 1/2 maximizes p₊² + p₋² + p?² over the elliptic boundary: the vertex p? = η/(1+2η)
/// for η ≤ 1/2 and the end point p? = 2η/(1+η) beyond. α = 2 is f(z)² − 1 minimized at
/// z = η, i.e. 2√(η(1−η)), attained at |θ±⟩.
pub fn usd_min_analytic(eta: f64, alpha: f64) -> Result<f64> {
    UsdScenario::new(eta)?;
    if alpha == 0.5 {
        let s = if eta <= 0.5 {
            1.0 / (1.0 + 2.0 * eta)
        } else {
            1.0 / (1.0 + 2.0 * eta)
                + (4.0 * eta * eta - 1.0) * (1.0 + 3.0 * eta).powi(2)
                    / (2.0 * (1.0 + eta).powi(2) * (1.0 + 2.0 * eta).powi(2))
        };
        Ok(2.0 - 2.0 * s.sqrt())
    } else if alpha == 2.0 {
        Ok(2.0 * (eta * (1.0 - eta)).sqrt())
    } else {
        Err(Error::InvalidParameter(format!(
            "closed-form minima exist for alpha = 1/2 and alpha = 2 only, got {alpha}"
        )))
    }
}

/// √(1−η) + √η: the minimum of f(z) = √p₊ + √p₋ + √p?, which differs from the α = 2
/// quantifier f² − 1. Reported next to [`usd_min_analytic`] as a known discrepancy.
pub fn usd_min2_sum_of_roots(eta: f64) -> Result<f64> {
    UsdScenario::new(eta)?;
    Ok((1.0 - eta).sqrt() + eta.sqrt())
}

/// Grid settings for numeric extrema.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct UsdGridConfig {
    pub domain: PureStateDomain,
    pub oracle: OracleConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UsdExtrema {
    pub min: Extremum,
    pub max: Extremum,
    /// Largest excess of a visited outcome distribution over the ellipse (or off the simplex).
    pub ellipse_violation: f64,
}

/// Numeric extrema over (ϑ, φ); every visited distribution is checked against the ellipse.
pub fn usd_extrema_numeric(eta: f64, alpha: f64, cfg: &UsdGridConfig) -> Result<UsdExtrema> {
    check_alpha(alpha)?;
    let s = UsdScenario::new(eta)?;
    let worst = AtomicU64::new(0f64.to_bits());
    let objective = |th: f64, ph: f64| {
        let p = usd_probabilities(&s, th, ph);
        let excess = (p.ellipse_level(eta) - 1.0)
            .max(0.0)
            .max((p.as_array().iter().sum::<f64>() - 1.0).abs())
            .max(-p.p_plus.min(p.p_minus).min(p.p_inconclusive));
        // non-negative floats order like their bit patterns
        worst.fetch_max(excess.to_bits(), Ordering::Relaxed);
        quantifier_unchecked(&p.as_array(), alpha)
    };
    let r = minimize_over_pure_states(objective, &cfg.domain, &cfg.oracle);
    Ok(UsdExtrema {
        min: r.min,
        max: r.max,
        ellipse_violation: f64::from_bits(worst.load(Ordering::Relaxed)),
    })
}

/// One (η, α) cell of the extrema curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRecord {
    pub eta: f64,
    pub alpha: f64,
    pub max_value: f64,
    pub min_value: f64,
    pub value_at_theta_states: f64,
    pub max_arg: (f64, f64),
    pub min_arg: (f64, f64),
    pub ellipse_violation: f64,
}

/// Extrema and the |θ±⟩ value for every (η, α), sorted by (η, α).
pub fn usd_sweep(alphas: &[f64], etas: &[f64], cfg: &UsdGridConfig) -> Result<Vec<SweepRecord>> {
    if alphas.is_empty() || etas.is_empty() {
        return Err(Error::InvalidParameter(
            "alpha and eta grids must be non-empty".into(),
        ));
    }
    for &a in alphas {
        check_alpha(a)?;
    }
    for &e in etas {
        UsdScenario::new(e)?;
    }
    let cells: Vec<(f64, f64)> = etas
        .iter()
        .flat_map(|&e| alphas.iter().map(move |&a| (e, a)))
        .collect();
    let mut records = cells
        .into_par_iter()
        .map(|(eta, alpha)| {
            let ext = usd_extrema_numeric(eta, alpha, cfg)?;
            Ok(SweepRecord {
                eta,
                alpha,
                max_value: ext.max.value,
                min_value: ext.min.value,
                value_at_theta_states: usd_at_theta_states(eta, alpha)?,
                max_arg: (ext.max.vartheta, ext.max.varphi),
                min_arg: (ext.min.vartheta, ext.min.varphi),
                ellipse_violation: ext.ellipse_violation,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    records.sort_by(|a, b| a.eta.total_cmp(&b.eta).then(a.alpha.total_cmp(&b.alpha)));
    Ok(records)
}

/// N interior points k/(N+1), k = 1..N.
pub fn eta_grid(n: usize) -> Vec<f64> {
    (1..=n).map(|k| k as f64 / (n + 1) as f64).collect()
}

/// Whether φ is within `tol` of ±π/2 (mod 2π).
pub fn is_quarter_phase(varphi: f64, tol: f64) -> bool {
    let w = varphi.rem_euclid(2.0 * PI);
    (w - FRAC_PI_2).abs() <= tol || (w - 3.0 * FRAC_PI_2).abs() <= tol
}
