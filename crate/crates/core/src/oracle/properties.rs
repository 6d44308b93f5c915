//! Randomized checks of divergence and quantifier properties.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::divergence::quantum_divergence;
use crate::error::{Error, Result};
use crate::linalg::{
    child_seed, random_cptp, random_density, random_unitary, rng_from_seed, CMatrix, DensityMatrix,
};
use crate::measurement::{apply_channel, KrausChannel, OrthonormalBasis, ProjectorDecomposition};
use crate::quantifiers::{
    coherence_alpha, coherence_weight, quantify, random_block_preserving_channel, robustness, theorem2_check,
    DeltaKind, QuantifierResult, ReferenceFrame, SolverConfig,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PropertyId {
    /// Quantifiers are non-negative and vanish on invariant states.
    NonNegativity,
    /// D_α(λA‖λB) = λ D_α(A‖B).
    Scaling,
    /// D_α is additive over orthogonal supports.
    Additivity,
    /// D_α(Φ(ρ)‖Φ(σ)) ≤ D_α(ρ‖σ) for channels Φ, α ∈ (0, 2].
    Monotonicity,
    /// Joint convexity of D_α, α ∈ (0, 2].
    JointConvexity,
    /// Convexity of the Lüders α-quantifier, α ∈ (0, 2].
    Convexity,
    /// C^(ℬ)(ρ) ≥ C^(𝒫)(ρ) for a refinement ℬ of 𝒫.
    Hierarchy,
    /// Selective monotonicity of the Lüders α-quantifier under block-preserving Kraus operators.
    Theorem2,
    RobustnessConvexity,
    RobustnessMonotonicity,
    WeightConvexity,
    WeightMonotonicity,
}

impl PropertyId {
    pub const ALL: [PropertyId; 12] = [
        Self::NonNegativity,
        Self::Scaling,
        Self::Additivity,
        Self::Monotonicity,
        Self::JointConvexity,
        Self::Convexity,
        Self::Hierarchy,
        Self::Theorem2,
        Self::RobustnessConvexity,
        Self::RobustnessMonotonicity,
        Self::WeightConvexity,
        Self::WeightMonotonicity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::NonNegativity => "non-negativity",
            Self::Scaling => "scaling",
            Self::Additivity => "additivity",
            Self::Monotonicity => "monotonicity",
            Self::JointConvexity => "joint-convexity",
            Self::Convexity => "convexity",
            Self::Hierarchy => "hierarchy",
            Self::Theorem2 => "theorem2",
            Self::RobustnessConvexity => "robustness-convexity",
            Self::RobustnessMonotonicity => "robustness-monotonicity",
            Self::WeightConvexity => "weight-convexity",
            Self::WeightMonotonicity => "weight-monotonicity",
        }
    }

    /// Largest violation a passing run may show.
    pub fn threshold(self) -> f64 {
        match self {
            Self::Scaling => 1e-10,
            Self::Additivity | Self::Hierarchy | Self::NonNegativity => 1e-9,
            Self::Monotonicity | Self::JointConvexity | Self::Convexity | Self::Theorem2 => 1e-8,
            Self::RobustnessConvexity
            | Self::RobustnessMonotonicity
            | Self::WeightConvexity
            | Self::WeightMonotonicity => 1e-6,
        }
    }

    /// Properties that only hold for α ∈ (0, 2].
    fn needs_alpha_at_most_two(self) -> bool {
        matches!(
            self,
            Self::Monotonicity | Self::JointConvexity | Self::Convexity | Self::Theorem2
        )
    }

    fn uses_alpha(self) -> bool {
        !matches!(
            self,
            Self::RobustnessConvexity
                | Self::RobustnessMonotonicity
                | Self::WeightConvexity
                | Self::WeightMonotonicity
        )
    }
}

impl fmt::Display for PropertyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PropertyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Input(format!("unknown property '{s}'")))
    }
}

/// The worst instance of a property run.
#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub trial: usize,
    pub dim: usize,
    pub alpha: Option<f64>,
    /// Seed that regenerates the instance.
    pub seed: u64,
    pub lhs: f64,
    pub rhs: f64,
    /// How far the inequality (or equality) is violated, divided by max(1, |lhs|, |rhs|);
    /// 0 when it holds.
    pub amount: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct PropertyReport {
    pub id: PropertyId,
    pub trials: usize,
    pub max_violation: f64,
    pub threshold: f64,
    pub passed: bool,
    pub worst: Option<Violation>,
}

/// Random Lüders frame: a Haar basis cut into random consecutive blocks, with at least
/// one block of dimension two or more when `dim` ≥ 2. The basis refines the decomposition.
pub fn random_luders_frame(dim: usize, seed: u64) -> Result<(ProjectorDecomposition, OrthonormalBasis)> {
    if dim == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    let u = random_unitary(dim, seed);
    let mut rng = rng_from_seed(child_seed(seed, 1));
    let mut sizes = vec![1usize];
    for _ in 1..dim {
        if rng.random_bool(0.5) {
            sizes.push(1);
        } else {
            *sizes.last_mut().expect("non-empty") += 1;
        }
    }
    if dim >= 2 && sizes.iter().all(|&s| s == 1) {
        sizes.remove(0);
        sizes[0] += 1;
    }
    let mut frames = Vec::with_capacity(sizes.len());
    let mut start = 0;
    for s in sizes {
        frames.push(u.columns(start, s).into_owned());
        start += s;
    }
    Ok((
        ProjectorDecomposition::from_frames(frames)?,
        OrthonormalBasis::new(u)?,
    ))
}

fn scale(lhs: f64, rhs: f64) -> f64 {
    1f64.max(lhs.abs()).max(rhs.abs())
}

struct Outcome {
    amount: f64,
    lhs: f64,
    rhs: f64,
    detail: String,
}

impl Outcome {
    /// lhs ≤ rhs. Amounts are relative once the values exceed 1.
    fn leq(lhs: f64, rhs: f64, detail: impl Into<String>) -> Self {
        Self {
            amount: (lhs - rhs).max(0.0) / scale(lhs, rhs),
            lhs,
            rhs,
            detail: detail.into(),
        }
    }

    fn eq(lhs: f64, rhs: f64, detail: impl Into<String>) -> Self {
        Self {
            amount: (lhs - rhs).abs() / scale(lhs, rhs),
            lhs,
            rhs,
            detail: detail.into(),
        }
    }

    fn worst(items: Vec<Outcome>) -> Outcome {
        items
            .into_iter()
            .max_by(|a, b| a.amount.total_cmp(&b.amount))
            .expect("at least one comparison")
    }
}

/// Runs `n_trials` random instances, cycling through `dims` and then `alphas`.
///
/// Trial t uses dims[t mod |dims|], alphas[(t div |dims|) mod |alphas|] and the seed
/// child_seed(seed, t), so every instance can be regenerated on its own.
pub fn property_check(
    id: PropertyId,
    dims: &[usize],
    alphas: &[f64],
    n_trials: usize,
    seed: u64,
) -> Result<PropertyReport> {
    if dims.is_empty() || dims.iter().any(|&d| !(2..=8).contains(&d)) {
        return Err(Error::InvalidParameter(
            "dims must be non-empty and within 2..=8".into(),
        ));
    }
    let alphas: Vec<f64> = if id.uses_alpha() {
        alphas.to_vec()
    } else {
        vec![f64::NAN]
    };
    if alphas.is_empty() {
        return Err(Error::InvalidParameter("alphas must be non-empty".into()));
    }
    if id.uses_alpha() {
        for &a in &alphas {
            crate::divergence::check_alpha(a)?;
            if id.needs_alpha_at_most_two() && a > 2.0 {
                return Err(Error::InvalidParameter(format!(
                    "{id} only holds for alpha in (0, 2], got {a}"
                )));
            }
        }
    }
    let outcomes: Vec<(usize, usize, Option<f64>, u64, Outcome)> = (0..n_trials)
        .into_par_iter()
        .map(|t| {
            let dim = dims[t % dims.len()];
            let a = alphas[(t / dims.len()) % alphas.len()];
            let alpha = id.uses_alpha().then_some(a);
            let s = child_seed(seed, t as u64);
            run_trial(id, dim, a, s).map(|o| (t, dim, alpha, s, o))
        })
        .collect::<Result<_>>()?;
    let worst = outcomes
        .into_iter()
        .max_by(|a, b| a.4.amount.total_cmp(&b.4.amount).then(b.0.cmp(&a.0)));
    let max_violation = worst.as_ref().map_or(0.0, |w| w.4.amount);
    Ok(PropertyReport {
        id,
        trials: n_trials,
        max_violation,
        threshold: id.threshold(),
        passed: max_violation <= id.threshold(),
        worst: worst.map(|(trial, dim, alpha, seed, o)| Violation {
            trial,
            dim,
            alpha,
            seed,
            lhs: o.lhs,
            rhs: o.rhs,
            amount: o.amount,
            detail: o.detail,
        }),
    })
}

fn div(a: &CMatrix, b: &CMatrix, alpha: f64) -> Result<f64> {
    Ok(quantum_divergence(a, b, alpha)?.value.as_f64())
}

fn rank(rng: &mut impl Rng, dim: usize) -> usize {
    rng.random_range(1..=dim)
}

/// Random PSD matrix with random trace in [0.1, 3].
fn random_psd(dim: usize, rank: usize, seed: u64, scale: f64) -> CMatrix {
    random_density(dim, rank, seed).matrix().scale(scale)
}

fn mixture_weights(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let s: f64 = raw.iter().sum();
    raw.iter().map(|r| r / s).collect()
}

fn selective_terms(
    ch: &KrausChannel,
    rho: &DensityMatrix,
    f: &dyn Fn(&DensityMatrix) -> Result<f64>,
) -> Result<f64> {
    let mut lhs = 0.0;
    for k in ch.kraus() {
        let out = k * rho.matrix() * k.adjoint();
        let q = out.trace().re;
        if q > 1e-12 {
            lhs += q * f(&DensityMatrix::new(out.unscale(q))?)?;
        }
    }
    Ok(lhs)
}

fn run_trial(id: PropertyId, dim: usize, alpha: f64, seed: u64) -> Result<Outcome> {
    let mut rng = rng_from_seed(seed);
    let sub = |k: u64| child_seed(seed, 100 + k);
    let cfg = SolverConfig::default();
    match id {
        PropertyId::NonNegativity => {
            let (p, b) = random_luders_frame(dim, sub(0))?;
            let luders = ReferenceFrame::luders_in(p.clone(), b.clone())?;
            let basis = ReferenceFrame::basis(b);
            let rho = random_density(dim, rank(&mut rng, dim), sub(1));
            let inv = DensityMatrix::new(p.pinch(rho.matrix()))?;
            let mut items = Vec::new();
            for (fname, frame) in [("basis", &basis), ("luders", &luders)] {
                for kind in [
                    DeltaKind::Alpha(alpha),
                    DeltaKind::L1,
                    DeltaKind::Robustness,
                    DeltaKind::Weight,
                ] {
                    let c = quantify(&rho, frame, kind, &cfg)?.as_f64();
                    items.push(Outcome::leq(
                        -c,
                        0.0,
                        format!("{kind:?} on a random state, {fname} frame"),
                    ));
                    if fname == "luders" {
                        let z = quantify(&inv, frame, kind, &cfg)?.as_f64();
                        items.push(Outcome::eq(z, 0.0, format!("{kind:?} on an invariant state")));
                    }
                }
            }
            Ok(Outcome::worst(items))
        }
        PropertyId::Scaling => {
            let a = random_psd(dim, rank(&mut rng, dim), sub(0), rng.random_range(0.1..3.0));
            let b = random_psd(dim, dim, sub(1), rng.random_range(0.1..3.0));
            let lambda = rng.random_range(1e-3..5.0);
            let lhs = div(&a.scale(lambda), &b.scale(lambda), alpha)?;
            let rhs = lambda * div(&a, &b, alpha)?;
            Ok(Outcome::eq(lhs, rhs, format!("lambda = {lambda}")))
        }
        PropertyId::Additivity => {
            let u = random_unitary(dim, sub(0));
            let k = rng.random_range(1..dim);
            let v1 = u.columns(0, k).into_owned();
            let v2 = u.columns(k, dim - k).into_owned();
            let lift = |v: &CMatrix, m: CMatrix| v * m * v.adjoint();
            let a1 = lift(
                &v1,
                random_psd(k, rank(&mut rng, k), sub(1), rng.random_range(0.1..2.0)),
            );
            let b1 = lift(&v1, random_psd(k, k, sub(2), rng.random_range(0.1..2.0)));
            let a2 = lift(
                &v2,
                random_psd(
                    dim - k,
                    rank(&mut rng, dim - k),
                    sub(3),
                    rng.random_range(0.1..2.0),
                ),
            );
            let b2 = lift(
                &v2,
                random_psd(dim - k, dim - k, sub(4), rng.random_range(0.1..2.0)),
            );
            let lhs = div(&(&a1 + &a2), &(&b1 + &b2), alpha)?;
            let rhs = div(&a1, &b1, alpha)? + div(&a2, &b2, alpha)?;
            Ok(Outcome::eq(lhs, rhs, format!("split {k} + {}", dim - k)))
        }
        PropertyId::Monotonicity => {
            let rho = random_density(dim, rank(&mut rng, dim), sub(0));
            let sigma = random_density(dim, dim, sub(1));
            let d_out = rng.random_range(1..=dim + 1);
            let n_kraus = rng.random_range(dim.div_ceil(d_out).max(1)..=dim.div_ceil(d_out).max(1) + 2);
            let ch = KrausChannel::new(random_cptp(dim, d_out, n_kraus, sub(2))?)?;
            let lhs = div(
                &ch.apply_matrix(rho.matrix()),
                &ch.apply_matrix(sigma.matrix()),
                alpha,
            )?;
            let rhs = div(rho.matrix(), sigma.matrix(), alpha)?;
            Ok(Outcome::leq(
                lhs,
                rhs,
                format!("channel {dim} -> {d_out} with {n_kraus} Kraus operators"),
            ))
        }
        PropertyId::JointConvexity => {
            let n = rng.random_range(2..=3);
            let q = mixture_weights(&mut rng, n);
            let rhos: Vec<DensityMatrix> = (0..n)
                .map(|i| random_density(dim, rank(&mut rng, dim), sub(2 * i as u64)))
                .collect();
            let sigmas: Vec<DensityMatrix> = (0..n)
                .map(|i| random_density(dim, dim, sub(2 * i as u64 + 1)))
                .collect();
            let lhs = div(
                DensityMatrix::mixture(&q, &rhos)?.matrix(),
                DensityMatrix::mixture(&q, &sigmas)?.matrix(),
                alpha,
            )?;
            let mut rhs = 0.0;
            for ((qi, r), s) in q.iter().zip(&rhos).zip(&sigmas) {
                rhs += qi * div(r.matrix(), s.matrix(), alpha)?;
            }
            Ok(Outcome::leq(lhs, rhs, format!("{n} pairs")))
        }
        PropertyId::Convexity => {
            let (p, _) = random_luders_frame(dim, sub(0))?;
            let frame = ReferenceFrame::luders(p);
            let n = rng.random_range(2..=3);
            let q = mixture_weights(&mut rng, n);
            let states: Vec<DensityMatrix> = (0..n)
                .map(|i| random_density(dim, rank(&mut rng, dim), sub(1 + i as u64)))
                .collect();
            let lhs = coherence_alpha(&DensityMatrix::mixture(&q, &states)?, &frame, alpha)?.as_f64();
            let mut rhs = 0.0;
            for (qi, s) in q.iter().zip(&states) {
                rhs += qi * coherence_alpha(s, &frame, alpha)?.as_f64();
            }
            Ok(Outcome::leq(lhs, rhs, format!("{n} states")))
        }
        PropertyId::Hierarchy => {
            let (p, b) = random_luders_frame(dim, sub(0))?;
            let luders = ReferenceFrame::luders_in(p, b.clone())?;
            let basis = ReferenceFrame::basis(b);
            let rho = random_density(dim, rank(&mut rng, dim), sub(1));
            let mut items = Vec::new();
            for kind in [
                DeltaKind::Alpha(alpha),
                DeltaKind::L1,
                DeltaKind::Robustness,
                DeltaKind::Weight,
            ] {
                let cb = quantify(&rho, &basis, kind, &cfg)?.as_f64();
                let cp = quantify(&rho, &luders, kind, &cfg)?.as_f64();
                items.push(Outcome::leq(cp, cb, format!("{kind:?}")));
            }
            Ok(Outcome::worst(items))
        }
        PropertyId::Theorem2 => {
            let (p, _) = random_luders_frame(dim, sub(0))?;
            let n_kraus = rng.random_range(1..=3);
            let ch = random_block_preserving_channel(&p, n_kraus, sub(1))?;
            let rho = random_density(dim, rank(&mut rng, dim), sub(2));
            let r = theorem2_check(&rho, &ch, &p, alpha)?;
            Ok(Outcome::leq(r.lhs, r.rhs, format!("{n_kraus} Kraus operators")))
        }
        PropertyId::RobustnessConvexity | PropertyId::WeightConvexity => {
            let (p, _) = random_luders_frame(dim, sub(0))?;
            let frame = ReferenceFrame::luders(p);
            let f = |r: &DensityMatrix| -> Result<f64> { measure(id, r, &frame, &cfg) };
            let t = rng.random_range(0.0..1.0);
            let r1 = random_density(dim, rank(&mut rng, dim), sub(1));
            let r2 = random_density(dim, rank(&mut rng, dim), sub(2));
            let lhs = f(&DensityMatrix::mixture(&[t, 1.0 - t], &[r1.clone(), r2.clone()])?)?;
            let rhs = t * f(&r1)? + (1.0 - t) * f(&r2)?;
            Ok(Outcome::leq(lhs, rhs, format!("t = {t}")))
        }
        PropertyId::RobustnessMonotonicity | PropertyId::WeightMonotonicity => {
            let (p, _) = random_luders_frame(dim, sub(0))?;
            let frame = ReferenceFrame::luders(p.clone());
            let n_kraus = rng.random_range(1..=3);
            let ch = random_block_preserving_channel(&p, n_kraus, sub(1))?;
            let rho = random_density(dim, rank(&mut rng, dim), sub(2));
            let f = |r: &DensityMatrix| -> Result<f64> { measure(id, r, &frame, &cfg) };
            let lhs = selective_terms(&ch, &rho, &f)?;
            let rhs = f(&rho)?;
            // the averaged channel output is also covered by the non-selective form
            let mixed = f(&apply_channel(&ch, &rho)?)?;
            Ok(Outcome::worst(vec![
                Outcome::leq(lhs, rhs, format!("selective, {n_kraus} Kraus operators")),
                Outcome::leq(mixed, rhs, format!("non-selective, {n_kraus} Kraus operators")),
            ]))
        }
    }
}

fn measure(id: PropertyId, rho: &DensityMatrix, frame: &ReferenceFrame, cfg: &SolverConfig) -> Result<f64> {
    let r: QuantifierResult = match id {
        PropertyId::RobustnessConvexity | PropertyId::RobustnessMonotonicity => robustness(rho, frame, cfg)?,
        _ => coherence_weight(rho, frame, cfg)?,
    };
    Ok(r.as_f64())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_roundtrip() {
        for id in PropertyId::ALL {
            assert_eq!(id.name().parse::<PropertyId>().unwrap(), id);
        }
        assert!("nope".parse::<PropertyId>().is_err());
    }

    #[test]
    fn frames_refine() {
        for seed in 0..20 {
            let (p, b) = random_luders_frame(3, seed).unwrap();
            assert!(p.len() < 3);
            assert!(b.block_assignment(&p).is_ok());
        }
    }

    #[test]
    fn alpha_three_monotonicity_is_refused() {
        assert!(property_check(PropertyId::Monotonicity, &[3], &[3.0], 10, 1).is_err());
        assert!(property_check(PropertyId::Scaling, &[3], &[3.0], 10, 1).is_ok());
    }

    #[test]
    fn reports_are_reproducible() {
        let a = property_check(PropertyId::JointConvexity, &[2, 3], &[0.5, 2.0], 12, 9).unwrap();
        let b = property_check(PropertyId::JointConvexity, &[2, 3], &[0.5, 2.0], 12, 9).unwrap();
        assert_eq!(a.max_violation, b.max_violation);
        assert!(a.passed);
    }

    #[test]
    fn scaling_suite() {
        let r = property_check(PropertyId::Scaling, &[2, 3], &[0.5, 1.0, 1.5, 2.0], 100, 3).unwrap();
        assert!(r.max_violation <= 1e-10, "{r:?}");
    }

    #[test]
    fn monotonicity_suite() {
        let r = property_check(PropertyId::Monotonicity, &[3], &[2.0], 200, 4).unwrap();
        assert!(r.max_violation <= 1e-8, "{r:?}");
    }
}
