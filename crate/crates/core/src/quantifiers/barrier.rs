//! Log-barrier interior-point method for small linear matrix inequalities.
//!
//! Minimizes c·x subject to G_k(x) = A_k0 + Σ_i x_i A_ki ⪰ 0 for Hermitian A's,
//! starting from a strictly feasible point. Each stage centers
//! t c·x − Σ_k ln det G_k(x) by damped Newton steps; the final duality gap
//! bound is Σ_k dim(G_k) / t.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};

/// Settings of the interior-point solver behind robustness and weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Target bound on the duality gap.
    pub gap: f64,
    /// Barrier parameter growth per stage.
    pub growth: f64,
    /// Newton steps allowed per stage.
    pub max_newton: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            gap: 1e-10,
            growth: 8.0,
            max_newton: 100,
        }
    }
}

pub(crate) struct Lmi {
    pub a0: CMatrix,
    pub a: Vec<CMatrix>,
}

impl Lmi {
    fn eval(&self, x: &[f64]) -> CMatrix {
        let mut g = self.a0.clone();
        for (xi, ai) in x.iter().zip(&self.a) {
            if *xi != 0.0 {
                g += ai.scale(*xi);
            }
        }
        g
    }
}

pub(crate) struct LmiSolution {
    pub x: Vec<f64>,
    pub gap: f64,
}

/// Hermitian basis of n×n matrices: diagonal units, then Re/Im pairs for a < b.
pub(crate) fn hermitian_basis(n: usize) -> Vec<CMatrix> {
    let mut out = Vec::with_capacity(n * n);
    for a in 0..n {
        let mut e = CMatrix::zeros(n, n);
        e[(a, a)] = C64::new(1.0, 0.0);
        out.push(e);
    }
    for a in 0..n {
        for b in a + 1..n {
            let mut re = CMatrix::zeros(n, n);
            re[(a, b)] = C64::new(1.0, 0.0);
            re[(b, a)] = C64::new(1.0, 0.0);
            out.push(re);
            let mut im = CMatrix::zeros(n, n);
            im[(a, b)] = C64::new(0.0, 1.0);
            im[(b, a)] = C64::new(0.0, -1.0);
            out.push(im);
        }
    }
    out
}

#[cfg(test)]
/// Coordinates of a Hermitian matrix in [`hermitian_basis`].
pub(crate) fn hermitian_coords(m: &CMatrix) -> Vec<f64> {
    let n = m.nrows();
    let mut x: Vec<f64> = (0..n).map(|a| m[(a, a)].re).collect();
    for a in 0..n {
        for b in a + 1..n {
            x.push(m[(a, b)].re);
            x.push(m[(a, b)].im);
        }
    }
    x
}

/// ln det of a Hermitian positive definite matrix, None when not positive definite.
fn log_det(g: &CMatrix) -> Option<(f64, CMatrix)> {
    // exact Hermitian symmetry keeps rounding from faking an indefinite pivot
    let mut h = (g + g.adjoint()).scale(0.5);
    for k in 0..h.nrows() {
        h[(k, k)].im = 0.0;
    }
    let chol = Cholesky::new(h)?;
    let l = chol.l_dirty();
    let mut ld = 0.0;
    for k in 0..g.nrows() {
        let dkk = l[(k, k)];
        // an indefinite pivot shows up as an imaginary square root
        if !(dkk.re > 0.0) || !dkk.re.is_finite() || dkk.im.abs() > 1e-12 * dkk.re {
            return None;
        }
        ld += 2.0 * dkk.re.ln();
    }
    Some((ld, chol.inverse()))
}

fn re_trace_product(a: &CMatrix, b: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for k in 0..n {
            s += (a[(i, k)] * b[(k, i)]).re;
        }
    }
    s
}

pub(crate) fn minimize(c: &[f64], lmis: &[Lmi], x0: Vec<f64>, cfg: &SolverConfig) -> Result<LmiSolution> {
    let m = c.len();
    let nu: f64 = lmis.iter().map(|l| l.a0.nrows() as f64).sum();
    let mut x = x0;
    if !lmis.iter().all(|l| log_det(&l.eval(&x)).is_some()) {
        return Err(Error::SolverNonConvergence {
            residual: f64::INFINITY,
        });
    }
    if m == 0 {
        return Ok(LmiSolution { x, gap: 0.0 });
    }
    let mut t = 1.0;
    loop {
        for _ in 0..cfg.max_newton {
            let mut grad = DVector::from_iterator(m, c.iter().map(|ci| t * ci));
            let mut hess = DMatrix::<f64>::zeros(m, m);
            for l in lmis {
                let (_, s) = log_det(&l.eval(&x)).ok_or(Error::SolverNonConvergence { residual: nu / t })?;
                let b: Vec<CMatrix> = l.a.iter().map(|ai| &s * ai).collect();
                for i in 0..m {
                    grad[i] -= b[i].trace().re;
                    for j in 0..=i {
                        let h = re_trace_product(&b[i], &b[j]);
                        hess[(i, j)] += h;
                        if i != j {
                            hess[(j, i)] += h;
                        }
                    }
                }
            }
            let dx = newton_step(&hess, &grad);
            let dec2 = -grad.dot(&dx);
            if !(dec2 > 1e-20) {
                break;
            }
            // damped Newton step of a self-concordant barrier; no function values are
            // compared, which would be swamped by rounding once t is large
            let lam = dec2.sqrt();
            let mut step = if lam > 0.25 { 1.0 / (1.0 + lam) } else { 1.0 };
            let mut moved = false;
            while step > 1e-14 {
                let trial: Vec<f64> = x.iter().zip(dx.iter()).map(|(a, d)| a + step * d).collect();
                if lmis.iter().all(|l| log_det(&l.eval(&trial)).is_some()) {
                    x = trial;
                    moved = true;
                    break;
                }
                step *= 0.5;
            }
            if !moved || dec2 < 1e-18 {
                break;
            }
        }
        let gap = nu / t;
        if gap <= cfg.gap {
            return Ok(LmiSolution { x, gap });
        }
        t *= cfg.growth;
        if !t.is_finite() {
            return Err(Error::SolverNonConvergence { residual: gap });
        }
    }
}

fn newton_step(hess: &DMatrix<f64>, grad: &DVector<f64>) -> DVector<f64> {
    let scale = (0..hess.nrows()).map(|i| hess[(i, i)].abs()).fold(0.0, f64::max);
    let mut ridge = 0.0;
    loop {
        let mut h = hess.clone();
        for i in 0..h.nrows() {
            h[(i, i)] += ridge;
        }
        if let Some(ch) = Cholesky::new(h) {
            return -ch.solve(grad);
        }
        ridge = if ridge == 0.0 {
            1e-14 * scale.max(1e-300)
        } else {
            ridge * 10.0
        };
    }
}
