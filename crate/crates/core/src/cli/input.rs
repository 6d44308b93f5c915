//! JSON state and frame files.
//!
//! A matrix is `{"dim": d, "re": [...], "im": [...]}` with row-major entries; `im` may be
//! omitted for real matrices. A vector is `{"re": [...], "im": [...]}`. Frames carry
//! `kind` ∈ {basis, projectors, povm}:
//!
//! - basis: `vectors`, the orthonormal basis;
//! - projectors: `projectors`, a list of matrices, plus an optional `basis` refining them
//!   (needed for the ℓ1 quantifier);
//! - povm: `vectors`, the rank-one elements |μ_j⟩.

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix, CVector, DensityMatrix};
use crate::measurement::{OrthonormalBasis, ProjectorDecomposition, RankOnePovm};
use crate::quantifiers::ReferenceFrame;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSpec {
    pub dim: usize,
    pub re: Vec<f64>,
    #[serde(default)]
    pub im: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorSpec {
    pub re: Vec<f64>,
    #[serde(default)]
    pub im: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum FrameSpec {
    Basis {
        vectors: Vec<VectorSpec>,
    },
    Projectors {
        projectors: Vec<MatrixSpec>,
        #[serde(default)]
        basis: Option<Vec<VectorSpec>>,
    },
    Povm {
        vectors: Vec<VectorSpec>,
    },
}

fn complex_entries(re: &[f64], im: &[f64], n: usize, what: &str) -> Result<Vec<crate::linalg::C64>> {
    if re.len() != n || !(im.is_empty() || im.len() == n) {
        return Err(Error::Input(format!(
            "{what}: expected {n} entries, got re {} and im {}",
            re.len(),
            im.len()
        )));
    }
    let out: Vec<_> = (0..n)
        .map(|k| c(re[k], im.get(k).copied().unwrap_or(0.0)))
        .collect();
    if out.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(out)
}

impl MatrixSpec {
    pub fn to_matrix(&self) -> Result<CMatrix> {
        if self.dim == 0 {
            return Err(Error::Input("dim must be positive".into()));
        }
        let n = self.dim * self.dim;
        let entries = complex_entries(&self.re, &self.im, n, "matrix")?;
        Ok(CMatrix::from_row_slice(self.dim, self.dim, &entries))
    }
}

impl VectorSpec {
    pub fn to_vector(&self) -> Result<CVector> {
        let entries = complex_entries(&self.re, &self.im, self.re.len(), "vector")?;
        if entries.is_empty() {
            return Err(Error::Input("empty vector".into()));
        }
        Ok(CVector::from_vec(entries))
    }
}

fn vectors(specs: &[VectorSpec]) -> Result<Vec<CVector>> {
    specs.iter().map(VectorSpec::to_vector).collect()
}

impl FrameSpec {
    pub fn to_frame(&self) -> Result<ReferenceFrame> {
        match self {
            Self::Basis { vectors: v } => Ok(ReferenceFrame::basis(OrthonormalBasis::from_vectors(
                &vectors(v)?,
            )?)),
            Self::Projectors { projectors, basis } => {
                let ps = projectors
                    .iter()
                    .map(MatrixSpec::to_matrix)
                    .collect::<Result<Vec<_>>>()?;
                let p = ProjectorDecomposition::new(ps)?;
                match basis {
                    Some(b) => ReferenceFrame::luders_in(p, OrthonormalBasis::from_vectors(&vectors(b)?)?),
                    None => Ok(ReferenceFrame::luders(p)),
                }
            }
            Self::Povm { vectors: v } => ReferenceFrame::povm(RankOnePovm::new(&vectors(v)?)?),
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

pub fn parse_state(text: &str) -> Result<DensityMatrix> {
    let spec: MatrixSpec = serde_json::from_str(text).map_err(|e| Error::Input(format!("state: {e}")))?;
    DensityMatrix::new(spec.to_matrix()?)
}

pub fn parse_frame(text: &str) -> Result<ReferenceFrame> {
    let spec: FrameSpec = serde_json::from_str(text).map_err(|e| Error::Input(format!("frame: {e}")))?;
    spec.to_frame()
}

pub fn load_state(path: &Path) -> Result<DensityMatrix> {
    parse_state(&read(path)?)
}

pub fn load_frame(path: &Path) -> Result<ReferenceFrame> {
    parse_frame(&read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_qubit_and_a_basis() {
        let rho = parse_state(r#"{"dim": 2, "re": [0.5, 0.5, 0.5, 0.5]}"#).unwrap();
        assert_eq!(rho.dim(), 2);
        let f = parse_frame(r#"{"kind": "basis", "vectors": [{"re": [1, 0]}, {"re": [0, 1]}]}"#).unwrap();
        assert_eq!(f.dim(), 2);
    }

    #[test]
    fn parses_projectors_and_povms() {
        let f = parse_frame(
            r#"{"kind": "projectors", "projectors": [
                {"dim": 3, "re": [1,0,0, 0,0,0, 0,0,0]},
                {"dim": 3, "re": [0,0,0, 0,1,0, 0,0,1]}]}"#,
        )
        .unwrap();
        assert_eq!(f.decomposition().block_dims(), vec![1, 2]);
        let s = (1.0f64 / 3.0).sqrt();
        let text = format!(
            r#"{{"kind": "povm", "vectors": [{{"re": [{s}, 0]}}, {{"re": [{s}, 0]}}, {{"re": [{s}, 0]}},
                {{"re": [0, 0.5]}}]}}"#
        );
        assert!(parse_frame(&text).is_err());
        let text = format!(
            r#"{{"kind": "povm", "vectors": [{{"re": [{s}, 0]}}, {{"re": [{s}, 0]}}, {{"re": [{s}, 0]}},
                {{"re": [0, {s}]}}, {{"re": [0, {s}]}}, {{"re": [0, {s}]}}]}}"#
        );
        assert_eq!(parse_frame(&text).unwrap().dim(), 2);
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(parse_state(r#"{"dim": 2, "re": [1, 0, 0]}"#).is_err());
        assert!(parse_state(r#"{"dim": 2, "re": [1, 0, 0, 0], "bogus": 1}"#).is_err());
        assert!(parse_state(r#"{"dim": 2, "re": [1, 1, 0, 0]}"#).is_err());
        assert!(parse_frame(r#"{"kind": "spiral"}"#).is_err());
    }
}
