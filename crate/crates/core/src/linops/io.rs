//! JSON exchange format for square complex matrices:
//! `{"dim": n, "re": [[...]], "im": [[...]]}`, row-major.

use serde::{Deserialize, Serialize};

use super::{CMat, DensityMatrix, HermitianOperator, UnitaryOperator, C64};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    #[serde(default)]
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMat) -> Self {
        let rows = 0..m.nrows();
        Self {
            dim: m.nrows(),
            re: rows.clone().map(|i| (0..m.ncols()).map(|j| m[(i, j)].re).collect()).collect(),
            im: rows.map(|i| (0..m.ncols()).map(|j| m[(i, j)].im).collect()).collect(),
        }
    }

    /// Shape-checked conversion; an empty `im` means a real matrix.
    pub fn to_matrix(&self) -> Result<CMat> {
        let n = self.dim;
        if n == 0 {
            return Err(Error::InvalidInput("dim must be positive".into()));
        }
        let check = |rows: &Vec<Vec<f64>>, part: &str| -> Result<()> {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(Error::InvalidInput(format!("`{part}` must be a {n}x{n} array")));
            }
            Ok(())
        };
        check(&self.re, "re")?;
        if !self.im.is_empty() {
            check(&self.im, "im")?;
        }
        Ok(CMat::from_fn(n, n, |i, j| {
            let im = if self.im.is_empty() { 0.0 } else { self.im[i][j] };
            C64::new(self.re[i][j], im)
        }))
    }

    pub fn to_hermitian(&self) -> Result<HermitianOperator> {
        HermitianOperator::new(self.to_matrix()?)
    }

    pub fn to_density(&self) -> Result<DensityMatrix> {
        DensityMatrix::new(self.to_matrix()?)
    }

    pub fn to_unitary(&self) -> Result<UnitaryOperator> {
        UnitaryOperator::new(self.to_matrix()?)
    }
}

pub fn parse_matrix(json: &str) -> Result<MatrixJson> {
    Ok(serde_json::from_str(json)?)
}
