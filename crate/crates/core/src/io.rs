//! JSON wire formats.
//!
//! Operator files are objects with `dim` and a row-major `entries` list of
//! `[re, im]` pairs. Density matrices use the same matrix object nested
//! under a `state` key. Readers accept exactly this shape and writers emit
//! exactly this shape.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::operator::{DensityMatrix, HermitianOperator};
use crate::tolerances::Tolerances;
use num_complex::Complex64;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub entries: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateJson {
    pub state: MatrixJson,
}

impl From<&HermitianOperator> for MatrixJson {
    fn from(op: &HermitianOperator) -> Self {
        MatrixJson {
            dim: op.dim(),
            entries: op.entries().iter().map(|z| (z.re, z.im)).collect(),
        }
    }
}

impl MatrixJson {
    pub fn into_operator(self, tol: &Tolerances) -> Result<HermitianOperator> {
        let entries = self
            .entries
            .into_iter()
            .map(|(re, im)| Complex64::new(re, im))
            .collect();
        HermitianOperator::new_with(self.dim, entries, tol)
    }
}

impl From<&DensityMatrix> for StateJson {
    fn from(rho: &DensityMatrix) -> Self {
        StateJson {
            state: rho.op().into(),
        }
    }
}

impl StateJson {
    pub fn into_density(self, tol: &Tolerances) -> Result<DensityMatrix> {
        DensityMatrix::new_with(self.state.into_operator(tol)?, tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::Ket;

    #[test]
    fn matrix_round_trip() {
        let op = HermitianOperator::from_real_diag(&[0.25, 0.75]);
        let json = serde_json::to_string(&MatrixJson::from(&op)).unwrap();
        assert_eq!(
            json,
            r#"{"dim":2,"entries":[[0.25,0.0],[0.0,0.0],[0.0,0.0],[0.75,0.0]]}"#
        );
        let back: MatrixJson = serde_json::from_str(&json).unwrap();
        assert_eq!(back.into_operator(&Tolerances::default()).unwrap(), op);
    }

    #[test]
    fn state_uses_state_key() {
        let rho = DensityMatrix::from_pure(&Ket::basis(2, 0)).unwrap();
        let json = serde_json::to_value(StateJson::from(&rho)).unwrap();
        assert!(json.get("state").is_some());
        let back: StateJson = serde_json::from_value(json).unwrap();
        assert_eq!(back.into_density(&Tolerances::default()).unwrap(), rho);
    }
}
