//! Text documents for operators and state vectors: `dim` plus row-major `re`
//! and `im` arrays. `im` may be omitted for real data.

use serde::{Deserialize, Serialize};

use super::{c, Matrix, QuantumError, Result, StateVector, Vector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorDoc {
    pub dim: usize,
    pub re: Vec<f64>,
    #[serde(default)]
    pub im: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateDoc {
    pub dim: usize,
    pub re: Vec<f64>,
    #[serde(default)]
    pub im: Vec<f64>,
}

fn complex_entries(len: usize, re: &[f64], im: &[f64]) -> Result<Vec<num_complex::Complex64>> {
    if re.len() != len {
        return Err(QuantumError::Structure(format!(
            "`re` has {} entries, expected {len}",
            re.len()
        )));
    }
    if !im.is_empty() && im.len() != len {
        return Err(QuantumError::Structure(format!(
            "`im` has {} entries, expected {len} or none",
            im.len()
        )));
    }
    Ok((0..len)
        .map(|i| c(re[i], im.get(i).copied().unwrap_or(0.0)))
        .collect())
}

impl OperatorDoc {
    pub fn to_matrix(&self) -> Result<Matrix> {
        if self.dim == 0 {
            return Err(QuantumError::ZeroDimension);
        }
        let entries = complex_entries(self.dim * self.dim, &self.re, &self.im)?;
        Ok(Matrix::from_row_slice(self.dim, self.dim, &entries))
    }

    pub fn from_matrix(m: &Matrix) -> Self {
        let dim = m.nrows();
        let rows = (0..dim).flat_map(|i| (0..dim).map(move |j| (i, j)));
        OperatorDoc {
            dim,
            re: rows.clone().map(|(i, j)| m[(i, j)].re).collect(),
            im: rows.map(|(i, j)| m[(i, j)].im).collect(),
        }
    }
}

impl StateDoc {
    pub fn to_state(&self) -> Result<StateVector> {
        if self.dim == 0 {
            return Err(QuantumError::ZeroDimension);
        }
        let entries = complex_entries(self.dim, &self.re, &self.im)?;
        StateVector::new(Vector::from_vec(entries))
    }

    pub fn from_state(s: &StateVector) -> Self {
        StateDoc {
            dim: s.dim(),
            re: s.amplitudes().iter().map(|z| z.re).collect(),
            im: s.amplitudes().iter().map(|z| z.im).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::pauli_y;
    use proptest::prelude::*;

    #[test]
    fn row_major_layout() {
        let doc = OperatorDoc::from_matrix(&pauli_y());
        assert_eq!(doc.re, vec![0.0; 4]);
        assert_eq!(doc.im, vec![0.0, -1.0, 1.0, 0.0]);
        assert_eq!(doc.to_matrix().unwrap(), pauli_y());
    }

    #[test]
    fn missing_im_means_real() {
        let doc: StateDoc = serde_json::from_str(r#"{"dim": 2, "re": [0.6, 0.8]}"#).unwrap();
        let s = doc.to_state().unwrap();
        assert_eq!(s.amplitudes()[1], c(0.8, 0.0));
    }

    #[test]
    fn length_errors() {
        let doc = OperatorDoc { dim: 2, re: vec![1.0; 3], im: vec![] };
        assert!(doc.to_matrix().is_err());
        let doc = StateDoc { dim: 2, re: vec![1.0, 0.0], im: vec![0.0] };
        assert!(doc.to_state().is_err());
    }

    proptest! {
        #[test]
        fn operator_roundtrip(dim in 1usize..4, seed in any::<u64>()) {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let m = crate::quantum::random::ginibre_matrix(dim, dim, &mut rng);
            let text = serde_json::to_string(&OperatorDoc::from_matrix(&m)).unwrap();
            let back: OperatorDoc = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(back.to_matrix().unwrap(), m);
        }
    }
}
