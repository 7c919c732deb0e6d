//! Dense finite-dimensional quantum states, effects and POVMs.
//!
//! Everything here is desk scale (dimensions up to a few dozen), so operators
//! are plain dense complex matrices.

pub mod format;
mod linalg;
pub mod random;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

pub use linalg::{born_distribution, overlap, partial_trace, Keep, Tensor};

pub type Matrix = DMatrix<Complex64>;
pub type Vector = DVector<Complex64>;

/// Tolerance for Hermiticity, positivity, trace and completeness checks.
pub const TOL_NUM: f64 = 1e-9;
/// Tolerance on the squared norm of state vectors.
pub const TOL_NORM: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuantumError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension must be positive")]
    ZeroDimension,
    #[error("state vector has squared norm {0}, expected 1")]
    NotNormalized(f64),
    #[error("operator is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("operator has eigenvalue {0:.3e} below zero")]
    NotPositive(f64),
    #[error("effect has eigenvalue {0:.3e} above one")]
    EffectAboveOne(f64),
    #[error("density operator has trace {0}, expected 1")]
    TraceNotOne(f64),
    #[error("POVM needs at least one effect")]
    EmptyPovm,
    #[error("POVM has {effects} effects but {labels} labels")]
    LabelCount { effects: usize, labels: usize },
    #[error("POVM fails {0}")]
    InvalidPovm(String),
    #[error("dimension {dim} does not factor as {left} x {right}")]
    Factorization { dim: usize, left: usize, right: usize },
    #[error("outcome {label} has probability {value:.3e}, below -tolerance")]
    NegativeProbability { label: String, value: f64 },
    #[error("{0}")]
    Structure(String),
}

pub type Result<T, E = QuantumError> = std::result::Result<T, E>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(dim: usize) -> Matrix {
    Matrix::identity(dim, dim)
}

pub fn pauli_x() -> Matrix {
    Matrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)])
}

pub fn pauli_y() -> Matrix {
    Matrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)])
}

pub fn pauli_z() -> Matrix {
    Matrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)])
}

/// Largest entrywise modulus of `m - m†`.
pub fn hermitian_deviation(m: &Matrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn max_abs(m: &Matrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn hermitian_eigenvalues(m: &Matrix) -> Vec<f64> {
    let h = (m + m.adjoint()).scale(0.5);
    let mut ev: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

fn check_square(m: &Matrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(QuantumError::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.nrows() == 0 {
        return Err(QuantumError::ZeroDimension);
    }
    Ok(m.nrows())
}

/// A normalized pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vector,
}

impl StateVector {
    pub fn new(amplitudes: Vector) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(QuantumError::ZeroDimension);
        }
        let norm2 = amplitudes.norm_squared();
        if (norm2 - 1.0).abs() > TOL_NORM {
            return Err(QuantumError::NotNormalized(norm2));
        }
        Ok(StateVector { amplitudes })
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(amplitudes: Vector) -> Result<Self> {
        let norm = amplitudes.norm();
        if amplitudes.is_empty() {
            return Err(QuantumError::ZeroDimension);
        }
        if norm == 0.0 {
            return Err(QuantumError::NotNormalized(0.0));
        }
        Ok(StateVector {
            amplitudes: amplitudes.unscale(norm),
        })
    }

    pub fn from_complex(amplitudes: &[Complex64]) -> Result<Self> {
        StateVector::new(Vector::from_column_slice(amplitudes))
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        StateVector::new(Vector::from_iterator(
            amplitudes.len(),
            amplitudes.iter().map(|&x| c(x, 0.0)),
        ))
    }

    /// Computational basis vector `e_index`.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index {index} out of range for dim {dim}");
        let mut v = Vector::zeros(dim);
        v[index] = c(1.0, 0.0);
        StateVector { amplitudes: v }
    }

    pub fn plus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        StateVector::from_real(&[h, h]).expect("unit vector")
    }

    /// The two-qubit singlet `(|01> - |10>)/sqrt 2`.
    pub fn singlet() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        StateVector::from_real(&[0.0, h, -h, 0.0]).expect("unit vector")
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &Vector {
        &self.amplitudes
    }

    pub fn projector(&self) -> DensityOperator {
        DensityOperator {
            matrix: &self.amplitudes * self.amplitudes.adjoint(),
        }
    }
}

/// A Hermitian, positive semidefinite, unit-trace operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: Matrix,
}

impl DensityOperator {
    pub fn new(matrix: Matrix) -> Result<Self> {
        DensityOperator::with_tolerance(matrix, TOL_NUM)
    }

    pub fn with_tolerance(matrix: Matrix, tol: f64) -> Result<Self> {
        check_square(&matrix)?;
        let herm = hermitian_deviation(&matrix);
        if herm > tol {
            return Err(QuantumError::NotHermitian(herm));
        }
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > tol {
            return Err(QuantumError::TraceNotOne(trace));
        }
        let min = hermitian_eigenvalues(&matrix)[0];
        if min < -tol {
            return Err(QuantumError::NotPositive(min));
        }
        Ok(DensityOperator { matrix })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityOperator {
            matrix: identity(dim).unscale(dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    /// Expectation value `tr(rho A)` of an arbitrary operator.
    pub fn expectation(&self, operator: &Matrix) -> Result<Complex64> {
        if operator.nrows() != self.dim() || operator.ncols() != self.dim() {
            return Err(QuantumError::DimensionMismatch {
                expected: self.dim(),
                found: operator.nrows(),
            });
        }
        Ok((&self.matrix * operator).trace())
    }
}

impl From<&StateVector> for DensityOperator {
    fn from(psi: &StateVector) -> Self {
        psi.projector()
    }
}

/// A POVM element: Hermitian with spectrum in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Effect {
    matrix: Matrix,
}

impl Effect {
    pub fn new(matrix: Matrix) -> Result<Self> {
        Effect::with_tolerance(matrix, TOL_NUM)
    }

    pub fn with_tolerance(matrix: Matrix, tol: f64) -> Result<Self> {
        check_square(&matrix)?;
        let herm = hermitian_deviation(&matrix);
        if herm > tol {
            return Err(QuantumError::NotHermitian(herm));
        }
        let ev = hermitian_eigenvalues(&matrix);
        if ev[0] < -tol {
            return Err(QuantumError::NotPositive(ev[0]));
        }
        let top = ev[ev.len() - 1];
        if top > 1.0 + tol {
            return Err(QuantumError::EffectAboveOne(top));
        }
        Ok(Effect { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InvariantCheck {
    pub passed: bool,
    pub max_deviation: f64,
}

impl InvariantCheck {
    fn new(max_deviation: f64, tol: f64) -> Self {
        InvariantCheck {
            passed: max_deviation <= tol,
            max_deviation,
        }
    }
}

/// Per-invariant outcome of [`validate_povm`]. Positivity deviation is how far
/// the most negative eigenvalue of any effect falls below zero; completeness
/// deviation is the largest entry of `sum E_i - I`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PovmReport {
    pub hermitian: InvariantCheck,
    pub positive: InvariantCheck,
    pub complete: InvariantCheck,
}

impl PovmReport {
    pub fn passed(&self) -> bool {
        self.hermitian.passed && self.positive.passed && self.complete.passed
    }

    fn first_failure(&self) -> Option<&'static str> {
        [
            (self.hermitian.passed, "Hermiticity"),
            (self.positive.passed, "positivity"),
            (self.complete.passed, "completeness"),
        ]
        .into_iter()
        .find(|(ok, _)| !ok)
        .map(|(_, name)| name)
    }
}

pub fn validate_povm(effects: &[Matrix], tol: f64) -> Result<PovmReport> {
    let Some(first) = effects.first() else {
        return Err(QuantumError::EmptyPovm);
    };
    let dim = check_square(first)?;
    for e in effects {
        if check_square(e)? != dim {
            return Err(QuantumError::DimensionMismatch {
                expected: dim,
                found: e.nrows(),
            });
        }
    }
    let hermitian = effects.iter().map(hermitian_deviation).fold(0.0, f64::max);
    let positive = effects
        .iter()
        .map(|e| (-hermitian_eigenvalues(e)[0]).max(0.0))
        .fold(0.0, f64::max);
    let sum = effects.iter().fold(Matrix::zeros(dim, dim), |acc, e| acc + e);
    let complete = max_abs(&(sum - identity(dim)));
    Ok(PovmReport {
        hermitian: InvariantCheck::new(hermitian, tol),
        positive: InvariantCheck::new(positive, tol),
        complete: InvariantCheck::new(complete, tol),
    })
}

/// An ordered, labelled list of effects summing to the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    effects: Vec<Effect>,
    labels: Vec<String>,
}

impl Povm {
    pub fn new(effects: Vec<Matrix>, labels: Vec<String>) -> Result<Self> {
        Povm::with_tolerance(effects, labels, TOL_NUM)
    }

    pub fn with_tolerance(effects: Vec<Matrix>, labels: Vec<String>, tol: f64) -> Result<Self> {
        if effects.len() != labels.len() {
            return Err(QuantumError::LabelCount {
                effects: effects.len(),
                labels: labels.len(),
            });
        }
        let report = validate_povm(&effects, tol)?;
        if let Some(failed) = report.first_failure() {
            return Err(QuantumError::InvalidPovm(failed.to_owned()));
        }
        Ok(Povm {
            effects: effects.into_iter().map(|matrix| Effect { matrix }).collect(),
            labels,
        })
    }

    /// Projective measurement onto the given orthonormal vectors.
    pub fn projective(basis: &[StateVector], labels: Vec<String>) -> Result<Self> {
        Povm::new(
            basis.iter().map(|v| v.projector().matrix).collect(),
            labels,
        )
    }

    /// Computational-basis measurement with outcomes labelled `0..dim`.
    pub fn computational(dim: usize) -> Self {
        let basis: Vec<_> = (0..dim).map(|i| StateVector::basis(dim, i)).collect();
        Povm::projective(&basis, (0..dim).map(|i| i.to_string()).collect())
            .expect("basis projectors form a POVM")
    }

    /// Qubit measurement in the X eigenbasis, outcomes `+` and `-`.
    pub fn qubit_x() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let minus = StateVector::from_real(&[h, -h]).expect("unit vector");
        Povm::projective(&[StateVector::plus(), minus], vec!["+".into(), "-".into()])
            .expect("basis projectors form a POVM")
    }

    pub fn dim(&self) -> usize {
        self.effects[0].dim()
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    pub fn effects(&self) -> &[Effect] {
        &self.effects
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomeDistribution {
    pub labels: Vec<String>,
    pub probabilities: Vec<f64>,
}

impl OutcomeDistribution {
    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    pub fn probability(&self, label: &str) -> Option<f64> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| self.probabilities[i])
    }
}
