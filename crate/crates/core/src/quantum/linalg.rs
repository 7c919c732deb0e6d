use num_complex::Complex64;

use super::{
    DensityOperator, Effect, Matrix, OutcomeDistribution, Povm, QuantumError, Result, StateVector,
    TOL_NUM,
};

/// Kronecker product. The left factor indexes the coarse (slow) index, so
/// `|i> ⊗ |j>` is basis vector `i * dim(right) + j`.
pub trait Tensor<Rhs = Self> {
    type Output;
    fn tensor(&self, rhs: &Rhs) -> Self::Output;
}

impl Tensor for Matrix {
    type Output = Matrix;
    fn tensor(&self, rhs: &Matrix) -> Matrix {
        self.kronecker(rhs)
    }
}

impl Tensor for StateVector {
    type Output = StateVector;
    fn tensor(&self, rhs: &StateVector) -> StateVector {
        StateVector {
            amplitudes: self.amplitudes.kronecker(&rhs.amplitudes),
        }
    }
}

impl Tensor for DensityOperator {
    type Output = DensityOperator;
    fn tensor(&self, rhs: &DensityOperator) -> DensityOperator {
        DensityOperator {
            matrix: self.matrix.kronecker(&rhs.matrix),
        }
    }
}

impl Tensor for Effect {
    type Output = Effect;
    fn tensor(&self, rhs: &Effect) -> Effect {
        Effect {
            matrix: self.matrix.kronecker(&rhs.matrix),
        }
    }
}

/// Born-rule statistics `p_i = tr(rho E_i)`. Values below zero by no more
/// than the tolerance are clamped to zero (and values above one to one), after
/// which the distribution is renormalized; anything further out is an error.
pub fn born_distribution(rho: &DensityOperator, povm: &Povm) -> Result<OutcomeDistribution> {
    if rho.dim() != povm.dim() {
        return Err(QuantumError::DimensionMismatch {
            expected: povm.dim(),
            found: rho.dim(),
        });
    }
    let mut clamped = false;
    let mut probabilities = Vec::with_capacity(povm.len());
    for (effect, label) in povm.effects().iter().zip(povm.labels()) {
        let p = (rho.matrix() * effect.matrix()).trace().re;
        if p < -TOL_NUM {
            return Err(QuantumError::NegativeProbability {
                label: label.clone(),
                value: p,
            });
        }
        let q = p.clamp(0.0, 1.0);
        clamped |= q != p;
        probabilities.push(q);
    }
    if clamped {
        let total: f64 = probabilities.iter().sum();
        probabilities.iter_mut().for_each(|p| *p /= total);
    }
    Ok(OutcomeDistribution {
        labels: povm.labels().to_vec(),
        probabilities,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keep {
    /// Keep the left factor, trace out the right.
    Left,
    /// Keep the right factor, trace out the left.
    Right,
}

/// Reduced operator on one factor of a `left x right` bipartition.
pub fn partial_trace(
    rho: &DensityOperator,
    (left, right): (usize, usize),
    keep: Keep,
) -> Result<DensityOperator> {
    if left == 0 || right == 0 || left * right != rho.dim() {
        return Err(QuantumError::Factorization {
            dim: rho.dim(),
            left,
            right,
        });
    }
    let m = rho.matrix();
    let matrix = match keep {
        Keep::Left => Matrix::from_fn(left, left, |i, j| {
            (0..right).map(|k| m[(i * right + k, j * right + k)]).sum()
        }),
        Keep::Right => Matrix::from_fn(right, right, |k, l| {
            (0..left).map(|i| m[(i * right + k, i * right + l)]).sum()
        }),
    };
    Ok(DensityOperator { matrix })
}

/// Inner product `<psi|phi>`, antilinear in `psi`.
pub fn overlap(psi: &StateVector, phi: &StateVector) -> Result<Complex64> {
    if psi.dim() != phi.dim() {
        return Err(QuantumError::DimensionMismatch {
            expected: psi.dim(),
            found: phi.dim(),
        });
    }
    Ok(psi.amplitudes().dotc(phi.amplitudes()))
}
