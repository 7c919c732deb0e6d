//! Seeded random states, operators and POVMs for property checks.

use nalgebra::SymmetricEigen;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{c, DensityOperator, Matrix, Povm, StateVector, Vector};

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| {
        c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Full-rank random density operator `G G† / tr(G G†)`.
pub fn ginibre_density<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityOperator {
    let g = ginibre_matrix(dim, dim, rng);
    let gg = &g * g.adjoint();
    let tr = gg.trace().re;
    DensityOperator {
        matrix: gg.unscale(tr),
    }
}

/// Haar-distributed pure state (normalized complex Gaussian vector).
pub fn random_unitary_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> StateVector {
    let v = Vector::from_fn(dim, |_, _| {
        c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    StateVector::normalized(v).expect("gaussian vector is nonzero")
}

/// Random POVM with `outcomes` effects: positive `A_i = G_i G_i†`, then
/// `E_i = S^{-1/2} A_i S^{-1/2}` with `S = sum A_i`.
pub fn random_povm<R: Rng + ?Sized>(dim: usize, outcomes: usize, rng: &mut R) -> Povm {
    let raw: Vec<Matrix> = (0..outcomes)
        .map(|_| {
            let g = ginibre_matrix(dim, dim, rng);
            &g * g.adjoint()
        })
        .collect();
    let sum = raw.iter().fold(Matrix::zeros(dim, dim), |acc, a| acc + a);
    let eig = SymmetricEigen::new(sum);
    let inv_sqrt = Matrix::from_diagonal(&eig.eigenvalues.map(|l| c(l.sqrt().recip(), 0.0)));
    let w = &eig.eigenvectors * inv_sqrt * eig.eigenvectors.adjoint();
    let effects = raw
        .iter()
        .map(|a| {
            let e = &w * a * &w;
            // Exact Hermiticity; the product is Hermitian up to roundoff.
            (&e + e.adjoint()).scale(0.5)
        })
        .collect();
    Povm::new(effects, (0..outcomes).map(|i| i.to_string()).collect())
        .expect("normalized positive effects form a POVM")
}
