//! Small dense helpers for 3×3 complex matrices.

use nalgebra::SymmetricEigen;

use crate::{Mat3, C64};

/// Largest entrywise deviation from Hermiticity, `max |H_jk − conj(H_kj)|`.
pub fn hermiticity_defect(h: &Mat3) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..3 {
        for k in 0..3 {
            worst = worst.max((h[(j, k)] - h[(k, j)].conj()).norm());
        }
    }
    worst
}

/// Propagator `exp(−i·H·dt)` of a Hermitian `H` via its spectral decomposition.
///
/// The result is unitary to rounding because the eigenvector matrix is.
pub fn expm_hermitian(h: &Mat3, dt: f64) -> Mat3 {
    let eig = SymmetricEigen::new(*h);
    let v = eig.eigenvectors;
    let mut scaled = v;
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        let phase = C64::from_polar(1.0, -lambda * dt);
        for j in 0..3 {
            scaled[(j, k)] *= phase;
        }
    }
    scaled * v.adjoint()
}

/// `A·B − B·A`.
pub fn commutator(a: &Mat3, b: &Mat3) -> Mat3 {
    a * b - b * a
}
