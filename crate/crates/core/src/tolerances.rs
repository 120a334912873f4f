//! Numerical tolerances and caps used across the operator layer.
//!
//! Everything tunable lives in one record so that callers (and the CLI's
//! `--tol-profile` flag) can swap profiles without chasing magic numbers
//! through the code.

/// Tolerance profile for operator construction, validation and spectra.
#[derive(Debug, Clone)]
pub struct Tolerances {
    /// Max admissible anti-Hermitian residue `max_ij |a_ij - conj(a_ji)|`
    /// before construction rejects the input. Inputs below this are
    /// symmetrized to `(A + A†)/2`.
    pub hermiticity: f64,
    /// Eigenvalues of a density matrix may dip this far below zero.
    pub psd_floor: f64,
    /// Admissible deviation of a density-matrix trace from 1.
    pub unit_trace: f64,
    /// Jacobi sweep target: total off-diagonal norm relative to the
    /// Frobenius scale of the matrix.
    pub eigen_off_diag: f64,
    /// Hard cap on Jacobi sweeps before reporting non-convergence.
    pub eigen_max_sweeps: usize,
    /// Admissible reconstruction error `‖A − VΛV†‖_max` of a spectrum.
    pub reconstruction: f64,
    /// Admissible deviation of the eigenvector matrix from unitarity.
    pub unitarity: f64,
    /// Imaginary residue allowed in a real expectation value.
    pub imag_residue: f64,
    /// Largest operator dimension `tensor` is allowed to produce.
    pub max_tensor_dim: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermiticity: 1e-12,
            psd_floor: 1e-10,
            unit_trace: 1e-12,
            eigen_off_diag: 1e-12,
            eigen_max_sweeps: 100,
            reconstruction: 1e-9,
            unitarity: 1e-9,
            imag_residue: 1e-10,
            max_tensor_dim: 4096,
        }
    }
}

impl Tolerances {
    /// Tighter profile for inputs that are supposed to be exact
    /// (hand-written fixtures, machine-generated files).
    pub fn strict() -> Self {
        Self {
            hermiticity: 1e-13,
            psd_floor: 1e-12,
            unit_trace: 1e-13,
            imag_residue: 1e-12,
            ..Self::default()
        }
    }
}
