//! Cyclic Jacobi eigensolver for dense complex Hermitian matrices.
//!
//! Dimensions in this toolkit stay small (a few thousand at the very top),
//! so a Jacobi sweep is preferred over anything faster-but-fussier: it is
//! unconditionally stable, keeps the accumulated eigenvector matrix unitary
//! to machine precision, and converges quadratically once the off-diagonal
//! mass is small.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::{HermitianOperator, Ket};
use crate::tolerances::Tolerances;

/// Eigendecomposition of a Hermitian operator.
///
/// Eigenvalues are sorted descending; ties keep the order in which the
/// diagonalization produced them, so extreme-eigenvalue extraction is
/// deterministic. Column `j` of the eigenvector matrix belongs to
/// `eigenvalues[j]`.
#[derive(Debug, Clone)]
pub struct Spectrum {
    dim: usize,
    eigenvalues: Vec<f64>,
    /// Row-major unitary matrix; column j is the j-th eigenvector.
    vectors: Vec<Complex64>,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Largest eigenvalue (λ₊).
    pub fn lambda_plus(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// Smallest eigenvalue (λ₋).
    pub fn lambda_minus(&self) -> f64 {
        self.eigenvalues[self.dim - 1]
    }

    pub fn eigenvector(&self, j: usize) -> Ket {
        let n = self.dim;
        Ket::new((0..n).map(|i| self.vectors[i * n + j]).collect())
    }

    /// Entry (i, j) of the eigenvector matrix.
    pub fn vector_entry(&self, i: usize, j: usize) -> Complex64 {
        self.vectors[i * self.dim + j]
    }

    /// Rebuild `V Λ V†`; used to check reconstruction quality.
    pub fn reconstruct(&self) -> HermitianOperator {
        let n = self.dim;
        let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, &lambda) in self.eigenvalues.iter().enumerate() {
                    acc += self.vectors[i * n + k] * self.vectors[j * n + k].conj() * lambda;
                }
                entries[i * n + j] = acc;
            }
        }
        HermitianOperator::from_exact_parts(n, entries)
    }

    /// Max deviation of `V†V` from the identity.
    pub fn unitarity_residue(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for a in 0..n {
            for b in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for i in 0..n {
                    acc += self.vectors[i * n + a].conj() * self.vectors[i * n + b];
                }
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((acc - target).norm());
            }
        }
        worst
    }
}

fn off_diagonal_norm(entries: &[Complex64], n: usize) -> f64 {
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += entries[i * n + j].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Diagonalize a Hermitian operator with cyclic Jacobi rotations.
pub fn eigendecompose(op: &HermitianOperator, tol: &Tolerances) -> Result<Spectrum> {
    let n = op.dim();
    let mut a: Vec<Complex64> = op.entries().to_vec();
    let mut v = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        v[i * n + i] = Complex64::new(1.0, 0.0);
    }

    if n == 1 {
        return Ok(Spectrum {
            dim: 1,
            eigenvalues: vec![a[0].re],
            vectors: v,
        });
    }

    let scale = op.frobenius_norm().max(1.0);
    let target = tol.eigen_off_diag * scale;
    // Rotating on entries far below the target wastes sweeps.
    let skip = target / ((n * n) as f64);

    let mut off = off_diagonal_norm(&a, n);
    let mut sweeps = 0;
    while off > target {
        if sweeps >= tol.eigen_max_sweeps {
            return Err(Error::EigenConvergence {
                dim: n,
                sweeps,
                off,
            });
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[p * n + q];
                let m = apq.norm();
                if m <= skip {
                    continue;
                }
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                let phase = apq / m; // e^{iφ}

                // tan(2θ) = 2m / (app − aqq), |θ| ≤ π/4
                let t = if app == aqq {
                    1.0
                } else {
                    let zeta = (app - aqq) / (2.0 * m);
                    zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let s_ph = phase * s; // s·e^{iφ}
                let s_ph_c = s_ph.conj(); // s·e^{−iφ}

                // A ← U† A U with U touching columns p and q only.
                for r in 0..n {
                    let arp = a[r * n + p];
                    let arq = a[r * n + q];
                    a[r * n + p] = arp * c + arq * s_ph_c;
                    a[r * n + q] = -arp * s_ph + arq * c;
                }
                for col in 0..n {
                    let apc = a[p * n + col];
                    let aqc = a[q * n + col];
                    a[p * n + col] = apc * c + aqc * s_ph;
                    a[q * n + col] = -apc * s_ph_c + aqc * c;
                }
                // Pin the rotated pivot block to its exact form.
                a[p * n + q] = Complex64::new(0.0, 0.0);
                a[q * n + p] = Complex64::new(0.0, 0.0);
                a[p * n + p] = Complex64::new(a[p * n + p].re, 0.0);
                a[q * n + q] = Complex64::new(a[q * n + q].re, 0.0);

                for r in 0..n {
                    let vrp = v[r * n + p];
                    let vrq = v[r * n + q];
                    v[r * n + p] = vrp * c + vrq * s_ph_c;
                    v[r * n + q] = -vrp * s_ph + vrq * c;
                }
            }
        }
        sweeps += 1;
        off = off_diagonal_norm(&a, n);
    }

    // Descending eigenvalue order, stable under ties.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[j * n + j]
            .re
            .partial_cmp(&a[i * n + i].re)
            .expect("eigenvalues are finite")
    });

    let eigenvalues: Vec<f64> = order.iter().map(|&k| a[k * n + k].re).collect();
    let mut vectors = vec![Complex64::new(0.0, 0.0); n * n];
    for (new_j, &old_j) in order.iter().enumerate() {
        for i in 0..n {
            vectors[i * n + new_j] = v[i * n + old_j];
        }
    }

    Ok(Spectrum {
        dim: n,
        eigenvalues,
        vectors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::HermitianOperator;
    use num_complex::Complex64;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_hermitian(dim: usize, rng: &mut StdRng) -> HermitianOperator {
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Complex64::new(rng.gen_range(-1.0..1.0), 0.0);
            for j in i + 1..dim {
                let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                entries[i * dim + j] = z;
                entries[j * dim + i] = z.conj();
            }
        }
        HermitianOperator::new(dim, entries).unwrap()
    }

    #[test]
    fn identity_eigenvalues() {
        let spectrum = eigendecompose(&HermitianOperator::identity(2), &Tolerances::default())
            .expect("identity diagonalizes");
        assert_eq!(spectrum.eigenvalues(), &[1.0, 1.0]);
    }

    #[test]
    fn diagonal_matrix_passes_through() {
        let op = HermitianOperator::from_real_diag(&[0.5, 0.5, 0.5, -0.5]);
        let spectrum = eigendecompose(&op, &Tolerances::default()).unwrap();
        assert_eq!(spectrum.eigenvalues(), &[0.5, 0.5, 0.5, -0.5]);
    }

    #[test]
    fn random_spectra_reconstruct() {
        let tol = Tolerances::default();
        let mut rng = StdRng::seed_from_u64(11);
        for dim in [2usize, 3, 5, 8, 16] {
            let op = random_hermitian(dim, &mut rng);
            let spectrum = eigendecompose(&op, &tol).unwrap();
            let rebuilt = spectrum.reconstruct();
            assert!(
                op.max_entry_distance(&rebuilt) <= tol.reconstruction,
                "reconstruction failed for dim {dim}"
            );
            assert!(spectrum.unitarity_residue() <= tol.unitarity);
            // Eigenvalue sum equals the trace.
            let sum: f64 = spectrum.eigenvalues().iter().sum();
            assert!((sum - op.trace()).abs() <= 1e-9);
        }
    }

    #[test]
    fn eigenvalues_sorted_descending() {
        let mut rng = StdRng::seed_from_u64(5);
        let op = random_hermitian(6, &mut rng);
        let spectrum = eigendecompose(&op, &Tolerances::default()).unwrap();
        for w in spectrum.eigenvalues().windows(2) {
            assert!(w[0] >= w[1]);
        }
    }
}
