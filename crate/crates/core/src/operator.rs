//! Dense complex Hermitian operators, pure states and density matrices.
//!
//! Everything is immutable after construction and arithmetic that provably
//! preserves Hermiticity (tensor products, sums, real scaling, outer
//! products) builds results entry-exact, so only genuinely external input
//! pays the symmetrization check.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::eigen::{self, Spectrum};
use crate::error::{Error, Result};
use crate::tolerances::Tolerances;

/// A square complex matrix with the Hermiticity invariant
/// `entries[i][j] == conj(entries[j][i])`.
///
/// Construction symmetrizes the input to `(A + A†)/2` when the residue is
/// within tolerance and rejects it otherwise, so file-format rounding is
/// tolerated while genuinely non-Hermitian input is caught.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    dim: usize,
    entries: Vec<Complex64>,
}

impl HermitianOperator {
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        Self::new_with(dim, entries, &Tolerances::default())
    }

    pub fn new_with(dim: usize, entries: Vec<Complex64>, tol: &Tolerances) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::BadShape {
                dim,
                len: entries.len(),
            });
        }
        let mut residue = 0.0f64;
        for i in 0..dim {
            for j in i..dim {
                residue = residue.max((entries[i * dim + j] - entries[j * dim + i].conj()).norm());
            }
        }
        if residue > tol.hermiticity {
            return Err(Error::NotHermitian {
                residue,
                tol: tol.hermiticity,
            });
        }
        let mut sym = entries;
        for i in 0..dim {
            sym[i * dim + i] = Complex64::new(sym[i * dim + i].re, 0.0);
            for j in i + 1..dim {
                let avg = (sym[i * dim + j] + sym[j * dim + i].conj()) * 0.5;
                sym[i * dim + j] = avg;
                sym[j * dim + i] = avg.conj();
            }
        }
        Ok(Self { dim, entries: sym })
    }

    /// Build from entries that are Hermitian by construction; callers inside
    /// the crate guarantee exact symmetry.
    pub(crate) fn from_exact_parts(dim: usize, entries: Vec<Complex64>) -> Self {
        debug_assert_eq!(entries.len(), dim * dim);
        Self { dim, entries }
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        Self { dim, entries }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let dim = diag.len();
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for (i, &d) in diag.iter().enumerate() {
            entries[i * dim + i] = Complex64::new(d, 0.0);
        }
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim + j]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Transpose; for a Hermitian operator this is the entrywise conjugate
    /// and therefore Hermitian with the same spectrum.
    pub fn transposed(&self) -> Self {
        let n = self.dim;
        let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                entries[j * n + i] = self.entries[i * n + j];
            }
        }
        Self { dim: n, entries }
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim)
            .map(|i| self.entries[i * self.dim + i].re)
            .sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest entrywise distance to another operator of the same dimension.
    pub fn max_entry_distance(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "operator dimensions differ");
        self.entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn spectrum(&self) -> Result<Spectrum> {
        eigen::eigendecompose(self, &Tolerances::default())
    }

    pub fn spectrum_with(&self, tol: &Tolerances) -> Result<Spectrum> {
        eigen::eigendecompose(self, tol)
    }

    /// Kronecker product `self ⊗ other`.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        self.tensor_with(other, &Tolerances::default())
    }

    pub fn tensor_with(&self, other: &Self, tol: &Tolerances) -> Result<Self> {
        let dim = self.dim * other.dim;
        if dim > tol.max_tensor_dim {
            return Err(Error::TensorDimCap {
                dim,
                cap: tol.max_tensor_dim,
            });
        }
        let (da, db) = (self.dim, other.dim);
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i1 in 0..da {
            for j1 in 0..da {
                let a = self.entries[i1 * da + j1];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for i2 in 0..db {
                    for j2 in 0..db {
                        entries[(i1 * db + i2) * dim + (j1 * db + j2)] =
                            a * other.entries[i2 * db + j2];
                    }
                }
            }
        }
        Ok(Self { dim, entries })
    }

    /// Trace norm `Tr|A| = Tr√(AA†)`; for Hermitian operators this is the
    /// sum of absolute eigenvalues.
    pub fn trace_norm(&self) -> Result<f64> {
        Ok(self.spectrum()?.eigenvalues().iter().map(|l| l.abs()).sum())
    }
}

impl Add<&HermitianOperator> for &HermitianOperator {
    type Output = HermitianOperator;

    fn add(self, rhs: &HermitianOperator) -> HermitianOperator {
        assert_eq!(self.dim, rhs.dim, "operator dimensions differ");
        HermitianOperator {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(rhs.entries.iter())
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub<&HermitianOperator> for &HermitianOperator {
    type Output = HermitianOperator;

    fn sub(self, rhs: &HermitianOperator) -> HermitianOperator {
        assert_eq!(self.dim, rhs.dim, "operator dimensions differ");
        HermitianOperator {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(rhs.entries.iter())
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul<f64> for &HermitianOperator {
    type Output = HermitianOperator;

    fn mul(self, rhs: f64) -> HermitianOperator {
        HermitianOperator {
            dim: self.dim,
            entries: self.entries.iter().map(|a| a * rhs).collect(),
        }
    }
}

/// A pure-state amplitude vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    amplitudes: Vec<Complex64>,
}

impl Ket {
    pub fn new(amplitudes: Vec<Complex64>) -> Self {
        Self { amplitudes }
    }

    pub fn from_real(amplitudes: &[f64]) -> Self {
        Self {
            amplitudes: amplitudes.iter().map(|&r| Complex64::new(r, 0.0)).collect(),
        }
    }

    /// Computational basis vector |index⟩.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n < 1e-15 {
            return Err(Error::ParamOutOfRange {
                name: "ket norm",
                value: n,
                min: 1e-15,
                max: f64::INFINITY,
            });
        }
        Ok(Self {
            amplitudes: self.amplitudes.iter().map(|z| z / n).collect(),
        })
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let mut amplitudes = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        Self { amplitudes }
    }

    /// Rank-one projector |ψ⟩⟨ψ|.
    pub fn outer(&self) -> HermitianOperator {
        let n = self.dim();
        let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                entries[i * n + j] = self.amplitudes[i] * self.amplitudes[j].conj();
            }
        }
        HermitianOperator::from_exact_parts(n, entries)
    }
}

/// A positive semidefinite, unit-trace Hermitian operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    op: HermitianOperator,
}

impl DensityMatrix {
    /// Validate an arbitrary Hermitian operator as a state. This runs a full
    /// eigendecomposition; constructors below that are positive by
    /// construction skip it.
    pub fn new(op: HermitianOperator) -> Result<Self> {
        Self::new_with(op, &Tolerances::default())
    }

    pub fn new_with(op: HermitianOperator, tol: &Tolerances) -> Result<Self> {
        let trace = op.trace();
        if (trace - 1.0).abs() > tol.unit_trace {
            return Err(Error::TraceNotOne { trace });
        }
        let min_eig = op.spectrum_with(tol)?.lambda_minus();
        if min_eig < -tol.psd_floor {
            return Err(Error::NotPositive { min_eig });
        }
        Ok(Self { op })
    }

    /// Wrap an operator already known to satisfy the state invariants
    /// (tensor products and convex mixtures of valid states).
    pub(crate) fn from_valid_op(op: HermitianOperator) -> Self {
        Self { op }
    }

    /// |ψ⟩⟨ψ| for a (re-normalized) pure state.
    pub fn from_pure(psi: &Ket) -> Result<Self> {
        Ok(Self {
            op: psi.normalized()?.outer(),
        })
    }

    /// Convex mixture Σ wᵢ ρᵢ; positive by construction.
    pub fn mixture(parts: &[(f64, DensityMatrix)]) -> Result<Self> {
        let Some((_, first)) = parts.first() else {
            return Err(Error::ArityMismatch {
                context: "mixture",
                expected: 1,
                got: 0,
            });
        };
        let dim = first.dim();
        let mut total = 0.0;
        let mut op = HermitianOperator::zeros(dim);
        for (w, rho) in parts {
            if *w < 0.0 {
                return Err(Error::ParamOutOfRange {
                    name: "mixture weight",
                    value: *w,
                    min: 0.0,
                    max: 1.0,
                });
            }
            if rho.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: rho.dim(),
                });
            }
            total += w;
            op = &op + &(&rho.op * *w);
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::TraceNotOne { trace: total });
        }
        Ok(Self { op })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            op: &HermitianOperator::identity(dim) * (1.0 / dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn op(&self) -> &HermitianOperator {
        &self.op
    }

    /// Tr(ρ²); equals 1 exactly on pure states.
    pub fn purity(&self) -> f64 {
        self.op.entries().iter().map(|z| z.norm_sqr()).sum()
    }

    /// Trace distance `½·Tr|ρ − σ|` in [0, 1].
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(0.5 * (&self.op - &other.op).trace_norm()?)
    }

    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        Ok(DensityMatrix {
            op: self.op.tensor(&other.op)?,
        })
    }
}

/// Tr(AB) for two operators of equal dimension, without forming AB.
pub fn product_trace(a: &HermitianOperator, b: &HermitianOperator) -> Result<Complex64> {
    let n = a.dim();
    if n != b.dim() {
        return Err(Error::DimensionMismatch {
            left: n,
            right: b.dim(),
        });
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a.entry(i, j) * b.entry(j, i);
        }
    }
    Ok(acc)
}

/// Real expectation value Tr(ρA).
///
/// The trace of a product of Hermitian operators is real up to rounding;
/// an imaginary residue beyond tolerance signals an internal inconsistency
/// and is reported rather than discarded.
pub fn expectation(a: &HermitianOperator, rho: &DensityMatrix) -> Result<f64> {
    expectation_with(a, rho, &Tolerances::default())
}

pub fn expectation_with(
    a: &HermitianOperator,
    rho: &DensityMatrix,
    tol: &Tolerances,
) -> Result<f64> {
    let n = a.dim();
    if n != rho.dim() {
        return Err(Error::DimensionMismatch {
            left: n,
            right: rho.dim(),
        });
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += rho.op().entry(i, j) * a.entry(j, i);
        }
    }
    if acc.im.abs() > tol.imag_residue {
        return Err(Error::ImaginaryResidue { residue: acc.im });
    }
    Ok(acc.re)
}
