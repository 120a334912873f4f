//! Measurement-device-independent entanglement estimation.
//!
//! A trusted witness W is decomposed over trusted ancilla preparations as
//! `W = Σ α_{s,t} τ_sᵀ ⊗ ω_tᵀ`. Two parties holding an unknown state feed
//! their shares, together with the prepared ancillas, into uncharacterized
//! measurements; the resulting correlation table `p(a,b|s,t)` yields
//! outcome-wise witness values `w_{a,b} = Σ α_{s,t} p(a,b|s,t)`, the
//! nonlinear value `I′ = Σ_{w_{a,b}<0} w_{a,b}`, and finally the bound
//! `E_tr ≥ −I′ / Tr|Wᵀ|`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::{expectation, product_trace, DensityMatrix, HermitianOperator, Ket};
use crate::states;
use crate::tolerances::Tolerances;

/// Entries of w_{a,b} in (−NEGATIVE_FLOOR, 0) are treated as zero so
/// rounding noise cannot inflate the nonlinear witness value.
pub const NEGATIVE_FLOOR: f64 = 1e-12;

const DECOMPOSITION_RESIDUAL_TOL: f64 = 1e-8;

/// A positive-operator-valued measurement.
#[derive(Debug, Clone)]
pub struct PovmMeasurement {
    effects: Vec<HermitianOperator>,
}

impl PovmMeasurement {
    /// Validates positivity of every effect and completeness Σ Eₐ = 𝕀.
    pub fn new(effects: Vec<HermitianOperator>) -> Result<Self> {
        let Some(first) = effects.first() else {
            return Err(Error::ArityMismatch {
                context: "povm",
                expected: 1,
                got: 0,
            });
        };
        let dim = first.dim();
        let mut sum = HermitianOperator::zeros(dim);
        for (index, effect) in effects.iter().enumerate() {
            if effect.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: effect.dim(),
                });
            }
            let min_eig = effect.spectrum()?.lambda_minus();
            if min_eig < -1e-10 {
                return Err(Error::EffectNotPositive { index, min_eig });
            }
            sum = &sum + effect;
        }
        let residue = sum.max_entry_distance(&HermitianOperator::identity(dim));
        if residue > 1e-10 {
            return Err(Error::IncompletePovm { residue });
        }
        Ok(Self { effects })
    }

    /// The trivial single-outcome measurement {𝕀}.
    pub fn trivial(dim: usize) -> Self {
        Self {
            effects: vec![HermitianOperator::identity(dim)],
        }
    }

    /// Projective measurement onto an orthonormal family of kets.
    pub fn from_projectors(kets: &[Ket]) -> Result<Self> {
        Self::new(kets.iter().map(|k| k.outer()).collect())
    }

    pub fn effects(&self) -> &[HermitianOperator] {
        &self.effects
    }

    pub fn n_outcomes(&self) -> usize {
        self.effects.len()
    }

    pub fn dim(&self) -> usize {
        self.effects[0].dim()
    }
}

/// Bell-state measurement with outcomes ordered ϕ⁻, ϕ⁺, ψ⁻, ψ⁺.
pub fn bell_measurement() -> PovmMeasurement {
    PovmMeasurement::from_projectors(&states::bell_kets()).expect("Bell projectors form a POVM")
}

/// The four qubit tetrahedron (SIC) states; tomographically complete, so
/// their pairwise tensor products span the two-qubit operator space.
pub fn tetrahedron_states() -> Vec<DensityMatrix> {
    let dirs = [
        [1.0, 1.0, 1.0],
        [1.0, -1.0, -1.0],
        [-1.0, 1.0, -1.0],
        [-1.0, -1.0, 1.0],
    ];
    let s3 = 1.0 / 3.0f64.sqrt();
    dirs.iter()
        .map(|[x, y, z]| {
            let entries = vec![
                Complex64::new(0.5 * (1.0 + z * s3), 0.0),
                Complex64::new(0.5 * x * s3, -0.5 * y * s3),
                Complex64::new(0.5 * x * s3, 0.5 * y * s3),
                Complex64::new(0.5 * (1.0 - z * s3), 0.0),
            ];
            DensityMatrix::new(HermitianOperator::from_exact_parts(2, entries))
                .expect("tetrahedron states are valid")
        })
        .collect()
}

/// Coefficients α_{s,t} and the ancilla families they refer to.
#[derive(Debug, Clone)]
pub struct MdiDecomposition {
    coefficients: Vec<f64>,
    tau: Vec<DensityMatrix>,
    omega: Vec<DensityMatrix>,
    witness_dim: usize,
}

impl MdiDecomposition {
    pub fn coefficient(&self, s: usize, t: usize) -> f64 {
        self.coefficients[s * self.omega.len() + t]
    }

    pub fn n_s(&self) -> usize {
        self.tau.len()
    }

    pub fn n_t(&self) -> usize {
        self.omega.len()
    }

    pub fn tau(&self) -> &[DensityMatrix] {
        &self.tau
    }

    pub fn omega(&self) -> &[DensityMatrix] {
        &self.omega
    }

    /// Σ α_{s,t} τ_sᵀ ⊗ ω_tᵀ.
    pub fn reconstruct(&self) -> Result<HermitianOperator> {
        let mut acc = HermitianOperator::zeros(self.witness_dim);
        for (s, tau) in self.tau.iter().enumerate() {
            let tau_t = tau.op().transposed();
            for (t, omega) in self.omega.iter().enumerate() {
                let c = self.coefficient(s, t);
                if c == 0.0 {
                    continue;
                }
                acc = &acc + &(&tau_t.tensor(&omega.op().transposed())? * c);
            }
        }
        Ok(acc)
    }
}

/// Solve `W = Σ α_{s,t} τ_sᵀ ⊗ ω_tᵀ` for α in the least-squares sense.
///
/// The normal equations are solved through the spectral pseudo-inverse of
/// the Gram matrix, so a rank-deficient basis only fails when the witness
/// actually lies outside its span.
pub fn decompose_witness(
    w: &HermitianOperator,
    basis_tau: &[DensityMatrix],
    basis_omega: &[DensityMatrix],
) -> Result<MdiDecomposition> {
    if basis_tau.is_empty() || basis_omega.is_empty() {
        return Err(Error::ArityMismatch {
            context: "decomposition basis",
            expected: 1,
            got: 0,
        });
    }
    let n_s = basis_tau.len();
    let n_t = basis_omega.len();
    let n = n_s * n_t;

    let mut basis_ops = Vec::with_capacity(n);
    for tau in basis_tau {
        let tau_t = tau.op().transposed();
        for omega in basis_omega {
            basis_ops.push(tau_t.tensor(&omega.op().transposed())?);
        }
    }
    for op in &basis_ops {
        if op.dim() != w.dim() {
            return Err(Error::DimensionMismatch {
                left: op.dim(),
                right: w.dim(),
            });
        }
    }

    // Gram matrix of Hilbert-Schmidt inner products; real symmetric PSD.
    let mut gram = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in i..n {
            let g = product_trace(&basis_ops[i], &basis_ops[j])?.re;
            gram[i * n + j] = Complex64::new(g, 0.0);
            gram[j * n + i] = Complex64::new(g, 0.0);
        }
    }
    let gram = HermitianOperator::from_exact_parts(n, gram);
    let rhs: Vec<f64> = basis_ops
        .iter()
        .map(|b| product_trace(b, w).map(|z| z.re))
        .collect::<Result<_>>()?;

    // α = G⁺ b via the spectral decomposition of G.
    let spectrum = gram.spectrum()?;
    let cutoff = spectrum.lambda_plus().abs().max(1e-300) * 1e-12;
    let mut alpha = vec![0.0f64; n];
    for k in 0..n {
        let lambda = spectrum.eigenvalues()[k];
        if lambda <= cutoff {
            continue;
        }
        let vk: Vec<f64> = (0..n).map(|i| spectrum.vector_entry(i, k).re).collect();
        let projection: f64 = vk.iter().zip(rhs.iter()).map(|(v, b)| v * b).sum();
        let scale = projection / lambda;
        for i in 0..n {
            alpha[i] += scale * vk[i];
        }
    }

    let dec = MdiDecomposition {
        coefficients: alpha,
        tau: basis_tau.to_vec(),
        omega: basis_omega.to_vec(),
        witness_dim: w.dim(),
    };
    let residual = dec.reconstruct()?.max_entry_distance(w);
    if residual > DECOMPOSITION_RESIDUAL_TOL {
        return Err(Error::DecompositionFailure {
            residual,
            tol: DECOMPOSITION_RESIDUAL_TOL,
        });
    }
    Ok(dec)
}

/// Conditional probabilities p(a,b|s,t) from one protocol run.
#[derive(Debug, Clone)]
pub struct CorrelationTable {
    n_a: usize,
    n_b: usize,
    n_s: usize,
    n_t: usize,
    p: Vec<f64>,
}

impl CorrelationTable {
    pub fn new(n_a: usize, n_b: usize, n_s: usize, n_t: usize, p: Vec<f64>) -> Result<Self> {
        if p.len() != n_a * n_b * n_s * n_t {
            return Err(Error::BadShape {
                dim: n_a * n_b * n_s * n_t,
                len: p.len(),
            });
        }
        let table = Self {
            n_a,
            n_b,
            n_s,
            n_t,
            p,
        };
        for &value in &table.p {
            if !(-1e-12..=1.0 + 1e-12).contains(&value) {
                return Err(Error::ParamOutOfRange {
                    name: "p(a,b|s,t)",
                    value,
                    min: 0.0,
                    max: 1.0,
                });
            }
        }
        for s in 0..n_s {
            for t in 0..n_t {
                let mut sum = 0.0;
                for a in 0..n_a {
                    for b in 0..n_b {
                        sum += table.prob(a, b, s, t);
                    }
                }
                if (sum - 1.0).abs() > 1e-10 {
                    return Err(Error::TraceNotOne { trace: sum });
                }
            }
        }
        Ok(table)
    }

    pub fn prob(&self, a: usize, b: usize, s: usize, t: usize) -> f64 {
        self.p[((a * self.n_b + b) * self.n_s + s) * self.n_t + t]
    }

    pub fn n_a(&self) -> usize {
        self.n_a
    }

    pub fn n_b(&self) -> usize {
        self.n_b
    }

    pub fn n_s(&self) -> usize {
        self.n_s
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }
}

/// p(a,b|s,t) = Tr[(A_a ⊗ B_b)(τ_s ⊗ ρ ⊗ ω_t)] with the fixed factor order
/// (ancilla-A, ρ_A, ρ_B, ancilla-B).
pub fn simulate(
    rho: &DensityMatrix,
    alice: &PovmMeasurement,
    bob: &PovmMeasurement,
    dec: &MdiDecomposition,
) -> Result<CorrelationTable> {
    let d_tau = dec.tau[0].dim();
    let d_omega = dec.omega[0].dim();
    if !alice.dim().is_multiple_of(d_tau) {
        return Err(Error::DimensionMismatch {
            left: alice.dim(),
            right: d_tau,
        });
    }
    if !bob.dim().is_multiple_of(d_omega) {
        return Err(Error::DimensionMismatch {
            left: bob.dim(),
            right: d_omega,
        });
    }
    let d_a = alice.dim() / d_tau;
    let d_b = bob.dim() / d_omega;
    if d_a * d_b != rho.dim() {
        return Err(Error::DimensionMismatch {
            left: d_a * d_b,
            right: rho.dim(),
        });
    }

    let n_a = alice.n_outcomes();
    let n_b = bob.n_outcomes();
    let n_s = dec.n_s();
    let n_t = dec.n_t();

    // Tolerate the larger joint dimension d_tau·d_ρ·d_omega.
    let mut tol = Tolerances::default();
    tol.max_tensor_dim = tol.max_tensor_dim.max(d_tau * rho.dim() * d_omega);

    let mut joint_ops = Vec::with_capacity(n_a * n_b);
    for ea in alice.effects() {
        for eb in bob.effects() {
            joint_ops.push(ea.tensor_with(eb, &tol)?);
        }
    }

    let mut p = vec![0.0f64; n_a * n_b * n_s * n_t];
    for (s, tau) in dec.tau.iter().enumerate() {
        for (t, omega) in dec.omega.iter().enumerate() {
            let joint_state = DensityMatrix::new_unchecked_product(tau, rho, omega, &tol)?;
            for a in 0..n_a {
                for b in 0..n_b {
                    let value = expectation(&joint_ops[a * n_b + b], &joint_state)?;
                    p[((a * n_b + b) * n_s + s) * n_t + t] = value.clamp(-1e-12, 1.0 + 1e-12);
                }
            }
        }
    }
    CorrelationTable::new(n_a, n_b, n_s, n_t, p)
}

/// Outcome-wise witness values w_{a,b} = Σ_{s,t} α_{s,t} p(a,b|s,t).
#[derive(Debug, Clone)]
pub struct WitnessValueTable {
    n_a: usize,
    n_b: usize,
    values: Vec<f64>,
}

impl WitnessValueTable {
    pub fn value(&self, a: usize, b: usize) -> f64 {
        self.values[a * self.n_b + b]
    }

    pub fn n_a(&self) -> usize {
        self.n_a
    }

    pub fn n_b(&self) -> usize {
        self.n_b
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }
}

pub fn outcome_values(
    dec: &MdiDecomposition,
    table: &CorrelationTable,
) -> Result<WitnessValueTable> {
    if table.n_s() != dec.n_s() || table.n_t() != dec.n_t() {
        return Err(Error::DimensionMismatch {
            left: table.n_s() * table.n_t(),
            right: dec.n_s() * dec.n_t(),
        });
    }
    let (n_a, n_b) = (table.n_a(), table.n_b());
    let mut values = vec![0.0f64; n_a * n_b];
    for a in 0..n_a {
        for b in 0..n_b {
            let mut acc = 0.0;
            for s in 0..dec.n_s() {
                for t in 0..dec.n_t() {
                    acc += dec.coefficient(s, t) * table.prob(a, b, s, t);
                }
            }
            values[a * n_b + b] = acc;
        }
    }
    Ok(WitnessValueTable { n_a, n_b, values })
}

/// Nonlinear MDI witness value I′ = Σ_{w_{a,b} < 0} w_{a,b}.
///
/// Entries inside (−1e-12, 0) count as zero.
pub fn mdi_value(table: &WitnessValueTable) -> f64 {
    table
        .values()
        .iter()
        .filter(|&&w| w < -NEGATIVE_FLOOR)
        .sum()
}

/// E_tr ≥ −I′ / Tr|Wᵀ|, clamped at zero.
///
/// Transposition preserves the spectrum of a Hermitian operator, so
/// Tr|Wᵀ| = Tr|W|; the transpose route is still evaluated directly.
pub fn mdi_trace_bound(i_prime: f64, w: &HermitianOperator) -> Result<f64> {
    let trace_norm = w.transposed().trace_norm()?;
    if trace_norm <= 1e-14 {
        return Err(Error::ZeroWitness);
    }
    Ok((-i_prime / trace_norm).max(0.0))
}

impl DensityMatrix {
    /// τ ⊗ ρ ⊗ ω; positive with unit trace by construction.
    fn new_unchecked_product(
        tau: &DensityMatrix,
        rho: &DensityMatrix,
        omega: &DensityMatrix,
        tol: &Tolerances,
    ) -> Result<DensityMatrix> {
        let op = tau
            .op()
            .tensor_with(rho.op(), tol)?
            .tensor_with(omega.op(), tol)?;
        Ok(DensityMatrix::from_valid_op(op))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states;
    use approx::assert_abs_diff_eq;

    fn werner_witness() -> HermitianOperator {
        &(&HermitianOperator::identity(4) * 0.5) - &states::singlet_ket().outer()
    }

    fn tetra_decomposition(w: &HermitianOperator) -> MdiDecomposition {
        let tetra = tetrahedron_states();
        decompose_witness(w, &tetra, &tetra).unwrap()
    }

    #[test]
    fn identity_decomposes_over_tetrahedron() {
        let tetra = tetrahedron_states();
        let dec = decompose_witness(&HermitianOperator::identity(4), &tetra, &tetra).unwrap();
        let residual = dec
            .reconstruct()
            .unwrap()
            .max_entry_distance(&HermitianOperator::identity(4));
        assert!(residual <= 1e-10, "residual {residual}");
    }

    #[test]
    fn werner_witness_decomposes_over_tetrahedron() {
        let w = werner_witness();
        let dec = tetra_decomposition(&w);
        let residual = dec.reconstruct().unwrap().max_entry_distance(&w);
        assert!(residual <= 1e-10, "residual {residual}");
    }

    #[test]
    fn rank_deficient_basis_fails_loudly() {
        let single = vec![DensityMatrix::from_pure(&Ket::basis(2, 0)).unwrap()];
        let err = decompose_witness(&werner_witness(), &single, &single).unwrap_err();
        assert!(matches!(err, Error::DecompositionFailure { .. }));
    }

    #[test]
    fn trivial_measurement_gives_unit_probability() {
        let rho = DensityMatrix::from_pure(&Ket::basis(2, 0).tensor(&Ket::basis(2, 0))).unwrap();
        let dec = tetra_decomposition(&HermitianOperator::identity(4));
        let table = simulate(
            &rho,
            &PovmMeasurement::trivial(4),
            &PovmMeasurement::trivial(4),
            &dec,
        )
        .unwrap();
        for s in 0..4 {
            for t in 0..4 {
                assert_abs_diff_eq!(table.prob(0, 0, s, t), 1.0, epsilon = 1e-10);
            }
        }
    }

    fn werner_outcome_table(v: f64) -> WitnessValueTable {
        let rho = states::werner(v).unwrap();
        let dec = tetra_decomposition(&werner_witness());
        let bell = bell_measurement();
        let table = simulate(&rho, &bell, &bell, &dec).unwrap();
        outcome_values(&dec, &table).unwrap()
    }

    #[test]
    fn werner_outcome_values_match_closed_form() {
        for i in 0..=5 {
            let v = i as f64 / 5.0;
            let w_ab = werner_outcome_table(v);
            for a in 0..4 {
                for b in 0..4 {
                    let expected = if a == b {
                        (1.0 - 3.0 * v) / 16.0
                    } else {
                        (1.0 + v) / 16.0
                    };
                    assert_abs_diff_eq!(w_ab.value(a, b), expected, epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn outcome_values_conserve_witness_trace() {
        for v in [0.0, 0.4, 1.0] {
            let w_ab = werner_outcome_table(v);
            // Σ w_{a,b} = Tr(Wᵀ) = 1 for the Werner witness.
            assert_abs_diff_eq!(w_ab.sum(), 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn mdi_value_on_werner_extremes() {
        let singlet = werner_outcome_table(1.0);
        assert_abs_diff_eq!(mdi_value(&singlet), -0.5, epsilon = 1e-10);
        let separable = werner_outcome_table(0.25);
        assert_eq!(mdi_value(&separable), 0.0);
    }

    #[test]
    fn mdi_value_of_zero_table_is_zero() {
        let table = WitnessValueTable {
            n_a: 2,
            n_b: 2,
            values: vec![0.0; 4],
        };
        assert_eq!(mdi_value(&table), 0.0);
    }

    #[test]
    fn mdi_bound_reproduces_closed_form() {
        let w = werner_witness();
        assert_abs_diff_eq!(w.transposed().trace_norm().unwrap(), 2.0, epsilon = 1e-10);
        for v in [0.4, 0.6, 0.8, 1.0] {
            let w_ab = werner_outcome_table(v);
            let bound = mdi_trace_bound(mdi_value(&w_ab), &w).unwrap();
            assert_abs_diff_eq!(bound, -(1.0 - 3.0 * v) / 8.0, epsilon = 1e-10);
        }
        // Below the detection threshold everything clamps to zero.
        let w_ab = werner_outcome_table(0.2);
        assert_eq!(mdi_trace_bound(mdi_value(&w_ab), &w).unwrap(), 0.0);
    }

    #[test]
    fn transpose_preserves_trace_norm() {
        let w = werner_witness();
        assert_abs_diff_eq!(
            w.trace_norm().unwrap(),
            w.transposed().trace_norm().unwrap(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn relabeling_outcomes_leaves_mdi_value_invariant() {
        let w_ab = werner_outcome_table(0.9);
        let base = mdi_value(&w_ab);
        // A few hand-rolled permutations of (a, b) labels.
        let perms = [[1usize, 0, 3, 2], [3, 2, 1, 0], [2, 0, 3, 1]];
        for pa in perms {
            for pb in perms {
                let mut values = vec![0.0; 16];
                for a in 0..4 {
                    for b in 0..4 {
                        values[pa[a] * 4 + pb[b]] = w_ab.value(a, b);
                    }
                }
                let permuted = WitnessValueTable {
                    n_a: 4,
                    n_b: 4,
                    values,
                };
                assert_abs_diff_eq!(mdi_value(&permuted), base, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn first_outcome_tracks_trusted_value_proportionally() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(41);
        let w = werner_witness();
        let dec = tetra_decomposition(&w);
        let bell = bell_measurement();
        let mut ratios = Vec::new();
        while ratios.len() < 10 {
            let rho = DensityMatrix::from_pure(&states::haar_random_ket(4, &mut rng)).unwrap();
            let trusted = expectation(&w, &rho).unwrap();
            if trusted.abs() < 1e-3 {
                continue;
            }
            let table = simulate(&rho, &bell, &bell, &dec).unwrap();
            let w_ab = outcome_values(&dec, &table).unwrap();
            ratios.push(w_ab.value(0, 0) / trusted);
        }
        for r in &ratios {
            assert!(*r > 0.0, "proportionality factor must be positive");
            assert_abs_diff_eq!(*r, ratios[0], epsilon = 1e-9);
        }
    }

    #[test]
    fn povm_validation_rejects_incomplete_sets() {
        let half = &HermitianOperator::identity(2) * 0.5;
        let err = PovmMeasurement::new(vec![half]).unwrap_err();
        assert!(matches!(err, Error::IncompletePovm { .. }));
    }
}
