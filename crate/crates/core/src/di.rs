//! Device-independent bounds from Bell expressions.
//!
//! A Bell expression `Σ c_{𝐚,𝐬} p(𝐚|𝐬)` is treated as a witness whose
//! classical bound β_c comes from exact enumeration of deterministic
//! strategies and whose quantum range comes from a see-saw over projective
//! measurements (heuristic, flagged as such). The normalized witness
//! `(β_sep·𝕀 − 𝓑)/(⟨𝓑⟩₊ − ⟨𝓑⟩₋)` then lower-bounds E_tr from an observed
//! Bell value.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mdi::PovmMeasurement;
use crate::operator::{HermitianOperator, Ket};
use crate::states;
use crate::tolerances::Tolerances;

/// Hard cap on the number of deterministic strategies `classical_bound`
/// will enumerate.
pub const STRATEGY_CAP: u128 = 10_000_000;

/// See-saw convergence threshold on the Bell value.
pub const SEESAW_DELTA: f64 = 1e-10;

/// See-saw round cap per restart.
pub const SEESAW_MAX_ROUNDS: usize = 500;

/// Default number of seeded see-saw restarts.
pub const DEFAULT_RESTARTS: usize = 20;

fn strides(radices: &[usize]) -> Vec<u64> {
    let mut strides = vec![1u64; radices.len()];
    for i in (0..radices.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * radices[i + 1] as u64;
    }
    strides
}

fn encode(digits: &[usize], strides: &[u64]) -> u64 {
    digits
        .iter()
        .zip(strides.iter())
        .map(|(&d, &st)| d as u64 * st)
        .sum()
}

fn decode(mut index: u64, radices: &[usize]) -> Vec<usize> {
    let mut digits = vec![0usize; radices.len()];
    for i in (0..radices.len()).rev() {
        digits[i] = (index % radices[i] as u64) as usize;
        index /= radices[i] as u64;
    }
    digits
}

/// Sparse multipartite Bell expression over outcome/input tuples.
#[derive(Debug, Clone, PartialEq)]
pub struct BellExpression {
    inputs: Vec<usize>,
    outputs: Vec<usize>,
    /// (outcome index, setting index) → coefficient, mixed-radix encoded.
    terms: BTreeMap<(u64, u64), f64>,
    a_strides: Vec<u64>,
    s_strides: Vec<u64>,
}

impl BellExpression {
    pub fn new(inputs: Vec<usize>, outputs: Vec<usize>) -> Result<Self> {
        if inputs.is_empty() || inputs.len() != outputs.len() {
            return Err(Error::ArityMismatch {
                context: "bell expression",
                expected: inputs.len().max(1),
                got: outputs.len(),
            });
        }
        for (party, (&m, &o)) in inputs.iter().zip(outputs.iter()).enumerate() {
            if m == 0 {
                return Err(Error::TermOutOfRange {
                    party,
                    kind: "input count",
                    value: 0,
                    declared: 1,
                });
            }
            if o == 0 {
                return Err(Error::TermOutOfRange {
                    party,
                    kind: "output count",
                    value: 0,
                    declared: 1,
                });
            }
        }
        let a_strides = strides(&outputs);
        let s_strides = strides(&inputs);
        Ok(Self {
            inputs,
            outputs,
            terms: BTreeMap::new(),
            a_strides,
            s_strides,
        })
    }

    /// Accumulate a coefficient onto the (𝐚, 𝐬) term; repeated calls add up.
    pub fn add_term(&mut self, a: &[usize], s: &[usize], coeff: f64) -> Result<()> {
        if a.len() != self.n_parties() || s.len() != self.n_parties() {
            return Err(Error::ArityMismatch {
                context: "bell term",
                expected: self.n_parties(),
                got: a.len().min(s.len()),
            });
        }
        for (party, (&ai, &oi)) in a.iter().zip(self.outputs.iter()).enumerate() {
            if ai >= oi {
                return Err(Error::TermOutOfRange {
                    party,
                    kind: "outcome",
                    value: ai,
                    declared: oi,
                });
            }
        }
        for (party, (&si, &mi)) in s.iter().zip(self.inputs.iter()).enumerate() {
            if si >= mi {
                return Err(Error::TermOutOfRange {
                    party,
                    kind: "input",
                    value: si,
                    declared: mi,
                });
            }
        }
        let key = (encode(a, &self.a_strides), encode(s, &self.s_strides));
        let entry = self.terms.entry(key).or_insert(0.0);
        *entry += coeff;
        if *entry == 0.0 {
            self.terms.remove(&key);
        }
        Ok(())
    }

    pub fn n_parties(&self) -> usize {
        self.inputs.len()
    }

    pub fn inputs(&self) -> &[usize] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Iterate terms as decoded (outcomes, settings, coefficient) triples.
    pub fn terms(&self) -> impl Iterator<Item = (Vec<usize>, Vec<usize>, f64)> + '_ {
        self.terms.iter().map(move |(&(a, s), &coeff)| {
            (decode(a, &self.outputs), decode(s, &self.inputs), coeff)
        })
    }

    pub fn coefficient(&self, a: &[usize], s: &[usize]) -> f64 {
        let key = (encode(a, &self.a_strides), encode(s, &self.s_strides));
        self.terms.get(&key).copied().unwrap_or(0.0)
    }

    /// Coefficient-wise agreement within `tol`, same scenario shape.
    pub fn approx_eq(&self, other: &BellExpression, tol: f64) -> bool {
        if self.inputs != other.inputs || self.outputs != other.outputs {
            return false;
        }
        let keys: std::collections::BTreeSet<_> =
            self.terms.keys().chain(other.terms.keys()).collect();
        keys.into_iter().all(|k| {
            let a = self.terms.get(k).copied().unwrap_or(0.0);
            let b = other.terms.get(k).copied().unwrap_or(0.0);
            (a - b).abs() <= tol
        })
    }

    fn total_strategies(&self) -> u128 {
        self.inputs
            .iter()
            .zip(self.outputs.iter())
            .map(|(&m, &o)| (o as u128).saturating_pow(m as u32))
            .fold(1u128, |acc, x| acc.saturating_mul(x))
    }

    /// The CHSH expression in probability form: coefficients
    /// `(−1)^{a+b}` for settings (0,0), (0,1), (1,0) and `(−1)^{a+b+1}`
    /// for (1,1), i.e. ⟨A₀B₀⟩ + ⟨A₀B₁⟩ + ⟨A₁B₀⟩ − ⟨A₁B₁⟩.
    pub fn chsh() -> Self {
        let mut expr = Self::new(vec![2, 2], vec![2, 2]).expect("valid scenario");
        for s in 0..2usize {
            for t in 0..2usize {
                let sign_st = if s == 1 && t == 1 { -1.0 } else { 1.0 };
                for a in 0..2usize {
                    for b in 0..2usize {
                        let sign_ab = if (a + b) % 2 == 0 { 1.0 } else { -1.0 };
                        expr.add_term(&[a, b], &[s, t], sign_st * sign_ab)
                            .expect("in range");
                    }
                }
            }
        }
        expr
    }
}

/// JSON shape: `{parties, inputs, outputs, terms: [{a, s, coeff}]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BellExpressionJson {
    pub parties: usize,
    pub inputs: Vec<usize>,
    pub outputs: Vec<usize>,
    pub terms: Vec<BellTermJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BellTermJson {
    pub a: Vec<usize>,
    pub s: Vec<usize>,
    pub coeff: f64,
}

impl TryFrom<BellExpressionJson> for BellExpression {
    type Error = Error;

    fn try_from(json: BellExpressionJson) -> Result<Self> {
        if json.parties != json.inputs.len() {
            return Err(Error::ArityMismatch {
                context: "bell expression json",
                expected: json.parties,
                got: json.inputs.len(),
            });
        }
        let mut expr = BellExpression::new(json.inputs, json.outputs)?;
        for term in json.terms {
            expr.add_term(&term.a, &term.s, term.coeff)?;
        }
        if expr.is_empty() {
            return Err(Error::EmptyExpression);
        }
        Ok(expr)
    }
}

impl From<&BellExpression> for BellExpressionJson {
    fn from(expr: &BellExpression) -> Self {
        BellExpressionJson {
            parties: expr.n_parties(),
            inputs: expr.inputs.clone(),
            outputs: expr.outputs.clone(),
            terms: expr
                .terms()
                .map(|(a, s, coeff)| BellTermJson { a, s, coeff })
                .collect(),
        }
    }
}

/// Exact maximum of the expression over deterministic local strategies
/// `a_i = f_i(s_i)`.
///
/// Strategies of all parties but the last are enumerated; the last party's
/// response is optimized setting-by-setting, which is exact because its
/// choices enter independently per input.
pub fn classical_bound(expr: &BellExpression) -> Result<f64> {
    if expr.is_empty() {
        return Err(Error::EmptyExpression);
    }
    let count = expr.total_strategies();
    if count > STRATEGY_CAP {
        return Err(Error::EnumerationCap {
            count,
            cap: STRATEGY_CAP,
        });
    }

    let n = expr.n_parties();
    let settings_total: u64 = expr.inputs.iter().map(|&m| m as u64).product();
    let outcomes_total: u64 = expr.outputs.iter().map(|&o| o as u64).product();
    if settings_total.saturating_mul(outcomes_total) > (1 << 26) {
        return Err(Error::EnumerationCap {
            count: settings_total as u128 * outcomes_total as u128,
            cap: 1 << 26,
        });
    }

    // Dense coefficient table indexed by (setting, outcome), rescaled by
    // the largest magnitude: families with equal-magnitude coefficients
    // (CHSH, Svetlichny) then accumulate exactly in f64 and the enumerated
    // bound matches closed forms bitwise.
    let scale = expr.terms.values().fold(0.0f64, |acc, c| acc.max(c.abs()));
    let mut dense = vec![0.0f64; (settings_total * outcomes_total) as usize];
    for (&(a_idx, s_idx), &coeff) in &expr.terms {
        dense[(s_idx * outcomes_total + a_idx) as usize] += coeff / scale;
    }
    let setting_digits: Vec<Vec<usize>> = (0..settings_total)
        .map(|s| decode(s, &expr.inputs))
        .collect();

    let last = n - 1;
    let out_last = expr.outputs[last];
    let in_last = expr.inputs[last];
    let last_stride = expr.a_strides[last]; // = 1 by construction
    debug_assert_eq!(last_stride, 1);

    // Per-party strategy space for the enumerated prefix.
    let prefix_strategy_counts: Vec<u64> = (0..last)
        .map(|i| (expr.outputs[i] as u64).pow(expr.inputs[i] as u32))
        .collect();
    let prefix_total: u64 = prefix_strategy_counts.iter().product();

    let mut best = f64::NEG_INFINITY;
    let mut partial = vec![0.0f64; in_last * out_last];
    // Response tables f_i : s_i → a_i for the prefix parties.
    let mut tables: Vec<Vec<usize>> = (0..last).map(|i| vec![0usize; expr.inputs[i]]).collect();

    for strategy in 0..prefix_total.max(1) {
        let mut rem = strategy;
        for (i, table) in tables.iter_mut().enumerate() {
            let mut code = rem % prefix_strategy_counts[i];
            rem /= prefix_strategy_counts[i];
            for response in table.iter_mut() {
                *response = (code % expr.outputs[i] as u64) as usize;
                code /= expr.outputs[i] as u64;
            }
        }

        partial.iter_mut().for_each(|x| *x = 0.0);
        for (s_idx, digits) in setting_digits.iter().enumerate() {
            let mut prefix_outcome = 0u64;
            for i in 0..last {
                prefix_outcome += tables[i][digits[i]] as u64 * expr.a_strides[i];
            }
            let base = s_idx as u64 * outcomes_total + prefix_outcome;
            let s_last = digits[last];
            for a_last in 0..out_last {
                partial[s_last * out_last + a_last] += dense[(base + a_last as u64) as usize];
            }
        }

        let mut value = 0.0;
        for s_last in 0..in_last {
            let row = &partial[s_last * out_last..(s_last + 1) * out_last];
            value += row.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x));
        }
        best = best.max(value);
    }

    Ok(best * scale)
}

pub(crate) fn bell_operator_raw(
    expr: &BellExpression,
    effects: &[Vec<Vec<HermitianOperator>>],
) -> Result<HermitianOperator> {
    let n = expr.n_parties();
    if effects.len() != n {
        return Err(Error::ArityMismatch {
            context: "bell operator measurements",
            expected: n,
            got: effects.len(),
        });
    }
    for (party, per_input) in effects.iter().enumerate() {
        if per_input.len() != expr.inputs[party] {
            return Err(Error::ArityMismatch {
                context: "bell operator inputs",
                expected: expr.inputs[party],
                got: per_input.len(),
            });
        }
        for povm in per_input {
            if povm.len() != expr.outputs[party] {
                return Err(Error::ArityMismatch {
                    context: "bell operator outcomes",
                    expected: expr.outputs[party],
                    got: povm.len(),
                });
            }
        }
    }
    let total_dim: usize = effects.iter().map(|per| per[0][0].dim()).product();
    let mut tol = Tolerances::default();
    tol.max_tensor_dim = tol.max_tensor_dim.max(total_dim);

    let mut acc = HermitianOperator::zeros(total_dim);
    for (a, s, coeff) in expr.terms() {
        let mut term = effects[0][s[0]][a[0]].clone();
        for party in 1..n {
            term = term.tensor_with(&effects[party][s[party]][a[party]], &tol)?;
        }
        acc = &acc + &(&term * coeff);
    }
    Ok(acc)
}

/// Bell operator `Σ c_{𝐚,𝐬} ⊗ᵢ M_{aᵢ|sᵢ}` for explicit measurements.
///
/// `measurements[i][s]` is party i's POVM for input s.
pub fn bell_operator(
    expr: &BellExpression,
    measurements: &[Vec<PovmMeasurement>],
) -> Result<HermitianOperator> {
    let effects: Vec<Vec<Vec<HermitianOperator>>> = measurements
        .iter()
        .map(|per_input| {
            per_input
                .iter()
                .map(|povm| povm.effects().to_vec())
                .collect()
        })
        .collect();
    bell_operator_raw(expr, &effects)
}

/// Whether a reported extreme value is exact or the best a heuristic found.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Certainty {
    Analytic,
    Heuristic,
}

/// Estimates of the extreme quantum values ⟨𝓑⟩₊ and ⟨𝓑⟩₋.
#[derive(Debug, Clone, Serialize)]
pub struct QuantumRange {
    pub upper: f64,
    pub lower: f64,
    pub upper_certainty: Certainty,
    pub lower_certainty: Certainty,
}

impl QuantumRange {
    pub fn analytic(upper: f64, lower: f64) -> Self {
        Self {
            upper,
            lower,
            upper_certainty: Certainty::Analytic,
            lower_certainty: Certainty::Analytic,
        }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

// ── see-saw internals ────────────────────────────────────────────────────

fn apply_local(
    amp: &[Complex64],
    dims: &[usize],
    party: usize,
    op: &HermitianOperator,
) -> Vec<Complex64> {
    let d = dims[party];
    let stride: usize = dims[party + 1..].iter().product();
    let outer: usize = dims[..party].iter().product();
    let mut out = vec![Complex64::new(0.0, 0.0); amp.len()];
    for o in 0..outer {
        for s in 0..stride {
            let base = o * d * stride + s;
            for r in 0..d {
                let mut acc = Complex64::new(0.0, 0.0);
                for c in 0..d {
                    acc += op.entry(r, c) * amp[base + c * stride];
                }
                out[base + r * stride] = acc;
            }
        }
    }
    out
}

/// Γ[k][l] = Σ_rest conj(ψ[…k…]) φ[…l…] with k, l at `party`.
fn partial_sandwich(
    psi: &[Complex64],
    phi: &[Complex64],
    dims: &[usize],
    party: usize,
) -> Vec<Complex64> {
    let d = dims[party];
    let stride: usize = dims[party + 1..].iter().product();
    let outer: usize = dims[..party].iter().product();
    let mut gamma = vec![Complex64::new(0.0, 0.0); d * d];
    for o in 0..outer {
        for s in 0..stride {
            let base = o * d * stride + s;
            for k in 0..d {
                let pk = psi[base + k * stride].conj();
                if pk == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for l in 0..d {
                    gamma[k * d + l] += pk * phi[base + l * stride];
                }
            }
        }
    }
    gamma
}

fn hermitian_from_nearly(dim: usize, mut entries: Vec<Complex64>) -> HermitianOperator {
    for i in 0..dim {
        entries[i * dim + i] = Complex64::new(entries[i * dim + i].re, 0.0);
        for j in i + 1..dim {
            let avg = (entries[i * dim + j] + entries[j * dim + i].conj()) * 0.5;
            entries[i * dim + j] = avg;
            entries[j * dim + i] = avg.conj();
        }
    }
    HermitianOperator::from_exact_parts(dim, entries)
}

/// S·Δ·S for Hermitian S and Δ.
fn sandwich_product(s: &HermitianOperator, delta: &HermitianOperator) -> HermitianOperator {
    let n = s.dim();
    let mut sd = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                acc += s.entry(i, k) * delta.entry(k, j);
            }
            sd[i * n + j] = acc;
        }
    }
    let mut sds = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                acc += sd[i * n + k] * s.entry(k, j);
            }
            sds[i * n + j] = acc;
        }
    }
    hermitian_from_nearly(n, sds)
}

struct SeesawState {
    dims: Vec<usize>,
    /// effects[party][input][outcome]
    effects: Vec<Vec<Vec<HermitianOperator>>>,
}

fn random_projective_measurement<R: rand::Rng + ?Sized>(
    dim: usize,
    outcomes: usize,
    rng: &mut R,
) -> Vec<HermitianOperator> {
    let basis = states::haar_random_basis(dim, rng);
    let mut effects = vec![HermitianOperator::zeros(dim); outcomes];
    for (index, ket) in basis.iter().enumerate() {
        let slot = index % outcomes;
        effects[slot] = &effects[slot] + &ket.outer();
    }
    effects
}

impl SeesawState {
    fn random<R: rand::Rng + ?Sized>(expr: &BellExpression, local_dim: usize, rng: &mut R) -> Self {
        let dims = vec![local_dim; expr.n_parties()];
        let effects = (0..expr.n_parties())
            .map(|party| {
                (0..expr.inputs[party])
                    .map(|_| random_projective_measurement(local_dim, expr.outputs[party], rng))
                    .collect()
            })
            .collect();
        Self { dims, effects }
    }

    /// Effective local operators Γ_{α|u} for one party and input, against
    /// the current state ψ and the other parties' current effects.
    fn effective_operators(
        &self,
        expr: &BellExpression,
        party: usize,
        input: usize,
        psi: &Ket,
    ) -> Vec<HermitianOperator> {
        let d = self.dims[party];
        let n = expr.n_parties();
        let mut gammas = vec![vec![Complex64::new(0.0, 0.0); d * d]; expr.outputs[party]];
        for (a, s, coeff) in expr.terms() {
            if s[party] != input {
                continue;
            }
            let mut phi = psi.amplitudes().to_vec();
            for other in 0..n {
                if other == party {
                    continue;
                }
                phi = apply_local(
                    &phi,
                    &self.dims,
                    other,
                    &self.effects[other][s[other]][a[other]],
                );
            }
            let sandwich = partial_sandwich(psi.amplitudes(), &phi, &self.dims, party);
            let target = &mut gammas[a[party]];
            for (g, w) in target.iter_mut().zip(sandwich.iter()) {
                *g += w * coeff;
            }
        }
        gammas
            .into_iter()
            .map(|entries| hermitian_from_nearly(d, entries))
            .collect()
    }

    /// Replace the measurement for (party, input) with the projective
    /// optimizer of Σ_α Tr(M_α Γ_α); exact for binary outcomes, pairwise
    /// sweeps otherwise.
    fn update_measurement(&mut self, party: usize, input: usize, gammas: &[HermitianOperator]) {
        let d = self.dims[party];
        let outcomes = gammas.len();
        if outcomes == 1 {
            return;
        }
        let mut effects = std::mem::take(&mut self.effects[party][input]);
        for alpha in 0..outcomes {
            for beta in alpha + 1..outcomes {
                let span = &effects[alpha] + &effects[beta];
                let delta = &gammas[alpha] - &gammas[beta];
                let keyed = if outcomes == 2 {
                    delta
                } else {
                    sandwich_product(&span, &delta)
                };
                let spectrum = match keyed.spectrum() {
                    Ok(sp) => sp,
                    Err(_) => continue,
                };
                let mut plus = HermitianOperator::zeros(d);
                for (j, &lambda) in spectrum.eigenvalues().iter().enumerate() {
                    if lambda > 1e-12 {
                        plus = &plus + &spectrum.eigenvector(j).outer();
                    } else if lambda.abs() <= 1e-12 {
                        // Zero modes inside the pair's span keep outcome α.
                        let v = spectrum.eigenvector(j);
                        let sv = apply_local(v.amplitudes(), &[d], 0, &span);
                        let inside: f64 = sv
                            .iter()
                            .zip(v.amplitudes())
                            .map(|(x, y)| (x - y).norm_sqr())
                            .sum();
                        if outcomes == 2 || inside < 1e-18 {
                            plus = &plus + &v.outer();
                        }
                    }
                }
                let minus = &span - &plus;
                effects[alpha] = plus;
                effects[beta] = minus;
            }
        }
        self.effects[party][input] = effects;
    }
}

fn seesaw_max<R: rand::Rng + ?Sized>(
    expr: &BellExpression,
    local_dim: usize,
    rng: &mut R,
) -> Result<f64> {
    let mut state = SeesawState::random(expr, local_dim, rng);
    let mut best = f64::NEG_INFINITY;
    let mut previous = f64::NEG_INFINITY;
    for _round in 0..SEESAW_MAX_ROUNDS {
        let operator = bell_operator_raw(expr, &state.effects)?;
        let spectrum = operator.spectrum()?;
        let value = spectrum.lambda_plus();
        best = best.max(value);
        if (value - previous).abs() <= SEESAW_DELTA {
            break;
        }
        previous = value;
        let psi = spectrum.eigenvector(0);
        for party in 0..expr.n_parties() {
            for input in 0..expr.inputs[party] {
                let gammas = state.effective_operators(expr, party, input, &psi);
                state.update_measurement(party, input, &gammas);
            }
        }
    }
    Ok(best)
}

fn negated(expr: &BellExpression) -> BellExpression {
    let mut out = expr.clone();
    for coeff in out.terms.values_mut() {
        *coeff = -*coeff;
    }
    out
}

/// Heuristic quantum range of a Bell expression at a fixed local dimension.
///
/// The see-saw alternates a state update (top eigenvector of the Bell
/// operator) with per-party projective measurement updates from the
/// eigenvectors of the effective local operators. Results are lower bounds
/// on ⟨𝓑⟩₊ (and upper bounds on ⟨𝓑⟩₋ in magnitude) and are flagged
/// heuristic.
pub fn quantum_range(
    expr: &BellExpression,
    local_dim: usize,
    restarts: usize,
    seed: u64,
) -> Result<QuantumRange> {
    if local_dim < 2 {
        return Err(Error::ParamOutOfRange {
            name: "local_dim",
            value: local_dim as f64,
            min: 2.0,
            max: f64::INFINITY,
        });
    }
    if restarts < 1 {
        return Err(Error::ParamOutOfRange {
            name: "restarts",
            value: restarts as f64,
            min: 1.0,
            max: f64::INFINITY,
        });
    }
    if expr.is_empty() {
        return Err(Error::EmptyExpression);
    }
    let flipped = negated(expr);
    let mut upper = f64::NEG_INFINITY;
    let mut lower = f64::INFINITY;
    for restart in 0..restarts {
        let mut rng =
            ChaCha12Rng::seed_from_u64(seed ^ (restart as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        upper = upper.max(seesaw_max(expr, local_dim, &mut rng)?);
        lower = lower.min(-seesaw_max(&flipped, local_dim, &mut rng)?);
    }
    Ok(QuantumRange {
        upper,
        lower,
        upper_certainty: Certainty::Heuristic,
        lower_certainty: Certainty::Heuristic,
    })
}

/// Analytic quantum range when the expression is a known fixture (CHSH).
pub fn known_quantum_range(expr: &BellExpression) -> Option<QuantumRange> {
    let chsh_max = 2.0 * std::f64::consts::SQRT_2;
    if expr.approx_eq(&BellExpression::chsh(), 1e-12) {
        return Some(QuantumRange::analytic(chsh_max, -chsh_max));
    }
    None
}

/// E_tr ≥ (observed − β_sep)/(⟨𝓑⟩₊ − ⟨𝓑⟩₋), clamped at zero.
///
/// `beta_sep` defaults to the exact classical bound; a caller may pass a
/// tighter separable-state maximum (for CHSH at maximal violation this is
/// √2) to sharpen the bound, and owns that premise.
pub fn di_trace_bound(
    expr: &BellExpression,
    beta_sep: Option<f64>,
    range: &QuantumRange,
    observed: f64,
) -> Result<f64> {
    if range.width() <= 0.0 {
        return Err(Error::DegenerateRange {
            upper: range.upper,
            lower: range.lower,
        });
    }
    let beta = match beta_sep {
        Some(b) => b,
        None => classical_bound(expr)?,
    };
    Ok(((observed - beta) / range.width()).max(0.0))
}

/// Optimizer of the CHSH expression over product states with anticommuting
/// ±1 observables on each side.
#[derive(Debug, Clone, Serialize)]
pub struct ChshProductPoint {
    pub value: f64,
    /// (⟨A₀⟩, ⟨A₁⟩) at the optimum.
    pub alice: [f64; 2],
    /// (⟨B₀⟩, ⟨B₁⟩) at the optimum.
    pub bob: [f64; 2],
}

fn chsh_product_value(ta: f64, tb: f64) -> f64 {
    let (a0, a1) = (ta.cos(), ta.sin());
    let (b0, b1) = (tb.cos(), tb.sin());
    a0 * b0 + a0 * b1 + a1 * b0 - a1 * b1
}

/// Brute-force maximum of Σ (−1)^{ij} ⟨A_i⟩⟨B_j⟩ over product states with
/// anticommuting observables, i.e. over the disks ⟨A₀⟩² + ⟨A₁⟩² ≤ 1 and
/// ⟨B₀⟩² + ⟨B₁⟩² ≤ 1. Grid search plus shrinking-step refinement.
pub fn chsh_product_max() -> ChshProductPoint {
    // The objective is bilinear, so the optimum sits on the boundary
    // circles; parametrize both by angles.
    let coarse = 720usize;
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for i in 0..coarse {
        let ta = 2.0 * std::f64::consts::PI * i as f64 / coarse as f64;
        for j in 0..coarse {
            let tb = 2.0 * std::f64::consts::PI * j as f64 / coarse as f64;
            let value = chsh_product_value(ta, tb);
            if value > best.0 {
                best = (value, ta, tb);
            }
        }
    }
    let (mut value, mut ta, mut tb) = best;
    let mut step = 2.0 * std::f64::consts::PI / coarse as f64;
    while step > 1e-10 {
        let mut improved = false;
        for (da, db) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
            let candidate = chsh_product_value(ta + da, tb + db);
            if candidate > value {
                value = candidate;
                ta += da;
                tb += db;
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    ChshProductPoint {
        value,
        alice: [ta.cos(), ta.sin()],
        bob: [tb.cos(), tb.sin()],
    }
}

/// Optimal CHSH measurement fixtures: A₀ = σ_z, A₁ = σ_x,
/// B₀ = (σ_z+σ_x)/√2, B₁ = (σ_z−σ_x)/√2, decomposed into ±1 projectors
/// with outcome 0 ↦ +1.
pub fn chsh_measurements() -> Vec<Vec<PovmMeasurement>> {
    fn pm_observable(direction: [f64; 3]) -> PovmMeasurement {
        let [x, y, z] = direction;
        let half = 0.5;
        let plus = HermitianOperator::from_exact_parts(
            2,
            vec![
                Complex64::new(half * (1.0 + z), 0.0),
                Complex64::new(half * x, -half * y),
                Complex64::new(half * x, half * y),
                Complex64::new(half * (1.0 - z), 0.0),
            ],
        );
        let minus = &HermitianOperator::identity(2) - &plus;
        PovmMeasurement::new(vec![plus, minus]).expect("projector pair is a POVM")
    }
    let r = std::f64::consts::FRAC_1_SQRT_2;
    vec![
        vec![
            pm_observable([0.0, 0.0, 1.0]),
            pm_observable([1.0, 0.0, 0.0]),
        ],
        vec![pm_observable([r, 0.0, r]), pm_observable([r, 0.0, -r])],
    ]
}
