//! Independent brute-force validation machinery.
//!
//! `etr_upper_bound` minimizes the trace distance from ρ to an explicit
//! convex mixture of product states. Any feasible point certifies an upper
//! bound on E_tr, so the search only has to be good, not perfect: every
//! lower bound in the toolkit must stay below it. `ppt_check` adds the
//! partial-transpose criterion, decisive on 2×2 and 2×3.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::operator::{DensityMatrix, HermitianOperator, Ket};
use crate::states;

/// Margin used when comparing a lower bound against the oracle value.
pub const SOUNDNESS_MARGIN: f64 = 1e-6;

/// An explicit separable state: weights over product pure states.
#[derive(Debug, Clone)]
pub struct SeparableAnsatz {
    dims: Vec<usize>,
    weights: Vec<f64>,
    /// factors[term][party]
    factors: Vec<Vec<Ket>>,
}

impl SeparableAnsatz {
    pub fn new(dims: Vec<usize>, weights: Vec<f64>, factors: Vec<Vec<Ket>>) -> Result<Self> {
        if weights.len() != factors.len() || weights.is_empty() {
            return Err(Error::ArityMismatch {
                context: "separable ansatz",
                expected: weights.len().max(1),
                got: factors.len(),
            });
        }
        let total: f64 = weights.iter().sum();
        if weights.iter().any(|&w| w < 0.0) || (total - 1.0).abs() > 1e-12 {
            return Err(Error::TraceNotOne { trace: total });
        }
        let mut normalized = Vec::with_capacity(factors.len());
        for tuple in &factors {
            if tuple.len() != dims.len() {
                return Err(Error::ArityMismatch {
                    context: "ansatz factors",
                    expected: dims.len(),
                    got: tuple.len(),
                });
            }
            let mut row = Vec::with_capacity(tuple.len());
            for (ket, &d) in tuple.iter().zip(dims.iter()) {
                if ket.dim() != d {
                    return Err(Error::DimensionMismatch {
                        left: ket.dim(),
                        right: d,
                    });
                }
                row.push(ket.normalized()?);
            }
            normalized.push(row);
        }
        Ok(Self {
            dims,
            weights,
            factors: normalized,
        })
    }

    pub fn n_terms(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    fn product_ket(factors: &[Ket]) -> Ket {
        let mut ket = factors[0].clone();
        for f in &factors[1..] {
            ket = ket.tensor(f);
        }
        ket
    }

    /// Assemble Σ wᵢ |ψᵢ⟩⟨ψᵢ| as a density matrix.
    pub fn density(&self) -> DensityMatrix {
        let total_dim: usize = self.dims.iter().product();
        let mut entries = vec![Complex64::new(0.0, 0.0); total_dim * total_dim];
        for (w, tuple) in self.weights.iter().zip(self.factors.iter()) {
            if *w == 0.0 {
                continue;
            }
            let ket = Self::product_ket(tuple);
            let amp = ket.amplitudes();
            for i in 0..total_dim {
                let left = amp[i] * w;
                for j in 0..total_dim {
                    entries[i * total_dim + j] += left * amp[j].conj();
                }
            }
        }
        DensityMatrix::from_valid_op(HermitianOperator::from_exact_parts(total_dim, entries))
    }
}

/// Options for the separable-approximation search.
#[derive(Debug, Clone)]
pub struct OracleOptions {
    /// Number of product terms; defaults to the total dimension.
    pub m: Option<usize>,
    pub restarts: usize,
    pub max_steps: usize,
    /// Convergence threshold on objective improvement.
    pub delta: f64,
    pub seed: u64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            m: None,
            restarts: 20,
            max_steps: 2000,
            delta: 1e-9,
            seed: 0,
        }
    }
}

/// Result of the separable-approximation search.
#[derive(Debug, Clone)]
pub struct OracleBound {
    /// Certified upper bound on E_tr(ρ): the best trace distance found.
    pub value: f64,
    pub ansatz: SeparableAnsatz,
    pub seed: u64,
    pub restarts: usize,
}

fn simplex_project(weights: &mut [f64]) {
    let n = weights.len();
    let mut sorted: Vec<f64> = weights.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).expect("finite weights"));
    let mut acc = 0.0;
    let mut theta = 0.0;
    for (i, &u) in sorted.iter().enumerate() {
        acc += u;
        let candidate = (acc - 1.0) / (i + 1) as f64;
        if u - candidate > 0.0 {
            theta = candidate;
        }
    }
    for w in weights.iter_mut() {
        *w = (*w - theta).max(0.0);
    }
    let total: f64 = weights.iter().sum();
    if total > 0.0 {
        for w in weights.iter_mut() {
            *w /= total;
        }
    } else {
        let uniform = 1.0 / n as f64;
        weights.iter_mut().for_each(|w| *w = uniform);
    }
}

fn gaussian_ket<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Ket {
    states::haar_random_ket(dim, rng)
}

/// Reduced state of a pure ket on one party.
fn ket_marginal(psi: &Ket, dims: &[usize], party: usize) -> HermitianOperator {
    let d = dims[party];
    let stride: usize = dims[party + 1..].iter().product();
    let outer: usize = dims[..party].iter().product();
    let amp = psi.amplitudes();
    let mut entries = vec![Complex64::new(0.0, 0.0); d * d];
    for o in 0..outer {
        for s in 0..stride {
            let base = o * d * stride + s;
            for k in 0..d {
                let ak = amp[base + k * stride];
                for l in 0..d {
                    entries[k * d + l] += ak * amp[base + l * stride].conj();
                }
            }
        }
    }
    HermitianOperator::from_exact_parts(d, entries)
}

struct Refiner<'a> {
    rho: &'a DensityMatrix,
    dims: Vec<usize>,
    total_dim: usize,
    weights: Vec<f64>,
    factors: Vec<Vec<Ket>>,
    product_kets: Vec<Ket>,
    value: f64,
}

impl<'a> Refiner<'a> {
    fn from_ansatz(rho: &'a DensityMatrix, ansatz: &SeparableAnsatz) -> Result<Self> {
        let total_dim: usize = ansatz.dims.iter().product();
        let product_kets: Vec<Ket> = ansatz
            .factors
            .iter()
            .map(|tuple| SeparableAnsatz::product_ket(tuple))
            .collect();
        let mut refiner = Self {
            rho,
            dims: ansatz.dims.clone(),
            total_dim,
            weights: ansatz.weights.clone(),
            factors: ansatz.factors.clone(),
            product_kets,
            value: f64::INFINITY,
        };
        refiner.value = refiner.objective()?;
        Ok(refiner)
    }

    fn density_entries(&self) -> Vec<Complex64> {
        let n = self.total_dim;
        let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
        for (w, ket) in self.weights.iter().zip(self.product_kets.iter()) {
            if *w == 0.0 {
                continue;
            }
            let amp = ket.amplitudes();
            for i in 0..n {
                let left = amp[i] * *w;
                for j in 0..n {
                    entries[i * n + j] += left * amp[j].conj();
                }
            }
        }
        entries
    }

    fn objective(&self) -> Result<f64> {
        let n = self.total_dim;
        let mut diff = self.density_entries();
        for (d, r) in diff.iter_mut().zip(self.rho.op().entries()) {
            *d = r - *d;
        }
        let op = HermitianOperator::from_exact_parts(n, diff);
        Ok(0.5 * op.trace_norm()?)
    }

    fn rebuild_product(&mut self, term: usize) {
        self.product_kets[term] = SeparableAnsatz::product_ket(&self.factors[term]);
    }

    /// Exact single-factor update against the Frobenius residual; kept only
    /// when it also improves the trace distance.
    fn als_factor_move(&mut self, term: usize, party: usize) -> Result<bool> {
        let n = self.total_dim;
        // Residual without this term.
        let mut residual = self.density_entries();
        let w = self.weights[term];
        let amp = self.product_kets[term].amplitudes().to_vec();
        for i in 0..n {
            for j in 0..n {
                residual[i * n + j] = self.rho.op().entries()[i * n + j]
                    - (residual[i * n + j] - amp[i] * w * amp[j].conj());
            }
        }
        // Effective local matrix M[k][l] = ⟨u⊗k⊗v| residual |u⊗l⊗v⟩.
        let d = self.dims[party];
        let mut m_entries = vec![Complex64::new(0.0, 0.0); d * d];
        for k in 0..d {
            for l in 0..d {
                let mut left = self.factors[term].clone();
                left[party] = Ket::basis(d, k);
                let mut right = self.factors[term].clone();
                right[party] = Ket::basis(d, l);
                let lk = SeparableAnsatz::product_ket(&left);
                let rk = SeparableAnsatz::product_ket(&right);
                let mut acc = Complex64::new(0.0, 0.0);
                for i in 0..n {
                    let li = lk.amplitudes()[i].conj();
                    if li == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    for j in 0..n {
                        acc += li * residual[i * n + j] * rk.amplitudes()[j];
                    }
                }
                m_entries[k * d + l] = acc;
            }
        }
        for k in 0..d {
            m_entries[k * d + k] = Complex64::new(m_entries[k * d + k].re, 0.0);
            for l in k + 1..d {
                let avg = (m_entries[k * d + l] + m_entries[l * d + k].conj()) * 0.5;
                m_entries[k * d + l] = avg;
                m_entries[l * d + k] = avg.conj();
            }
        }
        let m = HermitianOperator::from_exact_parts(d, m_entries);
        let top = m.spectrum()?.eigenvector(0);

        let old_factor = self.factors[term][party].clone();
        let old_ket = self.product_kets[term].clone();
        self.factors[term][party] = top;
        self.rebuild_product(term);
        let candidate = self.objective()?;
        if candidate < self.value {
            self.value = candidate;
            Ok(true)
        } else {
            self.factors[term][party] = old_factor;
            self.product_kets[term] = old_ket;
            Ok(false)
        }
    }

    /// Projected-gradient refit of all weights against the Frobenius
    /// objective, accepted only on trace-distance improvement.
    fn weight_refit_move(&mut self) -> Result<bool> {
        let m = self.weights.len();
        let n = self.total_dim;
        // Gram and cross terms of the product projectors.
        let mut gram = vec![0.0f64; m * m];
        let mut cross = vec![0.0f64; m];
        for i in 0..m {
            for j in i..m {
                let overlap = self.product_kets[i].inner(&self.product_kets[j]).norm_sqr();
                gram[i * m + j] = overlap;
                gram[j * m + i] = overlap;
            }
            let amp = self.product_kets[i].amplitudes();
            let mut acc = Complex64::new(0.0, 0.0);
            for r in 0..n {
                for c in 0..n {
                    acc += amp[r].conj() * self.rho.op().entries()[r * n + c] * amp[c];
                }
            }
            cross[i] = acc.re;
        }
        let scale: f64 = gram.iter().map(|g| g * g).sum::<f64>().sqrt().max(1e-12);
        let eta = 1.0 / (2.0 * scale);

        let mut w = self.weights.clone();
        for _ in 0..60 {
            let mut grad = vec![0.0f64; m];
            for i in 0..m {
                let mut gw = 0.0;
                for j in 0..m {
                    gw += gram[i * m + j] * w[j];
                }
                grad[i] = 2.0 * (gw - cross[i]);
            }
            for i in 0..m {
                w[i] -= eta * grad[i];
            }
            simplex_project(&mut w);
        }

        let old = std::mem::replace(&mut self.weights, w);
        let candidate = self.objective()?;
        if candidate < self.value {
            self.value = candidate;
            Ok(true)
        } else {
            self.weights = old;
            Ok(false)
        }
    }

    fn jitter_factor_move<R: Rng + ?Sized>(&mut self, step: f64, rng: &mut R) -> Result<bool> {
        let term = rng.gen_range(0..self.weights.len());
        let party = rng.gen_range(0..self.dims.len());
        let d = self.dims[party];
        let noise = gaussian_ket(d, rng);
        let old_factor = self.factors[term][party].clone();
        let mixed: Vec<Complex64> = old_factor
            .amplitudes()
            .iter()
            .zip(noise.amplitudes())
            .map(|(a, g)| a + g * step)
            .collect();
        let Ok(candidate_factor) = Ket::new(mixed).normalized() else {
            return Ok(false);
        };
        let old_ket = self.product_kets[term].clone();
        self.factors[term][party] = candidate_factor;
        self.rebuild_product(term);
        let candidate = self.objective()?;
        if candidate < self.value {
            self.value = candidate;
            Ok(true)
        } else {
            self.factors[term][party] = old_factor;
            self.product_kets[term] = old_ket;
            Ok(false)
        }
    }

    fn transfer_weight_move<R: Rng + ?Sized>(&mut self, step: f64, rng: &mut R) -> Result<bool> {
        let m = self.weights.len();
        if m < 2 {
            return Ok(false);
        }
        let from = rng.gen_range(0..m);
        let mut to = rng.gen_range(0..m - 1);
        if to >= from {
            to += 1;
        }
        let delta = step * rng.gen_range(0.0..=1.0) * self.weights[from];
        if delta <= 0.0 {
            return Ok(false);
        }
        let old = self.weights.clone();
        self.weights[from] -= delta;
        self.weights[to] += delta;
        let candidate = self.objective()?;
        if candidate < self.value {
            self.value = candidate;
            Ok(true)
        } else {
            self.weights = old;
            Ok(false)
        }
    }

    fn into_ansatz(self) -> SeparableAnsatz {
        SeparableAnsatz {
            dims: self.dims,
            weights: self.weights,
            factors: self.factors,
        }
    }
}

/// Local refinement of an ansatz: cycling exact factor updates, weight
/// refits and shrinking-step random moves, keeping only improvements.
pub fn refine<R: Rng + ?Sized>(
    rho: &DensityMatrix,
    ansatz: &SeparableAnsatz,
    max_steps: usize,
    delta: f64,
    rng: &mut R,
) -> Result<(f64, SeparableAnsatz)> {
    let mut refiner = Refiner::from_ansatz(rho, ansatz)?;
    let m = refiner.weights.len();
    let parties = refiner.dims.len();
    let mut step = 0.3f64;
    let mut stall = 0usize;
    let mut last_best = refiner.value;

    for iteration in 0..max_steps {
        let improved = match iteration % 4 {
            0 => {
                let term = (iteration / 4) % m;
                let party = (iteration / (4 * m)) % parties;
                refiner.als_factor_move(term, party)?
            }
            1 => refiner.jitter_factor_move(step, rng)?,
            2 => {
                if iteration % 12 == 2 {
                    refiner.weight_refit_move()?
                } else {
                    refiner.transfer_weight_move(step, rng)?
                }
            }
            _ => refiner.jitter_factor_move(step, rng)?,
        };
        if improved {
            stall = 0;
        } else {
            stall += 1;
        }
        if stall >= 60 {
            step *= 0.5;
            stall = 0;
            if step < 1e-8 {
                if (last_best - refiner.value) < delta {
                    break;
                }
                last_best = refiner.value;
                step = 0.05;
            }
        }
        if refiner.value < 1e-12 {
            break;
        }
    }
    let value = refiner.value;
    Ok((value, refiner.into_ansatz()))
}

fn uniform_weights(m: usize) -> Vec<f64> {
    vec![1.0 / m as f64; m]
}

fn random_ansatz<R: Rng + ?Sized>(dims: &[usize], m: usize, rng: &mut R) -> SeparableAnsatz {
    let factors = (0..m)
        .map(|_| dims.iter().map(|&d| gaussian_ket(d, rng)).collect())
        .collect();
    SeparableAnsatz {
        dims: dims.to_vec(),
        weights: uniform_weights(m),
        factors,
    }
}

/// Diagonal-in-the-computational-basis start: m heaviest diagonal entries.
fn diagonal_ansatz(rho: &DensityMatrix, dims: &[usize], m: usize) -> SeparableAnsatz {
    let total_dim: usize = dims.iter().product();
    let mut diag: Vec<(usize, f64)> = (0..total_dim)
        .map(|i| (i, rho.op().entry(i, i).re.max(0.0)))
        .collect();
    diag.sort_by(|a, b| b.1.partial_cmp(&a.1).expect("finite diagonal"));
    let take = m.min(total_dim);
    let mut weights: Vec<f64> = diag[..take].iter().map(|&(_, w)| w).collect();
    let mut factors: Vec<Vec<Ket>> = diag[..take]
        .iter()
        .map(|&(index, _)| {
            let mut rem = index;
            let mut tuple = Vec::with_capacity(dims.len());
            for &d in dims.iter().rev() {
                tuple.push(Ket::basis(d, rem % d));
                rem /= d;
            }
            tuple.reverse();
            tuple
        })
        .collect();
    for _ in take..m {
        weights.push(0.0);
        factors.push(dims.iter().map(|&d| Ket::basis(d, 0)).collect());
    }
    simplex_project(&mut weights);
    SeparableAnsatz {
        dims: dims.to_vec(),
        weights,
        factors,
    }
}

/// Start from the product of local marginals of the dominant eigenvector.
fn marginal_ansatz(rho: &DensityMatrix, dims: &[usize], m: usize) -> Result<SeparableAnsatz> {
    let spectrum = rho.op().spectrum()?;
    let top = spectrum.eigenvector(0);
    let tuple: Vec<Ket> = (0..dims.len())
        .map(|party| {
            ket_marginal(&top, dims, party)
                .spectrum()
                .map(|sp| sp.eigenvector(0))
        })
        .collect::<Result<_>>()?;
    let mut weights = vec![0.0; m];
    weights[0] = 1.0;
    let factors = (0..m).map(|_| tuple.clone()).collect();
    Ok(SeparableAnsatz {
        dims: dims.to_vec(),
        weights,
        factors,
    })
}

/// Antipodal product pairs along the three Pauli axes; exact support for
/// two-qubit isotropic mixtures.
fn axes_ansatz(dims: &[usize], m: usize) -> Option<SeparableAnsatz> {
    if dims.len() != 2 || dims[0] != 2 || dims[1] != 2 || m < 12 {
        return None;
    }
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let axis_states = [
        // z basis
        (Ket::from_real(&[1.0, 0.0]), Ket::from_real(&[0.0, 1.0])),
        // x basis
        (Ket::from_real(&[r, r]), Ket::from_real(&[r, -r])),
        // y basis
        (
            Ket::new(vec![Complex64::new(r, 0.0), Complex64::new(0.0, r)]),
            Ket::new(vec![Complex64::new(r, 0.0), Complex64::new(0.0, -r)]),
        ),
    ];
    let mut factors = Vec::with_capacity(m);
    for (plus, minus) in &axis_states {
        factors.push(vec![plus.clone(), minus.clone()]);
        factors.push(vec![minus.clone(), plus.clone()]);
        factors.push(vec![plus.clone(), plus.clone()]);
        factors.push(vec![minus.clone(), minus.clone()]);
    }
    for _ in 12..m {
        factors.push(vec![Ket::basis(2, 0), Ket::basis(2, 0)]);
    }
    let mut weights = vec![0.0; m];
    weights[..12].iter_mut().for_each(|w| *w = 1.0 / 12.0);
    Some(SeparableAnsatz {
        dims: dims.to_vec(),
        weights,
        factors,
    })
}

/// Upper bound on E_tr(ρ) by explicit minimization over separable ansätze.
///
/// Restart 0 starts from the diagonal of ρ, restart 1 from the product of
/// marginals of the dominant eigenvector, restart 2 (two-qubit, m ≥ 12)
/// from Pauli-axis product pairs; the rest are Haar random. Every restart
/// is seeded independently, so enlarging `restarts` only extends the search.
pub fn etr_upper_bound(
    rho: &DensityMatrix,
    dims: &[usize],
    options: &OracleOptions,
) -> Result<OracleBound> {
    let total_dim: usize = dims.iter().product();
    if total_dim != rho.dim() {
        return Err(Error::DimensionMismatch {
            left: total_dim,
            right: rho.dim(),
        });
    }
    if options.restarts < 1 {
        return Err(Error::ParamOutOfRange {
            name: "restarts",
            value: options.restarts as f64,
            min: 1.0,
            max: f64::INFINITY,
        });
    }
    let m = options.m.unwrap_or(total_dim).max(1);

    let mut best: Option<(f64, SeparableAnsatz)> = None;
    for restart in 0..options.restarts {
        let mut rng = ChaCha12Rng::seed_from_u64(
            options
                .seed
                .wrapping_add(0x5851_F42D_4C95_7F2D)
                .wrapping_mul(restart as u64 + 1),
        );
        let start = match restart {
            0 => diagonal_ansatz(rho, dims, m),
            1 => marginal_ansatz(rho, dims, m)?,
            2 => match axes_ansatz(dims, m) {
                Some(a) => a,
                None => random_ansatz(dims, m, &mut rng),
            },
            _ => random_ansatz(dims, m, &mut rng),
        };
        let (value, ansatz) = refine(rho, &start, options.max_steps, options.delta, &mut rng)?;
        if best.as_ref().is_none_or(|(b, _)| value < *b) {
            best = Some((value, ansatz));
        }
        if let Some((b, _)) = &best {
            if *b < 1e-12 {
                break;
            }
        }
    }
    let (value, ansatz) = best.expect("at least one restart ran");
    Ok(OracleBound {
        value,
        ansatz,
        seed: options.seed,
        restarts: options.restarts,
    })
}

/// Verdict of the partial-transpose criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PptVerdict {
    Separable,
    Entangled,
    Inconclusive,
}

/// Partial transpose on the second factor of a d_A × d_B system.
pub fn partial_transpose(
    op: &HermitianOperator,
    d_a: usize,
    d_b: usize,
) -> Result<HermitianOperator> {
    if d_a * d_b != op.dim() {
        return Err(Error::DimensionMismatch {
            left: d_a * d_b,
            right: op.dim(),
        });
    }
    let n = op.dim();
    let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..d_a {
        for j in 0..d_b {
            for k in 0..d_a {
                for l in 0..d_b {
                    entries[(i * d_b + l) * n + (k * d_b + j)] = op.entry(i * d_b + j, k * d_b + l);
                }
            }
        }
    }
    Ok(HermitianOperator::from_exact_parts(n, entries))
}

/// PPT criterion: a negative partial-transpose eigenvalue certifies
/// entanglement; non-negativity certifies separability only on 2×2 and
/// 2×3, and is inconclusive above.
pub fn ppt_check(rho: &DensityMatrix, dims: (usize, usize)) -> Result<PptVerdict> {
    let (d_a, d_b) = dims;
    let pt = partial_transpose(rho.op(), d_a, d_b)?;
    let min_eig = pt.spectrum()?.lambda_minus();
    if min_eig < -1e-10 {
        return Ok(PptVerdict::Entangled);
    }
    let decisive = matches!((d_a, d_b), (2, 2) | (2, 3) | (3, 2));
    Ok(if decisive {
        PptVerdict::Separable
    } else {
        PptVerdict::Inconclusive
    })
}

/// Outcome of checking a claimed lower bound against the oracle.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub pass: bool,
    pub lower_bound: f64,
    pub oracle_upper_bound: f64,
    /// oracle + margin − lower; negative means the check failed.
    pub slack: f64,
    pub seed: u64,
}

/// Pass iff `lower_bound ≤ etr_upper_bound(ρ) + 1e-6`.
pub fn verify(
    rho: &DensityMatrix,
    dims: &[usize],
    lower_bound: f64,
    options: &OracleOptions,
) -> Result<VerifyReport> {
    let oracle = etr_upper_bound(rho, dims, options)?;
    let slack = oracle.value + SOUNDNESS_MARGIN - lower_bound;
    Ok(VerifyReport {
        pass: slack >= 0.0,
        lower_bound,
        oracle_upper_bound: oracle.value,
        slack,
        seed: options.seed,
    })
}
