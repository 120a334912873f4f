//! Fixture generators for the state and witness families used throughout
//! the toolkit, plus Haar-random sampling for the oracle.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{DensityMatrix, HermitianOperator, Ket};
use crate::witness::Witness;

fn check_range(name: &'static str, value: f64, min: f64, max: f64) -> Result<()> {
    if !(min..=max).contains(&value) {
        return Err(Error::ParamOutOfRange {
            name,
            value,
            min,
            max,
        });
    }
    Ok(())
}

/// |ϕ⟩ = Σᵢ|ii⟩/√d on a d×d bipartite space.
pub fn max_entangled_ket(d: usize) -> Result<Ket> {
    if d < 2 {
        return Err(Error::ParamOutOfRange {
            name: "d",
            value: d as f64,
            min: 2.0,
            max: f64::INFINITY,
        });
    }
    let dim = d * d;
    let amp = 1.0 / (d as f64).sqrt();
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
    for i in 0..d {
        amplitudes[i * d + i] = Complex64::new(amp, 0.0);
    }
    Ok(Ket::new(amplitudes))
}

pub fn max_entangled(d: usize) -> Result<DensityMatrix> {
    DensityMatrix::from_pure(&max_entangled_ket(d)?)
}

/// Fidelity witness `𝕀/d − |ϕ⟩⟨ϕ|` with λ₊ = 1/d and λ₋ = 1/d − 1.
pub fn fidelity_witness(d: usize) -> Result<Witness> {
    let proj = max_entangled_ket(d)?.outer();
    let op = &(&HermitianOperator::identity(d * d) * (1.0 / d as f64)) - &proj;
    Witness::new(op)
}

/// Two-qubit Bell basis in the fixed fixture order ϕ⁻, ϕ⁺, ψ⁻, ψ⁺ with
/// ϕ^± = (|01⟩ ± |10⟩)/√2 and ψ^± = (|00⟩ ± |11⟩)/√2.
///
/// The naming swaps the usual ϕ/ψ roles on purpose: outcome labels in the
/// MDI tables are defined against exactly this order.
pub fn bell_kets() -> [Ket; 4] {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    [
        Ket::from_real(&[0.0, r, -r, 0.0]),
        Ket::from_real(&[0.0, r, r, 0.0]),
        Ket::from_real(&[r, 0.0, 0.0, -r]),
        Ket::from_real(&[r, 0.0, 0.0, r]),
    ]
}

/// The singlet (|01⟩ − |10⟩)/√2.
pub fn singlet_ket() -> Ket {
    let [phi_minus, ..] = bell_kets();
    phi_minus
}

/// Werner state (1−v)𝕀/4 + v|ϕ⁻⟩⟨ϕ⁻|.
pub fn werner(v: f64) -> Result<DensityMatrix> {
    check_range("v", v, 0.0, 1.0)?;
    DensityMatrix::mixture(&[
        (1.0 - v, DensityMatrix::maximally_mixed(4)),
        (v, DensityMatrix::from_pure(&singlet_ket())?),
    ])
}

/// Tripartite W state (|100⟩ + |010⟩ + |001⟩)/√3.
pub fn w_ket() -> Ket {
    let a = 1.0 / 3.0f64.sqrt();
    let mut amplitudes = vec![0.0; 8];
    amplitudes[0b100] = a;
    amplitudes[0b010] = a;
    amplitudes[0b001] = a;
    Ket::from_real(&amplitudes)
}

/// Mixing convention for the noisy W family.
///
/// `Printed` is ρ = v·𝕀/8 + (1−v)|Ψ⟩⟨Ψ| exactly as stated for this family;
/// `Inverted` swaps the two weights. Both are kept because the stated
/// convention does not reproduce the family's tabulated witness values (see
/// the depth module), and batch users need to test either reading.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MixConvention {
    Printed,
    Inverted,
}

/// Noisy tripartite W state in the printed convention.
pub fn noisy_w(v: f64) -> Result<DensityMatrix> {
    noisy_w_with(v, MixConvention::Printed)
}

pub fn noisy_w_with(v: f64, convention: MixConvention) -> Result<DensityMatrix> {
    check_range("v", v, 0.0, 1.0)?;
    let noise_weight = match convention {
        MixConvention::Printed => v,
        MixConvention::Inverted => 1.0 - v,
    };
    DensityMatrix::mixture(&[
        (noise_weight, DensityMatrix::maximally_mixed(8)),
        (1.0 - noise_weight, DensityMatrix::from_pure(&w_ket())?),
    ])
}

/// Depth witnesses for the tripartite W state:
/// `W_P1 = (4/9)𝕀 − |Ψ⟩⟨Ψ|` (any entanglement) and
/// `W_P2 = (2/3)𝕀 − |Ψ⟩⟨Ψ|` (depth three). Both have spread λ₊ − λ₋ = 1.
pub fn w_depth_witnesses() -> Result<(Witness, Witness)> {
    let proj = w_ket().outer();
    let id = HermitianOperator::identity(8);
    let p1 = Witness::new(&(&id * (4.0 / 9.0)) - &proj)?;
    let p2 = Witness::new(&(&id * (2.0 / 3.0)) - &proj)?;
    Ok((p1, p2))
}

/// n-qubit GHZ state (|0…0⟩ + |1…1⟩)/√2.
pub fn ghz_ket(n: usize) -> Result<Ket> {
    if !(2..=10).contains(&n) {
        return Err(Error::ParamOutOfRange {
            name: "n",
            value: n as f64,
            min: 2.0,
            max: 10.0,
        });
    }
    let dim = 1usize << n;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut amplitudes = vec![0.0; dim];
    amplitudes[0] = r;
    amplitudes[dim - 1] = r;
    Ok(Ket::from_real(&amplitudes))
}

pub fn ghz(n: usize) -> Result<DensityMatrix> {
    DensityMatrix::from_pure(&ghz_ket(n)?)
}

fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // Box–Muller; keeps the dependency surface down to `rand` itself.
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Haar-random pure state of the given dimension.
pub fn haar_random_ket<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Ket {
    loop {
        let amplitudes: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(standard_normal(rng), standard_normal(rng)))
            .collect();
        let ket = Ket::new(amplitudes);
        if let Ok(normalized) = ket.normalized() {
            return normalized;
        }
    }
}

/// Haar-random orthonormal basis (Gram–Schmidt on Gaussian vectors).
pub fn haar_random_basis<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<Ket> {
    let mut basis: Vec<Ket> = Vec::with_capacity(dim);
    while basis.len() < dim {
        let candidate = haar_random_ket(dim, rng);
        let mut amplitudes: Vec<Complex64> = candidate.amplitudes().to_vec();
        for prev in &basis {
            let overlap = prev.inner(&Ket::new(amplitudes.clone()));
            for (a, p) in amplitudes.iter_mut().zip(prev.amplitudes()) {
                *a -= overlap * p;
            }
        }
        let reduced = Ket::new(amplitudes);
        if let Ok(normalized) = reduced.normalized() {
            basis.push(normalized);
        }
    }
    basis
}

/// Fidelity witness rotated into the Schmidt basis of a two-qubit pure
/// state: `𝕀/2 − |ϕ_ψ⟩⟨ϕ_ψ|` where ϕ_ψ is maximally entangled in the
/// Schmidt bases of ψ. Detects every entangled two-qubit pure state.
pub fn schmidt_adapted_witness(psi: &Ket) -> Result<Witness> {
    if psi.dim() != 4 {
        return Err(Error::DimensionMismatch {
            left: psi.dim(),
            right: 4,
        });
    }
    let psi = psi.normalized()?;
    let amp = psi.amplitudes();
    // Amplitude matrix C[j][k] = ⟨jk|ψ⟩; left Schmidt vectors are the
    // eigenvectors of C·C†.
    let mut cc = vec![Complex64::new(0.0, 0.0); 4];
    for j in 0..2 {
        for l in 0..2 {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..2 {
                acc += amp[j * 2 + k] * amp[l * 2 + k].conj();
            }
            cc[j * 2 + l] = acc;
        }
    }
    let left = HermitianOperator::new_with(2, cc, &crate::tolerances::Tolerances::default())?
        .spectrum()?;
    let mut schmidt_pairs = Vec::with_capacity(2);
    for i in 0..2 {
        let u = left.eigenvector(i);
        // Right vector from contracting ψ with u; its norm is the Schmidt
        // coefficient, so phases come out aligned for free.
        let mut right = vec![Complex64::new(0.0, 0.0); 2];
        for k in 0..2 {
            for j in 0..2 {
                right[k] += u.amplitudes()[j].conj() * amp[j * 2 + k];
            }
        }
        let right = Ket::new(right);
        match right.normalized() {
            Ok(r) => schmidt_pairs.push((u, r)),
            // Product state: the second Schmidt coefficient vanishes; pick
            // any orthogonal completion.
            Err(_) => {
                let prev: &(Ket, Ket) = &schmidt_pairs[0];
                let flip =
                    |k: &Ket| Ket::new(vec![-k.amplitudes()[1].conj(), k.amplitudes()[0].conj()]);
                let pair = (flip(&prev.0), flip(&prev.1));
                schmidt_pairs.push(pair);
            }
        }
    }
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut phi = vec![Complex64::new(0.0, 0.0); 4];
    for (u, v) in &schmidt_pairs {
        let joint = u.tensor(v);
        for (p, a) in phi.iter_mut().zip(joint.amplitudes()) {
            *p += a * r;
        }
    }
    let projector = Ket::new(phi).normalized()?.outer();
    Witness::new(&(&HermitianOperator::identity(4) * 0.5) - &projector)
}

/// State families exposed by the CLI generator.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum StateFamily {
    MaxEntangled { d: usize },
    Werner { v: f64 },
    NoisyW { v: f64, convention: MixConvention },
    Ghz { n: usize },
}

impl StateFamily {
    pub fn generate(&self) -> Result<DensityMatrix> {
        match self {
            StateFamily::MaxEntangled { d } => max_entangled(*d),
            StateFamily::Werner { v } => werner(*v),
            StateFamily::NoisyW { v, convention } => noisy_w_with(*v, *convention),
            StateFamily::Ghz { n } => ghz(*n),
        }
    }
}
