//! Trusted-device witness re-normalization and the derived bound table.
//!
//! A witness W with extreme eigenvalues λ₊ > λ₋ is rescaled to
//! `W_c = W/(λ₊−λ₋)`, whose expectation value w_c certifies
//! `E_tr ≥ −w_c`. The same number feeds closed-form lower bounds on eight
//! further entanglement quantifiers.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{expectation, DensityMatrix, HermitianOperator};

/// Quantifiers covered by the bound table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MeasureId {
    /// Minimum trace distance to the separable set.
    #[serde(rename = "E_tr")]
    TraceDistance,
    /// Relative entropy of entanglement.
    #[serde(rename = "E_re")]
    RelativeEntropy,
    /// Entanglement of formation (convex roof).
    #[serde(rename = "E_F")]
    Formation,
    /// Minimum infidelity with the separable set.
    #[serde(rename = "E_if")]
    Infidelity,
    /// Geometric measure (convex roof).
    #[serde(rename = "E_G")]
    Geometric,
    /// Concurrence (convex roof).
    #[serde(rename = "E_C")]
    Concurrence,
    /// Robustness of entanglement.
    #[serde(rename = "E_rob")]
    Robustness,
    /// Generalized robustness of entanglement.
    #[serde(rename = "E_ROB")]
    GeneralizedRobustness,
    /// Groverian measure.
    #[serde(rename = "E_Gr")]
    Groverian,
    /// Bures measure.
    #[serde(rename = "E_B")]
    Bures,
}

impl MeasureId {
    pub const ALL: [MeasureId; 10] = [
        MeasureId::TraceDistance,
        MeasureId::RelativeEntropy,
        MeasureId::Formation,
        MeasureId::Infidelity,
        MeasureId::Geometric,
        MeasureId::Concurrence,
        MeasureId::Robustness,
        MeasureId::GeneralizedRobustness,
        MeasureId::Groverian,
        MeasureId::Bures,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            MeasureId::TraceDistance => "E_tr",
            MeasureId::RelativeEntropy => "E_re",
            MeasureId::Formation => "E_F",
            MeasureId::Infidelity => "E_if",
            MeasureId::Geometric => "E_G",
            MeasureId::Concurrence => "E_C",
            MeasureId::Robustness => "E_rob",
            MeasureId::GeneralizedRobustness => "E_ROB",
            MeasureId::Groverian => "E_Gr",
            MeasureId::Bures => "E_B",
        }
    }
}

/// A witness operator together with its cached extreme eigenvalues.
#[derive(Debug, Clone)]
pub struct Witness {
    op: HermitianOperator,
    lambda_plus: f64,
    lambda_minus: f64,
}

impl Witness {
    /// Degenerate spectra (λ₊ = λ₋, i.e. a multiple of the identity) are
    /// rejected: such an operator witnesses nothing.
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let spectrum = op.spectrum()?;
        let lambda_plus = spectrum.lambda_plus();
        let lambda_minus = spectrum.lambda_minus();
        let scale = lambda_plus.abs().max(lambda_minus.abs()).max(1.0);
        if lambda_plus - lambda_minus <= 1e-12 * scale {
            return Err(Error::DegenerateWitness {
                lambda: lambda_plus,
            });
        }
        Ok(Self {
            op,
            lambda_plus,
            lambda_minus,
        })
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn lambda_plus(&self) -> f64 {
        self.lambda_plus
    }

    pub fn lambda_minus(&self) -> f64 {
        self.lambda_minus
    }

    pub fn spread(&self) -> f64 {
        self.lambda_plus - self.lambda_minus
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }
}

/// The two spread-normalized forms of a witness.
///
/// `w_prime = (2W − (λ₊+λ₋)𝕀)/(λ₊−λ₋)` has spectrum exactly spanning
/// [−1, 1]; `w_c = W/(λ₊−λ₋)` is the part whose expectation value carries
/// the entanglement bound.
#[derive(Debug, Clone)]
pub struct NormalizedWitness {
    w_prime: HermitianOperator,
    w_c: HermitianOperator,
    spread: f64,
}

pub fn normalize(w: &Witness) -> NormalizedWitness {
    let spread = w.spread();
    let shift = w.lambda_plus() + w.lambda_minus();
    let id = HermitianOperator::identity(w.dim());
    let w_prime = &(&(w.operator() * 2.0) - &(&id * shift)) * (1.0 / spread);
    let w_c = w.operator() * (1.0 / spread);
    NormalizedWitness {
        w_prime,
        w_c,
        spread,
    }
}

impl NormalizedWitness {
    pub fn w_prime(&self) -> &HermitianOperator {
        &self.w_prime
    }

    pub fn w_c(&self) -> &HermitianOperator {
        &self.w_c
    }

    pub fn spread(&self) -> f64 {
        self.spread
    }

    /// Witness value w_c = Tr(ρ W_c), sign and all.
    pub fn w_c_value(&self, rho: &DensityMatrix) -> Result<f64> {
        expectation(&self.w_c, rho)
    }

    /// Certified lower bound on E_tr: max(0, −Tr(ρ W_c)).
    pub fn trace_bound(&self, rho: &DensityMatrix) -> Result<f64> {
        Ok((-self.w_c_value(rho)?).max(0.0))
    }
}

/// One certified bound with the formula that produced it.
#[derive(Debug, Clone, Serialize)]
pub struct BoundEntry {
    pub measure: MeasureId,
    pub bound: f64,
    pub formula_id: &'static str,
    pub inputs: Vec<f64>,
    /// True when the max(0, ·) clamp was active.
    pub clamped: bool,
    /// True when the robustness denominator 1 + w_c was non-positive.
    pub unbounded: bool,
}

impl BoundEntry {
    fn finite(measure: MeasureId, raw: f64, formula_id: &'static str, w_c: f64) -> Self {
        let bound = raw.max(0.0);
        BoundEntry {
            measure,
            bound,
            formula_id,
            inputs: vec![w_c],
            clamped: raw < 0.0,
            unbounded: false,
        }
    }
}

/// Lower bounds on all ten quantifiers derived from one witness value.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub w_c: f64,
    entries: BTreeMap<MeasureId, BoundEntry>,
    /// The Bures bound admits a second reading of its closed form; both are
    /// reported, with the main entry carrying the form `2√(1−√(1−w_c²))`
    /// and this one `2(1−√(1−w_c²))`.
    pub bures_alternate: BoundEntry,
}

impl BoundReport {
    pub fn get(&self, measure: MeasureId) -> &BoundEntry {
        &self.entries[&measure]
    }

    pub fn bound(&self, measure: MeasureId) -> f64 {
        self.entries[&measure].bound
    }

    pub fn entries(&self) -> impl Iterator<Item = &BoundEntry> {
        self.entries.values()
    }
}

/// Evaluate the full bound table at a given witness value.
///
/// Values w_c ≥ 0 certify nothing: every bound clamps to zero. The
/// robustness pole at w_c ≤ −1 is flagged on its entries rather than
/// failing the whole table, so batch runs survive.
pub fn bound_table(w_c: f64) -> BoundReport {
    let ln2 = std::f64::consts::LN_2;
    let mut entries = BTreeMap::new();

    let mut put = |e: BoundEntry| {
        entries.insert(e.measure, e);
    };

    put(BoundEntry::finite(
        MeasureId::TraceDistance,
        -w_c,
        "neg-wc",
        w_c,
    ));
    let pinsker = 2.0 * w_c * w_c / ln2;
    // Quadratic bounds certify nothing for w_c ≥ 0 even though the square
    // is positive; they inherit the trace-distance clamp.
    let quad_active = w_c < 0.0;
    put(BoundEntry {
        measure: MeasureId::RelativeEntropy,
        bound: if quad_active { pinsker } else { 0.0 },
        formula_id: "two-wc2-over-ln2",
        inputs: vec![w_c],
        clamped: !quad_active,
        unbounded: false,
    });
    put(BoundEntry {
        measure: MeasureId::Formation,
        bound: if quad_active { pinsker } else { 0.0 },
        formula_id: "two-wc2-over-ln2",
        inputs: vec![w_c],
        clamped: !quad_active,
        unbounded: false,
    });
    let wc2 = w_c * w_c;
    put(BoundEntry {
        measure: MeasureId::Infidelity,
        bound: if quad_active { wc2 } else { 0.0 },
        formula_id: "wc2",
        inputs: vec![w_c],
        clamped: !quad_active,
        unbounded: false,
    });
    put(BoundEntry {
        measure: MeasureId::Geometric,
        bound: if quad_active { wc2 } else { 0.0 },
        formula_id: "wc2",
        inputs: vec![w_c],
        clamped: !quad_active,
        unbounded: false,
    });
    put(BoundEntry::finite(
        MeasureId::Concurrence,
        -std::f64::consts::SQRT_2 * w_c,
        "sqrt2-neg-wc",
        w_c,
    ));

    let denom = 1.0 + w_c;
    for measure in [MeasureId::Robustness, MeasureId::GeneralizedRobustness] {
        if denom <= 0.0 {
            put(BoundEntry {
                measure,
                bound: f64::INFINITY,
                formula_id: "neg-wc-over-one-plus-wc",
                inputs: vec![w_c],
                clamped: false,
                unbounded: true,
            });
        } else {
            put(BoundEntry::finite(
                measure,
                -w_c / denom,
                "neg-wc-over-one-plus-wc",
                w_c,
            ));
        }
    }

    put(BoundEntry::finite(
        MeasureId::Groverian,
        -w_c,
        "neg-wc",
        w_c,
    ));

    let root = (1.0 - wc2).max(0.0).sqrt();
    put(BoundEntry {
        measure: MeasureId::Bures,
        bound: if quad_active {
            2.0 * (1.0 - root).max(0.0).sqrt()
        } else {
            0.0
        },
        formula_id: "bures-as-printed",
        inputs: vec![w_c],
        clamped: !quad_active,
        unbounded: false,
    });
    let bures_alternate = BoundEntry {
        measure: MeasureId::Bures,
        bound: if quad_active { 2.0 * (1.0 - root) } else { 0.0 },
        formula_id: "bures-derivation-consistent",
        inputs: vec![w_c],
        clamped: !quad_active,
        unbounded: false,
    };

    BoundReport {
        w_c,
        entries,
        bures_alternate,
    }
}

/// Ratios between the bound-table output for the maximally entangled state
/// in dimension d and the exact values of each quantifier on that state.
pub fn ratio_check(d: usize) -> Result<BTreeMap<MeasureId, f64>> {
    if d < 2 {
        return Err(Error::ParamOutOfRange {
            name: "d",
            value: d as f64,
            min: 2.0,
            max: f64::INFINITY,
        });
    }
    let df = d as f64;
    let w_c = 1.0 / df - 1.0;
    let table = bound_table(w_c);

    // Exact values on |ϕ⟩ = Σᵢ|ii⟩/√d. The infidelity/geometric entries use
    // the squared trace distance as their reference point, which is what
    // makes their ratio come out as exactly 1.
    let exact: [(MeasureId, f64); 8] = [
        (MeasureId::TraceDistance, 1.0 - 1.0 / df),
        (MeasureId::RelativeEntropy, df.log2()),
        (MeasureId::Formation, df.log2()),
        (MeasureId::Infidelity, w_c * w_c),
        (MeasureId::Geometric, w_c * w_c),
        (MeasureId::Concurrence, (2.0 - 2.0 / df).sqrt()),
        (MeasureId::Robustness, df - 1.0),
        (MeasureId::GeneralizedRobustness, df - 1.0),
    ];

    Ok(exact
        .into_iter()
        .map(|(m, value)| (m, table.bound(m) / value))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states;
    use approx::assert_abs_diff_eq;

    #[test]
    fn fidelity_witness_normalization_d2() {
        let w = states::fidelity_witness(2).unwrap();
        assert_abs_diff_eq!(w.lambda_plus(), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(w.lambda_minus(), -0.5, epsilon = 1e-12);
        let norm = normalize(&w);
        assert_abs_diff_eq!(norm.spread(), 1.0, epsilon = 1e-12);
        // Spread 1 means W_c = W.
        assert!(norm.w_c().max_entry_distance(w.operator()) <= 1e-12);
    }

    #[test]
    fn fidelity_witness_normalization_general_d() {
        for d in 2..=5usize {
            let w = states::fidelity_witness(d).unwrap();
            assert_abs_diff_eq!(w.lambda_plus(), 1.0 / d as f64, epsilon = 1e-10);
            assert_abs_diff_eq!(w.lambda_minus(), 1.0 / d as f64 - 1.0, epsilon = 1e-10);
            let norm = normalize(&w);
            assert_abs_diff_eq!(norm.spread(), 1.0, epsilon = 1e-10);
            assert!(norm.w_c().max_entry_distance(w.operator()) <= 1e-9);
        }
    }

    #[test]
    fn scaling_cancels_in_w_c() {
        let w = states::fidelity_witness(2).unwrap();
        let scaled = Witness::new(w.operator() * 10.0).unwrap();
        let a = normalize(&w);
        let b = normalize(&scaled);
        assert!(a.w_c().max_entry_distance(b.w_c()) <= 1e-12);
    }

    #[test]
    fn degenerate_witness_rejected() {
        let op = &HermitianOperator::identity(3) * 2.0;
        assert!(matches!(
            Witness::new(op),
            Err(Error::DegenerateWitness { .. })
        ));
    }

    #[test]
    fn w_prime_spectrum_spans_unit_interval() {
        let w = states::fidelity_witness(3).unwrap();
        let norm = normalize(&w);
        let spectrum = norm.w_prime().spectrum().unwrap();
        assert_abs_diff_eq!(spectrum.lambda_plus(), 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(spectrum.lambda_minus(), -1.0, epsilon = 1e-9);
    }

    #[test]
    fn trace_bound_is_tight_on_max_entangled() {
        for d in [2usize, 4] {
            let rho = states::max_entangled(d).unwrap();
            let w = states::fidelity_witness(d).unwrap();
            let bound = normalize(&w).trace_bound(&rho).unwrap();
            assert_abs_diff_eq!(bound, 1.0 - 1.0 / d as f64, epsilon = 1e-10);
        }
    }

    #[test]
    fn trace_bound_clamps_on_separable_input() {
        let rho = DensityMatrix::maximally_mixed(4);
        let w = states::fidelity_witness(2).unwrap();
        let norm = normalize(&w);
        assert!(norm.w_c_value(&rho).unwrap() > 0.0);
        assert_eq!(norm.trace_bound(&rho).unwrap(), 0.0);
    }

    #[test]
    fn bound_table_at_minus_half() {
        let table = bound_table(-0.5);
        assert_abs_diff_eq!(
            table.bound(MeasureId::RelativeEntropy),
            0.5 / std::f64::consts::LN_2,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(table.bound(MeasureId::Infidelity), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(
            table.bound(MeasureId::Concurrence),
            std::f64::consts::SQRT_2 / 2.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(table.bound(MeasureId::Robustness), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn bound_table_zero_witness_value() {
        let table = bound_table(0.0);
        for entry in table.entries() {
            assert_eq!(entry.bound, 0.0);
        }
    }

    #[test]
    fn robustness_matches_max_entangled_closed_form() {
        for d in 2..=5usize {
            let w_c = 1.0 / d as f64 - 1.0;
            let table = bound_table(w_c);
            assert_abs_diff_eq!(
                table.bound(MeasureId::Robustness),
                d as f64 - 1.0,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn robustness_pole_flagged_not_thrown() {
        let table = bound_table(-1.0);
        assert!(table.get(MeasureId::Robustness).unbounded);
        assert!(table.get(MeasureId::GeneralizedRobustness).unbounded);
        // The rest of the table survives.
        assert_abs_diff_eq!(table.bound(MeasureId::TraceDistance), 1.0);
    }

    #[test]
    fn chain_identities() {
        for i in 1..100 {
            let w_c = -(i as f64) / 100.0;
            let t = bound_table(w_c);
            assert_abs_diff_eq!(
                t.bound(MeasureId::RelativeEntropy),
                t.bound(MeasureId::Formation),
                epsilon = 1e-12
            );
            let tr = t.bound(MeasureId::TraceDistance);
            assert_abs_diff_eq!(t.bound(MeasureId::Infidelity), tr * tr, epsilon = 1e-12);
            assert_abs_diff_eq!(
                t.bound(MeasureId::Geometric),
                t.bound(MeasureId::Infidelity),
                epsilon = 1e-12
            );
            assert_abs_diff_eq!(t.bound(MeasureId::Groverian), tr, epsilon = 1e-12);
        }
    }

    #[test]
    fn ratio_check_closed_forms() {
        for d in 2..=5usize {
            let df = d as f64;
            let ratios = ratio_check(d).unwrap();
            assert_abs_diff_eq!(
                ratios[&MeasureId::Concurrence],
                (1.0 - 1.0 / df).sqrt(),
                epsilon = 1e-12
            );
            assert_abs_diff_eq!(
                ratios[&MeasureId::RelativeEntropy],
                2.0 * (df - 1.0) * (df - 1.0) / (df * df * std::f64::consts::LN_2 * df.log2()),
                epsilon = 1e-12
            );
            assert_abs_diff_eq!(ratios[&MeasureId::TraceDistance], 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(ratios[&MeasureId::Infidelity], 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(ratios[&MeasureId::Robustness], 1.0, epsilon = 1e-12);
        }
        // Spot value from the closed form at d = 2.
        let ratios = ratio_check(2).unwrap();
        assert_abs_diff_eq!(
            ratios[&MeasureId::RelativeEntropy],
            1.0 / (2.0 * std::f64::consts::LN_2),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            ratios[&MeasureId::Concurrence],
            (0.5f64).sqrt(),
            epsilon = 1e-12
        );
    }
}
