//! Multipartite entanglement-depth bounds from Svetlichny scores.
//!
//! The n-party Svetlichny expression is normalized so its extreme quantum
//! values are ±2^{(n−1)/2}. The maximum over k-producible states is the
//! closed form β_k = 2^{(n−2⌊⌈n/k⌉/2⌋)/2}; an observed score above β_k
//! certifies entanglement depth > k together with a quantitative
//! trace-distance bound to the k-producible set.

use serde::Serialize;

use crate::di::{self, BellExpression, QuantumRange};
use crate::error::{Error, Result};
use crate::operator::DensityMatrix;
use crate::states::{self, MixConvention};
use crate::witness::{normalize, Witness};

/// Party count and producibility level, capped for enumeration/memory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DepthScenario {
    n: usize,
    k: usize,
}

impl DepthScenario {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if !(2..=10).contains(&n) {
            return Err(Error::ParamOutOfRange {
                name: "n",
                value: n as f64,
                min: 2.0,
                max: 10.0,
            });
        }
        if !(1..=n).contains(&k) {
            return Err(Error::ParamOutOfRange {
                name: "k",
                value: k as f64,
                min: 1.0,
                max: n as f64,
            });
        }
        Ok(Self { n, k })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

/// 2^{j/2} with the power-of-two part applied exactly, so identities like
/// `4·2^{−3/2} = 2^{1/2}` hold bitwise in the tests that rely on them.
pub(crate) fn exp2_half(j: i32) -> f64 {
    if j.rem_euclid(2) == 0 {
        (2.0f64).powi(j / 2)
    } else {
        std::f64::consts::SQRT_2 * (2.0f64).powi((j - 1) / 2)
    }
}

/// Svetlichny expression: coefficients 2^{−n/2}·(−1)^{a+⌊s/2⌋} over all
/// binary outcome/input tuples, with a = Σaᵢ and s = Σsᵢ.
pub fn svetlichny(n: usize) -> Result<BellExpression> {
    if !(2..=10).contains(&n) {
        return Err(Error::ParamOutOfRange {
            name: "n",
            value: n as f64,
            min: 2.0,
            max: 10.0,
        });
    }
    let magnitude = exp2_half(-(n as i32));
    let mut expr = BellExpression::new(vec![2; n], vec![2; n])?;
    let mut a = vec![0usize; n];
    let mut s = vec![0usize; n];
    for a_code in 0..(1u32 << n) {
        for (i, ai) in a.iter_mut().enumerate() {
            *ai = ((a_code >> i) & 1) as usize;
        }
        let a_sum: u32 = a_code.count_ones();
        for s_code in 0..(1u32 << n) {
            for (i, si) in s.iter_mut().enumerate() {
                *si = ((s_code >> i) & 1) as usize;
            }
            let s_sum = s_code.count_ones();
            let sign = if (a_sum + s_sum / 2).is_multiple_of(2) {
                1.0
            } else {
                -1.0
            };
            expr.add_term(&a, &s, sign * magnitude)?;
        }
    }
    Ok(expr)
}

/// β_k = 2^{(n − 2⌊⌈n/k⌉/2⌋)/2}, the Svetlichny maximum over k-producible
/// states.
pub fn producibility_bound(n: usize, k: usize) -> Result<f64> {
    let scenario = DepthScenario::new(n, k)?;
    let groups = scenario.n.div_ceil(scenario.k); // ⌈n/k⌉
    Ok(exp2_half(scenario.n as i32 - 2 * (groups / 2) as i32))
}

/// Analytic extreme quantum values ±2^{(n−1)/2} of the Svetlichny
/// expression.
pub fn svetlichny_quantum_range(n: usize) -> Result<QuantumRange> {
    if !(2..=10).contains(&n) {
        return Err(Error::ParamOutOfRange {
            name: "n",
            value: n as f64,
            min: 2.0,
            max: 10.0,
        });
    }
    let extreme = exp2_half(n as i32 - 1);
    Ok(QuantumRange::analytic(extreme, -extreme))
}

/// Analytic quantum range for known fixtures: Svetlichny at the declared
/// party count, then the bipartite fixtures.
pub fn known_quantum_range(expr: &BellExpression) -> Option<QuantumRange> {
    let n = expr.n_parties();
    if (2..=10).contains(&n)
        && expr.inputs().iter().all(|&m| m == 2)
        && expr.outputs().iter().all(|&o| o == 2)
    {
        if let Ok(reference) = svetlichny(n) {
            if expr.approx_eq(&reference, 1e-12) {
                return svetlichny_quantum_range(n).ok();
            }
        }
    }
    di::known_quantum_range(expr)
}

/// E_tr to the k-producible set: max(0, (observed − β_k)/2^{(n+1)/2}).
///
/// The denominator is the full quantum width ⟨𝓑⟩₊ − ⟨𝓑⟩₋ = 2·2^{(n−1)/2}.
pub fn depth_trace_bound(n: usize, k: usize, observed: f64) -> Result<f64> {
    let beta = producibility_bound(n, k)?;
    let width = exp2_half(n as i32 + 1);
    Ok(((observed - beta) / width).max(0.0))
}

/// Closed-form depth bound at the GHZ-maximal score:
/// ½(1 − 2^{−2⌊⌈n/k⌉/2⌋}).
pub fn ghz_point_bound(n: usize, k: usize) -> Result<f64> {
    let scenario = DepthScenario::new(n, k)?;
    let groups = scenario.n.div_ceil(scenario.k);
    Ok(0.5 * (1.0 - (2.0f64).powi(-2 * (groups / 2) as i32)))
}

/// Both routes to the GHZ-point bound. They agree only where both clamp to
/// zero; elsewhere the discrepancy is surfaced, not hidden.
#[derive(Debug, Clone, Serialize)]
pub struct GhzPointCheck {
    pub n: usize,
    pub k: usize,
    /// Observed-score route at the GHZ-maximal value 2^{(n−1)/2}.
    pub from_observed: f64,
    /// Closed-form route.
    pub closed_form: f64,
    pub agree: bool,
}

pub fn ghz_point_check(n: usize, k: usize) -> Result<GhzPointCheck> {
    let from_observed = depth_trace_bound(n, k, exp2_half(n as i32 - 1))?;
    let closed_form = ghz_point_bound(n, k)?;
    Ok(GhzPointCheck {
        n,
        k,
        from_observed,
        closed_form,
        agree: (from_observed - closed_form).abs() <= 1e-9,
    })
}

/// Trusted-device depth bound: identical mathematics to the bipartite
/// trusted bound, with the separable set replaced by the k-producible set
/// the witness was built for.
pub fn trusted_depth_bound(witness: &Witness, rho: &DensityMatrix) -> Result<f64> {
    normalize(witness).trace_bound(rho)
}

/// Witness values (w_{c,P1}, w_{c,P2}) of the noisy W family as tabulated
/// for it: 4/9 − 7v/8 and 2/3 − 7v/8.
///
/// These are the reference numbers the replay checks against. Direct
/// evaluation under either mixing convention does not reproduce them for
/// general v (see `w_state_recomputed_wc`), which is why both are reported
/// side by side.
pub fn w_state_expected_wc(v: f64) -> (f64, f64) {
    (4.0 / 9.0 - 7.0 * v / 8.0, 2.0 / 3.0 - 7.0 * v / 8.0)
}

/// Witness values (w_{c,P1}, w_{c,P2}) recomputed from the generated noisy
/// W state under the given mixing convention.
pub fn w_state_recomputed_wc(v: f64, convention: MixConvention) -> Result<(f64, f64)> {
    let rho = states::noisy_w_with(v, convention)?;
    let (p1, p2) = states::w_depth_witnesses()?;
    let w1 = normalize(&p1).w_c_value(&rho)?;
    let w2 = normalize(&p2).w_c_value(&rho)?;
    Ok((w1, w2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::di::classical_bound;
    use approx::assert_abs_diff_eq;

    #[test]
    fn svetlichny_two_party_coefficient() {
        let expr = svetlichny(2).unwrap();
        assert_abs_diff_eq!(expr.coefficient(&[0, 0], &[0, 0]), 0.5, epsilon = 0.0);
    }

    #[test]
    fn svetlichny_rejects_out_of_range() {
        assert!(svetlichny(1).is_err());
        assert!(svetlichny(11).is_err());
    }

    #[test]
    fn enumerated_classical_bound_matches_beta_one() {
        // n = 4 exercises the even case where the bound drops back to 1.
        for n in [2usize, 3, 4] {
            let expr = svetlichny(n).unwrap();
            let enumerated = classical_bound(&expr).unwrap();
            let formula = producibility_bound(n, 1).unwrap();
            assert_eq!(enumerated, formula, "n = {n}");
        }
    }

    #[test]
    fn producibility_bound_spot_values() {
        assert_abs_diff_eq!(
            producibility_bound(3, 3).unwrap(),
            exp2_half(3),
            epsilon = 0.0
        );
        assert_abs_diff_eq!(
            producibility_bound(3, 1).unwrap(),
            std::f64::consts::SQRT_2,
            epsilon = 0.0
        );
        assert_abs_diff_eq!(producibility_bound(4, 2).unwrap(), 2.0, epsilon = 0.0);
    }

    #[test]
    fn beta_is_non_decreasing_in_k() {
        for n in 2..=10usize {
            let mut prev = 0.0;
            for k in 1..=n {
                let beta = producibility_bound(n, k).unwrap();
                assert!(beta >= prev, "β_k dipped at n = {n}, k = {k}");
                prev = beta;
            }
        }
    }

    #[test]
    fn beta_at_full_producibility_clears_the_quantum_range() {
        // The closed form gives β_n = 2^{n/2}, above the extreme quantum
        // value 2^{(n−1)/2}, so no score can certify depth beyond n and the
        // k = n bound always clamps to zero.
        for n in 2..=10usize {
            let beta_n = producibility_bound(n, n).unwrap();
            assert_abs_diff_eq!(beta_n, exp2_half(n as i32), epsilon = 0.0);
            let quantum_max = svetlichny_quantum_range(n).unwrap().upper;
            assert!(beta_n >= quantum_max);
            assert_eq!(depth_trace_bound(n, n, quantum_max).unwrap(), 0.0);
        }
    }

    #[test]
    fn depth_bound_clamps_at_threshold() {
        let beta = producibility_bound(5, 2).unwrap();
        assert_eq!(depth_trace_bound(5, 2, beta).unwrap(), 0.0);
    }

    #[test]
    fn depth_bound_spot_value() {
        let bound = depth_trace_bound(3, 1, 2.0).unwrap();
        assert_abs_diff_eq!(
            bound,
            (2.0 - std::f64::consts::SQRT_2) / 4.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn ghz_point_routes_disagree_where_documented() {
        let check = ghz_point_check(3, 1).unwrap();
        assert_abs_diff_eq!(check.from_observed, 0.5 - exp2_half(-3), epsilon = 1e-12);
        assert_abs_diff_eq!(check.closed_form, 0.375, epsilon = 1e-12);
        assert!(!check.agree);
        // At k = n both routes clamp to zero and agree.
        let trivial = ghz_point_check(4, 4).unwrap();
        assert_eq!(trivial.from_observed, 0.0);
        assert_eq!(trivial.closed_form, 0.0);
        assert!(trivial.agree);
    }

    #[test]
    fn ghz_asymptote_trend_for_full_product_level() {
        let mut prev = 0.0;
        for n in 2..=10usize {
            let bound = depth_trace_bound(n, 1, exp2_half(n as i32 - 1)).unwrap();
            assert!(bound >= prev - 1e-15, "trend broke at n = {n}");
            assert!(bound < 0.5);
            prev = bound;
        }
        // Approaches 1/2 from below.
        assert!(prev > 0.45);
    }

    #[test]
    fn quantum_width_is_two_to_the_n_plus_one_half() {
        for n in 2..=10usize {
            let range = svetlichny_quantum_range(n).unwrap();
            assert_abs_diff_eq!(range.width(), exp2_half(n as i32 + 1), epsilon = 0.0);
        }
    }

    #[test]
    fn known_range_recognizes_svetlichny() {
        let expr = svetlichny(3).unwrap();
        let range = known_quantum_range(&expr).unwrap();
        assert_abs_diff_eq!(range.upper, 2.0, epsilon = 0.0);
        // And still falls through to CHSH.
        let chsh = BellExpression::chsh();
        assert!(known_quantum_range(&chsh).is_some());
    }

    #[test]
    fn expected_w_state_values_at_full_mixing() {
        let (w1, w2) = w_state_expected_wc(1.0);
        assert_abs_diff_eq!(w1, -31.0 / 72.0, epsilon = 1e-15);
        assert_abs_diff_eq!(w2, -5.0 / 24.0, epsilon = 1e-15);
        // Straight through the clamp these give the depth bounds.
        assert_abs_diff_eq!((-w1).max(0.0), 31.0 / 72.0, epsilon = 1e-15);
        assert_abs_diff_eq!((-w2).max(0.0), 5.0 / 24.0, epsilon = 1e-15);
    }

    #[test]
    fn recomputed_w_state_values_diverge_from_expected() {
        // Printed convention at v = 1 is the fully mixed state; the witness
        // values are positive there, unlike the tabulated −31/72, −5/24.
        let (w1, w2) = w_state_recomputed_wc(1.0, MixConvention::Printed).unwrap();
        assert_abs_diff_eq!(w1, 23.0 / 72.0, epsilon = 1e-10);
        assert_abs_diff_eq!(w2, 2.0 / 3.0 - 1.0 / 8.0, epsilon = 1e-10);
        let (e1, e2) = w_state_expected_wc(1.0);
        assert!((w1 - e1).abs() > 1e-3);
        assert!((w2 - e2).abs() > 1e-3);
    }

    #[test]
    fn trusted_depth_bound_clamps_on_fully_mixed() {
        let (p1, _) = crate::states::w_depth_witnesses().unwrap();
        let rho = DensityMatrix::maximally_mixed(8);
        assert_eq!(trusted_depth_bound(&p1, &rho).unwrap(), 0.0);
    }

    #[test]
    fn scenario_validation() {
        assert!(DepthScenario::new(1, 1).is_err());
        assert!(DepthScenario::new(11, 2).is_err());
        assert!(DepthScenario::new(4, 0).is_err());
        assert!(DepthScenario::new(4, 5).is_err());
        assert!(DepthScenario::new(4, 4).is_ok());
    }
}
