//! Reference replay: recompute every tabulated number the toolkit is built
//! around and compare against the expected values, flagging the documented
//! discrepancies instead of reconciling them.

use serde::Serialize;
use serde_json::json;

use witbound::di::{self, BellExpression};
use witbound::oracle::{self, OracleOptions};
use witbound::states::{self, MixConvention};
use witbound::witness::{self, MeasureId};
use witbound::{depth, mdi, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RowStatus {
    /// Computed agrees with expected within tolerance.
    Pass,
    /// Known discrepancy: the disagreement itself is the documented result.
    Flag,
    /// Unexpected mismatch.
    Fail,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReplayRow {
    pub id: String,
    pub computed: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub status: RowStatus,
    /// "analytic" for closed forms and exact enumeration, "heuristic" for
    /// see-saw / oracle results.
    pub provenance: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl ReplayRow {
    fn heuristic(mut self) -> Self {
        self.provenance = "heuristic";
        self
    }
}

fn pass_row(id: &str, computed: f64, expected: f64, tolerance: f64) -> ReplayRow {
    let status = if (computed - expected).abs() <= tolerance {
        RowStatus::Pass
    } else {
        RowStatus::Fail
    };
    ReplayRow {
        id: id.to_string(),
        computed,
        expected,
        tolerance,
        status,
        provenance: "analytic",
        note: None,
    }
}

fn flag_row(id: &str, computed: f64, expected: f64, note: &str) -> ReplayRow {
    ReplayRow {
        id: id.to_string(),
        computed,
        expected,
        tolerance: 0.0,
        status: RowStatus::Flag,
        provenance: "analytic",
        note: Some(note.to_string()),
    }
}

fn trusted_rows(rows: &mut Vec<ReplayRow>) -> Result<()> {
    for d in 2..=5usize {
        let df = d as f64;
        let rho = states::max_entangled(d)?;
        let w = states::fidelity_witness(d)?;
        let bound = witness::normalize(&w).trace_bound(&rho)?;
        rows.push(pass_row(
            &format!("trusted/fidelity/d{d}/trace_bound"),
            bound,
            1.0 - 1.0 / df,
            1e-10,
        ));
        let ratios = witness::ratio_check(d)?;
        rows.push(pass_row(
            &format!("trusted/fidelity/d{d}/ratio_concurrence"),
            ratios[&MeasureId::Concurrence],
            (1.0 - 1.0 / df).sqrt(),
            1e-9,
        ));
        rows.push(pass_row(
            &format!("trusted/fidelity/d{d}/ratio_relative_entropy"),
            ratios[&MeasureId::RelativeEntropy],
            2.0 * (df - 1.0) * (df - 1.0) / (df * df * std::f64::consts::LN_2 * df.log2()),
            1e-9,
        ));
        rows.push(pass_row(
            &format!("trusted/fidelity/d{d}/robustness_bound"),
            witness::bound_table(1.0 / df - 1.0).bound(MeasureId::Robustness),
            df - 1.0,
            1e-9,
        ));
    }
    Ok(())
}

fn mdi_rows(rows: &mut Vec<ReplayRow>, seed: u64) -> Result<()> {
    let w = witbound::HermitianOperator::identity(4);
    let w = &(&w * 0.5) - &states::singlet_ket().outer();
    let tetra = mdi::tetrahedron_states();
    let dec = mdi::decompose_witness(&w, &tetra, &tetra)?;
    let bell = mdi::bell_measurement();
    for i in 0..=5u32 {
        let v = f64::from(i) / 5.0;
        let rho = states::werner(v)?;
        let table = mdi::simulate(&rho, &bell, &bell, &dec)?;
        let w_ab = mdi::outcome_values(&dec, &table)?;
        rows.push(pass_row(
            &format!("mdi/werner/v{i}/diagonal_outcome"),
            w_ab.value(0, 0),
            (1.0 - 3.0 * v) / 16.0,
            1e-10,
        ));
        rows.push(pass_row(
            &format!("mdi/werner/v{i}/off_diagonal_outcome"),
            w_ab.value(0, 1),
            (1.0 + v) / 16.0,
            1e-10,
        ));
        let bound = mdi::mdi_trace_bound(mdi::mdi_value(&w_ab), &w)?;
        rows.push(pass_row(
            &format!("mdi/werner/v{i}/trace_bound"),
            bound,
            (-(1.0 - 3.0 * v) / 8.0).max(0.0),
            1e-10,
        ));
    }
    // At v = 1 the bound is half of the actual distance; an oracle run on
    // the singlet documents the gap.
    let singlet = states::werner(1.0)?;
    let oracle_value = oracle::etr_upper_bound(
        &singlet,
        &[2, 2],
        &OracleOptions {
            m: Some(8),
            restarts: 8,
            max_steps: 1500,
            seed,
            ..OracleOptions::default()
        },
    )?
    .value;
    rows.push(pass_row("mdi/werner/v5/oracle_upper", oracle_value, 0.5, 5e-3).heuristic());
    Ok(())
}

fn di_rows(rows: &mut Vec<ReplayRow>, seed: u64) -> Result<()> {
    let sqrt2 = std::f64::consts::SQRT_2;
    let chsh = BellExpression::chsh();
    rows.push(pass_row(
        "di/chsh/classical_bound",
        di::classical_bound(&chsh)?,
        2.0,
        0.0,
    ));
    let range = di::quantum_range(&chsh, 2, 20, seed)?;
    rows.push(pass_row("di/chsh/seesaw_upper", range.upper, 2.0 * sqrt2, 1e-6).heuristic());
    rows.push(pass_row("di/chsh/seesaw_lower", range.lower, -2.0 * sqrt2, 1e-6).heuristic());
    let analytic = di::known_quantum_range(&chsh).expect("chsh is a known fixture");
    rows.push(pass_row(
        "di/chsh/trace_bound_classical_sep",
        di::di_trace_bound(&chsh, None, &analytic, 2.0 * sqrt2)?,
        0.5 - sqrt2 / 4.0,
        1e-9,
    ));
    rows.push(pass_row(
        "di/chsh/trace_bound_product_sep",
        di::di_trace_bound(&chsh, Some(sqrt2), &analytic, 2.0 * sqrt2)?,
        0.25,
        1e-9,
    ));
    rows.push(pass_row(
        "di/chsh/product_state_max",
        di::chsh_product_max().value,
        sqrt2,
        1e-6,
    ));
    Ok(())
}

fn depth_rows(rows: &mut Vec<ReplayRow>, seed: u64) -> Result<()> {
    // Tabulated witness values at v = 1 and the bounds they imply.
    let (e1, e2) = depth::w_state_expected_wc(1.0);
    rows.push(pass_row(
        "depth/w_state/v1/bound_p1",
        (-e1).max(0.0),
        31.0 / 72.0,
        1e-10,
    ));
    rows.push(pass_row(
        "depth/w_state/v1/bound_p2",
        (-e2).max(0.0),
        5.0 / 24.0,
        1e-10,
    ));
    // Direct evaluation under the stated mixing convention disagrees with
    // the tabulated values; both are emitted.
    let (r1, r2) = depth::w_state_recomputed_wc(1.0, MixConvention::Printed)?;
    rows.push(flag_row(
        "depth/w_state/v1/recomputed_wc_p1",
        r1,
        e1,
        "direct evaluation under the stated mixing convention disagrees with the tabulated witness value",
    ));
    rows.push(flag_row(
        "depth/w_state/v1/recomputed_wc_p2",
        r2,
        e2,
        "direct evaluation under the stated mixing convention disagrees with the tabulated witness value",
    ));
    // Detection thresholds implied by the tabulated linear formulas vs the
    // stated ones.
    rows.push(flag_row(
        "depth/w_state/threshold_p1",
        32.0 / 63.0,
        40.0 / 63.0,
        "zero of the tabulated formula 4/9 - 7v/8 vs the stated threshold",
    ));
    rows.push(flag_row(
        "depth/w_state/threshold_p2",
        16.0 / 21.0,
        8.0 / 21.0,
        "zero of the tabulated formula 2/3 - 7v/8 vs the stated threshold",
    ));

    for n in 2..=3usize {
        let expr = depth::svetlichny(n)?;
        rows.push(pass_row(
            &format!("depth/svetlichny/n{n}/classical_bound"),
            di::classical_bound(&expr)?,
            depth::producibility_bound(n, 1)?,
            0.0,
        ));
        let range = di::quantum_range(&expr, 2, 20, seed)?;
        let analytic = depth::svetlichny_quantum_range(n)?;
        rows.push(
            pass_row(
                &format!("depth/svetlichny/n{n}/seesaw_upper"),
                range.upper,
                analytic.upper,
                1e-5,
            )
            .heuristic(),
        );
        let check = depth::ghz_point_check(n, 1)?;
        if check.agree {
            rows.push(pass_row(
                &format!("depth/svetlichny/n{n}/ghz_point"),
                check.from_observed,
                check.closed_form,
                1e-9,
            ));
        } else {
            rows.push(flag_row(
                &format!("depth/svetlichny/n{n}/ghz_point"),
                check.from_observed,
                check.closed_form,
                "observed-score route and closed-form route to the GHZ-point bound disagree",
            ));
        }
    }
    Ok(())
}

/// Everything a replay run produced.
pub struct ReplayOutcome {
    pub outputs: serde_json::Value,
    /// Ids of rows carrying documented discrepancies (exit code 2).
    pub flags: Vec<String>,
    /// Ids of rows that unexpectedly missed their target (exit code 1).
    pub failures: Vec<String>,
}

/// Run every reference scenario. The output is deterministic for a fixed
/// seed; flags mark the documented discrepancies.
pub fn run(seed: u64) -> Result<ReplayOutcome> {
    let mut rows = Vec::new();
    trusted_rows(&mut rows)?;
    mdi_rows(&mut rows, seed)?;
    di_rows(&mut rows, seed)?;
    depth_rows(&mut rows, seed)?;

    let flags: Vec<String> = rows
        .iter()
        .filter(|r| r.status == RowStatus::Flag)
        .map(|r| r.id.clone())
        .collect();
    let failures: Vec<String> = rows
        .iter()
        .filter(|r| r.status == RowStatus::Fail)
        .map(|r| r.id.clone())
        .collect();
    let total = rows.len();
    let passed = rows.iter().filter(|r| r.status == RowStatus::Pass).count();
    let outputs = json!({
        "rows": rows,
        "total": total,
        "passed": passed,
        "flagged": flags.len(),
        "failed": failures.len(),
    });
    Ok(ReplayOutcome {
        outputs,
        flags,
        failures,
    })
}
