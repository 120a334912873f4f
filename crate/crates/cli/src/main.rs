//! `witbound` — JSON-in/JSON-out CLI over the entanglement-bound toolkit.
//!
//! Subcommands: `gen-state`, `bound`, `mdi`, `di`, `depth`, `oracle`,
//! `replay`. Exit codes: 0 success, 2 when a report carries documented
//! discrepancy flags, 1 on errors.

mod replay;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use report::{Digest, Labeled, RunReport};
use witbound::di::{self, BellExpression, BellExpressionJson, Certainty};
use witbound::io::{MatrixJson, StateJson};
use witbound::mdi::{self, PovmMeasurement};
use witbound::oracle::{self, OracleOptions};
use witbound::states::{MixConvention, StateFamily};
use witbound::witness::{self, BoundEntry, MeasureId, Witness};
use witbound::{depth, DensityMatrix, HermitianOperator, Tolerances};

#[derive(Parser)]
#[command(
    name = "witbound",
    version,
    about = "Entanglement bounds from witness data"
)]
struct Cli {
    /// Seed for every heuristic search (see-saw, oracle).
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,

    /// Validation tolerance profile for file inputs.
    #[arg(long, global = true, value_enum, default_value_t = TolProfile::Default)]
    tol_profile: TolProfile,

    /// Write the JSON output here instead of stdout.
    #[arg(short = 'o', long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum TolProfile {
    Default,
    Strict,
}

impl TolProfile {
    fn tolerances(self) -> Tolerances {
        match self {
            TolProfile::Default => Tolerances::default(),
            TolProfile::Strict => Tolerances::strict(),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    MaxEntangled,
    Werner,
    NoisyW,
    Ghz,
}

#[derive(Clone, Copy, ValueEnum)]
enum MixConventionArg {
    Printed,
    Inverted,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a state fixture as a state JSON file.
    GenState {
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Local dimension for max-entangled.
        #[arg(long, default_value_t = 2)]
        d: usize,
        /// Party count for ghz.
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Mixing parameter for werner / noisy-w.
        #[arg(long, default_value_t = 0.0)]
        v: f64,
        #[arg(long, value_enum, default_value_t = MixConventionArg::Printed)]
        mix_convention: MixConventionArg,
    },
    /// Trusted-device bound table from a witness and a state.
    Bound {
        #[arg(long)]
        witness: Option<PathBuf>,
        #[arg(long)]
        state: Option<PathBuf>,
        /// "all" or a comma-separated list of measure ids (e.g. E_tr,E_C).
        #[arg(long, default_value = "all")]
        measures: String,
        /// Print the bound/exact ratio table for the maximally entangled
        /// state in this dimension instead of reading files.
        #[arg(long)]
        ratios: Option<usize>,
    },
    /// Measurement-device-independent chain: correlations, w_{a,b}, I', bound.
    Mdi {
        #[arg(long)]
        witness: PathBuf,
        #[arg(long)]
        state: PathBuf,
        /// "tetra" or a JSON file {"tau": [matrix...], "omega": [matrix...]}.
        #[arg(long, default_value = "tetra")]
        ancillas: String,
        /// "bell" or a JSON file {"alice": [matrix...], "bob": [matrix...]}.
        #[arg(long, default_value = "bell")]
        measurements: String,
    },
    /// Device-independent bound from a Bell expression and an observed value.
    Di {
        #[arg(long)]
        expr: PathBuf,
        #[arg(long)]
        observed: f64,
        /// Tighter separable-state maximum; defaults to the classical bound.
        #[arg(long)]
        beta_sep: Option<f64>,
        /// Local dimension for the see-saw.
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = di::DEFAULT_RESTARTS)]
        restarts: usize,
    },
    /// Entanglement-depth bound from a Svetlichny score.
    Depth {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        observed: f64,
    },
    /// Separable-approximation upper bound on E_tr, plus the PPT verdict.
    Oracle {
        #[arg(long)]
        state: PathBuf,
        /// Comma-separated local dimensions, e.g. 2,2.
        #[arg(long, default_value = "2,2")]
        dims: String,
        /// Product terms in the ansatz; defaults to the total dimension.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
        /// Claimed lower bound to verify against the oracle value.
        #[arg(long)]
        lower_bound: Option<f64>,
    },
    /// Recompute the full reference table and flag known discrepancies.
    Replay,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::from(1)
        }
    }
}

type AnyError = Box<dyn std::error::Error>;

fn read_file(digest: &mut Digest, path: &Path) -> Result<String, AnyError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| format!("reading {}: {e}", path.display()))?;
    digest.update(text.as_bytes());
    Ok(text)
}

fn load_operator(
    digest: &mut Digest,
    path: &Path,
    tol: &Tolerances,
) -> Result<HermitianOperator, AnyError> {
    let text = read_file(digest, path)?;
    let json: MatrixJson = serde_json::from_str(&text)?;
    Ok(json.into_operator(tol)?)
}

fn load_state(
    digest: &mut Digest,
    path: &Path,
    tol: &Tolerances,
) -> Result<DensityMatrix, AnyError> {
    let text = read_file(digest, path)?;
    let json: StateJson = serde_json::from_str(&text)?;
    Ok(json.into_density(tol)?)
}

fn emit(out: Option<&Path>, payload: &str) -> Result<(), AnyError> {
    match out {
        Some(path) => std::fs::write(path, payload)
            .map_err(|e| format!("writing {}: {e}", path.display()).into()),
        None => {
            println!("{payload}");
            Ok(())
        }
    }
}

/// Echo of the invocation, minus the output destination so reports stay
/// byte-identical wherever they are written.
fn command_echo() -> String {
    let mut parts = Vec::new();
    let mut args = std::env::args().skip(1);
    while let Some(arg) = args.next() {
        if arg == "-o" || arg == "--out" {
            let _ = args.next();
            continue;
        }
        parts.push(arg);
    }
    parts.join(" ")
}

fn run(cli: Cli) -> Result<ExitCode, AnyError> {
    let tol = cli.tol_profile.tolerances();
    let seed = cli.seed;
    let mut digest = Digest::new();

    let report = match cli.command {
        Command::GenState {
            family,
            d,
            n,
            v,
            mix_convention,
        } => {
            let family = match family {
                FamilyArg::MaxEntangled => StateFamily::MaxEntangled { d },
                FamilyArg::Werner => StateFamily::Werner { v },
                FamilyArg::NoisyW => StateFamily::NoisyW {
                    v,
                    convention: match mix_convention {
                        MixConventionArg::Printed => MixConvention::Printed,
                        MixConventionArg::Inverted => MixConvention::Inverted,
                    },
                },
                FamilyArg::Ghz => StateFamily::Ghz { n },
            };
            let rho = family.generate()?;
            let payload = serde_json::to_string_pretty(&StateJson::from(&rho))?;
            emit(cli.out.as_deref(), &payload)?;
            return Ok(ExitCode::SUCCESS);
        }
        Command::Bound {
            witness,
            state,
            measures,
            ratios,
        } => bound_command(&mut digest, witness, state, &measures, ratios, &tol, seed)?,
        Command::Mdi {
            witness,
            state,
            ancillas,
            measurements,
        } => mdi_command(
            &mut digest,
            &witness,
            &state,
            &ancillas,
            &measurements,
            &tol,
            seed,
        )?,
        Command::Di {
            expr,
            observed,
            beta_sep,
            dim,
            restarts,
        } => di_command(&mut digest, &expr, observed, beta_sep, dim, restarts, seed)?,
        Command::Depth { n, k, observed } => depth_command(n, k, observed, seed)?,
        Command::Oracle {
            state,
            dims,
            m,
            restarts,
            lower_bound,
        } => oracle_command(
            &mut digest,
            &state,
            &dims,
            m,
            restarts,
            lower_bound,
            &tol,
            seed,
        )?,
        Command::Replay => {
            let outcome = replay::run(seed)?;
            if !outcome.failures.is_empty() {
                let payload = serde_json::to_string_pretty(&outcome.outputs)?;
                emit(cli.out.as_deref(), &payload)?;
                return Err(format!(
                    "replay rows missed their targets: {}",
                    outcome.failures.join(", ")
                )
                .into());
            }
            let mut report = RunReport::new(
                command_echo(),
                seed,
                Digest::new().finish(),
                outcome.outputs,
            );
            report.flags = outcome.flags;
            report
        }
    };

    let exit = if report.flags.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    };
    let payload = serde_json::to_string_pretty(&report)?;
    emit(cli.out.as_deref(), &payload)?;
    Ok(exit)
}

fn entry_json(entry: &BoundEntry) -> Value {
    let labeled = if entry.unbounded {
        Labeled::unbounded()
    } else {
        Labeled::maybe_clamped(entry.bound, entry.clamped)
    };
    json!({
        "bound": labeled,
        "formula": entry.formula_id,
        "inputs": entry.inputs,
    })
}

fn bound_command(
    digest: &mut Digest,
    witness_path: Option<PathBuf>,
    state_path: Option<PathBuf>,
    measures: &str,
    ratios: Option<usize>,
    tol: &Tolerances,
    seed: u64,
) -> Result<RunReport, AnyError> {
    if let Some(d) = ratios {
        let table = witness::ratio_check(d)?;
        let ratios_json: Value = table
            .iter()
            .map(|(m, r)| (m.as_str().to_string(), json!(Labeled::analytic(*r))))
            .collect::<serde_json::Map<_, _>>()
            .into();
        let outputs = json!({ "d": d, "ratios": ratios_json });
        return Ok(RunReport::new(
            command_echo(),
            seed,
            digest.finish(),
            outputs,
        ));
    }

    let witness_path = witness_path.ok_or("--witness is required unless --ratios is given")?;
    let state_path = state_path.ok_or("--state is required unless --ratios is given")?;
    let op = load_operator(digest, &witness_path, tol)?;
    let rho = load_state(digest, &state_path, tol)?;
    let witness = Witness::new(op)?;
    let normalized = witness::normalize(&witness);
    let w_c = normalized.w_c_value(&rho)?;
    let trace_bound = normalized.trace_bound(&rho)?;
    let table = witness::bound_table(w_c);

    let selected: Vec<MeasureId> = if measures.trim() == "all" {
        MeasureId::ALL.to_vec()
    } else {
        let mut picked = Vec::new();
        for token in measures.split(',') {
            let token = token.trim();
            let found = MeasureId::ALL
                .iter()
                .find(|m| m.as_str().eq_ignore_ascii_case(token))
                .ok_or_else(|| format!("unknown measure id: {token}"))?;
            picked.push(*found);
        }
        picked
    };

    let mut bounds = serde_json::Map::new();
    for measure in &selected {
        bounds.insert(
            measure.as_str().to_string(),
            entry_json(table.get(*measure)),
        );
    }
    let outputs = json!({
        "lambda_plus": Labeled::analytic(witness.lambda_plus()),
        "lambda_minus": Labeled::analytic(witness.lambda_minus()),
        "spread": Labeled::analytic(witness.spread()),
        "w_c": Labeled::analytic(w_c),
        "trace_bound": Labeled::maybe_clamped(trace_bound, w_c >= 0.0),
        "bounds": Value::Object(bounds),
        "bures_alternate": entry_json(&table.bures_alternate),
    });
    Ok(RunReport::new(
        command_echo(),
        seed,
        digest.finish(),
        outputs,
    ))
}

fn load_matrix_list(
    text: &str,
    key: &str,
    tol: &Tolerances,
) -> Result<Vec<DensityMatrix>, AnyError> {
    let value: Value = serde_json::from_str(text)?;
    let list = value
        .get(key)
        .and_then(Value::as_array)
        .ok_or_else(|| format!("missing '{key}' list"))?;
    let mut out = Vec::with_capacity(list.len());
    for item in list {
        let matrix: MatrixJson = serde_json::from_value(item.clone())?;
        out.push(DensityMatrix::new_with(matrix.into_operator(tol)?, tol)?);
    }
    Ok(out)
}

fn load_effect_list(text: &str, key: &str, tol: &Tolerances) -> Result<PovmMeasurement, AnyError> {
    let value: Value = serde_json::from_str(text)?;
    let list = value
        .get(key)
        .and_then(Value::as_array)
        .ok_or_else(|| format!("missing '{key}' list"))?;
    let mut effects = Vec::with_capacity(list.len());
    for item in list {
        let matrix: MatrixJson = serde_json::from_value(item.clone())?;
        effects.push(matrix.into_operator(tol)?);
    }
    Ok(PovmMeasurement::new(effects)?)
}

fn mdi_command(
    digest: &mut Digest,
    witness_path: &Path,
    state_path: &Path,
    ancillas: &str,
    measurements: &str,
    tol: &Tolerances,
    seed: u64,
) -> Result<RunReport, AnyError> {
    let w = load_operator(digest, witness_path, tol)?;
    let rho = load_state(digest, state_path, tol)?;

    let (tau, omega) = if ancillas == "tetra" {
        let tetra = mdi::tetrahedron_states();
        (tetra.clone(), tetra)
    } else {
        let text = read_file(digest, Path::new(ancillas))?;
        (
            load_matrix_list(&text, "tau", tol)?,
            load_matrix_list(&text, "omega", tol)?,
        )
    };
    let (alice, bob) = if measurements == "bell" {
        (mdi::bell_measurement(), mdi::bell_measurement())
    } else {
        let text = read_file(digest, Path::new(measurements))?;
        (
            load_effect_list(&text, "alice", tol)?,
            load_effect_list(&text, "bob", tol)?,
        )
    };

    let dec = mdi::decompose_witness(&w, &tau, &omega)?;
    let table = mdi::simulate(&rho, &alice, &bob, &dec)?;
    let w_ab = mdi::outcome_values(&dec, &table)?;
    let i_prime = mdi::mdi_value(&w_ab);
    let bound = mdi::mdi_trace_bound(i_prime, &w)?;
    let trace_norm_wt = w.transposed().trace_norm()?;
    // Observed proportionality between the first-outcome value and the
    // trusted witness value; no constant is assumed.
    let trusted_value = witbound::expectation(&w, &rho)?;
    let w11_factor = if trusted_value.abs() > 1e-9 {
        Some(w_ab.value(0, 0) / trusted_value)
    } else {
        None
    };

    let p_values: Vec<Vec<Vec<Vec<f64>>>> = (0..table.n_a())
        .map(|a| {
            (0..table.n_b())
                .map(|b| {
                    (0..table.n_s())
                        .map(|s| (0..table.n_t()).map(|t| table.prob(a, b, s, t)).collect())
                        .collect()
                })
                .collect()
        })
        .collect();
    let w_values: Vec<Vec<f64>> = (0..w_ab.n_a())
        .map(|a| (0..w_ab.n_b()).map(|b| w_ab.value(a, b)).collect())
        .collect();

    let outputs = json!({
        "p_table": { "provenance": "analytic", "values": p_values },
        "w_table": { "provenance": "analytic", "values": w_values },
        "i_prime": Labeled::analytic(i_prime),
        "trace_norm_wt": Labeled::analytic(trace_norm_wt),
        "trace_bound": Labeled::maybe_clamped(bound, i_prime >= 0.0),
        "w11_to_trusted_factor": w11_factor.map(Labeled::analytic),
    });
    Ok(RunReport::new(
        command_echo(),
        seed,
        digest.finish(),
        outputs,
    ))
}

fn di_command(
    digest: &mut Digest,
    expr_path: &Path,
    observed: f64,
    beta_sep: Option<f64>,
    dim: usize,
    restarts: usize,
    seed: u64,
) -> Result<RunReport, AnyError> {
    let text = read_file(digest, expr_path)?;
    let parsed: BellExpressionJson = serde_json::from_str(&text)?;
    let expr = BellExpression::try_from(parsed)?;

    let classical = di::classical_bound(&expr)?;
    let range = match depth::known_quantum_range(&expr) {
        Some(range) => range,
        None => di::quantum_range(&expr, dim, restarts, seed)?,
    };
    let label = |value: f64, certainty: Certainty| match certainty {
        Certainty::Analytic => Labeled::analytic(value),
        Certainty::Heuristic => Labeled::heuristic(value),
    };
    let (beta, beta_source) = match beta_sep {
        Some(b) => (b, "user-supplied"),
        None => (classical, "classical-bound"),
    };
    let bound = di::di_trace_bound(&expr, Some(beta), &range, observed)?;
    let clamp_hit = observed <= beta;

    let mut outputs = json!({
        "classical_bound": Labeled::analytic(classical),
        "quantum_upper": label(range.upper, range.upper_certainty),
        "quantum_lower": label(range.lower, range.lower_certainty),
        "observed": Labeled::analytic(observed),
        "beta_sep": { "value": Labeled::analytic(beta), "source": beta_source },
        "trace_bound": if clamp_hit {
            Labeled::clamped(bound)
        } else if range.upper_certainty == Certainty::Heuristic {
            Labeled::heuristic(bound)
        } else {
            Labeled::analytic(bound)
        },
    });
    if beta_source == "user-supplied" {
        outputs["beta_sep"]["assumption"] = Value::String(
            "caller asserts this separable-state maximum; it is not derived here".to_string(),
        );
    }
    Ok(RunReport::new(
        command_echo(),
        seed,
        digest.finish(),
        outputs,
    ))
}

fn depth_command(n: usize, k: usize, observed: f64, seed: u64) -> Result<RunReport, AnyError> {
    let beta_k = depth::producibility_bound(n, k)?;
    let bound = depth::depth_trace_bound(n, k, observed)?;
    let check = depth::ghz_point_check(n, k)?;
    let outputs = json!({
        "beta_k": Labeled::analytic(beta_k),
        "bound": Labeled::maybe_clamped(bound, observed <= beta_k),
        "ghz_asymptote": Labeled::analytic(check.closed_form),
        "ghz_point_cross_check": {
            "from_observed": Labeled::analytic(check.from_observed),
            "closed_form": Labeled::analytic(check.closed_form),
            "agree": check.agree,
        },
    });
    let mut report = RunReport::new(command_echo(), seed, Digest::new().finish(), outputs);
    if !check.agree {
        report.flags.push(format!(
            "depth/ghz_point_cross_check/n{n}k{k}: observed-score and closed-form routes disagree"
        ));
    }
    Ok(report)
}

#[allow(clippy::too_many_arguments)]
fn oracle_command(
    digest: &mut Digest,
    state_path: &Path,
    dims: &str,
    m: Option<usize>,
    restarts: usize,
    lower_bound: Option<f64>,
    tol: &Tolerances,
    seed: u64,
) -> Result<RunReport, AnyError> {
    let rho = load_state(digest, state_path, tol)?;
    let dims: Vec<usize> = dims
        .split(',')
        .map(|token| token.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|e| format!("parsing --dims: {e}"))?;

    let options = OracleOptions {
        m,
        restarts,
        seed,
        ..OracleOptions::default()
    };
    let result = oracle::etr_upper_bound(&rho, &dims, &options)?;
    let ppt = if dims.len() == 2 {
        Some(oracle::ppt_check(&rho, (dims[0], dims[1]))?)
    } else {
        None
    };

    let mut outputs = json!({
        "upper_bound": Labeled::heuristic(result.value),
        "m": result.ansatz.n_terms(),
        "restarts": result.restarts,
        "ppt_verdict": ppt,
    });
    if let Some(lower) = lower_bound {
        let verdict = oracle::verify(&rho, &dims, lower, &options)?;
        outputs["verify"] = json!({
            "pass": verdict.pass,
            "lower_bound": Labeled::analytic(verdict.lower_bound),
            "oracle_upper_bound": Labeled::heuristic(verdict.oracle_upper_bound),
            "slack": Labeled::heuristic(verdict.slack),
        });
    }
    Ok(RunReport::new(
        command_echo(),
        seed,
        digest.finish(),
        outputs,
    ))
}
