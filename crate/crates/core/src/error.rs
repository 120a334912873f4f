use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("entry count {len} does not match a {dim}x{dim} matrix")]
    BadShape { dim: usize, len: usize },

    #[error("matrix is not Hermitian: residue {residue:.3e} exceeds {tol:.3e}")]
    NotHermitian { residue: f64, tol: f64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("eigensolver did not converge for dim {dim} after {sweeps} sweeps (off-diagonal norm {off:.3e})")]
    EigenConvergence { dim: usize, sweeps: usize, off: f64 },

    #[error("tensor product dimension {dim} exceeds the cap {cap}")]
    TensorDimCap { dim: usize, cap: usize },

    #[error("operator is not positive semidefinite: min eigenvalue {min_eig:.3e}")]
    NotPositive { min_eig: f64 },

    #[error("trace {trace} differs from 1 beyond tolerance")]
    TraceNotOne { trace: f64 },

    #[error("expectation value carries imaginary residue {residue:.3e}")]
    ImaginaryResidue { residue: f64 },

    #[error("witness spectrum is degenerate: lambda+ = lambda- = {lambda}")]
    DegenerateWitness { lambda: f64 },

    #[error(
        "witness decomposition failed: least-squares residual {residual:.3e} exceeds {tol:.3e}"
    )]
    DecompositionFailure { residual: f64, tol: f64 },

    #[error("POVM effect {index} is not positive semidefinite: min eigenvalue {min_eig:.3e}")]
    EffectNotPositive { index: usize, min_eig: f64 },

    #[error("POVM effects sum to identity with residue {residue:.3e}")]
    IncompletePovm { residue: f64 },

    #[error("witness has zero trace norm")]
    ZeroWitness,

    #[error("{count} deterministic strategies exceed the enumeration cap {cap}; consider the coefficient-wise bound sum(|c|) instead")]
    EnumerationCap { count: u128, cap: u128 },

    #[error("quantum range is degenerate: upper {upper} <= lower {lower}")]
    DegenerateRange { upper: f64, lower: f64 },

    #[error(
        "Bell expression term is out of range: party {party}, {kind} {value} (declared {declared})"
    )]
    TermOutOfRange {
        party: usize,
        kind: &'static str,
        value: usize,
        declared: usize,
    },

    #[error("Bell expression has no non-zero coefficients")]
    EmptyExpression,

    #[error("parameter {name} = {value} outside [{min}, {max}]")]
    ParamOutOfRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("{context}: expected {expected} parties/factors, got {got}")]
    ArityMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
