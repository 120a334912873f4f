//! Report envelope shared by every subcommand.
//!
//! Each numeric output is wrapped with a provenance label so downstream
//! tooling can tell closed-form values from heuristic-search values and see
//! where a clamp fired.

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// Closed-form or exactly enumerated.
    Analytic,
    /// Best value a seeded search found.
    Heuristic,
    /// A max(0, ·) clamp was active.
    Clamped,
}

/// A numeric output with its provenance label.
#[derive(Debug, Clone, Serialize)]
pub struct Labeled {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    pub provenance: Provenance,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub unbounded: bool,
}

impl Labeled {
    pub fn analytic(value: f64) -> Self {
        Self {
            value: Some(value),
            provenance: Provenance::Analytic,
            unbounded: false,
        }
    }

    pub fn heuristic(value: f64) -> Self {
        Self {
            value: Some(value),
            provenance: Provenance::Heuristic,
            unbounded: false,
        }
    }

    pub fn clamped(value: f64) -> Self {
        Self {
            value: Some(value),
            provenance: Provenance::Clamped,
            unbounded: false,
        }
    }

    /// Label a bound that may have been clamped at zero.
    pub fn maybe_clamped(value: f64, clamp_active: bool) -> Self {
        if clamp_active {
            Self::clamped(value)
        } else {
            Self::analytic(value)
        }
    }

    pub fn unbounded() -> Self {
        Self {
            value: None,
            provenance: Provenance::Analytic,
            unbounded: true,
        }
    }
}

/// Envelope around one command run.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub seed: u64,
    pub inputs_digest: String,
    pub outputs: Value,
    /// Known discrepancies surfaced by this run; a non-empty list makes the
    /// process exit with code 2.
    pub flags: Vec<String>,
}

impl RunReport {
    pub fn new(command: String, seed: u64, digest: String, outputs: Value) -> Self {
        Self {
            command,
            seed,
            inputs_digest: digest,
            outputs,
            flags: Vec::new(),
        }
    }
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// FNV-1a over the concatenated input files; cheap and dependency-free.
pub struct Digest {
    state: u64,
}

impl Digest {
    pub fn new() -> Self {
        Self { state: FNV_OFFSET }
    }

    pub fn update(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.state ^= b as u64;
            self.state = self.state.wrapping_mul(FNV_PRIME);
        }
    }

    pub fn finish(&self) -> String {
        format!("fnv1a:{:016x}", self.state)
    }
}

impl Default for Digest {
    fn default() -> Self {
        Self::new()
    }
}
