//! Counterexample families, the seeded corpus, and the verification suites
//! that check the inequalities of the library against random inputs.

mod corpus;
mod families;
mod report;
mod suites;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use corpus::{Corpus, CorpusSpec};
pub use families::{fh_ratio, fs_sweep, FhFamily, FhRatio, FsFamily, FsRow, FsSweep};
pub use report::{Assertion, Failure, Observation, Report, Sweep, SweepRow};
pub use suites::run_suite;

use crate::error::{Error, Result};
use crate::kfun::{GridSpec, LpConfig};
use crate::norms::QuadConfig;

/// The named invariant batteries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Suite {
    /// Operator identities between `C`, `C*` and their discrete versions.
    Identities,
    /// Hardy, Copson and the embeddings between `Ces_p`, `Cop_p`, `L_1`.
    Embeddings,
    /// `(L_1, L_1(1/t))` and `(l_1, l_1(1/k))` interpolation norms, and `f_h`.
    InterpIdentities,
    /// `(L_1(1−t), Ces_∞)` restricted to `[1/2, 1]`.
    RestrictedSandwich,
    /// `(Ces_1, Ces_∞)` splitting bounds.
    CesSandwich,
    /// `(Ces_1, Ces_∞)` bounds for non-increasing functions.
    DecreasingSandwich,
    /// `(Ces_1, Ces_∞)_{1−1/p,p}` against the log-weighted Cesàro norm.
    LogWeighted,
    /// `A_p` bound for `ln(e/x)` and the maximal operator.
    Ap,
    /// Indicator family `χ_{[0,s]}`.
    CharDivergence,
    /// `(L_1, Ces_∞)_{1−1/p,p}` against `Ces_p` on the half-line.
    HalflineCes,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::Identities,
        Suite::Embeddings,
        Suite::InterpIdentities,
        Suite::RestrictedSandwich,
        Suite::CesSandwich,
        Suite::DecreasingSandwich,
        Suite::LogWeighted,
        Suite::Ap,
        Suite::CharDivergence,
        Suite::HalflineCes,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Identities => "identities",
            Suite::Embeddings => "embeddings",
            Suite::InterpIdentities => "interp-identities",
            Suite::RestrictedSandwich => "restricted-sandwich",
            Suite::CesSandwich => "ces-sandwich",
            Suite::DecreasingSandwich => "decreasing-sandwich",
            Suite::LogWeighted => "log-weighted",
            Suite::Ap => "ap",
            Suite::CharDivergence => "char-divergence",
            Suite::HalflineCes => "halfline-ces",
        }
    }

    /// Corpus size used when the config does not set one.
    pub fn default_count(&self) -> usize {
        match self {
            Suite::Identities => 100,
            Suite::Embeddings => 200,
            Suite::InterpIdentities => 50,
            Suite::RestrictedSandwich => 20,
            Suite::CesSandwich => 50,
            Suite::DecreasingSandwich => 20,
            Suite::LogWeighted => 20,
            Suite::Ap => 20,
            Suite::CharDivergence => 8,
            Suite::HalflineCes => 20,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Unsupported(format!("unknown suite `{s}`")))
    }
}

/// Everything a suite run depends on; together with the seed it fixes the
/// report bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SuiteConfig {
    pub corpus: CorpusSpec,
    /// Overrides [`Suite::default_count`].
    pub count: Option<usize>,
    /// Overrides the suite's exponents.
    pub p_values: Vec<f64>,
    pub quad: QuadConfig,
    pub lp: LpConfig,
    /// `t`-grid for K-curves.
    pub grid: GridSpec,
    /// Number of `t` values for pointwise K checks.
    pub t_count: usize,
    /// Cells of the first mesh for K-curves; drift is measured at four times this.
    pub curve_mesh: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            corpus: CorpusSpec::default(),
            count: None,
            p_values: Vec::new(),
            quad: QuadConfig::default(),
            lp: LpConfig::default(),
            grid: GridSpec::default(),
            t_count: 20,
            curve_mesh: 64,
        }
    }
}

impl SuiteConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.corpus.seed = seed;
        self
    }

    pub fn with_count(mut self, count: usize) -> Self {
        self.count = Some(count);
        self
    }

    pub fn with_p_values(mut self, p: Vec<f64>) -> Self {
        self.p_values = p;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.corpus.validate()?;
        self.quad.validate()?;
        if self.count == Some(0) {
            return Err(Error::OutOfRange {
                name: "count",
                value: 0.0,
                expected: "[1, ∞)",
            });
        }
        if let Some(&p) = self.p_values.iter().find(|&&p| !(p > 1.0 && p.is_finite())) {
            return Err(Error::OutOfRange {
                name: "p",
                value: p,
                expected: "(1, ∞)",
            });
        }
        if self.t_count == 0 || self.curve_mesh == 0 {
            return Err(Error::OutOfRange {
                name: "t_count",
                value: 0.0,
                expected: "[1, ∞)",
            });
        }
        Ok(())
    }
}
