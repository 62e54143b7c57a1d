//! Seeded random inputs for the verification suites.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_range, Result};
use crate::funcore::{Domain, Seq, StepFunction};

/// What the generator draws from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub count: usize,
    pub seed: u64,
    pub min_pieces: usize,
    pub max_pieces: usize,
    /// Values are log-uniform in `[value_lo, value_hi]`.
    pub value_lo: f64,
    pub value_hi: f64,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec {
            count: 100,
            seed: 7,
            min_pieces: 1,
            max_pieces: 64,
            value_lo: 1e-3,
            value_hi: 1e3,
        }
    }
}

impl CorpusSpec {
    pub fn validate(&self) -> Result<()> {
        check_range("count", self.count as f64, self.count >= 1, "[1, ∞)")?;
        check_range(
            "min_pieces",
            self.min_pieces as f64,
            self.min_pieces >= 1 && self.min_pieces <= self.max_pieces,
            "[1, max_pieces]",
        )?;
        check_range(
            "value_lo",
            self.value_lo,
            self.value_lo > 0.0 && self.value_lo <= self.value_hi && self.value_hi.is_finite(),
            "(0, value_hi]",
        )
    }

    pub fn with_count(mut self, count: usize) -> Self {
        self.count = count;
        self
    }
}

/// A deterministic stream of random inputs.
pub struct Corpus {
    spec: CorpusSpec,
    rng: ChaCha8Rng,
}

impl Corpus {
    pub fn new(spec: CorpusSpec) -> Result<Self> {
        spec.validate()?;
        Ok(Corpus {
            spec,
            rng: ChaCha8Rng::seed_from_u64(spec.seed),
        })
    }

    /// An independent stream for one purpose, so that suites drawing several
    /// kinds of input do not shift each other.
    pub fn stream(spec: CorpusSpec, tag: u64) -> Result<Self> {
        let mut s = spec;
        s.seed = spec.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(tag);
        Corpus::new(s)
    }

    pub fn spec(&self) -> &CorpusSpec {
        &self.spec
    }

    fn value(&mut self) -> f64 {
        let (lo, hi) = (self.spec.value_lo.ln(), self.spec.value_hi.ln());
        self.rng.random_range(lo..=hi).exp()
    }

    fn pieces(&mut self) -> usize {
        self.rng
            .random_range(self.spec.min_pieces..=self.spec.max_pieces)
    }

    /// `n` cells on `[a, b]`: geometric toward `a` (`a + (b−a)2^{−j}`) or
    /// uniform random, with equal probability.
    fn mesh(&mut self, a: f64, b: f64, n: usize) -> Vec<f64> {
        let mut inner: Vec<f64> = if self.rng.random_bool(0.5) {
            (1..n).map(|j| a + (b - a) * 0.5f64.powi(j as i32)).collect()
        } else {
            (1..n).map(|_| self.rng.random_range(a..b)).collect()
        };
        inner.sort_by(f64::total_cmp);
        inner.dedup();
        inner.retain(|&x| x > a && x < b);
        let mut m = Vec::with_capacity(inner.len() + 2);
        m.push(a);
        m.extend(inner);
        m.push(b);
        m
    }

    /// A step function on `domain` with values on `[a, b]` and zero elsewhere.
    fn supported(&mut self, domain: Domain, a: f64, b: f64) -> StepFunction {
        let n = self.pieces();
        let mesh = self.mesh(a, b, n);
        let mut breaks = Vec::with_capacity(mesh.len() + 2);
        let mut vals = Vec::with_capacity(mesh.len() + 1);
        if a > 0.0 {
            breaks.push(0.0);
            vals.push(0.0);
        }
        breaks.push(mesh[0]);
        for &x in &mesh[1..] {
            breaks.push(x);
            vals.push(self.value());
        }
        let end = domain.right_end();
        if b < end {
            breaks.push(end);
            vals.push(0.0);
        }
        StepFunction::new(domain, breaks, vals).expect("generated mesh is valid")
    }

    pub fn unit(&mut self) -> StepFunction {
        self.supported(Domain::UnitInterval, 0.0, 1.0)
    }

    /// Supported in `[a, b] ⊂ [0, 1]`.
    pub fn unit_supported(&mut self, a: f64, b: f64) -> StepFunction {
        self.supported(Domain::UnitInterval, a, b)
    }

    pub fn nonincreasing(&mut self) -> StepFunction {
        let f = self.unit();
        let mut vals = f.vals().to_vec();
        vals.sort_by(|a, b| b.total_cmp(a));
        StepFunction::unit(f.breaks().to_vec(), vals).expect("same mesh")
    }

    /// On the half-line truncated at `truncation`, supported in `[0, support]`.
    pub fn half_line(&mut self, truncation: f64, support: f64) -> Result<StepFunction> {
        let d = Domain::half_line(truncation)?;
        check_range(
            "support",
            support,
            support > 0.0 && support <= truncation,
            "(0, truncation]",
        )?;
        Ok(self.supported(d, 0.0, support))
    }

    pub fn sequence(&mut self) -> Seq {
        let n = self.pieces();
        let v = (0..n).map(|_| self.value()).collect();
        Seq::new(v).expect("positive values")
    }

    /// A point of `(lo, hi)`, log-uniform.
    pub fn log_uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo.ln()..hi.ln()).exp()
    }


    pub fn units(&mut self) -> Vec<StepFunction> {
        (0..self.spec.count).map(|_| self.unit()).collect()
    }
}
