//! Executable checks of the cluster-flip identities and the inequalities
//! they imply, reported as [`TestVerdict`]s.
//!
//! Tolerance policy, shared by every Monte Carlo check: equality targets
//! pass when `|z| ≤ 4`; inequality targets pass when the point estimate
//! satisfies them, are inconclusive when violated by less than four
//! standard errors and fail otherwise. Standard errors come from batch
//! means over independent replicas.

mod barrier;
mod continuous;
mod density;
mod exact;
mod extremal;
mod mixture;

pub use barrier::{check_reflection_principle, BarrierTargets, GeneralizedSet};
pub use continuous::{check_cluster_sides, check_lemma1_continuous, Observable};
pub use density::{check_density_monotonicity, check_ising_density_exact, check_surface_density_monotonicity};
pub use exact::{
    asymmetric_measure_control, check_complement_exact, check_flip_exact, check_markov_reflection_suite,
    lemma1_exact_suite, transpositions, EXACT_TOL,
};
pub use extremal::{check_extremal_gradients, check_extremal_trends, ExtremalSpec};
pub use mixture::{check_mixture_decomposition, MixtureOptions};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::reflection::ReflectionLaw;
use crate::samplers::{replica_seed, splitmix64, Chain, ChainSettings, SingleSite};
use crate::stats::{ks_two_sample_effective, pooled_mean_and_se, variance_inflation, KsResult};

/// Standard errors allowed by the tolerance policy.
pub const Z_TOL: f64 = 4.0;

/// Batches per replica for standard errors.
pub const BATCHES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = "~=")]
    Approx,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Inconclusive,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestVerdict {
    pub name: String,
    pub tag: String,
    pub estimate: f64,
    #[serde(rename = "se")]
    pub std_error: f64,
    pub target: f64,
    pub relation: Relation,
    #[serde(rename = "z")]
    pub z_score: f64,
    pub status: Status,
    pub pass: bool,
    /// The target is one the estimate could not violate.
    pub vacuous: bool,
    pub n_samples: u64,
    pub seed: u64,
    pub note: String,
}

impl TestVerdict {
    pub fn new(name: &str, tag: &str, estimate: f64, std_error: f64, relation: Relation, target: f64) -> Self {
        let diff = estimate - target;
        let z_score = if std_error > 0.0 {
            diff / std_error
        } else if diff == 0.0 {
            0.0
        } else {
            diff.signum() * f64::INFINITY
        };
        let status = if !estimate.is_finite() {
            Status::Fail
        } else {
            match relation {
                Relation::Approx if z_score.abs() <= Z_TOL => Status::Pass,
                Relation::Approx => Status::Fail,
                Relation::AtMost if diff <= 0.0 => Status::Pass,
                Relation::AtMost if z_score < Z_TOL => Status::Inconclusive,
                Relation::AtLeast if diff >= 0.0 => Status::Pass,
                Relation::AtLeast if -z_score < Z_TOL => Status::Inconclusive,
                _ => Status::Fail,
            }
        };
        TestVerdict {
            name: name.to_string(),
            tag: tag.to_string(),
            estimate,
            std_error,
            target,
            relation,
            z_score,
            status,
            pass: status == Status::Pass,
            vacuous: false,
            n_samples: 0,
            seed: 0,
            note: String::new(),
        }
    }

    /// A distance from an exact computation held to `distance < tolerance`.
    pub fn exact(name: &str, tag: &str, distance: f64, tolerance: f64) -> Self {
        let mut v = TestVerdict::new(name, tag, distance, 0.0, Relation::AtMost, tolerance);
        if !(distance < tolerance) {
            v.status = Status::Fail;
            v.pass = false;
        }
        v
    }

    /// A precondition or computation which could not be carried out.
    pub fn failed(name: &str, tag: &str, note: impl Into<String>) -> Self {
        let mut v = TestVerdict::new(name, tag, f64::NAN, 0.0, Relation::Approx, 0.0);
        v.note = note.into();
        v
    }

    pub fn with_samples(mut self, n_samples: u64, seed: u64) -> Self {
        self.n_samples = n_samples;
        self.seed = seed;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    pub fn with_vacuous(mut self, vacuous: bool) -> Self {
        self.vacuous = vacuous;
        self
    }
}

/// Worst status over a set of verdicts; `Pass` when empty.
pub fn overall_status(verdicts: &[TestVerdict]) -> Status {
    verdicts.iter().map(|v| v.status).max().unwrap_or(Status::Pass)
}

/// Fixed-width table of verdicts.
pub fn summary_table(verdicts: &[TestVerdict]) -> String {
    use std::fmt::Write as _;
    let width = verdicts.iter().map(|v| v.name.len()).max().unwrap_or(4).max(4);
    let mut out = format!(
        "{:<width$}  {:>13}  {:>10}  {:>2}  {:>13}  {:>8}  status\n",
        "name", "estimate", "se", "", "target", "z"
    );
    for v in verdicts {
        let rel = match v.relation {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
            Relation::Approx => "~=",
        };
        let status = match v.status {
            Status::Pass => "pass",
            Status::Inconclusive => "INCONCLUSIVE",
            Status::Fail => "FAIL",
        };
        let _ = writeln!(
            out,
            "{:<width$}  {:>13.6e}  {:>10.3e}  {:>2}  {:>13.6e}  {:>8.2}  {}{}",
            v.name,
            v.estimate,
            v.std_error,
            rel,
            v.target,
            v.z_score,
            status,
            if v.vacuous { " (vacuous)" } else { "" }
        );
    }
    out
}

const AUX_STREAM: u64 = 0x5eed_a0c5_11fe_d00d;

/// Runs `replicas` independent chains of `settings.n_samples` draws each
/// and applies `f` to every draw; `f` gets its own random stream, separate
/// from the chain's.
pub(crate) fn sample_replicas<M, L, T, F>(
    model: &M,
    law: &L,
    settings: &ChainSettings,
    replicas: usize,
    f: F,
) -> Result<Vec<Vec<T>>>
where
    M: SingleSite,
    L: ReflectionLaw<M::State>,
    T: Send,
    F: Fn(&[M::State], &mut ChaCha8Rng) -> Result<T> + Sync,
{
    if replicas < 1 {
        return Err(crate::Error::InvalidParameter("need at least one replica".into()));
    }
    (0..replicas)
        .into_par_iter()
        .map(|r| {
            let s = settings.with_seed(replica_seed(settings.seed, r));
            let mut chain = Chain::new(model, law, &s)?;
            let mut aux = ChaCha8Rng::seed_from_u64(splitmix64(s.seed ^ AUX_STREAM));
            chain.advance(s.burn_in_sweeps)?;
            let mut out = Vec::with_capacity(s.n_samples);
            for _ in 0..s.n_samples {
                chain.advance(s.thinning)?;
                out.push(f(&chain.config, &mut aux)?);
            }
            Ok(out)
        })
        .collect()
}

/// Pooled mean and standard error of a per-draw quantity.
pub(crate) fn pooled<T>(series: &[Vec<T>], f: impl Fn(&T) -> f64) -> (f64, f64) {
    let values: Vec<Vec<f64>> = series.iter().map(|s| s.iter().map(&f).collect()).collect();
    pooled_mean_and_se(values.iter().map(|v| v.as_slice()), BATCHES)
}

/// Two-sample KS on per-replica series, with the p-value at the sample
/// sizes deflated by each side's batch-means variance inflation. Returns
/// the test and the two effective sizes.
pub(crate) fn ks_effective(a: &[Vec<f64>], b: &[Vec<f64>]) -> (KsResult, f64, f64) {
    let size = |s: &[Vec<f64>]| s.iter().map(Vec::len).sum::<usize>() as f64;
    let n_a = size(a) / variance_inflation(a.iter().map(Vec::as_slice), BATCHES);
    let n_b = size(b) / variance_inflation(b.iter().map(Vec::as_slice), BATCHES);
    (ks_two_sample_effective(&a.concat(), &b.concat(), n_a, n_b), n_a, n_b)
}

pub(crate) fn total_draws<T>(series: &[Vec<T>]) -> u64 {
    series.iter().map(|s| s.len() as u64).sum()
}
