use std::fmt::Write as _;
use std::fs;
use std::hash::Hash;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use cluster_reflect::graph::BondConfig;
use cluster_reflect::model::FiniteSites;
use cluster_reflect::oracle::{enumerate_exact, enumerate_joint_es, ORACLE_LIMIT};
use cluster_reflect::reflection::{Permutation, ReflectionLaw};
use cluster_reflect::samplers::{run_replicas, ChainSettings, SingleSite};
use cluster_reflect::verify::{overall_status, summary_table, Status, TestVerdict};
use cluster_reflect::{Error, Result};
use serde::Serialize;

use crate::config::Built;
use crate::suites::Prepared;

#[derive(Serialize)]
struct Report<'a> {
    /// The only field that differs between identical runs.
    generated_at_unix: u64,
    suite: &'a str,
    seed: u64,
    status: Status,
    verdicts: &'a [TestVerdict],
}

pub fn write_report(dir: &Path, suite: &str, seed: u64, verdicts: &[TestVerdict]) -> Result<()> {
    fs::create_dir_all(dir)?;
    let report = Report {
        generated_at_unix: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
        suite,
        seed,
        status: overall_status(verdicts),
        verdicts,
    };
    let json = serde_json::to_string_pretty(&report).map_err(|e| Error::Io(e.to_string()))?;
    fs::write(dir.join("verdicts.json"), json + "\n")?;
    fs::write(dir.join("summary.txt"), summary_table(verdicts))?;
    Ok(())
}

fn samples_csv<M, L>(
    model: &M,
    law: &L,
    settings: &ChainSettings,
    replicas: usize,
    value: impl Fn(&M::State) -> f64 + Sync,
) -> Result<String>
where
    M: SingleSite,
    L: ReflectionLaw<M::State>,
{
    let batches = run_replicas(model, law, settings, replicas, |c| c.iter().map(&value).collect::<Vec<f64>>())?;
    let nv = model.graph().vertex_count();
    let mut out = String::from("step,replica");
    for v in 0..nv {
        let _ = write!(out, ",phi_{v}");
    }
    out.push('\n');
    for b in &batches {
        for (step, row) in b.steps.iter().zip(&b.values) {
            let _ = write!(out, "{step},{}", b.replica);
            for x in row {
                let _ = write!(out, ",{x:.17e}");
            }
            out.push('\n');
        }
    }
    Ok(out)
}

/// `samples.csv` for a config with `output.samples = true`.
pub fn write_samples(dir: &Path, p: &Prepared) -> Result<()> {
    let Some(s) = &p.config.sampler else { return Ok(()) };
    let settings = s.settings(p.config.seed);
    let csv = match &p.built {
        Built::Surface { model, law } => samples_csv(model, law, &settings, s.replicas, |x| *x)?,
        Built::Spin { model, law } => samples_csv(model, law, &settings, s.replicas, |x| x.components()[0])?,
        Built::Potts { model, taus } => {
            let law = cluster_reflect::reflection::WeightedInvolutions::uniform(taus.clone())?;
            samples_csv(model, &law, &settings, s.replicas, |&a| a as f64)?
        }
        Built::Markov { .. } | Built::Empty => return Err(Error::Unsupported("samples for this model family".into())),
    };
    fs::create_dir_all(dir)?;
    fs::write(dir.join("samples.csv"), csv)?;
    Ok(())
}

/// Every `(φ, ω)` pair with `P(φ) > 0`, including bond sets of zero
/// conditional probability, in configuration then bond-mask order.
fn dense_joint_csv<M>(model: &M, tau: &Permutation) -> Result<String>
where
    M: FiniteSites<State = usize>,
{
    let law = enumerate_exact(model)?;
    let e = model.graph().edge_count();
    let rows = law.len() as f64 * 2f64.powi(e as i32);
    if e >= 64 || rows > ORACLE_LIMIT {
        return Err(Error::StateSpaceOverflow { count: rows, limit: ORACLE_LIMIT });
    }
    let joint = enumerate_joint_es(model, tau)?.as_map();
    let mut out = String::from("configuration,bonds,probability\n");
    for c in &law.configs {
        let cfg: Vec<String> = c.iter().map(|s| s.to_string()).collect();
        for mask in 0..(1u64 << e) {
            let b = BondConfig::from_mask(mask, e);
            let p = joint.get(&(c.clone(), b.clone())).copied().unwrap_or(0.0);
            let bits: String = b.bits().iter().map(|&x| if x { '1' } else { '0' }).collect();
            let _ = writeln!(out, "{},{bits},{p:.17e}", cfg.join(";"));
        }
    }
    Ok(out)
}

fn enumerate_model<M>(dir: &Path, model: &M, taus: &[Permutation]) -> Result<Vec<String>>
where
    M: FiniteSites<State = usize>,
    M::State: Hash + Eq,
{
    let law = enumerate_exact(model)?;
    let mut tables = vec![("exact_law.csv".to_string(), law.to_csv())];
    let taus: Vec<&Permutation> = taus.iter().filter(|t| **t != Permutation::identity(t.states())).collect();
    for (i, tau) in taus.iter().enumerate() {
        let name = if taus.len() == 1 { "joint_es.csv".to_string() } else { format!("joint_es_{i}.csv") };
        tables.push((name, dense_joint_csv(model, tau)?));
    }
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for (name, text) in tables {
        fs::write(dir.join(&name), text)?;
        written.push(name);
    }
    Ok(written)
}

/// Writes `exact_law.csv` and, when reflections are configured, the joint
/// Edwards-Sokal tables. Returns the file names written.
pub fn write_enumeration(dir: &Path, built: &Built, explicit_reflection: bool) -> Result<Vec<String>> {
    match built {
        Built::Potts { model, taus } => enumerate_model(dir, model, if explicit_reflection { taus } else { &[] }),
        Built::Markov { chain, taus } => {
            enumerate_model(dir, chain.model(), if explicit_reflection { taus } else { &[] })
        }
        Built::Spin { model, .. } if model.dim() == 1 => enumerate_model(dir, &model.to_discrete()?, &[]),
        other => {
            Err(Error::Unsupported(format!("exact enumeration of a {} model with continuous states", other.family())))
        }
    }
}
