//! Single-site chains, cluster moves and seeded multi-replica runs.
//!
//! Only mixes containing single-site sweeps are ergodic; cluster moves on
//! their own are used to test stationarity.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::model::{
    DiscreteModel, InhomogeneousHammock, Model, PotentialKind, ProductFactor, ProductModel, Spin, SpinModel,
    SurfaceModel,
};
use crate::reflection::{flip_component, sample_bonds, swendsen_wang_flip, ReflectionLaw};
use crate::stats::mean_and_se;

/// Proposals tried per site before a rejection sampler gives up.
pub const REJECTION_CAP: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveKind {
    SingleSite,
    WolffCluster,
    SwendsenWang,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSettings {
    pub burn_in_sweeps: usize,
    #[serde(default = "one")]
    pub thinning: usize,
    pub n_samples: usize,
    #[serde(default)]
    pub seed: u64,
    pub move_mix: Vec<(MoveKind, f64)>,
    /// Step size of Metropolis proposals (radians for spins, height units
    /// for unbounded surfaces).
    #[serde(default = "default_step")]
    pub proposal_step: f64,
}

fn one() -> usize {
    1
}

fn default_step() -> f64 {
    0.5
}

impl ChainSettings {
    pub fn new(
        burn_in_sweeps: usize,
        thinning: usize,
        n_samples: usize,
        seed: u64,
        move_mix: Vec<(MoveKind, f64)>,
    ) -> Self {
        ChainSettings { burn_in_sweeps, thinning, n_samples, seed, move_mix, proposal_step: default_step() }
    }

    /// Single-site sweeps only.
    pub fn single_site(burn_in_sweeps: usize, thinning: usize, n_samples: usize, seed: u64) -> Self {
        ChainSettings::new(burn_in_sweeps, thinning, n_samples, seed, vec![(MoveKind::SingleSite, 1.0)])
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        ChainSettings { seed, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples < 1 || self.thinning < 1 {
            return Err(Error::InvalidParameter("n_samples and thinning must be at least 1".into()));
        }
        if self.move_mix.iter().any(|(_, w)| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::InvalidParameter("move weights must be finite and positive".into()));
        }
        if !(self.proposal_step.is_finite() && self.proposal_step > 0.0) {
            return Err(Error::InvalidParameter("proposal_step must be positive".into()));
        }
        Ok(())
    }
}

/// Counters accumulated by a chain.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainStats {
    pub moves: u64,
    pub sweeps: u64,
    pub cluster_moves: u64,
    pub flipped_sites: u64,
    pub proposals: u64,
    pub accepted: u64,
}

impl ChainStats {
    /// Metropolis or rejection acceptance rate, when any proposal was made.
    pub fn acceptance_rate(&self) -> Option<f64> {
        (self.proposals > 0).then(|| self.accepted as f64 / self.proposals as f64)
    }

    pub fn merge(&mut self, o: &ChainStats) {
        self.moves += o.moves;
        self.sweeps += o.sweeps;
        self.cluster_moves += o.cluster_moves;
        self.flipped_sites += o.flipped_sites;
        self.proposals += o.proposals;
        self.accepted += o.accepted;
    }
}

/// Observables recorded by one chain.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch<T> {
    pub values: Vec<T>,
    /// Number of moves performed before each sample was taken.
    pub steps: Vec<u64>,
    pub replica: usize,
    pub seed: u64,
    pub stats: ChainStats,
}

/// Models with a single-site update that leaves the model invariant.
pub trait SingleSite: Model {
    fn single_site_sweep<R: Rng + ?Sized>(
        &self,
        config: &mut [Self::State],
        step: f64,
        rng: &mut R,
        stats: &mut ChainStats,
    ) -> Result<()>;
}

fn uniform_in<R: Rng + ?Sized>(lo: f64, hi: f64, v: usize, rng: &mut R) -> Result<f64> {
    if lo < hi {
        Ok(rng.random_range(lo..hi))
    } else if lo == hi {
        Ok(lo)
    } else {
        Err(Error::Sampler(format!("empty conditional support [{lo}, {hi}] at vertex {v}")))
    }
}

/// Intersection of `[φ_u - r_e, φ_u + r_e]` over the neighbors of `v`.
fn feasible_interval(graph: &Graph, config: &[f64], v: usize, radius: impl Fn(usize) -> f64) -> (f64, f64) {
    graph.neighbors(v).iter().fold((f64::NEG_INFINITY, f64::INFINITY), |(lo, hi), &(u, e)| {
        let r = radius(e);
        (lo.max(config[u] - r), hi.min(config[u] + r))
    })
}

fn categorical<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> Option<usize> {
    let total: f64 = weights.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        return None;
    }
    let mut u = rng.random::<f64>() * total;
    for (i, &w) in weights.iter().enumerate() {
        if u < w {
            return Some(i);
        }
        u -= w;
    }
    weights.iter().rposition(|&w| w > 0.0)
}

impl SingleSite for DiscreteModel {
    /// Heat bath at every vertex whose site measure has more than one atom.
    fn single_site_sweep<R: Rng + ?Sized>(
        &self,
        config: &mut [usize],
        _step: f64,
        rng: &mut R,
        stats: &mut ChainStats,
    ) -> Result<()> {
        let g = self.graph();
        let q = self.states();
        let mut w = vec![0.0; q];
        for v in 0..g.vertex_count() {
            let mut atoms = 0;
            for (s, ws) in w.iter_mut().enumerate() {
                *ws = self.site_weight(v, s);
                atoms += (*ws > 0.0) as usize;
            }
            if atoms < 2 {
                continue;
            }
            for &(u, e) in g.neighbors(v) {
                for (s, ws) in w.iter_mut().enumerate() {
                    *ws *= self.edge_weight(e, &s, &config[u]);
                }
            }
            config[v] = categorical(&w, rng)
                .ok_or_else(|| Error::Sampler(format!("heat-bath weights at vertex {v} vanish")))?;
        }
        stats.sweeps += 1;
        Ok(())
    }
}

impl SingleSite for SurfaceModel {
    fn single_site_sweep<R: Rng + ?Sized>(
        &self,
        config: &mut [f64],
        step: f64,
        rng: &mut R,
        stats: &mut ChainStats,
    ) -> Result<()> {
        let g = self.graph();
        let u = self.potential();
        let local = |config: &[f64], v: usize, x: f64| -> f64 {
            g.neighbors(v).iter().map(|&(w, _)| u.eval(x - config[w])).sum()
        };
        for v in (0..g.vertex_count()).filter(|&v| !g.is_boundary(v)) {
            let deg = g.degree(v) as f64;
            match u.kind() {
                PotentialKind::Hammock => {
                    let (lo, hi) = feasible_interval(g, config, v, |_| 1.0);
                    config[v] = uniform_in(lo, hi, v, rng)?;
                }
                PotentialKind::Quadratic => {
                    let mean = g.neighbors(v).iter().map(|&(w, _)| config[w]).sum::<f64>() / deg;
                    let z: f64 = rng.sample(StandardNormal);
                    config[v] = mean + z / (2.0 * deg).sqrt();
                }
                _ if u.support_radius().is_some() => {
                    let r = u.support_radius().unwrap_or(1.0);
                    let (lo, hi) = feasible_interval(g, config, v, |_| r);
                    let floor = deg * u.probe_minimum();
                    let mut done = false;
                    for _ in 0..REJECTION_CAP {
                        let x = uniform_in(lo, hi, v, rng)?;
                        stats.proposals += 1;
                        let e = local(config, v, x);
                        if e.is_finite() && rng.random::<f64>() < (floor - e).exp() {
                            config[v] = x;
                            stats.accepted += 1;
                            done = true;
                            break;
                        }
                    }
                    if !done {
                        return Err(Error::Sampler(format!("rejection sampler exhausted at vertex {v}")));
                    }
                }
                _ => {
                    let x = config[v] + step * rng.sample::<f64, _>(StandardNormal);
                    let de = local(config, v, x) - local(config, v, config[v]);
                    stats.proposals += 1;
                    if de <= 0.0 || rng.random::<f64>() < (-de).exp() {
                        config[v] = x;
                        stats.accepted += 1;
                    }
                }
            }
        }
        stats.sweeps += 1;
        Ok(())
    }
}

impl SingleSite for InhomogeneousHammock {
    fn single_site_sweep<R: Rng + ?Sized>(
        &self,
        config: &mut [f64],
        _step: f64,
        rng: &mut R,
        stats: &mut ChainStats,
    ) -> Result<()> {
        let g = self.graph();
        for v in (0..g.vertex_count()).filter(|&v| !g.is_boundary(v)) {
            let (lo, hi) = feasible_interval(g, config, v, |e| self.radii().get(e));
            config[v] = uniform_in(lo, hi, v, rng)?;
        }
        stats.sweeps += 1;
        Ok(())
    }
}

impl SingleSite for SpinModel {
    /// Exact heat bath for `n = 1`, Metropolis with proposal
    /// `normalize(b + σ g)` otherwise.
    fn single_site_sweep<R: Rng + ?Sized>(
        &self,
        config: &mut [Spin],
        step: f64,
        rng: &mut R,
        stats: &mut ChainStats,
    ) -> Result<()> {
        let g = self.graph();
        let u = self.potential();
        let n = self.dim();
        for v in (0..g.vertex_count()).filter(|&v| !g.is_boundary(v)) {
            if n == 1 {
                let (mut e_plus, mut e_minus) = (0.0, 0.0);
                for &(w, _) in g.neighbors(v) {
                    let s = config[w].components()[0];
                    e_plus += u.eval(s);
                    e_minus += u.eval(-s);
                }
                let p_plus = 1.0 / (1.0 + (e_plus - e_minus).exp());
                let s = if rng.random::<f64>() < p_plus { 1.0 } else { -1.0 };
                config[v] = Spin::new(vec![s])?;
                continue;
            }
            let current = &config[v];
            let c: Vec<f64> =
                current.components().iter().map(|x| x + step * rng.sample::<f64, _>(StandardNormal)).collect();
            let proposal = match Spin::normalized(c) {
                Ok(s) => s,
                Err(_) => continue,
            };
            let de: f64 = g
                .neighbors(v)
                .iter()
                .map(|&(w, _)| u.eval(proposal.dot(&config[w])) - u.eval(current.dot(&config[w])))
                .sum();
            stats.proposals += 1;
            if de <= 0.0 || rng.random::<f64>() < (-de).exp() {
                config[v] = proposal;
                stats.accepted += 1;
            }
        }
        stats.sweeps += 1;
        Ok(())
    }
}

impl<M: ProductFactor + SingleSite> SingleSite for ProductModel<M> {
    /// Sweeps the two independent copies one after the other.
    fn single_site_sweep<R: Rng + ?Sized>(
        &self,
        config: &mut [Self::State],
        step: f64,
        rng: &mut R,
        stats: &mut ChainStats,
    ) -> Result<()> {
        let (mut a, mut b): (Vec<M::State>, Vec<M::State>) = config.iter().cloned().unzip();
        self.first().single_site_sweep(&mut a, step, rng, stats)?;
        self.second().single_site_sweep(&mut b, step, rng, stats)?;
        stats.sweeps -= 1;
        for (slot, pair) in config.iter_mut().zip(a.into_iter().zip(b)) {
            *slot = pair;
        }
        Ok(())
    }
}

/// One cluster move: draws `τ` from `law` and `x` uniformly, both before
/// the configuration is read, then samples `ω` and flips the cluster of `x`.
pub fn wolff_step<M, L, R>(model: &M, law: &L, config: &[M::State], rng: &mut R) -> Vec<M::State>
where
    M: Model,
    L: ReflectionLaw<M::State>,
    R: Rng + ?Sized,
{
    let tau = law.draw(rng);
    let x = rng.random_range(0..model.graph().vertex_count());
    let bonds = sample_bonds(model, &tau, config, rng);
    flip_component(model.graph(), config, &bonds, &tau, x)
}

/// Draws `τ`, samples `ω` and flips every free cluster with probability ½.
pub fn sw_step<M, L, R>(model: &M, law: &L, config: &[M::State], rng: &mut R) -> Vec<M::State>
where
    M: Model,
    L: ReflectionLaw<M::State>,
    R: Rng + ?Sized,
{
    let tau = law.draw(rng);
    let bonds = sample_bonds(model, &tau, config, rng);
    swendsen_wang_flip(model.graph(), config, &bonds, &tau, rng)
}

/// A chain in progress; exposed so callers can interleave their own moves.
pub struct Chain<'a, M: Model, L> {
    model: &'a M,
    law: &'a L,
    settings: &'a ChainSettings,
    mix: Option<WeightedIndex<f64>>,
    pub config: Vec<M::State>,
    pub rng: ChaCha8Rng,
    pub stats: ChainStats,
}

impl<'a, M, L> Chain<'a, M, L>
where
    M: SingleSite,
    L: ReflectionLaw<M::State>,
{
    pub fn new(model: &'a M, law: &'a L, settings: &'a ChainSettings) -> Result<Self> {
        settings.validate()?;
        let mix = if settings.move_mix.is_empty() {
            None
        } else {
            Some(
                WeightedIndex::new(settings.move_mix.iter().map(|m| m.1))
                    .map_err(|e| Error::InvalidParameter(format!("move mix: {e}")))?,
            )
        };
        let config = model.initial_configuration();
        model.check_configuration(&config)?;
        Ok(Chain {
            model,
            law,
            settings,
            mix,
            config,
            rng: ChaCha8Rng::seed_from_u64(settings.seed),
            stats: ChainStats::default(),
        })
    }

    /// Draws one move from the mix and applies it; checks the result.
    pub fn step(&mut self) -> Result<()> {
        let Some(mix) = &self.mix else {
            return Ok(());
        };
        self.stats.moves += 1;
        match self.settings.move_mix[mix.sample(&mut self.rng)].0 {
            MoveKind::SingleSite => self.model.single_site_sweep(
                &mut self.config,
                self.settings.proposal_step,
                &mut self.rng,
                &mut self.stats,
            )?,
            MoveKind::WolffCluster => {
                let next = wolff_step(self.model, self.law, &self.config, &mut self.rng);
                self.record_cluster(next);
            }
            MoveKind::SwendsenWang => {
                let next = sw_step(self.model, self.law, &self.config, &mut self.rng);
                self.record_cluster(next);
            }
        }
        self.model.check_configuration(&self.config)
    }

    fn record_cluster(&mut self, next: Vec<M::State>) {
        self.stats.cluster_moves += 1;
        self.stats.flipped_sites += next.iter().zip(&self.config).filter(|(a, b)| a != b).count() as u64;
        self.config = next;
    }

    pub fn advance(&mut self, moves: usize) -> Result<()> {
        for _ in 0..moves {
            self.step()?;
        }
        Ok(())
    }
}

/// Burn-in, then `n_samples` observations `thinning` moves apart.
pub fn run_chain<M, L, T, F>(model: &M, law: &L, settings: &ChainSettings, mut observe: F) -> Result<SampleBatch<T>>
where
    M: SingleSite,
    L: ReflectionLaw<M::State>,
    F: FnMut(&[M::State]) -> T,
{
    let mut chain = Chain::new(model, law, settings)?;
    chain.advance(settings.burn_in_sweeps)?;
    let mut values = Vec::with_capacity(settings.n_samples);
    let mut steps = Vec::with_capacity(settings.n_samples);
    for _ in 0..settings.n_samples {
        chain.advance(settings.thinning)?;
        values.push(observe(&chain.config));
        steps.push(chain.stats.moves);
    }
    if let Some(rate) = chain.stats.acceptance_rate() {
        log::debug!("seed {}: acceptance rate {rate:.3}", settings.seed);
    }
    Ok(SampleBatch { values, steps, replica: 0, seed: settings.seed, stats: chain.stats })
}

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of replica `r`: the `(r + 1)`-th output of a SplitMix64 generator
/// started at `master`.
pub fn replica_seed(master: u64, replica: usize) -> u64 {
    splitmix64(master.wrapping_add((replica as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15)))
}

/// Independent chains with seeds from [`replica_seed`], run in parallel and
/// returned in replica order.
pub fn run_replicas<M, L, T, F>(
    model: &M,
    law: &L,
    settings: &ChainSettings,
    n_replicas: usize,
    observe: F,
) -> Result<Vec<SampleBatch<T>>>
where
    M: SingleSite,
    L: ReflectionLaw<M::State>,
    T: Send,
    F: Fn(&[M::State]) -> T + Sync,
{
    if n_replicas < 1 {
        return Err(Error::InvalidParameter("need at least one replica".into()));
    }
    (0..n_replicas)
        .into_par_iter()
        .map(|r| {
            let s = settings.with_seed(replica_seed(settings.seed, r));
            let mut batch = run_chain(model, law, &s, &observe)?;
            batch.replica = r;
            Ok(batch)
        })
        .collect()
}

/// Doubles the burn-in, starting from `settings.burn_in_sweeps`, until two
/// replicas agree on the mean of `observable` within 3 standard errors.
/// Returns the accepted burn-in.
pub fn calibrate_burn_in<M, L, F>(
    model: &M,
    law: &L,
    settings: &ChainSettings,
    observable: F,
    max_doublings: usize,
) -> Result<usize>
where
    M: SingleSite,
    L: ReflectionLaw<M::State>,
    F: Fn(&[M::State]) -> f64 + Sync,
{
    let mut s = settings.clone();
    s.burn_in_sweeps = s.burn_in_sweeps.max(1);
    for _ in 0..=max_doublings {
        let batches = run_replicas(model, law, &s, 2, &observable)?;
        let (m0, e0) = mean_and_se(&batches[0].values, 16);
        let (m1, e1) = mean_and_se(&batches[1].values, 16);
        let spread = (e0 * e0 + e1 * e1).sqrt();
        if (m0 - m1).abs() <= 3.0 * spread {
            log::info!("burn-in {} sweeps accepted ({m0:.4} vs {m1:.4})", s.burn_in_sweeps);
            return Ok(s.burn_in_sweeps);
        }
        log::info!("burn-in {} sweeps rejected ({m0:.4} vs {m1:.4}); doubling", s.burn_in_sweeps);
        s.burn_in_sweeps *= 2;
    }
    Ok(s.burn_in_sweeps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{potts_model, Potential, SpinPotential};
    use crate::reflection::{Fixed, Permutation, SurfaceWindow, UniformAxis, WeightedInvolutions};

    fn hammock_path(n: usize) -> SurfaceModel {
        SurfaceModel::new(Graph::path(n).with_boundary(&[0]).unwrap(), Potential::hammock()).unwrap()
    }

    #[test]
    fn empty_mix_returns_initial() {
        let m = hammock_path(4);
        let s = ChainSettings::new(0, 1, 1, 9, vec![]);
        let b = run_chain(&m, &SurfaceWindow::default(), &s, |c| c.to_vec()).unwrap();
        assert_eq!(b.values, vec![vec![0.0; 4]]);
    }

    #[test]
    fn same_seed_same_batch() {
        let m = hammock_path(5);
        let s = ChainSettings::new(10, 2, 50, 77, vec![(MoveKind::SingleSite, 1.0), (MoveKind::WolffCluster, 1.0)]);
        let law = SurfaceWindow::default();
        let a = run_chain(&m, &law, &s, |c| c.to_vec()).unwrap();
        let b = run_chain(&m, &law, &s, |c| c.to_vec()).unwrap();
        assert_eq!(a, b);
        let r = run_replicas(&m, &law, &s, 2, |c| c[4]).unwrap();
        assert_ne!(r[0].values, r[1].values);
        assert_eq!(r, run_replicas(&m, &law, &s, 2, |c| c[4]).unwrap());
    }

    #[test]
    fn hammock_conditional_interval() {
        let m = hammock_path(3);
        let mut config = vec![0.0, 0.3, 0.5];
        let g = m.graph();
        assert_eq!(feasible_interval(g, &config, 1, |_| 1.0), (-0.5, 1.0));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut stats = ChainStats::default();
        for _ in 0..1000 {
            m.single_site_sweep(&mut config, 0.5, &mut rng, &mut stats).unwrap();
            m.check_configuration(&config).unwrap();
        }
    }

    #[test]
    fn isolated_vertex_heat_bath_is_uniform() {
        let m = potts_model(&Graph::new(1, &[], &[]).unwrap(), 3, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut counts = [0usize; 3];
        let mut config = vec![0];
        let mut stats = ChainStats::default();
        for _ in 0..30_000 {
            m.single_site_sweep(&mut config, 0.5, &mut rng, &mut stats).unwrap();
            counts[config[0]] += 1;
        }
        for c in counts {
            assert!((c as f64 / 30_000.0 - 1.0 / 3.0).abs() < 0.015);
        }
    }

    #[test]
    fn ising_two_site_heat_bath() {
        let beta = 0.6f64;
        let g = Graph::path(2).with_boundary(&[0]).unwrap();
        let m = SpinModel::new(g, 1, SpinPotential::linear(beta).unwrap()).unwrap();
        let s = ChainSettings::single_site(0, 1, 40_000, 5);
        let b = run_chain(&m, &Fixed(crate::reflection::SpinReflection::new(&[1.0]).unwrap()), &s, |c| {
            c[1].components()[0] > 0.0
        })
        .unwrap();
        let p = b.values.iter().filter(|&&x| x).count() as f64 / 40_000.0;
        let exact = beta.exp() / (beta.exp() + (-beta).exp());
        assert!((p - exact).abs() < 0.01, "{p} vs {exact}");
    }

    #[test]
    fn identity_involution_wolff_is_identity() {
        let m = potts_model(&Graph::complete(3), 2, 1.0).unwrap();
        let law = WeightedInvolutions::uniform(vec![Permutation::identity(2)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for config in [vec![0, 1, 0], vec![1, 1, 1]] {
            assert_eq!(wolff_step(&m, &law, &config, &mut rng), config);
            assert_eq!(sw_step(&m, &law, &config, &mut rng), config);
        }
    }

    #[test]
    fn quadratic_surface_mean_zero() {
        let g = Graph::path(3).with_boundary(&[0]).unwrap();
        let m = SurfaceModel::new_attested(g, Potential::quadratic()).unwrap();
        let s = ChainSettings::single_site(100, 1, 20_000, 4);
        let b = run_chain(&m, &SurfaceWindow::default(), &s, |c| c[2]).unwrap();
        let (mean, se) = mean_and_se(&b.values, 20);
        assert!(mean.abs() < 5.0 * se);
        // Var φ_2 = 2 · ½ along a path of iid N(0, ½) increments
        let var = b.values.iter().map(|x| x * x).sum::<f64>() / b.values.len() as f64;
        assert!((var - 1.0).abs() < 0.08, "{var}");
    }

    #[test]
    fn general_lipschitz_rejection_sampler() {
        let g = Graph::path(2).with_boundary(&[0]).unwrap();
        let pot = Potential::custom("linear_lip", |x| if x <= 1.0 { x } else { f64::INFINITY }, true, true, true);
        let m = SurfaceModel::new(g, pot).unwrap();
        let s = ChainSettings::single_site(10, 1, 40_000, 6);
        let b = run_chain(&m, &SurfaceWindow::default(), &s, |c| c[1].abs()).unwrap();
        // |φ_1| has density e^{-s} / (1 - e^{-1}) on [0, 1]
        let exact = (1.0 - 2.0 * (-1f64).exp()) / (1.0 - (-1f64).exp());
        let mean = b.values.iter().sum::<f64>() / b.values.len() as f64;
        assert!((mean - exact).abs() < 0.01, "{mean} vs {exact}");
        assert!(b.stats.acceptance_rate().unwrap() > 0.3);
    }

    #[test]
    fn spin_metropolis_keeps_unit_norm() {
        let g = Graph::grid(3, 3, crate::graph::GridBoundary::None).with_boundary(&[0]).unwrap();
        let m = SpinModel::new(g, 3, SpinPotential::linear(1.0).unwrap()).unwrap();
        let s = ChainSettings::new(0, 1, 200, 8, vec![(MoveKind::SingleSite, 1.0), (MoveKind::WolffCluster, 1.0)]);
        let b = run_chain(&m, &UniformAxis::new(3).unwrap(), &s, |c| c.to_vec()).unwrap();
        for c in &b.values {
            m.check_configuration(c).unwrap();
        }
        let rate = b.stats.acceptance_rate().unwrap();
        assert!(rate > 0.2 && rate < 0.95, "{rate}");
    }

    #[test]
    fn replica_seeds_are_distinct() {
        let seeds: Vec<u64> = (0..1000).map(|r| replica_seed(42, r)).collect();
        let mut sorted = seeds.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), seeds.len());
        assert_eq!(replica_seed(42, 3), replica_seed(42, 3));
    }
}
