use std::collections::VecDeque;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use statrs::function::beta::beta_reg;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::model::{Model, Spin, SpinModel, SpinPotential, SurfaceModel};
use crate::oracle::enumerate_exact;
use crate::reflection::ReflectionLaw;
use crate::samplers::{splitmix64, ChainSettings};
use crate::stats::{isotonic_distance, isotonic_non_increasing, mean_and_se_iid};

use super::{exact::EXACT_TOL, pooled, sample_replicas, total_draws, Relation, TestVerdict};

const TAG: &str = "density-monotonicity";

/// Ratio of the tested distance to the null distance still accepted.
pub const NULL_MARGIN: f64 = 3.0;

/// Sphere measure of `{b : a < ⟨b, e1⟩ ≤ b'}` on `S^{n-1}`, `n ≥ 2`.
fn cap_measure(n: usize, a: f64, b: f64) -> f64 {
    let alpha = 0.5 * (n as f64 - 1.0);
    let f = |t: f64| beta_reg(alpha, alpha, ((t + 1.0) * 0.5).clamp(0.0, 1.0));
    f(b) - f(a)
}

/// `(bin probabilities, bin measures)` for `t = ⟨φ_v, e1⟩`; for `n = 1` the
/// bins are the two atoms.
fn spin_histogram(n: usize, n_bins: usize, ts: &[f64]) -> (Vec<f64>, Vec<f64>) {
    if n == 1 {
        let plus = ts.iter().filter(|&&t| t > 0.0).count() as f64 / ts.len() as f64;
        return (vec![1.0 - plus, plus], vec![0.5, 0.5]);
    }
    let mut counts = vec![0u64; n_bins];
    for &t in ts {
        let j = (((t + 1.0) * 0.5 * n_bins as f64) as usize).min(n_bins - 1);
        counts[j] += 1;
    }
    let width = 2.0 / n_bins as f64;
    let measures =
        (0..n_bins).map(|j| cap_measure(n, -1.0 + j as f64 * width, -1.0 + (j + 1) as f64 * width)).collect();
    (counts.iter().map(|&c| c as f64 / ts.len() as f64).collect(), measures)
}

/// Mass-weighted L1 distance from the density estimate `p_j / μ_j` to the
/// nearest monotone sequence.
fn density_distance(probs: &[f64], measures: &[f64], increasing: bool) -> f64 {
    let density: Vec<f64> = probs.iter().zip(measures).map(|(p, m)| if *m > 0.0 { p / m } else { 0.0 }).collect();
    isotonic_distance(&density, measures, increasing)
}

/// Histograms `t = ⟨φ_v, e1⟩`, divides by the exact sphere measure of each
/// bin and tests the resulting density for being non-decreasing in `t`.
/// The accepted distance is [`NULL_MARGIN`] times that of a run of the same
/// length at `U ≡ 0`, where the density is constant.
#[allow(clippy::too_many_arguments)]
pub fn check_density_monotonicity<L>(
    model: &SpinModel,
    law: &L,
    v: usize,
    settings: &ChainSettings,
    replicas: usize,
    n_bins: usize,
) -> Result<Vec<TestVerdict>>
where
    L: ReflectionLaw<Spin>,
{
    let n = model.dim();
    if !model.potential().is_non_increasing() {
        return Err(Error::InvalidPotential(format!("{}: needs a non-increasing potential", model.potential().name())));
    }
    let g = model.graph();
    if v >= g.vertex_count() {
        return Err(Error::VertexOutOfRange { vertex: v, count: g.vertex_count() });
    }
    if g.is_boundary(v) {
        return Err(Error::InvalidParameter(format!("vertex {v} is pinned")));
    }
    if n_bins < 2 {
        return Err(Error::InvalidParameter("need at least two bins".into()));
    }
    let e1 = Spin::e1(n);
    let run = |m: &SpinModel, s: &ChainSettings| -> Result<Vec<f64>> {
        let series = sample_replicas(m, law, s, replicas, |c, _| Ok(c[v].dot(&e1)))?;
        Ok(series.concat())
    };
    let ts = run(model, settings)?;
    let null_model = SpinModel::new(g.clone(), n, SpinPotential::linear(0.0)?)?;
    let null_settings = settings.with_seed(splitmix64(settings.seed ^ 0x0a11));
    let null_ts = run(&null_model, &null_settings)?;

    let (p, mu) = spin_histogram(n, n_bins, &ts);
    let (p0, _) = spin_histogram(n, n_bins, &null_ts);
    let dist = density_distance(&p, &mu, true);
    let null = density_distance(&p0, &mu, true);
    let top = p.last().unwrap() / mu.last().unwrap();
    let bottom = p[0] / mu[0];
    Ok(vec![TestVerdict::new("density.spin_isotonic_distance", TAG, dist, 0.0, Relation::AtMost, NULL_MARGIN * null)
        .with_samples(ts.len() as u64, settings.seed)
        .with_note(format!(
            "n = {n}, v = {v}, {} bins; null distance {null:.4e}; density at t = -1: {bottom:.4}, at t = 1: {top:.4}",
            p.len()
        ))])
}

/// Ising on `K_3` with vertex 0 pinned to `+1`: the enumerated `P(φ_1 = +1)`
/// against `(e^{3β} + e^{-β}) / (e^{3β} + 3e^{-β})`, and against `½`.
pub fn check_ising_density_exact(beta: f64) -> Result<Vec<TestVerdict>> {
    let g = Graph::complete(3).with_boundary(&[0])?;
    let ising = SpinModel::new(g, 1, SpinPotential::linear(beta)?)?.to_discrete()?;
    let law = enumerate_exact(&ising)?;
    let p = law.probability(|c| c[1] == 0);
    let (a, b) = ((3.0 * beta).exp(), (-beta).exp());
    let closed = (a + b) / (a + 3.0 * b);
    Ok(vec![
        TestVerdict::exact("density.ising_k3_exact", TAG, (p - closed).abs(), EXACT_TOL)
            .with_note(format!("P(+1) = {p:.15}, closed form {closed:.15}, beta = {beta}")),
        TestVerdict::new("density.ising_k3_plus_majority", TAG, p, 0.0, Relation::AtLeast, 0.5),
    ])
}

fn boundary_distance(g: &Graph, x: usize) -> Option<usize> {
    let mut dist = vec![usize::MAX; g.vertex_count()];
    let mut q = VecDeque::new();
    for &b in g.boundary() {
        dist[b] = 0;
        q.push_back(b);
    }
    while let Some(u) = q.pop_front() {
        for &(w, _) in g.neighbors(u) {
            if dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                q.push_back(w);
            }
        }
    }
    (dist[x] != usize::MAX).then_some(dist[x])
}

const BOOTSTRAP_DRAWS: usize = 32;

/// Histograms `|φ_x|` and tests the density for being non-increasing. The
/// accepted distance is [`NULL_MARGIN`] times the mean distance of
/// multinomial draws from the fitted monotone density, at the effective
/// sample size implied by the batch-means error of `|φ_x|`.
pub fn check_surface_density_monotonicity<L>(
    model: &SurfaceModel,
    law: &L,
    x: usize,
    settings: &ChainSettings,
    replicas: usize,
    n_bins: usize,
) -> Result<Vec<TestVerdict>>
where
    L: ReflectionLaw<f64>,
{
    let g = model.graph();
    if x >= g.vertex_count() {
        return Err(Error::VertexOutOfRange { vertex: x, count: g.vertex_count() });
    }
    if g.is_boundary(x) {
        return Err(Error::InvalidParameter(format!("vertex {x} is pinned")));
    }
    if n_bins < 2 {
        return Err(Error::InvalidParameter("need at least two bins".into()));
    }
    let series = sample_replicas(model, law, settings, replicas, |c, _| Ok(c[x].abs()))?;
    let n = total_draws(&series);
    let all: Vec<f64> = series.concat();
    let pinned_at_zero = g.boundary().iter().all(|&b| model.pin(b) == 0.0);
    let range = match (model.potential().is_lipschitz_support() && pinned_at_zero, boundary_distance(g, x)) {
        (true, Some(d)) => d as f64,
        _ => all.iter().copied().fold(0.0, f64::max) * (1.0 + 1e-12),
    };
    let width = range / n_bins as f64;
    let mut counts = vec![0u64; n_bins];
    for &a in &all {
        counts[((a / width) as usize).min(n_bins - 1)] += 1;
    }
    let probs: Vec<f64> = counts.iter().map(|&c| c as f64 / n as f64).collect();
    let widths = vec![width; n_bins];
    let dist = density_distance(&probs, &widths, false);

    let (_, se_bm) = pooled(&series, |&a| a);
    let (_, se_iid) = mean_and_se_iid(&all);
    let inflation = if se_iid > 0.0 { (se_bm / se_iid).powi(2).max(1.0) } else { 1.0 };
    let n_eff = ((n as f64 / inflation).round() as u64).max(1);
    let density: Vec<f64> = probs.iter().map(|p| p / width).collect();
    let fit = isotonic_non_increasing(&density, &widths);
    let mass: f64 = fit.iter().map(|f| f * width).sum();
    let fitted: Vec<f64> = fit.iter().map(|f| f * width / mass).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(settings.seed ^ 0xb005));
    let mut null = 0.0;
    for _ in 0..BOOTSTRAP_DRAWS {
        let draw = multinomial(n_eff, &fitted, &mut rng)?;
        let p: Vec<f64> = draw.iter().map(|&c| c as f64 / n_eff as f64).collect();
        null += density_distance(&p, &widths, false);
    }
    null /= BOOTSTRAP_DRAWS as f64;
    Ok(vec![TestVerdict::new(
        "density.surface_isotonic_distance",
        TAG,
        dist,
        0.0,
        Relation::AtMost,
        NULL_MARGIN * null,
    )
    .with_samples(n, settings.seed)
    .with_note(format!(
        "x = {x}, {n_bins} bins on [0, {range}]; effective samples {n_eff}; bootstrap null {null:.4e}"
    ))])
}

fn multinomial(n: u64, probs: &[f64], rng: &mut ChaCha8Rng) -> Result<Vec<u64>> {
    let mut left = n;
    let mut rest = 1.0;
    let mut out = Vec::with_capacity(probs.len());
    for &p in probs {
        let c = if left == 0 || rest <= 0.0 {
            0
        } else {
            let q = (p / rest).clamp(0.0, 1.0);
            Binomial::new(left, q).map_err(|e| Error::Sampler(format!("binomial: {e}")))?.sample(rng)
        };
        out.push(c);
        left -= c;
        rest -= p;
    }
    Ok(out)
}
