use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{sample_hammock_radii, InhomogeneousHammock, Model, SurfaceModel};
use crate::oracle::TreeQuadrature;
use crate::reflection::ReflectionLaw;
use crate::samplers::{replica_seed, splitmix64, ChainSettings, ChainStats, SingleSite};

use super::{ks_effective, pooled, sample_replicas, total_draws, Relation, TestVerdict};

const TAG: &str = "hammock-mixture";

#[derive(Debug, Clone)]
pub struct MixtureOptions<'a> {
    /// Vertices whose marginals are compared.
    pub vertices: Vec<usize>,
    /// Single-site sweeps under `μ_t` per alternation.
    pub inner_sweeps: usize,
    /// KS level before the Bonferroni split.
    pub alpha: f64,
    /// Oracle for `P(φ_v ≤ x)` and `P(t_e = r)` on trees.
    pub quadrature: Option<&'a TreeQuadrature>,
    pub cdf_vertex: usize,
    pub cdf_points: Vec<f64>,
}

/// Runs the alternation `φ → t → φ'`, with `t_e` drawn given `|∇φ|` and
/// `φ'` from single-site sweeps under the box constraints `|∇φ'| ≤ t`, as a
/// chain of its own, and compares it with direct sampling from the model.
pub fn check_mixture_decomposition<L>(
    model: &SurfaceModel,
    law: &L,
    settings: &ChainSettings,
    replicas: usize,
    options: &MixtureOptions<'_>,
) -> Result<Vec<TestVerdict>>
where
    L: ReflectionLaw<f64>,
{
    let u = model.potential();
    if !u.is_monotone() {
        return Err(Error::InvalidPotential(format!("{}: the mixture needs a monotone potential", u.name())));
    }
    let g = model.graph();
    let nv = g.vertex_count();
    if let Some(&v) = options.vertices.iter().chain([&options.cdf_vertex]).find(|&&v| v >= nv) {
        return Err(Error::VertexOutOfRange { vertex: v, count: nv });
    }
    settings.validate()?;
    if replicas < 1 || options.inner_sweeps < 1 {
        return Err(Error::InvalidParameter("need at least one replica and one inner sweep".into()));
    }
    let radius = u.support_radius();
    let watch: Vec<usize> = options.vertices.iter().copied().chain([options.cdf_vertex]).collect();

    let direct =
        sample_replicas(model, law, settings, replicas, |c, _| Ok(watch.iter().map(|&v| c[v]).collect::<Vec<_>>()))?;

    // (watched heights, fraction of edges at the full radius)
    let alternated: Vec<Vec<(Vec<f64>, f64)>> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let seed = splitmix64(replica_seed(settings.seed, r) ^ 0x00e1_7e5a);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut config = model.initial_configuration();
            let mut stats = ChainStats::default();
            let mut at_radius = 0.0;
            let mut step = |config: &mut Vec<f64>, at_radius: &mut f64| -> Result<()> {
                let t = sample_hammock_radii(model, config, &mut rng)?;
                *at_radius = match radius {
                    Some(r) => {
                        t.as_slice().iter().filter(|&&x| x >= r).count() as f64 / t.as_slice().len().max(1) as f64
                    }
                    None => 0.0,
                };
                let inner = InhomogeneousHammock::new(model, t)?;
                for _ in 0..options.inner_sweeps {
                    inner.single_site_sweep(config, settings.proposal_step, &mut rng, &mut stats)?;
                }
                inner.check_configuration(config)
            };
            for _ in 0..settings.burn_in_sweeps {
                step(&mut config, &mut at_radius)?;
            }
            let mut out = Vec::with_capacity(settings.n_samples);
            for _ in 0..settings.n_samples {
                for _ in 0..settings.thinning {
                    step(&mut config, &mut at_radius)?;
                }
                out.push((watch.iter().map(|&v| config[v]).collect(), at_radius));
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;

    let n = total_draws(&alternated);
    let seed = settings.seed;
    let level = options.alpha / options.vertices.len().max(1) as f64;
    let mut out = Vec::new();
    for (i, &v) in options.vertices.iter().enumerate() {
        let a: Vec<Vec<f64>> = direct.iter().map(|s| s.iter().map(|c| c[i]).collect()).collect();
        let b: Vec<Vec<f64>> = alternated.iter().map(|s| s.iter().map(|c| c.0[i]).collect()).collect();
        let (ks, n_a, n_b) = ks_effective(&a, &b);
        out.push(
            TestVerdict::new(&format!("mixture.ks.phi{v}"), TAG, ks.p_value, 0.0, Relation::AtLeast, level)
                .with_samples(n, seed)
                .with_note(format!(
                    "KS statistic {:.4e}; effective sizes {n_a:.0} direct, {n_b:.0} alternated",
                    ks.statistic
                )),
        );
    }
    if let Some(q) = options.quadrature {
        let k = watch.len() - 1;
        let law = q.marginal(options.cdf_vertex);
        for &x in &options.cdf_points {
            let (est, se) = pooled(&alternated, |c| (c.0[k] <= x) as u8 as f64);
            out.push(
                TestVerdict::new(
                    &format!("mixture.cdf.phi{}@{x}", options.cdf_vertex),
                    TAG,
                    est,
                    se,
                    Relation::Approx,
                    law.cdf(x),
                )
                .with_samples(n, seed)
                .with_note("quadrature marginal"),
            );
        }
        if let Some(r) = radius {
            if model.graph().is_tree() {
                let target = 2.0 * r * u.weight(r) / q.normalizer();
                let (est, se) = pooled(&alternated, |c| c.1);
                out.push(
                    TestVerdict::new("mixture.p_full_radius", TAG, est, se, Relation::Approx, target)
                        .with_samples(n, seed)
                        .with_note(format!("mean fraction of edges with t_e = {r}")),
                );
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::Status;
    use super::*;
    use crate::graph::Graph;
    use crate::model::Potential;
    use crate::reflection::SurfaceWindow;
    use crate::samplers::MoveKind;

    #[test]
    fn quadratic_lipschitz_path() {
        let g = Graph::path(5).with_boundary(&[0]).unwrap();
        let m = SurfaceModel::new(g, Potential::quadratic_lipschitz()).unwrap();
        let q = TreeQuadrature::new(&m, 1e-3).unwrap();
        let opts = MixtureOptions {
            vertices: vec![2, 4],
            inner_sweeps: 1,
            alpha: 1e-3,
            quadrature: Some(&q),
            cdf_vertex: 4,
            cdf_points: vec![-0.5, 0.0, 1.0],
        };
        let s = ChainSettings::new(20, 2, 5_000, 9, vec![(MoveKind::SingleSite, 1.0), (MoveKind::WolffCluster, 1.0)]);
        let v = check_mixture_decomposition(&m, &SurfaceWindow::default(), &s, 2, &opts).unwrap();
        assert_eq!(v.len(), 6);
        assert!(v.iter().all(|v| v.status == Status::Pass), "{v:#?}");
        let p = v.last().unwrap();
        assert!((p.target - 2.0 * (-1f64).exp() / (std::f64::consts::PI.sqrt() * 0.842_700_792_949_715)).abs() < 1e-6);
    }

    #[test]
    fn hammock_radii_are_trivial() {
        let g = Graph::path(3).with_boundary(&[0]).unwrap();
        let m = SurfaceModel::new(g, Potential::hammock()).unwrap();
        let q = TreeQuadrature::new(&m, 1e-3).unwrap();
        let opts = MixtureOptions {
            vertices: vec![2],
            inner_sweeps: 1,
            alpha: 1e-3,
            quadrature: Some(&q),
            cdf_vertex: 2,
            cdf_points: vec![],
        };
        let s = ChainSettings::single_site(5, 1, 500, 2);
        let v = check_mixture_decomposition(&m, &SurfaceWindow::default(), &s, 1, &opts).unwrap();
        let p = v.last().unwrap();
        assert_eq!(p.estimate, 1.0);
        assert!((p.target - 1.0).abs() < 1e-12);
    }
}
