use crate::error::Result;
use crate::model::Model;
use crate::reflection::{cluster_side_check, sample_bonds, MirrorSide, Reflection, ReflectionLaw, SideReport};
use crate::samplers::{wolff_step, ChainSettings, SingleSite};

use super::{ks_effective, sample_replicas, total_draws, Relation, TestVerdict};

/// A named real-valued function of a configuration.
pub struct Observable<'a, S> {
    pub name: String,
    pub f: Box<dyn Fn(&[S]) -> f64 + Send + Sync + 'a>,
}

impl<'a, S> Observable<'a, S> {
    pub fn new(name: impl Into<String>, f: impl Fn(&[S]) -> f64 + Send + Sync + 'a) -> Self {
        Observable { name: name.into(), f: Box::new(f) }
    }
}

/// Equilibrium draws against the same draws after one cluster flip: a
/// two-sample KS test per observable at level `alpha / #observables`.
pub fn check_lemma1_continuous<M, L>(
    model: &M,
    law: &L,
    settings: &ChainSettings,
    replicas: usize,
    observables: &[Observable<'_, M::State>],
    alpha: f64,
) -> Result<Vec<TestVerdict>>
where
    M: SingleSite,
    L: ReflectionLaw<M::State>,
{
    let series = sample_replicas(model, law, settings, replicas, |c, rng| {
        let flipped = wolff_step(model, law, c, rng);
        Ok(observables.iter().map(|o| ((o.f)(c), (o.f)(&flipped))).collect::<Vec<_>>())
    })?;
    let n = total_draws(&series);
    let level = alpha / observables.len().max(1) as f64;
    Ok(observables
        .iter()
        .enumerate()
        .map(|(i, o)| {
            let a: Vec<Vec<f64>> = series.iter().map(|s| s.iter().map(|d| d[i].0).collect()).collect();
            let b: Vec<Vec<f64>> = series.iter().map(|s| s.iter().map(|d| d[i].1).collect()).collect();
            let (ks, n_a, n_b) = ks_effective(&a, &b);
            TestVerdict::new(
                &format!("lemma1.ks.{}", o.name),
                "cluster-flip-invariance",
                ks.p_value,
                0.0,
                Relation::AtLeast,
                level,
            )
            .with_samples(n, settings.seed)
            .with_note(format!(
                "KS statistic {:.4e}; effective sizes {n_a:.0}, {n_b:.0}; level {alpha} over {} observables",
                ks.statistic,
                observables.len()
            ))
        })
        .collect())
}

/// Draws `(φ, ω)` pairs along a chain and counts clusters holding states
/// strictly on both sides of the mirror.
pub fn check_cluster_sides<M, L, T>(
    model: &M,
    law: &L,
    settings: &ChainSettings,
    replicas: usize,
) -> Result<(SideReport, TestVerdict)>
where
    M: SingleSite + MirrorSide<T>,
    T: Reflection<<M as Model>::State>,
    L: ReflectionLaw<<M as Model>::State, Output = T>,
{
    let series = sample_replicas(model, law, settings, replicas, |c, rng| {
        let tau = law.draw(rng);
        let bonds = sample_bonds(model, &tau, c, rng);
        cluster_side_check(model, &tau, c, &bonds)
    })?;
    let n = total_draws(&series);
    let mut report = SideReport::default();
    for r in series.into_iter().flatten() {
        report.merge(r);
    }
    let verdict = TestVerdict::new(
        "clusters.one_sided",
        "one-sided-clusters",
        report.violations.len() as f64,
        0.0,
        Relation::AtMost,
        0.0,
    )
    .with_samples(n, settings.seed)
    .with_note(format!("{} clusters of size >= 2 checked over {n} pairs", report.clusters_checked));
    Ok((report, verdict))
}

#[cfg(test)]
mod tests {
    use super::super::Status;
    use super::*;
    use crate::graph::{Graph, GridBoundary};
    use crate::model::{Potential, SpinModel, SpinPotential, SurfaceModel};
    use crate::reflection::{Fixed, SurfaceWindow, UniformAxis};
    use crate::samplers::MoveKind;

    fn mix() -> Vec<(MoveKind, f64)> {
        vec![(MoveKind::SingleSite, 1.0), (MoveKind::WolffCluster, 1.0)]
    }

    #[test]
    fn hammock_flip_passes() {
        let m = SurfaceModel::new(Graph::grid(4, 4, GridBoundary::Frame), Potential::hammock()).unwrap();
        let obs = vec![
            Observable::new("phi5", |c: &[f64]| c[5]),
            Observable::new("mean", |c: &[f64]| c.iter().sum::<f64>() / c.len() as f64),
        ];
        let s = ChainSettings::new(50, 2, 4_000, 8, mix());
        let v = check_lemma1_continuous(&m, &SurfaceWindow::default(), &s, 2, &obs, 1e-3).unwrap();
        assert!(v.iter().all(|v| v.status == Status::Pass), "{v:#?}");
    }

    #[test]
    fn identity_flip_gives_zero_statistic() {
        let m = crate::model::potts_model(&Graph::path(4), 2, 0.5).unwrap();
        let obs = vec![Observable::new("sum", |c: &[usize]| c.iter().sum::<usize>() as f64)];
        let s = ChainSettings::single_site(5, 1, 500, 1);
        let law = Fixed(crate::reflection::Permutation::identity(2));
        let v = check_lemma1_continuous(&m, &law, &s, 1, &obs, 1e-3).unwrap();
        assert_eq!(v[0].estimate, 1.0);
        assert!(v[0].note.starts_with("KS statistic 0"));
    }

    #[test]
    fn clusters_one_sided_for_monotone_models() {
        let m = SurfaceModel::new(Graph::grid(4, 4, GridBoundary::Frame), Potential::hammock()).unwrap();
        let s = ChainSettings::new(20, 1, 2_000, 3, mix());
        let (r, v) = check_cluster_sides(&m, &SurfaceWindow::new(1.5).unwrap(), &s, 2).unwrap();
        assert!(r.is_clean() && v.pass && r.clusters_checked > 0);
        let g = Graph::grid(3, 3, GridBoundary::None).with_boundary(&[0]).unwrap();
        let spin = SpinModel::new(g, 3, SpinPotential::linear(1.0).unwrap()).unwrap();
        let (r, _) = check_cluster_sides(&spin, &UniformAxis::new(3).unwrap(), &s, 2).unwrap();
        assert!(r.is_clean());
    }

    #[test]
    fn non_monotone_potential_breaks_sides() {
        let u = Potential::custom(
            "anti",
            |x: f64| if x.abs() <= 1.0 { -2.0 * x * x } else { f64::INFINITY },
            false,
            true,
            false,
        );
        let m = SurfaceModel::new(Graph::grid(4, 4, GridBoundary::Frame), u).unwrap();
        let s = ChainSettings::new(20, 1, 2_000, 3, vec![(MoveKind::SingleSite, 1.0)]);
        let (r, v) = check_cluster_sides(&m, &SurfaceWindow::new(1.0).unwrap(), &s, 2).unwrap();
        assert!(!r.is_clean());
        assert_eq!(v.status, Status::Fail);
    }
}
