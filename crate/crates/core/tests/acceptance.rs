//! Acceptance run: one line per criterion, non-zero exit if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use cluster_reflect::graph::{Graph, GridBoundary};
use cluster_reflect::model::{MarkovChain, Potential, Spin, SpinModel, SpinPotential, SurfaceModel};
use cluster_reflect::oracle::{Intervals, TreeQuadrature, DEFAULT_DELTA};
use cluster_reflect::reflection::{Permutation, SurfaceWindow, UniformAxis};
use cluster_reflect::samplers::{ChainSettings, MoveKind};
use cluster_reflect::verify::{self, BarrierTargets, GeneralizedSet, MixtureOptions, Observable, Status, TestVerdict};
use cluster_reflect::Result;

const SEED: u64 = 20_241_014;
const REPLICAS: usize = 8;

fn cluster_mix() -> Vec<(MoveKind, f64)> {
    vec![(MoveKind::SingleSite, 1.0), (MoveKind::WolffCluster, 1.0)]
}

/// `total` draws split over the replicas.
fn settings(total: usize, thinning: usize, seed: u64) -> ChainSettings {
    ChainSettings::new(500, thinning, total / REPLICAS, seed, cluster_mix())
}

struct Outcome {
    ok: bool,
    detail: String,
    verdicts: Vec<TestVerdict>,
}

fn all_pass(verdicts: Vec<TestVerdict>, detail: impl Into<String>) -> Outcome {
    Outcome { ok: verdicts.iter().all(|v| v.status == Status::Pass), detail: detail.into(), verdicts }
}

fn criterion_1() -> Result<Outcome> {
    let v = verify::lemma1_exact_suite()?;
    let worst = v.iter().map(|v| v.estimate).fold(0.0, f64::max);
    Ok(all_pass(v, format!("max sup-norm distance {worst:.2e} < 1e-12")))
}

fn criterion_2() -> Result<Outcome> {
    let path = SurfaceModel::new(Graph::path(6).with_boundary(&[0])?, Potential::hammock())?;
    let law = SurfaceWindow::default();
    let mut verdicts = Vec::new();
    let mut detail = Vec::new();
    for (i, (edges, eps)) in
        [(vec![(1, 2)], 0.1), (vec![(1, 2), (3, 4)], 0.1), (vec![(1, 2), (3, 4)], 0.05)].into_iter().enumerate()
    {
        let spec = verify::ExtremalSpec::new(edges, eps)?;
        let v =
            verify::check_extremal_gradients(&path, &law, &spec, &settings(1_000_000, 1, SEED + i as u64), REPLICAS)?;
        let exact = v.iter().find(|v| v.name == "extremal.tree_exact").expect("path is a tree");
        detail.push(format!(
            "k={} eps={eps}: {:.5}±{:.5} vs {}",
            spec.edges().len(),
            exact.estimate,
            exact.std_error,
            exact.target
        ));
        verdicts.extend(v);
    }
    let grid = SurfaceModel::new(Graph::grid(8, 8, GridBoundary::Frame), Potential::hammock())?;
    let edges = vec![(9, 10), (27, 28), (45, 46)];
    let s = settings(200_000, 1, SEED + 10);
    let spec = verify::ExtremalSpec::new(edges.clone(), 0.05)?;
    let bound = verify::check_extremal_gradients(&grid, &law, &spec, &s, REPLICAS)?;
    detail.push(format!("8x8 k=3 eps=0.05 bound vacuous: {}", bound[0].vacuous));
    verdicts.extend(bound);
    verdicts.extend(verify::check_extremal_trends(&grid, &law, &edges, &[0.05, 0.1, 0.125], &s, REPLICAS)?);
    Ok(all_pass(verdicts, detail.join("; ")))
}

fn criterion_3() -> Result<Outcome> {
    let law = SurfaceWindow::default();
    let path = SurfaceModel::new(Graph::path(3).with_boundary(&[0])?, Potential::hammock())?;
    let q = TreeQuadrature::new(&path, DEFAULT_DELTA)?;
    let m2 = q.marginal(2);
    let targets = BarrierTargets {
        barrier: q.barrier_probability(2, 1.0),
        abs_at_least: m2.prob_abs_at_least(1.0),
        strip: m2.prob_in(1.0, 2.0),
    };
    let general = GeneralizedSet(Intervals(vec![(-1.5, -0.5), (0.25, 0.75)]));
    let mut v = verify::check_reflection_principle(
        &path,
        &law,
        2,
        1.0,
        &settings(1_000_000, 1, SEED + 20),
        REPLICAS,
        Some(targets),
        Some(&general),
    )?;
    let path_ok = v.iter().all(|v| v.status == Status::Pass);
    let grid = SurfaceModel::new(Graph::grid(5, 5, GridBoundary::Frame), Potential::hammock())?;
    let g = verify::check_reflection_principle(
        &grid,
        &law,
        12,
        0.5,
        &settings(1_000_000, 1, SEED + 21),
        REPLICAS,
        None,
        None,
    )?;
    let grid_ok = g.iter().all(|v| v.status != Status::Fail);
    let inconclusive = g.iter().filter(|v| v.status == Status::Inconclusive).count();
    v.extend(g);
    Ok(Outcome {
        ok: path_ok && grid_ok,
        detail: format!(
            "oracle ({:.4}, {:.4}, {:.4}); path all pass: {path_ok}; 5x5 none violated by > 4 se: {grid_ok} ({inconclusive} inconclusive)",
            targets.barrier, targets.abs_at_least, targets.strip
        ),
        verdicts: v,
    })
}

fn criterion_4() -> Result<Outcome> {
    let g = Graph::grid(3, 3, GridBoundary::None).with_boundary(&[0])?;
    let model = SpinModel::new(g, 3, SpinPotential::linear(1.0)?)?;
    let mut v = verify::check_density_monotonicity(
        &model,
        &UniformAxis::new(3)?,
        4,
        &settings(1_000_000, 1, SEED + 30),
        REPLICAS,
        20,
    )?;
    let detail = format!("isotonic distance {:.3e} vs threshold {:.3e}", v[0].estimate, v[0].target);
    for beta in [0.5, 1.0, 2.0] {
        v.extend(verify::check_ising_density_exact(beta)?);
    }
    Ok(all_pass(v, detail))
}

fn criterion_5() -> Result<Outcome> {
    let surface = SurfaceModel::new(Graph::grid(5, 5, GridBoundary::Frame), Potential::hammock())?;
    let s = settings(100_000, 1, SEED + 40);
    let (r1, v1) = verify::check_cluster_sides(&surface, &SurfaceWindow::default(), &s, REPLICAS)?;
    let g = Graph::grid(3, 3, GridBoundary::None).with_boundary(&[0])?;
    let spin = SpinModel::new(g, 3, SpinPotential::linear(1.0)?)?;
    let (r2, v2) = verify::check_cluster_sides(&spin, &UniformAxis::new(3)?, &s, REPLICAS)?;
    let detail = format!(
        "hammock: {} violations in {} clusters over {} pairs; O(3): {} in {} over {}",
        r1.violations.len(),
        r1.clusters_checked,
        v1.n_samples,
        r2.violations.len(),
        r2.clusters_checked,
        v2.n_samples
    );
    Ok(all_pass(vec![v1, v2], detail))
}

fn criterion_6() -> Result<Outcome> {
    let surface = SurfaceModel::new(Graph::grid(5, 5, GridBoundary::Frame), Potential::hammock())?;
    let obs = vec![
        Observable::new("phi6", |c: &[f64]| c[6]),
        Observable::new("phi12", |c: &[f64]| c[12]),
        Observable::new("phi18", |c: &[f64]| c[18]),
        Observable::new("mean_height", |c: &[f64]| c.iter().sum::<f64>() / c.len() as f64),
    ];
    let s = settings(100_000, 5, SEED + 50);
    let mut v = verify::check_lemma1_continuous(&surface, &SurfaceWindow::default(), &s, REPLICAS, &obs, 1e-3)?;
    let g = Graph::grid(4, 4, GridBoundary::None).with_boundary(&[0])?;
    let xy = SpinModel::new(g, 2, SpinPotential::linear(1.0)?)?;
    let e1 = Spin::e1(2);
    let proj = |v: usize| {
        let e1 = e1.clone();
        move |c: &[Spin]| c[v].dot(&e1)
    };
    let spin_obs = vec![
        Observable::new("t5", proj(5)),
        Observable::new("t10", proj(10)),
        Observable::new("t15", proj(15)),
        Observable::new("magnetization", move |c: &[Spin]| {
            c.iter().map(|s| s.components()[0]).sum::<f64>() / c.len() as f64
        }),
    ];
    v.extend(verify::check_lemma1_continuous(&xy, &UniformAxis::new(2)?, &s, REPLICAS, &spin_obs, 1e-3)?);
    let min_p = v.iter().map(|v| v.estimate).fold(1.0, f64::min);
    Ok(all_pass(v, format!("smallest KS p-value {min_p:.3e} (level 2.5e-4 each)")))
}

fn criterion_7() -> Result<Outcome> {
    let model = SurfaceModel::new(Graph::path(5).with_boundary(&[0])?, Potential::quadratic_lipschitz())?;
    let q = TreeQuadrature::new(&model, DEFAULT_DELTA)?;
    let opts = MixtureOptions {
        vertices: vec![2, 4],
        inner_sweeps: 1,
        alpha: 1e-3,
        quadrature: Some(&q),
        cdf_vertex: 4,
        cdf_points: vec![-0.5, 0.0, 1.0],
    };
    let v = verify::check_mixture_decomposition(
        &model,
        &SurfaceWindow::default(),
        &settings(100_000, 2, SEED + 60),
        REPLICAS,
        &opts,
    )?;
    let t = v.iter().find(|v| v.name == "mixture.p_full_radius").map(|v| (v.estimate, v.target)).unwrap_or_default();
    Ok(all_pass(v, format!("P(t_e = 1) {:.4} vs {:.4}", t.0, t.1)))
}

fn criterion_8() -> Result<Outcome> {
    let chain = MarkovChain::lazy_cycle_walk(6, 0, 4)?;
    let tau = Permutation::new((0..6).map(|a| (6 - a) % 6).collect())?;
    let v = verify::check_markov_reflection_suite(&chain, &tau)?;
    let d = v.last().map(|v| v.estimate).unwrap_or(f64::NAN);
    Ok(all_pass(v, format!("conditions exact; pushforward distance {d:.2e}")))
}

fn criterion_9() -> Result<Outcome> {
    let (model, tau) = verify::asymmetric_measure_control()?;
    let a = verify::check_flip_exact("control.asymmetric", &model, &[tau])?;
    let a_fails = a[0].status == Status::Fail;
    let anti = Potential::custom(
        "anti_monotone",
        |x: f64| if x.abs() <= 1.0 { -2.0 * x * x } else { f64::INFINITY },
        false,
        true,
        false,
    );
    let surface = SurfaceModel::new(Graph::grid(5, 5, GridBoundary::Frame), anti)?;
    let s = ChainSettings::single_site(500, 1, 20_000 / REPLICAS, SEED + 70);
    let (r, b) = verify::check_cluster_sides(&surface, &SurfaceWindow::new(1.0)?, &s, REPLICAS)?;
    let b_fails = b.status == Status::Fail;
    Ok(Outcome {
        ok: a_fails && b_fails,
        detail: format!(
            "(a) exact check fails: {a_fails} (distance {:.3e}); (b) side check fails: {b_fails} ({} violations)",
            a[0].estimate,
            r.violations.len()
        ),
        verdicts: Vec::new(),
    })
}

type Criterion = (&'static str, fn() -> Result<Outcome>, u64);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("exact cluster-flip invariance", criterion_1, 10),
        ("extremal gradients on trees", criterion_2, 120),
        ("reflection principle", criterion_3, 120),
        ("spin density monotonicity", criterion_4, 180),
        ("one-sided clusters", criterion_5, 60),
        ("continuous flip invariance", criterion_6, 180),
        ("hammock mixture", criterion_7, 120),
        ("markov chain reflection", criterion_8, 1),
        ("negative controls", criterion_9, 60),
    ];
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(*limit);
        let (ok, detail) = match &result {
            Ok(o) => (o.ok && in_time, o.detail.clone()),
            Err(e) => (false, format!("error: {e}")),
        };
        println!(
            "criterion {}: {} {name}: {detail} [{:.1}s, limit {limit}s]",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
        if !ok {
            failed += 1;
            if let Ok(o) = &result {
                print!("{}", verify::summary_table(&o.verdicts));
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
