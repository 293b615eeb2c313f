use cluster_reflect::graph::Graph;
use cluster_reflect::model::{potts_model, Model, Potential, SurfaceModel};
use cluster_reflect::oracle::TreeQuadrature;
use cluster_reflect::reflection::{flip_component, sample_bonds, SurfaceReflection, SurfaceWindow};
use cluster_reflect::samplers::{run_chain, wolff_step, ChainSettings, MoveKind};
use cluster_reflect::verify::{check_flip_exact, transpositions, Status};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn flip_invariance_on_random_trees(seed in any::<u64>(), n in 2usize..=4, q in 2usize..=3, beta in -1.5f64..1.5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = Graph::random_tree(n, &mut rng);
        let m = potts_model(&g, q, beta).unwrap();
        let v = check_flip_exact("tree", &m, &transpositions(q)).unwrap();
        prop_assert!(v.iter().all(|v| v.status == Status::Pass), "{:?}", v);
    }

    #[test]
    fn flipping_a_cluster_twice_restores(seed in any::<u64>(), m in -2.0f64..2.0, x in 0usize..16) {
        let model = SurfaceModel::new(Graph::grid(4, 4, cluster_reflect::graph::GridBoundary::Frame), Potential::hammock()).unwrap();
        let s = ChainSettings::single_site(20, 1, 1, seed);
        let config = run_chain(&model, &SurfaceWindow::default(), &s, |c| c.to_vec()).unwrap().values.remove(0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let tau = SurfaceReflection::new(m).unwrap();
        let bonds = sample_bonds(&model, &tau, &config, &mut rng);
        let once = flip_component(model.graph(), &config, &bonds, &tau, x);
        let twice = flip_component(model.graph(), &once, &bonds, &tau, x);
        for (a, b) in config.iter().zip(&twice) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        prop_assert!(model.check_configuration(&once).is_ok());
    }

    #[test]
    fn wolff_keeps_lipschitz(seed in any::<u64>()) {
        let model = SurfaceModel::new(Graph::grid(5, 5, cluster_reflect::graph::GridBoundary::Frame), Potential::hammock()).unwrap();
        let s = ChainSettings::new(10, 1, 3, seed, vec![(MoveKind::SingleSite, 1.0), (MoveKind::WolffCluster, 1.0)]);
        let law = SurfaceWindow::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for c in run_chain(&model, &law, &s, |c| c.to_vec()).unwrap().values {
            let next = wolff_step(&model, &law, &c, &mut rng);
            prop_assert!(model.check_configuration(&next).is_ok());
        }
    }

    #[test]
    fn tree_marginals_are_normalized(seed in any::<u64>(), n in 2usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = Graph::random_tree(n, &mut rng).with_boundary(&[0]).unwrap();
        let model = SurfaceModel::new(g, Potential::quadratic_lipschitz()).unwrap();
        let q = TreeQuadrature::new(&model, 1e-3).unwrap();
        for v in 0..n {
            let law = q.marginal(v);
            prop_assert!((law.total() - 1.0).abs() < 1e-9);
            prop_assert!(law.mean().abs() < 1e-9);
        }
    }
}
