//! Exact and quadrature oracles against values computed independently
//! (closed forms, or adaptive quadrature at 30 digits) and frozen here.

use approx::assert_abs_diff_eq;
use cluster_reflect::graph::Graph;
use cluster_reflect::model::{potts_model, MarkovChain, Potential, SpinModel, SpinPotential, SurfaceModel};
use cluster_reflect::oracle::{enumerate_exact, enumerate_joint_es, TreeQuadrature};
use cluster_reflect::reflection::Permutation;
use cluster_reflect::stats::kolmogorov_q;
use cluster_reflect::verify::ExtremalSpec;

#[test]
fn ising_k3_law() {
    // Agreement weight 2 per edge: all-equal configurations carry 8, the
    // other six carry 2, so Z = 28.
    let m = potts_model(&Graph::complete(3), 2, 2f64.ln()).unwrap();
    let law = enumerate_exact(&m).unwrap();
    assert_eq!(law.len(), 8);
    assert_abs_diff_eq!(law.total(), 1.0, epsilon = 1e-15);
    assert_abs_diff_eq!(law.probability(|c| c == [0, 0, 0]), 2.0 / 7.0, epsilon = 1e-15);
    assert_abs_diff_eq!(law.probability(|c| c == [0, 1, 1]), 1.0 / 14.0, epsilon = 1e-15);
}

#[test]
fn swap_joint_table() {
    // p_e = 1/2 on agreeing edges, 0 on disagreeing ones: 2·8 + 6·2 pairs,
    // each of mass 1/28.
    let m = potts_model(&Graph::complete(3), 2, 2f64.ln()).unwrap();
    let joint = enumerate_joint_es(&m, &Permutation::new(vec![1, 0]).unwrap()).unwrap();
    assert_eq!(joint.entries.len(), 28);
    assert_abs_diff_eq!(joint.total(), 1.0, epsilon = 1e-15);
    for (_, _, p) in &joint.entries {
        assert_abs_diff_eq!(*p, 1.0 / 28.0, epsilon = 1e-15);
    }
}

#[test]
fn pinned_ising_triangle() {
    let g = Graph::complete(3).with_boundary(&[0]).unwrap();
    let m = SpinModel::new(g, 1, SpinPotential::linear(1.0).unwrap()).unwrap().to_discrete().unwrap();
    let law = enumerate_exact(&m).unwrap();
    assert_abs_diff_eq!(law.probability(|c| c[1] == 0), 0.965_276_662_551_677_1, epsilon = 1e-13);
}

#[test]
fn lazy_walk_return_probability() {
    // Fourth power of the kernel, row 0: 35/128 back at the start.
    let chain = MarkovChain::lazy_cycle_walk(6, 0, 4).unwrap();
    let law = enumerate_exact(chain.model()).unwrap();
    let expected = [0.2734375, 0.21875, 0.11328125, 0.0625, 0.11328125, 0.21875];
    for (a, e) in expected.iter().enumerate() {
        assert_abs_diff_eq!(law.probability(|c| c[4] == a), *e, epsilon = 1e-14);
    }
}

#[test]
fn hammock_path_quadrature() {
    let m = SurfaceModel::new(Graph::path(3).with_boundary(&[0]).unwrap(), Potential::hammock()).unwrap();
    let q = TreeQuadrature::new(&m, 5e-4).unwrap();
    let law = q.marginal(2);
    assert_abs_diff_eq!(law.total(), 1.0, epsilon = 1e-9);
    assert_abs_diff_eq!(law.prob_abs_at_least(1.0), 0.25, epsilon = 2e-3);
    assert_abs_diff_eq!(law.prob_in(1.0, 2.0), 0.125, epsilon = 2e-3);
    assert_abs_diff_eq!(q.barrier_probability(2, 1.0), 0.125, epsilon = 2e-3);
    assert_abs_diff_eq!(law.cdf(0.0), 0.5, epsilon = 1e-9);
}

#[test]
fn quadratic_lipschitz_quadrature() {
    let m = SurfaceModel::new(Graph::path(3).with_boundary(&[0]).unwrap(), Potential::quadratic_lipschitz()).unwrap();
    let q = TreeQuadrature::new(&m, 5e-4).unwrap();
    assert_abs_diff_eq!(q.normalizer(), 1.493_648_265_624_854, epsilon = 1e-9);
    let law = q.marginal(2);
    for (x, p) in
        [(-0.5, 0.252_588_081_435_954_5), (0.0, 0.5), (0.5, 0.747_411_918_564_045_5), (1.0, 0.914_076_021_914_903)]
    {
        assert_abs_diff_eq!(law.cdf(x), p, epsilon = 1e-3);
    }
    assert_abs_diff_eq!(law.prob_abs_at_least(1.0), 0.171_847_956_170_194_2, epsilon = 2e-3);
    assert_abs_diff_eq!(2.0 * (-1f64).exp() / q.normalizer(), 0.492_591_796_392_631, epsilon = 1e-9);
}

#[test]
fn kolmogorov_tail() {
    assert_abs_diff_eq!(kolmogorov_q(0.5), 0.963_945_243_664_875_1, epsilon = 1e-12);
    assert_abs_diff_eq!(kolmogorov_q(1.0), 0.269_999_671_677_354_56, epsilon = 1e-12);
    assert_abs_diff_eq!(kolmogorov_q(1.5), 0.022_217_962_616_525_127, epsilon = 1e-12);
}

#[test]
fn extremal_bound_is_vacuous() {
    let spec = ExtremalSpec::new(vec![(1, 2), (3, 4)], 0.1).unwrap();
    let u = Potential::hammock();
    assert_abs_diff_eq!(spec.delta(&u, 2), 0.1, epsilon = 1e-15);
    assert_abs_diff_eq!(spec.log10_bound(&u, 2), 2.681_093_170_455_735e-6, epsilon = 1e-15);
}
