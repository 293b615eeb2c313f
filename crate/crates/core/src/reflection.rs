//! Reflections, the τ-Edwards-Sokal bond coupling and cluster flips.
//!
//! A reflection is an involution of the single-site state space which
//! preserves the site measures off the boundary and every edge weight.
//! That heights reflect Lebesgue measure and hyperplane reflections the
//! sphere measure are taken as analytic facts; discrete tables are checked
//! exactly by [`check_reflection_axioms`].

use std::fmt::Debug;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{cluster_of, connected_components, BondConfig, Graph};
use crate::model::{
    DiscreteModel, InhomogeneousHammock, MarkovChain, Model, ProductModel, Spin, SpinModel, SurfaceModel,
};

/// Involution tolerance for continuous reflections.
pub const INVOLUTION_TOL: f64 = 1e-12;

pub trait Reflection<S>: Send + Sync + Debug {
    fn apply(&self, state: &S) -> S;
}

/// `τ_m(a) = 2m - a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceReflection {
    m: f64,
}

impl SurfaceReflection {
    pub fn new(m: f64) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::InvalidParameter(format!("reflection level must be finite, got {m}")));
        }
        Ok(SurfaceReflection { m })
    }

    pub fn level(&self) -> f64 {
        self.m
    }
}

impl Reflection<f64> for SurfaceReflection {
    #[inline]
    fn apply(&self, a: &f64) -> f64 {
        2.0 * self.m - a
    }
}

/// `τ_a(b) = b - 2⟨a, b⟩ a`, reflection in the hyperplane orthogonal to `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinReflection {
    axis: Spin,
}

impl SpinReflection {
    pub fn new(axis: &[f64]) -> Result<Self> {
        Ok(SpinReflection { axis: Spin::new(axis.to_vec())? })
    }

    pub fn from_spin(axis: Spin) -> Self {
        SpinReflection { axis }
    }

    pub fn axis(&self) -> &Spin {
        &self.axis
    }
}

impl Reflection<Spin> for SpinReflection {
    fn apply(&self, b: &Spin) -> Spin {
        let d = 2.0 * self.axis.dot(b);
        let c: Vec<f64> = b.components().iter().zip(self.axis.components()).map(|(x, a)| x - d * a).collect();
        Spin::normalized(c).unwrap_or_else(|_| b.clone())
    }
}

/// `(a_1, a_2) ↦ (a_2, a_1)` on product states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SwapReflection;

impl<S: Clone> Reflection<(S, S)> for SwapReflection {
    #[inline]
    fn apply(&self, s: &(S, S)) -> (S, S) {
        (s.1.clone(), s.0.clone())
    }
}

/// A self-inverse permutation of `{0, …, q-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    table: Vec<usize>,
}

impl Permutation {
    pub fn new(table: Vec<usize>) -> Result<Self> {
        let q = table.len();
        for (a, &b) in table.iter().enumerate() {
            if b >= q || table[b] != a {
                return Err(Error::NotInvolution(format!("{table:?} maps {a} to {b}")));
            }
        }
        Ok(Permutation { table })
    }

    pub fn identity(q: usize) -> Self {
        Permutation { table: (0..q).collect() }
    }

    /// Exchanges `a` and `b`, fixing everything else.
    pub fn transposition(q: usize, a: usize, b: usize) -> Result<Self> {
        if a >= q || b >= q {
            return Err(Error::InvalidParameter(format!("transposition ({a} {b}) outside 0..{q}")));
        }
        let mut table: Vec<usize> = (0..q).collect();
        table.swap(a, b);
        Ok(Permutation { table })
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn states(&self) -> usize {
        self.table.len()
    }
}

impl Reflection<usize> for Permutation {
    #[inline]
    fn apply(&self, a: &usize) -> usize {
        self.table[*a]
    }
}

/// Law of the reflection parameter for cluster moves. Draws never look at
/// the current configuration.
pub trait ReflectionLaw<S>: Send + Sync {
    type Output: Reflection<S>;
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Output;
}

/// `τ_m` with `m ~ Uniform[-window, window]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceWindow {
    window: f64,
}

impl SurfaceWindow {
    pub const DEFAULT_WINDOW: f64 = 3.0;

    pub fn new(window: f64) -> Result<Self> {
        if !(window > 0.0 && window.is_finite()) {
            return Err(Error::InvalidParameter(format!("reflection window must be positive, got {window}")));
        }
        Ok(SurfaceWindow { window })
    }

    pub fn window(&self) -> f64 {
        self.window
    }
}

impl Default for SurfaceWindow {
    fn default() -> Self {
        SurfaceWindow { window: Self::DEFAULT_WINDOW }
    }
}

impl ReflectionLaw<f64> for SurfaceWindow {
    type Output = SurfaceReflection;
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> SurfaceReflection {
        SurfaceReflection { m: rng.random_range(-self.window..=self.window) }
    }
}

/// `τ_a` with `a` uniform on the sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UniformAxis {
    n: usize,
}

impl UniformAxis {
    pub fn new(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidParameter("spin dimension must be at least 1".into()));
        }
        Ok(UniformAxis { n })
    }
}

impl ReflectionLaw<Spin> for UniformAxis {
    type Output = SpinReflection;
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> SpinReflection {
        SpinReflection { axis: Spin::random(self.n, rng) }
    }
}

/// A fixed list of involutions drawn with the given weights.
#[derive(Debug, Clone)]
pub struct WeightedInvolutions {
    items: Vec<Permutation>,
    index: WeightedIndex<f64>,
}

impl WeightedInvolutions {
    pub fn new(items: Vec<(Permutation, f64)>) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::InvalidParameter("involution list is empty".into()));
        }
        let index = WeightedIndex::new(items.iter().map(|(_, w)| *w))
            .map_err(|e| Error::InvalidParameter(format!("involution weights: {e}")))?;
        Ok(WeightedInvolutions { items: items.into_iter().map(|(p, _)| p).collect(), index })
    }

    pub fn uniform(items: Vec<Permutation>) -> Result<Self> {
        WeightedInvolutions::new(items.into_iter().map(|p| (p, 1.0)).collect())
    }
}

impl ReflectionLaw<usize> for WeightedInvolutions {
    type Output = Permutation;
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Permutation {
        self.items[self.index.sample(rng)].clone()
    }
}

/// Always the same reflection; consumes no randomness.
#[derive(Debug, Clone)]
pub struct Fixed<T>(pub T);

impl<S, T: Reflection<S> + Clone> ReflectionLaw<S> for Fixed<T> {
    type Output = T;
    fn draw<R: Rng + ?Sized>(&self, _rng: &mut R) -> T {
        self.0.clone()
    }
}

/// A configuration together with its bonds.
#[derive(Debug, Clone, PartialEq)]
pub struct EsPair<S> {
    pub config: Vec<S>,
    pub bonds: BondConfig,
}

/// `p_e(φ) = max(1 - h(τφ_v, φ_w) / h(φ_v, φ_w), 0)` for `e = {v, w}`.
pub fn bond_probability<M, T>(model: &M, tau: &T, edge: usize, config: &[M::State]) -> f64
where
    M: Model,
    T: Reflection<M::State> + ?Sized,
{
    let (v, w) = model.graph().edge(edge);
    let a = &config[v];
    model.bond_probability(edge, a, &config[w], &tau.apply(a))
}

pub fn bond_probabilities<M, T>(model: &M, tau: &T, config: &[M::State]) -> Vec<f64>
where
    M: Model,
    T: Reflection<M::State> + ?Sized,
{
    (0..model.graph().edge_count()).map(|e| bond_probability(model, tau, e, config)).collect()
}

/// Independent `Bernoulli(p_e)` bonds. Only edges with `0 < p_e < 1` use
/// randomness.
pub fn sample_bonds<M, T, R>(model: &M, tau: &T, config: &[M::State], rng: &mut R) -> BondConfig
where
    M: Model,
    T: Reflection<M::State> + ?Sized,
    R: Rng + ?Sized,
{
    let bits = (0..model.graph().edge_count())
        .map(|e| {
            let p = bond_probability(model, tau, e, config);
            if p <= 0.0 {
                false
            } else if p >= 1.0 {
                true
            } else {
                rng.random::<f64>() < p
            }
        })
        .collect();
    BondConfig::from_bits(bits)
}

fn apply_on<S: Clone, T: Reflection<S> + ?Sized>(
    config: &[S],
    vertices: impl IntoIterator<Item = usize>,
    tau: &T,
) -> Vec<S> {
    let mut out = config.to_vec();
    for v in vertices {
        out[v] = tau.apply(&config[v]);
    }
    out
}

/// `φ^{ω,x}`: applies `τ` to the ω-cluster of `x` unless it meets the boundary.
pub fn flip_component<S, T>(graph: &Graph, config: &[S], bonds: &BondConfig, tau: &T, x: usize) -> Vec<S>
where
    S: Clone,
    T: Reflection<S> + ?Sized,
{
    let cluster = cluster_of(graph, bonds, &[x]);
    if cluster.iter().any(|&v| graph.is_boundary(v)) {
        return config.to_vec();
    }
    apply_on(config, cluster, tau)
}

/// With boundary `{v_0}`: applies `τ` to everything ω-connected to `W` if
/// that set misses `v_0`, and otherwise to everything not ω-connected to `W`.
pub fn flip_component_or_complement<S, T>(
    graph: &Graph,
    config: &[S],
    bonds: &BondConfig,
    tau: &T,
    w: &[usize],
) -> Result<Vec<S>>
where
    S: Clone,
    T: Reflection<S> + ?Sized,
{
    let v0 = match graph.boundary() {
        [v0] => *v0,
        [] => return Err(Error::EmptyBoundary),
        b => return Err(Error::NonSingletonBoundary(b.len())),
    };
    if let Some(&v) = w.iter().find(|&&v| v >= graph.vertex_count()) {
        return Err(Error::VertexOutOfRange { vertex: v, count: graph.vertex_count() });
    }
    if w.is_empty() {
        return Ok(config.to_vec());
    }
    let reached = cluster_of(graph, bonds, w);
    if reached.binary_search(&v0).is_err() {
        return Ok(apply_on(config, reached, tau));
    }
    let complement = (0..graph.vertex_count()).filter(|v| reached.binary_search(v).is_err());
    Ok(apply_on(config, complement, tau))
}

/// Applies `τ` to each ω-cluster avoiding the boundary with probability ½,
/// clusters taken in order of their smallest vertex.
pub fn swendsen_wang_flip<S, T, R>(graph: &Graph, config: &[S], bonds: &BondConfig, tau: &T, rng: &mut R) -> Vec<S>
where
    S: Clone,
    T: Reflection<S> + ?Sized,
    R: Rng + ?Sized,
{
    let part = connected_components(graph, bonds).expect("bond configuration sized for graph");
    let touch = part.touches_boundary(graph);
    let coins: Vec<bool> = touch.iter().map(|&t| !t && rng.random::<bool>()).collect();
    apply_on(config, (0..config.len()).filter(|&v| coins[part.component_id[v]]), tau)
}

/// Every outcome of [`swendsen_wang_flip`] with its probability `2^{-c}`,
/// `c` the number of free clusters.
pub fn swendsen_wang_outcomes<S, T>(graph: &Graph, config: &[S], bonds: &BondConfig, tau: &T) -> Vec<(Vec<S>, f64)>
where
    S: Clone,
    T: Reflection<S> + ?Sized,
{
    let part = connected_components(graph, bonds).expect("bond configuration sized for graph");
    let touch = part.touches_boundary(graph);
    let free: Vec<usize> = (0..part.component_count).filter(|&c| !touch[c]).collect();
    let weight = 0.5f64.powi(free.len() as i32);
    (0..1u64 << free.len())
        .map(|mask| {
            let mut flip = vec![false; part.component_count];
            for (i, &c) in free.iter().enumerate() {
                flip[c] = mask >> i & 1 == 1;
            }
            (apply_on(config, (0..config.len()).filter(|&v| flip[part.component_id[v]]), tau), weight)
        })
        .collect()
}

/// Signed position of a state relative to the mirror of `τ`; clusters of
/// monotone models never contain states of both signs.
pub trait MirrorSide<T>: Model {
    fn side(&self, tau: &T, state: &Self::State) -> f64;
}

impl MirrorSide<SurfaceReflection> for SurfaceModel {
    fn side(&self, tau: &SurfaceReflection, s: &f64) -> f64 {
        s - tau.m
    }
}

impl MirrorSide<SurfaceReflection> for InhomogeneousHammock {
    fn side(&self, tau: &SurfaceReflection, s: &f64) -> f64 {
        s - tau.m
    }
}

impl MirrorSide<SpinReflection> for SpinModel {
    fn side(&self, tau: &SpinReflection, s: &Spin) -> f64 {
        tau.axis.dot(s)
    }
}

impl MirrorSide<SwapReflection> for ProductModel<SurfaceModel> {
    fn side(&self, _tau: &SwapReflection, s: &(f64, f64)) -> f64 {
        s.0 - s.1
    }
}

/// Outcome of [`cluster_side_check`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SideReport {
    /// Clusters with at least two vertices.
    pub clusters_checked: usize,
    /// Vertex sets of clusters holding states strictly on both sides.
    pub violations: Vec<Vec<usize>>,
}

impl SideReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn merge(&mut self, other: SideReport) {
        self.clusters_checked += other.clusters_checked;
        self.violations.extend(other.violations);
    }
}

pub fn cluster_side_check<M, T>(model: &M, tau: &T, config: &[M::State], bonds: &BondConfig) -> Result<SideReport>
where
    M: MirrorSide<T>,
{
    let graph = model.graph();
    let part = connected_components(graph, bonds)?;
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); part.component_count];
    for v in 0..graph.vertex_count() {
        members[part.component_id[v]].push(v);
    }
    let mut report = SideReport::default();
    for c in members.into_iter().filter(|c| c.len() > 1) {
        report.clusters_checked += 1;
        let sides: Vec<f64> = c.iter().map(|&v| model.side(tau, &config[v])).collect();
        if sides.iter().any(|&s| s > 0.0) && sides.iter().any(|&s| s < 0.0) {
            report.violations.push(c);
        }
    }
    Ok(report)
}

/// Exact check that `tau` preserves the site weights off the boundary and
/// every edge table.
pub fn check_reflection_axioms(model: &DiscreteModel, tau: &Permutation) -> Result<()> {
    let q = model.states();
    if tau.states() != q {
        return Err(Error::ReflectionAxiom(format!("involution acts on {} states, model has {q}", tau.states())));
    }
    let g = model.graph();
    for v in (0..g.vertex_count()).filter(|&v| !g.is_boundary(v)) {
        for s in 0..q {
            if model.site_weight(v, tau.apply(&s)) != model.site_weight(v, s) {
                return Err(Error::ReflectionAxiom(format!("site measure at vertex {v} not preserved at state {s}")));
            }
        }
    }
    for e in 0..g.edge_count() {
        for a in 0..q {
            for b in 0..q {
                if model.edge_weight(e, &tau.apply(&a), &tau.apply(&b)) != model.edge_weight(e, &a, &b) {
                    return Err(Error::ReflectionAxiom(format!("edge {e} weight not preserved at ({a}, {b})")));
                }
            }
        }
    }
    Ok(())
}

/// The chain conditions: `τ` an involution, `π(τa) = π(a)` and
/// `P(τa, τb) = P(a, b)`, all exact.
pub fn check_markov_reflection(chain: &MarkovChain, tau: &Permutation) -> Result<()> {
    let q = chain.stationary().len();
    if tau.states() != q {
        return Err(Error::ReflectionAxiom(format!("involution acts on {} states, chain has {q}", tau.states())));
    }
    Permutation::new(tau.table().to_vec())?;
    for a in 0..q {
        if chain.stationary()[tau.apply(&a)] != chain.stationary()[a] {
            return Err(Error::ReflectionAxiom(format!("π(τ({a})) != π({a})")));
        }
        for b in 0..q {
            if chain.kernel()[tau.apply(&a)][tau.apply(&b)] != chain.kernel()[a][b] {
                return Err(Error::ReflectionAxiom(format!("P(τ({a}), τ({b})) != P({a}, {b})")));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{potts_model, Potential, SpinPotential};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn surface_reflection_examples() {
        assert_eq!(SurfaceReflection::new(0.0).unwrap().apply(&1.5), -1.5);
        assert_eq!(SurfaceReflection::new(1.0).unwrap().apply(&0.25), 1.75);
        let t = SurfaceReflection::new(0.7).unwrap();
        assert_eq!(t.apply(&0.7), 0.7);
        assert!(SurfaceReflection::new(f64::NAN).is_err());
    }

    #[test]
    fn spin_reflection_examples() {
        let t = SpinReflection::new(&[0.0, 1.0]).unwrap();
        let b = Spin::new(vec![0.6, 0.8]).unwrap();
        let r = t.apply(&b);
        assert!((r.components()[0] - 0.6).abs() < 1e-15 && (r.components()[1] + 0.8).abs() < 1e-15);
        let a = t.axis().clone();
        let ra = t.apply(&a);
        assert!((ra.components()[1] + 1.0).abs() < 1e-15);
        let orth = Spin::e1(2);
        assert_eq!(t.apply(&orth), orth);
        assert!(SpinReflection::new(&[1.0, 1.0]).is_err());
    }

    #[test]
    fn permutations() {
        let p = Permutation::new(vec![0, 2, 1]).unwrap();
        assert_eq!(p.apply(&1), 2);
        assert_eq!(p.apply(&0), 0);
        assert!(matches!(Permutation::new(vec![1, 2, 0]), Err(Error::NotInvolution(_))));
        assert_eq!(Permutation::transposition(3, 1, 2).unwrap(), p);
    }

    #[test]
    fn swap() {
        let s = (1.0, 2.0);
        assert_eq!(SwapReflection.apply(&s), (2.0, 1.0));
        assert_eq!(SwapReflection.apply(&SwapReflection.apply(&s)), s);
        assert_eq!(SwapReflection.apply(&(3, 3)), (3, 3));
    }

    #[test]
    fn potts_bond_probabilities() {
        let g = Graph::path(2);
        let beta = 0.8f64;
        let tau = Permutation::transposition(3, 0, 1).unwrap();
        let ferro = potts_model(&g, 3, beta).unwrap();
        let p = bond_probability(&ferro, &tau, 0, &[0, 0]);
        assert!((p - (1.0 - (-beta).exp())).abs() < 1e-15);
        let anti = potts_model(&g, 3, -beta).unwrap();
        let p = bond_probability(&anti, &tau, 0, &[0, 1]);
        assert!((p - (1.0 - (-beta).exp())).abs() < 1e-15);
        let anti_strong = potts_model(&g, 3, -0.3).unwrap();
        assert!((bond_probability(&anti_strong, &tau, 0, &[0, 1]) - (1.0 - (-0.3f64).exp())).abs() < 1e-15);
        assert_eq!(bond_probability(&ferro, &Permutation::identity(3), 0, &[0, 0]), 0.0);
    }

    #[test]
    fn hammock_bonds_are_deterministic() {
        let m = SurfaceModel::new(Graph::path(2).with_boundary(&[0]).unwrap(), Potential::hammock()).unwrap();
        let tau = SurfaceReflection::new(0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..10 {
            assert!(sample_bonds(&m, &tau, &[0.5, 0.6], &mut rng).is_open(0));
            assert!(!sample_bonds(&m, &tau, &[0.0, 0.3], &mut rng).is_open(0));
        }
    }

    #[test]
    fn flip_examples() {
        let g = Graph::path(3).with_boundary(&[0]).unwrap();
        let tau = Permutation::transposition(2, 0, 1).unwrap();
        let phi = vec![0, 0, 0];
        let none = BondConfig::all_closed(2);
        assert_eq!(flip_component(&g, &phi, &none, &tau, 2), vec![0, 0, 1]);
        assert_eq!(flip_component(&g, &phi, &none, &tau, 0), phi);
        let b = BondConfig::from_bits(vec![false, true]);
        assert_eq!(flip_component(&g, &phi, &b, &tau, 1), vec![0, 1, 1]);
        assert_eq!(flip_component(&g, &phi, &BondConfig::all_open(2), &tau, 2), phi);
    }

    #[test]
    fn complement_flip_examples() {
        let g = Graph::path(3).with_boundary(&[0]).unwrap();
        let tau = Permutation::transposition(2, 0, 1).unwrap();
        let phi = vec![0, 0, 0];
        let none = BondConfig::all_closed(2);
        assert_eq!(flip_component_or_complement(&g, &phi, &none, &tau, &[]).unwrap(), phi);
        assert_eq!(flip_component_or_complement(&g, &phi, &none, &tau, &[1]).unwrap(), vec![0, 1, 0]);
        assert_eq!(flip_component_or_complement(&g, &phi, &none, &tau, &[0]).unwrap(), vec![0, 1, 1]);
        let b = BondConfig::from_bits(vec![true, false]);
        assert_eq!(flip_component_or_complement(&g, &phi, &b, &tau, &[1, 2]).unwrap(), phi);
        assert_eq!(flip_component_or_complement(&g, &phi, &b, &tau, &[2]).unwrap(), vec![0, 0, 1]);
        let b = BondConfig::from_bits(vec![false, true]);
        assert_eq!(flip_component_or_complement(&g, &phi, &b, &tau, &[1]).unwrap(), vec![0, 1, 1]);
        assert_eq!(flip_component_or_complement(&g, &phi, &b, &tau, &[0]).unwrap(), vec![0, 1, 1]);
        let two = Graph::path(3).with_boundary(&[0, 2]).unwrap();
        assert_eq!(
            flip_component_or_complement(&two, &phi, &none, &tau, &[1]).unwrap_err(),
            Error::NonSingletonBoundary(2)
        );
    }

    #[test]
    fn swendsen_wang_outcome_weights() {
        let g = Graph::path(3);
        let tau = Permutation::transposition(2, 0, 1).unwrap();
        let outcomes = swendsen_wang_outcomes(&g, &[0, 0, 0], &BondConfig::all_closed(2), &tau);
        assert_eq!(outcomes.len(), 8);
        assert!((outcomes.iter().map(|o| o.1).sum::<f64>() - 1.0).abs() < 1e-15);
        let pinned = g.with_boundary(&[1]).unwrap();
        let all = swendsen_wang_outcomes(&pinned, &[0, 0, 0], &BondConfig::all_open(2), &tau);
        assert_eq!(all, vec![(vec![0, 0, 0], 1.0)]);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        assert_eq!(swendsen_wang_flip(&pinned, &[0, 0, 0], &BondConfig::all_open(2), &tau, &mut rng), vec![0, 0, 0]);
    }

    #[test]
    fn side_check_singletons_never_violate() {
        let m = SurfaceModel::new(Graph::path(3).with_boundary(&[0]).unwrap(), Potential::hammock()).unwrap();
        let tau = SurfaceReflection::new(0.0).unwrap();
        let r = cluster_side_check(&m, &tau, &[0.0, 0.5, -0.5], &BondConfig::all_closed(2)).unwrap();
        assert!(r.is_clean());
        assert_eq!(r.clusters_checked, 0);
        let r = cluster_side_check(&m, &tau, &[0.0, 0.5, -0.5], &BondConfig::from_bits(vec![false, true])).unwrap();
        assert_eq!(r.violations, vec![vec![1, 2]]);
    }

    #[test]
    fn lazy_walk_negation_is_a_reflection() {
        let mc = MarkovChain::lazy_cycle_walk(6, 0, 4).unwrap();
        let neg = Permutation::new((0..6).map(|a| (6 - a) % 6).collect()).unwrap();
        check_markov_reflection(&mc, &neg).unwrap();
        check_reflection_axioms(mc.model(), &neg).unwrap();
        let shift = Permutation::new(vec![1, 0, 2, 3, 4, 5]).unwrap();
        assert!(matches!(check_markov_reflection(&mc, &shift), Err(Error::ReflectionAxiom(_))));
    }

    #[test]
    fn stationary_violation_detected() {
        let pi = vec![0.25, 0.75];
        let mc = MarkovChain::new(vec![vec![0.25, 0.75], vec![0.25, 0.75]], pi, vec![1.0, 0.0], 2).unwrap();
        let swap = Permutation::transposition(2, 0, 1).unwrap();
        assert!(check_markov_reflection(&mc, &swap).is_err());
    }

    #[test]
    fn spin_side_check_runs() {
        let m = SpinModel::new(Graph::path(2), 3, SpinPotential::linear(1.0).unwrap()).unwrap();
        let tau = SpinReflection::new(&[1.0, 0.0, 0.0]).unwrap();
        let phi = vec![Spin::e1(3), Spin::new(vec![-1.0, 0.0, 0.0]).unwrap()];
        let r = cluster_side_check(&m, &tau, &phi, &BondConfig::all_open(1)).unwrap();
        assert_eq!(r.violations.len(), 1);
    }

    proptest! {
        #[test]
        fn spin_reflection_is_isometric_involution(
            a in proptest::collection::vec(-1.0f64..1.0, 4),
            b in proptest::collection::vec(-1.0f64..1.0, 4),
        ) {
            prop_assume!(a.iter().map(|x| x * x).sum::<f64>() > 1e-4);
            prop_assume!(b.iter().map(|x| x * x).sum::<f64>() > 1e-4);
            let tau = SpinReflection::from_spin(Spin::normalized(a).unwrap());
            let s = Spin::normalized(b).unwrap();
            let r = tau.apply(&s);
            prop_assert!((r.norm() - 1.0).abs() < INVOLUTION_TOL);
            let back = tau.apply(&r);
            for (x, y) in back.components().iter().zip(s.components()) {
                prop_assert!((x - y).abs() < INVOLUTION_TOL);
            }
        }

        #[test]
        fn surface_reflection_is_involution(m in -10.0f64..10.0, a in -10.0f64..10.0) {
            let t = SurfaceReflection::new(m).unwrap();
            prop_assert!((t.apply(&t.apply(&a)) - a).abs() < INVOLUTION_TOL);
        }

        #[test]
        fn bond_probabilities_in_unit_interval(phi in proptest::collection::vec(-1.5f64..1.5, 4), m in -2.0f64..2.0) {
            let g = Graph::path(4).with_boundary(&[0]).unwrap();
            let s = SurfaceModel::new_attested(g, Potential::quadratic()).unwrap();
            let t = SurfaceReflection::new(m).unwrap();
            for p in bond_probabilities(&s, &t, &phi) {
                prop_assert!((0.0..=1.0).contains(&p));
            }
        }
    }
}
