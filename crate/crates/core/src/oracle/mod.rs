//! Ground truth: exact enumeration for models with finite site measures and
//! grid quadrature for surfaces on trees.

mod quadrature;

use std::collections::HashMap;
use std::fmt::{Debug, Write as _};
use std::hash::Hash;

use crate::error::{Error, Result};
use crate::graph::BondConfig;
use crate::model::FiniteSites;
use crate::reflection::{bond_probabilities, Reflection};
use crate::stats::NeumaierSum;

pub use quadrature::{GridLaw, Intervals, TreeQuadrature, DEFAULT_DELTA};

/// Largest number of terms any enumeration may visit.
pub const ORACLE_LIMIT: f64 = 1e7;

/// Probabilities of every configuration of positive weight.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactLaw<S> {
    pub configs: Vec<Vec<S>>,
    pub probs: Vec<f64>,
}

impl<S: Clone + Hash + Eq> ExactLaw<S> {
    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().copied().collect::<NeumaierSum>().value()
    }

    pub fn probability(&self, event: impl Fn(&[S]) -> bool) -> f64 {
        self.configs.iter().zip(&self.probs).filter(|(c, _)| event(c)).map(|(_, &p)| p).collect::<NeumaierSum>().value()
    }

    pub fn expectation(&self, f: impl Fn(&[S]) -> f64) -> f64 {
        self.configs.iter().zip(&self.probs).map(|(c, &p)| p * f(c)).collect::<NeumaierSum>().value()
    }

    pub fn as_map(&self) -> HashMap<Vec<S>, f64> {
        self.configs.iter().cloned().zip(self.probs.iter().copied()).collect()
    }
}

impl<S: Debug> ExactLaw<S> {
    /// One `configuration,probability` row per support point; states are
    /// joined with `;`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("configuration,probability\n");
        for (c, p) in self.configs.iter().zip(&self.probs) {
            let cfg: Vec<String> = c.iter().map(|s| format!("{s:?}")).collect();
            let _ = writeln!(out, "{},{p:.17e}", cfg.join(";"));
        }
        out
    }
}

fn atoms_and_count<M>(model: &M) -> (Vec<Vec<(M::State, f64)>>, f64)
where
    M: FiniteSites,
    M::State: Hash + Eq,
{
    let atoms: Vec<Vec<(M::State, f64)>> = (0..model.graph().vertex_count()).map(|v| model.site_atoms(v)).collect();
    let count = atoms.iter().map(|a| a.len() as f64).product();
    (atoms, count)
}

/// Visits every configuration in mixed-radix order, vertex 0 fastest.
fn for_each_config<S: Clone>(atoms: &[Vec<(S, f64)>], mut f: impl FnMut(&[S], f64)) {
    if atoms.iter().any(|a| a.is_empty()) {
        return;
    }
    let n = atoms.len();
    let mut idx = vec![0usize; n];
    let mut config: Vec<S> = atoms.iter().map(|a| a[0].0.clone()).collect();
    loop {
        let site: f64 = idx.iter().zip(atoms).map(|(&i, a)| a[i].1).product();
        f(&config, site);
        let mut v = 0;
        loop {
            if v == n {
                return;
            }
            idx[v] += 1;
            if idx[v] < atoms[v].len() {
                config[v] = atoms[v][idx[v]].0.clone();
                break;
            }
            idx[v] = 0;
            config[v] = atoms[v][0].0.clone();
            v += 1;
        }
    }
}

/// `μ(φ) ∝ ∏_v λ_v(φ_v) ∏_e h_e(φ_v, φ_w)`, normalized by one final division.
pub fn enumerate_exact<M>(model: &M) -> Result<ExactLaw<M::State>>
where
    M: FiniteSites,
    M::State: Hash + Eq,
{
    let (atoms, count) = atoms_and_count(model);
    if count > ORACLE_LIMIT {
        return Err(Error::StateSpaceOverflow { count, limit: ORACLE_LIMIT });
    }
    let mut configs = Vec::new();
    let mut weights = Vec::new();
    let mut z = NeumaierSum::new();
    for_each_config(&atoms, |c, site| {
        let w = site * model.interaction_weight(c);
        if w > 0.0 {
            configs.push(c.to_vec());
            weights.push(w);
            z.add(w);
        }
    });
    let z = z.value();
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::ZeroDensity(format!("partition function is {z}")));
    }
    let probs = weights.into_iter().map(|w| w / z).collect();
    Ok(ExactLaw { configs, probs })
}

/// Joint law of `(φ, ω)` under the τ-Edwards-Sokal coupling.
#[derive(Debug, Clone, PartialEq)]
pub struct JointLaw<S> {
    pub entries: Vec<(Vec<S>, BondConfig, f64)>,
}

impl<S: Clone + Hash + Eq> JointLaw<S> {
    pub fn total(&self) -> f64 {
        self.entries.iter().map(|e| e.2).collect::<NeumaierSum>().value()
    }

    pub fn as_map(&self) -> HashMap<(Vec<S>, BondConfig), f64> {
        let mut m = HashMap::with_capacity(self.entries.len());
        for (c, b, p) in &self.entries {
            *m.entry((c.clone(), b.clone())).or_insert(0.0) += p;
        }
        m
    }

    /// Law of `φ` with the bonds summed out.
    pub fn marginal(&self) -> HashMap<Vec<S>, f64> {
        let mut acc: HashMap<Vec<S>, NeumaierSum> = HashMap::new();
        for (c, _, p) in &self.entries {
            acc.entry(c.clone()).or_default().add(*p);
        }
        acc.into_iter().map(|(k, s)| (k, s.value())).collect()
    }
}

impl<S: Debug> JointLaw<S> {
    /// `configuration,bonds,probability` rows; bonds as a 0/1 string in
    /// edge order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("configuration,bonds,probability\n");
        for (c, b, p) in &self.entries {
            let cfg: Vec<String> = c.iter().map(|s| format!("{s:?}")).collect();
            let bits: String = b.bits().iter().map(|&x| if x { '1' } else { '0' }).collect();
            let _ = writeln!(out, "{},{bits},{p:.17e}", cfg.join(";"));
        }
        out
    }
}

/// `P(φ) ∏_e p_e^{ω_e} (1 - p_e)^{1 - ω_e}` over all pairs of positive mass.
pub fn enumerate_joint_es<M, T>(model: &M, tau: &T) -> Result<JointLaw<M::State>>
where
    M: FiniteSites,
    M::State: Hash + Eq,
    T: Reflection<M::State> + ?Sized,
{
    let (_, count) = atoms_and_count(model);
    let edges = model.graph().edge_count();
    let joint_count = count * 2f64.powi(edges as i32);
    if joint_count > ORACLE_LIMIT {
        return Err(Error::StateSpaceOverflow { count: joint_count, limit: ORACLE_LIMIT });
    }
    let law = enumerate_exact(model)?;
    let mut entries = Vec::new();
    for (c, &p) in law.configs.iter().zip(&law.probs) {
        let probs = bond_probabilities(model, tau, c);
        let random: Vec<usize> = (0..edges).filter(|&e| probs[e] > 0.0 && probs[e] < 1.0).collect();
        let mut base = BondConfig::all_closed(edges);
        for e in (0..edges).filter(|&e| probs[e] >= 1.0) {
            base.set(e, true);
        }
        for mask in 0..1u64 << random.len() {
            let mut bonds = base.clone();
            let mut w = p;
            for (i, &e) in random.iter().enumerate() {
                let open = mask >> i & 1 == 1;
                bonds.set(e, open);
                w *= if open { probs[e] } else { 1.0 - probs[e] };
            }
            if w > 0.0 {
                entries.push((c.clone(), bonds, w));
            }
        }
    }
    Ok(JointLaw { entries })
}

fn sup_distance<K: Hash + Eq + Clone>(a: &HashMap<K, f64>, b: &HashMap<K, f64>) -> f64 {
    let over_a = a.iter().map(|(k, &p)| (p - b.get(k).copied().unwrap_or(0.0)).abs());
    let only_b = b.iter().filter(|(k, _)| !a.contains_key(*k)).map(|(_, &p)| p.abs());
    over_a.chain(only_b).fold(0.0, f64::max)
}

/// Sup-norm distance between the joint law and its image under
/// `(φ, ω) ↦ (φ', ω)`, where `transform` lists the possible `φ'` with
/// their probabilities given `(φ, ω)`.
pub fn pushforward_distance<S, F>(law: &JointLaw<S>, transform: F) -> f64
where
    S: Clone + Hash + Eq,
    F: Fn(&[S], &BondConfig) -> Vec<(Vec<S>, f64)>,
{
    let mut image: HashMap<(Vec<S>, BondConfig), NeumaierSum> = HashMap::new();
    for (c, b, p) in &law.entries {
        for (out, w) in transform(c, b) {
            image.entry((out, b.clone())).or_default().add(p * w);
        }
    }
    let image: HashMap<_, f64> = image.into_iter().map(|(k, s)| (k, s.value())).collect();
    sup_distance(&law.as_map(), &image)
}

/// As [`pushforward_distance`], comparing only the laws of `φ`.
pub fn marginal_pushforward_distance<S, F>(law: &JointLaw<S>, transform: F) -> f64
where
    S: Clone + Hash + Eq,
    F: Fn(&[S], &BondConfig) -> Vec<(Vec<S>, f64)>,
{
    let mut image: HashMap<Vec<S>, NeumaierSum> = HashMap::new();
    for (c, b, p) in &law.entries {
        for (out, w) in transform(c, b) {
            image.entry(out).or_default().add(p * w);
        }
    }
    let image: HashMap<_, f64> = image.into_iter().map(|(k, s)| (k, s.value())).collect();
    sup_distance(&law.marginal(), &image)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::model::{potts_model, MarkovChain, Model, SpinModel, SpinPotential};
    use crate::reflection::{flip_component, swendsen_wang_outcomes, Permutation};

    #[test]
    fn zero_coupling_is_uniform() {
        let law = enumerate_exact(&potts_model(&Graph::complete(3), 2, 0.0).unwrap()).unwrap();
        assert_eq!(law.len(), 8);
        assert!(law.probs.iter().all(|&p| (p - 0.125).abs() < 1e-15));
    }

    #[test]
    fn single_edge_agreement() {
        let law = enumerate_exact(&potts_model(&Graph::path(2), 2, 2f64.ln()).unwrap()).unwrap();
        let agree = law.probability(|c| c[0] == c[1]);
        assert!((agree - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn markov_path_law() {
        let mc = MarkovChain::lazy_cycle_walk(6, 0, 3).unwrap();
        let law = enumerate_exact(mc.model()).unwrap();
        for (c, &p) in law.configs.iter().zip(&law.probs) {
            assert!((p - mc.path_probability(c)).abs() < 1e-15);
        }
        assert!((law.total() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn overflow_detected() {
        let m = potts_model(&Graph::path(30), 3, 1.0).unwrap();
        assert!(matches!(enumerate_exact(&m), Err(Error::StateSpaceOverflow { .. })));
        let m = potts_model(&Graph::complete(6), 3, 1.0).unwrap();
        let tau = Permutation::transposition(3, 0, 1).unwrap();
        assert!(matches!(enumerate_joint_es(&m, &tau), Err(Error::StateSpaceOverflow { .. })));
    }

    #[test]
    fn joint_law_sums_out_to_exact() {
        let g = Graph::complete(3);
        let m = SpinModel::new(g, 1, SpinPotential::linear(2f64.ln()).unwrap()).unwrap().to_discrete().unwrap();
        let tau = Permutation::transposition(2, 0, 1).unwrap();
        let joint = enumerate_joint_es(&m, &tau).unwrap();
        assert!((joint.total() - 1.0).abs() < 1e-14);
        let marginal = joint.marginal();
        for (c, p) in enumerate_exact(&m).unwrap().as_map() {
            assert!((marginal[&c] - p).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_coupling_bonds_closed() {
        let m = potts_model(&Graph::complete(3), 3, 0.0).unwrap();
        let joint = enumerate_joint_es(&m, &Permutation::transposition(3, 1, 2).unwrap()).unwrap();
        assert!(joint.entries.iter().all(|(_, b, _)| b.open_count() == 0));
    }

    #[test]
    fn identity_and_flip_pushforwards() {
        let m = potts_model(&Graph::complete(3), 2, 2f64.ln()).unwrap();
        let tau = Permutation::transposition(2, 0, 1).unwrap();
        let joint = enumerate_joint_es(&m, &tau).unwrap();
        assert_eq!(pushforward_distance(&joint, |c, _| vec![(c.to_vec(), 1.0)]), 0.0);
        let g = m.graph().clone();
        for x in 0..3 {
            let d = pushforward_distance(&joint, |c, b| vec![(flip_component(&g, c, b, &tau, x), 1.0)]);
            assert!(d < 1e-12, "{d}");
        }
        let d = marginal_pushforward_distance(&joint, |c, b| swendsen_wang_outcomes(&g, c, b, &tau));
        assert!(d < 1e-12);
    }

    #[test]
    fn csv_rows() {
        let m = potts_model(&Graph::complete(3), 2, 0.0).unwrap();
        let csv = enumerate_exact(&m).unwrap().to_csv();
        assert_eq!(csv.lines().count(), 9);
        let tau = Permutation::transposition(2, 0, 1).unwrap();
        let joint = enumerate_joint_es(&m.with_boundary(&[]).unwrap(), &tau).unwrap();
        assert_eq!(joint.to_csv().lines().count(), 9);
    }
}
