use std::hash::Hash;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::model::{potts_model, DiscreteModel, EdgeTable, FiniteSites, MarkovChain, Model};
use crate::oracle::{enumerate_joint_es, marginal_pushforward_distance, pushforward_distance, ORACLE_LIMIT};
use crate::reflection::{
    check_markov_reflection, flip_component, flip_component_or_complement, swendsen_wang_outcomes, Permutation,
    Reflection,
};

use super::TestVerdict;

/// Sup-norm tolerance for exact pushforward comparisons.
pub const EXACT_TOL: f64 = 1e-12;

const TAG: &str = "cluster-flip-invariance";

/// Largest pushforward distances under every single-cluster flip and under
/// the random Swendsen-Wang flip, for each involution in `taus`.
pub fn check_flip_exact<M, T>(label: &str, model: &M, taus: &[T]) -> Result<Vec<TestVerdict>>
where
    M: FiniteSites,
    M::State: Hash + Eq,
    T: Reflection<M::State>,
{
    let g = model.graph();
    let mut flip = 0.0f64;
    let mut sw = 0.0f64;
    for tau in taus {
        let joint = enumerate_joint_es(model, tau)?;
        for x in 0..g.vertex_count() {
            let d = pushforward_distance(&joint, |c, b| vec![(flip_component(g, c, b, tau, x), 1.0)]);
            flip = flip.max(d);
        }
        sw = sw.max(marginal_pushforward_distance(&joint, |c, b| swendsen_wang_outcomes(g, c, b, tau)));
    }
    let note = format!("{} involutions, {} vertices", taus.len(), g.vertex_count());
    Ok(vec![
        TestVerdict::exact(&format!("{label}.flip_component"), TAG, flip, EXACT_TOL).with_note(note.clone()),
        TestVerdict::exact(&format!("{label}.swendsen_wang_marginal"), TAG, sw, EXACT_TOL).with_note(note),
    ])
}

/// Largest pushforward distance of the component-or-complement flip over
/// every `W ⊆ V`; the model must have a single boundary vertex.
pub fn check_complement_exact<M, T>(label: &str, model: &M, taus: &[T]) -> Result<TestVerdict>
where
    M: FiniteSites,
    M::State: Hash + Eq,
    T: Reflection<M::State>,
{
    let g = model.graph();
    let n = g.vertex_count();
    if n > 20 {
        return Err(Error::StateSpaceOverflow { count: 2f64.powi(n as i32), limit: ORACLE_LIMIT });
    }
    match g.boundary() {
        [_] => {}
        [] => return Err(Error::EmptyBoundary),
        b => return Err(Error::NonSingletonBoundary(b.len())),
    }
    let mut worst = 0.0f64;
    for tau in taus {
        let joint = enumerate_joint_es(model, tau)?;
        for mask in 0..1u32 << n {
            let w: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
            let d = pushforward_distance(&joint, |c, b| {
                vec![(flip_component_or_complement(g, c, b, tau, &w).expect("single boundary vertex, W in range"), 1.0)]
            });
            worst = worst.max(d);
        }
    }
    Ok(TestVerdict::exact(&format!("{label}.component_or_complement"), TAG, worst, EXACT_TOL).with_note(format!(
        "{} involutions, {} subsets",
        taus.len(),
        1u64 << n
    )))
}

/// Identity and every transposition of `q` states.
pub fn transpositions(q: usize) -> Vec<Permutation> {
    let mut out = vec![Permutation::identity(q)];
    for a in 0..q {
        for b in a + 1..q {
            out.push(Permutation::transposition(q, a, b).expect("states in range"));
        }
    }
    out
}

/// Ising at `β = ±ln 2` and three-state Potts at `β = 1` on `K_3` and `P_4`,
/// with every transposition; boundary-free for the cluster flips and
/// pinned at vertex 0 for the complement flips.
pub fn lemma1_exact_suite() -> Result<Vec<TestVerdict>> {
    let cases = [("ising+", 2, 2f64.ln()), ("ising-", 2, -(2f64.ln())), ("potts3", 3, 1.0)];
    let graphs = [("k3", Graph::complete(3)), ("p4", Graph::path(4))];
    let mut out = Vec::new();
    for (gname, g) in &graphs {
        for &(mname, q, beta) in &cases {
            let label = format!("{mname}.{gname}");
            let model = potts_model(g, q, beta)?;
            let taus = transpositions(q);
            out.extend(check_flip_exact(&label, &model, &taus)?);
            out.push(check_complement_exact(&label, &model.with_boundary(&[0])?, &taus)?);
        }
    }
    Ok(out)
}

/// Heights `{0, 1, 2}` on a path of three vertices, `τ(a) = 2 - a` and
/// `h(a, b) = exp(-(a - b)²)`, but with site weights `exp(-a/2)` which `τ`
/// does not preserve.
pub fn asymmetric_measure_control() -> Result<(DiscreteModel, Permutation)> {
    let g = Graph::path(3);
    let table = EdgeTable::symmetric_from_fn(3, |a, b| (-((a as f64 - b as f64).powi(2))).exp())?;
    let site: Vec<f64> = (0..3).map(|a| (-0.5 * a as f64).exp()).collect();
    let model = DiscreteModel::new(g, 3, vec![site; 3], vec![table])?;
    Ok((model, Permutation::new(vec![2, 1, 0])?))
}

/// The chain conditions and the pushforward of every cluster flip of the
/// path law.
pub fn check_markov_reflection_suite(chain: &MarkovChain, tau: &Permutation) -> Result<Vec<TestVerdict>> {
    let q = chain.stationary().len() as f64;
    let n = chain.n_steps() as i32;
    let count = q.powi(n + 1) * 2f64.powi(n);
    if count > ORACLE_LIMIT {
        return Err(Error::StateSpaceOverflow { count, limit: ORACLE_LIMIT });
    }
    let tag = "markov-reflection";
    let conditions = match check_markov_reflection(chain, tau) {
        Ok(()) => TestVerdict::exact("markov.conditions", tag, 0.0, EXACT_TOL),
        Err(e) => return Ok(vec![TestVerdict::failed("markov.conditions", tag, e.to_string())]),
    };
    let model = chain.model();
    let g = model.graph();
    let joint = enumerate_joint_es(model, tau)?;
    let worst = (0..g.vertex_count())
        .map(|x| pushforward_distance(&joint, |c, b| vec![(flip_component(g, c, b, tau, x), 1.0)]))
        .fold(0.0, f64::max);
    Ok(vec![
        conditions,
        TestVerdict::exact("markov.flip_component", tag, worst, EXACT_TOL)
            .with_note(format!("{} joint states", joint.entries.len())),
    ])
}
