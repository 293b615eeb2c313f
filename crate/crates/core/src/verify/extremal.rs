use crate::error::{Error, Result};
use crate::model::{Model, Potential, PotentialKind, SurfaceModel};
use crate::oracle::{TreeQuadrature, DEFAULT_DELTA};
use crate::reflection::ReflectionLaw;
use crate::samplers::ChainSettings;

use super::{pooled, sample_replicas, total_draws, Relation, TestVerdict};

const TAG: &str = "extremal-gradients";

/// Edges asked to be simultaneously near the Lipschitz ceiling.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalSpec {
    oriented_edges: Vec<(usize, usize)>,
    epsilon: f64,
}

impl ExtremalSpec {
    pub fn new(oriented_edges: Vec<(usize, usize)>, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 0.125) {
            return Err(Error::InvalidParameter(format!("epsilon must lie in (0, 1/8], got {epsilon}")));
        }
        let mut seen: Vec<(usize, usize)> = oriented_edges.iter().map(|&(v, w)| (v.min(w), v.max(w))).collect();
        seen.sort_unstable();
        if seen.windows(2).any(|p| p[0] == p[1]) {
            return Err(Error::InvalidParameter("extremal edges must be distinct".into()));
        }
        Ok(ExtremalSpec { oriented_edges, epsilon })
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.oriented_edges
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `δ(U, ε) = ε exp(-U(1 - ε) + U(0) + Δ (U(3/4) - U(0)))`.
    pub fn delta(&self, potential: &Potential, degree: usize) -> f64 {
        let u0 = potential.eval(0.0);
        self.epsilon * (-potential.eval(1.0 - self.epsilon) + u0 + degree as f64 * (potential.eval(0.75) - u0)).exp()
    }

    /// `log10` of `(C δ)^{k / C}` with `C = 2^{10Δ + 2}`.
    pub fn log10_bound(&self, potential: &Potential, degree: usize) -> f64 {
        let log10_c = (10.0 * degree as f64 + 2.0) * 2f64.log10();
        let k = self.oriented_edges.len() as f64;
        (k / 10f64.powf(log10_c)) * (log10_c + self.delta(potential, degree).log10())
    }

    /// Largest degree over the endpoints of the edges lying off the
    /// boundary.
    pub fn local_degree(&self, model: &SurfaceModel) -> usize {
        let g = model.graph();
        self.oriented_edges
            .iter()
            .flat_map(|&(v, w)| [v, w])
            .filter(|&x| !g.is_boundary(x))
            .map(|x| g.degree(x))
            .max()
            .unwrap_or(0)
    }

    fn extremal(&self, config: &[f64], epsilon: f64) -> bool {
        self.oriented_edges.iter().all(|&(v, w)| (config[v] - config[w]).abs() >= 1.0 - epsilon)
    }
}

fn validate(model: &SurfaceModel, edges: &[(usize, usize)]) -> Result<()> {
    let u = model.potential();
    if !(u.is_monotone() && u.is_lipschitz_support()) {
        return Err(Error::InvalidPotential(format!(
            "{}: needs a monotone potential with Lipschitz support",
            u.name()
        )));
    }
    let g = model.graph();
    for &(v, w) in edges {
        for x in [v, w] {
            if x >= g.vertex_count() {
                return Err(Error::VertexOutOfRange { vertex: x, count: g.vertex_count() });
            }
        }
        if g.edge_index(v, w).is_none() {
            return Err(Error::InvalidParameter(format!("{{{v}, {w}}} is not an edge")));
        }
    }
    Ok(())
}

/// Estimates `P(|φ_v - φ_w| ≥ 1 - ε on every listed edge)`; compares it
/// with the general bound (flagged vacuous when it is at least one) and, on
/// trees pinned at one vertex, with the exact product of edge tails.
pub fn check_extremal_gradients<L>(
    model: &SurfaceModel,
    law: &L,
    spec: &ExtremalSpec,
    settings: &ChainSettings,
    replicas: usize,
) -> Result<Vec<TestVerdict>>
where
    L: ReflectionLaw<f64>,
{
    validate(model, spec.edges())?;
    let eps = spec.epsilon;
    let series = sample_replicas(model, law, settings, replicas, |c, _| Ok(spec.extremal(c, eps)))?;
    let (est, se) = pooled(&series, |&b| b as u8 as f64);
    let n = total_draws(&series);
    let k = spec.edges().len();
    let u = model.potential();

    let global = model.graph().max_degree();
    let local = spec.local_degree(model);
    let (lg, ll) = (spec.log10_bound(u, global), spec.log10_bound(u, local));
    let sharper = lg.min(ll);
    let bound = 10f64.powf(sharper);
    let mut out = vec![TestVerdict::new("extremal.bound", TAG, est, se, Relation::AtMost, bound.min(1.0))
        .with_samples(n, settings.seed)
        .with_vacuous(bound >= 1.0)
        .with_note(format!(
            "log10 bound {lg:.4e} with max degree {global}, {ll:.4e} with endpoint degree {local}; k = {k}, eps = {eps}"
        ))];

    let g = model.graph();
    if g.is_tree() && g.boundary().len() == 1 {
        let (target, how) = if u.kind() == PotentialKind::Hammock {
            (eps.powi(k as i32), "eps^k")
        } else {
            (TreeQuadrature::new(model, DEFAULT_DELTA)?.extremal_probability(k, eps), "product of edge tails")
        };
        out.push(
            TestVerdict::new("extremal.tree_exact", TAG, est, se, Relation::Approx, target)
                .with_samples(n, settings.seed)
                .with_note(format!("target {how}; k = {k}, eps = {eps}")),
        );
    }
    Ok(out)
}

/// From one run: `P(Ext)` for the nested prefixes of `edges` at the first
/// `ε`, which should decrease with the prefix length, and for the full set
/// over `eps_grid`, which should increase with `ε`.
pub fn check_extremal_trends<L>(
    model: &SurfaceModel,
    law: &L,
    edges: &[(usize, usize)],
    eps_grid: &[f64],
    settings: &ChainSettings,
    replicas: usize,
) -> Result<Vec<TestVerdict>>
where
    L: ReflectionLaw<f64>,
{
    validate(model, edges)?;
    if eps_grid.is_empty() || edges.is_empty() {
        return Err(Error::InvalidParameter("need at least one edge and one epsilon".into()));
    }
    let mut grid = eps_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    for &e in &grid {
        ExtremalSpec::new(edges.to_vec(), e)?;
    }
    let eps0 = eps_grid[0];
    // per draw: length of the extremal prefix at eps0, and whether all
    // edges are extremal at each grid point
    let series = sample_replicas(model, law, settings, replicas, |c, _| {
        let prefix = edges.iter().take_while(|&&(v, w)| (c[v] - c[w]).abs() >= 1.0 - eps0).count();
        let full: Vec<bool> =
            grid.iter().map(|&e| edges.iter().all(|&(v, w)| (c[v] - c[w]).abs() >= 1.0 - e)).collect();
        Ok((prefix, full))
    })?;
    let n = total_draws(&series);
    let mut out = Vec::new();
    let mut rates = Vec::new();
    for k in 1..edges.len() {
        let (d, se) = pooled(&series, |s| (s.0 > k) as u8 as f64 - (s.0 >= k) as u8 as f64);
        let (p, _) = pooled(&series, |s| (s.0 >= k) as u8 as f64);
        let (q, _) = pooled(&series, |s| (s.0 > k) as u8 as f64);
        if p > 0.0 && q > 0.0 {
            rates.push(q / p);
        }
        out.push(
            TestVerdict::new(&format!("extremal.decay_k{}", k + 1), TAG, d, se, Relation::AtMost, 0.0)
                .with_samples(n, settings.seed)
                .with_note(format!("P(k={}) - P(k={k}) = {q:.4e} - {p:.4e}, eps = {eps0}", k + 1)),
        );
    }
    for i in 1..grid.len() {
        let (d, se) = pooled(&series, |s| s.1[i] as u8 as f64 - s.1[i - 1] as u8 as f64);
        out.push(
            TestVerdict::new(&format!("extremal.monotone_eps{}", grid[i]), TAG, d, se, Relation::AtLeast, 0.0)
                .with_samples(n, settings.seed)
                .with_note(format!("P(eps={}) - P(eps={})", grid[i], grid[i - 1])),
        );
    }
    if !rates.is_empty() {
        let note = rates.iter().map(|r| format!("{r:.3}")).collect::<Vec<_>>().join(", ");
        if let Some(first) = out.first_mut() {
            first.note.push_str(&format!("; successive ratios {note}"));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::reflection::SurfaceWindow;
    use crate::samplers::MoveKind;

    #[test]
    fn spec_validation_and_bound() {
        assert!(ExtremalSpec::new(vec![(0, 1)], 0.2).is_err());
        assert!(ExtremalSpec::new(vec![(0, 1), (1, 0)], 0.1).is_err());
        let s = ExtremalSpec::new(vec![(0, 1), (2, 3), (4, 5)], 0.05).unwrap();
        let u = Potential::hammock();
        assert_eq!(s.delta(&u, 4), 0.05);
        // C(4) = 2^42 dwarfs any k at desk scale
        let l = s.log10_bound(&u, 4);
        assert!(l > 0.0 && l < 1e-10);
    }

    #[test]
    fn single_edge_tree() {
        let m = SurfaceModel::new(Graph::path(2).with_boundary(&[0]).unwrap(), Potential::hammock()).unwrap();
        let spec = ExtremalSpec::new(vec![(0, 1)], 0.1).unwrap();
        let settings = ChainSettings::single_site(10, 1, 20_000, 5);
        let v = check_extremal_gradients(&m, &SurfaceWindow::default(), &spec, &settings, 2).unwrap();
        assert!(v[0].vacuous);
        assert_eq!(v[1].target, 0.1);
        assert!(v[1].pass, "{:?}", v[1]);
        assert_eq!(v[1].n_samples, 40_000);
    }

    #[test]
    fn trends_hold_on_grid() {
        let m = SurfaceModel::new(Graph::grid(4, 4, crate::graph::GridBoundary::Frame), Potential::hammock()).unwrap();
        let settings =
            ChainSettings::new(50, 1, 5_000, 1, vec![(MoveKind::SingleSite, 1.0), (MoveKind::WolffCluster, 1.0)]);
        let v = check_extremal_trends(&m, &SurfaceWindow::default(), &[(5, 6), (9, 10)], &[0.1, 0.125], &settings, 2)
            .unwrap();
        assert_eq!(v.len(), 2);
        assert!(v.iter().all(|v| v.pass), "{v:#?}");
    }

    #[test]
    fn rejects_non_edges() {
        let m = SurfaceModel::new(Graph::path(3).with_boundary(&[0]).unwrap(), Potential::hammock()).unwrap();
        let spec = ExtremalSpec::new(vec![(0, 2)], 0.1).unwrap();
        let s = ChainSettings::single_site(1, 1, 1, 0);
        assert!(check_extremal_gradients(&m, &SurfaceWindow::default(), &spec, &s, 1).is_err());
    }
}
