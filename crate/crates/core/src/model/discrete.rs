use crate::error::{Error, Result};
use crate::graph::Graph;

use super::{Configuration, FiniteSites, Model};

/// Tolerance for stochasticity and detailed balance of Markov kernels.
pub const KERNEL_TOL: f64 = 1e-12;

/// Symmetric `q × q` table of edge weights.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeTable {
    q: usize,
    values: Vec<f64>,
}

impl EdgeTable {
    pub fn new(q: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != q * q {
            return Err(Error::InvalidParameter(format!("edge table needs {} entries, got {}", q * q, values.len())));
        }
        for a in 0..q {
            for b in 0..q {
                let h = values[a * q + b];
                if !(h.is_finite() && h >= 0.0) {
                    return Err(Error::InvalidParameter(format!("edge weight h({a},{b}) = {h} is not finite and ≥ 0")));
                }
                if h != values[b * q + a] {
                    return Err(Error::InvalidParameter(format!("edge table not symmetric at ({a},{b})")));
                }
            }
        }
        Ok(EdgeTable { q, values })
    }

    /// Builds a table from `f(a, b)` evaluated for `a ≤ b` and mirrored, so
    /// the result is symmetric by construction.
    pub fn symmetric_from_fn(q: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let mut values = vec![0.0; q * q];
        for a in 0..q {
            for b in a..q {
                let h = f(a, b);
                values[a * q + b] = h;
                values[b * q + a] = h;
            }
        }
        EdgeTable::new(q, values)
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.values[a * self.q + b]
    }

    pub fn states(&self) -> usize {
        self.q
    }
}

/// A model on `{0, …, q-1}` with tabulated site weights and edge weights.
#[derive(Debug, Clone)]
pub struct DiscreteModel {
    graph: Graph,
    q: usize,
    site_weights: Vec<Vec<f64>>,
    // one shared table, or one per edge
    tables: Vec<EdgeTable>,
}

impl DiscreteModel {
    pub fn new(graph: Graph, q: usize, site_weights: Vec<Vec<f64>>, tables: Vec<EdgeTable>) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidParameter("need at least one state".into()));
        }
        if site_weights.len() != graph.vertex_count() {
            return Err(Error::InvalidParameter("one site-weight vector per vertex required".into()));
        }
        for (v, w) in site_weights.iter().enumerate() {
            if w.len() != q || w.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
                return Err(Error::InvalidParameter(format!(
                    "site weights at vertex {v} must be {q} finite values ≥ 0"
                )));
            }
            if w.iter().all(|&x| x == 0.0) {
                return Err(Error::InvalidParameter(format!("site measure at vertex {v} is zero")));
            }
        }
        if !(tables.len() == 1 || tables.len() == graph.edge_count()) || tables.iter().any(|t| t.q != q) {
            return Err(Error::InvalidParameter("need one shared edge table or one per edge, over q states".into()));
        }
        Ok(DiscreteModel { graph, q, site_weights, tables })
    }

    /// Same model with a different boundary set; site weights are unchanged.
    pub fn with_boundary(&self, boundary: &[usize]) -> Result<Self> {
        Ok(DiscreteModel { graph: self.graph.with_boundary(boundary)?, ..self.clone() })
    }

    /// Same model with the site measure at `v` replaced.
    pub fn with_site_weights(&self, v: usize, weights: Vec<f64>) -> Result<Self> {
        let mut sw = self.site_weights.clone();
        sw[v] = weights;
        DiscreteModel::new(self.graph.clone(), self.q, sw, self.tables.clone())
    }

    pub fn states(&self) -> usize {
        self.q
    }

    pub fn site_weight(&self, v: usize, s: usize) -> f64 {
        self.site_weights[v][s]
    }

    pub fn table(&self, edge: usize) -> &EdgeTable {
        if self.tables.len() == 1 {
            &self.tables[0]
        } else {
            &self.tables[edge]
        }
    }
}

impl Model for DiscreteModel {
    type State = usize;

    fn graph(&self) -> &Graph {
        &self.graph
    }

    #[inline]
    fn edge_weight(&self, edge: usize, a: &usize, b: &usize) -> f64 {
        self.table(edge).get(*a, *b)
    }

    fn initial_configuration(&self) -> Configuration<usize> {
        self.site_weights.iter().map(|w| w.iter().position(|&x| x > 0.0).unwrap_or(0)).collect()
    }

    fn check_configuration(&self, config: &[usize]) -> Result<()> {
        for (v, &s) in config.iter().enumerate() {
            if s >= self.q || self.site_weights[v][s] == 0.0 {
                return Err(Error::Sampler(format!("vertex {v} holds state {s} outside its support")));
            }
        }
        Ok(())
    }
}

impl FiniteSites for DiscreteModel {
    fn site_atoms(&self, v: usize) -> Vec<(usize, f64)> {
        self.site_weights[v].iter().enumerate().filter(|(_, &w)| w > 0.0).map(|(s, &w)| (s, w)).collect()
    }
}

/// `q`-state Potts model with `h(a, b) = exp(β δ_ab)`, counting measures
/// and free boundary. Antiferromagnetic `β < 0` is allowed; `β = -∞`
/// (proper colorings) is not.
pub fn potts_model(graph: &Graph, q: usize, beta: f64) -> Result<DiscreteModel> {
    if q < 2 {
        return Err(Error::InvalidParameter(format!("Potts model needs q ≥ 2, got {q}")));
    }
    if !beta.is_finite() {
        return Err(Error::InvalidParameter(format!("Potts coupling must be finite, got {beta}")));
    }
    let agree = beta.exp();
    let table = EdgeTable::symmetric_from_fn(q, |a, b| if a == b { agree } else { 1.0 })?;
    let graph = graph.with_boundary(&[])?;
    let sites = vec![vec![1.0; q]; graph.vertex_count()];
    DiscreteModel::new(graph, q, sites, vec![table])
}

/// A reversible chain run for `n_steps`, seen as a model on the path
/// `0 - 1 - … - n` with `λ_0 = μ`, `λ_j = π`, `h(a, b) = P(a, b) / π(b)`
/// and boundary `{0}`.
#[derive(Debug, Clone)]
pub struct MarkovChain {
    kernel: Vec<Vec<f64>>,
    stationary: Vec<f64>,
    initial: Vec<f64>,
    model: DiscreteModel,
}

impl MarkovChain {
    pub fn new(kernel: Vec<Vec<f64>>, stationary: Vec<f64>, initial: Vec<f64>, n_steps: usize) -> Result<Self> {
        let q = kernel.len();
        if q == 0 || kernel.iter().any(|r| r.len() != q) || stationary.len() != q || initial.len() != q {
            return Err(Error::InvalidParameter("kernel must be square and match π and μ".into()));
        }
        for (row, r) in kernel.iter().enumerate() {
            if r.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
                return Err(Error::NonStochastic { row, sum: f64::NAN });
            }
            let sum: f64 = r.iter().sum();
            if (sum - 1.0).abs() > KERNEL_TOL {
                return Err(Error::NonStochastic { row, sum });
            }
        }
        if stationary.iter().any(|&p| !(p > 0.0 && p.is_finite())) {
            return Err(Error::InvalidParameter("stationary law must be strictly positive".into()));
        }
        for (name, law) in [("stationary", &stationary), ("initial", &initial)] {
            let s: f64 = law.iter().sum();
            if law.iter().any(|&p| !(p >= 0.0)) || (s - 1.0).abs() > KERNEL_TOL {
                return Err(Error::InvalidParameter(format!("{name} law is not a probability vector")));
            }
        }
        for a in 0..q {
            for b in a + 1..q {
                let (lhs, rhs) = (stationary[a] * kernel[a][b], stationary[b] * kernel[b][a]);
                if (lhs - rhs).abs() > KERNEL_TOL {
                    return Err(Error::DetailedBalance { a, b, lhs, rhs });
                }
            }
        }
        let table = EdgeTable::symmetric_from_fn(q, |a, b| kernel[a][b] / stationary[b])?;
        let graph = Graph::path(n_steps + 1).with_boundary(&[0])?;
        let mut sites = vec![stationary.clone(); n_steps + 1];
        sites[0] = initial.clone();
        let model = DiscreteModel::new(graph, q, sites, vec![table])?;
        Ok(MarkovChain { kernel, stationary, initial, model })
    }

    pub fn model(&self) -> &DiscreteModel {
        &self.model
    }

    pub fn kernel(&self) -> &[Vec<f64>] {
        &self.kernel
    }

    pub fn stationary(&self) -> &[f64] {
        &self.stationary
    }

    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    pub fn n_steps(&self) -> usize {
        self.model.graph().vertex_count() - 1
    }

    /// `μ(x_0) P(x_0, x_1) ⋯ P(x_{n-1}, x_n)`.
    pub fn path_probability(&self, path: &[usize]) -> f64 {
        path.windows(2).fold(self.initial[path[0]], |acc, w| acc * self.kernel[w[0]][w[1]])
    }

    /// Lazy simple random walk on the cycle `Z_q`: stay with probability ½,
    /// step to either neighbor with probability ¼. Uniform stationary law.
    pub fn lazy_cycle_walk(q: usize, start: usize, n_steps: usize) -> Result<Self> {
        if q < 3 || start >= q {
            return Err(Error::InvalidParameter("lazy cycle walk needs q ≥ 3 and start < q".into()));
        }
        let mut kernel = vec![vec![0.0; q]; q];
        for (a, row) in kernel.iter_mut().enumerate() {
            row[a] = 0.5;
            row[(a + 1) % q] += 0.25;
            row[(a + q - 1) % q] += 0.25;
        }
        let mut initial = vec![0.0; q];
        initial[start] = 1.0;
        MarkovChain::new(kernel, vec![1.0 / q as f64; q], initial, n_steps)
    }
}
