use crate::error::{Error, Result};
use crate::graph::Graph;

use super::potential::Potential;
use super::{bond_probability_from_energies, Configuration, Model};

/// Slack allowed on `|∇φ| ≤ 1` when checking Lipschitz configurations,
/// covering rounding in `2m - a`.
pub const LIPSCHITZ_SLACK: f64 = 1e-9;

/// Real-valued heights with `h(a, b) = exp(-U(a - b))`, Lebesgue measure off
/// the boundary and point masses at the pinned values on it.
#[derive(Debug, Clone)]
pub struct SurfaceModel {
    graph: Graph,
    potential: Potential,
    pins: Vec<f64>,
}

impl SurfaceModel {
    /// Surface pinned at `0` on the boundary. Potentials without Lipschitz
    /// support are refused here; see [`SurfaceModel::new_attested`].
    pub fn new(graph: Graph, potential: Potential) -> Result<Self> {
        if !potential.is_lipschitz_support() {
            return Err(Error::InvalidPotential(format!(
                "{}: finiteness of the partition function must be attested with new_attested",
                potential.name()
            )));
        }
        SurfaceModel::new_attested(graph, potential)
    }

    /// As [`SurfaceModel::new`], with the caller vouching that the partition
    /// function is finite.
    pub fn new_attested(graph: Graph, potential: Potential) -> Result<Self> {
        if graph.boundary().is_empty() {
            return Err(Error::EmptyBoundary);
        }
        potential.validate()?;
        if potential.eval(0.0) == f64::INFINITY {
            return Err(Error::InvalidPotential(format!("{}: U(0) = ∞", potential.name())));
        }
        let n = graph.vertex_count();
        SurfaceModel::anchored(&graph)?;
        Ok(SurfaceModel { graph, potential, pins: vec![0.0; n] })
    }

    fn anchored(graph: &Graph) -> Result<()> {
        let mut seen = vec![false; graph.vertex_count()];
        let mut stack: Vec<usize> = graph.boundary().to_vec();
        for &b in &stack {
            seen[b] = true;
        }
        while let Some(v) = stack.pop() {
            for &(w, _) in graph.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        match seen.iter().position(|s| !s) {
            Some(v) => Err(Error::InvalidParameter(format!(
                "vertex {v} is not connected to the boundary; the surface is not normalizable"
            ))),
            None => Ok(()),
        }
    }

    /// Replaces the boundary values, one per boundary vertex in sorted order.
    pub fn with_pins(mut self, values: &[f64]) -> Result<Self> {
        if values.len() != self.graph.boundary().len() || values.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("need one finite pin per boundary vertex".into()));
        }
        for (&b, &x) in self.graph.boundary().iter().zip(values) {
            self.pins[b] = x;
        }
        if self.initial_heights().is_none() {
            return Err(Error::ZeroDensity("boundary values admit no configuration of positive density".into()));
        }
        Ok(self)
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    /// Pinned value at boundary vertex `v`; `0` elsewhere.
    pub fn pin(&self, v: usize) -> f64 {
        self.pins[v]
    }

    /// `Σ_e U(φ_v - φ_w)`.
    pub fn energy(&self, config: &[f64]) -> f64 {
        self.graph.edges().iter().map(|&(v, w)| self.potential.eval(config[v] - config[w])).sum()
    }

    // The common pin when pins agree; otherwise the smallest extension of
    // the pins with slope just under 1, so rounding cannot push a gradient
    // past the support.
    fn initial_heights(&self) -> Option<Vec<f64>> {
        let n = self.graph.vertex_count();
        let b = self.graph.boundary();
        if b.iter().all(|&v| self.pins[v] == self.pins[b[0]]) {
            return Some(vec![self.pins[b[0]]; n]);
        }
        let slope = 1.0 - LIPSCHITZ_SLACK;
        let mut h = vec![f64::INFINITY; n];
        for &b in self.graph.boundary() {
            h[b] = self.pins[b];
        }
        let mut changed = true;
        while changed {
            changed = false;
            for &(v, w) in self.graph.edges() {
                for (x, y) in [(v, w), (w, v)] {
                    if h[x] + slope < h[y] {
                        h[y] = h[x] + slope;
                        changed = true;
                    }
                }
            }
        }
        let config = h;
        let ok = self.graph.boundary().iter().all(|&b| config[b] == self.pins[b])
            && self.graph.edges().iter().all(|&(v, w)| self.potential.eval(config[v] - config[w]).is_finite());
        ok.then_some(config)
    }
}

impl Model for SurfaceModel {
    type State = f64;

    fn graph(&self) -> &Graph {
        &self.graph
    }

    #[inline]
    fn edge_weight(&self, _edge: usize, a: &f64, b: &f64) -> f64 {
        self.potential.weight(a - b)
    }

    #[inline]
    fn edge_energy(&self, _edge: usize, a: &f64, b: &f64) -> f64 {
        self.potential.eval(a - b)
    }

    #[inline]
    fn bond_probability(&self, _edge: usize, a: &f64, b: &f64, reflected: &f64) -> f64 {
        bond_probability_from_energies(self.potential.eval(a - b), self.potential.eval(reflected - b))
    }

    fn initial_configuration(&self) -> Configuration<f64> {
        self.initial_heights().expect("pins validated at construction")
    }

    fn check_configuration(&self, config: &[f64]) -> Result<()> {
        if config.len() != self.graph.vertex_count() {
            return Err(Error::Sampler("configuration length differs from vertex count".into()));
        }
        for &b in self.graph.boundary() {
            if config[b] != self.pins[b] {
                return Err(Error::Sampler(format!("boundary vertex {b} moved to {}", config[b])));
            }
        }
        if let Some(v) = config.iter().position(|x| !x.is_finite()) {
            return Err(Error::Sampler(format!("height at {v} is not finite")));
        }
        for &(v, w) in self.graph.edges() {
            let d = config[v] - config[w];
            let bad = if self.potential.is_lipschitz_support() {
                d.abs() > 1.0 + LIPSCHITZ_SLACK
            } else {
                self.potential.eval(d) == f64::INFINITY
            };
            if bad {
                return Err(Error::Sampler(format!("edge {{{v}, {w}}} has gradient {d} outside the support")));
            }
        }
        Ok(())
    }
}
