//! Monotone potentials as mixtures of hammocks.
//!
//! For monotone `U`, `exp(-U(x)) = λ_U((|x|, ∞))` with `dλ_U = -d exp(-U)`.
//! Drawing `t_e` from `λ_U` restricted to `(|∇φ_e|, ∞)` for every edge
//! couples `φ` with an inhomogeneous hammock surface whose edge `e` only
//! constrains `|∇φ_e| ≤ t_e`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;

use super::surface::{SurfaceModel, LIPSCHITZ_SLACK};
use super::{bond_probability_from_energies, Configuration, Model};

/// Per-edge Lipschitz bounds `t_e > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct HammockRadii {
    radii: Vec<f64>,
}

impl HammockRadii {
    pub fn new(radii: Vec<f64>) -> Result<Self> {
        if radii.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(Error::InvalidParameter("hammock radii must be finite and positive".into()));
        }
        Ok(HammockRadii { radii })
    }

    pub fn get(&self, edge: usize) -> f64 {
        self.radii[edge]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.radii
    }
}

/// Draws `t_e` for every edge from `λ_U` conditioned on `t_e > |φ_v - φ_w|`.
pub fn sample_hammock_radii<R: Rng + ?Sized>(
    model: &SurfaceModel,
    config: &[f64],
    rng: &mut R,
) -> Result<HammockRadii> {
    let u = model.potential();
    if !u.is_monotone() {
        return Err(Error::InvalidPotential(format!("{}: hammock mixture needs a monotone potential", u.name())));
    }
    let radii = model
        .graph()
        .edges()
        .iter()
        .map(|&(v, w)| u.sample_radius(config[v] - config[w], rng))
        .collect::<Result<Vec<_>>>()?;
    HammockRadii::new(radii)
}

/// Surface with `h_e(a, b) = 1{|a - b| ≤ t_e}`, pinned like its parent.
#[derive(Debug, Clone)]
pub struct InhomogeneousHammock {
    graph: Graph,
    radii: HammockRadii,
    pins: Vec<f64>,
}

impl InhomogeneousHammock {
    pub fn new(parent: &SurfaceModel, radii: HammockRadii) -> Result<Self> {
        let graph = parent.graph().clone();
        if radii.radii.len() != graph.edge_count() {
            return Err(Error::BondLength { expected: graph.edge_count(), got: radii.radii.len() });
        }
        let pins = (0..graph.vertex_count()).map(|v| parent.pin(v)).collect();
        Ok(InhomogeneousHammock { graph, radii, pins })
    }

    pub fn radii(&self) -> &HammockRadii {
        &self.radii
    }

    pub fn pin(&self, v: usize) -> f64 {
        self.pins[v]
    }

    #[inline]
    fn energy(&self, edge: usize, d: f64) -> f64 {
        if d.abs() <= self.radii.radii[edge] {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

impl Model for InhomogeneousHammock {
    type State = f64;

    fn graph(&self) -> &Graph {
        &self.graph
    }

    #[inline]
    fn edge_weight(&self, edge: usize, a: &f64, b: &f64) -> f64 {
        if self.energy(edge, a - b) == 0.0 {
            1.0
        } else {
            0.0
        }
    }

    #[inline]
    fn edge_energy(&self, edge: usize, a: &f64, b: &f64) -> f64 {
        self.energy(edge, a - b)
    }

    fn bond_probability(&self, edge: usize, a: &f64, b: &f64, reflected: &f64) -> f64 {
        bond_probability_from_energies(self.energy(edge, a - b), self.energy(edge, reflected - b))
    }

    /// The common pin value everywhere when pins agree, otherwise the
    /// smallest extension of the pins respecting the radii.
    fn initial_configuration(&self) -> Configuration<f64> {
        let n = self.graph.vertex_count();
        let b = self.graph.boundary();
        if b.iter().all(|&v| self.pins[v] == self.pins[b[0]]) {
            return vec![self.pins[b[0]]; n];
        }
        let mut h = vec![f64::INFINITY; n];
        for &b in self.graph.boundary() {
            h[b] = self.pins[b];
        }
        let mut changed = true;
        while changed {
            changed = false;
            for (e, &(v, w)) in self.graph.edges().iter().enumerate() {
                let t = self.radii.radii[e];
                for (x, y) in [(v, w), (w, v)] {
                    if h[x] + t < h[y] {
                        h[y] = h[x] + t;
                        changed = true;
                    }
                }
            }
        }
        h
    }

    fn check_configuration(&self, config: &[f64]) -> Result<()> {
        for &b in self.graph.boundary() {
            if config[b] != self.pins[b] {
                return Err(Error::Sampler(format!("boundary vertex {b} moved")));
            }
        }
        for (e, &(v, w)) in self.graph.edges().iter().enumerate() {
            let d = (config[v] - config[w]).abs();
            if !(d <= self.radii.radii[e] * (1.0 + LIPSCHITZ_SLACK) + LIPSCHITZ_SLACK) {
                return Err(Error::Sampler(format!("edge {{{v}, {w}}} exceeds its radius")));
            }
        }
        Ok(())
    }
}
