use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::graph::Graph;

use super::discrete::{DiscreteModel, EdgeTable};
use super::potential::SpinPotential;
use super::{bond_probability_from_energies, Configuration, Model};

/// Allowed deviation of `‖φ_v‖` from 1.
pub const NORM_TOL: f64 = 1e-12;

/// A unit vector in `ℝⁿ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spin(Vec<f64>);

impl Spin {
    pub fn new(components: Vec<f64>) -> Result<Self> {
        let s = Spin(components);
        if s.0.is_empty() || (s.norm() - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidParameter(format!("not a unit vector: {:?}", s.0)));
        }
        Ok(s)
    }

    /// Scales a non-zero vector to unit length.
    pub fn normalized(mut components: Vec<f64>) -> Result<Self> {
        let norm = components.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidParameter("cannot normalize a zero or non-finite vector".into()));
        }
        components.iter_mut().for_each(|x| *x /= norm);
        Ok(Spin(components))
    }

    /// First standard basis vector `e_1` of `ℝⁿ`.
    pub fn e1(n: usize) -> Self {
        let mut c = vec![0.0; n];
        c[0] = 1.0;
        Spin(c)
    }

    /// Uniform point on the sphere `S^{n-1}`.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        loop {
            let c: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            if let Ok(s) = Spin::normalized(c) {
                return s;
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    #[inline]
    pub fn dot(&self, other: &Spin) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }
}

/// Spin `O(n)` model: `h(a, b) = exp(-U(⟨a, b⟩))`, uniform surface measure
/// off the boundary and `δ_{e_1}` on it.
#[derive(Debug, Clone)]
pub struct SpinModel {
    graph: Graph,
    n: usize,
    potential: SpinPotential,
}

impl SpinModel {
    pub fn new(graph: Graph, n: usize, potential: SpinPotential) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidParameter("spin dimension must be at least 1".into()));
        }
        potential.validate()?;
        for r in [-1.0, 1.0] {
            if potential.eval(r) == f64::INFINITY {
                return Err(Error::InvalidPotential(format!("{}: infinite at r = {r}", potential.name())));
            }
        }
        Ok(SpinModel { graph, n, potential })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn potential(&self) -> &SpinPotential {
        &self.potential
    }

    /// The `n = 1` model as an Ising model on labels `0 ↦ +1`, `1 ↦ -1`,
    /// with the counting measure halved so it is a probability measure.
    pub fn to_discrete(&self) -> Result<DiscreteModel> {
        if self.n != 1 {
            return Err(Error::Unsupported(format!("only n = 1 has a finite state space, got n = {}", self.n)));
        }
        let sign = |s: usize| if s == 0 { 1.0 } else { -1.0 };
        let table = EdgeTable::symmetric_from_fn(2, |a, b| (-self.potential.eval(sign(a) * sign(b))).exp())?;
        let sites = (0..self.graph.vertex_count())
            .map(|v| if self.graph.is_boundary(v) { vec![1.0, 0.0] } else { vec![0.5, 0.5] })
            .collect();
        DiscreteModel::new(self.graph.clone(), 2, sites, vec![table])
    }
}

impl Model for SpinModel {
    type State = Spin;

    fn graph(&self) -> &Graph {
        &self.graph
    }

    #[inline]
    fn edge_weight(&self, _edge: usize, a: &Spin, b: &Spin) -> f64 {
        (-self.potential.eval(a.dot(b))).exp()
    }

    #[inline]
    fn edge_energy(&self, _edge: usize, a: &Spin, b: &Spin) -> f64 {
        self.potential.eval(a.dot(b))
    }

    fn bond_probability(&self, _edge: usize, a: &Spin, b: &Spin, reflected: &Spin) -> f64 {
        bond_probability_from_energies(self.potential.eval(a.dot(b)), self.potential.eval(reflected.dot(b)))
    }

    fn initial_configuration(&self) -> Configuration<Spin> {
        vec![Spin::e1(self.n); self.graph.vertex_count()]
    }

    fn check_configuration(&self, config: &[Spin]) -> Result<()> {
        let e1 = Spin::e1(self.n);
        for (v, s) in config.iter().enumerate() {
            if s.dim() != self.n || (s.norm() - 1.0).abs() > NORM_TOL {
                return Err(Error::Sampler(format!("spin at {v} is not a unit vector in dimension {}", self.n)));
            }
            if self.graph.is_boundary(v) && *s != e1 {
                return Err(Error::Sampler(format!("boundary spin at {v} moved")));
            }
        }
        Ok(())
    }
}
