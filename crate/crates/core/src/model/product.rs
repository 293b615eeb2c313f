use std::hash::Hash;

use crate::error::{Error, Result};
use crate::graph::Graph;

use super::potential::{PROBE_RANGE, PROBE_STEP};
use super::{
    bond_probability_from_energies, Configuration, DiscreteModel, FiniteSites, Model, SpinModel, SurfaceModel,
};

/// Models that can be paired into a [`ProductModel`].
pub trait ProductFactor: Model + Clone {
    /// Errors unless `other` has the same graph, edge weights and site
    /// measures off the boundary (checked on probes for continuous models).
    fn check_compatible(&self, other: &Self) -> Result<()>;
}

fn same_graph(a: &Graph, b: &Graph) -> Result<()> {
    if a.vertex_count() != b.vertex_count() || a.edges() != b.edges() || a.boundary() != b.boundary() {
        return Err(Error::Incompatible("factors live on different graphs or boundaries".into()));
    }
    Ok(())
}

impl ProductFactor for DiscreteModel {
    fn check_compatible(&self, other: &Self) -> Result<()> {
        same_graph(self.graph(), other.graph())?;
        if self.states() != other.states() {
            return Err(Error::Incompatible("different state counts".into()));
        }
        let q = self.states();
        for e in 0..self.graph().edge_count() {
            for a in 0..q {
                for b in 0..q {
                    if self.edge_weight(e, &a, &b) != other.edge_weight(e, &a, &b) {
                        return Err(Error::Incompatible(format!("edge weights differ on edge {e} at ({a}, {b})")));
                    }
                }
            }
        }
        for v in (0..self.graph().vertex_count()).filter(|&v| !self.graph().is_boundary(v)) {
            if (0..q).any(|s| self.site_weight(v, s) != other.site_weight(v, s)) {
                return Err(Error::Incompatible(format!("site measures differ at vertex {v}")));
            }
        }
        Ok(())
    }
}

impl ProductFactor for SurfaceModel {
    fn check_compatible(&self, other: &Self) -> Result<()> {
        same_graph(self.graph(), other.graph())?;
        let n = (PROBE_RANGE / PROBE_STEP).round() as i64;
        for i in -n..=n {
            let x = i as f64 * PROBE_STEP;
            if self.potential().eval(x) != other.potential().eval(x) {
                return Err(Error::Incompatible(format!("potentials differ at {x}")));
            }
        }
        Ok(())
    }
}

impl ProductFactor for SpinModel {
    fn check_compatible(&self, other: &Self) -> Result<()> {
        same_graph(self.graph(), other.graph())?;
        if self.dim() != other.dim() {
            return Err(Error::Incompatible("different spin dimensions".into()));
        }
        let n = (1.0 / PROBE_STEP).round() as i64;
        for i in -n..=n {
            let r = i as f64 * PROBE_STEP;
            if self.potential().eval(r) != other.potential().eval(r) {
                return Err(Error::Incompatible(format!("spin potentials differ at {r}")));
            }
        }
        Ok(())
    }
}

/// Two independent copies on the same graph with `(h × h)` edge weights
/// and product site measures.
#[derive(Debug, Clone)]
pub struct ProductModel<M> {
    first: M,
    second: M,
}

impl<M: ProductFactor> ProductModel<M> {
    pub fn new(first: M, second: M) -> Result<Self> {
        first.check_compatible(&second)?;
        Ok(ProductModel { first, second })
    }

    pub fn first(&self) -> &M {
        &self.first
    }

    pub fn second(&self) -> &M {
        &self.second
    }
}

impl<M: ProductFactor> Model for ProductModel<M> {
    type State = (M::State, M::State);

    fn graph(&self) -> &Graph {
        self.first.graph()
    }

    #[inline]
    fn edge_weight(&self, edge: usize, a: &Self::State, b: &Self::State) -> f64 {
        self.first.edge_weight(edge, &a.0, &b.0) * self.second.edge_weight(edge, &a.1, &b.1)
    }

    #[inline]
    fn edge_energy(&self, edge: usize, a: &Self::State, b: &Self::State) -> f64 {
        self.first.edge_energy(edge, &a.0, &b.0) + self.second.edge_energy(edge, &a.1, &b.1)
    }

    fn bond_probability(&self, edge: usize, a: &Self::State, b: &Self::State, reflected: &Self::State) -> f64 {
        bond_probability_from_energies(self.edge_energy(edge, a, b), self.edge_energy(edge, reflected, b))
    }

    fn initial_configuration(&self) -> Configuration<Self::State> {
        self.first.initial_configuration().into_iter().zip(self.second.initial_configuration()).collect()
    }

    fn check_configuration(&self, config: &[Self::State]) -> Result<()> {
        let (a, b): (Vec<_>, Vec<_>) = config.iter().cloned().unzip();
        self.first.check_configuration(&a)?;
        self.second.check_configuration(&b)
    }
}

impl<M> FiniteSites for ProductModel<M>
where
    M: ProductFactor + FiniteSites,
    M::State: Hash + Eq,
{
    fn site_atoms(&self, v: usize) -> Vec<(Self::State, f64)> {
        let (a, b) = (self.first.site_atoms(v), self.second.site_atoms(v));
        a.iter().flat_map(|(x, wx)| b.iter().map(move |(y, wy)| ((x.clone(), y.clone()), wx * wy))).collect()
    }
}
