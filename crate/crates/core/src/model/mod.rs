//! Models of the form `∏_edges h(φ_v, φ_w) ∏_vertices dλ_v(φ_v)`.
//!
//! Each family is its own type implementing [`Model`]. Discrete families
//! additionally implement [`FiniteSites`], which is all the exact oracle
//! needs.

mod discrete;
mod hammock;
pub mod potential;
mod product;
mod spin;
mod surface;

use std::fmt::Debug;
use std::hash::Hash;

use crate::error::Result;
use crate::graph::Graph;

pub use discrete::{potts_model, DiscreteModel, EdgeTable, MarkovChain};
pub use hammock::{sample_hammock_radii, HammockRadii, InhomogeneousHammock};
pub use potential::{Potential, PotentialKind, SpinPotential};
pub use product::{ProductFactor, ProductModel};
pub use spin::{Spin, SpinModel};
pub use surface::SurfaceModel;

/// Per-vertex states; index `v` holds `φ_v`.
pub type Configuration<S> = Vec<S>;

pub trait Model: Send + Sync {
    type State: Clone + PartialEq + Debug + Send + Sync;

    fn graph(&self) -> &Graph;

    /// `h_e(a, b)`; finite and non-negative, symmetric in `a, b`.
    fn edge_weight(&self, edge: usize, a: &Self::State, b: &Self::State) -> f64;

    /// `-ln h_e(a, b)`, `+∞` where `h` vanishes.
    fn edge_energy(&self, edge: usize, a: &Self::State, b: &Self::State) -> f64 {
        let h = self.edge_weight(edge, a, b);
        if h == 0.0 {
            f64::INFINITY
        } else {
            -h.ln()
        }
    }

    /// `P(ω_e = 1 | φ)` for `e = {v, w}` with `a = φ_v`, `b = φ_w` and
    /// `reflected = τ(φ_v)`.
    fn bond_probability(&self, edge: usize, a: &Self::State, b: &Self::State, reflected: &Self::State) -> f64 {
        bond_probability_from_weights(self.edge_weight(edge, a, b), self.edge_weight(edge, reflected, b))
    }

    /// Deterministic boundary-consistent starting configuration.
    fn initial_configuration(&self) -> Configuration<Self::State>;

    /// Hard checks a configuration produced by a sampler must pass.
    fn check_configuration(&self, _config: &[Self::State]) -> Result<()> {
        Ok(())
    }

    /// `∏_e h_e(φ_v, φ_w)`.
    fn interaction_weight(&self, config: &[Self::State]) -> f64 {
        self.graph()
            .edges()
            .iter()
            .enumerate()
            .map(|(e, &(v, w))| self.edge_weight(e, &config[v], &config[w]))
            .product()
    }
}

/// Models whose single-site measures are finite sums of atoms.
pub trait FiniteSites: Model
where
    Self::State: Hash + Eq,
{
    /// Atoms of `λ_v` with positive mass.
    fn site_atoms(&self, v: usize) -> Vec<(Self::State, f64)>;
}

/// `max(1 - h_reflected / h, 0)` with `0/0 := 1` and `t/0 := ∞`.
///
/// The sign of `h_reflected - h` is examined before dividing, so both
/// conventions resolve to `0` without producing infinities.
pub fn bond_probability_from_weights(h: f64, h_reflected: f64) -> f64 {
    if h_reflected >= h {
        0.0
    } else {
        (1.0 - h_reflected / h).clamp(0.0, 1.0)
    }
}

/// Log-space form of [`bond_probability_from_weights`] for `h = exp(-energy)`.
pub fn bond_probability_from_energies(energy: f64, energy_reflected: f64) -> f64 {
    if energy == f64::INFINITY || energy_reflected <= energy {
        0.0
    } else if energy_reflected == f64::INFINITY {
        1.0
    } else {
        (-(energy - energy_reflected).exp_m1()).clamp(0.0, 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn division_conventions() {
        assert_eq!(bond_probability_from_weights(0.0, 0.0), 0.0);
        assert_eq!(bond_probability_from_weights(0.0, 2.0), 0.0);
        assert_eq!(bond_probability_from_weights(2.0, 2.0), 0.0);
        assert_eq!(bond_probability_from_weights(2.0, 0.0), 1.0);
        assert!((bond_probability_from_weights(2.0, 1.0) - 0.5).abs() < 1e-15);
        assert_eq!(bond_probability_from_energies(f64::INFINITY, f64::INFINITY), 0.0);
        assert_eq!(bond_probability_from_energies(0.0, f64::INFINITY), 1.0);
        assert_eq!(bond_probability_from_energies(1.0, 0.5), 0.0);
        let p = bond_probability_from_energies(0.0, 2f64.ln());
        assert!((p - 0.5).abs() < 1e-15);
    }
}
