//! Grid quadrature for surfaces on trees pinned at a single root.
//!
//! On a tree with boundary `{r}` the increments `φ_w - φ_parent(w)` are
//! i.i.d. with density `exp(-U) / ∫ exp(-U)`, so every marginal is a
//! convolution power of one kernel. Heights live on cells of width `δ`
//! centred at multiples of `δ`; mass in a cell is treated as uniform
//! across it when answering interval queries.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::{Model, Potential, SurfaceModel};

pub const DEFAULT_DELTA: f64 = 5e-4;

/// Simpson panels per cell when integrating the kernel.
const PANELS: usize = 8;

/// Tail mass below which an unbounded kernel is truncated.
const TAIL_CUTOFF: f64 = 1e-18;

/// Finite union of open intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct Intervals(pub Vec<(f64, f64)>);

impl Intervals {
    pub fn single(a: f64, b: f64) -> Self {
        Intervals(vec![(a, b)])
    }

    /// `{2m - t : t ∈ D}`.
    pub fn reflect(&self, m: f64) -> Self {
        Intervals(self.0.iter().map(|&(a, b)| (2.0 * m - b, 2.0 * m - a)).collect())
    }

    /// `{c - t : t ∈ D}`.
    pub fn mirror_shift(&self, c: f64) -> Self {
        Intervals(self.0.iter().map(|&(a, b)| (c - b, c - a)).collect())
    }

    pub fn contains(&self, x: f64) -> bool {
        self.0.iter().any(|&(a, b)| a < x && x < b)
    }

    pub fn sup(&self) -> f64 {
        self.0.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Masses on the cells `[c - δ/2, c + δ/2]`, `c = origin + iδ`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridLaw {
    pub delta: f64,
    pub origin: f64,
    pub masses: Vec<f64>,
}

impl GridLaw {
    fn center(&self, i: usize) -> f64 {
        self.origin + i as f64 * self.delta
    }

    pub fn total(&self) -> f64 {
        crate::stats::neumaier_sum(self.masses.iter().copied())
    }

    /// Mass of `(a, b)` with each cell spread uniformly.
    pub fn prob_in(&self, a: f64, b: f64) -> f64 {
        if !(a < b) {
            return 0.0;
        }
        let h = 0.5 * self.delta;
        crate::stats::neumaier_sum(self.masses.iter().enumerate().filter(|(_, &m)| m > 0.0).map(|(i, &m)| {
            let c = self.center(i);
            let overlap = (b.min(c + h) - a.max(c - h)).max(0.0);
            m * overlap / self.delta
        }))
    }

    pub fn prob_in_set(&self, d: &Intervals) -> f64 {
        d.0.iter().map(|&(a, b)| self.prob_in(a, b)).sum()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.prob_in(f64::NEG_INFINITY, x)
    }

    /// `P(|φ| ≥ m)`.
    pub fn prob_abs_at_least(&self, m: f64) -> f64 {
        self.prob_in(m, f64::INFINITY) + self.prob_in(f64::NEG_INFINITY, -m)
    }

    pub fn mean(&self) -> f64 {
        crate::stats::neumaier_sum(self.masses.iter().enumerate().map(|(i, &m)| m * self.center(i)))
    }

    /// `height,mass` rows for cells of positive mass.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("height,mass\n");
        for (i, &m) in self.masses.iter().enumerate().filter(|(_, &m)| m > 0.0) {
            let _ = writeln!(out, "{:.10},{m:.17e}", self.center(i));
        }
        out
    }
}

/// Quadrature tables for one surface model on a rooted tree.
#[derive(Debug, Clone)]
pub struct TreeQuadrature {
    potential: Potential,
    root: usize,
    root_height: f64,
    parent: Vec<Option<usize>>,
    delta: f64,
    /// Cells per side of the height box.
    half_cells: usize,
    /// Kernel masses at offsets `-k..=k` cells.
    kernel: Vec<f64>,
    kernel_radius: f64,
    normalizer: f64,
}

fn simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    if !(b > a) {
        return 0.0;
    }
    let n = 2 * panels;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

impl TreeQuadrature {
    /// Box half-width `|V|`, the bound on heights of a 1-Lipschitz surface
    /// pinned on a connected graph.
    pub fn new(model: &SurfaceModel, delta: f64) -> Result<Self> {
        let h = model.graph().vertex_count() as f64;
        Self::with_box(model, delta, h)
    }

    pub fn with_box(model: &SurfaceModel, delta: f64, half_width: f64) -> Result<Self> {
        let g = model.graph();
        if !g.is_tree() {
            return Err(Error::NonTree);
        }
        let root = match g.boundary() {
            [r] => *r,
            b => return Err(Error::NonSingletonBoundary(b.len())),
        };
        if !(delta > 0.0 && delta <= 1e-3) {
            return Err(Error::InvalidParameter(format!("quadrature step must lie in (0, 1e-3], got {delta}")));
        }
        let mut parent = vec![None; g.vertex_count()];
        let mut seen = vec![false; g.vertex_count()];
        let mut stack = vec![root];
        seen[root] = true;
        while let Some(v) = stack.pop() {
            for &(w, _) in g.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some(v);
                    stack.push(w);
                }
            }
        }
        let potential = model.potential().clone();
        let weight = |x: f64| potential.weight(x);
        let radius = match potential.support_radius() {
            Some(r) => r,
            None => {
                let mut r = 1.0;
                while weight(r) > TAIL_CUTOFF {
                    r *= 2.0;
                    if r > 1e6 {
                        return Err(Error::InvalidPotential(format!("{}: kernel does not decay", potential.name())));
                    }
                }
                r
            }
        };
        let k = (radius / delta).ceil() as usize + 1;
        let mut kernel: Vec<f64> = (0..=2 * k)
            .map(|j| {
                let c = (j as f64 - k as f64) * delta;
                let (a, b) = ((c - 0.5 * delta).max(-radius), (c + 0.5 * delta).min(radius));
                simpson(&weight, a, b, PANELS)
            })
            .collect();
        let normalizer = crate::stats::neumaier_sum(kernel.iter().copied());
        if !(normalizer > 0.0 && normalizer.is_finite()) {
            return Err(Error::InvalidPotential(format!("{}: exp(-U) has no mass", potential.name())));
        }
        kernel.iter_mut().for_each(|m| *m /= normalizer);
        let half_cells = (half_width / delta).ceil() as usize;
        Ok(TreeQuadrature {
            potential,
            root,
            root_height: model.pin(root),
            parent,
            delta,
            half_cells,
            kernel,
            kernel_radius: radius,
            normalizer,
        })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    fn point_mass(&self) -> GridLaw {
        let mut masses = vec![0.0; 2 * self.half_cells + 1];
        masses[self.half_cells] = 1.0;
        GridLaw { delta: self.delta, origin: self.root_height - self.half_cells as f64 * self.delta, masses }
    }

    fn convolve(&self, law: &GridLaw) -> GridLaw {
        let n = law.masses.len();
        let k = (self.kernel.len() - 1) / 2;
        let mut out = vec![0.0; n];
        let lo = law.masses.iter().position(|&m| m != 0.0).unwrap_or(0);
        let hi = law.masses.iter().rposition(|&m| m != 0.0).unwrap_or(0);
        for (i, &m) in law.masses.iter().enumerate().take(hi + 1).skip(lo) {
            if m == 0.0 {
                continue;
            }
            let j_lo = k.saturating_sub(i);
            let j_hi = (2 * k).min(n - 1 + k - i);
            for j in j_lo..=j_hi {
                out[i + j - k] += m * self.kernel[j];
            }
        }
        GridLaw { masses: out, ..law.clone() }
    }

    fn root_path(&self, v: usize) -> Vec<usize> {
        let mut path = vec![v];
        let mut x = v;
        while let Some(p) = self.parent[x] {
            path.push(p);
            x = p;
        }
        path.reverse();
        path
    }

    /// Law of `φ_v`.
    pub fn marginal(&self, v: usize) -> GridLaw {
        let mut law = self.point_mass();
        for _ in 1..self.root_path(v).len() {
            law = self.convolve(&law);
        }
        law
    }

    /// Sub-probability law of `φ_v` on the event that every vertex on the
    /// root path, the root and `v` included, is below `m`.
    pub fn survival(&self, v: usize, m: f64) -> GridLaw {
        let mut law = self.point_mass();
        let kill = |law: &mut GridLaw| {
            let h = 0.5 * law.delta;
            for i in 0..law.masses.len() {
                let c = law.center(i);
                let below = ((m - (c - h)) / law.delta).clamp(0.0, 1.0);
                law.masses[i] *= below;
            }
        };
        if self.root_height >= m {
            law.masses.iter_mut().for_each(|x| *x = 0.0);
            return law;
        }
        for _ in 1..self.root_path(v).len() {
            law = self.convolve(&law);
            kill(&mut law);
        }
        law
    }

    /// `P(no path from the root to v stays below m)`.
    pub fn barrier_probability(&self, v: usize, m: f64) -> f64 {
        1.0 - self.survival(v, m).total()
    }

    /// `P(barrier at level m, φ_v ∈ D)`.
    pub fn barrier_joint(&self, v: usize, m: f64, d: &Intervals) -> f64 {
        self.marginal(v).prob_in_set(d) - self.survival(v, m).prob_in_set(d)
    }

    /// `P(|X| ≥ 1 - ε)` for one increment.
    pub fn increment_tail(&self, threshold: f64) -> f64 {
        let w = |x: f64| self.potential.weight(x);
        let r = self.kernel_radius;
        let total = 2.0 * simpson(&w, 0.0, r, 4096);
        2.0 * simpson(&w, threshold.max(0.0), r, 4096) / total
    }

    /// `P(|φ_v - φ_w| ≥ 1 - ε on every listed edge)`; the edges of a tree
    /// carry independent increments.
    pub fn extremal_probability(&self, edges: usize, epsilon: f64) -> f64 {
        self.increment_tail(1.0 - epsilon).powi(edges as i32)
    }

    /// `∫ exp(-U)` as integrated on the grid.
    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    pub fn root(&self) -> usize {
        self.root
    }
}
