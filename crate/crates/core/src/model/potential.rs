//! Height-difference potentials for random surfaces and inner-product
//! potentials for spin models.
//!
//! `f64::INFINITY` is the +∞ sentinel; `exp(-∞)` evaluates to exactly 0.
//! Declared flags are spot-checked on a grid by [`Potential::validate`];
//! they cannot be proven for black-box functions.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};

/// Grid used to spot-check potential flags.
pub const PROBE_STEP: f64 = 1e-3;
pub const PROBE_RANGE: f64 = 3.0;

/// Families with closed-form conditionals; everything else is `General`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialKind {
    Hammock,
    QuadraticLipschitz,
    Quadratic,
    General,
}

#[derive(Clone)]
enum Shape {
    Hammock,
    QuadraticLipschitz,
    Quadratic,
    /// Piecewise linear through `(x, U(x))`, `x ≥ 0` sorted; +∞ beyond the table.
    Tabulated {
        xs: Vec<f64>,
        us: Vec<f64>,
    },
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

/// A symmetric potential `U: ℝ → (-∞, ∞]`.
#[derive(Clone)]
pub struct Potential {
    name: String,
    shape: Shape,
    monotone: bool,
    lipschitz_support: bool,
    convex: bool,
    /// `U = ∞` beyond this radius, when known.
    support_radius: Option<f64>,
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Potential")
            .field("name", &self.name)
            .field("monotone", &self.monotone)
            .field("lipschitz_support", &self.lipschitz_support)
            .field("convex", &self.convex)
            .finish()
    }
}

impl Potential {
    /// `0` on `[-1, 1]`, `∞` outside: the uniform Lipschitz surface.
    pub fn hammock() -> Self {
        Potential {
            name: "hammock".into(),
            shape: Shape::Hammock,
            monotone: true,
            lipschitz_support: true,
            convex: true,
            support_radius: Some(1.0),
        }
    }

    /// `x²` on `[-1, 1]`, `∞` outside.
    pub fn quadratic_lipschitz() -> Self {
        Potential {
            name: "quadratic_lipschitz".into(),
            shape: Shape::QuadraticLipschitz,
            monotone: true,
            lipschitz_support: true,
            convex: true,
            support_radius: Some(1.0),
        }
    }

    /// `x²` everywhere. Unbounded support, so the caller attests that the
    /// partition function is finite on the graph it is used with.
    pub fn quadratic() -> Self {
        Potential {
            name: "quadratic".into(),
            shape: Shape::Quadratic,
            monotone: true,
            lipschitz_support: false,
            convex: true,
            support_radius: None,
        }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "hammock" => Ok(Self::hammock()),
            "quadratic_lipschitz" => Ok(Self::quadratic_lipschitz()),
            "quadratic" => Ok(Self::quadratic()),
            other => Err(Error::InvalidPotential(format!("unknown potential {other:?}"))),
        }
    }

    /// Piecewise-linear potential through `points = [(x, U(x))]` with
    /// `x ≥ 0`, extended symmetrically and set to `∞` past the last point.
    /// When `monotone` is requested the values are clamped to their running
    /// maximum so that interpolation cannot introduce dips.
    pub fn tabulated(name: &str, points: &[(f64, f64)], monotone: bool) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidPotential("empty table".into()));
        }
        let mut pts = points.to_vec();
        if pts.iter().any(|&(x, u)| !(x >= 0.0) || x.is_infinite() || u.is_nan() || u == f64::NEG_INFINITY) {
            return Err(Error::InvalidPotential("table needs finite x ≥ 0 and U > -∞".into()));
        }
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        if pts.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidPotential("duplicate x in table".into()));
        }
        let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
        let mut us: Vec<f64> = pts.iter().map(|p| p.1).collect();
        if monotone {
            for i in 1..us.len() {
                us[i] = us[i].max(us[i - 1]);
            }
        }
        let last_finite = xs.iter().zip(&us).filter(|(_, u)| u.is_finite()).map(|(x, _)| *x).next_back();
        let radius = last_finite.unwrap_or(0.0);
        let convex = {
            let finite: Vec<(f64, f64)> =
                xs.iter().cloned().zip(us.iter().cloned()).filter(|p| p.1.is_finite()).collect();
            // symmetric extension is convex iff slopes are non-decreasing and the first slope is ≥ 0
            let slopes: Vec<f64> = finite.windows(2).map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0)).collect();
            xs[0] == 0.0 && slopes.first().is_none_or(|&s| s >= 0.0) && slopes.windows(2).all(|w| w[1] >= w[0] - 1e-12)
        };
        Ok(Potential {
            name: name.into(),
            shape: Shape::Tabulated { xs, us },
            monotone: monotone || pts.windows(2).all(|w| w[1].1 >= w[0].1),
            lipschitz_support: radius <= 1.0,
            convex,
            support_radius: Some(radius),
        })
    }

    /// Reads a two-column CSV of `x, U(x)` rows (optional header; `inf`
    /// accepted for `U`).
    pub fn from_csv(path: impl AsRef<Path>, monotone: bool) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let mut points = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            if cols.len() != 2 {
                return Err(Error::Parse(format!("{}:{}: expected two columns", path.display(), i + 1)));
            }
            match (cols[0].parse::<f64>(), cols[1].parse::<f64>()) {
                (Ok(x), Ok(u)) => points.push((x, u)),
                _ if i == 0 => continue,
                _ => return Err(Error::Parse(format!("{}:{}: bad number", path.display(), i + 1))),
            }
        }
        let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "tabulated".into());
        Self::tabulated(&name, &points, monotone)
    }

    /// Arbitrary potential given as a function of `|x|`, with declared flags.
    pub fn custom(
        name: &str,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        monotone: bool,
        lipschitz_support: bool,
        convex: bool,
    ) -> Self {
        Potential {
            name: name.into(),
            shape: Shape::Custom(Arc::new(f)),
            monotone,
            lipschitz_support,
            convex,
            support_radius: if lipschitz_support { Some(1.0) } else { None },
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_monotone(&self) -> bool {
        self.monotone
    }

    pub fn is_lipschitz_support(&self) -> bool {
        self.lipschitz_support
    }

    pub fn is_convex(&self) -> bool {
        self.convex
    }

    pub fn kind(&self) -> PotentialKind {
        match self.shape {
            Shape::Hammock => PotentialKind::Hammock,
            Shape::QuadraticLipschitz => PotentialKind::QuadraticLipschitz,
            Shape::Quadratic => PotentialKind::Quadratic,
            _ => PotentialKind::General,
        }
    }

    /// Minimum of `U` over the probe grid on `[0, support radius]`, or on
    /// `[0, PROBE_RANGE]` when the support is unbounded.
    pub fn probe_minimum(&self) -> f64 {
        let r = self.support_radius.unwrap_or(PROBE_RANGE);
        let n = (r / PROBE_STEP).ceil() as usize;
        (0..=n).map(|i| self.eval((i as f64 * PROBE_STEP).min(r))).fold(f64::INFINITY, f64::min)
    }

    pub fn support_radius(&self) -> Option<f64> {
        self.support_radius
    }

    pub fn eval(&self, x: f64) -> f64 {
        let x = x.abs();
        match &self.shape {
            Shape::Hammock => {
                if x <= 1.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            Shape::QuadraticLipschitz => {
                if x <= 1.0 {
                    x * x
                } else {
                    f64::INFINITY
                }
            }
            Shape::Quadratic => x * x,
            Shape::Tabulated { xs, us } => interpolate(xs, us, x),
            Shape::Custom(f) => f(x),
        }
    }

    /// `exp(-U(x))`, exactly 0 where `U = ∞`.
    pub fn weight(&self, x: f64) -> f64 {
        let u = self.eval(x);
        if u == f64::INFINITY {
            0.0
        } else {
            (-u).exp()
        }
    }

    /// Spot-checks symmetry, finiteness and the declared flags on the probe grid.
    pub fn validate(&self) -> Result<()> {
        let n = (PROBE_RANGE / PROBE_STEP).round() as i64;
        let grid: Vec<f64> = (-n..=n).map(|i| i as f64 * PROBE_STEP).collect();
        let vals: Vec<f64> = grid.iter().map(|&x| self.eval(x)).collect();
        if vals.iter().any(|u| u.is_nan() || *u == f64::NEG_INFINITY) {
            return Err(Error::InvalidPotential(format!("{}: NaN or -∞ value", self.name)));
        }
        if !vals.iter().any(|u| u.is_finite()) {
            return Err(Error::InvalidPotential(format!("{}: nowhere finite on probe grid", self.name)));
        }
        for (i, &x) in grid.iter().enumerate() {
            let (a, b) = (vals[i], self.eval(-x));
            if a != b && !(a.is_infinite() && b.is_infinite()) {
                return Err(Error::InvalidPotential(format!("{}: asymmetric at {x}", self.name)));
            }
        }
        let nonneg = &vals[n as usize..];
        let xs = &grid[n as usize..];
        if self.monotone {
            if let Some(w) = nonneg.windows(2).position(|w| w[1] < w[0]) {
                return Err(Error::InvalidPotential(format!("{}: not monotone near {}", self.name, xs[w])));
            }
        }
        if self.lipschitz_support {
            if let Some((x, _)) = xs.iter().zip(nonneg).find(|(&x, u)| x > 1.0 + 1e-12 && u.is_finite()) {
                return Err(Error::InvalidPotential(format!("{}: finite beyond 1 at {x}", self.name)));
            }
        }
        if self.convex {
            for w in vals.windows(3) {
                if w.iter().all(|u| u.is_finite()) && w[0] + w[2] - 2.0 * w[1] < -1e-9 {
                    return Err(Error::InvalidPotential(format!("{}: not convex", self.name)));
                }
            }
        }
        Ok(())
    }

    /// Draws `t ≥ gradient` from the Stieltjes measure `-d exp(-U(t))`
    /// conditioned on `t > gradient`, by the generalized inverse of the
    /// non-increasing map `s ↦ exp(-U(s))`.
    pub fn sample_radius<R: Rng + ?Sized>(&self, gradient: f64, rng: &mut R) -> Result<f64> {
        if !self.monotone {
            return Err(Error::InvalidPotential(format!("{}: radius sampling needs a monotone potential", self.name)));
        }
        let g = gradient.abs();
        let top = self.weight(g);
        if top <= 0.0 {
            return Err(Error::ZeroDensity(format!("exp(-U({g})) = 0 for potential {}", self.name)));
        }
        // u in (0, top]
        let u = top * (1.0 - rng.random::<f64>());
        Ok(self.inverse_weight(u, g))
    }

    /// `inf { s ≥ from : exp(-U(s)) ≤ u }` for `u ∈ (0, exp(-U(from))]`.
    fn inverse_weight(&self, u: f64, from: f64) -> f64 {
        match &self.shape {
            Shape::Hammock => from.max(1.0),
            Shape::QuadraticLipschitz => (-u.ln()).sqrt().clamp(from, 1.0),
            Shape::Quadratic => (-u.ln()).sqrt().max(from),
            _ => {
                if self.weight(from) <= u {
                    return from;
                }
                let mut lo = from;
                let mut hi = self.support_radius.map(|r| r.max(from) + 1.0).unwrap_or(from + 1.0);
                while self.weight(hi) > u {
                    lo = hi;
                    hi *= 2.0;
                    if hi > 1e12 {
                        return hi;
                    }
                }
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if self.weight(mid) > u {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                hi
            }
        }
    }
}

fn interpolate(xs: &[f64], us: &[f64], x: f64) -> f64 {
    let last = *xs.last().unwrap();
    if x > last {
        return f64::INFINITY;
    }
    if x <= xs[0] {
        return us[0];
    }
    let i = xs.partition_point(|&p| p < x);
    if xs[i] == x {
        return us[i];
    }
    let (x0, x1, u0, u1) = (xs[i - 1], xs[i], us[i - 1], us[i]);
    if u0.is_infinite() || u1.is_infinite() {
        return f64::INFINITY;
    }
    u0 + (u1 - u0) * (x - x0) / (x1 - x0)
}

#[derive(Clone)]
enum SpinShape {
    Linear { beta: f64 },
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

/// A potential `U: [-1, 1] → (-∞, ∞]` of the inner product of neighboring spins.
#[derive(Clone)]
pub struct SpinPotential {
    name: String,
    shape: SpinShape,
    non_increasing: bool,
}

impl fmt::Debug for SpinPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpinPotential").field("name", &self.name).field("non_increasing", &self.non_increasing).finish()
    }
}

impl SpinPotential {
    /// `U(r) = -β r`, the standard model at inverse temperature `β`.
    pub fn linear(beta: f64) -> Result<Self> {
        if !beta.is_finite() {
            return Err(Error::InvalidParameter(format!("beta must be finite, got {beta}")));
        }
        Ok(SpinPotential {
            name: format!("linear_spin({beta})"),
            shape: SpinShape::Linear { beta },
            non_increasing: beta >= 0.0,
        })
    }

    pub fn custom(name: &str, f: impl Fn(f64) -> f64 + Send + Sync + 'static, non_increasing: bool) -> Self {
        SpinPotential { name: name.into(), shape: SpinShape::Custom(Arc::new(f)), non_increasing }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_non_increasing(&self) -> bool {
        self.non_increasing
    }

    pub fn beta(&self) -> Option<f64> {
        match self.shape {
            SpinShape::Linear { beta } => Some(beta),
            SpinShape::Custom(_) => None,
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        let r = r.clamp(-1.0, 1.0);
        match &self.shape {
            SpinShape::Linear { beta } => -beta * r,
            SpinShape::Custom(f) => f(r),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = (1.0 / PROBE_STEP).round() as i64;
        let vals: Vec<f64> = (-n..=n).map(|i| self.eval(i as f64 * PROBE_STEP)).collect();
        if vals.iter().any(|u| u.is_nan() || *u == f64::NEG_INFINITY) {
            return Err(Error::InvalidPotential(format!("{}: NaN or -∞ value", self.name)));
        }
        if self.non_increasing && vals.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::InvalidPotential(format!("{}: declared non-increasing but increases", self.name)));
        }
        Ok(())
    }
}
