use std::path::{Path, PathBuf};

use cluster_reflect::graph::{Graph, GridBoundary};
use cluster_reflect::model::{DiscreteModel, MarkovChain, Potential, SpinModel, SpinPotential, SurfaceModel};
use cluster_reflect::reflection::{Permutation, SurfaceWindow, UniformAxis};
use cluster_reflect::samplers::{ChainSettings, MoveKind};
use cluster_reflect::verify::{transpositions, ExtremalSpec};
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub model: Option<ModelConfig>,
    #[serde(default)]
    pub sampler: Option<SamplerConfig>,
    #[serde(default, rename = "check")]
    pub checks: Vec<CheckConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelConfig {
    Potts {
        graph: GraphConfig,
        #[serde(default)]
        boundary: Option<Vec<usize>>,
        q: usize,
        beta: f64,
        #[serde(default)]
        reflection: Option<DiscreteReflection>,
    },
    Surface {
        graph: GraphConfig,
        #[serde(default)]
        boundary: Option<Vec<usize>>,
        potential: String,
        #[serde(default)]
        pins: Option<Vec<f64>>,
        /// Required for potentials without Lipschitz support.
        #[serde(default)]
        attest_finite: bool,
        #[serde(default = "default_window")]
        window: f64,
    },
    Spin {
        graph: GraphConfig,
        #[serde(default)]
        boundary: Option<Vec<usize>>,
        n: usize,
        beta: f64,
    },
    Markov {
        states: usize,
        steps: usize,
        #[serde(default)]
        start: usize,
        #[serde(default)]
        reflection: Option<DiscreteReflection>,
    },
}

fn default_window() -> f64 {
    3.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GraphConfig {
    Path {
        n: usize,
    },
    Cycle {
        n: usize,
    },
    Complete {
        n: usize,
    },
    Grid {
        width: usize,
        height: usize,
        #[serde(default)]
        frame: bool,
    },
    Edges {
        vertices: usize,
        edges: Vec<(usize, usize)>,
    },
    EdgeList {
        file: PathBuf,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DiscreteReflection {
    /// The identity and every transposition of two states.
    Transpositions {},
    /// `a ↦ -a mod q`.
    Negation {},
    Permutations {
        tables: Vec<Vec<usize>>,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerConfig {
    pub burn_in_sweeps: usize,
    #[serde(default = "one")]
    pub thinning: usize,
    /// Draws per replica.
    pub n_samples: usize,
    #[serde(default = "single_site_mix")]
    pub move_mix: Vec<(MoveKind, f64)>,
    #[serde(default = "default_step")]
    pub proposal_step: f64,
    #[serde(default = "default_replicas")]
    pub replicas: usize,
}

fn one() -> usize {
    1
}

fn single_site_mix() -> Vec<(MoveKind, f64)> {
    vec![(MoveKind::SingleSite, 1.0)]
}

fn default_step() -> f64 {
    0.5
}

fn default_replicas() -> usize {
    4
}

impl SamplerConfig {
    pub fn settings(&self, seed: u64) -> ChainSettings {
        let mut s = ChainSettings::new(self.burn_in_sweeps, self.thinning, self.n_samples, seed, self.move_mix.clone());
        s.proposal_step = self.proposal_step;
        s
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CheckConfig {
    /// Exact flip invariance over the fixed Ising/Potts list on K3 and P4.
    ExactFlipGrid {},
    /// Exact flip invariance of the configured discrete model.
    FlipExact {},
    ComplementExact {},
    /// Passes when the exact check detects a reflection that does not
    /// preserve the site measure.
    AsymmetricControl {},
    MarkovReflection {},
    Extremal {
        edges: Vec<(usize, usize)>,
        epsilon: f64,
        /// Overrides the exponent of the tree target `ε^k`.
        #[serde(default)]
        expected_exponent: Option<i32>,
    },
    ExtremalTrends {
        edges: Vec<(usize, usize)>,
        epsilons: Vec<f64>,
    },
    Barrier {
        vertex: usize,
        level: f64,
        /// Compare the three probabilities with tree quadrature.
        #[serde(default)]
        oracle: bool,
        #[serde(default)]
        generalized: Option<Vec<(f64, f64)>>,
    },
    SpinDensity {
        vertex: usize,
        bins: usize,
    },
    IsingK3Exact {
        beta: f64,
    },
    SurfaceDensity {
        vertex: usize,
        bins: usize,
    },
    ClusterSides {},
    FlipKs {
        vertices: Vec<usize>,
        #[serde(default = "default_alpha")]
        alpha: f64,
    },
    Mixture {
        vertices: Vec<usize>,
        cdf_vertex: usize,
        #[serde(default)]
        cdf_points: Vec<f64>,
        #[serde(default = "one")]
        inner_sweeps: usize,
        #[serde(default = "default_alpha")]
        alpha: f64,
    },
}

fn default_alpha() -> f64 {
    1e-3
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default)]
    pub samples: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: default_dir(), samples: false }
    }
}

fn default_dir() -> PathBuf {
    PathBuf::from("out")
}

/// Rejected before any sampling or enumeration starts.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

impl From<cluster_reflect::Error> for ConfigError {
    fn from(e: cluster_reflect::Error) -> Self {
        ConfigError(e.to_string())
    }
}

pub fn parse(text: &str) -> Result<ExperimentConfig, ConfigError> {
    toml::from_str(text).map_err(|e| ConfigError(e.to_string()))
}

pub fn load(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    let mut config = parse(&text)?;
    if let Some(dir) = path.parent() {
        config.resolve_paths(dir);
    }
    Ok(config)
}

pub enum Built {
    Empty,
    Potts { model: DiscreteModel, taus: Vec<Permutation> },
    Markov { chain: MarkovChain, taus: Vec<Permutation> },
    Surface { model: SurfaceModel, law: SurfaceWindow },
    Spin { model: SpinModel, law: UniformAxis },
}

impl Built {
    pub fn family(&self) -> &'static str {
        match self {
            Built::Empty => "none",
            Built::Potts { .. } => "potts",
            Built::Markov { .. } => "markov",
            Built::Surface { .. } => "surface",
            Built::Spin { .. } => "spin",
        }
    }

    pub fn vertex_count(&self) -> usize {
        use cluster_reflect::model::Model;
        match self {
            Built::Empty => 0,
            Built::Potts { model, .. } => model.graph().vertex_count(),
            Built::Markov { chain, .. } => chain.model().graph().vertex_count(),
            Built::Surface { model, .. } => model.graph().vertex_count(),
            Built::Spin { model, .. } => model.graph().vertex_count(),
        }
    }
}

fn build_graph(g: &GraphConfig, boundary: &Option<Vec<usize>>) -> Result<Graph, ConfigError> {
    let graph = match g {
        GraphConfig::Path { n } => Graph::path(*n),
        GraphConfig::Cycle { n } => Graph::cycle(*n)?,
        GraphConfig::Complete { n } => Graph::complete(*n),
        GraphConfig::Grid { width, height, frame } => {
            Graph::grid(*width, *height, if *frame { GridBoundary::Frame } else { GridBoundary::None })
        }
        GraphConfig::Edges { vertices, edges } => Graph::new(*vertices, edges, &[])?,
        GraphConfig::EdgeList { file } => Graph::load_edge_list(file)?,
    };
    if graph.vertex_count() == 0 {
        return Err(ConfigError("graph has no vertices".into()));
    }
    Ok(match boundary {
        Some(b) => graph.with_boundary(b)?,
        None => graph,
    })
}

fn build_taus(q: usize, r: &Option<DiscreteReflection>) -> Result<Vec<Permutation>, ConfigError> {
    Ok(match r {
        None | Some(DiscreteReflection::Transpositions {}) => transpositions(q),
        Some(DiscreteReflection::Negation {}) => vec![Permutation::new((0..q).map(|a| (q - a) % q).collect())?],
        Some(DiscreteReflection::Permutations { tables }) => {
            if tables.is_empty() {
                return Err(ConfigError("reflection.tables is empty".into()));
            }
            let taus = tables.iter().map(|t| Permutation::new(t.clone())).collect::<Result<Vec<_>, _>>()?;
            if let Some(t) = taus.iter().find(|t| t.states() != q) {
                return Err(ConfigError(format!("permutation on {} states for a model with {q}", t.states())));
            }
            taus
        }
    })
}

impl ExperimentConfig {
    fn resolve_paths(&mut self, dir: &Path) {
        let graph = match &mut self.model {
            Some(
                ModelConfig::Potts { graph, .. } | ModelConfig::Surface { graph, .. } | ModelConfig::Spin { graph, .. },
            ) => graph,
            _ => return,
        };
        if let GraphConfig::EdgeList { file } = graph {
            if file.is_relative() {
                *file = dir.join(&*file);
            }
        }
    }

    pub fn label(&self) -> String {
        self.name.clone().unwrap_or_else(|| "experiment".into())
    }

    pub fn build(&self) -> Result<Built, ConfigError> {
        let Some(m) = &self.model else { return Ok(Built::Empty) };
        Ok(match m {
            ModelConfig::Potts { graph, boundary, q, beta, reflection } => {
                let g = build_graph(graph, boundary)?;
                let model = cluster_reflect::model::potts_model(&g, *q, *beta)?.with_boundary(g.boundary())?;
                Built::Potts { model, taus: build_taus(*q, reflection)? }
            }
            ModelConfig::Markov { states, steps, start, reflection } => {
                let chain = MarkovChain::lazy_cycle_walk(*states, *start, *steps)?;
                Built::Markov { chain, taus: build_taus(*states, reflection)? }
            }
            ModelConfig::Surface { graph, boundary, potential, pins, attest_finite, window } => {
                let g = build_graph(graph, boundary)?;
                let u = Potential::by_name(potential)?;
                let mut model =
                    if *attest_finite { SurfaceModel::new_attested(g, u)? } else { SurfaceModel::new(g, u)? };
                if let Some(p) = pins {
                    model = model.with_pins(p)?;
                }
                Built::Surface { model, law: SurfaceWindow::new(*window)? }
            }
            ModelConfig::Spin { graph, boundary, n, beta } => {
                let g = build_graph(graph, boundary)?;
                Built::Spin { model: SpinModel::new(g, *n, SpinPotential::linear(*beta)?)?, law: UniformAxis::new(*n)? }
            }
        })
    }

    /// Family, vertex and sampler requirements of every check against the
    /// built model.
    pub fn validate(&self, built: &Built) -> Result<(), ConfigError> {
        if self.checks.is_empty() && !self.output.samples {
            return Err(ConfigError("no checks configured and samples output disabled".into()));
        }
        if self.output.samples && (self.sampler.is_none() || matches!(built, Built::Empty | Built::Markov { .. })) {
            return Err(ConfigError("samples output needs a sampled model family and a [sampler] block".into()));
        }
        if let Some(s) = &self.sampler {
            s.settings(self.seed).validate()?;
            if s.replicas < 1 {
                return Err(ConfigError("sampler.replicas must be at least 1".into()));
            }
        }
        let nv = built.vertex_count();
        let vertex = |v: usize| -> Result<(), ConfigError> {
            if v < nv {
                Ok(())
            } else {
                Err(ConfigError(format!("vertex {v} out of range for a graph with {nv} vertices")))
            }
        };
        for (i, c) in self.checks.iter().enumerate() {
            let (families, sampled): (&[&str], bool) = match c {
                CheckConfig::ExactFlipGrid {}
                | CheckConfig::AsymmetricControl {}
                | CheckConfig::IsingK3Exact { .. } => (&[], false),
                CheckConfig::FlipExact {} | CheckConfig::ComplementExact {} => (&["potts"], false),
                CheckConfig::MarkovReflection {} => (&["markov"], false),
                CheckConfig::Extremal { .. }
                | CheckConfig::ExtremalTrends { .. }
                | CheckConfig::Barrier { .. }
                | CheckConfig::SurfaceDensity { .. }
                | CheckConfig::Mixture { .. } => (&["surface"], true),
                CheckConfig::SpinDensity { .. } => (&["spin"], true),
                CheckConfig::ClusterSides {} | CheckConfig::FlipKs { .. } => (&["surface", "spin"], true),
            };
            if !families.is_empty() && !families.contains(&built.family()) {
                return Err(ConfigError(format!(
                    "check {i} needs a model of family {}, found {}",
                    families.join(" or "),
                    built.family()
                )));
            }
            if sampled && self.sampler.is_none() {
                return Err(ConfigError(format!("check {i} needs a [sampler] block")));
            }
            match c {
                CheckConfig::Extremal { edges, epsilon, .. } => {
                    ExtremalSpec::new(edges.clone(), *epsilon)?;
                    edges.iter().try_for_each(|&(a, b)| vertex(a).and(vertex(b)))?;
                }
                CheckConfig::ExtremalTrends { edges, epsilons } => {
                    if epsilons.is_empty() {
                        return Err(ConfigError(format!("check {i}: epsilons is empty")));
                    }
                    for &e in epsilons {
                        ExtremalSpec::new(edges.clone(), e)?;
                    }
                    edges.iter().try_for_each(|&(a, b)| vertex(a).and(vertex(b)))?;
                }
                CheckConfig::Barrier { vertex: v, level, generalized, .. } => {
                    vertex(*v)?;
                    if !(*level >= 0.0 && level.is_finite()) {
                        return Err(ConfigError(format!("check {i}: level must be finite and non-negative")));
                    }
                    if let Some(d) = generalized {
                        if d.iter().any(|&(a, b)| !(a < b)) {
                            return Err(ConfigError(format!("check {i}: generalized intervals need a < b")));
                        }
                    }
                }
                CheckConfig::SpinDensity { vertex: v, bins } | CheckConfig::SurfaceDensity { vertex: v, bins } => {
                    vertex(*v)?;
                    if *bins < 2 {
                        return Err(ConfigError(format!("check {i}: need at least 2 bins")));
                    }
                }
                CheckConfig::FlipKs { vertices, alpha } => {
                    vertices.iter().try_for_each(|&v| vertex(v))?;
                    check_alpha(i, *alpha)?;
                }
                CheckConfig::Mixture { vertices, cdf_vertex, alpha, inner_sweeps, .. } => {
                    vertices.iter().chain([cdf_vertex]).try_for_each(|&v| vertex(v))?;
                    check_alpha(i, *alpha)?;
                    if *inner_sweeps < 1 {
                        return Err(ConfigError(format!("check {i}: inner_sweeps must be at least 1")));
                    }
                }
                CheckConfig::IsingK3Exact { beta } if !beta.is_finite() => {
                    return Err(ConfigError(format!("check {i}: beta must be finite")));
                }
                _ => {}
            }
        }
        Ok(())
    }
}

fn check_alpha(i: usize, alpha: f64) -> Result<(), ConfigError> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(ConfigError(format!("check {i}: alpha must lie in (0, 1)")))
    }
}
