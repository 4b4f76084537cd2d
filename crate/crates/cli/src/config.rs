//! Flat TOML experiment configuration.
//!
//! ```toml
//! schema_version = 1
//! mode = "multigan"          # onegan | multigan
//! backend = "neural"         # stub | neural
//! weights_horizontal = "weights/horizontal.bin"
//! # ... one weights_<type> key per segment type, or weights_onegan
//! mu = 100
//! generations = 300
//! seed = 1
//! runs = 30
//! output_dir = "runs/multigan"
//! ```
//!
//! Relative paths are resolved against the config file's directory.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use levelgan::corpus::SuiteMode;
use levelgan::generator::{NeuralGenerator, SegmentGenerator};
use levelgan::{Error, EvolutionConfig, GeneratorSuite, Result, SegmentType};
use serde::Deserialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    #[default]
    Stub,
    Neural,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    schema_version: u32,
    mode: SuiteMode,
    #[serde(default)]
    backend: Backend,
    weights_onegan: Option<PathBuf>,
    weights_horizontal: Option<PathBuf>,
    weights_up: Option<PathBuf>,
    weights_down: Option<PathBuf>,
    weights_upper_left: Option<PathBuf>,
    weights_upper_right: Option<PathBuf>,
    weights_lower_left: Option<PathBuf>,
    weights_lower_right: Option<PathBuf>,
    #[serde(default = "one")]
    runs: usize,
    output_dir: Option<PathBuf>,
    jobs: Option<usize>,
    mu: Option<usize>,
    lambda: Option<usize>,
    generations: Option<usize>,
    crossover_rate: Option<f64>,
    mutation_rate: Option<f64>,
    eta: Option<f64>,
    seed: Option<u64>,
    jump_budget: Option<u8>,
}

impl RawConfig {
    fn evolution(&self) -> EvolutionConfig {
        let d = EvolutionConfig::default();
        EvolutionConfig {
            mu: self.mu.unwrap_or(d.mu),
            lambda: self.lambda.unwrap_or(d.lambda),
            generations: self.generations.unwrap_or(d.generations),
            crossover_rate: self.crossover_rate.unwrap_or(d.crossover_rate),
            mutation_rate: self.mutation_rate.unwrap_or(d.mutation_rate),
            eta: self.eta.unwrap_or(d.eta),
            seed: self.seed.unwrap_or(d.seed),
            jump_budget: self.jump_budget.unwrap_or(d.jump_budget),
        }
    }
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub mode: SuiteMode,
    pub backend: Backend,
    /// Weight file per training-set key (`onegan` or a segment type key).
    pub weights: BTreeMap<String, PathBuf>,
    pub runs: usize,
    pub output_dir: PathBuf,
    pub jobs: Option<usize>,
    pub evolution: EvolutionConfig,
}

impl ExperimentConfig {
    pub fn stub(mode: SuiteMode) -> Self {
        ExperimentConfig {
            mode,
            backend: Backend::Stub,
            weights: BTreeMap::new(),
            runs: 1,
            output_dir: PathBuf::from("runs"),
            jobs: None,
            evolution: EvolutionConfig::default(),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        if raw.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                raw.schema_version
            )));
        }
        let evolution = raw.evolution();
        evolution.validate()?;
        if raw.runs == 0 {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        let resolve = |p: PathBuf| if p.is_absolute() { p } else { base.join(p) };
        let typed = [
            (SegmentType::Horizontal, raw.weights_horizontal),
            (SegmentType::Up, raw.weights_up),
            (SegmentType::Down, raw.weights_down),
            (SegmentType::UpperLeft, raw.weights_upper_left),
            (SegmentType::UpperRight, raw.weights_upper_right),
            (SegmentType::LowerLeft, raw.weights_lower_left),
            (SegmentType::LowerRight, raw.weights_lower_right),
        ];
        let mut weights = BTreeMap::new();
        if let Some(p) = raw.weights_onegan {
            weights.insert("onegan".to_string(), resolve(p));
        }
        for (t, p) in typed {
            if let Some(p) = p {
                weights.insert(t.key().to_string(), resolve(p));
            }
        }
        if raw.backend == Backend::Neural {
            match raw.mode {
                SuiteMode::OneGan if !weights.contains_key("onegan") => {
                    return Err(Error::Config("onegan neural backend needs weights_onegan".into()))
                }
                SuiteMode::MultiGan => {
                    let missing: Vec<String> = SegmentType::ALL
                        .iter()
                        .filter(|t| !weights.contains_key(t.key()))
                        .map(|t| format!("weights_{}", t.key()))
                        .collect();
                    if !missing.is_empty() {
                        return Err(Error::Config(format!(
                            "multigan neural backend needs seven weight paths; missing {}",
                            missing.join(", ")
                        )));
                    }
                }
                _ => {}
            }
        }
        Ok(ExperimentConfig {
            mode: raw.mode,
            backend: raw.backend,
            weights,
            runs: raw.runs,
            output_dir: resolve(raw.output_dir.unwrap_or_else(|| PathBuf::from("runs"))),
            jobs: raw.jobs,
            evolution,
        })
    }

    /// Loads every weight file up front so that bad weights fail before any
    /// evolution starts.
    pub fn suite(&self) -> Result<GeneratorSuite> {
        match (self.backend, self.mode) {
            (Backend::Stub, mode) => Ok(GeneratorSuite::stub(mode)),
            (Backend::Neural, SuiteMode::OneGan) => {
                let g = NeuralGenerator::load(&self.weights["onegan"])?;
                Ok(GeneratorSuite::one(Arc::new(g)))
            }
            (Backend::Neural, SuiteMode::MultiGan) => {
                let mut map: BTreeMap<SegmentType, Arc<dyn SegmentGenerator>> = BTreeMap::new();
                for t in SegmentType::ALL {
                    let g = NeuralGenerator::load(&self.weights[t.key()])?;
                    map.insert(t, Arc::new(g));
                }
                GeneratorSuite::multi(map)
            }
        }
    }
}
