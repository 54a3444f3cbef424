use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use surface_threshold::ptmc::{Ladder, ModelSpec, RunProtocol, RunSpec};

use crate::CliError;

/// Contents of a run configuration file.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub mc: Option<McConfig>,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    pub bench: Option<BenchConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Constrained,
    Reference,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McConfig {
    pub model: ModelKind,
    /// Error-rate grid. For the constrained model `p1 = p2 = p` unless overridden.
    pub p: Vec<f64>,
    pub p1: Option<f64>,
    pub p2: Option<f64>,
    pub sizes: Vec<usize>,
    pub ladder: LadderConfig,
    #[serde(default)]
    pub protocol: ProtocolConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LadderConfig {
    pub t_min: f64,
    pub t_max: f64,
    pub n_t: usize,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolConfig {
    pub b: Option<u32>,
    pub test_interval: Option<u64>,
    pub measure_sweeps: Option<u64>,
    pub measure_stride: Option<u64>,
    pub exchange_every: Option<u64>,
    pub samples: Option<usize>,
    pub checkpoint_every: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    #[serde(default = "default_resamples")]
    pub resamples: usize,
    #[serde(default = "default_z")]
    pub z: f64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            resamples: default_resamples(),
            z: default_z(),
        }
    }
}

fn default_resamples() -> usize {
    surface_threshold::analysis::BOOTSTRAP_RESAMPLES
}

fn default_z() -> f64 {
    surface_threshold::analysis::CROSSING_Z
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    pub distances: Vec<usize>,
    pub p: Vec<f64>,
    pub trials: u64,
    #[serde(default = "default_modes")]
    pub modes: Vec<String>,
}

fn default_modes() -> Vec<String> {
    vec!["iid".into(), "correlated".into()]
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    pub fn seed(&self) -> Result<u64, CliError> {
        self.seed
            .ok_or_else(|| CliError::Usage("a master seed is required: set `seed` in the config or pass --seed".into()))
    }

    pub fn mc(&self) -> Result<&McConfig, CliError> {
        self.mc.as_ref().ok_or_else(|| CliError::Usage("config has no [mc] section".into()))
    }

    pub fn bench(&self) -> Result<&BenchConfig, CliError> {
        self.bench.as_ref().ok_or_else(|| CliError::Usage("config has no [bench] section".into()))
    }

    /// Hash of the sections that determine Monte Carlo output.
    pub fn mc_hash(&self) -> Result<String, CliError> {
        Ok(hash_of(&(self.seed()?, self.mc()?)))
    }

    pub fn analysis_hash(&self) -> Result<String, CliError> {
        Ok(hash_of(&(self.seed()?, self.mc()?, &self.analysis)))
    }

    pub fn bench_hash(&self) -> Result<String, CliError> {
        Ok(hash_of(&(self.seed()?, self.bench()?)))
    }
}

fn hash_of<T: Serialize>(value: &T) -> String {
    let json = serde_json::to_string(value).expect("config serialises");
    Sha256::digest(json.as_bytes()).iter().take(8).map(|b| format!("{b:02x}")).collect()
}

impl McConfig {
    pub fn protocol(&self) -> RunProtocol {
        let d = RunProtocol::default();
        let c = &self.protocol;
        RunProtocol {
            b: c.b.unwrap_or(d.b),
            test_interval: c.test_interval.unwrap_or(d.test_interval),
            measure_sweeps: c.measure_sweeps.unwrap_or(d.measure_sweeps),
            measure_stride: c.measure_stride.unwrap_or(d.measure_stride),
            exchange_every: c.exchange_every.unwrap_or(d.exchange_every),
            samples: c.samples.unwrap_or(d.samples),
            checkpoint_every: c.checkpoint_every.unwrap_or(d.checkpoint_every),
        }
    }

    pub fn model_at(&self, p: f64) -> ModelSpec {
        match self.model {
            ModelKind::Constrained => ModelSpec::Constrained {
                p1: self.p1.unwrap_or(p),
                p2: self.p2.unwrap_or(p),
            },
            ModelKind::Reference => ModelSpec::Reference { p },
        }
    }

    /// One run per `(p, L)`, in grid order.
    pub fn runs(&self, seed: u64) -> Result<Vec<(f64, RunSpec)>, CliError> {
        if self.p.is_empty() || self.sizes.is_empty() {
            return Err(CliError::Usage("[mc] needs at least one p and one size".into()));
        }
        let ladder = Ladder::uniform(self.ladder.t_min, self.ladder.t_max, self.ladder.n_t)?;
        let mut runs = Vec::new();
        for &p in &self.p {
            for &l in &self.sizes {
                let spec = RunSpec {
                    model: self.model_at(p),
                    l,
                    ladder: ladder.clone(),
                    protocol: self.protocol(),
                    master_seed: seed,
                };
                spec.validate()?;
                runs.push((p, spec));
            }
        }
        Ok(runs)
    }

    pub fn kind_label(&self) -> &'static str {
        match self.model {
            ModelKind::Constrained => "constrained",
            ModelKind::Reference => "reference",
        }
    }

    pub fn stem(&self, p: f64, l: usize) -> String {
        format!("{}_p{p}_L{l}", self.kind_label())
    }
}
