//! Experiment configuration: a TOML file describing which experiment to
//! run, over which graphs, against which backend. Secrets never appear in
//! the file; HTTP backends name an environment variable instead.

use crate::bench::Task;
use crate::error::{Error, Result};
use crate::llm::{Backend, HttpProviderConfig, ProviderKind};
use crate::prompts::{Modality, Technique};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    /// Full modality comparison: 5 modalities x Std/CoT x Zero/Few x 4 tasks.
    Exp1,
    /// SoAL added, image-only modalities: SlV/OrV x Std/SoAL/CoT x shots.
    Exp2,
    /// Improved drawings, ShPa only: SlV/I-SlV/SlM/I-SlM.
    Exp3,
}

impl ExperimentKind {
    pub fn allowed_tasks(self) -> Vec<Task> {
        match self {
            ExperimentKind::Exp1 | ExperimentKind::Exp2 => Task::ALL.to_vec(),
            ExperimentKind::Exp3 => vec![Task::ShPa],
        }
    }

    pub fn allowed_modalities(self) -> Vec<Modality> {
        match self {
            ExperimentKind::Exp1 => Modality::BASE.to_vec(),
            ExperimentKind::Exp2 => vec![Modality::SlV, Modality::OrV],
            ExperimentKind::Exp3 => {
                vec![Modality::SlV, Modality::ISlV, Modality::SlM, Modality::ISlM]
            }
        }
    }

    pub fn allowed_techniques(self) -> Vec<Technique> {
        match self {
            ExperimentKind::Exp1 | ExperimentKind::Exp3 => Technique::BASE.to_vec(),
            ExperimentKind::Exp2 => Technique::WITH_SOAL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorKind {
    Gnp,
    PlantedClique,
    ControlledVc,
}

/// One source of benchmark graphs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BenchSource {
    /// Seeded generators; graphs are produced at run time.
    Generated {
        name: String,
        generator: GeneratorKind,
        count: usize,
        seed: u64,
        #[serde(default)]
        n: Option<usize>,
        #[serde(default)]
        p: Option<f64>,
        #[serde(default)]
        k: Option<usize>,
        #[serde(default)]
        k_range: Option<(usize, usize)>,
        #[serde(default)]
        vc_target: Option<usize>,
        #[serde(default)]
        vc_targets: Option<Vec<usize>>,
        #[serde(default)]
        tasks: Option<Vec<String>>,
    },
    /// A benchmark manifest on disk (see `gen-bench`).
    Manifest {
        path: String,
        #[serde(default)]
        tasks: Option<Vec<String>>,
    },
    /// Loose graph files.
    Files {
        name: String,
        paths: Vec<String>,
        format: String,
        #[serde(default)]
        tasks: Option<Vec<String>>,
    },
}

impl BenchSource {
    pub fn tasks_filter(&self) -> &Option<Vec<String>> {
        match self {
            BenchSource::Generated { tasks, .. }
            | BenchSource::Manifest { tasks, .. }
            | BenchSource::Files { tasks, .. } => tasks,
        }
    }
}

/// Backend description as written in config files.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BackendSpec {
    OracleMock {
        #[serde(default)]
        corruption_rate: f64,
        #[serde(default)]
        seed: u64,
    },
    Http {
        endpoint: String,
        provider: ProviderKind,
        api_key_env: String,
        #[serde(default)]
        max_retries: Option<u32>,
        #[serde(default)]
        backoff_ms: Option<u64>,
        #[serde(default)]
        timeout_s: Option<u64>,
    },
}

impl BackendSpec {
    pub fn to_backend(&self) -> Backend {
        match self {
            BackendSpec::OracleMock { corruption_rate, seed } => Backend::OracleMock {
                corruption_rate: *corruption_rate,
                seed: *seed,
            },
            BackendSpec::Http {
                endpoint,
                provider,
                api_key_env,
                max_retries,
                backoff_ms,
                timeout_s,
            } => Backend::Http(HttpProviderConfig {
                endpoint: endpoint.clone(),
                provider: *provider,
                api_key_env: api_key_env.clone(),
                max_retries: max_retries.unwrap_or(3),
                backoff_ms: backoff_ms.unwrap_or(500),
                timeout_s: timeout_s.unwrap_or(120),
            }),
        }
    }
}

fn default_concurrency() -> usize {
    4
}
fn default_pairs() -> usize {
    2
}
fn default_model() -> String {
    "oracle-mock".into()
}
fn default_fd_iterations() -> usize {
    500
}
fn default_improve_budget() -> usize {
    400
}

/// The on-disk experiment configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub output_dir: PathBuf,
    pub seed: u64,
    #[serde(default = "default_model")]
    pub model: String,
    #[serde(default)]
    pub temperature: f64,
    #[serde(default = "default_concurrency")]
    pub concurrency: usize,
    #[serde(default = "default_pairs")]
    pub pairs_per_graph: usize,
    #[serde(default = "default_fd_iterations")]
    pub fd_iterations: usize,
    #[serde(default = "default_improve_budget")]
    pub improve_budget: usize,
    /// Subsets of the experiment's allowed sets; defaults to all of them.
    #[serde(default)]
    pub tasks: Option<Vec<String>>,
    #[serde(default)]
    pub modalities: Option<Vec<String>>,
    #[serde(default)]
    pub techniques: Option<Vec<String>>,
    pub backend: BackendSpec,
    #[serde(rename = "bench")]
    pub benches: Vec<BenchSource>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = toml::to_string_pretty(self)
            .map_err(|e| Error::Config(format!("config serialization: {e}")))?;
        std::fs::write(path, text).map_err(|e| Error::file(path, e))?;
        Ok(())
    }

    /// Resolves and validates the matrix against the experiment's
    /// definition. Anything outside the allowed sets is a config error.
    pub fn resolve_matrix(&self) -> Result<Matrix> {
        let tasks = resolve_subset(
            &self.tasks,
            &self.experiment.allowed_tasks(),
            "task",
            Task::from_str,
        )?;
        let modalities = resolve_subset(
            &self.modalities,
            &self.experiment.allowed_modalities(),
            "modality",
            Modality::from_str,
        )?;
        let techniques = resolve_subset(
            &self.techniques,
            &self.experiment.allowed_techniques(),
            "technique",
            Technique::from_str,
        )?;
        if self.concurrency == 0 {
            return Err(Error::Config("concurrency must be at least 1".into()));
        }
        if self.pairs_per_graph == 0 {
            return Err(Error::Config("pairs_per_graph must be at least 1".into()));
        }
        if self.benches.is_empty() {
            return Err(Error::Config("at least one [[bench]] source is required".into()));
        }
        Ok(Matrix {
            tasks,
            modalities,
            techniques,
        })
    }

    /// Per-source task list intersected with the experiment's tasks.
    pub fn bench_tasks(&self, source: &BenchSource, matrix: &Matrix) -> Result<Vec<Task>> {
        match source.tasks_filter() {
            None => Ok(matrix.tasks.clone()),
            Some(names) => {
                let mut out = Vec::new();
                for name in names {
                    let task = Task::from_str(name)?;
                    if !matrix.tasks.contains(&task) {
                        return Err(Error::Config(format!(
                            "bench source requests task {task}, not part of {:?}",
                            self.experiment
                        )));
                    }
                    out.push(task);
                }
                Ok(out)
            }
        }
    }
}

/// The resolved (task x modality x technique) grid for a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub tasks: Vec<Task>,
    pub modalities: Vec<Modality>,
    pub techniques: Vec<Technique>,
}

fn resolve_subset<T: Copy + Eq + Ord + std::fmt::Debug>(
    requested: &Option<Vec<String>>,
    allowed: &[T],
    what: &str,
    parse: impl Fn(&str) -> Result<T>,
) -> Result<Vec<T>> {
    match requested {
        None => Ok(allowed.to_vec()),
        Some(names) => {
            let mut seen = BTreeSet::new();
            let mut out = Vec::new();
            for name in names {
                let value = parse(name)?;
                if !allowed.contains(&value) {
                    return Err(Error::Config(format!(
                        "{what} {value:?} is not allowed in this experiment"
                    )));
                }
                if seen.insert(value) {
                    out.push(value);
                }
            }
            if out.is_empty() {
                return Err(Error::Config(format!("empty {what} list")));
            }
            Ok(out)
        }
    }
}
