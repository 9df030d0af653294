//! End-to-end experiment orchestration: prepare graphs and drawings, fan
//! the (instance x modality x technique) jobs over a bounded worker pool,
//! score replies, and emit report files. Runs are resumable through the
//! response cache; reruns of a completed experiment make no backend calls.

use crate::bench::{
    generate_controlled_vc, generate_planted_clique, load_graphs, random_community_graph,
    random_connected_gnp, sample_instances, to_graph6, BenchmarkManifest, CachedTruth,
    FileFormat, ManifestEntry, Task, TaskInstance,
};
use crate::config::{BenchSource, ExperimentConfig, GeneratorKind, Matrix};
use crate::error::{Error, Result};
use crate::eval::{aggregate, parse_answer, read_records, score_answer, write_records, EvalRecord, ParseStatus, Report};
use crate::graph::Graph;
use crate::layout::{improve_drawing, layout_force_directed, layout_orthogonal, Drawing};
use crate::llm::{Backend, ChatRequest, LlmClient, OracleSidecar};
use crate::prompts::{build_prompt, Modality, Technique};
use crate::render::{rasterize, render_svg, RenderStyle};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

/// Which drawing a modality needs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ImageVariant {
    StraightLine,
    Orthogonal,
    Improved,
}

impl ImageVariant {
    pub fn of(modality: Modality) -> Option<ImageVariant> {
        match modality {
            Modality::Txt => None,
            Modality::SlV | Modality::SlM => Some(ImageVariant::StraightLine),
            Modality::OrV | Modality::OrM => Some(ImageVariant::Orthogonal),
            Modality::ISlV | Modality::ISlM => Some(ImageVariant::Improved),
        }
    }

    fn file_stem(self) -> &'static str {
        match self {
            ImageVariant::StraightLine => "straight-line",
            ImageVariant::Orthogonal => "orthogonal",
            ImageVariant::Improved => "improved",
        }
    }
}

struct PreparedGraph {
    bench: String,
    id: String,
    graph: Arc<Graph>,
    drawings: BTreeMap<ImageVariant, Arc<Drawing>>,
    images: BTreeMap<ImageVariant, Arc<Vec<u8>>>,
    tasks: Vec<Task>,
}

struct Job {
    graph: Arc<Graph>,
    instance: TaskInstance,
    modality: Modality,
    technique: Technique,
    drawing: Option<Arc<Drawing>>,
    image: Option<Arc<Vec<u8>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FailureEntry {
    pub instance_id: String,
    pub modality: String,
    pub technique: String,
    pub error: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunSummary {
    pub experiment: String,
    pub backend: String,
    pub model: String,
    pub records: usize,
    pub expected_records: usize,
    pub live_calls: u64,
    pub cache_hits: u64,
    pub failures: usize,
    pub output_dir: PathBuf,
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Override the configured backend: "mock", "replay", or "http".
    pub backend_override: Option<String>,
    /// Reuse existing records when they already cover the full job set.
    pub resume: bool,
    /// Required for live HTTP runs; the matrix is thousands of paid calls.
    pub allow_spend: bool,
}

fn fnv64(data: &str) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for b in data.as_bytes() {
        hash ^= *b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

fn select_backend(config: &ExperimentConfig, options: &RunOptions) -> Result<Backend> {
    let configured = config.backend.to_backend();
    let backend = match options.backend_override.as_deref() {
        None => configured,
        Some("replay") => Backend::ReplayCache {
            fingerprint: configured.fingerprint(),
        },
        Some("mock") => Backend::OracleMock {
            corruption_rate: 0.0,
            seed: config.seed,
        },
        Some("http") => match configured {
            http @ Backend::Http(_) => http,
            _ => {
                return Err(Error::Config(
                    "--backend http requires an http backend in the config file".into(),
                ))
            }
        },
        Some(other) => {
            return Err(Error::Config(format!(
                "unknown backend '{other}' (expected mock, replay, or http)"
            )))
        }
    };
    if matches!(backend, Backend::Http(_)) && !options.allow_spend {
        return Err(Error::Config(
            "live provider runs are gated behind --allow-spend".into(),
        ));
    }
    Ok(backend)
}

/// Runs one experiment end to end and writes records, reports, drawings,
/// and a failure manifest under the configured output directory.
pub fn run_experiment(config: &ExperimentConfig, options: &RunOptions) -> Result<RunSummary> {
    let matrix = config.resolve_matrix()?;
    let backend = select_backend(config, options)?;
    let out = &config.output_dir;
    std::fs::create_dir_all(out).map_err(|e| Error::file(out, e))?;
    let client = LlmClient::new(backend, &out.join("cache"))?;

    let prepared = prepare_graphs(config, &matrix)?;
    let jobs = build_jobs(config, &matrix, &prepared)?;
    let expected_records = jobs.len();

    let records_path = out.join("records.jsonl");
    let resumed = options.resume
        && records_path.exists()
        && read_records(&records_path).map(|r| r.len() == expected_records).unwrap_or(false);

    let (records, failures) = if resumed {
        (read_records(&records_path)?, Vec::new())
    } else {
        let (records, failures) = execute_jobs(config, &client, &jobs);
        write_records(&records_path, &records)?;
        let failures_path = out.join("failures.json");
        std::fs::write(&failures_path, serde_json::to_vec_pretty(&failures)?)
            .map_err(|e| Error::file(&failures_path, e))?;
        (records, failures)
    };

    if !records.is_empty() {
        emit_report(&records, &out.join("report"))?;
    }

    let summary = RunSummary {
        experiment: format!("{:?}", config.experiment).to_lowercase(),
        backend: client.backend().name().to_string(),
        model: config.model.clone(),
        records: records.len(),
        expected_records,
        live_calls: client.live_calls(),
        cache_hits: client.cache_hits(),
        failures: failures.len(),
        output_dir: out.clone(),
    };
    let run_path = out.join("run.json");
    std::fs::write(&run_path, serde_json::to_vec_pretty(&summary)?)
        .map_err(|e| Error::file(&run_path, e))?;
    Ok(summary)
}

fn prepare_graphs(config: &ExperimentConfig, matrix: &Matrix) -> Result<Vec<PreparedGraph>> {
    let variants: Vec<ImageVariant> = {
        let mut set = std::collections::BTreeSet::new();
        for &m in &matrix.modalities {
            if let Some(v) = ImageVariant::of(m) {
                set.insert(v);
            }
        }
        set.into_iter().collect()
    };
    let mut prepared = Vec::new();
    for source in &config.benches {
        let tasks = config.bench_tasks(source, matrix)?;
        let (bench_name, graphs) = realize_source(source)?;
        for (index, (id, graph)) in graphs.into_iter().enumerate() {
            let graph_id = if id.is_empty() {
                format!("{bench_name}-{index:02}")
            } else {
                id
            };
            let graph = Arc::new(graph);
            let asset_dir = config.output_dir.join("assets").join(&bench_name).join(&graph_id);
            std::fs::create_dir_all(&asset_dir).map_err(|e| Error::file(&asset_dir, e))?;
            let g6_path = asset_dir.join("graph.g6");
            if !g6_path.exists() {
                std::fs::write(&g6_path, to_graph6(&graph)).map_err(|e| Error::file(&g6_path, e))?;
            }
            let mut drawings = BTreeMap::new();
            let mut images = BTreeMap::new();
            for &variant in &variants {
                let (drawing, png) =
                    prepare_asset(config, &graph, &graph_id, variant, &asset_dir)?;
                drawings.insert(variant, Arc::new(drawing));
                images.insert(variant, Arc::new(png));
            }
            prepared.push(PreparedGraph {
                bench: bench_name.clone(),
                id: graph_id,
                graph,
                drawings,
                images,
                tasks: tasks.clone(),
            });
        }
    }
    Ok(prepared)
}

fn realize_source(source: &BenchSource) -> Result<(String, Vec<(String, Graph)>)> {
    match source {
        BenchSource::Generated {
            name,
            generator,
            count,
            seed,
            n,
            p,
            k,
            k_range,
            vc_target,
            vc_targets,
            ..
        } => {
            let mut graphs = Vec::with_capacity(*count);
            for i in 0..*count {
                let gseed = seed.wrapping_add(i as u64);
                let graph = match generator {
                    GeneratorKind::Gnp => {
                        let n = n.ok_or_else(|| Error::Config("gnp generator needs n".into()))?;
                        random_connected_gnp(n, p.unwrap_or(0.3), gseed)
                    }
                    GeneratorKind::PlantedClique => {
                        let n = n.ok_or_else(|| {
                            Error::Config("planted-clique generator needs n".into())
                        })?;
                        let k = match (k, k_range) {
                            (Some(k), _) => *k,
                            (None, Some((lo, hi))) => lo + i % (hi - lo + 1),
                            (None, None) => {
                                return Err(Error::Config(
                                    "planted-clique generator needs k or k_range".into(),
                                ))
                            }
                        };
                        generate_planted_clique(n, k, p.unwrap_or(0.3), gseed)?
                    }
                    GeneratorKind::ControlledVc => {
                        let target = match (vc_target, vc_targets) {
                            (Some(t), _) => *t,
                            (None, Some(list)) if !list.is_empty() => list[i % list.len()],
                            _ => {
                                return Err(Error::Config(
                                    "controlled-vc generator needs vc_target or vc_targets".into(),
                                ))
                            }
                        };
                        let n = n.unwrap_or_else(|| (2 * target + 4).clamp(target + 2, 50));
                        generate_controlled_vc(n, target, gseed)?
                    }
                };
                graphs.push((String::new(), graph));
            }
            Ok((name.clone(), graphs))
        }
        BenchSource::Manifest { path, .. } => {
            let manifest_path = Path::new(path);
            let manifest = BenchmarkManifest::load(manifest_path)?;
            let base = manifest_path.parent().unwrap_or(Path::new("."));
            let graphs = manifest.load_and_verify(base)?;
            Ok((manifest.name.clone(), graphs))
        }
        BenchSource::Files { name, paths, format, .. } => {
            let format = FileFormat::from_str(format)?;
            let mut graphs = Vec::new();
            for path in paths {
                for graph in load_graphs(Path::new(path), format)? {
                    graphs.push((String::new(), graph));
                }
            }
            Ok((name.clone(), graphs))
        }
    }
}

fn prepare_asset(
    config: &ExperimentConfig,
    graph: &Graph,
    graph_id: &str,
    variant: ImageVariant,
    asset_dir: &Path,
) -> Result<(Drawing, Vec<u8>)> {
    let stem = variant.file_stem();
    let drawing_path = asset_dir.join(format!("{stem}.toml"));
    let svg_path = asset_dir.join(format!("{stem}.svg"));
    let png_path = asset_dir.join(format!("{stem}.png"));
    let layout_seed = config.seed ^ fnv64(graph_id);

    let drawing = if drawing_path.exists() {
        Drawing::load(&drawing_path)?
    } else {
        let drawing = match variant {
            ImageVariant::Orthogonal => layout_orthogonal(graph, layout_seed)?,
            ImageVariant::StraightLine => {
                layout_force_directed(graph, config.fd_iterations, layout_seed)?
            }
            ImageVariant::Improved => {
                let base = layout_force_directed(graph, config.fd_iterations, layout_seed)?;
                improve_drawing(&base, config.improve_budget, layout_seed)?
            }
        };
        drawing.save(&drawing_path)?;
        drawing
    };
    let png = if png_path.exists() {
        std::fs::read(&png_path).map_err(|e| Error::file(&png_path, e))?
    } else {
        let style = RenderStyle::default();
        let doc = render_svg(&drawing, &style)?;
        std::fs::write(&svg_path, doc.to_svg_string()).map_err(|e| Error::file(&svg_path, e))?;
        let png = rasterize(&doc, &style)?;
        std::fs::write(&png_path, &png).map_err(|e| Error::file(&png_path, e))?;
        png
    };
    Ok((drawing, png))
}

fn build_jobs(
    config: &ExperimentConfig,
    matrix: &Matrix,
    prepared: &[PreparedGraph],
) -> Result<Vec<Job>> {
    let mut jobs = Vec::new();
    for pg in prepared {
        for &task in &pg.tasks {
            let sample_seed = config.seed ^ fnv64(&format!("{}/{}/{}", pg.bench, pg.id, task));
            let instances = sample_instances(
                &pg.graph,
                &format!("{}/{}", pg.bench, pg.id),
                task,
                config.pairs_per_graph,
                sample_seed,
            )?;
            for instance in instances {
                for &modality in &matrix.modalities {
                    for &technique in &matrix.techniques {
                        if technique.kind == crate::prompts::TechniqueKind::SoAL
                            && !modality.bears_image()
                        {
                            continue;
                        }
                        let variant = ImageVariant::of(modality);
                        jobs.push(Job {
                            graph: Arc::clone(&pg.graph),
                            instance: instance.clone(),
                            modality,
                            technique,
                            drawing: variant.map(|v| Arc::clone(&pg.drawings[&v])),
                            image: variant.map(|v| Arc::clone(&pg.images[&v])),
                        });
                    }
                }
            }
        }
    }
    Ok(jobs)
}

fn execute_jobs(
    config: &ExperimentConfig,
    client: &LlmClient,
    jobs: &[Job],
) -> (Vec<EvalRecord>, Vec<FailureEntry>) {
    let cursor = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<std::result::Result<EvalRecord, FailureEntry>>>> =
        Mutex::new((0..jobs.len()).map(|_| None).collect());
    let workers = config.concurrency.min(jobs.len()).max(1);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = cursor.fetch_add(1, Ordering::Relaxed);
                if i >= jobs.len() {
                    break;
                }
                let outcome = run_job(config, client, &jobs[i]);
                slots.lock().unwrap()[i] = Some(outcome);
            });
        }
    });
    let mut records = Vec::with_capacity(jobs.len());
    let mut failures = Vec::new();
    for slot in slots.into_inner().unwrap() {
        match slot.expect("every job slot is filled") {
            Ok(record) => records.push(record),
            Err(failure) => failures.push(failure),
        }
    }
    (records, failures)
}

fn run_job(
    config: &ExperimentConfig,
    client: &LlmClient,
    job: &Job,
) -> std::result::Result<EvalRecord, FailureEntry> {
    let fail = |error: String| FailureEntry {
        instance_id: job.instance.id(),
        modality: job.modality.to_string(),
        technique: job.technique.to_string(),
        error,
    };
    let bundle = build_prompt(
        &job.instance,
        &job.graph,
        job.modality,
        job.technique,
        job.drawing.as_deref(),
        job.image.as_deref().map(|v| v.as_slice()),
    )
    .map_err(|e| fail(e.to_string()))?;
    let request = ChatRequest {
        model: config.model.clone(),
        temperature: config.temperature,
        segments: bundle.segments,
        oracle: Some(OracleSidecar {
            task: job.instance.task,
            truth_value: job.instance.truth_value,
            truth_witness: job.instance.truth_witness.nodes.clone(),
            node_count: job.graph.node_count(),
        }),
    };
    let response = client.send(&request).map_err(|e| fail(e.to_string()))?;
    let answer = parse_answer(&response.text, job.instance.task);
    let (alpha, sigma) =
        score_answer(&job.graph, &job.instance, &answer).map_err(|e| fail(e.to_string()))?;
    Ok(EvalRecord {
        instance_id: job.instance.id(),
        graph_id: job.instance.graph_id.clone(),
        task: job.instance.task,
        modality: job.modality,
        technique: job.technique,
        raw_reply: response.text.clone(),
        alpha,
        truth_value: job.instance.truth_value,
        answer_value: answer.value,
        sigma,
        malformed: answer.parse_status == ParseStatus::Malformed,
        input_tokens: response.input_tokens,
        output_tokens: response.output_tokens,
        latency_ms: response.latency_ms,
        backend: client.backend().name().to_string(),
        cached: response.cached,
    })
}

/// Writes the aggregate report files: the cell table as CSV and markdown,
/// plus flat per-figure files for external plotting.
pub fn emit_report(records: &[EvalRecord], dir: &Path) -> Result<Vec<PathBuf>> {
    let report = aggregate(records)?;
    std::fs::create_dir_all(dir).map_err(|e| Error::file(dir, e))?;
    let mut written = Vec::new();
    let mut put = |name: &str, content: String| -> Result<()> {
        let path = dir.join(name);
        std::fs::write(&path, content).map_err(|e| Error::file(&path, e))?;
        written.push(path);
        Ok(())
    };
    put("report.csv", crate::eval::report_csv(&report))?;
    put("report.md", crate::eval::report_markdown(&report))?;
    put("plot_modality.csv", rollup_csv("modality", &report, RollupKind::Modality))?;
    put("plot_technique.csv", rollup_csv("technique", &report, RollupKind::Technique))?;
    put(
        "plot_task_modality.csv",
        rollup_csv("task,modality", &report, RollupKind::TaskModality),
    )?;
    Ok(written)
}

enum RollupKind {
    Modality,
    Technique,
    TaskModality,
}

fn rollup_csv(key_header: &str, report: &Report, kind: RollupKind) -> String {
    let mut out = format!("{key_header},mean_alpha,mean_total_tokens,n\n");
    match kind {
        RollupKind::Modality => {
            for (m, s) in &report.by_modality {
                out.push_str(&format!("{m},{:.6},{:.2},{}\n", s.mean_alpha, s.mean_total_tokens, s.n));
            }
        }
        RollupKind::Technique => {
            for (t, s) in &report.by_technique {
                out.push_str(&format!("{t},{:.6},{:.2},{}\n", s.mean_alpha, s.mean_total_tokens, s.n));
            }
        }
        RollupKind::TaskModality => {
            for ((task, m), s) in &report.by_task_modality {
                out.push_str(&format!(
                    "{task},{m},{:.6},{:.2},{}\n",
                    s.mean_alpha, s.mean_total_tokens, s.n
                ));
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Benchmark generation presets
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BenchPreset {
    Bench1,
    Bench2,
    Bench3,
    Bench4,
}

impl BenchPreset {
    fn manifest_name(self) -> &'static str {
        match self {
            BenchPreset::Bench1 => "Bench-1",
            BenchPreset::Bench2 => "Bench-2",
            BenchPreset::Bench3 => "Bench-3",
            BenchPreset::Bench4 => "Bench-4",
        }
    }

    fn count(self) -> usize {
        match self {
            BenchPreset::Bench4 => 28,
            _ => 20,
        }
    }
}

/// Spec file for `gen-bench`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchGenSpec {
    pub preset: BenchPreset,
    pub out_dir: PathBuf,
    pub seed: u64,
}

impl BenchGenSpec {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

/// Generates one of the four benchmarks and writes graph6 files plus a
/// manifest with solver-confirmed ground truths.
pub fn generate_benchmark(spec: &BenchGenSpec) -> Result<BenchmarkManifest> {
    std::fs::create_dir_all(&spec.out_dir).map_err(|e| Error::file(&spec.out_dir, e))?;
    let count = spec.preset.count();
    let mut entries = Vec::with_capacity(count);
    for i in 0..count {
        let gseed = spec.seed.wrapping_add(1000 * i as u64);
        let (graph, truths) = match spec.preset {
            BenchPreset::Bench1 => (bench_topology_mix(6, 50, count, i, gseed), Vec::new()),
            BenchPreset::Bench4 => (bench_topology_mix(7, 50, count, i, gseed), Vec::new()),
            BenchPreset::Bench2 => {
                let k = 2 + i % 6;
                let n = 10 + (gseed % 19) as usize; // 10..=28
                let graph = generate_planted_clique(n.max(k + 3), k, 0.3, gseed)?;
                let truth = CachedTruth {
                    task: Task::MaxC,
                    value: k as u64,
                    witness: graph.max_clique()?.nodes.iter().map(|&v| v as u64).collect(),
                };
                (graph, vec![truth])
            }
            BenchPreset::Bench3 => {
                let target = 1 + (25 * i) / (count - 1).max(1); // spread over [1, 26]
                let n = (2 * target + 4 + i % 5).clamp(target + 2, 50);
                let graph = generate_controlled_vc(n, target, gseed)?;
                let truth = CachedTruth {
                    task: Task::MinVC,
                    value: target as u64,
                    witness: graph
                        .min_vertex_cover()?
                        .nodes
                        .iter()
                        .map(|&v| v as u64)
                        .collect(),
                };
                (graph, vec![truth])
            }
        };
        let id = format!("g{i:02}");
        let file = format!("{id}.g6");
        let path = spec.out_dir.join(&file);
        std::fs::write(&path, to_graph6(&graph)).map_err(|e| Error::file(&path, e))?;
        entries.push(ManifestEntry {
            id,
            file,
            format: FileFormat::Graph6,
            truths,
        });
    }
    let manifest = BenchmarkManifest {
        name: spec.preset.manifest_name().to_string(),
        seed: spec.seed,
        entries,
    };
    manifest.save(&spec.out_dir.join("manifest.toml"))?;
    // Confirm everything we just wrote against the oracles and the
    // benchmark's structural constraints.
    manifest.load_and_verify(&spec.out_dir)?;
    Ok(manifest)
}

/// Varied connected topologies within a node range: sparse near-trees,
/// mid-density random graphs, and graphs with dense communities.
fn bench_topology_mix(n_min: usize, n_max: usize, count: usize, i: usize, seed: u64) -> Graph {
    let n = n_min + (n_max - n_min) * i / (count - 1).max(1);
    match i % 3 {
        0 => random_connected_gnp(n, (2.2 / n as f64).min(1.0), seed),
        1 => random_connected_gnp(n, 0.22, seed),
        _ => random_community_graph(n, 2 + i % 2, 0.55, 0.04, seed),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ExperimentKind;

    fn smoke_config(dir: &Path) -> ExperimentConfig {
        ExperimentConfig {
            experiment: ExperimentKind::Exp1,
            output_dir: dir.to_path_buf(),
            seed: 5,
            model: "mock".into(),
            temperature: 0.0,
            concurrency: 4,
            pairs_per_graph: 2,
            fd_iterations: 120,
            improve_budget: 40,
            tasks: None,
            modalities: None,
            techniques: None,
            backend: BackendSpec::OracleMock { corruption_rate: 0.0, seed: 3 },
            benches: vec![BenchSource::Generated {
                name: "tiny".into(),
                generator: GeneratorKind::PlantedClique,
                count: 2,
                seed: 21,
                n: Some(8),
                p: Some(0.35),
                k: Some(3),
                k_range: None,
                vc_target: None,
                vc_targets: None,
                tasks: None,
            }],
        }
    }

    #[test]
    fn exp1_smoke_record_count_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let config = smoke_config(dir.path());
        let summary = run_experiment(&config, &RunOptions::default()).unwrap();
        // 2 graphs x (2+2+1+1 instances) x 5 modalities x 4 techniques.
        assert_eq!(summary.records, 2 * 6 * 5 * 4);
        assert_eq!(summary.records, summary.expected_records);
        assert_eq!(summary.failures, 0);
        assert!(dir.path().join("records.jsonl").exists());
        assert!(dir.path().join("report/report.csv").exists());
        assert!(dir.path().join("report/report.md").exists());
        // Asset naming contract: <bench>/<graph-id>/<paradigm>.png.
        assert!(dir
            .path()
            .join("assets/tiny/tiny-00/straight-line.png")
            .exists());
        assert!(dir.path().join("assets/tiny/tiny-00/orthogonal.png").exists());
    }

    #[test]
    fn mock_corruption_zero_scores_one_everywhere() {
        let dir = tempfile::tempdir().unwrap();
        let config = smoke_config(dir.path());
        run_experiment(&config, &RunOptions::default()).unwrap();
        let records = read_records(&dir.path().join("records.jsonl")).unwrap();
        for record in &records {
            assert!(
                (record.alpha - 1.0).abs() < 1e-12,
                "{} scored {}",
                record.instance_id,
                record.alpha
            );
            assert!(!record.malformed);
        }
    }

    #[test]
    fn rerun_hits_cache_and_reproduces_reports() {
        let dir = tempfile::tempdir().unwrap();
        let config = smoke_config(dir.path());
        let first = run_experiment(&config, &RunOptions::default()).unwrap();
        assert!(first.live_calls > 0);
        let report_csv = std::fs::read(dir.path().join("report/report.csv")).unwrap();
        let report_md = std::fs::read(dir.path().join("report/report.md")).unwrap();
        let records = read_records(&dir.path().join("records.jsonl")).unwrap();

        let second = run_experiment(&config, &RunOptions::default()).unwrap();
        assert_eq!(second.live_calls, 0);
        assert_eq!(second.cache_hits as usize, second.records);
        assert_eq!(std::fs::read(dir.path().join("report/report.csv")).unwrap(), report_csv);
        assert_eq!(std::fs::read(dir.path().join("report/report.md")).unwrap(), report_md);
        // Replayed records agree on everything except cache provenance.
        let replayed = read_records(&dir.path().join("records.jsonl")).unwrap();
        assert_eq!(replayed.len(), records.len());
        for (a, b) in records.iter().zip(&replayed) {
            assert!(b.cached);
            let mut b = b.clone();
            b.cached = a.cached;
            assert_eq!(*a, b);
        }
    }

    #[test]
    fn resume_skips_execution_when_records_are_complete() {
        let dir = tempfile::tempdir().unwrap();
        let config = smoke_config(dir.path());
        run_experiment(&config, &RunOptions::default()).unwrap();
        let resumed = run_experiment(
            &config,
            &RunOptions { resume: true, ..Default::default() },
        )
        .unwrap();
        assert_eq!(resumed.live_calls, 0);
        assert_eq!(resumed.cache_hits, 0); // records reused outright
    }

    #[test]
    fn replay_without_cache_reports_failures() {
        let dir = tempfile::tempdir().unwrap();
        let config = smoke_config(dir.path());
        let summary = run_experiment(
            &config,
            &RunOptions {
                backend_override: Some("replay".into()),
                ..Default::default()
            },
        )
        .unwrap();
        // Run completes; every job is listed as a failure.
        assert_eq!(summary.records, 0);
        assert_eq!(summary.failures, summary.expected_records);
        let failures: Vec<FailureEntry> =
            serde_json::from_slice(&std::fs::read(dir.path().join("failures.json")).unwrap())
                .unwrap();
        assert!(failures[0].error.contains("replay miss"));
    }

    #[test]
    fn http_requires_allow_spend() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = smoke_config(dir.path());
        config.backend = BackendSpec::Http {
            endpoint: "https://example.invalid/v1".into(),
            provider: crate::llm::ProviderKind::OpenAiChat,
            api_key_env: "LLM_API_KEY_EXAMPLE".into(),
            max_retries: None,
            backoff_ms: None,
            timeout_s: None,
        };
        assert!(matches!(
            run_experiment(&config, &RunOptions::default()),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn gen_bench_presets_verify() {
        let dir = tempfile::tempdir().unwrap();
        let spec = BenchGenSpec {
            preset: BenchPreset::Bench2,
            out_dir: dir.path().join("b2"),
            seed: 9,
        };
        let manifest = generate_benchmark(&spec).unwrap();
        assert_eq!(manifest.entries.len(), 20);
        assert_eq!(manifest.name, "Bench-2");
        // Regenerating over the same dir re-verifies cleanly.
        let again = BenchmarkManifest::load(&dir.path().join("b2/manifest.toml")).unwrap();
        let graphs = again.load_and_verify(&dir.path().join("b2")).unwrap();
        assert_eq!(graphs.len(), 20);
    }
}
