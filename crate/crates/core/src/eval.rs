//! Answer parsing, the four hallucination-robust accuracy metrics, and
//! aggregation into report tables.
//!
//! Every scorer returns a value in [0, 1]. The claimed value counts for
//! nothing unless the witness holds up against the actual graph.

use crate::bench::{Task, TaskInstance};
use crate::error::{Error, Result};
use crate::graph::{Graph, Witness};
use crate::prompts::{Modality, Technique};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, Write};
use std::path::Path;
use std::sync::OnceLock;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParseStatus {
    Ok,
    Malformed,
}

/// A model reply reduced to its claimed value and witness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructuredAnswer {
    pub value: u64,
    pub witness: Witness,
    pub parse_status: ParseStatus,
}

/// Extracts the last `ANSWER value=<int> nodes=[...]` line from a reply.
/// Surrounding reasoning text is ignored; anything unparseable yields a
/// malformed answer (scored 0 and flagged, never dropped).
pub fn parse_answer(text: &str, task: Task) -> StructuredAnswer {
    static LINE: OnceLock<regex::Regex> = OnceLock::new();
    let line_re = LINE.get_or_init(|| {
        regex::Regex::new(r"(?m)^\s*ANSWER\s+value\s*=\s*(-?\d+)\s+nodes\s*=\s*\[([^\]]*)\]\s*$")
            .expect("static regex")
    });
    let malformed = StructuredAnswer {
        value: 0,
        witness: Witness::new(task.witness_kind(), Vec::new()),
        parse_status: ParseStatus::Malformed,
    };
    let Some(caps) = line_re.captures_iter(text).last() else {
        return malformed;
    };
    let Ok(value) = caps[1].parse::<u64>() else {
        return malformed; // negative or oversized claims are malformed
    };
    let body = caps[2].trim();
    let mut nodes = Vec::new();
    if !body.is_empty() {
        for tok in body.split(',') {
            match tok.trim().parse::<u64>() {
                Ok(v) => nodes.push(v),
                Err(_) => return malformed,
            }
        }
    }
    StructuredAnswer {
        value,
        witness: Witness::new(task.witness_kind(), nodes),
        parse_status: ParseStatus::Ok,
    }
}

fn size_ratio(delta: u64, truth: u64) -> f64 {
    if delta == 0 || truth == 0 {
        return 0.0;
    }
    let (d, t) = (delta as f64, truth as f64);
    (d / t).min(t / d)
}

/// CoNe accuracy: Jaccard index of the answered and correct neighbor sets.
/// Two correctly-empty sets agree perfectly and score 1.
pub fn score_cone(answered: &[u64], truth: &[u64]) -> f64 {
    let a: BTreeSet<u64> = answered.iter().copied().collect();
    let b: BTreeSet<u64> = truth.iter().copied().collect();
    let union = a.union(&b).count();
    if union == 0 {
        return 1.0;
    }
    a.intersection(&b).count() as f64 / union as f64
}

/// ShPa accuracy: size agreement times edge-validity agreement, where
/// `sigma` is the count of claimed path edges that exist.
pub fn score_shpa(delta: u64, truth: u64, sigma: u64) -> Result<f64> {
    if truth == 0 {
        return Err(Error::InvalidGraph(
            "shortest-path scoring requires a reachable pair (truth length >= 1)".into(),
        ));
    }
    if delta == 0 || sigma == 0 {
        return Ok(0.0);
    }
    let (s, t) = (sigma as f64, truth as f64);
    let alpha = size_ratio(delta, truth) * (s / t).min(t / s);
    Ok(alpha.clamp(0.0, 1.0))
}

/// MaxC accuracy: size agreement times the fraction of claimed clique edges
/// that exist, against the Delta-choose-2 edges a true clique would have.
/// The edge factor is clamped at 1 so an oversized hallucinated witness can
/// never beat a perfect answer; a single-node clique scores by size alone.
pub fn score_maxc(delta: u64, truth: u64, sigma: u64) -> f64 {
    if truth == 0 || delta == 0 {
        return 0.0;
    }
    let edge_factor = if truth < 2 {
        1.0
    } else {
        let full = (truth * (truth - 1) / 2) as f64;
        (sigma as f64 / full).min(1.0)
    };
    (size_ratio(delta, truth) * edge_factor).clamp(0.0, 1.0)
}

/// MinVC accuracy: size agreement times the fraction of edges covered,
/// where `sigma_uncovered` counts edges missed by the claimed cover.
pub fn score_minvc(delta: u64, truth: u64, sigma_uncovered: u64, edge_count: u64) -> Result<f64> {
    if edge_count == 0 {
        return Err(Error::InvalidGraph(
            "vertex-cover scoring requires at least one edge".into(),
        ));
    }
    if truth == 0 || delta == 0 {
        return Ok(0.0);
    }
    let covered = 1.0 - (sigma_uncovered.min(edge_count) as f64 / edge_count as f64);
    Ok((size_ratio(delta, truth) * covered).clamp(0.0, 1.0))
}

/// Validates the witness against the graph and applies the task's metric.
/// Returns (alpha, sigma); malformed answers come back as (0, 0) without
/// touching the validators.
pub fn score_answer(
    g: &Graph,
    instance: &TaskInstance,
    answer: &StructuredAnswer,
) -> Result<(f64, u64)> {
    if answer.parse_status == ParseStatus::Malformed {
        return Ok((0.0, 0));
    }
    let nodes = &answer.witness.nodes;
    match instance.task {
        Task::CoNe => {
            let sigma = {
                let a: BTreeSet<u64> = nodes.iter().copied().collect();
                let b: BTreeSet<u64> = instance.truth_witness.nodes.iter().copied().collect();
                a.intersection(&b).count() as u64
            };
            Ok((score_cone(nodes, &instance.truth_witness.nodes), sigma))
        }
        Task::ShPa => {
            if instance.truth_value == 0 {
                let (u, v) = instance.query.unwrap_or((0, 0));
                return Err(Error::UnreachablePair { u, v });
            }
            let sigma = g.validate_path(nodes) as u64;
            Ok((score_shpa(answer.value, instance.truth_value, sigma)?, sigma))
        }
        Task::MaxC => {
            let sigma = g.validate_clique(nodes) as u64;
            Ok((score_maxc(answer.value, instance.truth_value, sigma), sigma))
        }
        Task::MinVC => {
            let sigma = g.validate_cover(nodes) as u64;
            Ok((
                score_minvc(
                    answer.value,
                    instance.truth_value,
                    sigma,
                    g.edge_count() as u64,
                )?,
                sigma,
            ))
        }
    }
}

// ---------------------------------------------------------------------------
// Records
// ---------------------------------------------------------------------------

/// Full provenance of one scored query.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub instance_id: String,
    pub graph_id: String,
    pub task: Task,
    pub modality: Modality,
    pub technique: Technique,
    pub raw_reply: String,
    pub alpha: f64,
    /// Correct value.
    pub truth_value: u64,
    /// Claimed value.
    pub answer_value: u64,
    /// Witness validation count; meaning depends on the task.
    pub sigma: u64,
    pub malformed: bool,
    pub input_tokens: u64,
    pub output_tokens: u64,
    pub latency_ms: u64,
    pub backend: String,
    pub cached: bool,
}

impl EvalRecord {
    pub fn total_tokens(&self) -> u64 {
        self.input_tokens + self.output_tokens
    }
}

/// Writes records as JSON lines.
pub fn write_records(path: &Path, records: &[EvalRecord]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::file(path, e))?;
    let mut out = std::io::BufWriter::new(file);
    for record in records {
        serde_json::to_writer(&mut out, record)?;
        out.write_all(b"\n").map_err(|e| Error::file(path, e))?;
    }
    out.flush().map_err(|e| Error::file(path, e))?;
    Ok(())
}

pub fn read_records(path: &Path) -> Result<Vec<EvalRecord>> {
    let file = std::fs::File::open(path).map_err(|e| Error::file(path, e))?;
    let reader = std::io::BufReader::new(file);
    let mut records = Vec::new();
    for line in reader.lines() {
        let line = line.map_err(|e| Error::file(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        records.push(serde_json::from_str(&line)?);
    }
    Ok(records)
}

// ---------------------------------------------------------------------------
// Aggregation
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellKey {
    pub task: Task,
    pub modality: Modality,
    pub technique: Technique,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellStats {
    pub mean_alpha: f64,
    pub mean_total_tokens: f64,
    pub n: usize,
    pub malformed_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub cells: BTreeMap<CellKey, CellStats>,
    pub by_modality: BTreeMap<Modality, CellStats>,
    pub by_technique: BTreeMap<Technique, CellStats>,
    pub by_task_modality: BTreeMap<(Task, Modality), CellStats>,
}

fn stats_of(records: &[&EvalRecord]) -> CellStats {
    let n = records.len();
    let mean_alpha = records.iter().map(|r| r.alpha).sum::<f64>() / n as f64;
    let mean_total_tokens =
        records.iter().map(|r| r.total_tokens() as f64).sum::<f64>() / n as f64;
    CellStats {
        mean_alpha,
        mean_total_tokens,
        n,
        malformed_count: records.iter().filter(|r| r.malformed).count(),
    }
}

/// Mean accuracy and token cost per (task, modality, technique) cell, plus
/// modality-, technique-, and task-level rollups.
pub fn aggregate(records: &[EvalRecord]) -> Result<Report> {
    if records.is_empty() {
        return Err(Error::EmptyRecords);
    }
    let mut cells: BTreeMap<CellKey, Vec<&EvalRecord>> = BTreeMap::new();
    let mut by_modality: BTreeMap<Modality, Vec<&EvalRecord>> = BTreeMap::new();
    let mut by_technique: BTreeMap<Technique, Vec<&EvalRecord>> = BTreeMap::new();
    let mut by_task_modality: BTreeMap<(Task, Modality), Vec<&EvalRecord>> = BTreeMap::new();
    for record in records {
        let key = CellKey {
            task: record.task,
            modality: record.modality,
            technique: record.technique,
        };
        cells.entry(key).or_default().push(record);
        by_modality.entry(record.modality).or_default().push(record);
        by_technique.entry(record.technique).or_default().push(record);
        by_task_modality
            .entry((record.task, record.modality))
            .or_default()
            .push(record);
    }
    Ok(Report {
        cells: cells.into_iter().map(|(k, v)| (k, stats_of(&v))).collect(),
        by_modality: by_modality.into_iter().map(|(k, v)| (k, stats_of(&v))).collect(),
        by_technique: by_technique.into_iter().map(|(k, v)| (k, stats_of(&v))).collect(),
        by_task_modality: by_task_modality
            .into_iter()
            .map(|(k, v)| (k, stats_of(&v)))
            .collect(),
    })
}

/// CSV: task, modality, technique, shots, mean_alpha, mean_total_tokens, n,
/// malformed_count. One row per aggregation cell.
pub fn report_csv(report: &Report) -> String {
    let mut out = String::from("task,modality,technique,shots,mean_alpha,mean_total_tokens,n,malformed_count\n");
    for (key, stats) in &report.cells {
        let technique = key.technique.to_string();
        let (kind, shots) = technique.split_once('-').expect("technique format");
        out.push_str(&format!(
            "{},{},{},{},{:.6},{:.2},{},{}\n",
            key.task, key.modality, kind, shots, stats.mean_alpha, stats.mean_total_tokens, stats.n, stats.malformed_count
        ));
    }
    out
}

/// Markdown tables, one per task: a row per modality and a column block per
/// technique, first accuracy then total tokens.
pub fn report_markdown(report: &Report) -> String {
    let mut out = String::new();
    let tasks: BTreeSet<Task> = report.cells.keys().map(|k| k.task).collect();
    for task in tasks {
        let keys: Vec<&CellKey> = report.cells.keys().filter(|k| k.task == task).collect();
        let techniques: Vec<Technique> = {
            let mut seen = BTreeSet::new();
            keys.iter().map(|k| k.technique).filter(|t| seen.insert(*t)).collect()
        };
        let modalities: Vec<Modality> = {
            let mut seen = BTreeSet::new();
            keys.iter().map(|k| k.modality).filter(|m| seen.insert(*m)).collect()
        };
        out.push_str(&format!("## Task {task}\n\n"));
        out.push_str("| Modality |");
        for t in &techniques {
            out.push_str(&format!(" α {t} |"));
        }
        for t in &techniques {
            out.push_str(&format!(" tokens {t} |"));
        }
        out.push('\n');
        out.push_str("|---|");
        for _ in 0..techniques.len() * 2 {
            out.push_str("---|");
        }
        out.push('\n');
        for m in &modalities {
            out.push_str(&format!("| {m} |"));
            for t in &techniques {
                let key = CellKey { task, modality: *m, technique: *t };
                match report.cells.get(&key) {
                    Some(s) => out.push_str(&format!(" {:.2} |", s.mean_alpha)),
                    None => out.push_str(" - |"),
                }
            }
            for t in &techniques {
                let key = CellKey { task, modality: *m, technique: *t };
                match report.cells.get(&key) {
                    Some(s) => out.push_str(&format!(" {:.0} |", s.mean_total_tokens)),
                    None => out.push_str(" - |"),
                }
            }
            out.push('\n');
        }
        out.push('\n');
    }
    out
}
