//! Prompt assembly for every (task, modality, technique, shots) cell of the
//! experiment matrix. Templates are data: plain text files with named
//! placeholders, versioned with the crate, so the wording can be swapped
//! without touching the assembly logic.

use crate::bench::{Task, TaskInstance};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::layout::{improve_drawing, layout_force_directed, layout_orthogonal, Drawing, Paradigm};
use crate::render::{rasterize, render_svg, RenderStyle};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};

const TPL_ROLE: &str = include_str!("../templates/role.txt");
const TPL_INPUT_TXT: &str = include_str!("../templates/input_txt.txt");
const TPL_INPUT_VIS: &str = include_str!("../templates/input_vis.txt");
const TPL_INPUT_MIX: &str = include_str!("../templates/input_mix.txt");
const TPL_TASK_CONE: &str = include_str!("../templates/task_cone.txt");
const TPL_TASK_SHPA: &str = include_str!("../templates/task_shpa.txt");
const TPL_TASK_MAXC: &str = include_str!("../templates/task_maxc.txt");
const TPL_TASK_MINVC: &str = include_str!("../templates/task_minvc.txt");
const TPL_COT: &str = include_str!("../templates/cot.txt");
const TPL_SOAL: &str = include_str!("../templates/soal.txt");
const TPL_VERIFY: &str = include_str!("../templates/verify.txt");
const TPL_SCHEMA: &str = include_str!("../templates/schema.txt");

/// How the graph is presented to the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Modality {
    Txt,
    SlV,
    OrV,
    SlM,
    OrM,
    ISlV,
    ISlM,
}

impl Modality {
    pub const ALL: [Modality; 7] = [
        Modality::Txt,
        Modality::SlV,
        Modality::OrV,
        Modality::SlM,
        Modality::OrM,
        Modality::ISlV,
        Modality::ISlM,
    ];
    /// The five modalities of the base experiment.
    pub const BASE: [Modality; 5] = [
        Modality::Txt,
        Modality::SlV,
        Modality::OrV,
        Modality::SlM,
        Modality::OrM,
    ];

    pub fn bears_image(self) -> bool {
        !matches!(self, Modality::Txt)
    }

    /// Mixed modalities carry the adjacency list alongside the image.
    pub fn bears_adjacency_text(self) -> bool {
        matches!(self, Modality::Txt | Modality::SlM | Modality::OrM | Modality::ISlM)
    }

    pub fn paradigm(self) -> Option<Paradigm> {
        match self {
            Modality::Txt => None,
            Modality::SlV | Modality::SlM | Modality::ISlV | Modality::ISlM => {
                Some(Paradigm::StraightLine)
            }
            Modality::OrV | Modality::OrM => Some(Paradigm::Orthogonal),
        }
    }

    /// Whether the drawing goes through the readability-improvement pass.
    pub fn improved(self) -> bool {
        matches!(self, Modality::ISlV | Modality::ISlM)
    }
}

impl fmt::Display for Modality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Modality::Txt => "Txt",
            Modality::SlV => "SlV",
            Modality::OrV => "OrV",
            Modality::SlM => "SlM",
            Modality::OrM => "OrM",
            Modality::ISlV => "I-SlV",
            Modality::ISlM => "I-SlM",
        };
        f.write_str(s)
    }
}

impl FromStr for Modality {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "").as_str() {
            "txt" => Ok(Modality::Txt),
            "slv" => Ok(Modality::SlV),
            "orv" => Ok(Modality::OrV),
            "slm" => Ok(Modality::SlM),
            "orm" => Ok(Modality::OrM),
            "islv" => Ok(Modality::ISlV),
            "islm" => Ok(Modality::ISlM),
            other => Err(Error::Config(format!("unknown modality '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TechniqueKind {
    Std,
    CoT,
    SoAL,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Shots {
    Zero,
    Few,
}

/// A prompting technique paired with its in-context learning strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Technique {
    pub kind: TechniqueKind,
    pub shots: Shots,
}

impl Technique {
    pub fn new(kind: TechniqueKind, shots: Shots) -> Self {
        Technique { kind, shots }
    }

    /// Std and CoT, Zero and Few: the four techniques of the base matrix.
    pub const BASE: [Technique; 4] = [
        Technique { kind: TechniqueKind::Std, shots: Shots::Zero },
        Technique { kind: TechniqueKind::Std, shots: Shots::Few },
        Technique { kind: TechniqueKind::CoT, shots: Shots::Zero },
        Technique { kind: TechniqueKind::CoT, shots: Shots::Few },
    ];

    pub const WITH_SOAL: [Technique; 6] = [
        Technique { kind: TechniqueKind::Std, shots: Shots::Zero },
        Technique { kind: TechniqueKind::Std, shots: Shots::Few },
        Technique { kind: TechniqueKind::SoAL, shots: Shots::Zero },
        Technique { kind: TechniqueKind::SoAL, shots: Shots::Few },
        Technique { kind: TechniqueKind::CoT, shots: Shots::Zero },
        Technique { kind: TechniqueKind::CoT, shots: Shots::Few },
    ];
}

impl fmt::Display for Technique {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            TechniqueKind::Std => "Std",
            TechniqueKind::CoT => "CoT",
            TechniqueKind::SoAL => "SoAL",
        };
        let shots = match self.shots {
            Shots::Zero => "Zero",
            Shots::Few => "Few",
        };
        write!(f, "{kind}-{shots}")
    }
}

impl FromStr for Technique {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, shots) = s.split_once('-').ok_or_else(|| {
            Error::Config(format!("technique '{s}' should look like 'CoT-Zero'"))
        })?;
        let kind = match kind.to_ascii_lowercase().as_str() {
            "std" => TechniqueKind::Std,
            "cot" => TechniqueKind::CoT,
            "soal" => TechniqueKind::SoAL,
            other => return Err(Error::Config(format!("unknown technique '{other}'"))),
        };
        let shots = match shots.to_ascii_lowercase().as_str() {
            "zero" => Shots::Zero,
            "few" => Shots::Few,
            other => return Err(Error::Config(format!("unknown shots '{other}'"))),
        };
        Ok(Technique { kind, shots })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
}

/// One ordered piece of the prompt.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Segment {
    Text { role: Role, text: String },
    ImagePng { png: Vec<u8> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptMetadata {
    pub instance_id: String,
    pub task: Task,
    pub modality: Modality,
    pub technique: Technique,
}

/// The fully assembled prompt for one query.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptBundle {
    pub segments: Vec<Segment>,
    pub metadata: PromptMetadata,
}

impl PromptBundle {
    pub fn text_segments(&self) -> impl Iterator<Item = &str> {
        self.segments.iter().filter_map(|s| match s {
            Segment::Text { text, .. } => Some(text.as_str()),
            Segment::ImagePng { .. } => None,
        })
    }

    pub fn image_count(&self) -> usize {
        self.segments
            .iter()
            .filter(|s| matches!(s, Segment::ImagePng { .. }))
            .count()
    }

    fn exemplar_count(&self) -> usize {
        self.text_segments()
            .filter(|t| t.starts_with("Example "))
            .count()
    }

    /// Structural invariants: one schema instruction, image presence
    /// matching the modality, exactly two exemplars when few-shot.
    pub fn validate(&self) -> Result<()> {
        let schema_count = self
            .text_segments()
            .filter(|t| t.contains("ANSWER value=<number>"))
            .count();
        if schema_count != 1 {
            return Err(Error::PromptConfig(format!(
                "expected exactly one answer-schema instruction, found {schema_count}"
            )));
        }
        let expect_exemplars = match self.metadata.technique.shots {
            Shots::Few => 2,
            Shots::Zero => 0,
        };
        if self.exemplar_count() != expect_exemplars {
            return Err(Error::PromptConfig(format!(
                "expected {expect_exemplars} exemplars, found {}",
                self.exemplar_count()
            )));
        }
        let expect_images = if self.metadata.modality.bears_image() {
            1 + expect_exemplars
        } else {
            0
        };
        if self.image_count() != expect_images {
            return Err(Error::PromptConfig(format!(
                "expected {expect_images} image attachments, found {}",
                self.image_count()
            )));
        }
        Ok(())
    }
}

fn fill(template: &str, vars: &[(&str, String)]) -> String {
    let mut out = template.trim_end().to_string();
    for (name, value) in vars {
        out = out.replace(&format!("{{{name}}}"), value);
    }
    out
}

fn task_template(task: Task) -> &'static str {
    match task {
        Task::CoNe => TPL_TASK_CONE,
        Task::ShPa => TPL_TASK_SHPA,
        Task::MaxC => TPL_TASK_MAXC,
        Task::MinVC => TPL_TASK_MINVC,
    }
}

fn task_text(task: Task, g: &Graph, query: Option<(usize, usize)>) -> Result<String> {
    let n = g.node_count();
    let max_value = match task {
        Task::CoNe => n.saturating_sub(2),
        Task::ShPa | Task::MinVC => n.saturating_sub(1),
        Task::MaxC => n,
    };
    let mut vars = vec![("max_value", max_value.to_string())];
    if task.is_pair_task() {
        let (u, v) = query.ok_or_else(|| {
            Error::PromptConfig(format!("{task} requires a query node pair"))
        })?;
        vars.push(("u", u.to_string()));
        vars.push(("v", v.to_string()));
    }
    Ok(fill(task_template(task), &vars))
}

fn witness_description(task: Task) -> &'static str {
    match task {
        Task::CoNe => "the list of shared neighbor nodes",
        Task::ShPa => "your path as the ordered node sequence, endpoints included",
        Task::MaxC => "the nodes of your clique",
        Task::MinVC => "the nodes of your cover",
    }
}

fn paradigm_words(paradigm: Paradigm) -> (&'static str, &'static str) {
    match paradigm {
        Paradigm::StraightLine => ("straight-line", "a straight segment between its endpoints"),
        Paradigm::Orthogonal => (
            "orthogonal",
            "a chain of horizontal and vertical segments between its endpoints",
        ),
    }
}

fn input_text(modality: Modality, g: &Graph) -> String {
    let n = g.node_count();
    let mut vars = vec![
        ("n", n.to_string()),
        ("n_minus_1", (n - 1).to_string()),
    ];
    let template = if modality.bears_image() {
        let (name, edge_style) = paradigm_words(modality.paradigm().expect("image modality"));
        vars.push(("paradigm", name.to_string()));
        vars.push(("edge_style", edge_style.to_string()));
        if modality.bears_adjacency_text() {
            vars.push(("adjacency_list", g.adjacency_list_text().trim_end().to_string()));
            TPL_INPUT_MIX
        } else {
            TPL_INPUT_VIS
        }
    } else {
        vars.push(("adjacency_list", g.adjacency_list_text().trim_end().to_string()));
        TPL_INPUT_TXT
    };
    fill(template, &vars)
}

/// Builds the full prompt for one matrix cell. The image must be attached
/// iff the modality bears one; SoAL demands an image-bearing modality.
pub fn build_prompt(
    instance: &TaskInstance,
    graph: &Graph,
    modality: Modality,
    technique: Technique,
    drawing: Option<&Drawing>,
    image_png: Option<&[u8]>,
) -> Result<PromptBundle> {
    if modality.bears_image() != image_png.is_some() {
        return Err(Error::PromptConfig(format!(
            "modality {modality} {} an image attachment",
            if modality.bears_image() { "requires" } else { "forbids" }
        )));
    }
    if technique.kind == TechniqueKind::SoAL && !modality.bears_image() {
        return Err(Error::PromptConfig(
            "SoAL applies only to image-bearing modalities".into(),
        ));
    }
    if let (Some(d), Some(expected)) = (drawing, modality.paradigm()) {
        if d.paradigm != expected {
            return Err(Error::PromptConfig(format!(
                "modality {modality} expects a {expected} drawing, got {}",
                d.paradigm
            )));
        }
    }

    let mut segments = Vec::new();
    segments.push(Segment::Text {
        role: Role::System,
        text: TPL_ROLE.trim_end().to_string(),
    });
    if technique.shots == Shots::Few {
        for (i, exemplar) in few_shot_exemplars(instance.task, modality)?.into_iter().enumerate() {
            exemplar.push_segments(i + 1, technique.kind, &mut segments);
        }
    }
    if let Some(png) = image_png {
        segments.push(Segment::ImagePng { png: png.to_vec() });
    }
    if technique.kind == TechniqueKind::SoAL {
        segments.push(Segment::Text {
            role: Role::User,
            text: TPL_SOAL.trim_end().to_string(),
        });
    }
    let mut body = input_text(modality, graph);
    body.push_str("\n\n");
    body.push_str(&task_text(instance.task, graph, instance.query)?);
    if technique.kind == TechniqueKind::CoT {
        body.push_str("\n\n");
        body.push_str(TPL_COT.trim_end());
    }
    body.push_str("\n\n");
    body.push_str(TPL_VERIFY.trim_end());
    segments.push(Segment::Text { role: Role::User, text: body });
    segments.push(Segment::Text {
        role: Role::User,
        text: fill(
            TPL_SCHEMA,
            &[("witness_description", witness_description(instance.task).to_string())],
        ),
    });

    let bundle = PromptBundle {
        segments,
        metadata: PromptMetadata {
            instance_id: instance.id(),
            task: instance.task,
            modality,
            technique,
        },
    };
    bundle.validate()?;
    Ok(bundle)
}

// ---------------------------------------------------------------------------
// Few-shot exemplars
// ---------------------------------------------------------------------------

/// A worked example on one of the two fixture graphs, presented in the
/// requested modality with an oracle-correct answer.
pub struct Exemplar {
    pub graph: Graph,
    pub query: Option<(usize, usize)>,
    pub answer_value: u64,
    pub answer_nodes: Vec<usize>,
    pub reasoning: String,
    pub modality: Modality,
    pub image_png: Option<Vec<u8>>,
}

impl Exemplar {
    fn push_segments(self, index: usize, kind: TechniqueKind, segments: &mut Vec<Segment>) {
        let mut header = format!("Example {index}.\n\n{}", input_text(self.modality, &self.graph));
        if let Some((u, v)) = self.query {
            header.push_str(&format!("\n\nThe queried nodes are {u} and {v}."));
        }
        segments.push(Segment::Text { role: Role::User, text: header });
        if let Some(png) = self.image_png {
            segments.push(Segment::ImagePng { png });
        }
        let mut solution = String::from("Worked solution: ");
        if kind == TechniqueKind::SoAL {
            solution.push_str("reading the adjacency list off the image gives:\n");
            solution.push_str(self.graph.adjacency_list_text().trim_end());
            solution.push_str("\n");
        }
        if kind == TechniqueKind::CoT || kind == TechniqueKind::SoAL {
            solution.push_str(&self.reasoning);
            solution.push('\n');
        }
        let nodes: Vec<String> = self.answer_nodes.iter().map(|v| v.to_string()).collect();
        solution.push_str(&format!(
            "ANSWER value={} nodes=[{}]",
            self.answer_value,
            nodes.join(",")
        ));
        segments.push(Segment::Text { role: Role::User, text: solution });
    }
}

// Fixed fixture graphs, chosen disjoint from every benchmark. The first has
// 5 nodes, the second 7.
fn fixture_graphs() -> (Graph, Graph) {
    let a = Graph::new(5, &[(0, 1), (0, 2), (1, 2), (1, 3), (2, 4), (3, 4)]).unwrap();
    let b = Graph::new(
        7,
        &[(0, 1), (0, 2), (1, 2), (2, 3), (3, 4), (4, 5), (4, 6), (5, 6)],
    )
    .unwrap();
    (a, b)
}

const EXEMPLAR_LAYOUT_SEED: u64 = 811;
const EXEMPLAR_FD_ITERATIONS: usize = 400;
const EXEMPLAR_IMPROVE_BUDGET: usize = 300;

/// Two worked exemplars for the given task, rendered in the matching
/// modality. Answers are produced by the exact oracles at call time.
pub fn few_shot_exemplars(task: Task, modality: Modality) -> Result<Vec<Exemplar>> {
    let (a, b) = fixture_graphs();
    let queries: [Option<(usize, usize)>; 2] = match task {
        Task::CoNe => [Some((0, 3)), Some((0, 1))],
        Task::ShPa => [Some((0, 4)), Some((0, 5))],
        Task::MaxC | Task::MinVC => [None, None],
    };
    let mut out = Vec::with_capacity(2);
    for (which, (graph, query)) in [(0usize, (a, queries[0])), (1, (b, queries[1]))] {
        let (value, nodes, reasoning) = solve_exemplar(&graph, task, query)?;
        let image_png = if modality.bears_image() {
            Some(exemplar_image(which, &graph, modality)?)
        } else {
            None
        };
        out.push(Exemplar {
            graph,
            query,
            answer_value: value,
            answer_nodes: nodes,
            reasoning,
            modality,
            image_png,
        });
    }
    Ok(out)
}

fn solve_exemplar(
    g: &Graph,
    task: Task,
    query: Option<(usize, usize)>,
) -> Result<(u64, Vec<usize>, String)> {
    match task {
        Task::CoNe => {
            let (u, v) = query.expect("pair task");
            let common = g.common_neighbors(u, v)?;
            let reasoning = format!(
                "The neighbors of {u} are {:?} and the neighbors of {v} are {:?}; the nodes appearing in both lists are {:?}, so the count is {}.",
                g.neighbors(u)?,
                g.neighbors(v)?,
                common,
                common.len()
            );
            Ok((common.len() as u64, common, reasoning))
        }
        Task::ShPa => {
            let (u, v) = query.expect("pair task");
            let sp = g
                .shortest_path(u, v)?
                .ok_or_else(|| Error::PromptConfig("exemplar pair is disconnected".into()))?;
            let reasoning = format!(
                "Exploring outward from node {u} level by level, node {v} is first reached after {} steps; one shortest path is {:?}.",
                sp.length, sp.nodes
            );
            Ok((sp.length as u64, sp.nodes, reasoning))
        }
        Task::MaxC => {
            let opt = g.max_clique()?;
            let reasoning = format!(
                "Every two nodes of {:?} are joined by an edge, so it is a clique of size {}; checking all larger candidate sets shows none is fully connected, so the maximum is {}.",
                opt.nodes, opt.size, opt.size
            );
            Ok((opt.size as u64, opt.nodes, reasoning))
        }
        Task::MinVC => {
            let opt = g.min_vertex_cover()?;
            let reasoning = format!(
                "Every edge of the graph has at least one endpoint in {:?}, so it is a vertex cover of size {}; no smaller set touches all edges, so the minimum is {}.",
                opt.nodes, opt.size, opt.size
            );
            Ok((opt.size as u64, opt.nodes, reasoning))
        }
    }
}

// Exemplar drawings are fixed per (fixture, modality paradigm); cache the
// rendered PNGs since prompts are rebuilt for every matrix cell.
fn exemplar_image(which: usize, g: &Graph, modality: Modality) -> Result<Vec<u8>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, Modality), Vec<u8>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key_modality = match modality {
        Modality::SlM => Modality::SlV,
        Modality::OrM => Modality::OrV,
        Modality::ISlM => Modality::ISlV,
        other => other,
    };
    if let Some(png) = cache.lock().unwrap().get(&(which, key_modality)) {
        return Ok(png.clone());
    }
    let drawing = exemplar_drawing(g, key_modality)?;
    let style = RenderStyle::default();
    let png = rasterize(&render_svg(&drawing, &style)?, &style)?;
    cache
        .lock()
        .unwrap()
        .insert((which, key_modality), png.clone());
    Ok(png)
}

fn exemplar_drawing(g: &Graph, modality: Modality) -> Result<Drawing> {
    match modality.paradigm().expect("image-bearing modality") {
        Paradigm::Orthogonal => layout_orthogonal(g, EXEMPLAR_LAYOUT_SEED),
        Paradigm::StraightLine => {
            let d = layout_force_directed(g, EXEMPLAR_FD_ITERATIONS, EXEMPLAR_LAYOUT_SEED)?;
            if modality.improved() {
                improve_drawing(&d, EXEMPLAR_IMPROVE_BUDGET, EXEMPLAR_LAYOUT_SEED)
            } else {
                Ok(d)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::{sample_instances, to_graph6};
    use crate::graph::Graph;

    fn test_graph() -> Graph {
        Graph::new(6, &[(0, 1), (0, 2), (1, 2), (2, 3), (3, 4), (3, 5), (4, 5)]).unwrap()
    }

    fn instance(task: Task) -> (Graph, TaskInstance) {
        let g = test_graph();
        let inst = sample_instances(&g, "t", task, 1, 3).unwrap().remove(0);
        (g, inst)
    }

    fn fake_png() -> Vec<u8> {
        b"\x89PNG\r\n\x1a\nfake".to_vec()
    }

    #[test]
    fn txt_std_zero_contains_adjacency_and_query() {
        let (g, inst) = instance(Task::CoNe);
        let technique = Technique::new(TechniqueKind::Std, Shots::Zero);
        let bundle = build_prompt(&inst, &g, Modality::Txt, technique, None, None).unwrap();
        bundle.validate().unwrap();
        let all: Vec<&str> = bundle.text_segments().collect();
        let joined = all.join("\n");
        assert!(joined.contains(&g.adjacency_list_text().trim_end().to_string()));
        let (u, v) = inst.query.unwrap();
        assert!(joined.contains(&format!("nodes {u} and {v}")));
        assert_eq!(bundle.image_count(), 0);
    }

    #[test]
    fn soal_segment_ordering_is_stable() {
        let (g, inst) = instance(Task::ShPa);
        let technique = Technique::new(TechniqueKind::SoAL, Shots::Zero);
        let bundle =
            build_prompt(&inst, &g, Modality::SlV, technique, None, Some(&fake_png())).unwrap();
        let kinds: Vec<String> = bundle
            .segments
            .iter()
            .map(|s| match s {
                Segment::ImagePng { .. } => "image".to_string(),
                Segment::Text { text, .. } => {
                    if text.contains("first write the full adjacency list") {
                        "soal".into()
                    } else if text.contains("ANSWER value=<number>") {
                        "schema".into()
                    } else if text.contains("Task: determine") {
                        "task".into()
                    } else {
                        "role".into()
                    }
                }
            })
            .collect();
        assert_eq!(kinds, ["role", "image", "soal", "task", "schema"]);
    }

    #[test]
    fn soal_requires_an_image_modality() {
        let (g, inst) = instance(Task::CoNe);
        let technique = Technique::new(TechniqueKind::SoAL, Shots::Zero);
        assert!(build_prompt(&inst, &g, Modality::Txt, technique, None, None).is_err());
    }

    #[test]
    fn image_presence_must_match_modality() {
        let (g, inst) = instance(Task::MaxC);
        let std0 = Technique::new(TechniqueKind::Std, Shots::Zero);
        assert!(build_prompt(&inst, &g, Modality::SlV, std0, None, None).is_err());
        assert!(build_prompt(&inst, &g, Modality::Txt, std0, None, Some(&fake_png())).is_err());
    }

    #[test]
    fn cot_few_bundles_carry_two_worked_exemplars() {
        let (g, inst) = instance(Task::MaxC);
        let technique = Technique::new(TechniqueKind::CoT, Shots::Few);
        let bundle =
            build_prompt(&inst, &g, Modality::OrM, technique, None, Some(&fake_png())).unwrap();
        bundle.validate().unwrap();
        assert_eq!(bundle.image_count(), 3); // main + one per exemplar
        let exemplar_answers: Vec<&str> = bundle
            .text_segments()
            .filter(|t| t.starts_with("Worked solution:"))
            .collect();
        assert_eq!(exemplar_answers.len(), 2);
        for text in exemplar_answers {
            assert!(text.contains("ANSWER value="));
        }
        // Mixed exemplars also carry the adjacency list.
        let headers: Vec<&str> = bundle
            .text_segments()
            .filter(|t| t.starts_with("Example "))
            .collect();
        assert!(headers.iter().all(|h| h.contains("adjacency list")));
    }

    #[test]
    fn exemplar_answers_reverify_against_oracles() {
        for task in Task::ALL {
            let exemplars = few_shot_exemplars(task, Modality::Txt).unwrap();
            assert_eq!(exemplars.len(), 2);
            for ex in exemplars {
                let nodes: Vec<u64> = ex.answer_nodes.iter().map(|&v| v as u64).collect();
                match task {
                    Task::CoNe => {
                        let (u, v) = ex.query.unwrap();
                        let common = ex.graph.common_neighbors(u, v).unwrap();
                        assert_eq!(ex.answer_value, common.len() as u64);
                        assert_eq!(ex.answer_nodes, common);
                    }
                    Task::ShPa => {
                        let (u, v) = ex.query.unwrap();
                        let sp = ex.graph.shortest_path(u, v).unwrap().unwrap();
                        assert_eq!(ex.answer_value, sp.length as u64);
                        assert_eq!(ex.graph.validate_path(&nodes), sp.length);
                    }
                    Task::MaxC => {
                        let opt = ex.graph.max_clique().unwrap();
                        assert_eq!(ex.answer_value, opt.size as u64);
                        assert_eq!(
                            ex.graph.validate_clique(&nodes),
                            opt.size * (opt.size - 1) / 2
                        );
                    }
                    Task::MinVC => {
                        let opt = ex.graph.min_vertex_cover().unwrap();
                        assert_eq!(ex.answer_value, opt.size as u64);
                        assert_eq!(ex.graph.validate_cover(&nodes), 0);
                    }
                }
            }
        }
    }

    #[test]
    fn exemplar_graphs_disjoint_from_benchmark_fixtures() {
        let (a, b) = fixture_graphs();
        let fixture_codes = [to_graph6(&a), to_graph6(&b)];
        for seed in 1..=5 {
            let g = crate::bench::generate_planted_clique(12, 4, 0.45, seed).unwrap();
            assert!(!fixture_codes.contains(&to_graph6(&g)));
        }
    }

    #[test]
    fn zero_shot_requests_have_no_exemplars() {
        let (g, inst) = instance(Task::CoNe);
        let technique = Technique::new(TechniqueKind::Std, Shots::Zero);
        let bundle = build_prompt(&inst, &g, Modality::Txt, technique, None, None).unwrap();
        assert_eq!(bundle.exemplar_count(), 0);
    }

    #[test]
    fn full_matrix_smoke_and_no_code_requests() {
        let re = regex::Regex::new(r"(?i)\b(code|program|script)\b").unwrap();
        let png = fake_png();
        for task in Task::ALL {
            let (g, inst) = instance(task);
            for modality in Modality::ALL {
                for technique in Technique::WITH_SOAL {
                    if technique.kind == TechniqueKind::SoAL && !modality.bears_image() {
                        continue;
                    }
                    let image = modality.bears_image().then_some(png.as_slice());
                    let bundle = build_prompt(&inst, &g, modality, technique, None, image)
                        .unwrap_or_else(|e| panic!("{task}/{modality}/{technique}: {e}"));
                    bundle.validate().unwrap();
                    for text in bundle.text_segments() {
                        assert!(!re.is_match(text), "{task}/{modality}/{technique}: {text}");
                    }
                }
            }
        }
    }

    #[test]
    fn drawing_paradigm_mismatch_is_a_config_error() {
        let (g, inst) = instance(Task::MaxC);
        let d = crate::layout::layout_orthogonal(&g, 0).unwrap();
        let technique = Technique::new(TechniqueKind::Std, Shots::Zero);
        let err = build_prompt(&inst, &g, Modality::SlV, technique, Some(&d), Some(&fake_png()));
        assert!(err.is_err());
    }

    #[test]
    fn prompts_are_deterministic() {
        let (g, inst) = instance(Task::ShPa);
        let technique = Technique::new(TechniqueKind::CoT, Shots::Few);
        let a = build_prompt(&inst, &g, Modality::SlM, technique, None, Some(&fake_png())).unwrap();
        let b = build_prompt(&inst, &g, Modality::SlM, technique, None, Some(&fake_png())).unwrap();
        assert_eq!(a, b);
    }
}
