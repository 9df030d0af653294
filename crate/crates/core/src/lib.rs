//! Desk-scale harness for evaluating multimodal LLMs on graph-structure
//! tasks: benchmark construction, graph layout and rendering, prompt
//! assembly across modalities and techniques, answer parsing, and
//! hallucination-robust scoring against exact combinatorial oracles.

pub mod bench;
pub mod config;
pub mod error;
pub mod eval;
pub mod geometry;
pub mod graph;
pub mod layout;
pub mod llm;
pub mod prompts;
pub mod render;
pub mod runner;

pub use bench::{Task, TaskInstance};
pub use error::{Error, Result};
pub use graph::{Graph, OptimalSet, ShortestPath, Witness, WitnessKind};
pub use layout::{Drawing, Paradigm, QualityReport};
