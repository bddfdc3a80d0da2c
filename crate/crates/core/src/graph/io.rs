//! JSON persistence for graphs (`cyclewalk-graph-v1`).

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{validate_edges, Family, Graph, GraphParams, RNG_ALGORITHM};

pub const GRAPH_SCHEMA: &str = "cyclewalk-graph-v1";

#[derive(Debug, Serialize, Deserialize)]
struct GraphFile {
    schema: String,
    num_nodes: usize,
    edges: Vec<[usize; 2]>,
    family: Family,
    #[serde(default)]
    params: ParamsFile,
    seed: u64,
    #[serde(default)]
    rng: Option<String>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    p_rewire: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    p_edge: Option<f64>,
}

impl Graph {
    pub fn to_json(&self) -> Result<String> {
        let params = match self.params {
            GraphParams::WattsStrogatz { k, p_rewire } => ParamsFile {
                k: Some(k),
                p_rewire: Some(p_rewire),
                p_edge: None,
            },
            GraphParams::ErdosRenyi { p_edge } => ParamsFile {
                p_edge: Some(p_edge),
                ..ParamsFile::default()
            },
            GraphParams::Explicit => ParamsFile::default(),
        };
        let file = GraphFile {
            schema: GRAPH_SCHEMA.to_string(),
            num_nodes: self.num_nodes,
            edges: self.edges.iter().map(|&(u, v)| [u, v]).collect(),
            family: self.family(),
            params,
            seed: self.seed,
            rng: Some(RNG_ALGORITHM.to_string()),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    /// Parses a graph file and enforces every graph invariant.
    pub fn from_json(text: &str) -> Result<Self> {
        let graph = Self::from_json_relaxed(text)?;
        let report = graph.validate();
        match report.problem() {
            None => Ok(graph),
            Some(problem) => Err(Error::InvalidGraph(problem)),
        }
    }

    /// Parses a graph file, checking only simplicity and node ranges.
    pub fn from_json_relaxed(text: &str) -> Result<Self> {
        let file: GraphFile = serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
        if file.schema != GRAPH_SCHEMA {
            return Err(Error::Malformed(format!(
                "unsupported schema `{}` (expected `{GRAPH_SCHEMA}`)",
                file.schema
            )));
        }
        if file.num_nodes == 0 {
            return Err(Error::Malformed("num_nodes must be positive".into()));
        }
        let params = match (file.family, &file.params) {
            (Family::WattsStrogatz, ParamsFile { k: Some(k), p_rewire: Some(p), p_edge: None }) => {
                GraphParams::WattsStrogatz { k: *k, p_rewire: *p }
            }
            (Family::ErdosRenyi, ParamsFile { k: None, p_rewire: None, p_edge: Some(p) }) => {
                GraphParams::ErdosRenyi { p_edge: *p }
            }
            (Family::Explicit, ParamsFile { k: None, p_rewire: None, p_edge: None }) => GraphParams::Explicit,
            (family, _) => {
                return Err(Error::Malformed(format!("params do not match family `{family}`")));
            }
        };
        let edges: Vec<(usize, usize)> = file.edges.iter().map(|&[u, v]| (u, v)).collect();
        let report = validate_edges(file.num_nodes, &edges);
        if let Some(problem) = report.structural_problem() {
            return Err(Error::Malformed(problem));
        }
        Graph::with_metadata(file.num_nodes, &edges, params, file.seed)
    }
}

pub fn save_graph(graph: &Graph, path: impl AsRef<Path>) -> Result<()> {
    let mut text = graph.to_json()?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn load_graph(path: impl AsRef<Path>) -> Result<Graph> {
    Graph::from_json(&fs::read_to_string(path)?)
}

/// Loads without the connectivity and minimum-degree checks; for analyses
/// such as the cycle basis that are defined on any simple graph.
pub fn load_graph_relaxed(path: impl AsRef<Path>) -> Result<Graph> {
    Graph::from_json_relaxed(&fs::read_to_string(path)?)
}
