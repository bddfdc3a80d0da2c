use std::io::Write;

use serde::Serialize;

use crate::cycles::{conjectured_entropy, CycleBasis};
use crate::error::{Error, Result};
use crate::graph::{ArcTable, Graph, GraphParams};
use crate::hilbert::{self, StateVector};

use super::{
    color_density_from_gram, mean_spin_z, page_entropy, particle_gram, position_density_from_gram, PageEntropy,
};

/// Largest `|sum_x p(x) - 1|` accepted at a measurement.
pub const PROBABILITY_TOLERANCE: f64 = 1e-10;
/// Slack on the entropy bounds `0 <= S <= log2 dim`.
const ENTROPY_SLACK: f64 = 1e-9;

/// Observables at one measured time step.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementRow {
    pub t: usize,
    pub s_x: f64,
    pub s_c: f64,
    pub s_s: f64,
    pub sz_mean: f64,
    pub positions: Vec<f64>,
}

fn check_entropy(name: &str, value: f64, dim: usize) -> Result<()> {
    let bound = (dim as f64).log2();
    if !(-ENTROPY_SLACK..=bound + ENTROPY_SLACK).contains(&value) {
        return Err(Error::InvalidDensity(format!(
            "{name} = {value} outside [0, log2 {dim} = {bound}]"
        )));
    }
    Ok(())
}

/// Evaluates every observable of `psi` and checks their bounds.
pub fn measure(t: usize, psi: &StateVector, arcs: &ArcTable) -> Result<MeasurementRow> {
    let gram = particle_gram(psi);
    let rho_x = position_density_from_gram(&gram, arcs);
    let rho_c = color_density_from_gram(&gram, arcs);
    let positions: Vec<f64> = (0..arcs.num_nodes())
        .map(|x| {
            (arcs.offset(x)..arcs.offset(x + 1))
                .map(|a| gram.matrix()[(a, a)].re)
                .sum()
        })
        .collect();
    let total: f64 = positions.iter().sum();
    if (total - 1.0).abs() > PROBABILITY_TOLERANCE {
        return Err(Error::InvalidDensity(format!(
            "position probabilities sum to {total} at t = {t}"
        )));
    }
    let row = MeasurementRow {
        t,
        s_x: rho_x.entropy()?,
        s_c: rho_c.entropy()?,
        s_s: gram.entropy()?,
        sz_mean: mean_spin_z(psi),
        positions,
    };
    let n = arcs.num_nodes();
    check_entropy("S_x", row.s_x, n)?;
    check_entropy("S_c", row.s_c, arcs.d_max())?;
    check_entropy("S_s", row.s_s, arcs.num_arcs().min(1 << n))?;
    Ok(row)
}

/// Graph description embedded in run summaries.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphMeta {
    pub family: String,
    pub num_nodes: usize,
    pub num_edges: usize,
    pub mean_degree: f64,
    pub d_max: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_rewire: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_edge: Option<f64>,
    pub seed: u64,
    pub hilbert_dimension: usize,
}

impl GraphMeta {
    pub fn new(graph: &Graph) -> Result<Self> {
        let (k, p_rewire, p_edge) = match graph.params() {
            GraphParams::WattsStrogatz { k, p_rewire } => (Some(k), Some(p_rewire), None),
            GraphParams::ErdosRenyi { p_edge } => (None, None, Some(p_edge)),
            GraphParams::Explicit => (None, None, None),
        };
        Ok(GraphMeta {
            family: graph.family().to_string(),
            num_nodes: graph.num_nodes(),
            num_edges: graph.num_edges(),
            mean_degree: graph.mean_degree(),
            d_max: graph.degrees().into_iter().max().unwrap_or(0),
            k,
            p_rewire,
            p_edge,
            seed: graph.seed(),
            hilbert_dimension: hilbert::dimension(graph)?,
        })
    }
}

/// End-of-run values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    /// Mean spin entropy over rows with `t > 3 t_max / 4`.
    #[serde(rename = "S_s_late")]
    pub s_s_late: f64,
    /// Spin entropy at the last measured step.
    #[serde(rename = "S_s_final")]
    pub s_s_final: f64,
    /// `log2` of the minimum cycle basis length; `None` for trees.
    #[serde(rename = "S_C")]
    pub s_c: Option<f64>,
    #[serde(rename = "S_page")]
    pub s_page: f64,
    pub page_approximation_valid: bool,
    pub ratio_page: f64,
    pub ratio_conjecture: Option<f64>,
    #[serde(rename = "B_size")]
    pub b_size: usize,
    #[serde(rename = "B_total_length")]
    pub b_total_length: usize,
    pub t_max: usize,
    pub late_rows: usize,
    pub graph: GraphMeta,
}

/// Time series plus summary of one simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub rows: Vec<MeasurementRow>,
    pub summary: RunSummary,
}

impl RunRecord {
    pub fn new(rows: Vec<MeasurementRow>, graph: &Graph, basis: &CycleBasis, t_max: usize) -> Result<Self> {
        let last = rows
            .last()
            .ok_or_else(|| Error::InvalidParameters("run recorded no measurements".into()))?;
        let late: Vec<f64> = rows.iter().filter(|r| 4 * r.t > 3 * t_max).map(|r| r.s_s).collect();
        let s_s_late = if late.is_empty() {
            last.s_s
        } else {
            late.iter().sum::<f64>() / late.len() as f64
        };
        let PageEntropy {
            value: s_page,
            approximation_valid,
        } = page_entropy(2 * graph.num_edges(), hilbert::dimension(graph)?);
        let s_c = conjectured_entropy(basis).ok();
        let summary = RunSummary {
            s_s_late,
            s_s_final: last.s_s,
            s_c,
            s_page,
            page_approximation_valid: approximation_valid,
            ratio_page: s_s_late / s_page,
            ratio_conjecture: s_c.map(|c| s_s_late / c),
            b_size: basis.size(),
            b_total_length: basis.total_length(),
            t_max,
            late_rows: late.len(),
            graph: GraphMeta::new(graph)?,
        };
        Ok(RunRecord { rows, summary })
    }

    fn window(&self, from: usize, to: usize) -> impl Iterator<Item = &MeasurementRow> {
        self.rows.iter().filter(move |r| (from..=to).contains(&r.t))
    }

    /// Mean of `p(x, t)` over measured `t` in `[from, to]`.
    pub fn mean_positions(&self, from: usize, to: usize) -> Option<Vec<f64>> {
        let rows: Vec<_> = self.window(from, to).collect();
        if rows.is_empty() {
            return None;
        }
        let n = rows[0].positions.len();
        let mut mean = vec![0.0; n];
        for row in &rows {
            for (m, p) in mean.iter_mut().zip(&row.positions) {
                *m += p;
            }
        }
        Some(mean.into_iter().map(|m| m / rows.len() as f64).collect())
    }

    /// Mean of `s_z` over measured `t` in `[from, to]`.
    pub fn mean_sz(&self, from: usize, to: usize) -> Option<f64> {
        let values: Vec<f64> = self.window(from, to).map(|r| r.sz_mean).collect();
        (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
    }

    /// `t,S_x,S_c,S_s,sz_mean[,p_0,...]`; floats use shortest round-trip form.
    pub fn write_timeseries_csv(&self, out: impl Write, with_positions: bool) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        let n = self.summary.graph.num_nodes;
        let mut header: Vec<String> = ["t", "S_x", "S_c", "S_s", "sz_mean"].iter().map(|s| s.to_string()).collect();
        if with_positions {
            header.extend((0..n).map(|x| format!("p_{x}")));
        }
        writer.write_record(&header)?;
        for row in &self.rows {
            let mut record = vec![
                row.t.to_string(),
                row.s_x.to_string(),
                row.s_c.to_string(),
                row.s_s.to_string(),
                row.sz_mean.to_string(),
            ];
            if with_positions {
                record.extend(row.positions.iter().map(f64::to_string));
            }
            writer.write_record(&record)?;
        }
        writer.flush()?;
        Ok(())
    }

    pub fn write_summary_json(&self, mut out: impl Write) -> Result<()> {
        serde_json::to_writer_pretty(&mut out, &self.summary)?;
        writeln!(out)?;
        Ok(())
    }
}
