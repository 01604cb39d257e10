//! File formats: CSV tables, graph and calibration JSON, model text.

use std::fs;
use std::path::{Path, PathBuf};

use annealsched::calibration::CalibrationState;
use annealsched::demand::BookingRequest;
use annealsched::model::io::ModelFile;
use annealsched::model::{MvvcProblem, Vartype};
use annealsched::schedule::CurvePoint;
use annealsched::solvers::{Sample, SampleSet};
use annealsched::Graph;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Output location: absolute paths are kept, relative ones go under `dir`.
pub fn output_path(dir: &Path, file: &Path) -> PathBuf {
    if file.is_absolute() {
        file.to_path_buf()
    } else {
        dir.join(file)
    }
}

fn create_parent(path: &Path) -> CliResult<()> {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => fs::create_dir_all(p).map_err(|e| CliError::output(p, e)),
        _ => Ok(()),
    }
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    create_parent(path)?;
    fs::write(path, text).map_err(|e| CliError::output(path, e))
}

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::input(path, e))
}

pub fn write_csv<R: Serialize>(path: &Path, rows: impl IntoIterator<Item = R>) -> CliResult<()> {
    create_parent(path)?;
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::output(path, e))?;
    for row in rows {
        w.serialize(row).map_err(|e| CliError::output(path, e))?;
    }
    w.flush().map_err(|e| CliError::output(path, e))
}

pub fn read_csv<R: DeserializeOwned>(path: &Path) -> CliResult<Vec<R>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| CliError::input(path, e))?;
    r.deserialize().collect::<Result<Vec<R>, _>>().map_err(|e| CliError::input(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::output(path, e))?;
    text.push('\n');
    write_text(path, &text)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    serde_json::from_str(&read_text(path)?).map_err(|e| CliError::input(path, e))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StreamRow {
    pub id: usize,
    pub start_day: u32,
    pub duration: u32,
    pub beds: u32,
}

impl From<&BookingRequest> for StreamRow {
    fn from(r: &BookingRequest) -> Self {
        Self { id: r.id, start_day: r.start_day, duration: r.duration, beds: r.beds }
    }
}

impl From<StreamRow> for BookingRequest {
    fn from(r: StreamRow) -> Self {
        Self { id: r.id, beds: r.beds, start_day: r.start_day, duration: r.duration }
    }
}

pub fn read_stream(path: &Path) -> CliResult<Vec<BookingRequest>> {
    let rows: Vec<StreamRow> = read_csv(path)?;
    if let Some(r) = rows.iter().find(|r| r.beds == 0 || r.duration == 0) {
        return Err(CliError::input(path, format!("request {} needs positive beds and duration", r.id)));
    }
    Ok(rows.into_iter().map(BookingRequest::from).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub rejection_index: usize,
    pub mean_filling_factor: f64,
    pub stderr: f64,
    pub n: usize,
}

impl From<&CurvePoint> for CurveRow {
    fn from(p: &CurvePoint) -> Self {
        Self {
            rejection_index: p.rejection_index,
            mean_filling_factor: p.mean_filling_factor,
            stderr: p.stderr,
            n: p.n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRow {
    pub energy: f64,
    pub count: usize,
    /// One character per variable: `1` for a set bit or an up spin.
    pub bitstring: String,
}

pub fn encode_state(state: &[i8]) -> String {
    state.iter().map(|&v| if v == 1 { '1' } else { '0' }).collect()
}

pub fn decode_state(bits: &str, vartype: Vartype) -> Option<Vec<i8>> {
    let low = vartype.values()[0];
    bits.chars()
        .map(|c| match c {
            '1' => Some(1),
            '0' => Some(low),
            _ => None,
        })
        .collect()
}

pub fn sample_rows(samples: &SampleSet<f64>) -> Vec<SampleRow> {
    samples.iter().map(|s| SampleRow { energy: s.energy, count: s.count, bitstring: encode_state(&s.state) }).collect()
}

/// Reads a samples table back, re-checking every stored energy against `model`.
pub fn read_samples(path: &Path, model: &ModelFile<f64>) -> CliResult<SampleSet<f64>> {
    let rows: Vec<SampleRow> = read_csv(path)?;
    let mut records = Vec::with_capacity(rows.len());
    for row in rows {
        let state = decode_state(&row.bitstring, model.vartype())
            .ok_or_else(|| CliError::input(path, format!("bad bitstring `{}`", row.bitstring)))?;
        records.push(Sample { state, energy: row.energy, count: row.count });
    }
    let set = match model {
        ModelFile::Qubo(q) => SampleSet::from_records(q, records),
        ModelFile::Ising(s) => SampleSet::from_records(&s.model, records),
    };
    set.map_err(|e| CliError::input(path, e))
}

/// MVVC instance on disk: the overlap graph with one value per vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    /// Request id behind each vertex.
    pub request_ids: Vec<usize>,
    pub num_vertices: usize,
    pub edges: Vec<(usize, usize)>,
    pub values: Vec<f64>,
}

impl GraphFile {
    pub fn from_problem(problem: &MvvcProblem<f64>, request_ids: Vec<usize>) -> Self {
        Self {
            request_ids,
            num_vertices: problem.graph.num_vertices(),
            edges: problem.graph.edges().to_vec(),
            values: problem.values.clone(),
        }
    }

    pub fn graph(&self) -> CliResult<Graph> {
        Ok(Graph::new(self.num_vertices, self.edges.iter().copied())?)
    }

    pub fn problem(&self) -> CliResult<MvvcProblem<f64>> {
        Ok(MvvcProblem::new(self.graph()?, self.values.clone())?)
    }
}

pub fn read_graph(path: &Path) -> CliResult<GraphFile> {
    let g: GraphFile = read_json(path)?;
    g.problem().map_err(|e| CliError::input(path, e))?;
    Ok(g)
}

pub fn read_calibration(path: &Path) -> CliResult<CalibrationState> {
    let state: CalibrationState = read_json(path)?;
    state.validate().map_err(|e| CliError::input(path, e))?;
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn state_codec() {
        assert_eq!(encode_state(&[1, -1, 1]), "101");
        assert_eq!(decode_state("101", Vartype::Spin).unwrap(), vec![1, -1, 1]);
        assert_eq!(decode_state("101", Vartype::Binary).unwrap(), vec![1, 0, 1]);
        assert!(decode_state("1x1", Vartype::Binary).is_none());
    }

    #[test]
    fn relative_outputs_go_under_the_directory() {
        let dir = Path::new("/tmp/out");
        assert_eq!(output_path(dir, Path::new("a.csv")), PathBuf::from("/tmp/out/a.csv"));
        assert_eq!(output_path(dir, Path::new("/x/a.csv")), PathBuf::from("/x/a.csv"));
    }
}
