//! JSON file formats: datasets, motif sets, correlation matrices and single
//! graphs. Edge indices are 0-based; edge lists are written in canonical
//! sorted order.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{ClassSign, Edge, Graph, InjectionRecord, LabeledDataset, Motif};

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EdgeEntry {
    Plain(usize, usize),
    Weighted(usize, usize, f64),
}

impl EdgeEntry {
    fn parts(&self) -> (usize, usize, Option<f64>) {
        match *self {
            EdgeEntry::Plain(u, v) => (u, v, None),
            EdgeEntry::Weighted(u, v, w) => (u, v, Some(w)),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct GraphEntry {
    label: u8,
    edges: Vec<EdgeEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
struct DatasetFile {
    n: usize,
    graphs: Vec<GraphEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    injections: Option<Vec<Vec<i8>>>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct GraphFile {
    pub n: usize,
    pub edges: Vec<EdgeEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
struct MotifEntry {
    id: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    class: Option<u8>,
    edges: Vec<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rho: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cs: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct MotifFile {
    n: usize,
    motifs: Vec<MotifEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CorrelationFile {
    n_m: usize,
    entries: Vec<(usize, usize, f64)>,
}

/// Optional per-motif annotations carried in motif files.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MotifMeta {
    /// Injection probability used when the motif was synthesised.
    pub rho: Option<f64>,
    /// Observed fraction of graphs the generator perturbed with this motif.
    pub rate: Option<f64>,
    /// Cross-support score assigned by the ranker.
    pub cs: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MotifSet {
    pub n: usize,
    pub motifs: Vec<Motif>,
    pub meta: Vec<MotifMeta>,
}

impl MotifSet {
    pub fn new(n: usize, motifs: Vec<Motif>) -> Self {
        let meta = vec![MotifMeta::default(); motifs.len()];
        MotifSet { n, motifs, meta }
    }
}

fn format_err(err: Error) -> Error {
    match err {
        Error::Format(_) | Error::Io(_) => err,
        other => Error::Format(other.to_string()),
    }
}

fn graph_from_entries(n: usize, entries: &[EdgeEntry]) -> Result<Graph> {
    if entries.iter().any(|e| matches!(e, EdgeEntry::Weighted(..))) {
        Graph::from_weighted_edges(
            n,
            entries.iter().map(|e| {
                let (u, v, w) = e.parts();
                (u, v, w.unwrap_or(1.0))
            }),
        )
    } else {
        Graph::from_edges(n, entries.iter().map(|e| (e.parts().0, e.parts().1)))
    }
}

pub fn graph_entries(g: &Graph) -> Vec<EdgeEntry> {
    if g.is_weighted() {
        g.weighted_edges()
            .map(|(e, w)| EdgeEntry::Weighted(e.u(), e.v(), w))
            .collect()
    } else {
        g.edges().map(|e| EdgeEntry::Plain(e.u(), e.v())).collect()
    }
}

pub fn dataset_from_str(s: &str) -> Result<LabeledDataset> {
    let file: DatasetFile = serde_json::from_str(s)?;
    let mut graphs = Vec::with_capacity(file.graphs.len());
    let mut labels = Vec::with_capacity(file.graphs.len());
    for entry in &file.graphs {
        graphs.push(graph_from_entries(file.n, &entry.edges).map_err(format_err)?);
        labels.push(entry.label);
    }
    let injections = match file.injections {
        Some(rows) => {
            let motifs = rows.first().map_or(0, Vec::len);
            Some(InjectionRecord::new(rows, motifs)?)
        }
        None => None,
    };
    LabeledDataset::new(file.n, graphs, labels, injections).map_err(format_err)
}

pub fn dataset_to_string(d: &LabeledDataset) -> String {
    let file = DatasetFile {
        n: d.n(),
        graphs: d
            .graphs()
            .iter()
            .zip(d.labels())
            .map(|(g, &label)| GraphEntry {
                label,
                edges: graph_entries(g),
            })
            .collect(),
        injections: d.injections().map(|inj| inj.rows().to_vec()),
    };
    let mut out = serde_json::to_string(&file).expect("dataset serialization");
    out.push('\n');
    out
}

pub fn graph_from_str(s: &str) -> Result<Graph> {
    let file: GraphFile = serde_json::from_str(s)?;
    graph_from_entries(file.n, &file.edges).map_err(format_err)
}

pub fn graph_to_string(g: &Graph) -> String {
    let file = GraphFile {
        n: g.n(),
        edges: graph_entries(g),
    };
    let mut out = serde_json::to_string(&file).expect("graph serialization");
    out.push('\n');
    out
}

pub fn motifs_from_str(s: &str) -> Result<MotifSet> {
    let file: MotifFile = serde_json::from_str(s)?;
    let mut motifs = Vec::with_capacity(file.motifs.len());
    let mut meta = Vec::with_capacity(file.motifs.len());
    for entry in file.motifs {
        let class = entry.class.map(ClassSign::from_label).transpose()?;
        let edges = entry
            .edges
            .iter()
            .map(|&(u, v)| Edge::new(u, v))
            .collect::<Result<Vec<_>>>()
            .map_err(format_err)?;
        motifs.push(Motif::new(entry.id, file.n, edges, class).map_err(format_err)?);
        meta.push(MotifMeta {
            rho: entry.rho,
            rate: entry.rate,
            cs: entry.cs,
        });
    }
    Ok(MotifSet {
        n: file.n,
        motifs,
        meta,
    })
}

pub fn motifs_to_string(set: &MotifSet) -> String {
    let file = MotifFile {
        n: set.n,
        motifs: set
            .motifs
            .iter()
            .enumerate()
            .map(|(i, m)| {
                let meta = set.meta.get(i).copied().unwrap_or_default();
                MotifEntry {
                    id: m.id(),
                    class: m.class().map(ClassSign::label),
                    edges: m.edges().iter().map(|e| (e.u(), e.v())).collect(),
                    rho: meta.rho,
                    rate: meta.rate,
                    cs: meta.cs,
                }
            })
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&file).expect("motif serialization");
    out.push('\n');
    out
}

/// Parses a correlation file into a dense `n_m x n_m` matrix. Entries are
/// mirrored across the diagonal, the diagonal is forced to 1 and unlisted
/// entries are 0.
pub fn correlation_from_str(s: &str) -> Result<Vec<Vec<f64>>> {
    let file: CorrelationFile = serde_json::from_str(s)?;
    let mut c = identity(file.n_m);
    for (i, j, v) in file.entries {
        if i >= file.n_m || j >= file.n_m {
            return Err(Error::Format(format!(
                "correlation entry ({i}, {j}) outside a {0}x{0} matrix",
                file.n_m
            )));
        }
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::Format(format!("correlation entry {v} not in [0, 1]")));
        }
        if i != j {
            c[i][j] = v;
            c[j][i] = v;
        }
    }
    Ok(c)
}

pub fn correlation_to_string(c: &[Vec<f64>]) -> String {
    let mut entries = Vec::new();
    for (i, row) in c.iter().enumerate() {
        for (j, &v) in row.iter().enumerate().skip(i + 1) {
            if v != 0.0 {
                entries.push((i, j, v));
            }
        }
    }
    let file = CorrelationFile {
        n_m: c.len(),
        entries,
    };
    serde_json::to_string_pretty(&file).expect("correlation serialization") + "\n"
}

pub fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

pub fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

pub fn read_dataset(path: &Path) -> Result<LabeledDataset> {
    dataset_from_str(&read_to_string(path)?)
}

pub fn read_motifs(path: &Path) -> Result<MotifSet> {
    motifs_from_str(&read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn dataset_parse_canonicalizes() {
        let src = r#"{"n": 4, "graphs": [{"label": 1, "edges": [[2, 1], [0, 3], [1, 2]]}, {"label": 0, "edges": []}]}"#;
        let d = dataset_from_str(src).unwrap();
        assert_eq!(
            dataset_to_string(&d),
            "{\"n\":4,\"graphs\":[{\"label\":1,\"edges\":[[0,3],[1,2]]},{\"label\":0,\"edges\":[]}]}\n"
        );
    }

    #[test]
    fn malformed_inputs_are_format_errors() {
        for src in [
            "{\"n\": 3, \"graphs\": [{\"label\": 0, \"edges\": [[1, 1]]}]}",
            "{\"n\": 3, \"graphs\": [{\"label\": 0, \"edges\": [[1, 5]]}]}",
            "{\"n\": 3, \"graphs\": [{\"label\": 2, \"edges\": []}]}",
            "{\"n\": 3, \"graphs\": [",
            "{\"n\": 3, \"graphs\": [{\"label\": 0, \"edges\": []}], \"injections\": [[1], [0]]}",
        ] {
            assert!(matches!(dataset_from_str(src), Err(Error::Format(_))), "{src}");
        }
        let disconnected = r#"{"n": 5, "motifs": [{"id": 0, "edges": [[0, 1], [2, 3]]}]}"#;
        assert!(matches!(motifs_from_str(disconnected), Err(Error::Format(_))));
    }

    #[test]
    fn correlation_is_symmetrized() {
        let c = correlation_from_str(r#"{"n_m": 3, "entries": [[0, 2, 0.5], [1, 1, 0.2]]}"#).unwrap();
        assert_eq!(c[0][2], 0.5);
        assert_eq!(c[2][0], 0.5);
        assert_eq!(c[1][1], 1.0);
        assert_eq!(correlation_from_str(&correlation_to_string(&c)).unwrap(), c);
    }

    #[test]
    fn motif_file_roundtrip_keeps_metadata() {
        let m = Motif::from_pairs(7, 6, [(0, 1), (1, 2)], Some(ClassSign::Positive)).unwrap();
        let mut set = MotifSet::new(6, vec![m]);
        set.meta[0].rho = Some(0.4);
        set.meta[0].cs = Some(1.5);
        let text = motifs_to_string(&set);
        assert_eq!(motifs_from_str(&text).unwrap(), set);
    }

    proptest! {
        #[test]
        fn serialization_is_canonical(
            graphs in prop::collection::vec(prop::collection::vec((0usize..9, 0usize..9), 0..20), 1..5)
        ) {
            let gs: Vec<Graph> = graphs
                .iter()
                .map(|es| Graph::from_edges(9, es.iter().copied().filter(|(a, b)| a != b)).unwrap())
                .collect();
            let labels = (0..gs.len()).map(|i| (i % 2) as u8).collect();
            let d = LabeledDataset::new(9, gs, labels, None).unwrap();
            let text = dataset_to_string(&d);
            let back = dataset_from_str(&text).unwrap();
            prop_assert_eq!(&back, &d);
            prop_assert_eq!(dataset_to_string(&back), text);
        }
    }
}
