//! Frequent connected motif mining and cross-support ranking.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::graph::{pair_at, pair_count, set_jaccard_distance, support, Edge, LabeledDataset, Motif};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinerConfig {
    /// Minimum number of graphs a motif must occur in.
    pub support: usize,
    /// Largest motif size (edges) to grow to.
    pub max_size: usize,
    /// Mine only graphs with this label.
    pub label: Option<u8>,
}

impl MinerConfig {
    pub fn new(support: usize, max_size: usize) -> Self {
        MinerConfig {
            support,
            max_size,
            label: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RankerConfig {
    /// Minimum Jaccard distance to every already selected motif.
    pub dt: f64,
    /// Minimum motif size in edges.
    pub st: usize,
    /// Number of motifs to select.
    pub k: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RankedMotif {
    pub motif: Motif,
    pub cs: f64,
}

struct Pattern {
    edges: Vec<usize>,
    occurrences: BitSet,
}

/// All connected edge sets with `2 <= size <= max_size` occurring in at least
/// `support` graphs, in canonical order (by size, then edge list). Ids are
/// assigned in that order starting from 0.
///
/// Level `k` is built by extending every level `k - 1` pattern with one
/// frequent edge touching it. Every connected set has a connected subset one
/// edge smaller (drop a non-bridge edge or a leaf edge), so this reaches
/// every frequent connected set.
pub fn mine(d: &LabeledDataset, cfg: &MinerConfig) -> Result<Vec<Motif>> {
    let members: Vec<usize> = (0..d.len())
        .filter(|&i| cfg.label.is_none_or(|l| d.label(i) == l))
        .collect();
    if cfg.support == 0 {
        return Err(Error::Parameter("support threshold must be at least 1".into()));
    }
    if cfg.support > members.len() {
        return Err(Error::Parameter(format!(
            "support threshold {} exceeds the {} graphs mined",
            cfg.support,
            members.len()
        )));
    }
    if cfg.max_size < 2 {
        return Err(Error::Parameter(format!("max size {} below 2", cfg.max_size)));
    }
    let n = d.n();
    let mut occurrences = vec![BitSet::new(members.len()); pair_count(n)];
    for (slot, &i) in members.iter().enumerate() {
        for e in d.graph(i).edge_set().iter() {
            occurrences[e].insert(slot);
        }
    }
    let frequent: Vec<usize> = (0..pair_count(n))
        .filter(|&e| occurrences[e].count() >= cfg.support)
        .collect();
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &e in &frequent {
        let edge = pair_at(n, e);
        incident[edge.u()].push(e);
        incident[edge.v()].push(e);
    }

    let mut level: Vec<Pattern> = frequent
        .iter()
        .map(|&e| Pattern {
            edges: vec![e],
            occurrences: occurrences[e].clone(),
        })
        .collect();
    let mut out = Vec::new();
    for _size in 2..=cfg.max_size {
        let grown: Vec<Vec<Pattern>> = level
            .par_iter()
            .map(|p| {
                let mut candidates: Vec<usize> = p
                    .edges
                    .iter()
                    .flat_map(|&e| {
                        let edge = pair_at(n, e);
                        incident[edge.u()].iter().chain(&incident[edge.v()]).copied()
                    })
                    .filter(|c| p.edges.binary_search(c).is_err())
                    .collect();
                candidates.sort_unstable();
                candidates.dedup();
                candidates
                    .into_iter()
                    .filter_map(|c| {
                        let mut occ = p.occurrences.clone();
                        occ.intersect_with(&occurrences[c]);
                        if occ.count() < cfg.support {
                            return None;
                        }
                        let mut edges = p.edges.clone();
                        let at = edges.binary_search(&c).unwrap_err();
                        edges.insert(at, c);
                        Some(Pattern {
                            edges,
                            occurrences: occ,
                        })
                    })
                    .collect()
            })
            .collect();
        let mut next: BTreeMap<Vec<usize>, BitSet> = BTreeMap::new();
        for p in grown.into_iter().flatten() {
            next.entry(p.edges).or_insert(p.occurrences);
        }
        level = next
            .into_iter()
            .map(|(edges, occurrences)| Pattern { edges, occurrences })
            .collect();
        if level.is_empty() {
            break;
        }
        for p in &level {
            let edges: Vec<Edge> = p.edges.iter().map(|&e| pair_at(n, e)).collect();
            out.push(Motif::new(out.len(), n, edges, None)?);
        }
    }
    Ok(out)
}

/// `|log2((supp_0 + 1) / (supp_1 + 1))|` with per-class supports.
pub fn cross_support(m: &Motif, d: &LabeledDataset) -> Result<f64> {
    if d.class_count(0) == 0 || d.class_count(1) == 0 {
        return Err(Error::Parameter("cross-support needs graphs of both labels".into()));
    }
    let s0 = support(m.edges(), d, Some(0))? as f64;
    let s1 = support(m.edges(), d, Some(1))? as f64;
    Ok(((s0 + 1.0) / (s1 + 1.0)).log2().abs())
}

/// Sorts by cross-support (descending, then larger size, then edge list) and
/// greedily keeps motifs of at least `st` edges whose Jaccard distance to
/// every kept motif is at least `dt`, until `k` are kept.
pub fn rank_and_select(motifs: &[Motif], d: &LabeledDataset, cfg: &RankerConfig) -> Result<Vec<RankedMotif>> {
    if cfg.k == 0 {
        return Err(Error::Parameter("k must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&cfg.dt) {
        return Err(Error::Parameter(format!("distance threshold {} not in [0, 1]", cfg.dt)));
    }
    let scores = motifs
        .par_iter()
        .map(|m| cross_support(m, d))
        .collect::<Result<Vec<f64>>>()?;
    let mut order: Vec<usize> = (0..motifs.len()).collect();
    order.sort_by(|&a, &b| {
        scores[b]
            .total_cmp(&scores[a])
            .then(motifs[b].size().cmp(&motifs[a].size()))
            .then_with(|| motifs[a].edges().cmp(motifs[b].edges()))
    });
    let mut chosen: Vec<RankedMotif> = Vec::new();
    for i in order {
        if chosen.len() == cfg.k {
            break;
        }
        let m = &motifs[i];
        if m.size() < cfg.st {
            continue;
        }
        let far = chosen
            .iter()
            .all(|c| set_jaccard_distance(c.motif.edge_set(), m.edge_set()) >= cfg.dt);
        if far {
            chosen.push(RankedMotif {
                motif: m.clone(),
                cs: scores[i],
            });
        }
    }
    Ok(chosen)
}
