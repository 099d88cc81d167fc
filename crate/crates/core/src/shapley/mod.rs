//! Motif explanation scores over the coalition lattice.
//!
//! For a graph `G`, black-box `B` and motifs `M`, the score of motif `i` is
//!
//! ```text
//! xi_i = sum_{S ⊆ M \ {i}} w(|S|) * (B(G_S) - B(G_{S ∪ {i}}))
//! ```
//!
//! where `G_S` is `G` with the motifs in `S` masked. Under the classic
//! weighting `w(s) = s! (|M| - s - 1)! / |M|!` these are Shapley values of
//! the game "un-mask motifs", so they sum to `B(G) - B(G_M)`.
//!
//! The depth-`d` approximation keeps only the terms whose lattice edge lies
//! within `d` steps of the fully-masked node (`|S| >= |M| - d`). Both
//! computations share one code path; `d = |M|` is the exact computation.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::blackbox::BlackBox;
use crate::error::{Error, Result};
use crate::graph::{pair_count, Graph, Motif};
use crate::masking::{MaskKind, MaskingStrategy};

mod lattice;

pub use lattice::{binomial, binomial_f64, node_count};
use lattice::LatticeIndex;

/// Coefficient applied to each marginal term, as a function of the number
/// of masked motifs `s` besides the one being scored.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Weighting {
    /// `s! (m - s - 1)! / m!`
    #[serde(rename = "classic")]
    Classic,
    /// `1 / ((m + 1) * C(m + 1, s))`
    #[serde(rename = "paper")]
    PaperInverse,
    /// `C(m + 1, s)`
    #[serde(rename = "paper-alg")]
    PaperAlgorithm,
}

impl Weighting {
    pub fn name(self) -> &'static str {
        match self {
            Weighting::Classic => "classic",
            Weighting::PaperInverse => "paper",
            Weighting::PaperAlgorithm => "paper-alg",
        }
    }

    /// Coefficient for a masked set of size `s` among `m` motifs.
    pub fn coefficient(self, m: usize, s: usize) -> f64 {
        debug_assert!(s < m);
        match self {
            Weighting::Classic => 1.0 / (m as f64 * binomial_f64(m - 1, s)),
            Weighting::PaperInverse => 1.0 / ((m + 1) as f64 * binomial_f64(m + 1, s)),
            Weighting::PaperAlgorithm => binomial_f64(m + 1, s),
        }
    }
}

impl fmt::Display for Weighting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Weighting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classic" => Ok(Weighting::Classic),
            "paper" => Ok(Weighting::PaperInverse),
            "paper-alg" => Ok(Weighting::PaperAlgorithm),
            other => Err(Error::Parameter(format!(
                "unknown weighting {other:?} (expected classic, paper or paper-alg)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Depth {
    Exact,
    Limited(usize),
}

impl fmt::Display for Depth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Depth::Exact => f.write_str("exact"),
            Depth::Limited(d) => write!(f, "{d}"),
        }
    }
}

impl FromStr for Depth {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "exact" {
            return Ok(Depth::Exact);
        }
        s.parse::<usize>()
            .map(Depth::Limited)
            .map_err(|_| Error::Parameter(format!("depth must be \"exact\" or an integer, got {s:?}")))
    }
}

impl Serialize for Depth {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Depth::Exact => serializer.serialize_str("exact"),
            Depth::Limited(d) => serializer.serialize_u64(*d as u64),
        }
    }
}

impl<'de> Deserialize<'de> for Depth {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(usize),
            Str(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Int(d) => Ok(Depth::Limited(d)),
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Distinct coalition evaluations needed for `n_motifs` at `depth`.
pub fn query_budget(n_motifs: usize, depth: Depth) -> u128 {
    match depth {
        Depth::Exact => 1u128.checked_shl(n_motifs as u32).unwrap_or(u128::MAX),
        Depth::Limited(d) => node_count(n_motifs, d).unwrap_or(u128::MAX),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExplainConfig {
    pub weighting: Weighting,
    /// Lattices with more than `2^exact_limit` nodes are refused.
    pub exact_limit: usize,
    /// Rescale approximate scores to sum to `B(G) - B(G_M)`.
    pub rescale: bool,
}

impl Default for ExplainConfig {
    fn default() -> Self {
        ExplainConfig {
            weighting: Weighting::Classic,
            exact_limit: 20,
            rescale: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MotifScore {
    pub motif: usize,
    pub xi: f64,
}

/// Scores of every motif for one graph.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Explanation {
    pub graph: Option<usize>,
    pub depth: Depth,
    pub mask: MaskKind,
    pub weights: Weighting,
    /// Black-box evaluations performed.
    pub queries: usize,
    /// Lattice nodes visited (before content deduplication).
    pub coalitions: usize,
    #[serde(default)]
    pub rescaled: bool,
    pub scores: Vec<MotifScore>,
}

impl Explanation {
    pub fn values(&self) -> Vec<f64> {
        self.scores.iter().map(|s| s.xi).collect()
    }

    pub fn motif_ids(&self) -> Vec<usize> {
        self.scores.iter().map(|s| s.motif).collect()
    }
}

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Default)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    #[inline]
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(self) -> f64 {
        self.sum + self.carry
    }
}

/// Motif edges projected onto the positions touched by any motif, so
/// coalition graphs can be deduplicated by a short key.
struct Projection {
    positions: Vec<usize>,
    motifs: Vec<BitSet>,
    present: BitSet,
    weighted: bool,
}

impl Projection {
    fn new(g: &Graph, motifs: &[Motif], kind: MaskKind) -> Self {
        let mut all = BitSet::new(pair_count(g.n()));
        for m in motifs {
            all.union_with(m.edge_set());
        }
        let positions: Vec<usize> = all.iter().collect();
        let local = |set: &BitSet| {
            BitSet::from_indices(
                positions.len(),
                positions.iter().enumerate().filter(|(_, &p)| set.contains(p)).map(|(l, _)| l),
            )
        };
        Projection {
            motifs: motifs.iter().map(|m| local(m.edge_set())).collect(),
            present: local(g.edge_set()),
            weighted: g.is_weighted() || kind == MaskKind::Average,
            positions,
        }
    }

    fn masked_union(&self, present: &[usize]) -> BitSet {
        let mut union = BitSet::new(self.positions.len());
        let mut p = 0;
        for (k, m) in self.motifs.iter().enumerate() {
            if p < present.len() && present[p] == k {
                p += 1;
                continue;
            }
            union.union_with(m);
        }
        union
    }

    fn global(&self, union: &BitSet, pairs: usize) -> BitSet {
        BitSet::from_indices(pairs, union.iter().map(|l| self.positions[l]))
    }

    /// Content of the masked graph restricted to motif positions.
    fn key(&self, g: &Graph, union: &BitSet, masking: &MaskingStrategy) -> Vec<u64> {
        if !self.weighted {
            let mut bits = self.present.clone();
            match masking.kind() {
                MaskKind::Remove => bits.difference_with(union),
                MaskKind::Toggle => bits.symmetric_difference_with(union),
                MaskKind::Average => unreachable!("average masking is keyed by weight"),
            }
            return bits.words().to_vec();
        }
        let mut key = Vec::with_capacity(self.positions.len());
        for (l, &p) in self.positions.iter().enumerate() {
            let w = if !union.contains(l) {
                g.weight_at(p)
            } else {
                match masking.kind() {
                    MaskKind::Remove => 0.0,
                    MaskKind::Toggle => {
                        if g.edge_set().contains(p) {
                            0.0
                        } else {
                            1.0
                        }
                    }
                    MaskKind::Average => masking.frequency(p),
                }
            };
            key.push(w.to_bits());
        }
        key
    }
}

const EVAL_CHUNK: usize = 4096;
const PAR_CHUNK: usize = 32;

fn evaluate_graphs<B: BlackBox + ?Sized>(bb: &B, graphs: &[Graph]) -> Result<Vec<f64>> {
    let values = if bb.concurrent() && graphs.len() > PAR_CHUNK {
        graphs
            .par_chunks(PAR_CHUNK)
            .map(|chunk| bb.evaluate_batch(chunk))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect()
    } else {
        bb.evaluate_batch(graphs)?
    };
    if values.len() != graphs.len() {
        return Err(Error::Transport(format!(
            "black-box returned {} values for {} graphs",
            values.len(),
            graphs.len()
        )));
    }
    Ok(values)
}

/// Explanation scores for `depth` (exact when `Depth::Exact` or
/// `Depth::Limited(|M|)`).
pub fn explain<B: BlackBox + ?Sized>(
    g: &Graph,
    bb: &B,
    motifs: &[Motif],
    masking: &MaskingStrategy,
    depth: Depth,
    cfg: &ExplainConfig,
) -> Result<Explanation> {
    let m = motifs.len();
    masking.check_universe(g.n())?;
    for motif in motifs {
        if motif.n() != g.n() {
            return Err(Error::UniverseMismatch {
                expected: g.n(),
                found: motif.n(),
            });
        }
    }
    let d = match depth {
        Depth::Exact => {
            if m > cfg.exact_limit {
                return Err(Error::LatticeTooLarge {
                    motifs: m,
                    limit: cfg.exact_limit,
                    queries: query_budget(m, Depth::Exact),
                });
            }
            m
        }
        Depth::Limited(d) => {
            if d < 1 || d > m {
                return Err(Error::Parameter(format!(
                    "depth {d} outside 1..={m} for {m} motifs"
                )));
            }
            d
        }
    };
    let mut explanation = Explanation {
        graph: None,
        depth,
        mask: masking.kind(),
        weights: cfg.weighting,
        queries: 0,
        coalitions: 0,
        rescaled: false,
        scores: Vec::new(),
    };
    if m == 0 {
        return Ok(explanation);
    }

    let index = LatticeIndex::new(m, d, cfg.exact_limit)?;
    let projection = Projection::new(g, motifs, masking.kind());
    let pairs = pair_count(g.n());

    // Lattice node -> distinct masked-graph slot.
    let mut slot_of = vec![0u32; index.len()];
    let mut slots: HashMap<Vec<u64>, u32> = HashMap::new();
    let mut unions: Vec<BitSet> = Vec::new();
    index.for_each_subset(d, |q| {
        let union = projection.masked_union(q);
        let key = projection.key(g, &union, masking);
        let next = unions.len() as u32;
        let slot = *slots.entry(key).or_insert_with(|| {
            unions.push(union);
            next
        });
        slot_of[index.rank(q)] = slot;
    });
    drop(slots);

    let mut slot_values = Vec::with_capacity(unions.len());
    for chunk in unions.chunks(EVAL_CHUNK) {
        let graphs: Vec<Graph> = chunk
            .par_iter()
            .map(|u| masking.apply_union(g, &projection.global(u, pairs)))
            .collect();
        slot_values.extend(evaluate_graphs(bb, &graphs)?);
    }
    let value = |rank: usize| slot_values[slot_of[rank] as usize];

    let coef: Vec<f64> = (0..m).map(|s| cfg.weighting.coefficient(m, s)).collect();
    let mut sums = vec![CompensatedSum::default(); m];
    index.for_each_subset(d - 1, |q| {
        let base = value(index.rank(q));
        let w = coef[m - 1 - q.len()];
        index.for_each_extension(q, |i, r| sums[i].add(w * (value(r) - base)));
    });
    let mut scores: Vec<f64> = sums.into_iter().map(CompensatedSum::value).collect();
    let mut queries = unions.len();

    if cfg.rescale && d < m {
        let full = bb.evaluate(g)?;
        queries += 1;
        let gap = full - value(0);
        let total: f64 = scores.iter().sum();
        if total != 0.0 {
            scores.iter_mut().for_each(|x| *x *= gap / total);
        }
        explanation.rescaled = true;
    }

    explanation.queries = queries;
    explanation.coalitions = index.len();
    explanation.scores = motifs
        .iter()
        .zip(scores)
        .map(|(motif, xi)| MotifScore {
            motif: motif.id(),
            xi,
        })
        .collect();
    Ok(explanation)
}

/// Scores over the full lattice (`2^|M|` coalitions).
pub fn exact_explain<B: BlackBox + ?Sized>(
    g: &Graph,
    bb: &B,
    motifs: &[Motif],
    masking: &MaskingStrategy,
    cfg: &ExplainConfig,
) -> Result<Explanation> {
    explain(g, bb, motifs, masking, Depth::Exact, cfg)
}

/// Scores summing only marginal terms within `depth` of the fully-masked
/// node.
pub fn approx_explain<B: BlackBox + ?Sized>(
    g: &Graph,
    bb: &B,
    motifs: &[Motif],
    masking: &MaskingStrategy,
    depth: usize,
    cfg: &ExplainConfig,
) -> Result<Explanation> {
    explain(g, bb, motifs, masking, Depth::Limited(depth), cfg)
}
