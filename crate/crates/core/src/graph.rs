//! Graphs and motifs over a fixed, shared node universe.
//!
//! Every graph in a dataset is defined over the same `n` nodes, so an edge is
//! identified by its node pair alone. Edge sets are stored as bitsets over the
//! fixed enumeration of all `n(n-1)/2` unordered pairs (see [`pair_index`]).

use std::collections::BTreeMap;
use std::fmt;

use crate::bitset::BitSet;
use crate::error::{Error, Result};

/// Number of unordered node pairs in a universe of `n` nodes.
#[inline]
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Row-major index of the pair `(u, v)` with `u < v < n`.
#[inline]
pub fn pair_index(n: usize, u: usize, v: usize) -> usize {
    debug_assert!(u < v && v < n);
    u * n - u * (u + 1) / 2 + (v - u - 1)
}

/// Inverse of [`pair_index`].
pub fn pair_at(n: usize, index: usize) -> Edge {
    debug_assert!(index < pair_count(n));
    // Closed-form row estimate, then a small correction for rounding.
    let nf = n as f64;
    let disc = (2.0 * nf - 1.0).powi(2) - 8.0 * index as f64;
    let mut u = ((2.0 * nf - 1.0 - disc.max(0.0).sqrt()) / 2.0).floor() as usize;
    let row_start = |u: usize| u * n - u * (u + 1) / 2;
    while u > 0 && row_start(u) > index {
        u -= 1;
    }
    while u + 1 < n && row_start(u + 1) <= index {
        u += 1;
    }
    let v = index - row_start(u) + u + 1;
    Edge { u, v }
}

/// An undirected edge stored in canonical order (`u < v`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    u: usize,
    v: usize,
}

impl Edge {
    pub fn new(a: usize, b: usize) -> Result<Self> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Ok(Edge { u: a, v: b }),
            std::cmp::Ordering::Greater => Ok(Edge { u: b, v: a }),
            std::cmp::Ordering::Equal => Err(Error::SelfLoop(a)),
        }
    }

    #[inline]
    pub fn u(&self) -> usize {
        self.u
    }

    #[inline]
    pub fn v(&self) -> usize {
        self.v
    }

    pub fn check(&self, n: usize) -> Result<()> {
        if self.v >= n {
            return Err(Error::InvalidEdge {
                u: self.u,
                v: self.v,
                n,
            });
        }
        Ok(())
    }

    #[inline]
    pub fn index(&self, n: usize) -> usize {
        pair_index(n, self.u, self.v)
    }

    pub fn shares_node(&self, other: &Edge) -> bool {
        self.u == other.u || self.u == other.v || self.v == other.u || self.v == other.v
    }
}

impl fmt::Debug for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.u, self.v)
    }
}

/// A simple undirected graph over `n` nodes with optional edge weights in
/// `[0, 1]`.
///
/// Unlisted edges have weight 0; listed edges without an explicit weight have
/// weight 1. Weighted graphs only arise from average masking.
#[derive(Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: BitSet,
    weights: Option<BTreeMap<usize, f64>>,
}

impl Eq for Graph {}

impl std::hash::Hash for Graph {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.n.hash(state);
        self.edges.hash(state);
        if let Some(w) = &self.weights {
            for (k, v) in w {
                k.hash(state);
                v.to_bits().hash(state);
            }
        }
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("edges", &self.edges().collect::<Vec<_>>())
            .field("weights", &self.weights)
            .finish()
    }
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            edges: BitSet::new(pair_count(n)),
            weights: None,
        }
    }

    /// Builds an unweighted graph. Duplicate edges collapse; self-loops and
    /// out-of-range nodes are rejected.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Graph::empty(n);
        for (a, b) in edges {
            let e = Edge::new(a, b)?;
            e.check(n)?;
            g.edges.insert(e.index(n));
        }
        Ok(g)
    }

    /// Builds a weighted graph from `(u, v, w)` triples.
    pub fn from_weighted_edges(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut g = Graph::empty(n);
        let mut weights = BTreeMap::new();
        for (a, b, w) in edges {
            let e = Edge::new(a, b)?;
            e.check(n)?;
            if !(0.0..=1.0).contains(&w) {
                return Err(Error::Format(format!(
                    "edge {e:?} has weight {w} outside [0, 1]"
                )));
            }
            let idx = e.index(n);
            g.edges.insert(idx);
            weights.insert(idx, w);
        }
        g.weights = Some(weights);
        Ok(g)
    }

    pub(crate) fn from_parts(n: usize, edges: BitSet, weights: Option<BTreeMap<usize, f64>>) -> Self {
        debug_assert_eq!(edges.len(), pair_count(n));
        Graph { n, edges, weights }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn edge_set(&self) -> &BitSet {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.count()
    }

    pub fn contains(&self, e: Edge) -> bool {
        e.v < self.n && self.edges.contains(e.index(self.n))
    }

    pub fn is_weighted(&self) -> bool {
        self.weights.is_some()
    }

    pub(crate) fn weight_map(&self) -> Option<&BTreeMap<usize, f64>> {
        self.weights.as_ref()
    }

    /// Effective weight of the pair at `index`: 0 when absent.
    #[inline]
    pub fn weight_at(&self, index: usize) -> f64 {
        if !self.edges.contains(index) {
            return 0.0;
        }
        match &self.weights {
            Some(w) => w.get(&index).copied().unwrap_or(1.0),
            None => 1.0,
        }
    }

    pub fn weight(&self, e: Edge) -> f64 {
        if e.v >= self.n {
            return 0.0;
        }
        self.weight_at(e.index(self.n))
    }

    /// Listed edges in canonical `(u, v)` order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges.iter().map(move |i| pair_at(self.n, i))
    }

    /// Listed edges with their effective weights.
    pub fn weighted_edges(&self) -> impl Iterator<Item = (Edge, f64)> + '_ {
        self.edges
            .iter()
            .map(move |i| (pair_at(self.n, i), self.weight_at(i)))
    }

    pub(crate) fn check_universe(&self, n: usize) -> Result<()> {
        if self.n != n {
            return Err(Error::UniverseMismatch {
                expected: n,
                found: self.n,
            });
        }
        Ok(())
    }
}

/// Class a motif is predictive of, as a sign: `Negative` for class 0,
/// `Positive` for class 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClassSign {
    Negative,
    Positive,
}

impl ClassSign {
    pub fn from_label(label: u8) -> Result<Self> {
        match label {
            0 => Ok(ClassSign::Negative),
            1 => Ok(ClassSign::Positive),
            other => Err(Error::Format(format!("class label must be 0 or 1, got {other}"))),
        }
    }

    pub fn label(self) -> u8 {
        match self {
            ClassSign::Negative => 0,
            ClassSign::Positive => 1,
        }
    }

    pub fn value(self) -> f64 {
        match self {
            ClassSign::Negative => -1.0,
            ClassSign::Positive => 1.0,
        }
    }
}

/// A nonempty connected edge set over the node universe.
#[derive(Clone, Debug, PartialEq)]
pub struct Motif {
    id: usize,
    n: usize,
    edges: Vec<Edge>,
    bits: BitSet,
    class: Option<ClassSign>,
}

impl Motif {
    pub fn new(
        id: usize,
        n: usize,
        edges: impl IntoIterator<Item = Edge>,
        class: Option<ClassSign>,
    ) -> Result<Self> {
        let mut edges: Vec<Edge> = edges.into_iter().collect();
        edges.sort_unstable();
        edges.dedup();
        for e in &edges {
            e.check(n)?;
        }
        if edges.is_empty() {
            return Err(Error::InvalidMotif {
                id,
                reason: "edge set is empty".into(),
            });
        }
        if !is_connected(&edges) {
            return Err(Error::InvalidMotif {
                id,
                reason: "edge set is not connected".into(),
            });
        }
        let bits = BitSet::from_indices(pair_count(n), edges.iter().map(|e| e.index(n)));
        Ok(Motif {
            id,
            n,
            edges,
            bits,
            class,
        })
    }

    pub fn from_pairs(
        id: usize,
        n: usize,
        pairs: impl IntoIterator<Item = (usize, usize)>,
        class: Option<ClassSign>,
    ) -> Result<Self> {
        let edges = pairs
            .into_iter()
            .map(|(a, b)| Edge::new(a, b))
            .collect::<Result<Vec<_>>>()?;
        Motif::new(id, n, edges, class)
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn with_id(mut self, id: usize) -> Self {
        self.id = id;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Edges in canonical order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_set(&self) -> &BitSet {
        &self.bits
    }

    pub fn size(&self) -> usize {
        self.edges.len()
    }

    pub fn class(&self) -> Option<ClassSign> {
        self.class
    }

    pub fn with_class(mut self, class: Option<ClassSign>) -> Self {
        self.class = class;
        self
    }

    /// Sorted node set touched by the motif.
    pub fn nodes(&self) -> Vec<usize> {
        let mut nodes: Vec<usize> = self.edges.iter().flat_map(|e| [e.u, e.v]).collect();
        nodes.sort_unstable();
        nodes.dedup();
        nodes
    }
}

/// Per-(graph, motif) injection outcome recorded by the synthetic generator:
/// `+1` added, `-1` removed, `0` untouched.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InjectionRecord {
    rows: Vec<Vec<i8>>,
    motifs: usize,
}

impl InjectionRecord {
    pub fn new(rows: Vec<Vec<i8>>, motifs: usize) -> Result<Self> {
        for (i, row) in rows.iter().enumerate() {
            if row.len() != motifs {
                return Err(Error::Format(format!(
                    "injection row {i} has {} entries, expected {motifs}",
                    row.len()
                )));
            }
            if let Some(bad) = row.iter().find(|v| !matches!(v, -1..=1)) {
                return Err(Error::Format(format!("injection value {bad} not in {{-1, 0, 1}}")));
            }
        }
        Ok(InjectionRecord { rows, motifs })
    }

    pub fn zeros(graphs: usize, motifs: usize) -> Self {
        InjectionRecord {
            rows: vec![vec![0; motifs]; graphs],
            motifs,
        }
    }

    pub fn graphs(&self) -> usize {
        self.rows.len()
    }

    pub fn motifs(&self) -> usize {
        self.motifs
    }

    pub fn get(&self, graph: usize, motif: usize) -> i8 {
        self.rows[graph][motif]
    }

    pub fn rows(&self) -> &[Vec<i8>] {
        &self.rows
    }

    /// Fraction of graphs in which each motif was added or removed.
    pub fn rates(&self) -> Vec<f64> {
        let total = self.rows.len().max(1) as f64;
        (0..self.motifs)
            .map(|k| self.rows.iter().filter(|r| r[k] != 0).count() as f64 / total)
            .collect()
    }
}

/// Binary-labelled graphs sharing one node universe.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledDataset {
    n: usize,
    graphs: Vec<Graph>,
    labels: Vec<u8>,
    injections: Option<InjectionRecord>,
}

impl LabeledDataset {
    pub fn new(
        n: usize,
        graphs: Vec<Graph>,
        labels: Vec<u8>,
        injections: Option<InjectionRecord>,
    ) -> Result<Self> {
        if graphs.len() != labels.len() {
            return Err(Error::Format(format!(
                "{} graphs but {} labels",
                graphs.len(),
                labels.len()
            )));
        }
        for g in &graphs {
            g.check_universe(n)?;
        }
        if let Some(bad) = labels.iter().find(|&&l| l > 1) {
            return Err(Error::Format(format!("label {bad} is not 0 or 1")));
        }
        if let Some(inj) = &injections {
            if inj.graphs() != graphs.len() {
                return Err(Error::Format(format!(
                    "injection matrix has {} rows for {} graphs",
                    inj.graphs(),
                    graphs.len()
                )));
            }
        }
        Ok(LabeledDataset {
            n,
            graphs,
            labels,
            injections,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn graphs(&self) -> &[Graph] {
        &self.graphs
    }

    pub fn graph(&self, i: usize) -> &Graph {
        &self.graphs[i]
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> u8 {
        self.labels[i]
    }

    pub fn injections(&self) -> Option<&InjectionRecord> {
        self.injections.as_ref()
    }

    pub fn class_count(&self, label: u8) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }

    /// Subset of graphs by index, keeping labels and injection rows aligned.
    pub fn select(&self, indices: &[usize]) -> LabeledDataset {
        LabeledDataset {
            n: self.n,
            graphs: indices.iter().map(|&i| self.graphs[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            injections: self.injections.as_ref().map(|inj| InjectionRecord {
                rows: indices.iter().map(|&i| inj.rows[i].clone()).collect(),
                motifs: inj.motifs,
            }),
        }
    }
}

/// `1 - |A ∩ B| / |A ∪ B|` over two edge sets; 0 when both are empty.
pub fn set_jaccard_distance(a: &BitSet, b: &BitSet) -> f64 {
    let union = a.union_count(b);
    if union == 0 {
        return 0.0;
    }
    1.0 - a.intersection_count(b) as f64 / union as f64
}

/// Jaccard distance between the edge sets of two graphs.
pub fn jaccard_distance(a: &Graph, b: &Graph) -> Result<f64> {
    b.check_universe(a.n)?;
    Ok(set_jaccard_distance(&a.edges, &b.edges))
}

/// Fraction of graphs in `d` that contain `e`.
pub fn edge_frequency(d: &LabeledDataset, e: Edge) -> Result<f64> {
    if d.is_empty() {
        return Err(Error::EmptyDataset);
    }
    e.check(d.n)?;
    let idx = e.index(d.n);
    let hits = d.graphs.iter().filter(|g| g.edges.contains(idx)).count();
    Ok(hits as f64 / d.len() as f64)
}

/// Frequency of every node pair over `d`, indexed by [`pair_index`].
pub fn edge_frequencies(d: &LabeledDataset) -> Result<Vec<f64>> {
    if d.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut counts = vec![0usize; pair_count(d.n)];
    for g in &d.graphs {
        for i in g.edges.iter() {
            counts[i] += 1;
        }
    }
    let total = d.len() as f64;
    Ok(counts.into_iter().map(|c| c as f64 / total).collect())
}

/// Number of graphs (optionally restricted to one label) whose edge set
/// contains every edge of `m`.
pub fn support(m: &[Edge], d: &LabeledDataset, label_filter: Option<u8>) -> Result<usize> {
    for e in m {
        e.check(d.n)?;
    }
    let bits = BitSet::from_indices(pair_count(d.n), m.iter().map(|e| e.index(d.n)));
    Ok(d.graphs
        .iter()
        .zip(&d.labels)
        .filter(|(_, &l)| label_filter.is_none_or(|f| f == l))
        .filter(|(g, _)| bits.is_subset(&g.edges))
        .count())
}

/// Whether the edges form a single connected component on their incident
/// nodes. The empty set is not connected.
pub fn is_connected(edges: &[Edge]) -> bool {
    if edges.is_empty() {
        return false;
    }
    let mut nodes: Vec<usize> = edges.iter().flat_map(|e| [e.u, e.v]).collect();
    nodes.sort_unstable();
    nodes.dedup();
    let pos = |x: usize| nodes.binary_search(&x).unwrap();
    let mut parent: Vec<usize> = (0..nodes.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut components = nodes.len();
    for e in edges {
        let a = find(&mut parent, pos(e.u));
        let b = find(&mut parent, pos(e.v));
        if a != b {
            parent[a] = b;
            components -= 1;
        }
    }
    components == 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn e(a: usize, b: usize) -> Edge {
        Edge::new(a, b).unwrap()
    }

    fn dataset(n: usize, graphs: &[&[(usize, usize)]], labels: &[u8]) -> LabeledDataset {
        let gs = graphs
            .iter()
            .map(|es| Graph::from_edges(n, es.iter().copied()).unwrap())
            .collect();
        LabeledDataset::new(n, gs, labels.to_vec(), None).unwrap()
    }

    #[test]
    fn pair_index_roundtrip() {
        for n in [2, 3, 7, 100, 117] {
            let mut idx = 0;
            for u in 0..n {
                for v in u + 1..n {
                    assert_eq!(pair_index(n, u, v), idx);
                    assert_eq!(pair_at(n, idx), e(u, v));
                    idx += 1;
                }
            }
            assert_eq!(idx, pair_count(n));
        }
    }

    #[test]
    fn edges_are_canonical_and_loops_rejected() {
        assert_eq!(e(5, 2), e(2, 5));
        assert!(matches!(Edge::new(3, 3), Err(Error::SelfLoop(3))));
        assert!(matches!(
            Graph::from_edges(3, [(0, 3)]),
            Err(Error::InvalidEdge { .. })
        ));
        let g = Graph::from_edges(4, [(2, 1), (1, 2), (0, 3)]).unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![e(0, 3), e(1, 2)]);
    }

    #[test]
    fn jaccard_examples() {
        let a = Graph::from_edges(4, [(0, 1), (1, 2)]).unwrap();
        let b = Graph::from_edges(4, [(1, 2), (2, 3)]).unwrap();
        let c = Graph::from_edges(4, [(0, 3)]).unwrap();
        assert_eq!(jaccard_distance(&a, &a).unwrap(), 0.0);
        assert_eq!(jaccard_distance(&a, &c).unwrap(), 1.0);
        assert!((jaccard_distance(&a, &b).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(
            jaccard_distance(&Graph::empty(4), &Graph::empty(4)).unwrap(),
            0.0
        );
        assert!(matches!(
            jaccard_distance(&a, &Graph::empty(5)),
            Err(Error::UniverseMismatch { .. })
        ));
    }

    #[test]
    fn edge_frequency_examples() {
        let d = dataset(
            4,
            &[&[(0, 1), (2, 3)], &[(0, 1)], &[(0, 1), (1, 2)], &[(1, 3)]],
            &[0, 1, 0, 1],
        );
        assert_eq!(edge_frequency(&d, e(0, 1)).unwrap(), 0.75);
        assert_eq!(edge_frequency(&d, e(0, 2)).unwrap(), 0.0);
        let all = dataset(3, &[&[(0, 1)], &[(0, 1), (1, 2)]], &[0, 1]);
        assert_eq!(edge_frequency(&all, e(0, 1)).unwrap(), 1.0);
        let empty = LabeledDataset::new(3, vec![], vec![], None).unwrap();
        assert!(matches!(edge_frequency(&empty, e(0, 1)), Err(Error::EmptyDataset)));
    }

    #[test]
    fn support_examples() {
        let d = dataset(
            5,
            &[
                &[(0, 1), (1, 2), (3, 4)],
                &[(0, 1)],
                &[(0, 1), (1, 2)],
                &[(1, 2), (2, 3)],
            ],
            &[0, 1, 0, 1],
        );
        assert_eq!(support(&[], &d, None).unwrap(), 4);
        assert_eq!(support(&[], &d, Some(1)).unwrap(), 2);
        assert_eq!(support(&[e(0, 1), e(1, 2)], &d, None).unwrap(), 2);
        assert_eq!(support(&[e(0, 1), e(1, 2)], &d, Some(1)).unwrap(), 0);

        let disjoint = dataset(6, &[&[(0, 1), (1, 2)], &[(3, 4)], &[(4, 5)]], &[0, 1, 0]);
        assert_eq!(support(&[e(0, 1), e(1, 2)], &disjoint, None).unwrap(), 1);
    }

    #[test]
    fn connectivity_examples() {
        assert!(is_connected(&[e(0, 1), e(1, 2)]));
        assert!(!is_connected(&[e(0, 1), e(2, 3)]));
        assert!(is_connected(&[e(0, 1), e(1, 2), e(2, 0), e(2, 5)]));
        assert!(!is_connected(&[]));
    }

    #[test]
    fn motif_requires_connected_nonempty() {
        assert!(Motif::from_pairs(0, 5, [(0, 1), (2, 3)], None).is_err());
        assert!(Motif::from_pairs(0, 5, [], None).is_err());
        let m = Motif::from_pairs(3, 5, [(2, 1), (0, 1)], Some(ClassSign::Positive)).unwrap();
        assert_eq!(m.edges(), &[e(0, 1), e(1, 2)]);
        assert_eq!(m.nodes(), vec![0, 1, 2]);
    }

    fn edge_list(n: usize) -> impl Strategy<Value = Vec<(usize, usize)>> {
        prop::collection::vec((0..n, 0..n), 0..30)
            .prop_map(|v| v.into_iter().filter(|(a, b)| a != b).collect())
    }

    proptest! {
        #[test]
        fn jaccard_is_a_metric(a in edge_list(8), b in edge_list(8), c in edge_list(8)) {
            let ga = Graph::from_edges(8, a).unwrap();
            let gb = Graph::from_edges(8, b).unwrap();
            let gc = Graph::from_edges(8, c).unwrap();
            let ab = jaccard_distance(&ga, &gb).unwrap();
            let ba = jaccard_distance(&gb, &ga).unwrap();
            let ac = jaccard_distance(&ga, &gc).unwrap();
            let bc = jaccard_distance(&gb, &gc).unwrap();
            prop_assert_eq!(ab, ba);
            prop_assert_eq!(ab == 0.0, ga.edge_set() == gb.edge_set());
            prop_assert!(ac <= ab + bc + 1e-12);
        }

        #[test]
        fn support_is_antitone(gs in prop::collection::vec(edge_list(6), 1..8), m in edge_list(6), extra in (0usize..6, 0usize..6)) {
            let labels = vec![0; gs.len()];
            let graphs = gs.iter().map(|es| Graph::from_edges(6, es.iter().copied()).unwrap()).collect();
            let d = LabeledDataset::new(6, graphs, labels, None).unwrap();
            let mut edges: Vec<Edge> = m.iter().map(|&(a, b)| e(a, b)).collect();
            let before = support(&edges, &d, None).unwrap();
            if extra.0 != extra.1 {
                edges.push(e(extra.0, extra.1));
            }
            prop_assert!(support(&edges, &d, None).unwrap() <= before);
            for g in d.graphs() {
                let own: Vec<Edge> = g.edges().collect();
                prop_assert!(support(&own, &d, None).unwrap() >= 1);
            }
        }
    }
}
