//! Motif masking: produce the graph in which a coalition of motifs is
//! "absent".
//!
//! All strategies act on the union of the masked motifs' edges, so
//! overlapping motifs are never applied twice.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::graph::{edge_frequencies, pair_count, Graph, LabeledDataset, Motif};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MaskKind {
    /// Delete every motif edge.
    Remove,
    /// Replace every motif edge by its background frequency as a weight.
    Average,
    /// Flip the presence of every motif edge.
    Toggle,
}

impl MaskKind {
    pub fn name(self) -> &'static str {
        match self {
            MaskKind::Remove => "remove",
            MaskKind::Average => "average",
            MaskKind::Toggle => "toggle",
        }
    }
}

impl fmt::Display for MaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MaskKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "remove" => Ok(MaskKind::Remove),
            "average" => Ok(MaskKind::Average),
            "toggle" => Ok(MaskKind::Toggle),
            other => Err(Error::Parameter(format!(
                "unknown masking strategy {other:?} (expected remove, average or toggle)"
            ))),
        }
    }
}

/// A masking strategy bound to its background data.
///
/// For [`MaskKind::Average`] the per-pair edge frequencies of the background
/// dataset are computed once at construction.
#[derive(Clone, Debug)]
pub struct MaskingStrategy {
    kind: MaskKind,
    n: Option<usize>,
    frequencies: Option<Vec<f64>>,
}

impl MaskingStrategy {
    pub fn remove() -> Self {
        MaskingStrategy {
            kind: MaskKind::Remove,
            n: None,
            frequencies: None,
        }
    }

    pub fn toggle() -> Self {
        MaskingStrategy {
            kind: MaskKind::Toggle,
            n: None,
            frequencies: None,
        }
    }

    pub fn average(background: &LabeledDataset) -> Result<Self> {
        if background.is_empty() {
            return Err(Error::Config(
                "average masking requires a nonempty background dataset".into(),
            ));
        }
        Ok(MaskingStrategy {
            kind: MaskKind::Average,
            n: Some(background.n()),
            frequencies: Some(edge_frequencies(background)?),
        })
    }

    pub fn new(kind: MaskKind, background: Option<&LabeledDataset>) -> Result<Self> {
        match kind {
            MaskKind::Remove => Ok(Self::remove()),
            MaskKind::Toggle => Ok(Self::toggle()),
            MaskKind::Average => match background {
                Some(d) => Self::average(d),
                None => Err(Error::Config(
                    "average masking requires a background dataset".into(),
                )),
            },
        }
    }

    pub fn kind(&self) -> MaskKind {
        self.kind
    }

    /// Background frequency of the pair at `index` (average masking only).
    pub(crate) fn frequency(&self, index: usize) -> f64 {
        self.frequencies.as_ref().map_or(0.0, |f| f[index])
    }

    pub(crate) fn check_universe(&self, n: usize) -> Result<()> {
        match self.n {
            Some(bg) if bg != n => Err(Error::UniverseMismatch {
                expected: n,
                found: bg,
            }),
            _ => Ok(()),
        }
    }

    /// Masks the edges in `union` (a pair-indexed bitset) out of `g`.
    pub fn apply_union(&self, g: &Graph, union: &BitSet) -> Graph {
        debug_assert_eq!(union.len(), pair_count(g.n()));
        if union.is_empty() {
            return g.clone();
        }
        let mut edges = g.edge_set().clone();
        let mut weights = g.weight_map().cloned();
        match self.kind {
            MaskKind::Remove => {
                edges.difference_with(union);
                if let Some(w) = weights.as_mut() {
                    for i in union.iter() {
                        w.remove(&i);
                    }
                }
            }
            MaskKind::Toggle => {
                if let Some(w) = weights.as_mut() {
                    for i in union.iter() {
                        w.remove(&i);
                    }
                }
                edges.symmetric_difference_with(union);
            }
            MaskKind::Average => {
                let w = weights.get_or_insert_with(BTreeMap::new);
                for i in union.iter() {
                    edges.insert(i);
                    w.insert(i, self.frequency(i));
                }
            }
        }
        Graph::from_parts(g.n(), edges, weights)
    }

    /// Masks every motif in `motifs` out of `g`.
    pub fn apply<'a>(&self, g: &Graph, motifs: impl IntoIterator<Item = &'a Motif>) -> Result<Graph> {
        self.check_universe(g.n())?;
        let mut union = BitSet::new(pair_count(g.n()));
        for m in motifs {
            g.check_universe(m.n())?;
            union.union_with(m.edge_set());
        }
        Ok(self.apply_union(g, &union))
    }
}

/// Masks the motifs in `s` out of `g` with `strategy`.
pub fn mask(g: &Graph, s: &[Motif], strategy: &MaskingStrategy) -> Result<Graph> {
    strategy.apply(g, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;
    use proptest::prelude::*;

    fn e(a: usize, b: usize) -> Edge {
        Edge::new(a, b).unwrap()
    }

    #[test]
    fn empty_coalition_is_identity() {
        let g = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        let bg = LabeledDataset::new(4, vec![g.clone()], vec![0], None).unwrap();
        for s in [
            MaskingStrategy::remove(),
            MaskingStrategy::toggle(),
            MaskingStrategy::average(&bg).unwrap(),
        ] {
            assert_eq!(mask(&g, &[], &s).unwrap(), g);
        }
    }

    #[test]
    fn toggle_example() {
        let g = Graph::from_edges(3, [(0, 1)]).unwrap();
        let m = Motif::from_pairs(0, 3, [(0, 1), (1, 2)], None).unwrap();
        let out = mask(&g, &[m], &MaskingStrategy::toggle()).unwrap();
        assert_eq!(out.edges().collect::<Vec<_>>(), vec![e(1, 2)]);
        assert!(!out.is_weighted());
    }

    #[test]
    fn remove_example() {
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let m = Motif::from_pairs(0, 4, [(0, 1), (1, 3)], None).unwrap();
        let out = mask(&g, &[m], &MaskingStrategy::remove()).unwrap();
        assert_eq!(out.edges().collect::<Vec<_>>(), vec![e(1, 2), e(2, 3)]);
    }

    #[test]
    fn average_example() {
        let graphs = vec![
            Graph::from_edges(3, [(0, 1)]).unwrap(),
            Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap(),
            Graph::from_edges(3, [(0, 1)]).unwrap(),
            Graph::from_edges(3, [(0, 2)]).unwrap(),
        ];
        let bg = LabeledDataset::new(3, graphs, vec![0, 1, 0, 1], None).unwrap();
        let g = Graph::from_edges(3, [(0, 1), (0, 2)]).unwrap();
        let m = Motif::from_pairs(0, 3, [(0, 1)], None).unwrap();
        let out = mask(&g, &[m], &MaskingStrategy::average(&bg).unwrap()).unwrap();
        assert_eq!(out.weight(e(0, 1)), 0.75);
        assert_eq!(out.weight(e(0, 2)), 1.0);

        // Motif edges absent from g appear with their frequency, including 0.
        let g = Graph::from_edges(3, []).unwrap();
        let m = Motif::from_pairs(0, 3, [(1, 2), (0, 1)], None).unwrap();
        let out = mask(&g, &[m], &MaskingStrategy::average(&bg).unwrap()).unwrap();
        assert_eq!(out.weight(e(1, 2)), 0.25);
        assert_eq!(out.weight(e(0, 1)), 0.75);
        assert!(out.contains(e(1, 2)));
    }

    #[test]
    fn average_lists_zero_frequency_edges() {
        let bg = LabeledDataset::new(3, vec![Graph::empty(3)], vec![0], None).unwrap();
        let m = Motif::from_pairs(0, 3, [(0, 1)], None).unwrap();
        let out = mask(&Graph::empty(3), &[m], &MaskingStrategy::average(&bg).unwrap()).unwrap();
        assert!(out.contains(e(0, 1)));
        assert_eq!(out.weight(e(0, 1)), 0.0);
    }

    #[test]
    fn average_needs_background() {
        assert!(matches!(
            MaskingStrategy::new(MaskKind::Average, None),
            Err(Error::Config(_))
        ));
        let empty = LabeledDataset::new(3, vec![], vec![], None).unwrap();
        assert!(matches!(MaskingStrategy::average(&empty), Err(Error::Config(_))));
    }

    const N: usize = 7;

    fn graph() -> impl Strategy<Value = Graph> {
        prop::collection::vec((0..N, 0..N), 0..18).prop_map(|v| {
            Graph::from_edges(N, v.into_iter().filter(|(a, b)| a != b)).unwrap()
        })
    }

    fn motif() -> impl Strategy<Value = Motif> {
        // Paths are always connected.
        prop::collection::vec(0..N, 2..5).prop_filter_map("path", |nodes| {
            let pairs: Vec<_> = nodes.windows(2).map(|w| (w[0], w[1])).filter(|(a, b)| a != b).collect();
            Motif::from_pairs(0, N, pairs, None).ok()
        })
    }

    proptest! {
        #[test]
        fn toggle_is_involution(g in graph(), s in prop::collection::vec(motif(), 0..4)) {
            let t = MaskingStrategy::toggle();
            let once = mask(&g, &s, &t).unwrap();
            prop_assert_eq!(mask(&once, &s, &t).unwrap(), g);
        }

        #[test]
        fn remove_is_idempotent(g in graph(), s in prop::collection::vec(motif(), 0..4)) {
            let r = MaskingStrategy::remove();
            let once = mask(&g, &s, &r).unwrap();
            prop_assert_eq!(mask(&once, &s, &r).unwrap(), once);
        }

        #[test]
        fn edges_outside_union_untouched(
            g in graph(),
            s in prop::collection::vec(motif(), 0..4),
            bg in prop::collection::vec(graph(), 1..4),
        ) {
            let labels = vec![0; bg.len()];
            let bg = LabeledDataset::new(N, bg, labels, None).unwrap();
            let mut union = BitSet::new(pair_count(N));
            for m in &s {
                union.union_with(m.edge_set());
            }
            for strat in [MaskingStrategy::remove(), MaskingStrategy::toggle(), MaskingStrategy::average(&bg).unwrap()] {
                let out = mask(&g, &s, &strat).unwrap();
                for i in 0..pair_count(N) {
                    if !union.contains(i) {
                        prop_assert_eq!(out.edge_set().contains(i), g.edge_set().contains(i));
                        prop_assert_eq!(out.weight_at(i).to_bits(), g.weight_at(i).to_bits());
                    }
                }
                // Only the union matters, not how the motifs partition it.
                prop_assert_eq!(strat.apply_union(&g, &union), out);
            }
        }
    }
}
