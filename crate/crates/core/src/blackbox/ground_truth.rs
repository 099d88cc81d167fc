use crate::error::{Error, Result};
use crate::graph::{Graph, Motif};

use super::{sigmoid, BlackBox};

/// Deterministic scorer that knows which motifs drive the class.
///
/// For each motif the overlap is the mean weight of its edges in the input
/// graph; the output is `sigmoid(beta * sum_k sign_k * (2 * overlap_k - 1) * u_k)`.
#[derive(Clone, Debug)]
pub struct GroundTruthScorer {
    n: usize,
    motifs: Vec<Vec<usize>>,
    signs: Vec<f64>,
    importances: Vec<f64>,
    beta: f64,
}

impl GroundTruthScorer {
    pub const DEFAULT_BETA: f64 = 2.0;

    pub fn new(n: usize, motifs: &[Motif], importances: Vec<f64>, beta: f64) -> Result<Self> {
        if importances.len() != motifs.len() {
            return Err(Error::Parameter(format!(
                "{} importances for {} motifs",
                importances.len(),
                motifs.len()
            )));
        }
        if let Some(u) = importances.iter().find(|u| !(u.is_finite() && **u >= 0.0)) {
            return Err(Error::Parameter(format!("importance {u} must be finite and >= 0")));
        }
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::Parameter(format!("steepness {beta} must be > 0")));
        }
        let mut signs = Vec::with_capacity(motifs.len());
        for m in motifs {
            if m.n() != n {
                return Err(Error::UniverseMismatch {
                    expected: n,
                    found: m.n(),
                });
            }
            let class = m.class().ok_or_else(|| {
                Error::Parameter(format!("motif {} has no class sign", m.id()))
            })?;
            signs.push(class.value());
        }
        Ok(GroundTruthScorer {
            n,
            motifs: motifs
                .iter()
                .map(|m| m.edges().iter().map(|e| e.index(n)).collect())
                .collect(),
            signs,
            importances,
            beta,
        })
    }

    pub fn with_default_beta(n: usize, motifs: &[Motif], importances: Vec<f64>) -> Result<Self> {
        Self::new(n, motifs, importances, Self::DEFAULT_BETA)
    }

    /// Importances proportional to each motif's perturbation probability and
    /// summing to 1, so the raw score stays within [-1, 1].
    pub fn normalized_importances(rho: &[f64]) -> Vec<f64> {
        let total: f64 = rho.iter().sum();
        if total > 0.0 {
            rho.iter().map(|r| r / total).collect()
        } else {
            vec![0.0; rho.len()]
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn importances(&self) -> &[f64] {
        &self.importances
    }

    /// Mean edge weight of motif `k` in `g`.
    pub fn overlap(&self, g: &Graph, k: usize) -> f64 {
        let edges = &self.motifs[k];
        edges.iter().map(|&i| g.weight_at(i)).sum::<f64>() / edges.len() as f64
    }

    pub fn raw_score(&self, g: &Graph) -> f64 {
        (0..self.motifs.len())
            .map(|k| self.signs[k] * (2.0 * self.overlap(g, k) - 1.0) * self.importances[k])
            .sum()
    }
}

impl BlackBox for GroundTruthScorer {
    fn evaluate(&self, g: &Graph) -> Result<f64> {
        if g.n() != self.n {
            return Err(Error::UniverseMismatch {
                expected: self.n,
                found: g.n(),
            });
        }
        Ok(sigmoid(self.beta * self.raw_score(g)))
    }

    fn concurrent(&self) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::ClassSign;
    use proptest::prelude::*;

    fn motif(class: ClassSign) -> Motif {
        Motif::from_pairs(0, 5, [(0, 1), (1, 2)], Some(class)).unwrap()
    }

    #[test]
    fn logistic_values() {
        let s = GroundTruthScorer::with_default_beta(5, &[motif(ClassSign::Positive)], vec![1.0]).unwrap();
        let full = Graph::from_edges(5, [(0, 1), (1, 2)]).unwrap();
        let half = Graph::from_edges(5, [(0, 1)]).unwrap();
        let sigma2 = 1.0 / (1.0 + (-2.0f64).exp());
        assert!((s.evaluate(&full).unwrap() - 0.8807970779778823).abs() < 1e-12);
        assert!((s.evaluate(&full).unwrap() - sigma2).abs() < 1e-15);
        assert!((s.evaluate(&Graph::empty(5)).unwrap() - (1.0 - sigma2)).abs() < 1e-12);
        assert_eq!(s.evaluate(&half).unwrap(), 0.5);

        let none = GroundTruthScorer::with_default_beta(5, &[], vec![]).unwrap();
        assert_eq!(none.evaluate(&full).unwrap(), 0.5);
        assert!(matches!(none.evaluate(&Graph::empty(4)), Err(Error::UniverseMismatch { .. })));
    }

    #[test]
    fn requires_class_signs() {
        let m = Motif::from_pairs(0, 5, [(0, 1)], None).unwrap();
        assert!(GroundTruthScorer::with_default_beta(5, &[m], vec![1.0]).is_err());
    }

    #[test]
    fn normalized_importances_sum_to_one() {
        assert_eq!(GroundTruthScorer::normalized_importances(&[0.0, 0.5, 1.5]), vec![0.0, 0.25, 0.75]);
        assert_eq!(GroundTruthScorer::normalized_importances(&[0.0, 0.0]), vec![0.0, 0.0]);
    }

    fn weighted_graph() -> impl Strategy<Value = Graph> {
        prop::collection::vec((0usize..6, 0usize..6, 0.0f64..=1.0), 0..15).prop_map(|v| {
            Graph::from_weighted_edges(6, v.into_iter().filter(|(a, b, _)| a != b)).unwrap()
        })
    }

    proptest! {
        #[test]
        fn output_in_unit_interval(g in weighted_graph(), u in prop::collection::vec(0.0f64..5.0, 2)) {
            let ms = vec![
                Motif::from_pairs(0, 6, [(0, 1), (1, 2)], Some(ClassSign::Positive)).unwrap(),
                Motif::from_pairs(1, 6, [(3, 4)], Some(ClassSign::Negative)).unwrap(),
            ];
            let s = GroundTruthScorer::new(6, &ms, u, 3.0).unwrap();
            let p = s.evaluate(&g).unwrap();
            prop_assert!((0.0..=1.0).contains(&p));
            let zero = GroundTruthScorer::new(6, &ms, vec![0.0, 0.0], 3.0).unwrap();
            prop_assert_eq!(zero.evaluate(&g).unwrap(), 0.5);
        }

        #[test]
        fn monotone_in_positive_overlap(g in weighted_graph(), w in 0.0f64..=1.0) {
            let ms = vec![
                Motif::from_pairs(0, 6, [(0, 1), (1, 2)], Some(ClassSign::Positive)).unwrap(),
                Motif::from_pairs(1, 6, [(3, 4)], Some(ClassSign::Negative)).unwrap(),
            ];
            let s = GroundTruthScorer::with_default_beta(6, &ms, vec![1.0, 0.7]).unwrap();
            // Raise the weight of edge (0, 1) to at least w.
            let mut entries: Vec<(usize, usize, f64)> = g.weighted_edges().map(|(e, x)| (e.u(), e.v(), x)).collect();
            let before = s.evaluate(&g).unwrap();
            entries.retain(|(u, v, _)| !(*u == 0 && *v == 1));
            entries.push((0, 1, w.max(g.weight(crate::graph::Edge::new(0, 1).unwrap()))));
            let raised = Graph::from_weighted_edges(6, entries).unwrap();
            prop_assert!(s.evaluate(&raised).unwrap() >= before);
        }
    }
}
