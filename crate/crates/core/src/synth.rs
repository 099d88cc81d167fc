//! Synthetic labelled datasets with controlled motif injection.
//!
//! Graph `j` starts as an Erdős–Rényi graph and gets label `j mod 2`. For
//! each motif `k` (ascending), if `C[k] · R[j] <= rho[k]` the motif's edges
//! are added when `j` and `k` have the same parity and removed otherwise,
//! where `R` is a matrix of uniform draws. Motif `k` is therefore predictive
//! of class `k mod 2`.

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::graph::{pair_count, ClassSign, Edge, Graph, InjectionRecord, LabeledDataset, Motif};
use crate::rng;

#[derive(Clone, Debug)]
pub enum MotifSpec {
    /// Use these motifs as given (their class is reassigned by index parity).
    Explicit(Vec<Motif>),
    /// Sample `count` connected motifs of `edges` edges each.
    Random {
        count: usize,
        edges: usize,
        disjoint: bool,
    },
}

#[derive(Clone, Debug)]
pub struct SynthConfig {
    pub n: usize,
    pub graphs: usize,
    pub density: f64,
    pub motifs: MotifSpec,
    pub rho: Vec<f64>,
    /// `n_m x n_m` motif correlation matrix with unit diagonal.
    pub correlation: Vec<Vec<f64>>,
    pub seed: u64,
}

impl SynthConfig {
    fn motif_count(&self) -> usize {
        match &self.motifs {
            MotifSpec::Explicit(ms) => ms.len(),
            MotifSpec::Random { count, .. } => *count,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n_m = self.motif_count();
        if self.n < 2 {
            return Err(Error::Parameter(format!("need at least 2 nodes, got {}", self.n)));
        }
        if self.graphs == 0 || self.graphs % 2 != 0 {
            return Err(Error::Parameter(format!(
                "graph count must be positive and even, got {}",
                self.graphs
            )));
        }
        if !(self.density > 0.0 && self.density < 1.0) {
            return Err(Error::Parameter(format!("density {} not in (0, 1)", self.density)));
        }
        if self.rho.len() != n_m {
            return Err(Error::Parameter(format!(
                "{} perturbation probabilities for {n_m} motifs",
                self.rho.len()
            )));
        }
        if let Some(r) = self.rho.iter().find(|r| !(0.0..=1.0).contains(*r)) {
            return Err(Error::Parameter(format!("perturbation probability {r} not in [0, 1]")));
        }
        if self.correlation.len() != n_m || self.correlation.iter().any(|row| row.len() != n_m) {
            return Err(Error::Parameter(format!("correlation matrix must be {n_m}x{n_m}")));
        }
        for (i, row) in self.correlation.iter().enumerate() {
            if row[i] != 1.0 {
                return Err(Error::Parameter(format!("correlation diagonal entry {i} is not 1")));
            }
            if let Some(c) = row.iter().find(|c| !(0.0..=1.0).contains(*c)) {
                return Err(Error::Parameter(format!("correlation entry {c} not in [0, 1]")));
            }
        }
        if let MotifSpec::Explicit(ms) = &self.motifs {
            if let Some(m) = ms.iter().find(|m| m.n() != self.n) {
                return Err(Error::UniverseMismatch {
                    expected: self.n,
                    found: m.n(),
                });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SynthOutput {
    /// Graphs, labels and the injection record.
    pub dataset: LabeledDataset,
    pub motifs: Vec<Motif>,
    /// Observed fraction of graphs perturbed by each motif.
    pub rates: Vec<f64>,
}

impl SynthOutput {
    pub fn injections(&self) -> &InjectionRecord {
        self.dataset.injections().expect("generated datasets carry injections")
    }
}

/// Each node pair is included independently with probability `density`.
pub fn erdos_renyi<R: Rng + ?Sized>(n: usize, density: f64, rng: &mut R) -> Graph {
    let mut edges = BitSet::new(pair_count(n));
    for i in 0..pair_count(n) {
        if rng.random::<f64>() < density {
            edges.insert(i);
        }
    }
    Graph::from_parts(n, edges, None)
}

fn class_for_index(k: usize) -> ClassSign {
    if k % 2 == 1 {
        ClassSign::Positive
    } else {
        ClassSign::Negative
    }
}

/// Grows a connected motif with `edges` edges inside `block` by repeatedly
/// adding a uniformly chosen unused pair that touches the current node set.
fn grow_motif<R: Rng + ?Sized>(
    id: usize,
    n: usize,
    block: &[usize],
    edges: usize,
    rng: &mut R,
) -> Result<Motif> {
    let mut nodes = vec![block[rng.random_range(0..block.len())]];
    let mut chosen: Vec<Edge> = Vec::with_capacity(edges);
    while chosen.len() < edges {
        let mut candidates = Vec::new();
        for &a in &nodes {
            for &b in block {
                if a == b {
                    continue;
                }
                let e = Edge::new(a, b)?;
                if !chosen.contains(&e) && !candidates.contains(&e) {
                    candidates.push(e);
                }
            }
        }
        if candidates.is_empty() {
            return Err(Error::Parameter(format!(
                "cannot grow a {edges}-edge motif on {} nodes",
                block.len()
            )));
        }
        candidates.sort_unstable();
        let e = candidates[rng.random_range(0..candidates.len())];
        for x in [e.u(), e.v()] {
            if !nodes.contains(&x) {
                nodes.push(x);
            }
        }
        chosen.push(e);
    }
    Motif::new(id, n, chosen, Some(class_for_index(id)))
}

/// Samples `count` connected motifs with `edges` edges each. In disjoint mode
/// every motif lives on its own block of `edges + 1` nodes. Motif `k` is
/// labelled with class `k mod 2`.
pub fn sample_motifs<R: Rng + ?Sized>(
    n: usize,
    count: usize,
    edges: usize,
    disjoint: bool,
    rng: &mut R,
) -> Result<Vec<Motif>> {
    if edges == 0 {
        return Err(Error::Parameter("motifs need at least one edge".into()));
    }
    if disjoint && count * (edges + 1) > n {
        return Err(Error::Parameter(format!(
            "{count} node-disjoint motifs of {edges} edges need {} nodes, universe has {n}",
            count * (edges + 1)
        )));
    }
    if !disjoint && edges > pair_count(n) {
        return Err(Error::Parameter(format!("{edges} edges exceed the {n}-node universe")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    (0..count)
        .map(|k| {
            let block: &[usize] = if disjoint {
                &order[k * (edges + 1)..(k + 1) * (edges + 1)]
            } else {
                &order
            };
            grow_motif(k, n, block, edges, rng)
        })
        .collect()
}

/// Builds the dataset; fully determined by the configuration and its seed.
pub fn generate(cfg: &SynthConfig) -> Result<SynthOutput> {
    cfg.validate()?;
    let n_m = cfg.motif_count();
    let motifs: Vec<Motif> = match &cfg.motifs {
        MotifSpec::Explicit(ms) => ms
            .iter()
            .enumerate()
            .map(|(k, m)| m.clone().with_class(Some(class_for_index(k))))
            .collect(),
        MotifSpec::Random {
            count,
            edges,
            disjoint,
        } => sample_motifs(cfg.n, *count, *edges, *disjoint, &mut rng::stream(cfg.seed, rng::MOTIFS))?,
    };

    let mut thresholds = rng::stream(cfg.seed, rng::THRESHOLDS);
    let r: Vec<Vec<f64>> = (0..cfg.graphs)
        .map(|_| (0..n_m).map(|_| thresholds.random::<f64>()).collect())
        .collect();

    let rows: Vec<(Graph, Vec<i8>)> = (0..cfg.graphs)
        .into_par_iter()
        .map(|j| {
            let mut rng = rng::substream(cfg.seed, rng::ER, j as u64);
            let g = erdos_renyi(cfg.n, cfg.density, &mut rng);
            let mut edges = g.edge_set().clone();
            let mut actions = vec![0i8; n_m];
            for k in 0..n_m {
                let score: f64 = cfg.correlation[k].iter().zip(&r[j]).map(|(c, x)| c * x).sum();
                if score <= cfg.rho[k] {
                    if j % 2 == k % 2 {
                        edges.union_with(motifs[k].edge_set());
                        actions[k] = 1;
                    } else {
                        edges.difference_with(motifs[k].edge_set());
                        actions[k] = -1;
                    }
                }
            }
            (Graph::from_parts(cfg.n, edges, None), actions)
        })
        .collect();

    let (graphs, rows): (Vec<Graph>, Vec<Vec<i8>>) = rows.into_iter().unzip();
    let injections = InjectionRecord::new(rows, n_m)?;
    let rates = injections.rates();
    let labels = (0..cfg.graphs).map(|j| (j % 2) as u8).collect();
    let dataset = LabeledDataset::new(cfg.n, graphs, labels, Some(injections))?;
    Ok(SynthOutput {
        dataset,
        motifs,
        rates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::is_connected;
    use crate::io::identity;

    fn config(rho: Vec<f64>, seed: u64) -> SynthConfig {
        let count = rho.len();
        SynthConfig {
            n: 100,
            graphs: 200,
            density: 0.2,
            motifs: MotifSpec::Random {
                count,
                edges: 10,
                disjoint: true,
            },
            correlation: identity(count),
            rho,
            seed,
        }
    }

    #[test]
    fn zero_rho_means_no_injection() {
        let out = generate(&config(vec![0.0; 3], 1)).unwrap();
        assert!(out.injections().rows().iter().flatten().all(|&v| v == 0));
    }

    #[test]
    fn unit_rho_always_injects() {
        let out = generate(&config(vec![1.0, 1.0], 2)).unwrap();
        let inj = out.injections();
        for j in 0..out.dataset.len() {
            for k in 0..2 {
                assert_ne!(inj.get(j, k), 0);
            }
            // Motif 1 is a class-1 motif: present in every class-1 graph.
            let contains = out.motifs[1].edge_set().is_subset(out.dataset.graph(j).edge_set());
            assert_eq!(contains, j % 2 == 1);
        }
    }

    #[test]
    fn injection_rates_track_rho() {
        let rho = vec![0.0, 0.2, 0.4, 0.6, 0.8, 1.0];
        let out = generate(&config(rho.clone(), 3)).unwrap();
        for (rate, r) in out.rates.iter().zip(&rho) {
            assert!((rate - r).abs() <= 0.07, "rate {rate} vs rho {r}");
        }
        assert_eq!(out.dataset.class_count(0), 100);
        assert_eq!(out.dataset.class_count(1), 100);
    }

    #[test]
    fn injected_motifs_are_subsets() {
        let out = generate(&config(vec![0.5, 0.5, 0.5], 4)).unwrap();
        let inj = out.injections();
        for j in 0..out.dataset.len() {
            for (k, m) in out.motifs.iter().enumerate() {
                let g = out.dataset.graph(j).edge_set();
                match inj.get(j, k) {
                    1 => assert!(m.edge_set().is_subset(g)),
                    -1 => assert!(m.edge_set().is_disjoint(g)),
                    _ => {}
                }
            }
        }
    }

    #[test]
    fn generation_is_reproducible() {
        let a = generate(&config(vec![0.3, 0.7], 9)).unwrap();
        let b = generate(&config(vec![0.3, 0.7], 9)).unwrap();
        let c = generate(&config(vec![0.3, 0.7], 10)).unwrap();
        assert_eq!(a.dataset, b.dataset);
        assert_eq!(a.motifs, b.motifs);
        assert_ne!(a.dataset, c.dataset);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut odd = config(vec![0.5], 1);
        odd.graphs = 5;
        assert!(matches!(generate(&odd), Err(Error::Parameter(_))));
        let mut bad_rho = config(vec![0.5], 1);
        bad_rho.rho = vec![1.5];
        assert!(generate(&bad_rho).is_err());
        let mut bad_diag = config(vec![0.5, 0.5], 1);
        bad_diag.correlation[1][1] = 0.5;
        assert!(generate(&bad_diag).is_err());
        let mut density = config(vec![0.5], 1);
        density.density = 1.0;
        assert!(generate(&density).is_err());
    }

    #[test]
    fn sampled_motifs_are_connected_and_sized() {
        for seed in 0..100 {
            let mut rng = rng::stream(seed, rng::MOTIFS);
            let ms = sample_motifs(100, 6, 10, true, &mut rng).unwrap();
            for m in &ms {
                assert_eq!(m.size(), 10);
                assert!(is_connected(m.edges()));
            }
            for a in 0..ms.len() {
                for b in a + 1..ms.len() {
                    let na = ms[a].nodes();
                    assert!(ms[b].nodes().iter().all(|x| !na.contains(x)));
                }
            }
            assert_eq!(ms[1].class(), Some(ClassSign::Positive));
            assert_eq!(ms[2].class(), Some(ClassSign::Negative));
        }
        let single = sample_motifs(5, 1, 1, true, &mut rng::stream(0, rng::MOTIFS)).unwrap();
        assert_eq!(single[0].size(), 1);
        assert!(matches!(
            sample_motifs(20, 3, 10, true, &mut rng::stream(0, rng::MOTIFS)),
            Err(Error::Parameter(_))
        ));
        assert!(sample_motifs(20, 3, 10, false, &mut rng::stream(0, rng::MOTIFS)).is_ok());
    }

    #[test]
    fn erdos_renyi_statistics() {
        let counts: Vec<f64> = (0..100)
            .map(|j| erdos_renyi(100, 0.2, &mut rng::substream(5, rng::ER, j)).edge_count() as f64)
            .collect();
        let mean = counts.iter().sum::<f64>() / counts.len() as f64;
        // Binomial(4950, 0.2): sigma of a single draw is about 28.1; the mean
        // of 100 draws has sigma about 2.8.
        assert!((mean - 990.0).abs() < 3.0 * 28.14 / 10.0, "mean {mean}");
        for c in &counts {
            assert!((c - 990.0).abs() < 5.0 * 28.14);
        }

        let hits = (0..10_000)
            .filter(|&j| erdos_renyi(2, 0.5, &mut rng::substream(6, rng::ER, j)).edge_count() == 1)
            .count();
        // sd = 50
        assert!((hits as i64 - 5000).abs() < 200, "hits {hits}");

        let a = erdos_renyi(30, 0.3, &mut rng::substream(8, rng::ER, 0));
        let b = erdos_renyi(30, 0.3, &mut rng::substream(8, rng::ER, 0));
        assert_eq!(a, b);
    }
}
