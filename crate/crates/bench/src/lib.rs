//! Shared fixtures for the benchmarks.

use motif_shap::io::identity;
use motif_shap::{generate, MotifSpec, SynthConfig, SynthOutput};

/// A synthetic dataset of `graphs` graphs over 100 nodes with `motifs`
/// disjoint 10-edge motifs injected with probability 0.5.
pub fn dataset(graphs: usize, motifs: usize, seed: u64) -> SynthOutput {
    generate(&SynthConfig {
        n: 100,
        graphs,
        density: 0.2,
        motifs: MotifSpec::Random {
            count: motifs,
            edges: 10,
            disjoint: motifs * 11 <= 100,
        },
        rho: vec![0.5; motifs],
        correlation: identity(motifs),
        seed,
    })
    .expect("benchmark dataset")
}
