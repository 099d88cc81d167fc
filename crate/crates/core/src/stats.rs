//! Evaluation statistics: class separability, expected scores, correlations
//! and global rankings.

use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{pair_at, set_jaccard_distance, ClassSign, InjectionRecord, LabeledDataset, Motif};
use crate::rng;
use crate::shapley::Explanation;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// Two-sample Kolmogorov–Smirnov test. The p-value is the asymptotic
/// Kolmogorov tail `Q(λ)` with `λ = (√nₑ + 0.12 + 0.11/√nₑ)·D` and
/// `nₑ = n₁n₂/(n₁+n₂)`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Parameter("both KS samples must be nonempty".into()));
    }
    if a.iter().chain(b).any(|x| x.is_nan()) {
        return Err(Error::Parameter("KS samples contain NaN".into()));
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let en = (na * nb / (na + nb)).sqrt();
    let p = kolmogorov_q((en + 0.12 + 0.11 / en) * d);
    Ok(KsResult {
        statistic: d,
        p_value: p,
    })
}

/// `Q(λ) = 2 Σ_{k≥1} (−1)^{k−1} exp(−2k²λ²)`, clamped to [0, 1].
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 0.2 {
        // The alternating series converges too slowly here; Q is 1 to
        // within 1e-20.
        return 1.0;
    }
    let a2 = -2.0 * lambda * lambda;
    let mut sum = 0.0;
    let mut sign = 2.0;
    for k in 1..=100 {
        let term = sign * (a2 * (k * k) as f64).exp();
        sum += term;
        if term.abs() <= 1e-12 * sum.abs() || term.abs() < 1e-300 {
            break;
        }
        sign = -sign;
    }
    sum.clamp(0.0, 1.0)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparabilityConfig {
    /// Use at most this many graph pairs, drawn uniformly without
    /// replacement.
    pub max_pairs: Option<usize>,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparabilityReport {
    pub ks_statistic: f64,
    pub p_value: f64,
    pub intra: usize,
    pub inter: usize,
}

pub fn separability(d: &LabeledDataset) -> Result<SeparabilityReport> {
    separability_with(d, &SeparabilityConfig::default())
}

/// KS test between intra-class and inter-class pairwise Jaccard distances.
pub fn separability_with(d: &LabeledDataset, cfg: &SeparabilityConfig) -> Result<SeparabilityReport> {
    if d.class_count(0) < 2 || d.class_count(1) < 2 {
        return Err(Error::Parameter(format!(
            "separability needs at least 2 graphs per class, got {} and {}",
            d.class_count(0),
            d.class_count(1)
        )));
    }
    let n = d.len();
    let total = n * (n - 1) / 2;
    let pairs: Vec<usize> = match cfg.max_pairs {
        Some(k) if k < total => {
            let mut picked = index::sample(&mut rng::stream(cfg.seed, rng::SUBSAMPLE), total, k).into_vec();
            picked.sort_unstable();
            picked
        }
        _ => (0..total).collect(),
    };
    let distances: Vec<(bool, f64)> = pairs
        .par_iter()
        .map(|&p| {
            let pair = pair_at(n, p);
            let (i, j) = (pair.u(), pair.v());
            let same = d.label(i) == d.label(j);
            (same, set_jaccard_distance(d.graph(i).edge_set(), d.graph(j).edge_set()))
        })
        .collect();
    let intra: Vec<f64> = distances.iter().filter(|p| p.0).map(|p| p.1).collect();
    let inter: Vec<f64> = distances.iter().filter(|p| !p.0).map(|p| p.1).collect();
    if intra.is_empty() || inter.is_empty() {
        return Err(Error::Parameter("subsample left one distance sample empty".into()));
    }
    let ks = ks_two_sample(&intra, &inter)?;
    Ok(SeparabilityReport {
        ks_statistic: ks.statistic,
        p_value: ks.p_value,
        intra: intra.len(),
        inter: inter.len(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpectedScoreTable {
    /// One row per graph, one column per motif.
    pub rows: Vec<Vec<f64>>,
}

impl ExpectedScoreTable {
    pub fn flatten(&self) -> Vec<f64> {
        self.rows.iter().flatten().copied().collect()
    }
}

/// `I[i][j] · C_j · ρ_j`, where `C_j` is +1 for class-1 motifs and −1
/// otherwise.
pub fn expected_scores(inj: &InjectionRecord, motifs: &[Motif], rho: &[f64]) -> Result<ExpectedScoreTable> {
    if motifs.len() != inj.motifs() || rho.len() != inj.motifs() {
        return Err(Error::Parameter(format!(
            "injection record has {} motifs, got {} motifs and {} probabilities",
            inj.motifs(),
            motifs.len(),
            rho.len()
        )));
    }
    if let Some(r) = rho.iter().find(|r| !(0.0..=1.0).contains(*r)) {
        return Err(Error::Parameter(format!("perturbation probability {r} not in [0, 1]")));
    }
    let signs: Vec<f64> = motifs
        .iter()
        .map(|m| if m.class() == Some(ClassSign::Positive) { 1.0 } else { -1.0 })
        .collect();
    let rows = inj
        .rows()
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .map(|(j, &i)| if i == 0 { 0.0 } else { f64::from(i) * signs[j] * rho[j] })
                .collect()
        })
        .collect();
    Ok(ExpectedScoreTable { rows })
}

fn check_pair(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::Parameter(format!("sequence lengths differ: {} vs {}", x.len(), y.len())));
    }
    if x.len() < 2 {
        return Err(Error::UndefinedCorrelation(format!("need at least 2 points, got {}", x.len())));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::Parameter("correlation inputs must be finite".into()));
    }
    Ok(())
}

/// Sample Pearson correlation coefficient.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedCorrelation("zero variance".into()));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// 1-based ranks with ties sharing their average rank.
pub fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && x[order[end]] == x[order[start]] {
            end += 1;
        }
        let rank = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

/// Pearson correlation of average ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    pearson(&average_ranks(x), &average_ranks(y))
}

/// Linearly interpolated quantile of an ascending sample, `q` in [0, 1].
pub fn quantile(sorted: &[f64], q: f64) -> Option<f64> {
    if sorted.is_empty() || !(0.0..=1.0).contains(&q) {
        return None;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    Some(sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64))
}

pub fn median(values: &[f64]) -> Option<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    quantile(&v, 0.5)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankEntry {
    pub motif: usize,
    pub mean_abs: f64,
    /// Signed mean, for reference.
    pub mean: f64,
}

/// Mean absolute score per motif across explanations, highest first, ties
/// by motif id.
pub fn global_ranking(explanations: &[Explanation]) -> Result<Vec<RankEntry>> {
    let first = explanations.first().ok_or(Error::EmptyDataset)?;
    let ids = first.motif_ids();
    let mut totals = vec![(0.0, 0.0); ids.len()];
    for ex in explanations {
        if ex.motif_ids() != ids {
            return Err(Error::Parameter("explanations use different motif sets".into()));
        }
        for (t, s) in totals.iter_mut().zip(&ex.scores) {
            t.0 += s.xi.abs();
            t.1 += s.xi;
        }
    }
    let count = explanations.len() as f64;
    let mut ranking: Vec<RankEntry> = ids
        .into_iter()
        .zip(totals)
        .map(|(motif, (abs, signed))| RankEntry {
            motif,
            mean_abs: abs / count,
            mean: signed / count,
        })
        .collect();
    ranking.sort_by(|a, b| b.mean_abs.total_cmp(&a.mean_abs).then(a.motif.cmp(&b.motif)));
    Ok(ranking)
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::graph::Graph;
    use crate::masking::MaskKind;
    use crate::shapley::{Depth, MotifScore, Weighting};

    fn explanation(scores: &[(usize, f64)]) -> Explanation {
        Explanation {
            graph: None,
            depth: Depth::Exact,
            mask: MaskKind::Remove,
            weights: Weighting::Classic,
            queries: 0,
            coalitions: 0,
            rescaled: false,
            scores: scores.iter().map(|&(motif, xi)| MotifScore { motif, xi }).collect(),
        }
    }

    /// Brute-force sup over all sample points.
    fn ks_oracle(a: &[f64], b: &[f64]) -> f64 {
        let cdf = |s: &[f64], x: f64| s.iter().filter(|&&v| v <= x).count() as f64 / s.len() as f64;
        a.iter().chain(b).map(|&x| (cdf(a, x) - cdf(b, x)).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn correlation_examples() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let affine: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        assert!((pearson(&x, &affine).unwrap() - 1.0).abs() < 1e-15);
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!((pearson(&x, &neg).unwrap() + 1.0).abs() < 1e-15);
        assert!((pearson(&x, &[1.0, 3.0, 2.0, 4.0]).unwrap() - 0.8).abs() < 1e-12);
        assert!((spearman(&[1.0, 2.0, 3.0], &[1.0, 3.0, 2.0]).unwrap() - 0.5).abs() < 1e-12);
        let cubed: Vec<f64> = x.iter().map(|v| v * v * v).collect();
        assert!((spearman(&x, &cubed).unwrap() - 1.0).abs() < 1e-15);
        assert!((spearman(&x, &neg).unwrap() + 1.0).abs() < 1e-15);
        assert!(matches!(pearson(&x, &[1.0; 4]), Err(Error::UndefinedCorrelation(_))));
        assert!(matches!(spearman(&[2.0; 3], &[1.0, 2.0, 3.0]), Err(Error::UndefinedCorrelation(_))));
        assert!(pearson(&[1.0], &[1.0]).is_err());
        assert!(pearson(&[1.0, 2.0], &[1.0]).is_err());
    }

    #[test]
    fn quantiles_interpolate() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&v, 0.5), Some(2.5));
        assert_eq!(quantile(&v, 0.25), Some(1.75));
        assert_eq!(quantile(&v, 1.0), Some(4.0));
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(quantile(&[], 0.5), None);
    }

    #[test]
    fn ties_share_average_rank() {
        assert_eq!(average_ranks(&[10.0, 20.0, 10.0, 30.0]), vec![1.5, 3.0, 1.5, 4.0]);
    }

    #[test]
    fn ks_extremes() {
        let r = ks_two_sample(&[0.0, 0.0, 0.0], &[1.0, 1.0]).unwrap();
        assert_eq!(r.statistic, 1.0);
        let same = ks_two_sample(&[0.1, 0.5, 0.9], &[0.1, 0.5, 0.9]).unwrap();
        assert_eq!(same.statistic, 0.0);
        assert_eq!(same.p_value, 1.0);
        // Q(1) = 2(e^-2 - e^-8 + e^-18 - ...), cross-checked against scipy.special.kolmogorov.
        assert!((kolmogorov_q(1.0) - 0.26999967167735456).abs() < 1e-12);
        assert!(kolmogorov_q(3.0) < 1e-6);
    }

    #[test]
    fn separability_examples() {
        let n = 6;
        let a = Graph::from_edges(n, [(0, 1), (1, 2)]).unwrap();
        let b = Graph::from_edges(n, [(3, 4), (4, 5)]).unwrap();
        let split = LabeledDataset::new(n, vec![a.clone(), b.clone(), a.clone(), b.clone()], vec![0, 1, 0, 1], None).unwrap();
        let r = separability(&split).unwrap();
        assert_eq!(r.ks_statistic, 1.0);
        assert_eq!((r.intra, r.inter), (2, 4));

        let c = Graph::from_edges(n, [(0, 1), (3, 4)]).unwrap();
        let graphs = vec![a.clone(), b.clone(), c.clone(), a, b, c];
        let dup = LabeledDataset::new(n, graphs, vec![0, 0, 0, 1, 1, 1], None).unwrap();
        let r = separability(&dup).unwrap();
        assert!(r.ks_statistic < 0.35, "{}", r.ks_statistic);
        assert!(r.p_value > 0.5);

        let tiny = LabeledDataset::new(n, vec![Graph::empty(n); 3], vec![0, 0, 1], None).unwrap();
        assert!(matches!(separability(&tiny), Err(Error::Parameter(_))));
    }

    #[test]
    fn subsampling_is_seeded() {
        let n = 8;
        let graphs: Vec<Graph> = (0..20).map(|i| Graph::from_edges(n, [(i % 7, 7), (0, 1 + i % 5)]).unwrap()).collect();
        let labels = (0..20).map(|i| (i % 2) as u8).collect();
        let d = LabeledDataset::new(n, graphs, labels, None).unwrap();
        let cfg = SeparabilityConfig { max_pairs: Some(60), seed: 4 };
        let a = separability_with(&d, &cfg).unwrap();
        let b = separability_with(&d, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.intra + a.inter, 60);
        assert_eq!(separability(&d).unwrap().intra + separability(&d).unwrap().inter, 190);
    }

    #[test]
    fn expected_score_examples() {
        let m1 = Motif::from_pairs(0, 3, [(0, 1)], Some(ClassSign::Positive)).unwrap();
        let m0 = Motif::from_pairs(1, 3, [(1, 2)], Some(ClassSign::Negative)).unwrap();
        let inj = InjectionRecord::new(vec![vec![1, -1], vec![-1, 0], vec![0, 1]], 2).unwrap();
        let t = expected_scores(&inj, &[m1.clone(), m0.clone()], &[0.6, 0.2]).unwrap();
        assert_eq!(t.rows, vec![vec![0.6, 0.2], vec![-0.6, 0.0], vec![0.0, -0.2]]);
        let zeros = expected_scores(&InjectionRecord::zeros(3, 2), &[m1.clone(), m0.clone()], &[0.6, 0.2]).unwrap();
        assert!(zeros.flatten().iter().all(|&v| v == 0.0 && v.is_sign_positive()));
        assert!(expected_scores(&inj, &[m1], &[0.6]).is_err());
    }

    #[test]
    fn global_ranking_examples() {
        let r = global_ranking(&[explanation(&[(0, 0.1)]), explanation(&[(0, -0.1)])]).unwrap();
        assert!((r[0].mean_abs - 0.1).abs() < 1e-15);
        let exs = [
            explanation(&[(5, 0.2), (3, 0.1)]),
            explanation(&[(5, -0.4), (3, 0.1)]),
            explanation(&[(5, 0.0), (3, 0.1)]),
        ];
        let r = global_ranking(&exs).unwrap();
        assert_eq!(r.iter().map(|e| e.motif).collect::<Vec<_>>(), vec![5, 3]);
        assert!((r[0].mean_abs - 0.2).abs() < 1e-15);
        assert!((r[0].mean + 0.2 / 3.0).abs() < 1e-15);
        let tie = global_ranking(&[explanation(&[(4, 0.5), (2, -0.5)])]).unwrap();
        assert_eq!(tie[0].motif, 2);
        assert!(matches!(global_ranking(&[]), Err(Error::EmptyDataset)));
        assert!(global_ranking(&[explanation(&[(1, 0.1)]), explanation(&[(2, 0.1)])]).is_err());
    }

    proptest! {
        #[test]
        fn ks_matches_oracle(a in prop::collection::vec(0u8..10, 1..30), b in prop::collection::vec(0u8..10, 1..30)) {
            let a: Vec<f64> = a.into_iter().map(f64::from).collect();
            let b: Vec<f64> = b.into_iter().map(f64::from).collect();
            let r = ks_two_sample(&a, &b).unwrap();
            prop_assert!((r.statistic - ks_oracle(&a, &b)).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&r.p_value));
            let ea: Vec<f64> = a.iter().map(|v| (v * 0.3).exp()).collect();
            let eb: Vec<f64> = b.iter().map(|v| (v * 0.3).exp()).collect();
            prop_assert_eq!(ks_two_sample(&ea, &eb).unwrap().statistic, r.statistic);
        }

        #[test]
        fn spearman_is_rank_invariant(pairs in prop::collection::vec((-50i32..50, -50i32..50), 3..30)) {
            let x: Vec<f64> = pairs.iter().map(|p| f64::from(p.0)).collect();
            let y: Vec<f64> = pairs.iter().map(|p| f64::from(p.1)).collect();
            let fx: Vec<f64> = x.iter().map(|v| v * v * v + 3.0 * v).collect();
            match (spearman(&x, &y), spearman(&fx, &y)) {
                (Ok(a), Ok(b)) => {
                    prop_assert!((a - b).abs() < 1e-12);
                    prop_assert!((-1.0..=1.0).contains(&a));
                }
                (Err(_), Err(_)) => {}
                _ => prop_assert!(false),
            }
        }

        #[test]
        fn expected_scores_bounded(rows in prop::collection::vec(prop::collection::vec(-1i8..=1, 3), 1..10), rho in prop::collection::vec(0.0f64..=1.0, 3)) {
            let motifs: Vec<Motif> = (0..3).map(|k| Motif::from_pairs(k, 4, [(k, k + 1)], Some(ClassSign::from_label((k % 2) as u8).unwrap())).unwrap()).collect();
            let inj = InjectionRecord::new(rows.clone(), 3).unwrap();
            let t = expected_scores(&inj, &motifs, &rho).unwrap();
            for (r, row) in t.rows.iter().zip(&rows) {
                for (j, (v, i)) in r.iter().zip(row).enumerate() {
                    prop_assert!((-1.0..=1.0).contains(v));
                    prop_assert_eq!(*v == 0.0, *i == 0 || rho[j] == 0.0);
                }
            }
        }
    }
}
