use std::collections::BTreeMap;
use std::fmt::Write as _;

use motif_shap::stats::{
    expected_scores, global_ranking, median, pearson, quantile, separability_with, spearman, SeparabilityConfig,
};
use motif_shap::{Error, Explanation, Result};
use serde::Serialize;
use serde_json::json;

use crate::args::{ApproxCorrArgs, EvalCommand, ExpectedArgs, GlobalArgs, SeparabilityArgs};
use crate::commands::{read_dataset, read_motifs};
use crate::context::Context;
use crate::ExplanationFile;

pub fn run(ctx: &mut Context, command: &EvalCommand) -> Result<()> {
    match command {
        EvalCommand::Separability(a) => separability(ctx, a),
        EvalCommand::Expected(a) => expected(ctx, a),
        EvalCommand::ApproxCorr(a) => approx_corr(ctx, a),
        EvalCommand::Global(a) => global(ctx, a),
    }
}

fn read_explanations(ctx: &mut Context, path: &std::path::Path) -> Result<Vec<Explanation>> {
    let file: ExplanationFile = serde_json::from_str(&ctx.read(path)?)?;
    Ok(file.explanations)
}

fn finish<T: Serialize>(ctx: &Context, out: &std::path::Path, report: &T, csv: Option<(&std::path::Path, String)>) -> Result<()> {
    ctx.write_json(out, report)?;
    if let Some((path, text)) = csv {
        ctx.write(path, &text)?;
    }
    println!("{}", serde_json::to_string(report).map_err(Error::from)?);
    Ok(())
}

fn separability(ctx: &mut Context, a: &SeparabilityArgs) -> Result<()> {
    ctx.seed = Some(a.seed);
    let d = read_dataset(ctx, &a.dataset)?;
    let cfg = SeparabilityConfig {
        max_pairs: a.max_pairs,
        seed: a.seed,
    };
    let r = separability_with(&d, &cfg)?;
    let csv = format!(
        "ks_statistic,p_value,intra,inter\n{},{},{},{}\n",
        r.ks_statistic, r.p_value, r.intra, r.inter
    );
    finish(ctx, &a.out, &r, a.csv.as_deref().map(|p| (p, csv)))
}

/// Scores of each explanation in motif-file order.
fn aligned(ex: &Explanation, ids: &[usize]) -> Result<Vec<f64>> {
    let by_id: BTreeMap<usize, f64> = ex.scores.iter().map(|s| (s.motif, s.xi)).collect();
    ids.iter()
        .map(|id| {
            by_id
                .get(id)
                .copied()
                .ok_or_else(|| Error::Parameter(format!("explanation lacks motif {id}")))
        })
        .collect()
}

fn expected(ctx: &mut Context, a: &ExpectedArgs) -> Result<()> {
    let d = read_dataset(ctx, &a.dataset)?;
    let set = read_motifs(ctx, &a.motifs)?;
    let inj = d
        .injections()
        .ok_or_else(|| Error::Config("dataset has no injection record".into()))?;
    let rho = set
        .meta
        .iter()
        .map(|m| m.rho)
        .collect::<Option<Vec<f64>>>()
        .ok_or_else(|| Error::Config("motif set lacks rho values".into()))?;
    let table = expected_scores(inj, &set.motifs, &rho)?;
    let ids: Vec<usize> = set.motifs.iter().map(|m| m.id()).collect();

    let mut scores: Option<Vec<Vec<f64>>> = None;
    if let Some(path) = &a.explanations {
        let exs = read_explanations(ctx, path)?;
        let mut rows = vec![None; d.len()];
        for ex in &exs {
            let g = ex
                .graph
                .filter(|&g| g < d.len())
                .ok_or_else(|| Error::Parameter("explanation without a valid dataset graph index".into()))?;
            rows[g] = Some(aligned(ex, &ids)?);
        }
        let rows = rows
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::Parameter("explanations do not cover every dataset graph".into()))?;
        scores = Some(rows);
    }
    let rho_spearman = match &scores {
        Some(rows) => Some(spearman(&rows.concat(), &table.flatten())?),
        None => None,
    };

    let mut csv = String::from(if scores.is_some() { "graph,motif,expected,xi\n" } else { "graph,motif,expected\n" });
    for (i, row) in table.rows.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            match &scores {
                Some(s) => writeln!(csv, "{i},{},{v},{}", ids[j], s[i][j]),
                None => writeln!(csv, "{i},{},{v}", ids[j]),
            }
            .expect("string write");
        }
    }
    let report = json!({ "spearman": rho_spearman, "motifs": ids, "expected": table.rows });
    finish(ctx, &a.out, &report, a.csv.as_deref().map(|p| (p, csv)))
}

#[derive(Serialize)]
struct DepthSummary {
    file: String,
    depth: String,
    graphs: usize,
    undefined: usize,
    median: Option<f64>,
    q1: Option<f64>,
    q3: Option<f64>,
    min: Option<f64>,
    max: Option<f64>,
}

fn approx_corr(ctx: &mut Context, a: &ApproxCorrArgs) -> Result<()> {
    let exact = read_explanations(ctx, &a.exact)?;
    let mut summaries = Vec::new();
    let mut csv = String::from("file,depth,graph,pearson\n");
    for path in &a.approx {
        let approx = read_explanations(ctx, path)?;
        if approx.len() != exact.len() {
            return Err(Error::Parameter(format!(
                "{} has {} explanations, exact has {}",
                path.display(),
                approx.len(),
                exact.len()
            )));
        }
        let depth = approx.first().map(|e| e.depth.to_string()).unwrap_or_default();
        let mut values = Vec::new();
        let mut undefined = 0;
        for (k, (ap, ex)) in approx.iter().zip(&exact).enumerate() {
            if ap.graph != ex.graph || ap.motif_ids() != ex.motif_ids() {
                return Err(Error::Parameter(format!("explanation {k} differs in graph or motifs")));
            }
            let graph = ex.graph.map_or(k.to_string(), |g| g.to_string());
            match pearson(&ap.values(), &ex.values()) {
                Ok(r) => {
                    writeln!(csv, "{},{depth},{graph},{r}", path.display()).expect("string write");
                    values.push(r);
                }
                Err(Error::UndefinedCorrelation(_)) => {
                    writeln!(csv, "{},{depth},{graph},", path.display()).expect("string write");
                    undefined += 1;
                }
                Err(e) => return Err(e),
            }
        }
        let mut sorted = values.clone();
        sorted.sort_by(f64::total_cmp);
        summaries.push(DepthSummary {
            file: path.display().to_string(),
            depth,
            graphs: values.len(),
            undefined,
            median: median(&values),
            q1: quantile(&sorted, 0.25),
            q3: quantile(&sorted, 0.75),
            min: sorted.first().copied(),
            max: sorted.last().copied(),
        });
    }
    finish(ctx, &a.out, &json!({ "depths": summaries }), a.csv.as_deref().map(|p| (p, csv)))
}

fn global(ctx: &mut Context, a: &GlobalArgs) -> Result<()> {
    let exs = read_explanations(ctx, &a.explanations)?;
    let ranking = global_ranking(&exs)?;
    let rho: BTreeMap<usize, f64> = match &a.motifs {
        Some(p) => {
            let set = read_motifs(ctx, p)?;
            set.motifs
                .iter()
                .zip(&set.meta)
                .filter_map(|(m, meta)| meta.rho.map(|r| (m.id(), r)))
                .collect()
        }
        None => BTreeMap::new(),
    };
    let mut csv = String::from("motif,rho,mean_xi,mean_abs_xi\n");
    for r in &ranking {
        let rho = rho.get(&r.motif).map(f64::to_string).unwrap_or_default();
        writeln!(csv, "{},{rho},{},{}", r.motif, r.mean, r.mean_abs).expect("string write");
    }
    finish(ctx, &a.out, &json!({ "ranking": ranking }), a.csv.as_deref().map(|p| (p, csv)))
}
