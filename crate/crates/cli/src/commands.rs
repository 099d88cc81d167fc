use std::path::Path;

use motif_shap::io::{
    correlation_from_str, dataset_from_str, dataset_to_string, graph_from_str, identity, motifs_from_str,
    motifs_to_string, MotifMeta, MotifSet,
};
use motif_shap::graph::support;
use motif_shap::mining::{mine, rank_and_select, MinerConfig, RankerConfig};
use motif_shap::synth::{generate, MotifSpec, SynthConfig};
use motif_shap::{
    explain, query_budget, BlackBox, ClassSign, Depth, Error, ExplainConfig, Explanation, Graph,
    LabeledDataset, MaskingStrategy, Result,
};
use rayon::prelude::*;
use serde::Deserialize;

use crate::args::{BlackBoxKind, Command, ExplainArgs, MineArgs, PipelineArgs, RankArgs, ServeArgs, SynthArgs};
use crate::context::Context;
use crate::{classify, eval, model, report, run, ExplanationFile, EXIT_OK};

pub fn execute(argv: &[String], command: &Command) -> Result<()> {
    let config = serde_json::to_value(command).map_err(Error::from)?;
    let mut ctx = Context::new(argv, command.name(), config);
    match command {
        Command::Synth(a) => synth(&mut ctx, a),
        Command::Mine(a) => mine_cmd(&mut ctx, a),
        Command::Rank(a) => rank(&mut ctx, a),
        Command::Explain(a) => explain_cmd(&mut ctx, a),
        Command::Eval(e) => eval::run(&mut ctx, e),
        Command::BlackboxServe(a) => serve(&mut ctx, a),
        Command::Pipeline(_) => unreachable!("pipelines are dispatched by run"),
    }
}

pub fn read_dataset(ctx: &mut Context, path: &Path) -> Result<LabeledDataset> {
    dataset_from_str(&ctx.read(path)?)
}

pub fn read_motifs(ctx: &mut Context, path: &Path) -> Result<MotifSet> {
    motifs_from_str(&ctx.read(path)?)
}

fn synth(ctx: &mut Context, a: &SynthArgs) -> Result<()> {
    ctx.seed = Some(a.seed);
    let explicit = a.motif_file.as_deref().map(|p| read_motifs(ctx, p)).transpose()?;
    let count = explicit.as_ref().map_or(a.motifs, |s| s.motifs.len());
    let rho = match a.rho.len() {
        0 => explicit
            .as_ref()
            .and_then(|s| s.meta.iter().map(|m| m.rho).collect::<Option<Vec<f64>>>())
            .ok_or_else(|| Error::Parameter("--rho is required".into()))?,
        1 => vec![a.rho[0]; count],
        len if len == count => a.rho.clone(),
        len => {
            return Err(Error::Parameter(format!("{len} rho values for {count} motifs")));
        }
    };
    let correlation = match &a.correlation {
        Some(p) => correlation_from_str(&ctx.read(p)?)?,
        None => identity(count),
    };
    let motifs = match explicit {
        Some(set) => {
            if set.n != a.nodes {
                return Err(Error::UniverseMismatch {
                    expected: a.nodes,
                    found: set.n,
                });
            }
            MotifSpec::Explicit(set.motifs)
        }
        None => MotifSpec::Random {
            count,
            edges: a.motif_edges,
            disjoint: !a.overlapping,
        },
    };
    let cfg = SynthConfig {
        n: a.nodes,
        graphs: a.graphs,
        density: a.density,
        motifs,
        rho: rho.clone(),
        correlation,
        seed: a.seed,
    };
    let out = generate(&cfg)?;
    std::fs::create_dir_all(&a.out_dir)?;
    ctx.write(&a.out_dir.join("dataset.json"), &dataset_to_string(&out.dataset))?;
    let set = MotifSet {
        n: a.nodes,
        meta: rho
            .iter()
            .zip(&out.rates)
            .map(|(&r, &rate)| MotifMeta {
                rho: Some(r),
                rate: Some(rate),
                cs: None,
            })
            .collect(),
        motifs: out.motifs.clone(),
    };
    ctx.write(&a.out_dir.join("motifs.json"), &motifs_to_string(&set))?;
    let injections = serde_json::json!({
        "motifs": out.injections().motifs(),
        "rows": out.injections().rows(),
        "rates": out.rates,
    });
    ctx.write(
        &a.out_dir.join("injections.json"),
        &(serde_json::to_string(&injections).map_err(Error::from)? + "\n"),
    )
}

fn mine_cmd(ctx: &mut Context, a: &MineArgs) -> Result<()> {
    let d = read_dataset(ctx, &a.dataset)?;
    let cfg = MinerConfig {
        support: a.support,
        max_size: a.max_size,
        label: a.label,
    };
    let motifs = mine(&d, &cfg)?;
    ctx.write(&a.out, &motifs_to_string(&MotifSet::new(d.n(), motifs)))
}

fn rank(ctx: &mut Context, a: &RankArgs) -> Result<()> {
    let d = read_dataset(ctx, &a.dataset)?;
    let set = read_motifs(ctx, &a.motifs)?;
    if set.n != d.n() {
        return Err(Error::UniverseMismatch {
            expected: d.n(),
            found: set.n,
        });
    }
    let cfg = RankerConfig {
        dt: a.dt,
        st: a.st,
        k: a.k,
    };
    let ranked = rank_and_select(&set.motifs, &d, &cfg)?;
    let mut out = MotifSet::new(d.n(), Vec::new());
    for r in ranked {
        let source = set.motifs.iter().position(|m| *m == r.motif).expect("selected from input");
        let mut motif = r.motif;
        if motif.class().is_none() {
            // Unlabelled motifs take the class in which they are more frequent.
            let s0 = support(motif.edges(), &d, Some(0))?;
            let s1 = support(motif.edges(), &d, Some(1))?;
            if s0 != s1 {
                motif = motif.with_class(Some(if s1 > s0 { ClassSign::Positive } else { ClassSign::Negative }));
            }
        }
        out.motifs.push(motif);
        out.meta.push(MotifMeta {
            cs: Some(r.cs),
            ..set.meta[source]
        });
    }
    ctx.write(&a.out, &motifs_to_string(&out))
}

enum Target {
    All,
    Index(usize),
    File(std::path::PathBuf),
}

fn parse_target(s: &str) -> Target {
    if s == "all" {
        Target::All
    } else if let Ok(i) = s.parse() {
        Target::Index(i)
    } else {
        Target::File(s.into())
    }
}

fn explain_cmd(ctx: &mut Context, a: &ExplainArgs) -> Result<()> {
    let set = read_motifs(ctx, &a.motifs)?;
    let m = set.motifs.len();
    // Fail before loading data or starting an external model.
    if a.depth == Depth::Exact && m > a.exact_limit {
        return Err(Error::LatticeTooLarge {
            motifs: m,
            limit: a.exact_limit,
            queries: query_budget(m, Depth::Exact),
        });
    }
    let dataset = a.dataset.as_deref().map(|p| read_dataset(ctx, p)).transpose()?;
    let need_dataset = || Error::Config("--graph all or an index needs --dataset".into());
    let targets: Vec<(Option<usize>, Graph)> = match parse_target(&a.graph) {
        Target::All => {
            let d = dataset.as_ref().ok_or_else(need_dataset)?;
            d.graphs().iter().cloned().enumerate().map(|(i, g)| (Some(i), g)).collect()
        }
        Target::Index(i) => {
            let d = dataset.as_ref().ok_or_else(need_dataset)?;
            if i >= d.len() {
                return Err(Error::Parameter(format!("graph index {i} out of range for {} graphs", d.len())));
            }
            vec![(Some(i), d.graph(i).clone())]
        }
        Target::File(p) => vec![(None, graph_from_str(&ctx.read(&p)?)?)],
    };
    let background = match &a.background {
        Some(p) => Some(read_dataset(ctx, p)?),
        None => dataset.clone(),
    };
    let masking = MaskingStrategy::new(a.mask, background.as_ref())?;
    let model = model::build(ctx, &a.model, set.n, Some(&set), dataset.as_ref())?;
    let cfg = ExplainConfig {
        weighting: a.weights,
        exact_limit: a.exact_limit,
        rescale: a.rescale,
    };
    let one = |(index, g): &(Option<usize>, Graph)| -> Result<Explanation> {
        let mut ex = explain(g, &model, &set.motifs, &masking, a.depth, &cfg)?;
        ex.graph = *index;
        Ok(ex)
    };
    let explanations: Vec<Explanation> = if model.concurrent() {
        targets.par_iter().map(one).collect::<Result<_>>()?
    } else {
        targets.iter().map(one).collect::<Result<_>>()?
    };
    ctx.write_json(&a.out, &ExplanationFile::new(explanations))
}

fn serve(ctx: &mut Context, a: &ServeArgs) -> Result<()> {
    if a.model.blackbox == BlackBoxKind::External {
        return Err(Error::Parameter("blackbox-serve wraps a built-in black-box".into()));
    }
    let set = a.motifs.as_deref().map(|p| read_motifs(ctx, p)).transpose()?;
    let dataset = a.dataset.as_deref().map(|p| read_dataset(ctx, p)).transpose()?;
    let n = match (&set, &dataset, &a.model.truth) {
        (_, Some(d), _) => d.n(),
        (Some(s), None, _) => s.n,
        (None, None, Some(p)) => read_motifs(ctx, p)?.n,
        (None, None, None) => return Err(Error::Config("blackbox-serve needs --motifs, --truth or --dataset".into())),
    };
    let model = model::build(ctx, &a.model, n, set.as_ref(), dataset.as_ref())?;
    let stdin = std::io::stdin();
    let stdout = std::io::stdout();
    motif_shap::blackbox::serve(&model, n, stdin.lock(), stdout.lock())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PipelineConfig {
    stages: Vec<Vec<String>>,
}

/// Runs every stage in order; returns the first non-zero exit code.
pub fn pipeline(a: &PipelineArgs) -> i32 {
    let config = motif_shap::io::read_to_string(&a.config).and_then(|text| {
        serde_json::from_str::<PipelineConfig>(&text).map_err(Error::from)
    });
    let config = match config {
        Ok(c) => c,
        Err(e) => {
            let (kind, code) = classify(&e);
            report(kind, &e.to_string());
            return code;
        }
    };
    for (i, stage) in config.stages.iter().enumerate() {
        if stage.first().map(String::as_str) == Some("pipeline") {
            report("config", &format!("stage {i} nests a pipeline"));
            return crate::EXIT_USAGE;
        }
        let code = run(stage);
        if code != EXIT_OK {
            report("stage-failed", &format!("stage {i} ({}) exited with {code}", stage.join(" ")));
            return code;
        }
    }
    EXIT_OK
}
