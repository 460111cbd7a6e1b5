use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use kqi::aggregate::aggregate_kqi;
use kqi::analysis::{
    detect_boom, fit_linear, fit_quadratic, growth_series, pagerank, pareto_split, spearman,
    BoomOptions, BoomScale, BoomTarget, GrowthSeries, PageRankOptions, RankDirection,
};
use kqi::io::{export_graph, load_graph};
use kqi::kqi::{write_kqi_csv, write_kqi_json};
use kqi::sim::{
    bootstrap_percolation, generate_ba, ActivationConfig, ArrivalSchedule, AttachmentKernel,
    BaConfig,
};
use kqi::vein::{export_dot, extract_vein, write_vein_csv, VeinConfig, VeinSelection};
use kqi::{compute_kqi, CitationGraph, DecaySpec, GroupKind, KqiError, SnapshotSpec};
use serde::Serialize;
use serde_json::json;

use super::args::*;
use super::CliError;

type Result<T, E = CliError> = std::result::Result<T, E>;

struct Ctx {
    seed: u64,
    out: Option<PathBuf>,
    format: Option<Format>,
}

impl Ctx {
    fn format(&self, allowed: &[Format], default: Format) -> Result<Format> {
        let f = self.format.unwrap_or(default);
        if allowed.contains(&f) {
            Ok(f)
        } else {
            Err(CliError::Usage(format!("format {f:?} is not available for this command")))
        }
    }

    fn sink(&self) -> Result<Box<dyn Write>> {
        match &self.out {
            Some(p) => Ok(Box::new(create(p)?)),
            None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
        }
    }
}

fn create(p: &Path) -> Result<BufWriter<File>> {
    File::create(p)
        .map(BufWriter::new)
        .map_err(|e| CliError::Domain(KqiError::Io { path: p.to_path_buf(), source: e }))
}

fn finish(mut w: impl Write, path: Option<&Path>) -> Result<()> {
    w.flush().map_err(|e| {
        CliError::Domain(KqiError::Io {
            path: path.map_or_else(|| PathBuf::from("<stdout>"), Path::to_path_buf),
            source: e,
        })
    })
}

fn write_json<T: Serialize>(ctx: &Ctx, value: &T) -> Result<()> {
    let mut w = ctx.sink()?;
    serde_json::to_writer_pretty(&mut w, value).map_err(KqiError::from)?;
    writeln!(w).map_err(|e| KqiError::Serialize(e.to_string()))?;
    finish(w, ctx.out.as_deref())
}

fn input_file<'a>(p: &'a Option<PathBuf>, what: &str) -> Result<&'a Path> {
    let p = p
        .as_deref()
        .ok_or_else(|| CliError::Usage(format!("missing {what}")))?;
    if !p.is_file() {
        return Err(CliError::Usage(format!("{what} {} does not exist", p.display())));
    }
    Ok(p)
}

fn optional_file<'a>(p: &'a Option<PathBuf>, what: &str) -> Result<Option<&'a Path>> {
    match p {
        Some(_) => input_file(p, what).map(Some),
        None => Ok(None),
    }
}

fn load_config(p: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(p)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", p.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", p.display())))
}

pub fn run(cli: Cli) -> Result<()> {
    let file = match &cli.config {
        Some(p) => load_config(p)?,
        None => FileConfig::default(),
    };
    if let Some(t) = cli.common.threads.or(file.threads) {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    let ctx = Ctx {
        seed: cli.common.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
        out: cli.common.out.or(file.out),
        format: cli.common.format.or(file.format),
    };
    match cli.command {
        Command::Kqi(mut a) => {
            a.overlay(file.kqi);
            cmd_kqi(&ctx, a)
        }
        Command::Rank(mut a) => {
            a.overlay(file.rank);
            cmd_rank(&ctx, a)
        }
        Command::Vein(mut a) => {
            a.overlay(file.vein);
            cmd_vein(&ctx, a)
        }
        Command::Growth(mut a) => {
            a.overlay(file.growth);
            cmd_growth(&ctx, a)
        }
        Command::Simulate(mut a) => {
            a.overlay(file.simulate);
            cmd_simulate(&ctx, a)
        }
        Command::Percolate(mut a) => {
            a.overlay(file.percolate);
            cmd_percolate(&ctx, a)
        }
        Command::Compare(mut a) => {
            a.overlay(file.compare);
            cmd_compare(&ctx, a)
        }
    }
}

/// Load, optionally cut at `--year`, augment and optionally decay.
fn prepare(input: &GraphInput) -> Result<CitationGraph> {
    let edges = input_file(&input.edges, "edge file")?;
    let nodes = optional_file(&input.nodes, "node file")?;
    let mut g = load_graph(edges, nodes)?;
    if let Some(y) = input.year {
        g = g.snapshot_at(&SnapshotSpec { cutoff_year: y })?;
    }
    let mut g = g.augment_super_root_with(!input.exclude_root_weight)?;
    if let Some(lambda) = input.decay {
        let reference = input.year.or_else(|| g.max_year()).ok_or_else(|| {
            KqiError::InvalidConfig("decay needs publication years (--nodes)".into())
        })?;
        g = g.apply_decay(&DecaySpec {
            lambda,
            reference_time: reference,
        })?;
    }
    Ok(g)
}

fn cmd_kqi(ctx: &Ctx, a: KqiArgs) -> Result<()> {
    let format = ctx.format(&[Format::Csv, Format::Json], Format::Csv)?;
    let g = prepare(&a.input)?;
    let (vt, kt) = compute_kqi(&g)?;
    let mut w = ctx.sink()?;
    match format {
        Format::Json => write_kqi_json(&g, &vt, &kt, &mut w)?,
        _ => write_kqi_csv(&g, &vt, &kt, &mut w)?,
    }
    finish(w, ctx.out.as_deref())
}

fn cmd_rank(ctx: &Ctx, a: RankArgs) -> Result<()> {
    let format = ctx.format(&[Format::Csv, Format::Json], Format::Csv)?;
    let g = prepare(&a.input)?;
    let (_, kt) = compute_kqi(&g)?;
    let kind = match a.by.unwrap_or(ByKind::Author) {
        ByKind::Author => GroupKind::Author,
        ByKind::Affiliation => GroupKind::Affiliation,
        ByKind::Country => GroupKind::Country,
        ByKind::Discipline => GroupKind::Discipline,
    };
    let agg = aggregate_kqi(&g, &kt, kind, a.first_author)?;
    match format {
        Format::Json => {
            let rows: Vec<_> = agg.ranked().into_iter().take(a.top.unwrap_or(usize::MAX)).collect();
            write_json(ctx, &json!({ "kind": kind.as_str(), "skipped": agg.skipped, "rows": rows }))
        }
        _ => {
            let mut w = ctx.sink()?;
            agg.write_csv(a.top, &mut w)?;
            finish(w, ctx.out.as_deref())
        }
    }
}

fn read_selection(p: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(p).map_err(|e| KqiError::Io { path: p.to_path_buf(), source: e })?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(String::from)
        .collect())
}

fn cmd_vein(ctx: &Ctx, a: VeinArgs) -> Result<()> {
    let format = ctx.format(&[Format::Dot, Format::Csv, Format::Json], Format::Dot)?;
    let selection = match (a.select_top, &a.select_file) {
        (Some(f), None) => VeinSelection::TopFraction(f),
        (None, Some(_)) => VeinSelection::Ids(read_selection(input_file(&a.select_file, "selection file")?)?),
        _ => {
            return Err(CliError::Usage(
                "give exactly one of --select-top or --select-file".into(),
            ))
        }
    };
    let g = prepare(&a.input)?;
    let (_, kt) = compute_kqi(&g)?;
    let mut cfg = VeinConfig::new(selection);
    if let Some(d) = a.max_depth {
        cfg.max_depth = d;
    }
    cfg.stop_at_first_edge = a.stop_at_first_edge;
    let vein = extract_vein(&g, &kt, &cfg)?;
    let labels: Option<BTreeMap<String, String>> = a.input.nodes.as_ref().map(|_| {
        g.paper_indices()
            .filter_map(|v| {
                let n = g.node(v);
                n.year.map(|y| (n.id.clone(), format!("{} ({y})", n.id)))
            })
            .collect()
    });
    let dot = export_dot(&vein, labels.as_ref());
    if let Some(p) = &a.dot {
        let mut w = create(p)?;
        w.write_all(dot.as_bytes()).map_err(|e| KqiError::Io { path: p.clone(), source: e })?;
        finish(w, Some(p))?;
    }
    match format {
        Format::Json => write_json(ctx, &vein),
        Format::Csv => {
            let mut w = ctx.sink()?;
            write_vein_csv(&vein, &mut w)?;
            finish(w, ctx.out.as_deref())
        }
        Format::Dot => {
            let mut w = ctx.sink()?;
            w.write_all(dot.as_bytes()).map_err(|e| KqiError::Serialize(e.to_string()))?;
            finish(w, ctx.out.as_deref())
        }
    }
}

fn series_fits(series: &GrowthSeries) -> serde_json::Value {
    let xs: Vec<f64> = series.years().iter().map(|&y| f64::from(y)).collect();
    let ys = series.total_kqi();
    let simple = series.simplified_kqi();
    json!({
        "linear_fit": fit_linear(&xs, &ys).ok(),
        "quadratic_fit": fit_quadratic(&xs, &ys).ok(),
        "simplified_linear_fit": fit_linear(&xs, &simple).ok(),
        "simplified_quadratic_fit": fit_quadratic(&xs, &simple).ok(),
    })
}

fn cmd_growth(ctx: &Ctx, a: GrowthArgs) -> Result<()> {
    let format = ctx.format(&[Format::Csv, Format::Json], Format::Csv)?;
    let edges = input_file(&a.edges, "edge file")?;
    let nodes = optional_file(&a.nodes, "node file")?;
    let g = load_graph(edges, nodes)?;
    let no_years = || KqiError::InvalidConfig("growth needs publication years (--nodes)".into());
    let from = a.from.or_else(|| g.min_year()).ok_or_else(no_years)?;
    let to = a.to.or_else(|| g.max_year()).ok_or_else(no_years)?;
    if from > to {
        return Err(CliError::Usage(format!("--from {from} is after --to {to}")));
    }
    let series = growth_series(&g, from..=to, a.decay)?;
    match format {
        Format::Json => {
            let opts = BoomOptions {
                rss_critical: a.rss_critical.unwrap_or(9.0),
                scale: if a.no_rescale { BoomScale::None } else { BoomScale::MinMax100 },
                target: match a.boom_target.unwrap_or(BoomTargetArg::Total) {
                    BoomTargetArg::Total => BoomTarget::Total,
                    BoomTargetArg::Increments => BoomTarget::Increments,
                },
            };
            let boom = match detect_boom(&series, &opts) {
                Ok(r) => Some(r),
                Err(KqiError::TooFewPoints { .. }) => None,
                Err(e) => return Err(e.into()),
            };
            let mut doc = series_fits(&series);
            doc["series"] = json!(series.points);
            doc["boom"] = json!(boom);
            write_json(ctx, &doc)
        }
        _ => {
            let mut w = ctx.sink()?;
            series.write_csv(&mut w)?;
            finish(w, ctx.out.as_deref())
        }
    }
}

fn schedule_from(a: &SimulateArgs, m: usize, steps: u32) -> Result<ArrivalSchedule> {
    let total = a.total.unwrap_or(10_000.0);
    // rate schedules without --scale are scaled to reach `total`
    let rate = |exponent: f64, sign: f64| {
        a.scale.unwrap_or_else(|| {
            let mass: f64 = (1..=steps).map(|t| f64::from(t).powf(sign * exponent)).sum();
            total / mass
        })
    };
    Ok(match a.schedule.unwrap_or(ScheduleKind::Standard) {
        ScheduleKind::Standard => match a.k {
            Some(k) => ArrivalSchedule::Standard { k, b: a.b.unwrap_or(0.0) },
            None => {
                let p = (m + 1) as f64;
                let end = (total * p).powf(1.0 / p) / m as f64;
                let b = a.b.unwrap_or(0.0);
                ArrivalSchedule::Standard {
                    k: (end - b) / f64::from(steps),
                    b,
                }
            }
        },
        ScheduleKind::Accelerated => {
            let exponent = a.exponent.unwrap_or((m + 2) as f64);
            ArrivalSchedule::Accelerated { scale: rate(exponent, 1.0), exponent }
        }
        ScheduleKind::Decelerated => {
            let exponent = a.exponent.unwrap_or(1.0);
            ArrivalSchedule::Decelerated { scale: rate(exponent, -1.0), exponent }
        }
        ScheduleKind::Constant => ArrivalSchedule::Decelerated { scale: rate(0.0, 1.0), exponent: 0.0 },
        ScheduleKind::Custom => ArrivalSchedule::Custom {
            arrivals: a
                .arrivals
                .clone()
                .ok_or_else(|| CliError::Usage("custom schedule needs --arrivals".into()))?,
        },
    })
}

fn cmd_simulate(ctx: &Ctx, a: SimulateArgs) -> Result<()> {
    ctx.format(&[Format::Json], Format::Json)?;
    let prefix = ctx
        .out
        .clone()
        .ok_or_else(|| CliError::Usage("simulate needs --out PREFIX".into()))?;
    let m = a.m.unwrap_or(3);
    let steps = match (a.steps, &a.arrivals) {
        (Some(s), _) => s,
        (None, Some(arr)) if a.schedule == Some(ScheduleKind::Custom) => arr.len() as u32,
        (None, _) => 20,
    };
    let cfg = BaConfig {
        m,
        schedule: schedule_from(&a, m, steps)?,
        seed: ctx.seed,
        steps,
        kernel: match a.kernel.unwrap_or(KernelArg::Citations) {
            KernelArg::Citations => AttachmentKernel::Citations,
            KernelArg::TotalDegree => AttachmentKernel::TotalDegree,
        },
    };
    let g = generate_ba(&cfg)?;
    let with_suffix = |s: &str| {
        let mut p = prefix.clone().into_os_string();
        p.push(s);
        PathBuf::from(p)
    };
    let (edge_file, node_file) = (with_suffix(".edges.tsv"), with_suffix(".nodes.tsv"));
    export_graph(&g, &edge_file, &node_file)?;
    let mut doc = json!({
        "nodes": g.paper_count(),
        "edges": g.edge_count(),
        "config": cfg,
        "edge_file": edge_file,
        "node_file": node_file,
    });
    if a.growth {
        let series = growth_series(&g, 1..=steps as i32, None)?;
        let mut growth = series_fits(&series);
        growth["series"] = json!(series.points);
        doc["growth"] = growth;
    }
    let stdout = io::stdout();
    let mut w = stdout.lock();
    serde_json::to_writer_pretty(&mut w, &doc).map_err(KqiError::from)?;
    writeln!(w).map_err(|e| KqiError::Serialize(e.to_string()))?;
    Ok(())
}

fn cmd_percolate(ctx: &Ctx, a: PercolateArgs) -> Result<()> {
    let format = ctx.format(&[Format::Json, Format::Csv], Format::Json)?;
    let g = load_graph(input_file(&a.edges, "edge file")?, None)?;
    let runs = a.runs.unwrap_or(1).max(1);
    let threshold = a.a.unwrap_or(1);
    let seed_fraction = a.seed_fraction.unwrap_or(0.01);
    let mut results = Vec::with_capacity(runs as usize);
    for i in 0..u64::from(runs) {
        let rng_seed = ctx.seed.wrapping_add(i);
        let out = bootstrap_percolation(&g, &ActivationConfig { a: threshold, seed_fraction, rng_seed })?;
        results.push((rng_seed, out));
    }
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(ctx.sink()?);
            w.write_record(["rng_seed", "active_fraction", "rounds", "seeded", "active"])
                .map_err(KqiError::from)?;
            for (s, o) in &results {
                w.serialize((s, o.active_fraction, o.rounds, o.seeded, o.active))
                    .map_err(KqiError::from)?;
            }
            w.flush().map_err(|e| KqiError::Serialize(e.to_string()))?;
            Ok(())
        }
        _ => {
            let mut fractions: Vec<f64> = results.iter().map(|r| r.1.active_fraction).collect();
            fractions.sort_by(f64::total_cmp);
            let mid = fractions.len() / 2;
            let median = if fractions.len() % 2 == 1 {
                fractions[mid]
            } else {
                (fractions[mid - 1] + fractions[mid]) / 2.0
            };
            let runs: Vec<_> = results
                .iter()
                .map(|(s, o)| json!({ "rng_seed": s, "active_fraction": o.active_fraction, "rounds": o.rounds, "seeded": o.seeded, "active": o.active }))
                .collect();
            write_json(
                ctx,
                &json!({ "a": threshold, "seed_fraction": seed_fraction, "median_active_fraction": median, "runs": runs }),
            )
        }
    }
}

fn cmd_compare(ctx: &Ctx, a: CompareArgs) -> Result<()> {
    let format = ctx.format(&[Format::Json, Format::Csv], Format::Json)?;
    let g = prepare(&a.input)?;
    let (_, kt) = compute_kqi(&g)?;
    let opts = PageRankOptions {
        damping: a.damping.unwrap_or(0.85),
        direction: match a.direction.unwrap_or(DirectionArg::CitingToCited) {
            DirectionArg::CitingToCited => RankDirection::CitingToCited,
            DirectionArg::CitedToCiting => RankDirection::CitedToCiting,
        },
        ..Default::default()
    };
    let pr = pagerank(&g, &opts)?;
    let papers: Vec<usize> = g.paper_indices().collect();
    let k: Vec<f64> = papers.iter().map(|&v| kt.kqi(v)).collect();
    let p: Vec<f64> = papers.iter().map(|&v| pr[v]).collect();
    let c: Vec<f64> = papers.iter().map(|&v| g.out_degree(v) as f64).collect();
    let pareto = match pareto_split(&kt) {
        Ok(r) => Some(r),
        Err(KqiError::AllZero) => None,
        Err(e) => return Err(e.into()),
    };
    if let Some(path) = &a.pareto {
        let report = pareto.as_ref().ok_or(KqiError::AllZero)?;
        let mut w = create(path)?;
        report.write_csv(&mut w)?;
        finish(w, Some(path))?;
    }
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(ctx.sink()?);
            w.write_record(["id", "kqi", "pagerank", "citations"]).map_err(KqiError::from)?;
            for (i, &v) in papers.iter().enumerate() {
                w.serialize((g.id(v), k[i], p[i], c[i] as u64)).map_err(KqiError::from)?;
            }
            w.flush().map_err(|e| KqiError::Serialize(e.to_string()))?;
            Ok(())
        }
        _ => {
            let doc = json!({
                "nodes": papers.len(),
                "spearman": spearman(&k, &p)?,
                "spearman_citations": spearman(&k, &c)?,
                "p_star": pareto.as_ref().map(|r| r.p_star),
                "share_at_p_star": pareto.as_ref().map(|r| r.share_at_p_star),
            });
            write_json(ctx, &doc)
        }
    }
}
