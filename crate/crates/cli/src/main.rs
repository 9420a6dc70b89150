//! `wsnb`: generate sensor networks, run the boundary classifiers, score them
//! in batches and draw the results.

mod config;

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use wsn_boundary::ecbr::{boundary_cycles, verdict_for_length};
use wsn_boundary::io::{read_graph, write_graph};
use wsn_boundary::mds::EmbeddingVariant;
use wsn_boundary::network::generate;
use wsn_boundary::presets::HolePreset;
use wsn_boundary::render::{render_svg, NodeStyle, RenderOptions};
use wsn_boundary::sim::{
    calibrate_mis_threshold, circle_length_histogram, run_algorithm, run_experiments, write_csv, AlgorithmSpec,
};
use wsn_boundary::truth::{ground_truth, Label};
use wsn_boundary::{classification_json, CommModel, ConnectivityGraph, Placement, Verdict};

use config::CliConfig;

#[derive(Parser)]
#[command(name = "wsnb", version, about = "Boundary recognition in simulated wireless sensor networks")]
struct Cli {
    /// Worker threads for batch runs (default: one per core).
    #[arg(long, global = true, env = "WSNB_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

/// Flags that override the `network` section of the config.
#[derive(clap::Args, Default)]
struct NetworkFlags {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "degree")]
    target_avg_degree: Option<f64>,
    #[arg(long)]
    width: Option<f64>,
    #[arg(long)]
    height: Option<f64>,
    #[arg(long, value_parser = parse_preset)]
    hole_preset: Option<HolePreset>,
    /// Use a d-quasi unit disk graph instead of the unit disk graph.
    #[arg(long, value_name = "D")]
    qudg: Option<f64>,
    /// Uniform random placement instead of the perturbed grid.
    #[arg(long)]
    random: bool,
}

fn parse_preset(s: &str) -> Result<HolePreset, String> {
    s.parse().map_err(|e: wsn_boundary::Error| e.to_string())
}

fn parse_variant(s: &str) -> Result<EmbeddingVariant, String> {
    s.parse().map_err(|e: wsn_boundary::Error| e.to_string())
}

#[derive(clap::Args, Default)]
struct AlgorithmFlags {
    #[arg(long)]
    alpha_min: Option<f64>,
    #[arg(long)]
    r_min: Option<u32>,
    /// MDS, MDS3, SSMDS or OPT.
    #[arg(long, value_parser = parse_variant)]
    variant: Option<EmbeddingVariant>,
    #[arg(long)]
    no_micro_hole_filter: bool,
    #[arg(long)]
    circle_threshold: Option<u32>,
    #[arg(long)]
    gamma: Option<f64>,
    /// Search circles on the MIS representative graph.
    #[arg(long)]
    mis: bool,
    #[arg(long)]
    mis_threshold: Option<u32>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Alg {
    Mdsbr,
    Ecbr,
}

#[derive(Clone, Copy, ValueEnum)]
enum Coloring {
    /// Geometric ground truth computed from the node positions.
    Truth,
    /// A verdict file written by `classify`.
    Verdicts,
    Plain,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a network and write it as text (or JSON for `.json`).
    Generate {
        #[command(flatten)]
        net: NetworkFlags,
        #[arg(short, long)]
        output: PathBuf,
        /// Also write the ground-truth labels as JSON.
        #[arg(long)]
        truth: Option<PathBuf>,
    },
    /// Classify every node of a graph file.
    Classify {
        graph: PathBuf,
        #[arg(long, value_enum)]
        alg: Alg,
        #[arg(long)]
        refine: bool,
        /// Include per-node circle lengths (EC-BR only).
        #[arg(long)]
        emit_lengths: bool,
        /// Include the boundary cycles through the marked nodes (EC-BR only).
        #[arg(long)]
        cycles: bool,
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        params: AlgorithmFlags,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the configured algorithms over many layouts and score them.
    Evaluate {
        #[command(flatten)]
        net: NetworkFlags,
        #[command(flatten)]
        params: AlgorithmFlags,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        base_seed: Option<u64>,
        /// Comma-separated labels, e.g. `EC-BR,EC-BR-Ref`.
        #[arg(long, value_delimiter = ',')]
        algorithms: Option<Vec<String>>,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Draw a graph file as SVG.
    Render {
        graph: PathBuf,
        #[arg(long, value_enum, default_value = "truth")]
        color: Coloring,
        #[arg(long)]
        verdicts: Option<PathBuf>,
        #[arg(long)]
        h_min: Option<f64>,
        #[arg(long)]
        no_edges: bool,
        #[arg(long, default_value_t = 20.0)]
        scale: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Per-node EC-BR circle lengths of one or more graph files, as CSV.
    Hist {
        #[arg(required = true)]
        graphs: Vec<PathBuf>,
        #[arg(long)]
        mis: bool,
    },
    /// Pick the MIS circle threshold from generated layouts.
    Calibrate {
        #[command(flatten)]
        net: NetworkFlags,
        #[arg(long, default_value_t = 12)]
        layouts: usize,
        #[arg(long, default_value_t = 1000)]
        base_seed: u64,
    },
}

/// Errors caused by the invocation rather than by the run.
#[derive(Debug)]
struct UsageError(anyhow::Error);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage<T>(r: Result<T>) -> Result<T> {
    r.map_err(|e| UsageError(e).into())
}

fn load_config(path: Option<&Path>) -> Result<CliConfig> {
    usage(match path {
        Some(p) => CliConfig::load(p),
        None => Ok(CliConfig::default()),
    })
}

impl NetworkFlags {
    fn apply(&self, c: &mut CliConfig) {
        let n = &mut c.network;
        if let Some(s) = self.seed {
            n.seed = s;
        }
        if let Some(d) = self.target_avg_degree {
            n.target_avg_degree = d;
        }
        if let Some(w) = self.width {
            n.area_width = w;
        }
        if let Some(h) = self.height {
            n.area_height = h;
        }
        if let Some(p) = self.hole_preset {
            n.hole_preset = p;
        }
        if let Some(d) = self.qudg {
            n.comm_model = CommModel::Qudg { d };
        }
        if self.random {
            n.placement = Placement::Random;
        }
    }
}

impl AlgorithmFlags {
    fn apply(&self, c: &mut CliConfig) {
        let m = &mut c.mdsbr;
        if let Some(a) = self.alpha_min {
            m.alpha_min = a;
        }
        if let Some(r) = self.r_min {
            m.r_min = r;
        }
        if let Some(v) = self.variant {
            m.variant = v;
        }
        if self.no_micro_hole_filter {
            m.micro_hole_filter = false;
        }
        let mut e = c.ecbr_params();
        if let Some(t) = self.circle_threshold {
            e.circle_threshold = t;
        }
        if let Some(g) = self.gamma {
            e.gamma = g;
        }
        if self.mis {
            e.use_mis_reduction = true;
        }
        if let Some(t) = self.mis_threshold {
            e.mis_threshold = t;
        }
        c.ecbr = Some(e);
    }
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn to_json_text(v: &impl Serialize) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn cmd_generate(net: &NetworkFlags, output: &Path, truth: Option<&Path>) -> Result<()> {
    let mut cfg = load_config(net.config.as_deref())?;
    net.apply(&mut cfg);
    usage(cfg.validate())?;
    let g = generate(&cfg.network.to_config())?;
    write_graph(&g, output).with_context(|| format!("writing {}", output.display()))?;
    if let Some(p) = truth {
        let gt = ground_truth(&g, cfg.experiment.h_min)?;
        write_or_print(Some(p), &to_json_text(&gt.to_json())?)?;
    }
    println!("n={} m={} d_avg={:.3}", g.n(), g.m(), g.avg_degree());
    Ok(())
}

fn read_input_graph(path: &Path) -> Result<ConnectivityGraph> {
    read_graph(path).with_context(|| format!("reading graph {}", path.display()))
}

#[allow(clippy::too_many_arguments)]
fn cmd_classify(
    graph: &Path,
    alg: Alg,
    refine: bool,
    emit_lengths: bool,
    cycles: bool,
    config: Option<&Path>,
    params: &AlgorithmFlags,
    output: Option<&Path>,
) -> Result<()> {
    let mut cfg = load_config(config)?;
    params.apply(&mut cfg);
    let spec = match alg {
        Alg::Mdsbr => AlgorithmSpec::MdsBr { params: cfg.mdsbr, refine },
        Alg::Ecbr => AlgorithmSpec::EcBr { params: cfg.ecbr_params(), refine },
    };
    usage(spec.validate().map_err(Into::into))?;
    if (emit_lengths || cycles) && matches!(alg, Alg::Mdsbr) {
        return Err(UsageError(anyhow::anyhow!("--emit-lengths and --cycles apply to --alg ecbr only")).into());
    }
    let g = read_input_graph(graph)?;
    let run = run_algorithm(&g, &spec, &mut BTreeMap::new())?;

    let mut doc = serde_json::Map::new();
    doc.insert("algorithm".into(), spec.to_string().into());
    doc.insert("verdicts".into(), classification_json(&run.classification));
    if emit_lengths {
        let lengths: BTreeMap<usize, u32> =
            run.circle_lengths.clone().unwrap_or_default().into_iter().enumerate().collect();
        doc.insert("circle_lengths".into(), serde_json::to_value(lengths)?);
    }
    if cycles {
        let AlgorithmSpec::EcBr { params, .. } = spec else { unreachable!() };
        // cycles are traced through the unrefined Boundary set
        let lengths = run.circle_lengths.as_deref().expect("EC-BR reports lengths");
        let marked: Vec<bool> = lengths.iter().map(|&l| verdict_for_length(l, &params) == Verdict::Boundary).collect();
        let found = boundary_cycles(&g, &marked, params.circle_threshold);
        doc.insert("cycles".into(), serde_json::to_value(found)?);
    }
    write_or_print(output, &to_json_text(&doc)?)
}

#[allow(clippy::too_many_arguments)]
fn cmd_evaluate(
    net: &NetworkFlags,
    params: &AlgorithmFlags,
    trials: Option<usize>,
    base_seed: Option<u64>,
    algorithms: Option<&[String]>,
    csv: Option<&Path>,
    json: Option<&Path>,
) -> Result<()> {
    let mut cfg = load_config(net.config.as_deref())?;
    net.apply(&mut cfg);
    params.apply(&mut cfg);
    if let Some(t) = trials {
        cfg.experiment.trials = t;
    }
    if let Some(s) = base_seed {
        cfg.experiment.base_seed = s;
    }
    if let Some(a) = algorithms {
        cfg.experiment.algorithms = a.to_vec();
    }
    usage(cfg.validate())?;
    let specs = cfg.algorithms()?;
    let reports = run_experiments(
        &cfg.network.to_config(),
        &specs,
        cfg.experiment.trials,
        cfg.experiment.base_seed,
        cfg.experiment.h_min,
    )?;

    let mut buf = Vec::new();
    write_csv(&reports, &mut buf)?;
    let csv_path = csv.map(Path::to_path_buf).or(cfg.output.csv_path.clone());
    let json_path = json.map(Path::to_path_buf).or(cfg.output.json_path.clone());
    write_or_print(csv_path.as_deref(), std::str::from_utf8(&buf)?)?;
    if let Some(p) = json_path {
        write_or_print(Some(&p), &to_json_text(&reports)?)?;
    }
    let fmt = |x: Option<f64>| x.map_or_else(|| "-".to_string(), |v| format!("{v:.2}"));
    eprintln!("{:<16} {:>10} {:>10} {:>10}", "algorithm", "mand_fn%", "opt_int%", "int_fp%");
    for r in &reports {
        eprintln!(
            "{:<16} {:>10} {:>10} {:>10}",
            r.algorithm,
            fmt(r.mandatory_fn_pct),
            fmt(r.optional_interior_pct),
            fmt(r.interior_fp_pct)
        );
    }
    Ok(())
}

/// Accepts both the `classify` output and a bare `id -> verdict` object.
fn read_verdicts(path: &Path, n: usize) -> Result<Vec<Verdict>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut value: serde_json::Value = serde_json::from_str(&text)?;
    if let Some(v) = value.get_mut("verdicts") {
        value = v.take();
    }
    let map: BTreeMap<usize, Verdict> = serde_json::from_value(value).context("verdict map")?;
    if map.len() != n || map.keys().next_back().is_some_and(|&k| k + 1 != n) {
        bail!("verdict file covers {} nodes, graph has {n}", map.len());
    }
    Ok(map.into_values().collect())
}

fn cmd_render(
    graph: &Path,
    color: Coloring,
    verdicts: Option<&Path>,
    h_min: Option<f64>,
    no_edges: bool,
    scale: f64,
    output: Option<&Path>,
) -> Result<()> {
    if matches!(color, Coloring::Verdicts) != verdicts.is_some() {
        return Err(UsageError(anyhow::anyhow!("--verdicts <file> goes together with --color verdicts")).into());
    }
    let g = read_input_graph(graph)?;
    let opts = RenderOptions { scale, draw_edges: !no_edges, ..RenderOptions::default() };
    let labels: Vec<Label>;
    let verdict_list: Vec<Verdict>;
    let style = match color {
        Coloring::Plain => NodeStyle::Plain,
        Coloring::Truth => {
            labels = ground_truth(&g, h_min.unwrap_or(wsn_boundary::truth::DEFAULT_H_MIN))?.labels;
            NodeStyle::Labels(&labels)
        }
        Coloring::Verdicts => {
            verdict_list = read_verdicts(verdicts.unwrap(), g.n())?;
            NodeStyle::Verdicts(&verdict_list)
        }
    };
    write_or_print(output, &render_svg(&g, style, &opts)?)
}

fn cmd_hist(graphs: &[PathBuf], mis: bool) -> Result<()> {
    let params = wsn_boundary::ecbr::EcBrParams { use_mis_reduction: mis, ..Default::default() };
    let mut total: BTreeMap<u32, usize> = BTreeMap::new();
    for p in graphs {
        let g = read_input_graph(p)?;
        for (l, c) in circle_length_histogram(&g, &params) {
            *total.entry(l).or_default() += c;
        }
    }
    let mut out = String::from("length,count\n");
    for (l, c) in total {
        out.push_str(&format!("{l},{c}\n"));
    }
    write_or_print(None, &out)
}

fn cmd_calibrate(net: &NetworkFlags, layouts: usize, base_seed: u64) -> Result<()> {
    let mut cfg = load_config(net.config.as_deref())?;
    net.apply(&mut cfg);
    usage(cfg.validate())?;
    if layouts == 0 {
        return Err(UsageError(anyhow::anyhow!("--layouts must be at least 1")).into());
    }
    let cal = calibrate_mis_threshold(&cfg.network.to_config(), layouts, base_seed, cfg.experiment.h_min)?;
    write_or_print(None, &to_json_text(&cal)?)
}

fn run(cli: Cli) -> Result<()> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(UsageError(anyhow::anyhow!("thread count must be at least 1")).into());
        }
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global()?;
    }
    match &cli.command {
        Command::Generate { net, output, truth } => cmd_generate(net, output, truth.as_deref()),
        Command::Classify { graph, alg, refine, emit_lengths, cycles, config, params, output } => cmd_classify(
            graph,
            *alg,
            *refine,
            *emit_lengths,
            *cycles,
            config.as_deref(),
            params,
            output.as_deref(),
        ),
        Command::Evaluate { net, params, trials, base_seed, algorithms, csv, json } => cmd_evaluate(
            net,
            params,
            *trials,
            *base_seed,
            algorithms.as_deref(),
            csv.as_deref(),
            json.as_deref(),
        ),
        Command::Render { graph, color, verdicts, h_min, no_edges, scale, output } => {
            cmd_render(graph, *color, verdicts.as_deref(), *h_min, *no_edges, *scale, output.as_deref())
        }
        Command::Hist { graphs, mis } => cmd_hist(graphs, *mis),
        Command::Calibrate { net, layouts, base_seed } => cmd_calibrate(net, *layouts, *base_seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<UsageError>() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
