//! Batch experiments: generate, label, classify through simulated message
//! rounds, score, aggregate.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::gather::{run_gather_phase, run_gather_phase_among, MessageLedger, PhaseLedger};
use super::metrics::{evaluate, Metrics};
use crate::ecbr::{circle_length_view, refine_node, verdict_for_length, EcBrParams};
use crate::error::{Error, Result};
use crate::graph::{ConnectivityGraph, LocalView};
use crate::mds::EmbeddingVariant;
use crate::mdsbr::{classify_view, refine_view, MdsBrParams};
use crate::network::{generate, NetworkConfig};
use crate::truth::{ground_truth, GroundTruth, Label};
use crate::{Classification, Verdict};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlgorithmSpec {
    MdsBr { params: MdsBrParams, refine: bool },
    EcBr { params: EcBrParams, refine: bool },
}

impl AlgorithmSpec {
    pub fn mdsbr(params: MdsBrParams) -> Self {
        AlgorithmSpec::MdsBr { refine: params.r_min > 0, params }
    }

    pub fn ecbr(params: EcBrParams, refine: bool) -> Self {
        AlgorithmSpec::EcBr { params, refine }
    }

    /// Parses `MDS-BR`, `MDS-BR-Ref`, `EC-BR` or `EC-BR-Ref` (any case).
    pub fn from_label(label: &str, mdsbr: MdsBrParams, ecbr: EcBrParams) -> Result<Self> {
        match label.to_ascii_uppercase().as_str() {
            "MDS-BR" => Ok(AlgorithmSpec::MdsBr { params: mdsbr, refine: false }),
            "MDS-BR-REF" => Ok(AlgorithmSpec::MdsBr { params: mdsbr, refine: true }),
            "EC-BR" => Ok(AlgorithmSpec::EcBr { params: ecbr, refine: false }),
            "EC-BR-REF" => Ok(AlgorithmSpec::EcBr { params: ecbr, refine: true }),
            _ => Err(Error::InvalidConfig(format!(
                "unknown algorithm `{label}` (expected MDS-BR, MDS-BR-Ref, EC-BR or EC-BR-Ref)"
            ))),
        }
    }

    pub fn refined(&self) -> bool {
        match *self {
            AlgorithmSpec::MdsBr { params, refine } => refine && params.r_min > 0,
            AlgorithmSpec::EcBr { refine, .. } => refine,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            AlgorithmSpec::MdsBr { params, .. } => params.validate(),
            AlgorithmSpec::EcBr { params, .. } => params.validate(),
        }
    }

    fn gather_hops(&self) -> u32 {
        match self {
            AlgorithmSpec::MdsBr { params, .. } => params.variant.hops(),
            AlgorithmSpec::EcBr { .. } => 2,
        }
    }
}

impl fmt::Display for AlgorithmSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let suffix = if self.refined() { "-Ref" } else { "" };
        match self {
            AlgorithmSpec::MdsBr { params, .. } => {
                write!(f, "MDS-BR{suffix}")?;
                if params.variant != EmbeddingVariant::Mds2 {
                    write!(f, "[{}]", params.variant.name())?;
                }
                Ok(())
            }
            AlgorithmSpec::EcBr { params, .. } => {
                write!(f, "EC-BR{suffix}")?;
                if params.use_mis_reduction {
                    f.write_str("[MIS]")?;
                }
                Ok(())
            }
        }
    }
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRow {
    pub seed: u64,
    pub algorithm: String,
    pub refined: bool,
    #[serde(flatten)]
    pub metrics: Metrics,
    pub nodes: usize,
    pub edges: usize,
    pub d_avg_measured: f64,
}

/// Everything one algorithm produced on one layout.
#[derive(Debug, Clone)]
pub struct AlgorithmRun {
    pub classification: Classification,
    /// Per-node circle lengths (EC-BR only).
    pub circle_lengths: Option<Vec<u32>>,
    /// Marked-neighborhood sizes seen during refinement (MDS-BR only).
    pub neighborhood_sizes: Vec<usize>,
    pub ledger: MessageLedger,
}

/// Runs `spec` on `g` through simulated gather rounds. `views` holds
/// pre-gathered views keyed by hop count; missing ones are gathered here.
pub fn run_algorithm(
    g: &ConnectivityGraph,
    spec: &AlgorithmSpec,
    views: &mut BTreeMap<u32, (Vec<LocalView>, PhaseLedger)>,
) -> Result<AlgorithmRun> {
    spec.validate()?;
    let hops = spec.gather_hops();
    let (views, gather) = views.entry(hops).or_insert_with(|| run_gather_phase(g, hops));
    gather.check_bound(hops)?;
    let mut ledger = MessageLedger::default();
    ledger.push(gather.clone());
    match *spec {
        AlgorithmSpec::MdsBr { params, refine } => {
            let base: Classification =
                views.par_iter().map(|v| classify_view(v, &params)).collect::<Result<_>>()?;
            if !(refine && params.r_min > 0) {
                return Ok(AlgorithmRun { classification: base, circle_lengths: None, neighborhood_sizes: Vec::new(), ledger });
            }
            let marked: Vec<bool> = base.iter().map(|&v| v == Verdict::Boundary).collect();
            let sub = g.restricted(&marked);
            let (rviews, rledger) = run_gather_phase_among(&sub, params.r_min, Some(&marked), "mdsbr-refine");
            rledger.check_bound(params.r_min)?;
            ledger.push(rledger);
            let decisions: Vec<_> =
                rviews.par_iter().map(|v| v.as_ref().map(|v| refine_view(v, params.r_min))).collect();
            Ok(AlgorithmRun {
                classification: decisions
                    .iter()
                    .map(|d| match d {
                        Some(d) if d.survives => Verdict::Boundary,
                        _ => Verdict::Interior,
                    })
                    .collect(),
                circle_lengths: None,
                neighborhood_sizes: decisions.iter().flatten().map(|d| d.neighborhood_size).collect(),
                ledger,
            })
        }
        AlgorithmSpec::EcBr { params, refine } => {
            let lengths: Vec<u32> = views.par_iter().map(|v| circle_length_view(v, &params)).collect();
            let base: Classification = lengths.iter().map(|&l| verdict_for_length(l, &params)).collect();
            let classification = if refine {
                // one round: every node broadcasts its verdict
                let mut round = PhaseLedger::new("ecbr-refine", g.n());
                for u in 0..g.n() {
                    round.record(u, 1);
                }
                round.check_bound(1)?;
                ledger.push(round);
                (0..g.n())
                    .map(|u| {
                        let heard: Vec<Verdict> = g.neighbors(u).iter().map(|&v| base[v]).collect();
                        refine_node(base[u], &heard, params.gamma)
                    })
                    .collect()
            } else {
                base
            };
            Ok(AlgorithmRun { classification, circle_lengths: Some(lengths), neighborhood_sizes: Vec::new(), ledger })
        }
    }
}

/// One generated layout with its ground truth.
pub struct Trial {
    pub seed: u64,
    pub graph: ConnectivityGraph,
    pub truth: GroundTruth,
}

impl Trial {
    pub fn generate(config: &NetworkConfig, seed: u64, h_min: f64) -> Result<Self> {
        let graph = generate(&config.with_seed(seed))?;
        let truth = ground_truth(&graph, h_min).map_err(|e| Error::Trial { seed, source: Box::new(e) })?;
        Ok(Self { seed, graph, truth })
    }
}

struct TrialOutcome {
    row: TrialRow,
    run: AlgorithmRun,
    d_max: usize,
}

fn run_trial(config: &NetworkConfig, specs: &[AlgorithmSpec], seed: u64, h_min: f64) -> Result<Vec<TrialOutcome>> {
    let trial = Trial::generate(config, seed, h_min)?;
    let g = &trial.graph;
    let mut views = BTreeMap::new();
    specs
        .iter()
        .map(|spec| {
            let run = run_algorithm(g, spec, &mut views).map_err(|e| Error::Trial { seed, source: Box::new(e) })?;
            let metrics = evaluate(&trial.truth, &run.classification)?;
            Ok(TrialOutcome {
                row: TrialRow {
                    seed,
                    algorithm: spec.to_string(),
                    refined: spec.refined(),
                    metrics,
                    nodes: g.n(),
                    edges: g.m(),
                    d_avg_measured: g.avg_degree(),
                },
                run,
                d_max: g.max_degree(),
            })
        })
        .collect()
}

/// Aggregate over all trials of one algorithm.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub algorithm: String,
    pub refined: bool,
    pub trials: usize,
    /// Mean over trials where the class was nonempty.
    pub mandatory_fn_pct: Option<f64>,
    pub optional_interior_pct: Option<f64>,
    pub interior_fp_pct: Option<f64>,
    pub rows: Vec<TrialRow>,
    /// Circle length -> node count, summed over trials (EC-BR only).
    pub circle_length_histogram: Option<BTreeMap<u32, u64>>,
    /// Mean over all refined nodes of all trials (MDS-BR refinement only).
    pub avg_marked_neighborhood_size: Option<f64>,
    pub d_max: usize,
    /// Largest per-node message count per phase.
    pub max_messages: BTreeMap<String, u32>,
    /// Largest payload (node ids) per phase.
    pub max_payload: BTreeMap<String, usize>,
}

fn mean(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let (sum, k) = values.flatten().fold((0.0, 0usize), |(s, k), x| (s + x, k + 1));
    (k > 0).then(|| sum / k as f64)
}

/// Runs every spec on the same `trials` layouts, seeds `base_seed..`.
/// Trials run in parallel; results do not depend on the worker count.
pub fn run_experiments(
    config: &NetworkConfig,
    specs: &[AlgorithmSpec],
    trials: usize,
    base_seed: u64,
    h_min: f64,
) -> Result<Vec<MetricsReport>> {
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1".into()));
    }
    config.validate()?;
    for spec in specs {
        spec.validate()?;
    }
    let outcomes: Vec<Vec<TrialOutcome>> = (0..trials as u64)
        .into_par_iter()
        .map(|i| run_trial(config, specs, base_seed + i, h_min))
        .collect::<Result<_>>()?;
    Ok(specs
        .iter()
        .enumerate()
        .map(|(k, spec)| {
            let mine: Vec<&TrialOutcome> = outcomes.iter().map(|t| &t[k]).collect();
            let histogram = matches!(spec, AlgorithmSpec::EcBr { .. }).then(|| {
                let mut h = BTreeMap::new();
                for t in &mine {
                    for &l in t.run.circle_lengths.as_deref().unwrap_or_default() {
                        *h.entry(l).or_insert(0u64) += 1;
                    }
                }
                h
            });
            let sizes: Vec<usize> = mine.iter().flat_map(|t| t.run.neighborhood_sizes.iter().copied()).collect();
            let avg_size = (matches!(spec, AlgorithmSpec::MdsBr { .. }) && spec.refined() && !sizes.is_empty())
                .then(|| sizes.iter().sum::<usize>() as f64 / sizes.len() as f64);
            let mut max_messages = BTreeMap::new();
            let mut max_payload = BTreeMap::new();
            for t in &mine {
                for p in &t.run.ledger.phases {
                    let m = max_messages.entry(p.phase.clone()).or_insert(0);
                    *m = (*m).max(p.max_messages());
                    let s = max_payload.entry(p.phase.clone()).or_insert(0);
                    *s = (*s).max(p.max_payload());
                }
            }
            MetricsReport {
                algorithm: spec.to_string(),
                refined: spec.refined(),
                trials,
                mandatory_fn_pct: mean(mine.iter().map(|t| t.row.metrics.mandatory_fn_pct)),
                optional_interior_pct: mean(mine.iter().map(|t| t.row.metrics.optional_interior_pct)),
                interior_fp_pct: mean(mine.iter().map(|t| t.row.metrics.interior_fp_pct)),
                rows: mine.iter().map(|t| t.row.clone()).collect(),
                circle_length_histogram: histogram,
                avg_marked_neighborhood_size: avg_size,
                d_max: mine.iter().map(|t| t.d_max).max().unwrap_or(0),
                max_messages,
                max_payload,
            }
        })
        .collect())
}

pub fn run_experiment(
    config: &NetworkConfig,
    spec: &AlgorithmSpec,
    trials: usize,
    base_seed: u64,
    h_min: f64,
) -> Result<MetricsReport> {
    Ok(run_experiments(config, std::slice::from_ref(spec), trials, base_seed, h_min)?.remove(0))
}

/// Writes one row per (trial, algorithm), grouped by algorithm.
pub fn write_csv<W: Write>(reports: &[MetricsReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "seed",
        "algorithm",
        "refined",
        "mandatory_fn_pct",
        "optional_interior_pct",
        "interior_fp_pct",
        "nodes",
        "edges",
        "d_avg_measured",
    ])?;
    let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
    for r in reports {
        for row in &r.rows {
            w.write_record([
                row.seed.to_string(),
                row.algorithm.clone(),
                row.refined.to_string(),
                opt(row.metrics.mandatory_fn_pct),
                opt(row.metrics.optional_interior_pct),
                opt(row.metrics.interior_fp_pct),
                row.nodes.to_string(),
                row.edges.to_string(),
                row.d_avg_measured.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Per-node circle lengths bucketed by value.
pub fn circle_length_histogram(g: &ConnectivityGraph, params: &EcBrParams) -> BTreeMap<u32, usize> {
    let (views, _) = run_gather_phase(g, 2);
    let mut h = BTreeMap::new();
    for l in views.par_iter().map(|v| circle_length_view(v, params)).collect::<Vec<_>>() {
        *h.entry(l).or_insert(0) += 1;
    }
    h
}

/// Result of the histogram-valley calibration of the MIS threshold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Calibration {
    pub threshold: u32,
    /// Fraction of Interior nodes below plus fraction of Mandatory nodes at
    /// or above the threshold.
    pub error: f64,
    pub interior_histogram: BTreeMap<u32, u64>,
    pub mandatory_histogram: BTreeMap<u32, u64>,
}

/// Picks the representative-graph threshold separating ground-truth
/// Interior from Mandatory nodes best over `layouts` generated layouts.
pub fn calibrate_mis_threshold(
    config: &NetworkConfig,
    layouts: usize,
    base_seed: u64,
    h_min: f64,
) -> Result<Calibration> {
    let params = EcBrParams { use_mis_reduction: true, ..EcBrParams::default() };
    let per_layout: Vec<Vec<(Label, u32)>> = (0..layouts as u64)
        .into_par_iter()
        .map(|i| {
            let trial = Trial::generate(config, base_seed + i, h_min)?;
            let (views, _) = run_gather_phase(&trial.graph, 2);
            Ok(views
                .iter()
                .zip(&trial.truth.labels)
                .map(|(v, &label)| (label, circle_length_view(v, &params)))
                .collect())
        })
        .collect::<Result<_>>()?;
    let mut interior = BTreeMap::new();
    let mut mandatory = BTreeMap::new();
    for (label, l) in per_layout.into_iter().flatten() {
        match label {
            Label::Interior => *interior.entry(l).or_insert(0u64) += 1,
            Label::Mandatory => *mandatory.entry(l).or_insert(0u64) += 1,
            Label::Optional => {}
        }
    }
    let ni: u64 = interior.values().sum();
    let nm: u64 = mandatory.values().sum();
    let top = interior.keys().chain(mandatory.keys()).copied().max().unwrap_or(0);
    let mut best = (f64::INFINITY, 3);
    for t in 3..=top.max(3) + 1 {
        let below = interior.range(..t).map(|(_, c)| c).sum::<u64>() as f64 / ni.max(1) as f64;
        let above = mandatory.range(t..).map(|(_, c)| c).sum::<u64>() as f64 / nm.max(1) as f64;
        if below + above < best.0 {
            best = (below + above, t);
        }
    }
    Ok(Calibration { threshold: best.1, error: best.0, interior_histogram: interior, mandatory_histogram: mandatory })
}
