//! Experiment orchestration: flat key-value configuration, the staged
//! end-to-end pipeline, per-seed JSON reports, and the aggregate CSV table.

use crate::bitset::BitGraph;
use crate::cleanup::{build_orderings, edge_delete, vertex_delete, DeletionReport};
use crate::cycles;
use crate::indep::{
    self, alpha_exact, baseline_construction, check_claim, closed_pairs, exposure_split,
    independent_set_search, ClaimReport, IndependenceSummary, ALPHA_EXACT_CAP,
};
use crate::linalg::splitmix64;
use crate::model::{blow_up, sample_base_graph, ColoredGraph, PartitionPair};
use crate::params::{derive_params, Mode, Overrides, Params, ParamsError};
use crate::pseudo::{verify_event_a, TrialBudgets, VerifierReport};
use crate::spectral::{
    closed_form_walk_bound, count_walks_graph, count_walks_operator, decompose,
    dominating_operator, intermediate_walk_bound, SpectralSummary, EIGEN_ITERATION_CAP,
    EIGEN_REL_TOL,
};
use rand::rngs::StdRng;
use rand::SeedableRng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Default Monte-Carlo trial count (verifier budgets and search restarts).
pub const DEFAULT_TRIALS: u64 = 400;

/// One experiment: fixed shape parameters, a list of master seeds, budgets.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub ell: u32,
    pub n: u64,
    pub mode: Mode,
    pub seeds: Vec<u64>,
    pub overrides: Overrides,
    /// Verifier trial budget and independence-search restart count.
    pub trials: u64,
    /// Cycle-enumeration visit cap.
    pub cap: u64,
    /// Output directory for JSON reports and the CSV table.
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(ell: u32, n: u64) -> ExperimentConfig {
        ExperimentConfig {
            ell,
            n,
            mode: Mode::Operational,
            seeds: vec![1],
            overrides: Overrides::default(),
            trials: DEFAULT_TRIALS,
            cap: cycles::DEFAULT_VISIT_CAP,
            out: None,
        }
    }

    /// Check the shape parameters against the derivation preconditions.
    pub fn validate(&self) -> Result<Params, ParamsError> {
        derive_params(self.ell, self.n, self.mode, &self.overrides)
    }
}

/// Parse the flat `key = value` configuration format. Unknown keys are
/// errors; `ell` and `n` are required; `seed` takes a comma-separated list.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, HarnessError> {
    let mut kv: BTreeMap<&str, &str> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| HarnessError::Config(format!("line {}: expected key = value", i + 1)))?;
        kv.insert(key.trim(), value.trim());
    }
    fn want<T: FromStr>(kv: &BTreeMap<&str, &str>, key: &str) -> Result<Option<T>, HarnessError> {
        kv.get(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| HarnessError::Config(format!("invalid {key}: {v:?}")))
            })
            .transpose()
    }
    let known = [
        "ell", "n", "mode", "seed", "p", "r", "k", "delta", "trials", "cap", "out",
    ];
    if let Some(bad) = kv.keys().find(|k| !known.contains(k)) {
        return Err(HarnessError::Config(format!("unknown key {bad:?}")));
    }
    let ell = want::<u32>(&kv, "ell")?.ok_or_else(|| HarnessError::Config("missing ell".into()))?;
    let n = want::<u64>(&kv, "n")?.ok_or_else(|| HarnessError::Config("missing n".into()))?;
    let mut config = ExperimentConfig::new(ell, n);
    if let Some(mode) = kv.get("mode") {
        config.mode = Mode::from_str(mode).map_err(HarnessError::Config)?;
    }
    if let Some(seeds) = kv.get("seed") {
        config.seeds = seeds
            .split(',')
            .map(|s| {
                s.trim()
                    .parse()
                    .map_err(|_| HarnessError::Config(format!("invalid seed {s:?}")))
            })
            .collect::<Result<Vec<u64>, _>>()?;
    }
    config.overrides = Overrides {
        p: want(&kv, "p")?,
        r: want(&kv, "r")?,
        k: want(&kv, "k")?,
        delta: want(&kv, "delta")?,
    };
    if let Some(trials) = want(&kv, "trials")? {
        config.trials = trials;
    }
    if let Some(cap) = want(&kv, "cap")? {
        config.cap = cap;
    }
    config.out = kv.get("out").map(PathBuf::from);
    Ok(config)
}

/// Derive the seed for a named stage from the master seed; every random
/// stage draws from its own seed so stages reproduce individually.
pub fn stage_seed(master: u64, stage: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in stage.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    splitmix64(master ^ h)
}

/// Where a run failed, with the stage name.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageError {
    pub stage: String,
    pub message: String,
}

/// Exact-versus-bound walk comparison for the report's J set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct WalkComparison {
    pub j_size: u64,
    pub length: u32,
    pub exact_union: u64,
    pub exact_operator: u64,
    pub intermediate_bound: f64,
    pub closed_form_bound: f64,
    pub union_le_operator: bool,
    pub operator_le_intermediate: bool,
    pub intermediate_le_closed_form: bool,
}

/// Deletion-method baseline results.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BaselineSummary {
    pub p: f64,
    pub cycles_found: u64,
    pub edges_removed: u64,
    pub best_indep: u64,
}

/// Everything one pipeline run produces. Fields are null until their stage
/// runs; `error` names the stage that aborted the run, if any. Timings are
/// wall-clock seconds per stage and are excluded from golden comparisons.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunReport {
    pub seed: u64,
    pub params: Option<Params>,
    pub deletion: Option<DeletionReport>,
    pub vertices_surviving: Option<u64>,
    pub cycles_in_final_graph: Option<u64>,
    pub event_a: Option<VerifierReport>,
    pub spectral: Option<SpectralSummary>,
    pub walks: Option<WalkComparison>,
    pub independence: Option<IndependenceSummary>,
    pub claim: Option<ClaimReport>,
    pub baseline: Option<BaselineSummary>,
    pub error: Option<StageError>,
    pub timings: BTreeMap<String, f64>,
}

impl RunReport {
    fn empty(seed: u64) -> RunReport {
        RunReport {
            seed,
            params: None,
            deletion: None,
            vertices_surviving: None,
            cycles_in_final_graph: None,
            event_a: None,
            spectral: None,
            walks: None,
            independence: None,
            claim: None,
            baseline: None,
            error: None,
            timings: BTreeMap::new(),
        }
    }
}

fn timed<T>(timings: &mut BTreeMap<String, f64>, stage: &str, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    timings.insert(stage.to_string(), start.elapsed().as_secs_f64());
    out
}

fn fail(report: &mut RunReport, stage: &str, message: impl ToString) {
    report.error = Some(StageError {
        stage: stage.to_string(),
        message: message.to_string(),
    });
}

/// Deterministic walk/claim vertex set: live vertices, one per red block in
/// increasing vertex order, ⌈δk⌉ of them (or as many as exist).
pub fn representative_set(g: &ColoredGraph, parts: &PartitionPair, params: &Params) -> Vec<u32> {
    let want = ((params.delta * params.k as f64).ceil() as usize).max(2);
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for v in 0..g.n() as u32 {
        if out.len() >= want {
            break;
        }
        if g.is_alive(v) && seen.insert(parts.red.block_of(v)) {
            out.push(v);
        }
    }
    out
}

/// Induced subgraph on `keep`, re-indexed to `0..keep.len()` so isolated
/// dead vertices do not inflate independence numbers.
pub fn compact_induced(g: &BitGraph, keep: &[u32]) -> BitGraph {
    let mut index = vec![usize::MAX; g.n()];
    for (i, &v) in keep.iter().enumerate() {
        index[v as usize] = i;
    }
    let mut out = BitGraph::new(keep.len());
    for (i, &v) in keep.iter().enumerate() {
        for w in g.neighbors(v as usize) {
            let j = index[w];
            if j != usize::MAX && j > i {
                out.add_edge(i, j);
            }
        }
    }
    out
}

/// Sample one construction instance from the master seed: partition pair,
/// both base graphs, and the superimposed blow-up, in a fixed draw order.
pub fn sample_instance(
    params: &Params,
    master_seed: u64,
) -> (PartitionPair, BitGraph, BitGraph, ColoredGraph) {
    let n = params.n as usize;
    let mut rng = StdRng::seed_from_u64(stage_seed(master_seed, "sample"));
    let parts = PartitionPair::sample(n, params.r, &mut rng).expect("derived r divides n");
    let m = n / params.r as usize;
    let red_base = sample_base_graph(m, params.p, &mut rng);
    let blue_base = sample_base_graph(m, params.p, &mut rng);
    let g = ColoredGraph::superimpose(
        blow_up(&red_base, &parts.red),
        blow_up(&blue_base, &parts.blue),
    );
    (parts, red_base, blue_base, g)
}

/// Run the full pipeline for one master seed: derive → sample → blow up →
/// superimpose → vertex deletion → edge deletion → verifier → spectral →
/// walk comparisons → independence probes → baseline. Deterministic in
/// (config, seed); stage failures are captured and abort the rest cleanly.
pub fn run_pipeline(config: &ExperimentConfig, seed: u64) -> RunReport {
    let mut report = RunReport::empty(seed);
    let mut timings = BTreeMap::new();

    // Parameter derivation.
    let params = match timed(&mut timings, "params", || {
        derive_params(config.ell, config.n, config.mode, &config.overrides)
    }) {
        Ok(p) => p,
        Err(e) => {
            fail(&mut report, "params", e);
            report.timings = timings;
            return report;
        }
    };
    report.params = Some(params.clone());
    let (ell, n) = (params.ell, params.n as usize);

    // Sampling and construction.
    let (parts, red_base, blue_base, g_pre) =
        timed(&mut timings, "sample", || sample_instance(&params, seed));
    let mut g = g_pre.clone();

    // Vertex deletion over bad broken cycles.
    let mut deletion = DeletionReport::default();
    timed(&mut timings, "vertexDelete", || {
        vertex_delete(&mut g, &parts, ell, &mut deletion)
    });

    // Apex-ordered edge deletion.
    let (red_ord, blue_ord) = build_orderings(&parts);
    if let Err(e) = timed(&mut timings, "edgeDelete", || {
        edge_delete(&mut g, &red_ord, &blue_ord, ell, config.cap, &mut deletion)
    }) {
        report.deletion = Some(deletion);
        fail(&mut report, "edgeDelete", e);
        report.timings = timings;
        return report;
    }
    report.deletion = Some(deletion);
    report.vertices_surviving = Some(g.alive_count() as u64);

    match timed(&mut timings, "finalCycles", || {
        cycles::count_cycles(&g.union_alive(), ell as usize, config.cap)
    }) {
        Ok(c) => report.cycles_in_final_graph = Some(c),
        Err(e) => {
            fail(&mut report, "finalCycles", e);
            report.timings = timings;
            return report;
        }
    }

    // Pseudo-randomness verifier.
    let budgets = TrialBudgets {
        projection_trials: config.trials,
        expansion_trials: config.trials,
    };
    match timed(&mut timings, "verify", || {
        verify_event_a(
            &red_base,
            &blue_base,
            &g_pre,
            &parts,
            &params,
            &budgets,
            stage_seed(seed, "verify"),
        )
    }) {
        Ok(v) => report.event_a = Some(v),
        Err(e) => {
            fail(&mut report, "verify", e);
            report.timings = timings;
            return report;
        }
    }

    // Spectral decomposition of the dominating operator.
    let op = match dominating_operator(&red_base, &blue_base, &parts) {
        Ok(op) => op,
        Err(e) => {
            fail(&mut report, "spectral", e);
            report.timings = timings;
            return report;
        }
    };
    let decomp = match timed(&mut timings, "spectral", || {
        decompose(&op, EIGEN_REL_TOL, EIGEN_ITERATION_CAP)
    }) {
        Ok(d) => d,
        Err(e) => {
            fail(&mut report, "spectral", e);
            report.timings = timings;
            return report;
        }
    };
    report.spectral = Some(decomp.summary());

    // Walk counts against the bound chain.
    let j = representative_set(&g, &parts, &params);
    if j.len() < 2 {
        fail(&mut report, "walks", "fewer than 2 live vertices for the walk set");
        report.timings = timings;
        return report;
    }
    let walks = timed(&mut timings, "walks", || {
        let length = ell - 1;
        let exact_union = count_walks_graph(&g_pre.union_all(), &j, length);
        let exact_operator = count_walks_operator(&op, &j, length);
        let intermediate = intermediate_walk_bound(&decomp, &j, ell);
        let closed = closed_form_walk_bound(&params, j.len() as u64);
        (exact_union, exact_operator, intermediate, closed, length)
    });
    let (exact_union, exact_operator, intermediate, closed, length) = walks;
    let (Ok(exact_union), Ok(exact_operator)) =
        (u64::try_from(exact_union), u64::try_from(exact_operator))
    else {
        fail(&mut report, "walks", "walk count exceeds u64");
        report.timings = timings;
        return report;
    };
    report.walks = Some(WalkComparison {
        j_size: j.len() as u64,
        length,
        exact_union,
        exact_operator,
        intermediate_bound: intermediate,
        closed_form_bound: closed,
        union_le_operator: exact_union <= exact_operator,
        operator_le_intermediate: (exact_operator as f64) <= intermediate,
        intermediate_le_closed_form: intermediate <= closed,
    });

    // Independence probes.
    let alive: Vec<u32> = (0..n as u32).filter(|&v| g.is_alive(v)).collect();
    let independence = timed(&mut timings, "independence", || {
        let closed_set = closed_pairs(&g_pre, &j, ell);
        let split = exposure_split(&g_pre, &parts, &j, ell);
        let claim = check_claim(&g_pre, &parts, &j, ell, g.red());
        let union_final = g.union_alive();
        let target = (params.k as usize).min(alive.len());
        let best = independent_set_search(
            &union_final,
            &alive,
            target,
            config.trials,
            stage_seed(seed, "search"),
        );
        let alpha = if alive.len() <= ALPHA_EXACT_CAP {
            alpha_exact(&compact_induced(&union_final, &alive))
                .ok()
                .map(|a| a as u64)
        } else {
            None
        };
        let bound = indep::ind_set_probability_bound(&params);
        (
            IndependenceSummary {
                closed_pairs: closed_set.len() as u64,
                open_pairs: split.open.len() as u64,
                best_found_set: best.len() as u64,
                alpha_exact: alpha,
                bound_log: bound.union_log,
            },
            claim,
        )
    });
    report.independence = Some(independence.0);
    report.claim = Some(independence.1);

    // Plain deletion-method baseline at the same n, ℓ.
    match timed(&mut timings, "baseline", || {
        baseline_construction(n, ell, stage_seed(seed, "baseline"), config.cap)
    }) {
        Ok(out) => {
            let all: Vec<u32> = (0..n as u32).collect();
            let target = (params.k as usize).min(n);
            let best = independent_set_search(
                &out.graph,
                &all,
                target,
                config.trials,
                stage_seed(seed, "baselineSearch"),
            );
            report.baseline = Some(BaselineSummary {
                p: out.p,
                cycles_found: out.cycles_found,
                edges_removed: out.edges_removed,
                best_indep: best.len() as u64,
            });
        }
        Err(e) => {
            fail(&mut report, "baseline", e);
            report.timings = timings;
            return report;
        }
    }

    report.timings = timings;
    report
}

/// CSV column order for the aggregate table.
pub const CSV_COLUMNS: [&str; 10] = [
    "seed",
    "verticesSurviving",
    "edgesDeleted",
    "eventAPassed",
    "mu",
    "MNorm",
    "walkExact",
    "walkBound",
    "bestIndepFound",
    "baselineBestIndep",
];

fn csv_row(report: &RunReport) -> Vec<String> {
    fn opt<T: ToString>(v: Option<T>) -> String {
        v.map(|x| x.to_string()).unwrap_or_default()
    }
    vec![
        report.seed.to_string(),
        opt(report.vertices_surviving),
        opt(report.deletion.as_ref().map(|d| d.edges_deleted)),
        opt(report.event_a.as_ref().map(|v| v.passed)),
        opt(report.spectral.as_ref().map(|s| s.mu)),
        opt(report.spectral.as_ref().map(|s| s.m_norm)),
        opt(report.walks.as_ref().map(|w| w.exact_operator)),
        opt(report.walks.as_ref().map(|w| w.closed_form_bound)),
        opt(report.independence.as_ref().map(|i| i.best_found_set)),
        opt(report.baseline.as_ref().map(|b| b.best_indep)),
    ]
}

/// Render the aggregate table (RFC-4180, CRLF line endings).
pub fn reports_to_csv(reports: &[RunReport]) -> Result<String, HarnessError> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(Vec::new());
    writer.write_record(CSV_COLUMNS)?;
    for report in reports {
        writer.write_record(csv_row(report))?;
    }
    let bytes = writer.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
}

/// Batch outcome: all per-seed reports plus the rendered CSV.
#[derive(Clone, Debug)]
pub struct ExperimentOutcome {
    pub reports: Vec<RunReport>,
    pub csv: String,
}

impl ExperimentOutcome {
    pub fn any_error(&self) -> bool {
        self.reports.iter().any(|r| r.error.is_some())
    }
}

fn worker_pool() -> Result<rayon::ThreadPool, HarnessError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(t) = std::env::var("RF_THREADS") {
        let threads: usize = t
            .parse()
            .map_err(|_| HarnessError::Config(format!("invalid RF_THREADS: {t:?}")))?;
        builder = builder.num_threads(threads.max(1));
    }
    builder
        .build()
        .map_err(|e| HarnessError::Config(e.to_string()))
}

/// Run every seed (in parallel), optionally writing `report-<seed>.json`
/// per seed and `summary.csv` under the configured output directory.
/// Per-seed failures are recorded in their reports; the batch continues.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome, HarnessError> {
    if config.seeds.is_empty() {
        return Err(HarnessError::Config("need at least one seed".into()));
    }
    config.validate()?;
    let pool = worker_pool()?;
    let reports: Vec<RunReport> = pool.install(|| {
        config
            .seeds
            .par_iter()
            .map(|&seed| run_pipeline(config, seed))
            .collect()
    });
    let csv = reports_to_csv(&reports)?;
    if let Some(dir) = &config.out {
        std::fs::create_dir_all(dir)?;
        for report in &reports {
            let path = dir.join(format!("report-{}.json", report.seed));
            std::fs::write(path, serde_json::to_string_pretty(report)? + "\n")?;
        }
        std::fs::write(dir.join("summary.csv"), &csv)?;
    }
    Ok(ExperimentOutcome { reports, csv })
}
