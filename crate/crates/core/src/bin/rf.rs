//! Command-line front end: build instances, re-check saved ones, and run
//! batch experiments. Every subcommand prints one JSON document to stdout;
//! the process exits 0 iff no stage errored.

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use cyclefree::cleanup::{build_orderings, edge_delete, vertex_delete, DeletionReport};
use cyclefree::cycles::DEFAULT_VISIT_CAP;
use cyclefree::harness::{
    compact_induced, parse_config, representative_set, run_experiment, sample_instance,
    stage_seed, ExperimentConfig, DEFAULT_TRIALS,
};
use cyclefree::indep::{
    alpha_exact, baseline_construction, ind_set_probability_bound, independent_set_search,
    IndependenceSummary, ALPHA_EXACT_CAP,
};
use cyclefree::io::{load_instance, save_instance, Instance};
use cyclefree::model::quotient_base;
use cyclefree::params::{derive_params, Mode, Overrides, Params};
use cyclefree::pseudo::{verify_event_a, TrialBudgets};
use cyclefree::spectral::{
    closed_form_walk_bound, count_walks_graph, count_walks_operator, decompose,
    dominating_operator, intermediate_walk_bound, SpectralSummary, EIGEN_ITERATION_CAP,
    EIGEN_REL_TOL,
};
use serde::Serialize;
use std::path::PathBuf;
use std::str::FromStr;

#[derive(Parser)]
#[command(
    name = "rf",
    about = "Short-odd-cycle-free graphs from superimposed blown-up random graphs",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Construction shape: cycle length, vertex count, and the mode-dependent
/// knobs (operational mode requires all of p, r, k, delta).
#[derive(Args)]
struct ShapeArgs {
    /// Forbidden odd cycle length (odd, at least 5).
    #[arg(long)]
    ell: u32,
    /// Number of vertices.
    #[arg(long)]
    n: u64,
    /// Parameter mode: "asymptotic" or "operational".
    #[arg(long, default_value = "operational")]
    mode: String,
    /// Base-graph edge density.
    #[arg(long)]
    p: Option<f64>,
    /// Block size (must divide n).
    #[arg(long)]
    r: Option<u32>,
    /// Independence target.
    #[arg(long)]
    k: Option<u64>,
    /// Representative-set density.
    #[arg(long)]
    delta: Option<f64>,
}

impl ShapeArgs {
    fn params(&self) -> Result<Params> {
        let mode = Mode::from_str(&self.mode).map_err(anyhow::Error::msg)?;
        let overrides = Overrides {
            p: self.p,
            r: self.r,
            k: self.k,
            delta: self.delta,
        };
        Ok(derive_params(self.ell, self.n, mode, &overrides)?)
    }
}

/// Knobs re-supplied when probing a saved instance (the instance file
/// stores n, r, ell, seed, and mode, but not the density parameters).
#[derive(Args)]
struct SupplementArgs {
    /// Base-graph edge density (required for operational-mode instances).
    #[arg(long)]
    p: Option<f64>,
    /// Independence target.
    #[arg(long)]
    k: Option<u64>,
    /// Representative-set density.
    #[arg(long)]
    delta: Option<f64>,
}

impl SupplementArgs {
    fn params(&self, inst: &Instance) -> Result<Params> {
        let overrides = Overrides {
            p: self.p,
            r: Some(inst.r),
            k: self.k,
            delta: self.delta,
        };
        Ok(derive_params(inst.ell, inst.n as u64, inst.mode, &overrides)?)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Construct an instance and save graph.txt + partitions.txt.
    Build {
        #[command(flatten)]
        shape: ShapeArgs,
        /// Master seed.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Directory to write the instance into.
        #[arg(long)]
        out: PathBuf,
        /// Also run vertex and edge deletion before saving.
        #[arg(long)]
        cleanup: bool,
        /// Cycle-enumeration visit cap.
        #[arg(long, default_value_t = DEFAULT_VISIT_CAP)]
        cap: u64,
    },
    /// Run the pseudo-randomness verifier on a saved instance.
    Verify {
        /// Instance directory (as written by build).
        #[arg(long)]
        dir: PathBuf,
        #[command(flatten)]
        supplement: SupplementArgs,
        /// Monte-Carlo trial budget per probabilistic check.
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: u64,
        /// Verifier seed (default: derived from the instance seed).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Spectral decomposition and walk-count bounds on a saved instance.
    Walks {
        /// Instance directory (as written by build).
        #[arg(long)]
        dir: PathBuf,
        #[command(flatten)]
        supplement: SupplementArgs,
    },
    /// Independence-set probes on a saved instance.
    Alpha {
        /// Instance directory (as written by build).
        #[arg(long)]
        dir: PathBuf,
        #[command(flatten)]
        supplement: SupplementArgs,
        /// Local-search restarts.
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: u64,
        /// Search seed (default: derived from the instance seed).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Plain deletion-method baseline at the same scale.
    Baseline {
        /// Forbidden odd cycle length.
        #[arg(long)]
        ell: u32,
        /// Number of vertices.
        #[arg(long)]
        n: u64,
        /// Master seed.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Independence target for the search (default: n).
        #[arg(long)]
        target: Option<u64>,
        /// Local-search restarts.
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: u64,
        /// Cycle-enumeration visit cap.
        #[arg(long, default_value_t = DEFAULT_VISIT_CAP)]
        cap: u64,
    },
    /// Batch pipeline over a seed list; writes JSON reports and a CSV table.
    Experiment {
        /// Flat key = value configuration file.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Forbidden odd cycle length.
        #[arg(long)]
        ell: Option<u32>,
        /// Number of vertices.
        #[arg(long)]
        n: Option<u64>,
        /// Parameter mode: "asymptotic" or "operational".
        #[arg(long)]
        mode: Option<String>,
        /// Comma-separated master seeds.
        #[arg(long)]
        seed: Option<String>,
        /// Base-graph edge density.
        #[arg(long)]
        p: Option<f64>,
        /// Block size (must divide n).
        #[arg(long)]
        r: Option<u32>,
        /// Independence target.
        #[arg(long)]
        k: Option<u64>,
        /// Representative-set density.
        #[arg(long)]
        delta: Option<f64>,
        /// Trial budget (verifier checks and search restarts).
        #[arg(long)]
        trials: Option<u64>,
        /// Cycle-enumeration visit cap.
        #[arg(long)]
        cap: Option<u64>,
        /// Output directory for report-<seed>.json files and summary.csv.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct BuildOutput<'a> {
    out: String,
    seed: u64,
    params: &'a Params,
    colored_edges: u64,
    vertices_surviving: u64,
    cleanup: Option<&'a DeletionReport>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct WalksOutput {
    spectral: SpectralSummary,
    j_size: u64,
    length: u32,
    exact_union: u128,
    exact_operator: u128,
    intermediate_bound: f64,
    closed_form_bound: f64,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct BaselineOutput {
    p: f64,
    cycles_found: u64,
    edges_removed: u64,
    best_indep: u64,
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

/// Rebuild both base graphs from a saved instance. Only pristine (no
/// cleanup) instances are exact blow-ups, so this fails informatively on
/// instances saved with --cleanup.
fn recover_bases(
    inst: &Instance,
) -> Result<(cyclefree::bitset::BitGraph, cyclefree::bitset::BitGraph)> {
    let red = quotient_base(inst.g.red(), &inst.parts.red)
        .context("red layer is not a pristine blow-up (was the instance saved with --cleanup?)")?;
    let blue = quotient_base(inst.g.blue(), &inst.parts.blue)
        .context("blue layer is not a pristine blow-up (was the instance saved with --cleanup?)")?;
    Ok((red, blue))
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Build {
            shape,
            seed,
            out,
            cleanup,
            cap,
        } => {
            let params = shape.params()?;
            let (parts, _, _, mut g) = sample_instance(&params, seed);
            let mut deletion = DeletionReport::default();
            if cleanup {
                vertex_delete(&mut g, &parts, params.ell, &mut deletion);
                let (red_ord, blue_ord) = build_orderings(&parts);
                edge_delete(&mut g, &red_ord, &blue_ord, params.ell, cap, &mut deletion)?;
            }
            let inst = Instance {
                n: params.n as usize,
                r: params.r,
                ell: params.ell,
                seed,
                mode: params.mode,
                parts,
                g,
            };
            save_instance(&out, &inst)?;
            print_json(&BuildOutput {
                out: out.display().to_string(),
                seed,
                params: &params,
                colored_edges: inst.g.colored_edges().len() as u64,
                vertices_surviving: inst.g.alive_count() as u64,
                cleanup: cleanup.then_some(&deletion),
            })?;
        }
        Command::Verify {
            dir,
            supplement,
            trials,
            seed,
        } => {
            let inst = load_instance(&dir)?;
            let params = supplement.params(&inst)?;
            let (red_base, blue_base) = recover_bases(&inst)?;
            let budgets = TrialBudgets {
                projection_trials: trials,
                expansion_trials: trials,
            };
            let seed = seed.unwrap_or_else(|| stage_seed(inst.seed, "verify"));
            let report = verify_event_a(
                &red_base,
                &blue_base,
                &inst.g,
                &inst.parts,
                &params,
                &budgets,
                seed,
            )?;
            print_json(&report)?;
        }
        Command::Walks { dir, supplement } => {
            let inst = load_instance(&dir)?;
            let params = supplement.params(&inst)?;
            let (red_base, blue_base) = recover_bases(&inst)?;
            let op = dominating_operator(&red_base, &blue_base, &inst.parts)?;
            let decomp = decompose(&op, EIGEN_REL_TOL, EIGEN_ITERATION_CAP)?;
            let j = representative_set(&inst.g, &inst.parts, &params);
            if j.len() < 2 {
                bail!("fewer than 2 live vertices for the walk set");
            }
            let length = params.ell - 1;
            print_json(&WalksOutput {
                spectral: decomp.summary(),
                j_size: j.len() as u64,
                length,
                exact_union: count_walks_graph(&inst.g.union_all(), &j, length),
                exact_operator: count_walks_operator(&op, &j, length),
                intermediate_bound: intermediate_walk_bound(&decomp, &j, params.ell),
                closed_form_bound: closed_form_walk_bound(&params, j.len() as u64),
            })?;
        }
        Command::Alpha {
            dir,
            supplement,
            trials,
            seed,
        } => {
            let inst = load_instance(&dir)?;
            let params = supplement.params(&inst)?;
            let g = inst.g.union_alive();
            let alive: Vec<u32> = (0..inst.n as u32).filter(|&v| inst.g.is_alive(v)).collect();
            let target = (params.k as usize).min(alive.len());
            let seed = seed.unwrap_or_else(|| stage_seed(inst.seed, "search"));
            let best = independent_set_search(&g, &alive, target, trials, seed);
            let alpha = if alive.len() <= ALPHA_EXACT_CAP {
                Some(alpha_exact(&compact_induced(&g, &alive))? as u64)
            } else {
                None
            };
            let j = representative_set(&inst.g, &inst.parts, &params);
            let closed = cyclefree::indep::closed_pairs(&inst.g, &j, params.ell);
            let split = cyclefree::indep::exposure_split(&inst.g, &inst.parts, &j, params.ell);
            print_json(&IndependenceSummary {
                closed_pairs: closed.len() as u64,
                open_pairs: split.open.len() as u64,
                best_found_set: best.len() as u64,
                alpha_exact: alpha,
                bound_log: ind_set_probability_bound(&params).union_log,
            })?;
        }
        Command::Baseline {
            ell,
            n,
            seed,
            target,
            trials,
            cap,
        } => {
            let outcome = baseline_construction(n as usize, ell, seed, cap)?;
            let all: Vec<u32> = (0..n as u32).collect();
            let target = target.unwrap_or(n).min(n) as usize;
            let best = independent_set_search(
                &outcome.graph,
                &all,
                target,
                trials,
                stage_seed(seed, "baselineSearch"),
            );
            print_json(&BaselineOutput {
                p: outcome.p,
                cycles_found: outcome.cycles_found,
                edges_removed: outcome.edges_removed,
                best_indep: best.len() as u64,
            })?;
        }
        Command::Experiment {
            config,
            ell,
            n,
            mode,
            seed,
            p,
            r,
            k,
            delta,
            trials,
            cap,
            out,
        } => {
            let mut cfg = match &config {
                Some(path) => {
                    let text = std::fs::read_to_string(path)
                        .with_context(|| format!("reading {}", path.display()))?;
                    parse_config(&text)?
                }
                None => {
                    let ell = ell.context("--ell is required without --config")?;
                    let n = n.context("--n is required without --config")?;
                    ExperimentConfig::new(ell, n)
                }
            };
            if let Some(ell) = ell {
                cfg.ell = ell;
            }
            if let Some(n) = n {
                cfg.n = n;
            }
            if let Some(mode) = mode {
                cfg.mode = Mode::from_str(&mode).map_err(anyhow::Error::msg)?;
            }
            if let Some(list) = seed {
                cfg.seeds = list
                    .split(',')
                    .map(|s| s.trim().parse().context("invalid --seed list"))
                    .collect::<Result<Vec<u64>>>()?;
            }
            cfg.overrides.p = p.or(cfg.overrides.p);
            cfg.overrides.r = r.or(cfg.overrides.r);
            cfg.overrides.k = k.or(cfg.overrides.k);
            cfg.overrides.delta = delta.or(cfg.overrides.delta);
            if let Some(trials) = trials {
                cfg.trials = trials;
            }
            if let Some(cap) = cap {
                cfg.cap = cap;
            }
            if let Some(out) = out {
                cfg.out = Some(out);
            }
            let outcome = run_experiment(&cfg)?;
            #[derive(Serialize)]
            #[serde(rename_all = "camelCase")]
            struct ExperimentOutput<'a> {
                seeds: usize,
                any_error: bool,
                out: Option<String>,
                reports: &'a [cyclefree::harness::RunReport],
            }
            print_json(&ExperimentOutput {
                seeds: outcome.reports.len(),
                any_error: outcome.any_error(),
                out: cfg.out.as_ref().map(|d| d.display().to_string()),
                reports: &outcome.reports,
            })?;
            if outcome.any_error() {
                std::process::exit(1);
            }
        }
    }
    Ok(())
}
