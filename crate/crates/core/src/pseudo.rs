//! Finite-n verifier for the pseudo-randomness event the analysis
//! conditions on: degree concentration, spectral deviation of the base
//! graphs, the two-partition projection property, bicolored common
//! neighborhoods, and vertex expansion.

use crate::bitset::{BitGraph, Bits};
use crate::linalg::{self, power_iterate_psd, NoConvergence};
use crate::model::{ColoredGraph, PartitionPair};
use crate::params::Params;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PseudoError {
    #[error("spectral deviation did not converge: {0}")]
    NoConvergence(#[from] NoConvergence),
}

/// Iteration cap for the spectral power iteration.
pub const SPECTRAL_ITERATION_CAP: u64 = 10_000;
/// Residual-certified relative tolerance of the spectral value.
pub const SPECTRAL_REL_TOL: f64 = 1e-6;

/// Default degree tolerance: four binomial standard deviations, relative to
/// the mean degree p(m−1) ≈ pm.
pub fn default_degree_tol(p: f64, m: usize) -> f64 {
    4.0 * ((1.0 - p) / (p * m as f64)).sqrt()
}

/// Outcome of all five checks on one instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VerifierReport {
    pub degree_dev_red: f64,
    pub degree_dev_blue: f64,
    pub degree_tol: f64,
    pub degrees_passed: bool,
    pub spectral_dev_red: f64,
    pub spectral_dev_blue: f64,
    pub spectral_bound: f64,
    pub spectral_passed: bool,
    pub projection_trials: u64,
    pub projection_failures: u64,
    pub projections_passed: bool,
    pub double_degree_max: u64,
    pub double_degree_bound: f64,
    pub double_degree_passed: bool,
    pub expansion_trials: u64,
    pub expansion_failures: u64,
    pub expansion_passed: bool,
    pub passed: bool,
}

/// Monte Carlo budgets for the subset-quantified checks.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct TrialBudgets {
    pub projection_trials: u64,
    pub expansion_trials: u64,
}

impl Default for TrialBudgets {
    fn default() -> Self {
        TrialBudgets {
            projection_trials: 1000,
            expansion_trials: 1000,
        }
    }
}

/// Max over vertices of |d(x)/(p(m−1)) − 1|, compared against `tol`.
pub fn check_degrees(base: &BitGraph, p: f64, tol: f64) -> (f64, bool) {
    let m = base.n();
    let mean = p * (m as f64 - 1.0);
    debug_assert!(mean > 0.0, "degree check expects pm ≥ 1");
    let dev = (0..m)
        .map(|v| (base.degree(v) as f64 / mean - 1.0).abs())
        .fold(0.0, f64::max);
    (dev, dev <= tol)
}

/// Operator norm of (adjacency − p·J), computed matrix-free by power
/// iteration on the square, with a residual-certified exit.
pub fn spectral_deviation(base: &BitGraph, p: f64) -> Result<f64, PseudoError> {
    let m = base.n();
    assert!(m >= 2, "spectral deviation needs at least two vertices");
    // One application of B = (A − pJ)²: two adjacency multiplies plus
    // rank-one all-ones corrections (Jx = (Σx)·1).
    let mul = |x: &[f64], out: &mut [f64]| {
        let sx: f64 = x.iter().sum();
        for u in 0..m {
            let mut acc = 0.0;
            for v in base.neighbors(u) {
                acc += x[v];
            }
            out[u] = acc - p * sx;
        }
    };
    let apply = |x: &[f64], y: &mut [f64]| {
        let mut w = vec![0.0; m];
        mul(x, &mut w);
        mul(&w, y);
    };
    let start = linalg::perturbed_ones(m, 0x5EC7_0001);
    let out = power_iterate_psd(m, apply, start, SPECTRAL_REL_TOL, SPECTRAL_ITERATION_CAP)?;
    Ok(out.value.sqrt())
}

/// Number of distinct blocks of `part` hit by the members of `s`.
fn projection_size(part: &crate::model::Partition, s: &[u32]) -> usize {
    let mut hit = vec![false; part.block_count()];
    let mut count = 0;
    for &v in s {
        let b = part.block_of(v) as usize;
        if !hit[b] {
            hit[b] = true;
            count += 1;
        }
    }
    count
}

fn sample_distinct(n: usize, t: usize, rng: &mut StdRng) -> Vec<u32> {
    rand::seq::index::sample(rng, n, t).iter().map(|v| v as u32).collect()
}

/// Union of randomly chosen blocks of one color, truncated to `t` vertices —
/// adversarial for that color's projection.
fn sample_block_concentrated(parts: &PartitionPair, t: usize, rng: &mut StdRng) -> Vec<u32> {
    let part = if rng.gen::<bool>() { &parts.red } else { &parts.blue };
    let b = part.block_count();
    let r = part.r() as usize;
    let needed = t.div_ceil(r).min(b);
    let mut blocks: Vec<usize> = (0..b).collect();
    blocks.shuffle(rng);
    let mut s = Vec::with_capacity(t);
    for &bi in blocks.iter().take(needed) {
        for &v in part.block(bi as u32) {
            if s.len() < t {
                s.push(v);
            }
        }
    }
    s
}

/// Sampled check of the projection property: for |S| = t ≤ k, require
/// max(|π_red(S)|, |π_blue(S)|) ≥ δ·t. Returns (trials, failures).
pub fn check_projections(
    parts: &PartitionPair,
    delta: f64,
    k: u64,
    trials: u64,
    seed: u64,
) -> (u64, u64) {
    let n = parts.red.n();
    let k_eff = (k as usize).min(n).max(1);
    let mut rng = StdRng::seed_from_u64(seed);
    let mut failures = 0;
    for trial in 0..trials {
        let t = rng.gen_range(1..=k_eff);
        let s = if trial % 2 == 0 {
            sample_distinct(n, t, &mut rng)
        } else {
            sample_block_concentrated(parts, t, &mut rng)
        };
        let pr = projection_size(&parts.red, &s);
        let pb = projection_size(&parts.blue, &s);
        if (pr.max(pb) as f64) < delta * s.len() as f64 {
            failures += 1;
        }
    }
    (trials, failures)
}

/// Exhaustive projection check over all nonempty subsets of size ≤ k
/// (n ≤ 24). Returns (subsets checked, failures).
pub fn check_projections_exhaustive(parts: &PartitionPair, delta: f64, k: u64) -> (u64, u64) {
    let n = parts.red.n();
    assert!(n <= 24, "exhaustive projection check is exponential in n");
    let red_mask: Vec<u32> = (0..n).map(|v| 1u32 << parts.red.block_of(v as u32)).collect();
    let blue_mask: Vec<u32> = (0..n).map(|v| 1u32 << parts.blue.block_of(v as u32)).collect();
    let (mut trials, mut failures) = (0u64, 0u64);
    for mask in 1u32..(1u32 << n) {
        let t = mask.count_ones() as u64;
        if t > k {
            continue;
        }
        trials += 1;
        let (mut pr, mut pb) = (0u32, 0u32);
        let mut bits = mask;
        while bits != 0 {
            let v = bits.trailing_zeros() as usize;
            pr |= red_mask[v];
            pb |= blue_mask[v];
            bits &= bits - 1;
        }
        let best = pr.count_ones().max(pb.count_ones()) as f64;
        if best < delta * t as f64 {
            failures += 1;
        }
    }
    (trials, failures)
}

/// Exact max over vertices of the common red/blue neighborhood size,
/// compared to n^(1−η)·p.
pub fn check_double_degree(g: &ColoredGraph, p: f64, eta: f64) -> (u64, f64, bool) {
    let n = g.n();
    let max = (0..n)
        .map(|v| g.red().row(v).intersection_count(g.blue().row(v)) as u64)
        .max()
        .unwrap_or(0);
    let bound = (n as f64).powf(1.0 - eta) * p;
    (max, bound, max as f64 <= bound)
}

/// Vertex boundary of `s` in the union graph: neighbors outside `s`.
fn vertex_boundary(union: &BitGraph, s: &[u32]) -> usize {
    let n = union.n();
    let mut acc = Bits::new(n);
    let mut in_s = Bits::new(n);
    for &v in s {
        acc.or_assign(union.row(v as usize));
        in_s.set(v as usize);
    }
    acc.and_not_assign(&in_s);
    acc.count()
}

/// S grown along the union graph from a random start — adversarial for
/// expansion because neighborhoods overlap.
fn sample_neighborhood_concentrated(union: &BitGraph, t: usize, rng: &mut StdRng) -> Vec<u32> {
    let n = union.n();
    let start = rng.gen_range(0..n);
    let mut s = vec![start as u32];
    let mut in_s = vec![false; n];
    in_s[start] = true;
    let mut frontier = 0usize;
    while s.len() < t && frontier < s.len() {
        let u = s[frontier] as usize;
        frontier += 1;
        for v in union.neighbors(u) {
            if !in_s[v] && s.len() < t {
                in_s[v] = true;
                s.push(v as u32);
            }
        }
    }
    s
}

/// Sampled expansion check: |∂(S)| ≥ δ·p·n·|S|/8 for |S| ≤ 1/(2p).
/// Returns (trials, failures).
pub fn check_expansion(
    g: &ColoredGraph,
    parts: &PartitionPair,
    p: f64,
    delta: f64,
    trials: u64,
    seed: u64,
) -> (u64, u64) {
    let n = g.n();
    let union = g.union_all();
    let smax = ((1.0 / (2.0 * p)).floor() as usize).min(n);
    if smax == 0 {
        return (0, 0);
    }
    let mut rng = StdRng::seed_from_u64(seed);
    let mut failures = 0;
    for trial in 0..trials {
        let t = rng.gen_range(1..=smax);
        let s = match trial % 3 {
            0 => sample_distinct(n, t, &mut rng),
            1 => sample_block_concentrated(parts, t, &mut rng),
            _ => sample_neighborhood_concentrated(&union, t, &mut rng),
        };
        let boundary = vertex_boundary(&union, &s) as f64;
        if boundary < delta * p * n as f64 * s.len() as f64 / 8.0 {
            failures += 1;
        }
    }
    (trials, failures)
}

/// Run all five checks and aggregate; `passed` is their conjunction.
pub fn verify_event_a(
    red_base: &BitGraph,
    blue_base: &BitGraph,
    g: &ColoredGraph,
    parts: &PartitionPair,
    params: &Params,
    budgets: &TrialBudgets,
    seed: u64,
) -> Result<VerifierReport, PseudoError> {
    let p = params.p;
    let m = red_base.n();
    let degree_tol = default_degree_tol(p, m);
    let (degree_dev_red, red_ok) = check_degrees(red_base, p, degree_tol);
    let (degree_dev_blue, blue_ok) = check_degrees(blue_base, p, degree_tol);
    let degrees_passed = red_ok && blue_ok;

    let spectral_dev_red = spectral_deviation(red_base, p)?;
    let spectral_dev_blue = spectral_deviation(blue_base, p)?;
    let spectral_bound = 3.0 * (p * m as f64).sqrt();
    let spectral_passed = spectral_dev_red <= spectral_bound && spectral_dev_blue <= spectral_bound;

    let (projection_trials, projection_failures) = check_projections(
        parts,
        params.delta,
        params.k,
        budgets.projection_trials,
        linalg::splitmix64(seed ^ 0x1),
    );
    let projections_passed = projection_failures == 0;

    let (double_degree_max, double_degree_bound, double_degree_passed) =
        check_double_degree(g, p, params.eta);

    let (expansion_trials, expansion_failures) = check_expansion(
        g,
        parts,
        p,
        params.delta,
        budgets.expansion_trials,
        linalg::splitmix64(seed ^ 0x2),
    );
    let expansion_passed = expansion_failures == 0;

    Ok(VerifierReport {
        degree_dev_red,
        degree_dev_blue,
        degree_tol,
        degrees_passed,
        spectral_dev_red,
        spectral_dev_blue,
        spectral_bound,
        spectral_passed,
        projection_trials,
        projection_failures,
        projections_passed,
        double_degree_max,
        double_degree_bound,
        double_degree_passed,
        expansion_trials,
        expansion_failures,
        expansion_passed,
        passed: degrees_passed
            && spectral_passed
            && projections_passed
            && double_degree_passed
            && expansion_passed,
    })
}
