//! Independence machinery: closed pairs, representative selection, the
//! two-round exposure split, the open-pair claim checker, independence-number
//! search (heuristic at scale, exact at desk scale), the plain-deletion
//! baseline, and the union-bound probability calculator.

use crate::bitset::{BitGraph, Bits};
use crate::cycles::{self, CycleError};
use crate::model::{Color, ColoredGraph, PartitionPair};
use crate::params::Params;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IndepError {
    #[error("exact independence solver capped at {cap} vertices, got {n}")]
    AlphaCap { n: usize, cap: usize },
    #[error(transparent)]
    Cycles(#[from] CycleError),
}

/// One non-alternating path certifying a closed pair: `vertices` has ℓ
/// entries (endpoints included) and `colors` assigns each of the ℓ−1 edges a
/// color available on it, with some consecutive repeat.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub vertices: Vec<u32>,
    pub colors: Vec<Color>,
}

/// The pairs of `J` joined by a non-alternating path of length ℓ−1, each with
/// one witness. Keys are sorted pairs `(x, y)`, `x < y`.
#[derive(Clone, Debug, Default)]
pub struct ClosedPairSet {
    pub closed: BTreeMap<(u32, u32), Witness>,
}

impl ClosedPairSet {
    pub fn is_closed(&self, x: u32, y: u32) -> bool {
        self.closed.contains_key(&(x.min(y), x.max(y)))
    }

    pub fn len(&self) -> usize {
        self.closed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.closed.is_empty()
    }
}

/// Check that a witness is a valid non-alternating path in `g` of the given
/// cycle length's path length (ℓ−1 edges): distinct vertices, every edge
/// present with its assigned color, and some consecutive color repeat.
pub fn validate_witness(g: &ColoredGraph, w: &Witness, ell: u32) -> bool {
    let len = (ell - 1) as usize;
    if w.vertices.len() != len + 1 || w.colors.len() != len {
        return false;
    }
    let mut seen = w.vertices.clone();
    seen.sort_unstable();
    seen.dedup();
    if seen.len() != w.vertices.len() {
        return false;
    }
    for i in 0..len {
        let (u, v) = (w.vertices[i], w.vertices[i + 1]);
        if !g.by_color(w.colors[i]).has_edge(u as usize, v as usize) {
            return false;
        }
    }
    w.colors.windows(2).any(|c| c[0] == c[1])
}

fn non_alternating_path(
    g: &ColoredGraph,
    x: u32,
    y: u32,
    len: usize,
) -> Option<(Vec<u32>, Vec<Color>)> {
    struct Dfs<'a> {
        g: &'a ColoredGraph,
        union: BitGraph,
        y: u32,
        len: usize,
        path: Vec<u32>,
        colors: Vec<Color>,
        visited: Bits,
    }
    impl Dfs<'_> {
        fn go(&mut self, at: u32, last: Option<Color>, seen_same: bool) -> bool {
            if self.colors.len() == self.len {
                return at == self.y && seen_same;
            }
            let remaining = self.len - self.colors.len();
            let row = self.union.row(at as usize).clone();
            for v in row.iter() {
                let v = v as u32;
                if self.visited.get(v as usize) || (v == self.y) != (remaining == 1) {
                    continue;
                }
                let colors = self.g.edge_colors(at, v);
                for c in [Color::Red, Color::Blue] {
                    if !colors.has(c) {
                        continue;
                    }
                    let same = seen_same || last == Some(c);
                    self.visited.set(v as usize);
                    self.path.push(v);
                    self.colors.push(c);
                    if self.go(v, Some(c), same) {
                        return true;
                    }
                    self.colors.pop();
                    self.path.pop();
                    self.visited.clear(v as usize);
                }
            }
            false
        }
    }
    let mut dfs = Dfs {
        g,
        union: g.union_all(),
        y,
        len,
        path: vec![x],
        colors: Vec::with_capacity(len),
        visited: Bits::new(g.n()),
    };
    dfs.visited.set(x as usize);
    if dfs.go(x, None, false) {
        Some((dfs.path, dfs.colors))
    } else {
        None
    }
}

/// For each pair of `J`, decide whether a non-alternating path of length ℓ−1
/// joins it in `g` (the pre-deletion superimposed graph), returning one
/// witness per closed pair. Bicolored edges may serve as either color.
/// Parallelizes over pairs.
pub fn closed_pairs(g: &ColoredGraph, j: &[u32], ell: u32) -> ClosedPairSet {
    let len = (ell - 1) as usize;
    let mut pairs = Vec::new();
    for (i, &x) in j.iter().enumerate() {
        for &y in &j[i + 1..] {
            pairs.push((x.min(y), x.max(y)));
        }
    }
    let closed: BTreeMap<(u32, u32), Witness> = pairs
        .into_par_iter()
        .filter_map(|(x, y)| {
            non_alternating_path(g, x, y, len)
                .map(|(vertices, colors)| ((x, y), Witness { vertices, colors }))
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect();
    ClosedPairSet { closed }
}

fn plain_walks(g: &BitGraph, x: u32, y: u32, len: usize) -> u128 {
    let n = g.n();
    let mut cur = vec![0u128; n];
    cur[x as usize] = 1;
    let mut next = vec![0u128; n];
    for _ in 0..len {
        next.iter_mut().for_each(|c| *c = 0);
        for u in 0..n {
            if cur[u] == 0 {
                continue;
            }
            for v in g.neighbors(u) {
                next[v] = next[v].checked_add(cur[u]).expect("walk count overflow");
            }
        }
        std::mem::swap(&mut cur, &mut next);
    }
    cur[y as usize]
}

/// Exact count of x→y walks of the given edge count whose color sets admit a
/// non-alternating assignment. A sequence fails to admit one exactly when
/// every consecutive edge pair has disjoint color sets, which forces all
/// edges single-colored and strictly alternating; so the count is
/// (all union walks) − (strictly alternating single-colored walks).
pub fn count_non_alternating_walks(g: &ColoredGraph, x: u32, y: u32, len: u32) -> u128 {
    let len = len as usize;
    assert!(len >= 2, "a single edge cannot repeat a color");
    let n = g.n();
    let union = g.union_all();
    let total = plain_walks(&union, x, y, len);

    let mut only = [BitGraph::new(n), BitGraph::new(n)];
    for u in 0..n {
        for v in union.neighbors(u) {
            if v <= u {
                continue;
            }
            let c = g.edge_colors(u as u32, v as u32);
            if c.red && !c.blue {
                only[0].add_edge(u, v);
            } else if c.blue && !c.red {
                only[1].add_edge(u, v);
            }
        }
    }
    // cur[side][v]: alternating walks ending at v whose last edge used
    // the single-colored class `side` (0 = red-only, 1 = blue-only).
    let mut cur = [vec![0u128; n], vec![0u128; n]];
    for (side, class) in only.iter().enumerate() {
        for v in class.neighbors(x as usize) {
            cur[side][v] += 1;
        }
    }
    for _ in 1..len {
        let mut nxt = [vec![0u128; n], vec![0u128; n]];
        for side in 0..2 {
            let class = &only[side ^ 1];
            for u in 0..n {
                if cur[side][u] == 0 {
                    continue;
                }
                for v in class.neighbors(u) {
                    nxt[side ^ 1][v] = nxt[side ^ 1][v]
                        .checked_add(cur[side][u])
                        .expect("walk count overflow");
                }
            }
        }
        cur = nxt;
    }
    let alternating = cur[0][y as usize] + cur[1][y as usize];
    total - alternating
}

/// Pick one representative per block among the first ⌈δk⌉ blocks hit by `I`,
/// red first, blue as fallback; `None` when neither color's projection is
/// large enough. Deterministic: blocks in increasing index order, smallest
/// vertex of `I` within each block.
pub fn pick_representatives(
    i_set: &[u32],
    parts: &PartitionPair,
    delta: f64,
    k: u64,
) -> Option<Vec<u32>> {
    assert_eq!(i_set.len() as u64, k, "representative selection needs |I| = k");
    let need = (delta * k as f64).ceil() as usize;
    for part in [&parts.red, &parts.blue] {
        let mut by_block: BTreeMap<u32, u32> = BTreeMap::new();
        for &v in i_set {
            let b = part.block_of(v);
            by_block
                .entry(b)
                .and_modify(|m| *m = (*m).min(v))
                .or_insert(v);
        }
        if by_block.len() >= need {
            return Some(by_block.into_values().take(need).collect());
        }
    }
    None
}

/// The first exposure graph and the open pairs of `J`.
#[derive(Clone, Debug)]
pub struct ExposureSplit {
    /// Blue edges plus red edges not coupled to any pair of J⁽²⁾.
    pub g0: BitGraph,
    /// Pairs of J whose addition to G₀ completes no C_ℓ. Sorted.
    pub open: Vec<(u32, u32)>,
}

fn block_pair(part: &crate::model::Partition, u: u32, v: u32) -> (u32, u32) {
    let (a, b) = (part.block_of(u), part.block_of(v));
    (a.min(b), a.max(b))
}

fn exists_path_of_length(g: &BitGraph, x: u32, y: u32, len: usize) -> bool {
    fn go(g: &BitGraph, at: u32, y: u32, remaining: usize, visited: &mut Bits) -> bool {
        if remaining == 0 {
            return at == y;
        }
        for v in g.neighbors(at as usize) {
            let v = v as u32;
            if visited.get(v as usize) || (v == y) != (remaining == 1) {
                continue;
            }
            visited.set(v as usize);
            if go(g, v, y, remaining - 1, visited) {
                visited.clear(v as usize);
                return true;
            }
            visited.clear(v as usize);
        }
        false
    }
    let mut visited = Bits::new(g.n());
    visited.set(x as usize);
    go(g, x, y, len, &mut visited)
}

/// Split off the first exposure graph for `J`: keep all blue edges, drop every
/// red edge coupled (sharing a red or a blue block pair) to some pair of J⁽²⁾,
/// then classify each pair of J as open iff adding it to G₀ completes no C_ℓ.
pub fn exposure_split(
    g: &ColoredGraph,
    parts: &PartitionPair,
    j: &[u32],
    ell: u32,
) -> ExposureSplit {
    let n = g.n();
    let mut red_pairs = std::collections::HashSet::new();
    let mut blue_pairs = std::collections::HashSet::new();
    let mut jpairs = Vec::new();
    for (i, &x) in j.iter().enumerate() {
        for &y in &j[i + 1..] {
            red_pairs.insert(block_pair(&parts.red, x, y));
            blue_pairs.insert(block_pair(&parts.blue, x, y));
            jpairs.push((x.min(y), x.max(y)));
        }
    }
    jpairs.sort_unstable();

    let mut g0 = g.blue().clone();
    for u in 0..n {
        for v in g.red().neighbors(u) {
            if v <= u {
                continue;
            }
            let (u32u, u32v) = (u as u32, v as u32);
            let coupled = red_pairs.contains(&block_pair(&parts.red, u32u, u32v))
                || blue_pairs.contains(&block_pair(&parts.blue, u32u, u32v));
            if !coupled {
                g0.add_edge(u, v);
            }
        }
    }

    let open = jpairs
        .into_par_iter()
        .filter(|&(x, y)| {
            let mut with_e = g0.clone();
            with_e.add_edge(x as usize, y as usize);
            !exists_path_of_length(&with_e, x, y, (ell - 1) as usize)
        })
        .collect::<Vec<_>>();
    ExposureSplit { g0, open }
}

/// Outcome of the open-pair implication check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ClaimReport {
    /// Whether J was independent in the final red graph (the premise).
    pub premise_independent: bool,
    pub open_pairs: u64,
    /// An open pair that is nevertheless a red edge of G′, if any.
    pub counterexample: Option<(u32, u32)>,
    /// The implication "premise ⟹ no counterexample".
    pub holds: bool,
}

/// Evaluate "J independent in the final red graph ⟹ no open pair is a red
/// edge of G′". The split is recomputed from the pre-deletion graph; the
/// premise is tested on the post-deletion red class.
pub fn check_claim(
    g_pre: &ColoredGraph,
    parts: &PartitionPair,
    j: &[u32],
    ell: u32,
    final_red: &BitGraph,
) -> ClaimReport {
    let premise = j.iter().enumerate().all(|(i, &x)| {
        j[i + 1..]
            .iter()
            .all(|&y| !final_red.has_edge(x as usize, y as usize))
    });
    let split = exposure_split(g_pre, parts, j, ell);
    let counterexample = split
        .open
        .iter()
        .copied()
        .find(|&(x, y)| g_pre.red().has_edge(x as usize, y as usize));
    ClaimReport {
        premise_independent: premise,
        open_pairs: split.open.len() as u64,
        counterexample,
        holds: !premise || counterexample.is_none(),
    }
}

fn verify_independent(g: &BitGraph, in_set: &Bits, set: &[u32]) {
    for &v in set {
        assert_eq!(
            g.row(v as usize).intersection_count(in_set),
            0,
            "search produced a dependent set"
        );
    }
}

fn greedy_with_swaps(g: &BitGraph, universe: &[u32], target: usize, seed: u64) -> Vec<u32> {
    let n = g.n();
    let mut order = universe.to_vec();
    order.shuffle(&mut StdRng::seed_from_u64(seed));
    let mut in_set = Bits::new(n);
    let mut set: Vec<u32> = Vec::new();
    let insert = |set: &mut Vec<u32>, in_set: &mut Bits, v: u32| {
        in_set.set(v as usize);
        set.push(v);
    };
    for &v in &order {
        if set.len() >= target {
            break;
        }
        if g.row(v as usize).intersection_count(&in_set) == 0 {
            insert(&mut set, &mut in_set, v);
        }
    }
    // Local improvement: free insertions, then (1,2)-swaps, until stable or
    // the target is reached. Each round strictly grows the set.
    'improve: while set.len() < target {
        for &v in &order {
            if set.len() >= target {
                break 'improve;
            }
            if !in_set.get(v as usize) && g.row(v as usize).intersection_count(&in_set) == 0 {
                insert(&mut set, &mut in_set, v);
            }
        }
        if set.len() >= target {
            break;
        }
        // Group outside vertices by their unique neighbor in the set.
        let mut tight: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
        for &u in &order {
            if in_set.get(u as usize) {
                continue;
            }
            if g.row(u as usize).intersection_count(&in_set) == 1 {
                let w = g
                    .neighbors(u as usize)
                    .find(|&w| in_set.get(w))
                    .expect("tight vertex has a set neighbor") as u32;
                tight.entry(w).or_default().push(u);
            }
        }
        let mut swap = None;
        'scan: for (&w, cands) in &tight {
            for (i, &a) in cands.iter().enumerate() {
                for &b in &cands[i + 1..] {
                    if !g.has_edge(a as usize, b as usize) {
                        swap = Some((w, a, b));
                        break 'scan;
                    }
                }
            }
        }
        match swap {
            Some((w, a, b)) => {
                in_set.clear(w as usize);
                set.retain(|&v| v != w);
                insert(&mut set, &mut in_set, a);
                insert(&mut set, &mut in_set, b);
            }
            None => break,
        }
    }
    verify_independent(g, &in_set, &set);
    set.sort_unstable();
    set
}

/// Randomized greedy plus (1,2)-swap local search over `restarts` independent
/// restarts (run in parallel, deterministic in `seed`). Growth stops at
/// `target`; the best set found is returned, verified independent.
pub fn independent_set_search(
    g: &BitGraph,
    universe: &[u32],
    target: usize,
    restarts: u64,
    seed: u64,
) -> Vec<u32> {
    let runs: Vec<Vec<u32>> = (0..restarts.max(1))
        .into_par_iter()
        .map(|i| greedy_with_swaps(g, universe, target, crate::linalg::splitmix64(seed ^ i)))
        .collect();
    runs.into_iter()
        .max_by(|a, b| a.len().cmp(&b.len()).then(b.cmp(a)))
        .unwrap_or_default()
}

/// Vertex cap for the exact solver.
pub const ALPHA_EXACT_CAP: usize = 200;

/// Exact independence number via maximum clique on the complement with a
/// greedy-coloring bound.
pub fn alpha_exact(g: &BitGraph) -> Result<u32, IndepError> {
    let n = g.n();
    if n > ALPHA_EXACT_CAP {
        return Err(IndepError::AlphaCap {
            n,
            cap: ALPHA_EXACT_CAP,
        });
    }
    if n == 0 {
        return Ok(0);
    }
    let mut comp: Vec<Bits> = (0..n).map(|_| Bits::new(n)).collect();
    for u in 0..n {
        for v in 0..n {
            if u != v && !g.has_edge(u, v) {
                comp[u].set(v);
            }
        }
    }

    fn expand(comp: &[Bits], cand: &[u32], size: u32, best: &mut u32) {
        if cand.is_empty() {
            *best = (*best).max(size);
            return;
        }
        let n = comp.len();
        // Greedy coloring of the candidates; color classes are cliques-free
        // (independent in the complement graph), so `size + color` bounds any
        // clique extending through this vertex.
        let mut classes: Vec<Bits> = Vec::new();
        let mut ordered: Vec<(u32, u32)> = Vec::with_capacity(cand.len());
        for &v in cand {
            let mut c = 0usize;
            while c < classes.len() && comp[v as usize].intersection_count(&classes[c]) > 0 {
                c += 1;
            }
            if c == classes.len() {
                classes.push(Bits::new(n));
            }
            classes[c].set(v as usize);
            ordered.push((c as u32 + 1, v));
        }
        ordered.sort_unstable();
        for i in (0..ordered.len()).rev() {
            let (color, v) = ordered[i];
            if size + color <= *best {
                return;
            }
            let next: Vec<u32> = ordered[..i]
                .iter()
                .map(|&(_, u)| u)
                .filter(|&u| comp[v as usize].get(u as usize))
                .collect();
            expand(comp, &next, size + 1, best);
        }
    }

    let mut best = 0;
    let all: Vec<u32> = (0..n as u32).collect();
    expand(&comp, &all, 0, &mut best);
    Ok(best)
}

/// Outcome of the plain deletion-method baseline.
#[derive(Clone, Debug)]
pub struct BaselineOutcome {
    pub graph: BitGraph,
    pub p: f64,
    pub cycles_found: u64,
    pub edges_removed: u64,
}

/// Sample G(n, ½·n^(−1+1/(ℓ−1))) and delete one deterministic edge (the
/// first edge of each cycle in canonical order) per enumerated C_ℓ, in a
/// single pass. The result contains no C_ℓ.
pub fn baseline_construction(
    n: usize,
    ell: u32,
    seed: u64,
    visit_cap: u64,
) -> Result<BaselineOutcome, IndepError> {
    let p = 0.5 * (n as f64).powf(-1.0 + 1.0 / (ell as f64 - 1.0));
    let mut rng = StdRng::seed_from_u64(seed);
    let mut g = crate::model::sample_base_graph(n, p, &mut rng);
    let mut doomed = std::collections::BTreeSet::new();
    let mut cycles_found = 0u64;
    cycles::for_each_cycle(&g, ell as usize, visit_cap, |c| {
        cycles_found += 1;
        doomed.insert((c[0].min(c[1]), c[0].max(c[1])));
        std::ops::ControlFlow::Continue(())
    })?;
    for &(u, v) in &doomed {
        g.remove_edge(u as usize, v as usize);
    }
    Ok(BaselineOutcome {
        graph: g,
        p,
        cycles_found,
        edges_removed: doomed.len() as u64,
    })
}

/// ln C(n, k), summed term by term.
pub fn ln_choose(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    (1..=k)
        .map(|i| ((n - k + i) as f64).ln() - (i as f64).ln())
        .sum()
}

/// Log-space independence probability bounds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct IndepBound {
    /// ln[(1−p)^{(δk)²/4}]: per-set bound on the probability that a fixed
    /// k-set with large red projection is independent.
    pub per_set_log: f64,
    /// ln[C(n,k)·(1−p)^{δ²k²/4}]: the union-bound expectation.
    pub union_log: f64,
    /// The analytic envelope k·(ln n − p·δ²·k/4), an upper bound on the
    /// union term.
    pub envelope_log: f64,
}

/// Per-set and union-bound independence probabilities, in log space.
pub fn ind_set_probability_bound(params: &Params) -> IndepBound {
    let (n, k, p, delta) = (
        params.n as f64,
        params.k as f64,
        params.p,
        params.delta,
    );
    let dk = delta * k;
    let per_set_log = dk * dk / 4.0 * (1.0 - p).ln();
    let union_log = ln_choose(params.n, params.k) + per_set_log;
    let envelope_log = k * (n.ln() - p * delta * delta * k / 4.0);
    IndepBound {
        per_set_log,
        union_log,
        envelope_log,
    }
}

/// Per-run independence results for serialized reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct IndependenceSummary {
    pub closed_pairs: u64,
    pub open_pairs: u64,
    pub best_found_set: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_exact: Option<u64>,
    pub bound_log: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{blow_up, sample_base_graph, EdgeColors, Partition};
    use rand::Rng;

    fn singleton_parts(n: usize) -> PartitionPair {
        let blocks: Vec<Vec<u32>> = (0..n as u32).map(|v| vec![v]).collect();
        PartitionPair {
            red: Partition::from_blocks(n, 1, blocks.clone()).unwrap(),
            blue: Partition::from_blocks(n, 1, blocks).unwrap(),
        }
    }

    fn colored_path(n: usize, colors: &[&str]) -> (ColoredGraph, PartitionPair) {
        let parts = singleton_parts(n);
        let edges: Vec<(u32, u32, EdgeColors)> = colors
            .iter()
            .enumerate()
            .map(|(i, c)| (i as u32, i as u32 + 1, EdgeColors::parse(c).unwrap()))
            .collect();
        (
            ColoredGraph::from_edge_lists(n, &edges, &parts).unwrap(),
            parts,
        )
    }

    fn random_instance(
        n: usize,
        r: u32,
        p: f64,
        seed: u64,
    ) -> (ColoredGraph, PartitionPair) {
        let mut rng = StdRng::seed_from_u64(seed);
        let parts = PartitionPair::sample(n, r, &mut rng).unwrap();
        let m = n / r as usize;
        let red = blow_up(&sample_base_graph(m, p, &mut rng), &parts.red);
        let blue = blow_up(&sample_base_graph(m, p, &mut rng), &parts.blue);
        (ColoredGraph::superimpose(red, blue), parts)
    }

    #[test]
    fn alternating_path_alone_does_not_close() {
        let (g, _) = colored_path(5, &["R", "B", "R", "B"]);
        let set = closed_pairs(&g, &[0, 4], 5);
        assert!(!set.is_closed(0, 4));
        assert!(set.is_empty());
    }

    #[test]
    fn same_color_pair_closes() {
        let (g, _) = colored_path(5, &["R", "R", "B", "B"]);
        let set = closed_pairs(&g, &[0, 4], 5);
        assert!(set.is_closed(0, 4));
        let w = &set.closed[&(0, 4)];
        assert!(validate_witness(&g, w, 5));
    }

    #[test]
    fn bicolored_edge_may_serve_either_color() {
        // R,(RB),R,B admits R,R,R,B by taking the bicolored edge as red.
        let (g, _) = colored_path(5, &["R", "RB", "R", "B"]);
        let set = closed_pairs(&g, &[0, 4], 5);
        assert!(set.is_closed(0, 4));
        assert!(validate_witness(&g, &set.closed[&(0, 4)], 5));
    }

    #[test]
    fn closed_pairs_match_exhaustive_enumeration() {
        fn admits_non_alternating(g: &ColoredGraph, path: &[u32]) -> bool {
            // Reachable (last color, repeat seen) states along the fixed path.
            let mut states = vec![(Color::Red, false); 0];
            let first = g.edge_colors(path[0], path[1]);
            for c in [Color::Red, Color::Blue] {
                if first.has(c) {
                    states.push((c, false));
                }
            }
            for w in path[1..].windows(2) {
                let avail = g.edge_colors(w[0], w[1]);
                let mut next = Vec::new();
                for &(last, seen) in &states {
                    for c in [Color::Red, Color::Blue] {
                        if avail.has(c) {
                            let s = (c, seen || c == last);
                            if !next.contains(&s) {
                                next.push(s);
                            }
                        }
                    }
                }
                states = next;
            }
            states.iter().any(|&(_, seen)| seen)
        }

        for seed in 0..6 {
            let (g, _) = random_instance(24, 3, 0.22, 100 + seed);
            let union = g.union_all();
            let j: Vec<u32> = vec![0, 5, 9, 13, 20, 23];
            let set = closed_pairs(&g, &j, 5);
            for (a, &x) in j.iter().enumerate() {
                for &y in &j[a + 1..] {
                    let mut oracle = false;
                    'outer: for v1 in 0..24u32 {
                        for v2 in 0..24u32 {
                            for v3 in 0..24u32 {
                                let path = [x, v1, v2, v3, y];
                                let mut s = path.to_vec();
                                s.sort_unstable();
                                s.dedup();
                                if s.len() != 5 {
                                    continue;
                                }
                                if path
                                    .windows(2)
                                    .all(|w| union.has_edge(w[0] as usize, w[1] as usize))
                                    && admits_non_alternating(&g, &path)
                                {
                                    oracle = true;
                                    break 'outer;
                                }
                            }
                        }
                    }
                    assert_eq!(
                        set.is_closed(x, y),
                        oracle,
                        "pair ({x},{y}) seed {seed}"
                    );
                    if let Some(w) = set.closed.get(&(x.min(y), x.max(y))) {
                        assert!(validate_witness(&g, w, 5));
                    }
                }
            }
        }
    }

    #[test]
    fn closed_pairs_have_r_walk_multiplicity() {
        // A same-colored consecutive edge pair lets the shared middle vertex
        // roam its whole block, so every closed pair carries ≥ r walks.
        for seed in 0..8 {
            let (g, _) = random_instance(24, 3, 0.25, 200 + seed);
            let j: Vec<u32> = vec![1, 4, 8, 15, 16, 23];
            let set = closed_pairs(&g, &j, 5);
            for &(x, y) in set.closed.keys() {
                let walks = count_non_alternating_walks(&g, x, y, 4);
                assert!(walks >= 3, "pair ({x},{y}) has only {walks} walks");
            }
        }
    }

    #[test]
    fn walk_chain_inequalities() {
        // |C ∩ J⁽²⁾|·r ≤ ordered non-alternating walks ≤ union walks
        // ≤ dominating-operator walks.
        let mut rng = StdRng::seed_from_u64(300);
        for seed in 0..4 {
            let n = 24;
            let r = 3u32;
            let mut inner = StdRng::seed_from_u64(400 + seed);
            let parts = PartitionPair::sample(n, r, &mut inner).unwrap();
            let red_base = sample_base_graph(n / r as usize, 0.3, &mut inner);
            let blue_base = sample_base_graph(n / r as usize, 0.3, &mut inner);
            let g = ColoredGraph::superimpose(
                blow_up(&red_base, &parts.red),
                blow_up(&blue_base, &parts.blue),
            );
            let size = rng.gen_range(3..=6);
            let j: Vec<u32> = rand::seq::index::sample(&mut rng, n, size)
                .iter()
                .map(|v| v as u32)
                .collect();
            let set = closed_pairs(&g, &j, 5);
            let mut non_alt = 0u128;
            for (a, &x) in j.iter().enumerate() {
                for &y in &j[a + 1..] {
                    non_alt += 2 * count_non_alternating_walks(&g, x, y, 4);
                }
            }
            let union_walks = crate::spectral::count_walks_graph(&g.union_all(), &j, 4);
            let op = crate::spectral::dominating_operator(&red_base, &blue_base, &parts).unwrap();
            let op_walks = crate::spectral::count_walks_operator(&op, &j, 4);
            assert!(set.len() as u128 * r as u128 <= non_alt);
            assert!(non_alt <= union_walks);
            assert!(union_walks <= op_walks);
        }
    }

    #[test]
    fn representative_selection() {
        let (_, parts) = random_instance(24, 3, 0.2, 500);
        // I = one vertex per red block: projection is full.
        let i_set: Vec<u32> = (0..8).map(|b| parts.red.block(b)[0]).collect();
        let j = pick_representatives(&i_set, &parts, 0.5, 8).unwrap();
        assert_eq!(j.len(), 4);
        let mut blocks: Vec<u32> = j.iter().map(|&v| parts.red.block_of(v)).collect();
        blocks.dedup();
        assert_eq!(blocks.len(), 4, "one representative per red block");
        // Determinism.
        assert_eq!(j, pick_representatives(&i_set, &parts, 0.5, 8).unwrap());

        // I concentrated in one red and one blue block → failure.
        let red_blocks: Vec<Vec<u32>> = vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7]];
        let conc = PartitionPair {
            red: Partition::from_blocks(8, 4, red_blocks.clone()).unwrap(),
            blue: Partition::from_blocks(8, 4, red_blocks).unwrap(),
        };
        assert!(pick_representatives(&[0, 1], &conc, 1.0, 2).is_none());
    }

    #[test]
    fn exposure_split_examples() {
        // Red edge in block pair (0,1); J-pair in blocks (2,3): uncoupled,
        // so G0 keeps the red edge; the J pair is open (isolated endpoints).
        let n = 8;
        let blocks: Vec<Vec<u32>> = (0..4).map(|b| vec![2 * b, 2 * b + 1]).collect();
        let spread: Vec<Vec<u32>> = vec![vec![0, 2], vec![1, 3], vec![4, 6], vec![5, 7]];
        let parts = PartitionPair {
            red: Partition::from_blocks(n, 2, blocks).unwrap(),
            blue: Partition::from_blocks(n, 2, spread).unwrap(),
        };
        let g =
            ColoredGraph::from_edge_lists(n, &[(0, 3, EdgeColors::parse("R").unwrap())], &parts)
                .unwrap();
        let split = exposure_split(&g, &parts, &[4, 6], 5);
        assert!(split.g0.has_edge(0, 3), "uncoupled red edge stays in G0");
        assert_eq!(split.open, vec![(4, 6)], "isolated pair is open");

        // Same edge, J-pair in blocks (0,1): coupled, dropped from G0.
        let split = exposure_split(&g, &parts, &[0, 2], 5);
        assert!(!split.g0.has_edge(0, 3), "coupled red edge leaves G0");
    }

    #[test]
    fn open_pairs_match_bruteforce_cycle_check() {
        for seed in 0..5 {
            let (g, parts) = random_instance(24, 2, 0.35, 600 + seed);
            let j: Vec<u32> = vec![0, 3, 7, 11, 19];
            let split = exposure_split(&g, &parts, &j, 5);
            for (a, &x) in j.iter().enumerate() {
                for &y in &j[a + 1..] {
                    let e = (x.min(y), x.max(y));
                    let mut with_e = split.g0.clone();
                    with_e.add_edge(x as usize, y as usize);
                    let mut through = false;
                    cycles::for_each_cycle(&with_e, 5, 10_000_000, |c| {
                        let on_cycle = (0..5).any(|i| {
                            let (u, v) = (c[i], c[(i + 1) % 5]);
                            (u.min(v), u.max(v)) == e
                        });
                        if on_cycle {
                            through = true;
                            std::ops::ControlFlow::Break(())
                        } else {
                            std::ops::ControlFlow::Continue(())
                        }
                    })
                    .unwrap();
                    assert_eq!(
                        split.open.contains(&e),
                        !through,
                        "pair {e:?} seed {seed}"
                    );
                }
            }
        }
    }

    #[test]
    fn claim_holds_on_pipeline_instances() {
        use crate::cleanup::{build_orderings, edge_delete, vertex_delete, DeletionReport};
        for seed in 0..4 {
            let (mut g, parts) = random_instance(24, 2, 0.3, 700 + seed);
            let g_pre = g.clone();
            let mut report = DeletionReport::default();
            vertex_delete(&mut g, &parts, 5, &mut report);
            let (red_ord, blue_ord) = build_orderings(&parts);
            edge_delete(&mut g, &red_ord, &blue_ord, 5, 10_000_000, &mut report).unwrap();
            let alive: Vec<u32> = (0..24u32).filter(|&v| g.is_alive(v)).collect();
            if alive.len() < 4 {
                continue;
            }
            let j: Vec<u32> = alive.iter().step_by(alive.len() / 4).copied().take(4).collect();
            let report = check_claim(&g_pre, &parts, &j, 5, g.red());
            assert!(report.holds, "claim failed on seed {seed}: {report:?}");
        }
    }

    #[test]
    fn claim_contrapositive_probe() {
        // Hand-built instance with e ∈ O ∩ G′_R: the pipeline must keep e in
        // the final red graph, so J is not independent and the implication
        // holds with a false premise.
        use crate::cleanup::{build_orderings, edge_delete, vertex_delete, DeletionReport};
        let n = 8;
        let red_blocks: Vec<Vec<u32>> = vec![vec![0, 1], vec![2, 3], vec![4, 5], vec![6, 7]];
        let blue_blocks: Vec<Vec<u32>> = vec![vec![0, 4], vec![1, 5], vec![2, 6], vec![3, 7]];
        let parts = PartitionPair {
            red: Partition::from_blocks(n, 2, red_blocks).unwrap(),
            blue: Partition::from_blocks(n, 2, blue_blocks).unwrap(),
        };
        let edges: Vec<(u32, u32, EdgeColors)> = [(0, 2), (0, 3), (1, 2), (1, 3)]
            .iter()
            .map(|&(u, v)| (u, v, EdgeColors::parse("R").unwrap()))
            .collect();
        let mut g = ColoredGraph::from_edge_lists(n, &edges, &parts).unwrap();
        let g_pre = g.clone();
        let j = vec![0, 2];

        let split = exposure_split(&g_pre, &parts, &j, 5);
        assert!(split.open.contains(&(0, 2)), "e must be open");
        assert!(g_pre.red().has_edge(0, 2), "e must be a red edge of G′");

        let mut report = DeletionReport::default();
        vertex_delete(&mut g, &parts, 5, &mut report);
        assert!(g.is_alive(0) && g.is_alive(2), "no broken cycle dooms J");
        let (red_ord, blue_ord) = build_orderings(&parts);
        edge_delete(&mut g, &red_ord, &blue_ord, 5, 10_000_000, &mut report).unwrap();
        assert!(g.red().has_edge(0, 2), "e survives to the final red graph");

        let report = check_claim(&g_pre, &parts, &j, 5, g.red());
        assert!(!report.premise_independent);
        assert!(report.holds);
    }

    #[test]
    fn search_on_empty_graph_returns_target() {
        let g = BitGraph::new(30);
        let universe: Vec<u32> = (0..30).collect();
        let found = independent_set_search(&g, &universe, 10, 4, 1);
        assert_eq!(found.len(), 10);
    }

    #[test]
    fn search_finds_pair_in_c5() {
        let mut g = BitGraph::new(5);
        for v in 0..5 {
            g.add_edge(v, (v + 1) % 5);
        }
        let found = independent_set_search(&g, &[0, 1, 2, 3, 4], 2, 8, 2);
        assert_eq!(found.len(), 2);
        assert!(!g.has_edge(found[0] as usize, found[1] as usize));
    }

    #[test]
    fn search_never_beats_exact() {
        let mut rng = StdRng::seed_from_u64(800);
        for _ in 0..6 {
            let g = sample_base_graph(40, 0.15, &mut rng);
            let universe: Vec<u32> = (0..40).collect();
            let found = independent_set_search(&g, &universe, 40, 24, 3);
            let exact = alpha_exact(&g).unwrap();
            assert!(found.len() as u32 <= exact);
            assert!(found.len() as u32 + 3 >= exact, "search far from optimum");
        }
    }

    #[test]
    fn alpha_exact_examples() {
        let mut c5 = BitGraph::new(5);
        for v in 0..5 {
            c5.add_edge(v, (v + 1) % 5);
        }
        assert_eq!(alpha_exact(&c5).unwrap(), 2);

        let mut petersen = BitGraph::new(10);
        for i in 0..5 {
            petersen.add_edge(i, (i + 1) % 5);
            petersen.add_edge(i, i + 5);
            petersen.add_edge(5 + i, 5 + (i + 2) % 5);
        }
        assert_eq!(alpha_exact(&petersen).unwrap(), 4);

        assert_eq!(alpha_exact(&BitGraph::new(17)).unwrap(), 17);
        assert!(alpha_exact(&BitGraph::new(201)).is_err());
    }

    #[test]
    fn alpha_exact_matches_recursion_oracle() {
        fn alpha_rec(g: &BitGraph, mask: &Bits) -> u32 {
            let pick = (0..g.n()).find(|&v| {
                mask.get(v) && g.row(v).intersection_count(mask) > 0
            });
            match pick {
                None => mask.count() as u32,
                Some(v) => {
                    let mut without = mask.clone();
                    without.clear(v);
                    let skip = alpha_rec(g, &without);
                    let mut closed = without;
                    closed.and_not_assign(g.row(v));
                    skip.max(1 + alpha_rec(g, &closed))
                }
            }
        }
        let mut rng = StdRng::seed_from_u64(900);
        for _ in 0..10 {
            let g = sample_base_graph(14, 0.3, &mut rng);
            let mask = Bits::full(14);
            assert_eq!(alpha_exact(&g).unwrap(), alpha_rec(&g, &mask));
        }
    }

    #[test]
    fn baseline_is_cycle_free() {
        for seed in 0..4 {
            let out = baseline_construction(120, 5, seed, 100_000_000).unwrap();
            assert_eq!(cycles::count_cycles(&out.graph, 5, 100_000_000).unwrap(), 0);
            assert!(out.edges_removed <= out.cycles_found);
            let expect_p = 0.5 * (120f64).powf(-0.75);
            assert!((out.p - expect_p).abs() < 1e-15);
        }
    }

    #[test]
    fn baseline_cycle_count_matches_first_moment() {
        // E[#C5] = C(n,5)·(5−1)!/2·p⁵; compare the Monte-Carlo mean at
        // n = 2000 against 3 estimated standard errors.
        let n = 2000u64;
        let trials = 12;
        let p = 0.5 * (n as f64).powf(-0.75);
        let expect = (0..5).map(|i| (n - i) as f64).product::<f64>() / 120.0 * 12.0 * p.powi(5);
        let counts: Vec<f64> = (0..trials)
            .map(|s| {
                baseline_construction(n as usize, 5, 1000 + s, 2_000_000_000)
                    .unwrap()
                    .cycles_found as f64
            })
            .collect();
        let mean = counts.iter().sum::<f64>() / trials as f64;
        let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
        let se = (var / trials as f64).sqrt();
        assert!(
            (mean - expect).abs() <= 3.0 * se.max(1.0),
            "mean {mean} vs expectation {expect} (se {se})"
        );
    }

    #[test]
    fn probability_bound_examples() {
        use crate::params::{derive_params, Mode, Overrides};
        let params = |n: u64, p: f64, k: u64, delta: f64| {
            derive_params(
                5,
                n,
                Mode::Operational,
                &Overrides {
                    p: Some(p),
                    r: Some(1),
                    k: Some(k),
                    delta: Some(delta),
                },
            )
            .unwrap()
        };
        // δk = 2, p = 1/2 → per-set bound (1/2)¹.
        let b = ind_set_probability_bound(&params(16, 0.5, 4, 0.5));
        assert!((b.per_set_log - 0.5f64.ln()).abs() < 1e-15);
        // p → 0 → bound → 1 (log → 0).
        let b = ind_set_probability_bound(&params(16, 1e-12, 4, 0.5));
        assert!(b.per_set_log.abs() < 1e-11);
        // Union term is below its analytic envelope.
        let b = ind_set_probability_bound(&params(1024, 0.1, 64, 0.5));
        assert!(b.union_log <= b.envelope_log);
        // When pδ²k reaches 8·ln n the envelope goes negative.
        let ln_n = (1024f64).ln();
        let k = (8.0 * ln_n / (0.1 * 0.25)).ceil() as u64;
        let b = ind_set_probability_bound(&params(1024, 0.1, k, 0.5));
        assert!(b.envelope_log < 0.0, "envelope {}", b.envelope_log);
    }

    #[test]
    fn ln_choose_matches_direct_computation() {
        assert!((ln_choose(10, 3) - 120f64.ln()).abs() < 1e-12);
        assert!((ln_choose(52, 5) - 2_598_960f64.ln()).abs() < 1e-10);
        assert_eq!(ln_choose(5, 0), 0.0);
        assert_eq!(ln_choose(3, 5), f64::NEG_INFINITY);
    }

    #[test]
    fn summary_round_trips_through_json() {
        let s = IndependenceSummary {
            closed_pairs: 3,
            open_pairs: 7,
            best_found_set: 11,
            alpha_exact: None,
            bound_log: -4.25,
        };
        let text = serde_json::to_string(&s).unwrap();
        assert!(!text.contains("alphaExact"));
        assert_eq!(serde_json::from_str::<IndependenceSummary>(&text).unwrap(), s);
    }
}
