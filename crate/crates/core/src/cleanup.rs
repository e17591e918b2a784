//! The two deletion steps that remove every short odd cycle.
//!
//! *Vertex deletion* finds all bad broken cycles — cyclic sequences mixing
//! actual edges of the superimposed graph with block jumps, of length
//! 2 ≤ t ≤ ℓ−1, odd actual count, whose actual edges are simple — and kills
//! the union of their vertex sets. *Edge deletion* then enumerates the
//! surviving length-ℓ cycles and removes, per cycle and per consistent
//! edge-coloring, the maximal edge in a block-consecutive ordering, chosen by
//! the apex rule. `kink_reduce` is the constructive reduction from a
//! non-simple length-ℓ cycle to a bad broken cycle inside its vertex set.

use crate::bitset::{BitGraph, Bits};
use crate::cycles::{for_each_cycle, CycleError};
use crate::model::{is_simple, Color, ColoredGraph, Partition, PartitionPair};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::ops::ControlFlow;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CleanupError {
    #[error("kink reduction requires a non-simple input cycle")]
    InputSimple,
    #[error(transparent)]
    Cycles(#[from] CycleError),
}

/// Kind of one step of a broken cycle.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum EdgeKind {
    /// The two endpoints are joined by an edge of the superimposed graph.
    Actual,
    /// The two endpoints share a red block or a blue block.
    Broken,
}

/// Cyclic vertex sequence with a kind for each consecutive position
/// (position `i` joins `vertices[i]` to `vertices[(i+1) % t]`).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BrokenCycle {
    pub vertices: Vec<u32>,
    pub kinds: Vec<EdgeKind>,
}

impl BrokenCycle {
    pub fn t(&self) -> usize {
        self.vertices.len()
    }

    pub fn actual_count(&self) -> usize {
        self.kinds.iter().filter(|&&k| k == EdgeKind::Actual).count()
    }

    /// The actual edges, one per `Actual` position, endpoints unnormalized.
    pub fn actual_edges(&self) -> Vec<(u32, u32)> {
        let t = self.t();
        (0..t)
            .filter(|&i| self.kinds[i] == EdgeKind::Actual)
            .map(|i| (self.vertices[i], self.vertices[(i + 1) % t]))
            .collect()
    }

    /// Simplicity of the actual edge set.
    pub fn is_simple(&self, parts: &PartitionPair) -> bool {
        is_simple(&self.actual_edges(), parts)
    }

    /// Structural validity: distinct vertices, t ≥ 2, kinds aligned with the
    /// graph and partitions, at least one actual edge.
    pub fn is_valid(&self, g: &ColoredGraph, parts: &PartitionPair) -> bool {
        let t = self.t();
        if t < 2 || self.kinds.len() != t || self.actual_count() == 0 {
            return false;
        }
        let mut sorted = self.vertices.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != t {
            return false;
        }
        (0..t).all(|i| {
            let (u, v) = (self.vertices[i], self.vertices[(i + 1) % t]);
            match self.kinds[i] {
                EdgeKind::Actual => g.has_any_edge(u, v),
                EdgeKind::Broken => parts.share_any_block(u, v),
            }
        })
    }
}

/// Counters filled by the two deletion stages.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DeletionReport {
    pub bad_broken_cycles: u64,
    pub vertices_deleted: u64,
    pub cycles_found: u64,
    pub edges_deleted: u64,
    /// Broken-cycle counts keyed by (length t, actual count a).
    #[serde(with = "ta_histogram")]
    pub histogram: BTreeMap<(u32, u32), u64>,
}

mod ta_histogram {
    use serde::de::Error as DeError;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use std::collections::BTreeMap;

    pub fn serialize<S: Serializer>(
        map: &BTreeMap<(u32, u32), u64>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        let keyed: BTreeMap<String, u64> =
            map.iter().map(|(&(t, a), &c)| (format!("{t},{a}"), c)).collect();
        keyed.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<BTreeMap<(u32, u32), u64>, D::Error> {
        let keyed = BTreeMap::<String, u64>::deserialize(d)?;
        keyed
            .into_iter()
            .map(|(k, v)| {
                let (t, a) = k
                    .split_once(',')
                    .ok_or_else(|| D::Error::custom("histogram key must look like \"t,a\""))?;
                Ok((
                    (
                        t.trim().parse().map_err(D::Error::custom)?,
                        a.trim().parse().map_err(D::Error::custom)?,
                    ),
                    v,
                ))
            })
            .collect()
    }
}

fn cross_key(part: &Partition, u: u32, v: u32) -> Option<(u32, u32)> {
    let (a, b) = (part.block_of(u), part.block_of(v));
    if a == b {
        None
    } else {
        Some((a.min(b), a.max(b)))
    }
}

struct BrokenDfs<'a, F> {
    union: &'a BitGraph,
    parts: &'a PartitionPair,
    mates: &'a [Vec<u32>],
    max_t: usize,
    path: Vec<u32>,
    kinds: Vec<EdgeKind>,
    in_path: Vec<bool>,
    used_red: Vec<(u32, u32)>,
    used_blue: Vec<(u32, u32)>,
    on_cycle: F,
}

impl<'a, F: FnMut(&BrokenCycle)> BrokenDfs<'a, F> {
    /// Reject actual edges whose cross pair is already occupied; record new
    /// occupancy and report what was pushed so the caller can pop it.
    fn push_actual_pairs(&mut self, u: u32, v: u32) -> Option<(bool, bool)> {
        let rk = cross_key(&self.parts.red, u, v);
        let bk = cross_key(&self.parts.blue, u, v);
        if rk.map_or(false, |k| self.used_red.contains(&k))
            || bk.map_or(false, |k| self.used_blue.contains(&k))
        {
            return None;
        }
        if let Some(k) = rk {
            self.used_red.push(k);
        }
        if let Some(k) = bk {
            self.used_blue.push(k);
        }
        Some((rk.is_some(), bk.is_some()))
    }

    fn pop_actual_pairs(&mut self, pushed: (bool, bool)) {
        if pushed.0 {
            self.used_red.pop();
        }
        if pushed.1 {
            self.used_blue.pop();
        }
    }

    fn maybe_emit(&mut self, closing: EdgeKind) {
        let t = self.path.len();
        // Reflection canonicalization: for t ≥ 3 the vertex direction decides;
        // for t = 2 both directions share the vertices and the kinds decide.
        let canonical = if t == 2 {
            self.kinds[0] <= closing
        } else {
            self.path[1] < self.path[t - 1]
        };
        if !canonical {
            return;
        }
        let actual = self.actual_depth() + (closing == EdgeKind::Actual) as usize;
        if actual % 2 == 1 {
            self.kinds.push(closing);
            let bc = BrokenCycle {
                vertices: self.path.clone(),
                kinds: self.kinds.clone(),
            };
            (self.on_cycle)(&bc);
            self.kinds.pop();
        }
    }

    fn actual_depth(&self) -> usize {
        self.kinds.iter().filter(|&&k| k == EdgeKind::Actual).count()
    }

    fn go(&mut self) {
        let t = self.path.len();
        let anchor = self.path[0];
        let last = *self.path.last().expect("path never empty");
        if t >= 2 {
            if self.union.has_edge(last as usize, anchor as usize) {
                let rk = cross_key(&self.parts.red, last, anchor);
                let bk = cross_key(&self.parts.blue, last, anchor);
                let collides = rk.map_or(false, |k| self.used_red.contains(&k))
                    || bk.map_or(false, |k| self.used_blue.contains(&k));
                if !collides {
                    self.maybe_emit(EdgeKind::Actual);
                }
            }
            if self.parts.share_any_block(last, anchor) {
                self.maybe_emit(EdgeKind::Broken);
            }
        }
        if t >= self.max_t {
            return;
        }
        let union = self.union;
        for v in union.neighbors(last as usize) {
            if v as u32 <= anchor || self.in_path[v] {
                continue;
            }
            let Some(pushed) = self.push_actual_pairs(last, v as u32) else {
                continue;
            };
            self.path.push(v as u32);
            self.kinds.push(EdgeKind::Actual);
            self.in_path[v] = true;
            self.go();
            self.in_path[v] = false;
            self.kinds.pop();
            self.path.pop();
            self.pop_actual_pairs(pushed);
        }
        let mates = self.mates;
        for &v in &mates[last as usize] {
            if v <= anchor || self.in_path[v as usize] {
                continue;
            }
            self.path.push(v);
            self.kinds.push(EdgeKind::Broken);
            self.in_path[v as usize] = true;
            self.go();
            self.in_path[v as usize] = false;
            self.kinds.pop();
            self.path.pop();
        }
    }
}

/// Visit every bad broken cycle (2 ≤ t ≤ ℓ−1, odd actual count, simple
/// actual edges) exactly once, in canonical form: anchored at its minimum
/// vertex with the traversal direction fixed.
pub fn for_each_bad_broken_cycle(
    g: &ColoredGraph,
    parts: &PartitionPair,
    ell: u32,
    mut on_cycle: impl FnMut(&BrokenCycle),
) {
    let union = g.union_all();
    let n = g.n();
    let mut mates = vec![Vec::new(); n];
    for v in 0..n as u32 {
        let mut out = Vec::new();
        parts.block_mates(v, &mut out);
        mates[v as usize] = out;
    }
    let mut dfs = BrokenDfs {
        union: &union,
        parts,
        mates: &mates,
        max_t: (ell - 1) as usize,
        path: Vec::new(),
        kinds: Vec::new(),
        in_path: vec![false; n],
        used_red: Vec::new(),
        used_blue: Vec::new(),
        on_cycle: &mut on_cycle,
    };
    for a in 0..n as u32 {
        dfs.path.clear();
        dfs.path.push(a);
        dfs.in_path[a as usize] = true;
        dfs.go();
        dfs.in_path[a as usize] = false;
    }
}

/// All bad broken cycles, collected.
pub fn enumerate_bad_broken_cycles(
    g: &ColoredGraph,
    parts: &PartitionPair,
    ell: u32,
) -> Vec<BrokenCycle> {
    let mut out = Vec::new();
    for_each_bad_broken_cycle(g, parts, ell, |bc| out.push(bc.clone()));
    out
}

/// Kill the union of the vertex sets of all bad broken cycles, in one pass
/// against the frozen input graph.
pub fn vertex_delete(
    g: &mut ColoredGraph,
    parts: &PartitionPair,
    ell: u32,
    report: &mut DeletionReport,
) {
    assert_eq!(g.alive_count(), g.n(), "vertex deletion expects a fresh graph");
    let mut doomed = Bits::new(g.n());
    for_each_bad_broken_cycle(g, parts, ell, |bc| {
        report.bad_broken_cycles += 1;
        *report
            .histogram
            .entry((bc.t() as u32, bc.actual_count() as u32))
            .or_default() += 1;
        for &v in &bc.vertices {
            doomed.set(v as usize);
        }
    });
    for v in doomed.iter() {
        g.kill(v as u32);
    }
    report.vertices_deleted = doomed.count() as u64;
}

/// Reduce a non-simple length-ℓ cycle to a bad broken cycle on a subset of
/// its vertices: splice kinks, then repeatedly cut at a disjoint coupled edge
/// pair, keeping an odd-actual-count closure.
pub fn kink_reduce(
    cycle: &[u32],
    g: &ColoredGraph,
    parts: &PartitionPair,
) -> Result<BrokenCycle, CleanupError> {
    let t0 = cycle.len();
    let edges: Vec<(u32, u32)> = (0..t0).map(|i| (cycle[i], cycle[(i + 1) % t0])).collect();
    if is_simple(&edges, parts) {
        return Err(CleanupError::InputSimple);
    }
    debug_assert!(edges.iter().all(|&(u, v)| g.has_any_edge(u, v)));
    let mut verts = cycle.to_vec();
    let mut kinds = vec![EdgeKind::Actual; t0];
    loop {
        splice_kinks(&mut verts, &mut kinds, parts);
        let bc = BrokenCycle {
            vertices: verts.clone(),
            kinds: kinds.clone(),
        };
        if bc.is_simple(parts) {
            debug_assert!(bc.actual_count() % 2 == 1);
            debug_assert!(bc.is_valid(g, parts));
            return Ok(bc);
        }
        observation_step(&mut verts, &mut kinds, parts);
    }
}

/// Phase 1 of the reduction: while two consecutive actual edges lie in one
/// block pair of some color, drop the shared middle vertex and join its
/// neighbors by a broken edge (both sit in the pair's far block).
fn splice_kinks(verts: &mut Vec<u32>, kinds: &mut Vec<EdgeKind>, parts: &PartitionPair) {
    'scan: loop {
        let t = verts.len();
        if t < 3 {
            return;
        }
        for i in 0..t {
            let j = (i + 1) % t;
            if kinds[i] != EdgeKind::Actual || kinds[j] != EdgeKind::Actual {
                continue;
            }
            let (x1, y, x2) = (verts[i], verts[j], verts[(j + 1) % t]);
            let kinked = [&parts.red, &parts.blue].iter().any(|part| {
                part.block_of(x1) == part.block_of(x2) && part.block_of(x1) != part.block_of(y)
            });
            if !kinked {
                continue;
            }
            if j == 0 {
                // Rotate so the kink does not wrap, then splice at the end.
                verts.rotate_left(1);
                kinds.rotate_left(1);
                kinds[t - 2] = EdgeKind::Broken;
                verts.remove(t - 1);
                kinds.remove(t - 1);
            } else {
                kinds[i] = EdgeKind::Broken;
                verts.remove(j);
                kinds.remove(j);
            }
            continue 'scan;
        }
        return;
    }
}

/// Phase 2: cut the cycle at two disjoint actual edges sharing a block pair
/// and close one of the arcs with a broken edge, choosing the valid closure
/// with the smallest odd actual count. Strictly decreases the actual count.
fn observation_step(verts: &mut Vec<u32>, kinds: &mut Vec<EdgeKind>, parts: &PartitionPair) {
    let t = verts.len();
    let mut found = None;
    'find: for i in 0..t {
        if kinds[i] != EdgeKind::Actual {
            continue;
        }
        let e = (verts[i], verts[(i + 1) % t]);
        for j in (i + 1)..t {
            if kinds[j] != EdgeKind::Actual {
                continue;
            }
            let f = (verts[j], verts[(j + 1) % t]);
            if e.0 == f.0 || e.0 == f.1 || e.1 == f.0 || e.1 == f.1 {
                continue;
            }
            for part in [&parts.red, &parts.blue] {
                let (ek, fk) = (cross_key(part, e.0, e.1), cross_key(part, f.0, f.1));
                if ek.is_some() && ek == fk {
                    found = Some((i, j));
                    break 'find;
                }
            }
        }
    }
    let (i, j) = found.expect("a non-simple kink-free broken cycle has a disjoint coupled pair");
    let current_actual = kinds.iter().filter(|&&k| k == EdgeKind::Actual).count();

    // Arc 1 runs from verts[i+1] to verts[j]; arc 2 from verts[j+1] around to
    // verts[i]. The cut edges may optionally be kept on either end of an arc;
    // the closing edge is always broken.
    let arc1: Vec<usize> = (i + 1..=j).collect();
    let arc2: Vec<usize> = (j + 1..t).chain(0..=i).collect();
    let mut best: Option<(usize, Vec<u32>, Vec<EdgeKind>)> = None;
    let mut consider = |front: Option<u32>, arc: &[usize], back: Option<u32>| {
        let mut vs: Vec<u32> = Vec::with_capacity(arc.len() + 2);
        let mut ks: Vec<EdgeKind> = Vec::with_capacity(arc.len() + 2);
        if let Some(v) = front {
            vs.push(v);
            ks.push(EdgeKind::Actual);
        }
        for (pos, &idx) in arc.iter().enumerate() {
            vs.push(verts[idx]);
            if pos + 1 < arc.len() {
                ks.push(kinds[idx]);
            }
        }
        if let Some(v) = back {
            ks.push(EdgeKind::Actual);
            vs.push(v);
        }
        let (first, last) = (vs[0], *vs.last().expect("arc never empty"));
        if vs.len() < 2 || !parts.share_any_block(last, first) {
            return;
        }
        ks.push(EdgeKind::Broken);
        let actual = ks.iter().filter(|&&k| k == EdgeKind::Actual).count();
        if actual % 2 == 0 || actual >= current_actual {
            return;
        }
        if best.as_ref().map_or(true, |(a, _, _)| actual < *a) {
            best = Some((actual, vs, ks));
        }
    };
    let (x, y) = (verts[i], verts[(i + 1) % t]);
    let (u, w) = (verts[j], verts[(j + 1) % t]);
    debug_assert_eq!(arc1.first().map(|&k| verts[k]), Some(y));
    debug_assert_eq!(arc1.last().map(|&k| verts[k]), Some(u));
    debug_assert_eq!(arc2.first().map(|&k| verts[k]), Some(w));
    debug_assert_eq!(arc2.last().map(|&k| verts[k]), Some(x));
    consider(None, &arc1, None);
    consider(Some(x), &arc1, None);
    consider(None, &arc1, Some(w));
    consider(Some(x), &arc1, Some(w));
    consider(None, &arc2, None);
    consider(Some(u), &arc2, None);
    consider(None, &arc2, Some(y));
    consider(Some(u), &arc2, Some(y));
    let (_, vs, ks) = best.expect("parity forces an odd closure among the arc candidates");
    *verts = vs;
    *kinds = ks;
}

/// Brute-force reference search: does any bad broken cycle (t ≤ `max_t`) live
/// entirely inside `within`? Exhaustive over vertex sequences and kind
/// vectors; intended for tests and small vertex sets.
pub fn brute_force_bad_broken_cycle_within(
    g: &ColoredGraph,
    parts: &PartitionPair,
    within: &[u32],
    max_t: usize,
) -> bool {
    fn search(
        g: &ColoredGraph,
        parts: &PartitionPair,
        pool: &[u32],
        seq: &mut Vec<u32>,
        max_t: usize,
    ) -> bool {
        let t = seq.len();
        if t >= 2 && check_all_kind_vectors(g, parts, seq) {
            return true;
        }
        if t == max_t {
            return false;
        }
        for &v in pool {
            if seq.contains(&v) || (t > 0 && v < seq[0]) {
                continue;
            }
            seq.push(v);
            if search(g, parts, pool, seq, max_t) {
                return true;
            }
            seq.pop();
        }
        false
    }

    fn check_all_kind_vectors(g: &ColoredGraph, parts: &PartitionPair, seq: &[u32]) -> bool {
        let t = seq.len();
        'mask: for mask in 0u32..(1 << t) {
            let kinds: Vec<EdgeKind> = (0..t)
                .map(|i| {
                    if mask >> i & 1 == 1 {
                        EdgeKind::Actual
                    } else {
                        EdgeKind::Broken
                    }
                })
                .collect();
            if mask.count_ones() % 2 == 0 || mask == 0 {
                continue;
            }
            for i in 0..t {
                let (u, v) = (seq[i], seq[(i + 1) % t]);
                let ok = match kinds[i] {
                    EdgeKind::Actual => g.has_any_edge(u, v),
                    EdgeKind::Broken => parts.share_any_block(u, v),
                };
                if !ok {
                    continue 'mask;
                }
            }
            let bc = BrokenCycle {
                vertices: seq.to_vec(),
                kinds,
            };
            if bc.is_simple(parts) {
                return true;
            }
        }
        false
    }

    let mut seq = Vec::new();
    search(g, parts, within, &mut seq, max_t)
}

/// A total order on all C(n,2) vertex pairs in which the pairs crossing each
/// block pair of the underlying partition occupy a contiguous rank interval;
/// pairs inside a single block form a trailing segment.
#[derive(Clone, Debug)]
pub struct EdgeOrdering {
    part: Partition,
}

impl EdgeOrdering {
    pub fn new(part: &Partition) -> EdgeOrdering {
        EdgeOrdering { part: part.clone() }
    }

    /// Rank in {1, …, C(n,2)}; bijective over unordered pairs.
    pub fn rank(&self, u: u32, v: u32) -> u64 {
        assert_ne!(u, v, "rank is defined on unordered pairs of distinct vertices");
        let (u, v) = (u.min(v), u.max(v));
        let r = self.part.r() as u64;
        let b = self.part.block_count() as u64;
        let (bu, bv) = (self.part.block_of(u), self.part.block_of(v));
        if bu == bv {
            let base = b * (b - 1) / 2 * r * r;
            let block = self.part.block(bu);
            let mut local = 0u64;
            let mut found = None;
            for (s, &a) in block.iter().enumerate() {
                for &c in &block[s + 1..] {
                    if (a, c) == (u, v) {
                        found = Some(local);
                    }
                    local += 1;
                }
            }
            base
                + bu as u64 * (r * (r - 1) / 2)
                + found.expect("pair lies in its own block")
                + 1
        } else {
            let (i, j) = (bu.min(bv) as u64, bu.max(bv) as u64);
            let pair_index = i * b - i * (i + 1) / 2 + (j - i - 1);
            let mut pairs: Vec<(u32, u32)> = Vec::with_capacity((r * r) as usize);
            for &a in self.part.block(i as u32) {
                for &c in self.part.block(j as u32) {
                    pairs.push((a.min(c), a.max(c)));
                }
            }
            pairs.sort_unstable();
            let local = pairs
                .iter()
                .position(|&pr| pr == (u, v))
                .expect("pair belongs to its block pair") as u64;
            pair_index * r * r + local + 1
        }
    }

    pub fn max_rank(&self) -> u64 {
        let n = self.part.n() as u64;
        n * (n - 1) / 2
    }
}

/// The red and blue orderings; deterministic in the partitions.
pub fn build_orderings(parts: &PartitionPair) -> (EdgeOrdering, EdgeOrdering) {
    (EdgeOrdering::new(&parts.red), EdgeOrdering::new(&parts.blue))
}

/// How a cycle relates to one consistent single-color edge assignment.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ApexClass {
    MonoRed,
    MonoBlue,
    RedApex,
    BlueApex,
}

#[derive(Clone, Debug)]
pub struct ApexInfo {
    pub apex: u32,
    pub class: ApexClass,
    pub coloring: Vec<Color>,
}

/// All single-color assignments consistent with the per-edge color sets of
/// the cycle (bicolored edges branch; each edge must carry ≥ 1 color).
pub fn consistent_colorings(cycle: &[u32], g: &ColoredGraph) -> Vec<Vec<Color>> {
    let ell = cycle.len();
    let choices: Vec<Vec<Color>> = (0..ell)
        .map(|i| {
            let colors = g.edge_colors(cycle[i], cycle[(i + 1) % ell]);
            debug_assert!(colors.any(), "every cycle edge must be present");
            let mut c = Vec::new();
            if colors.red {
                c.push(Color::Red);
            }
            if colors.blue {
                c.push(Color::Blue);
            }
            c
        })
        .collect();
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(ell);
    fn rec(choices: &[Vec<Color>], cur: &mut Vec<Color>, out: &mut Vec<Vec<Color>>) {
        if cur.len() == choices.len() {
            out.push(cur.clone());
            return;
        }
        for &c in &choices[cur.len()] {
            cur.push(c);
            rec(choices, cur, out);
            cur.pop();
        }
    }
    rec(&choices, &mut cur, &mut out);
    out
}

/// Apex of the cycle under one coloring: the largest vertex whose two
/// incident cycle edges carry the same color. Always exists for odd cycles.
pub fn apex_for_coloring(cycle: &[u32], coloring: &[Color]) -> ApexInfo {
    let ell = cycle.len();
    assert_eq!(coloring.len(), ell);
    let mut apex: Option<(u32, Color)> = None;
    for i in 0..ell {
        let prev = coloring[(i + ell - 1) % ell];
        if prev == coloring[i] {
            let v = cycle[i];
            if apex.map_or(true, |(a, _)| v > a) {
                apex = Some((v, coloring[i]));
            }
        }
    }
    let (apex, apex_color) =
        apex.expect("an odd cycle cannot be properly 2-edge-colored, so an apex exists");
    let mono = coloring.iter().all(|&c| c == coloring[0]);
    let class = match (mono, apex_color) {
        (true, Color::Red) => ApexClass::MonoRed,
        (true, Color::Blue) => ApexClass::MonoBlue,
        (false, Color::Red) => ApexClass::RedApex,
        (false, Color::Blue) => ApexClass::BlueApex,
    };
    ApexInfo {
        apex,
        class,
        coloring: coloring.to_vec(),
    }
}

/// The edge deleted for one (cycle, coloring): mono cycles lose their
/// rank-maximal edge in the matching ordering; an apex of one color selects
/// the rank-maximal edge of the *other* color in that color's ordering.
pub fn select_deletion_edge(
    cycle: &[u32],
    info: &ApexInfo,
    red: &EdgeOrdering,
    blue: &EdgeOrdering,
) -> (u32, u32) {
    let ell = cycle.len();
    let edge = |i: usize| {
        let (u, v) = (cycle[i], cycle[(i + 1) % ell]);
        (u.min(v), u.max(v))
    };
    let best = |want: Option<Color>, ord: &EdgeOrdering| {
        (0..ell)
            .filter(|&i| want.map_or(true, |c| info.coloring[i] == c))
            .map(|i| (ord.rank(cycle[i], cycle[(i + 1) % ell]), edge(i)))
            .max()
            .expect("a non-mono cycle has edges of both colors")
            .1
    };
    match info.class {
        ApexClass::MonoRed => best(None, red),
        ApexClass::MonoBlue => best(None, blue),
        ApexClass::RedApex => best(Some(Color::Blue), blue),
        ApexClass::BlueApex => best(Some(Color::Red), red),
    }
}

/// One-pass edge deletion: enumerate every length-ℓ cycle among live
/// vertices, apply the apex rule per consistent coloring, and remove the
/// union of all selected edges from both color classes.
pub fn edge_delete(
    g: &mut ColoredGraph,
    red: &EdgeOrdering,
    blue: &EdgeOrdering,
    ell: u32,
    cap: u64,
    report: &mut DeletionReport,
) -> Result<(), CleanupError> {
    let union = g.union_alive();
    let mut selected: BTreeSet<(u32, u32)> = BTreeSet::new();
    let frozen: &ColoredGraph = g;
    let count = for_each_cycle(&union, ell as usize, cap, |cycle| {
        for coloring in consistent_colorings(cycle, frozen) {
            let info = apex_for_coloring(cycle, &coloring);
            selected.insert(select_deletion_edge(cycle, &info, red, blue));
        }
        ControlFlow::Continue(())
    })?;
    report.cycles_found = count;
    report.edges_deleted = selected.len() as u64;
    for &(u, v) in &selected {
        g.remove_edge(u, v);
    }
    Ok(())
}
