//! Random blown-up graph model.
//!
//! An instance is built from two independent uniform partitions of `[n]` into
//! blocks of size `r` (the *red* and *blue* partitions) and two independent
//! base graphs sampled from G(n/r, p). Each base graph is blown up by
//! replacing every base vertex with its block and every base edge with the
//! complete bipartite graph between the two blocks; the two blow-ups are then
//! superimposed, keeping per-edge color sets.

use crate::bitset::{BitGraph, Bits};
use rand::distributions::{Bernoulli, Distribution};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("block size {r} must be at least 1 and divide n = {n}")]
    BadBlockSize { r: u32, n: usize },
    #[error("edge ({u}, {v}) lies inside a single {color} block")]
    IntraBlockEdge { u: u32, v: u32, color: &'static str },
    #[error("vertex {0} out of range")]
    VertexOutOfRange(u32),
    #[error("graph is not an exact blow-up: block pair ({i}, {j}) is partially filled")]
    NotABlowUp { i: u32, j: u32 },
}

/// One of the two partition colors.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Red,
    Blue,
}

impl Color {
    pub fn flip(self) -> Color {
        match self {
            Color::Red => Color::Blue,
            Color::Blue => Color::Red,
        }
    }
}

/// Color set carried by one superimposed edge.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct EdgeColors {
    pub red: bool,
    pub blue: bool,
}

impl EdgeColors {
    pub fn any(self) -> bool {
        self.red || self.blue
    }

    pub fn both(self) -> bool {
        self.red && self.blue
    }

    pub fn has(self, color: Color) -> bool {
        match color {
            Color::Red => self.red,
            Color::Blue => self.blue,
        }
    }

    pub fn as_str(self) -> &'static str {
        match (self.red, self.blue) {
            (true, true) => "RB",
            (true, false) => "R",
            (false, true) => "B",
            (false, false) => "-",
        }
    }

    pub fn parse(s: &str) -> Option<EdgeColors> {
        match s {
            "R" => Some(EdgeColors { red: true, blue: false }),
            "B" => Some(EdgeColors { red: false, blue: true }),
            "RB" => Some(EdgeColors { red: true, blue: true }),
            _ => None,
        }
    }
}

/// A partition of `[n]` into `n/r` blocks of size exactly `r`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Partition {
    r: u32,
    blocks: Vec<Vec<u32>>,
    block_of: Vec<u32>,
}

impl Partition {
    /// Build from explicit blocks; validates sizes and coverage.
    pub fn from_blocks(n: usize, r: u32, blocks: Vec<Vec<u32>>) -> Result<Partition, ModelError> {
        if r == 0 || n % r as usize != 0 || blocks.len() != n / r as usize {
            return Err(ModelError::BadBlockSize { r, n });
        }
        let mut block_of = vec![u32::MAX; n];
        let mut sorted_blocks = blocks;
        for (idx, block) in sorted_blocks.iter_mut().enumerate() {
            if block.len() != r as usize {
                return Err(ModelError::BadBlockSize { r, n });
            }
            block.sort_unstable();
            for &v in block.iter() {
                if v as usize >= n || block_of[v as usize] != u32::MAX {
                    return Err(ModelError::VertexOutOfRange(v));
                }
                block_of[v as usize] = idx as u32;
            }
        }
        Ok(Partition {
            r,
            blocks: sorted_blocks,
            block_of,
        })
    }

    /// Uniformly random partition: shuffle `[n]` and cut into blocks of `r`.
    pub fn sample(n: usize, r: u32, rng: &mut impl Rng) -> Result<Partition, ModelError> {
        if r == 0 || n % r as usize != 0 {
            return Err(ModelError::BadBlockSize { r, n });
        }
        let mut verts: Vec<u32> = (0..n as u32).collect();
        verts.shuffle(rng);
        let blocks = verts.chunks(r as usize).map(|c| c.to_vec()).collect();
        Partition::from_blocks(n, r, blocks)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.block_of.len()
    }

    #[inline]
    pub fn r(&self) -> u32 {
        self.r
    }

    #[inline]
    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    #[inline]
    pub fn block_of(&self, v: u32) -> u32 {
        self.block_of[v as usize]
    }

    #[inline]
    pub fn block(&self, idx: u32) -> &[u32] {
        &self.blocks[idx as usize]
    }

    pub fn blocks(&self) -> &[Vec<u32>] {
        &self.blocks
    }

    /// True when `u` and `v` are distinct vertices sharing a block.
    #[inline]
    pub fn same_block(&self, u: u32, v: u32) -> bool {
        u != v && self.block_of(u) == self.block_of(v)
    }
}

/// The red and blue partitions of one instance.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PartitionPair {
    pub red: Partition,
    pub blue: Partition,
}

impl PartitionPair {
    pub fn sample(n: usize, r: u32, rng: &mut impl Rng) -> Result<PartitionPair, ModelError> {
        Ok(PartitionPair {
            red: Partition::sample(n, r, rng)?,
            blue: Partition::sample(n, r, rng)?,
        })
    }

    pub fn by_color(&self, color: Color) -> &Partition {
        match color {
            Color::Red => &self.red,
            Color::Blue => &self.blue,
        }
    }

    /// Vertices `v ≠ u` sharing the red or blue block of `u`, each listed once.
    pub fn block_mates(&self, u: u32, out: &mut Vec<u32>) {
        out.clear();
        let rb = self.red.block_of(u);
        for &v in self.red.block(rb) {
            if v != u {
                out.push(v);
            }
        }
        for &v in self.blue.block(self.blue.block_of(u)) {
            if v != u && self.red.block_of(v) != rb {
                out.push(v);
            }
        }
    }

    /// True when `u ≠ v` share the red block or the blue block.
    #[inline]
    pub fn share_any_block(&self, u: u32, v: u32) -> bool {
        self.red.same_block(u, v) || self.blue.same_block(u, v)
    }
}

/// Sample G(m, p): every unordered pair independently with probability `p`.
pub fn sample_base_graph(m: usize, p: f64, rng: &mut impl Rng) -> BitGraph {
    let mut g = BitGraph::new(m);
    if p <= 0.0 {
        return g;
    }
    let bern = Bernoulli::new(p.min(1.0)).expect("p validated by params");
    for u in 0..m {
        for v in (u + 1)..m {
            if bern.sample(rng) {
                g.add_edge(u, v);
            }
        }
    }
    g
}

/// Replace every base vertex by its block and every base edge by the complete
/// bipartite graph between the two blocks.
pub fn blow_up(base: &BitGraph, partition: &Partition) -> BitGraph {
    assert_eq!(base.n(), partition.block_count(), "base size must match block count");
    let mut g = BitGraph::new(partition.n());
    for i in 0..base.n() {
        for j in base.neighbors(i) {
            if j <= i {
                continue;
            }
            for &u in partition.block(i as u32) {
                for &v in partition.block(j as u32) {
                    g.add_edge(u as usize, v as usize);
                }
            }
        }
    }
    g
}

/// Invert a blow-up: recover the base graph whose blow-up along `partition`
/// equals `g`. Errors when some block pair is only partially filled, i.e.
/// `g` is not a pristine blow-up (for example after edge deletion).
pub fn quotient_base(g: &BitGraph, partition: &Partition) -> Result<BitGraph, ModelError> {
    assert_eq!(g.n(), partition.n());
    let b = partition.block_count();
    let r = partition.r() as usize;
    let mut base = BitGraph::new(b);
    for i in 0..b as u32 {
        for j in (i + 1)..b as u32 {
            let mut present = 0usize;
            for &u in partition.block(i) {
                for &v in partition.block(j) {
                    present += g.has_edge(u as usize, v as usize) as usize;
                }
            }
            if present == r * r {
                base.add_edge(i as usize, j as usize);
            } else if present != 0 {
                return Err(ModelError::NotABlowUp { i, j });
            }
        }
    }
    // Intra-block edges never come from a blow-up.
    for u in 0..g.n() {
        for v in g.neighbors(u) {
            if v > u && partition.same_block(u as u32, v as u32) {
                let b = partition.block_of(u as u32);
                return Err(ModelError::NotABlowUp { i: b, j: b });
            }
        }
    }
    Ok(base)
}

/// The superimposed two-colored graph, with a liveness mask for vertex deletion.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ColoredGraph {
    n: usize,
    red: BitGraph,
    blue: BitGraph,
    alive: Bits,
}

impl ColoredGraph {
    /// Superimpose two blow-ups on the same vertex set.
    pub fn superimpose(red: BitGraph, blue: BitGraph) -> ColoredGraph {
        assert_eq!(red.n(), blue.n());
        let n = red.n();
        ColoredGraph {
            n,
            red,
            blue,
            alive: Bits::full(n),
        }
    }

    /// Build from explicit colored edge lists (used by the loader and tests).
    pub fn from_edge_lists(
        n: usize,
        edges: &[(u32, u32, EdgeColors)],
        parts: &PartitionPair,
    ) -> Result<ColoredGraph, ModelError> {
        let mut red = BitGraph::new(n);
        let mut blue = BitGraph::new(n);
        for &(u, v, colors) in edges {
            if u as usize >= n || v as usize >= n {
                return Err(ModelError::VertexOutOfRange(u.max(v)));
            }
            if colors.red {
                if parts.red.same_block(u, v) {
                    return Err(ModelError::IntraBlockEdge { u, v, color: "red" });
                }
                red.add_edge(u as usize, v as usize);
            }
            if colors.blue {
                if parts.blue.same_block(u, v) {
                    return Err(ModelError::IntraBlockEdge { u, v, color: "blue" });
                }
                blue.add_edge(u as usize, v as usize);
            }
        }
        Ok(ColoredGraph {
            n,
            red,
            blue,
            alive: Bits::full(n),
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn red(&self) -> &BitGraph {
        &self.red
    }

    #[inline]
    pub fn blue(&self) -> &BitGraph {
        &self.blue
    }

    pub fn by_color(&self, color: Color) -> &BitGraph {
        match color {
            Color::Red => &self.red,
            Color::Blue => &self.blue,
        }
    }

    #[inline]
    pub fn alive(&self) -> &Bits {
        &self.alive
    }

    pub fn alive_count(&self) -> usize {
        self.alive.count()
    }

    #[inline]
    pub fn is_alive(&self, v: u32) -> bool {
        self.alive.get(v as usize)
    }

    pub fn kill(&mut self, v: u32) {
        self.alive.clear(v as usize);
    }

    /// Color set for the pair `(u, v)`; `(false, false)` when not an edge.
    #[inline]
    pub fn edge_colors(&self, u: u32, v: u32) -> EdgeColors {
        EdgeColors {
            red: self.red.has_edge(u as usize, v as usize),
            blue: self.blue.has_edge(u as usize, v as usize),
        }
    }

    #[inline]
    pub fn has_any_edge(&self, u: u32, v: u32) -> bool {
        self.red.has_edge(u as usize, v as usize) || self.blue.has_edge(u as usize, v as usize)
    }

    /// Remove the pair from both color classes.
    pub fn remove_edge(&mut self, u: u32, v: u32) {
        self.red.remove_edge(u as usize, v as usize);
        self.blue.remove_edge(u as usize, v as usize);
    }

    /// Union adjacency over both colors, restricted to live vertices.
    pub fn union_alive(&self) -> BitGraph {
        self.red.union(&self.blue).induce(&self.alive)
    }

    /// Union adjacency ignoring liveness.
    pub fn union_all(&self) -> BitGraph {
        self.red.union(&self.blue)
    }

    /// Sorted colored edge list `(u, v, colors)` with `u < v`, both endpoints live.
    pub fn colored_edges(&self) -> Vec<(u32, u32, EdgeColors)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            if !self.alive.get(u) {
                continue;
            }
            let mut row = self.red.row(u).clone();
            row.or_assign(self.blue.row(u));
            for v in row.iter() {
                if v > u && self.alive.get(v) {
                    out.push((u as u32, v as u32, self.edge_colors(u as u32, v as u32)));
                }
            }
        }
        out
    }
}

/// A set of edges is *simple* when no two of them lie in the same red
/// cross-block pair and no two lie in the same blue cross-block pair.
/// Edges inside a single block are unconstrained (they occupy no cross pair).
pub fn is_simple(edges: &[(u32, u32)], parts: &PartitionPair) -> bool {
    fn ok(edges: &[(u32, u32)], part: &Partition) -> bool {
        let mut seen: Vec<(u32, u32)> = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            let (a, b) = (part.block_of(u), part.block_of(v));
            if a == b {
                continue;
            }
            let key = (a.min(b), a.max(b));
            if seen.contains(&key) {
                return false;
            }
            seen.push(key);
        }
        true
    }
    ok(edges, &parts.red) && ok(edges, &parts.blue)
}
