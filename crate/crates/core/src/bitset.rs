//! Fixed-size bitsets and bitset-backed adjacency.
//!
//! Every graph kernel in this crate (cycle enumeration, neighborhood
//! intersection, double-degree checks) runs on `u64`-word bitsets so that
//! row-level set operations cost O(n / 64).

/// A fixed-capacity set of integers in `[0, len)`, packed into `u64` words.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Bits {
    len: usize,
    words: Vec<u64>,
}

#[inline]
fn word_count(len: usize) -> usize {
    len.div_ceil(64)
}

impl Bits {
    /// Empty set with capacity `len`.
    pub fn new(len: usize) -> Self {
        Bits {
            len,
            words: vec![0u64; word_count(len)],
        }
    }

    /// Full set `{0, …, len−1}`.
    pub fn full(len: usize) -> Self {
        let mut b = Bits::new(len);
        for w in &mut b.words {
            *w = !0u64;
        }
        b.clear_tail();
        b
    }

    /// Zero out the padding bits above `len` in the last word.
    fn clear_tail(&mut self) {
        let used = self.len % 64;
        if used != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << used) - 1;
            }
        }
    }

    /// Capacity in bits.
    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    /// True when no bit is set.
    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    #[inline]
    pub fn set(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] |= 1u64 << (i % 64);
    }

    #[inline]
    pub fn clear(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] &= !(1u64 << (i % 64));
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    /// Number of set bits.
    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// `self ∧ other`, allocated fresh.
    pub fn and(&self, other: &Bits) -> Bits {
        debug_assert_eq!(self.len, other.len);
        Bits {
            len: self.len,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    /// In-place `self |= other`.
    pub fn or_assign(&mut self, other: &Bits) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    /// In-place `self &= other`.
    pub fn and_assign(&mut self, other: &Bits) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    /// In-place `self &= !other`.
    pub fn and_not_assign(&mut self, other: &Bits) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    /// |self ∧ other| without allocating.
    pub fn intersection_count(&self, other: &Bits) -> usize {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// Iterate set bits in increasing order.
    pub fn iter(&self) -> BitsIter<'_> {
        BitsIter {
            words: &self.words,
            word_idx: 0,
            current: self.words.first().copied().unwrap_or(0),
        }
    }
}

pub struct BitsIter<'a> {
    words: &'a [u64],
    word_idx: usize,
    current: u64,
}

impl Iterator for BitsIter<'_> {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        while self.current == 0 {
            self.word_idx += 1;
            if self.word_idx >= self.words.len() {
                return None;
            }
            self.current = self.words[self.word_idx];
        }
        let bit = self.current.trailing_zeros() as usize;
        self.current &= self.current - 1;
        Some(self.word_idx * 64 + bit)
    }
}

/// Undirected simple graph stored as one bitset row per vertex.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BitGraph {
    n: usize,
    rows: Vec<Bits>,
}

impl BitGraph {
    pub fn new(n: usize) -> Self {
        BitGraph {
            n,
            rows: (0..n).map(|_| Bits::new(n)).collect(),
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn add_edge(&mut self, u: usize, v: usize) {
        debug_assert!(u != v, "loops are not representable");
        self.rows[u].set(v);
        self.rows[v].set(u);
    }

    #[inline]
    pub fn remove_edge(&mut self, u: usize, v: usize) {
        self.rows[u].clear(v);
        self.rows[v].clear(u);
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.rows[u].get(v)
    }

    /// Neighborhood of `u` as a bitset row.
    #[inline]
    pub fn row(&self, u: usize) -> &Bits {
        &self.rows[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.rows[u].count()
    }

    pub fn neighbors(&self, u: usize) -> BitsIter<'_> {
        self.rows[u].iter()
    }

    /// Edge count (each undirected edge counted once).
    pub fn edge_count(&self) -> u64 {
        let total: u64 = self.rows.iter().map(|r| r.count() as u64).sum();
        total / 2
    }

    /// Edges as sorted `(u, v)` pairs with `u < v`.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::with_capacity(self.edge_count() as usize);
        for u in 0..self.n {
            for v in self.rows[u].iter() {
                if v > u {
                    out.push((u as u32, v as u32));
                }
            }
        }
        out
    }

    /// Union with another graph on the same vertex set.
    pub fn union(&self, other: &BitGraph) -> BitGraph {
        debug_assert_eq!(self.n, other.n);
        let mut g = self.clone();
        for (r, o) in g.rows.iter_mut().zip(&other.rows) {
            r.or_assign(o);
        }
        g
    }

    /// Drop every edge incident to a vertex outside `keep`.
    pub fn induce(&self, keep: &Bits) -> BitGraph {
        let mut g = self.clone();
        for u in 0..self.n {
            if keep.get(u) {
                g.rows[u].and_assign(keep);
            } else {
                g.rows[u] = Bits::new(self.n);
            }
        }
        g
    }

    /// Check symmetry and irreflexivity of the row representation.
    pub fn is_consistent(&self) -> bool {
        for u in 0..self.n {
            if self.rows[u].get(u) {
                return false;
            }
            for v in self.rows[u].iter() {
                if !self.rows[v].get(u) {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_get_clear_roundtrip() {
        let mut b = Bits::new(130);
        for i in [0usize, 1, 63, 64, 65, 127, 128, 129] {
            assert!(!b.get(i));
            b.set(i);
            assert!(b.get(i));
        }
        assert_eq!(b.count(), 8);
        b.clear(64);
        assert!(!b.get(64));
        assert_eq!(b.count(), 7);
    }

    #[test]
    fn full_respects_capacity() {
        for len in [1usize, 63, 64, 65, 128, 130] {
            let b = Bits::full(len);
            assert_eq!(b.count(), len, "len={len}");
            assert_eq!(b.iter().collect::<Vec<_>>(), (0..len).collect::<Vec<_>>());
        }
    }

    #[test]
    fn intersection_count_matches_iteration() {
        let mut a = Bits::new(200);
        let mut b = Bits::new(200);
        for i in (0..200).step_by(3) {
            a.set(i);
        }
        for i in (0..200).step_by(5) {
            b.set(i);
        }
        let manual = (0..200).filter(|&i| i % 15 == 0).count();
        assert_eq!(a.intersection_count(&b), manual);
        assert_eq!(a.and(&b).count(), manual);
    }

    #[test]
    fn iter_is_sorted_and_complete() {
        let mut b = Bits::new(300);
        let picks = [5usize, 64, 65, 190, 299];
        for &i in &picks {
            b.set(i);
        }
        assert_eq!(b.iter().collect::<Vec<_>>(), picks.to_vec());
    }

    #[test]
    fn graph_edges_and_union() {
        let mut g = BitGraph::new(6);
        g.add_edge(0, 1);
        g.add_edge(1, 2);
        let mut h = BitGraph::new(6);
        h.add_edge(1, 2);
        h.add_edge(4, 5);
        let u = g.union(&h);
        assert_eq!(u.edge_count(), 3);
        assert_eq!(u.edges(), vec![(0, 1), (1, 2), (4, 5)]);
        assert!(u.is_consistent());
    }

    #[test]
    fn induce_drops_incident_edges() {
        let mut g = BitGraph::new(5);
        g.add_edge(0, 1);
        g.add_edge(1, 2);
        g.add_edge(3, 4);
        let mut keep = Bits::full(5);
        keep.clear(1);
        let h = g.induce(&keep);
        assert_eq!(h.edges(), vec![(3, 4)]);
        assert!(h.is_consistent());
    }
}
