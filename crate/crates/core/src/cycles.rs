//! Canonical enumeration of fixed-length cycles.
//!
//! Cycles of length `ell` are produced exactly once each, as a vertex
//! sequence `[a, x1, …, x_{ell−1}]` where `a` is the smallest vertex of the
//! cycle and `x1 < x_{ell−1}` fixes the traversal direction. A configurable
//! visit cap aborts enumeration on pathologically dense inputs instead of
//! hanging.

use crate::bitset::BitGraph;
use std::ops::ControlFlow;
use thiserror::Error;

/// Default bound on DFS node expansions before enumeration gives up.
pub const DEFAULT_VISIT_CAP: u64 = 100_000_000;

#[derive(Debug, Error)]
pub enum CycleError {
    #[error("cycle enumeration exceeded the visit cap of {cap} node expansions")]
    Overflow { cap: u64 },
    #[error("cycle length {0} must be at least 3")]
    BadLength(usize),
}

struct Dfs<'a, F> {
    g: &'a BitGraph,
    ell: usize,
    cap: u64,
    visits: u64,
    path: Vec<u32>,
    in_path: Vec<bool>,
    on_cycle: F,
    count: u64,
}

impl<'a, F: FnMut(&[u32]) -> ControlFlow<()>> Dfs<'a, F> {
    fn extend(&mut self) -> Result<ControlFlow<()>, CycleError> {
        self.visits += 1;
        if self.visits > self.cap {
            return Err(CycleError::Overflow { cap: self.cap });
        }
        let last = *self.path.last().expect("path never empty") as usize;
        let anchor = self.path[0] as usize;
        if self.path.len() == self.ell - 1 {
            // Close the cycle: common neighbors of the path's two ends.
            let mut closing = self.g.row(last).clone();
            closing.and_assign(self.g.row(anchor));
            for x in closing.iter() {
                // x > path[1] canonicalizes direction and implies x > anchor.
                if (x as u32) > self.path[1] && !self.in_path[x] {
                    self.path.push(x as u32);
                    self.count += 1;
                    let flow = (self.on_cycle)(&self.path);
                    self.path.pop();
                    if flow.is_break() {
                        return Ok(ControlFlow::Break(()));
                    }
                }
            }
            return Ok(ControlFlow::Continue(()));
        }
        for v in self.g.neighbors(last) {
            if v <= anchor || self.in_path[v] {
                continue;
            }
            self.path.push(v as u32);
            self.in_path[v] = true;
            let flow = self.extend()?;
            self.in_path[v] = false;
            self.path.pop();
            if flow.is_break() {
                return Ok(ControlFlow::Break(()));
            }
        }
        Ok(ControlFlow::Continue(()))
    }
}

/// Visit every length-`ell` cycle once in canonical form; returns the number
/// of cycles visited. The callback may break to stop early.
pub fn for_each_cycle<F>(g: &BitGraph, ell: usize, cap: u64, on_cycle: F) -> Result<u64, CycleError>
where
    F: FnMut(&[u32]) -> ControlFlow<()>,
{
    if ell < 3 {
        return Err(CycleError::BadLength(ell));
    }
    let mut dfs = Dfs {
        g,
        ell,
        cap,
        visits: 0,
        path: Vec::with_capacity(ell),
        in_path: vec![false; g.n()],
        on_cycle,
        count: 0,
    };
    for a in 0..g.n() as u32 {
        dfs.path.clear();
        dfs.path.push(a);
        dfs.in_path[a as usize] = true;
        let flow = dfs.extend()?;
        dfs.in_path[a as usize] = false;
        if flow.is_break() {
            break;
        }
    }
    Ok(dfs.count)
}

/// All length-`ell` cycles, each once, in canonical vertex order.
pub fn enumerate_cycles(g: &BitGraph, ell: usize, cap: u64) -> Result<Vec<Vec<u32>>, CycleError> {
    let mut out = Vec::new();
    for_each_cycle(g, ell, cap, |c| {
        out.push(c.to_vec());
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

/// Number of length-`ell` cycles.
pub fn count_cycles(g: &BitGraph, ell: usize, cap: u64) -> Result<u64, CycleError> {
    for_each_cycle(g, ell, cap, |_| ControlFlow::Continue(()))
}

/// Whether any length-`ell` cycle exists (stops at the first).
pub fn has_cycle(g: &BitGraph, ell: usize, cap: u64) -> Result<bool, CycleError> {
    let mut found = false;
    for_each_cycle(g, ell, cap, |_| {
        found = true;
        ControlFlow::Break(())
    })?;
    Ok(found)
}
