//! Walk-counting machinery: a block-structured operator that entrywise
//! dominates the union adjacency, its top eigenpair, the rank-one-plus-
//! remainder decomposition, and exact / bounded J-to-J walk counts.

use crate::bitset::BitGraph;
use crate::linalg::{self, dot, norm, power_iterate_psd, NoConvergence};
use crate::model::{Partition, PartitionPair};
use crate::params::Params;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("base graph has {got} vertices but the partition has {want} blocks")]
    DimensionMismatch { got: usize, want: usize },
    #[error("eigen iteration did not converge: {0}")]
    NoConvergence(#[from] NoConvergence),
}

/// Residual-certified relative tolerance for eigen iterations.
pub const EIGEN_REL_TOL: f64 = 1e-6;
/// Iteration cap for eigen iterations.
pub const EIGEN_ITERATION_CAP: u64 = 50_000;

/// Matrix-free operator `x ↦ (A_red ⊗ J_r) x + (A_blue ⊗ J_r) x` where each
/// tensor factor is routed through the corresponding block membership. Its
/// entries are 0, 1, or 2 (bicolored block pairs contribute twice), and it
/// entrywise dominates the union adjacency of the superimposed graph.
#[derive(Clone, Debug)]
pub struct DominatingOperator {
    red_base: BitGraph,
    blue_base: BitGraph,
    red_part: Partition,
    blue_part: Partition,
}

/// Build the operator; the base graphs must match the partitions' block counts.
pub fn dominating_operator(
    red_base: &BitGraph,
    blue_base: &BitGraph,
    parts: &PartitionPair,
) -> Result<DominatingOperator, SpectralError> {
    for (base, part) in [(red_base, &parts.red), (blue_base, &parts.blue)] {
        if base.n() != part.block_count() {
            return Err(SpectralError::DimensionMismatch {
                got: base.n(),
                want: part.block_count(),
            });
        }
    }
    Ok(DominatingOperator {
        red_base: red_base.clone(),
        blue_base: blue_base.clone(),
        red_part: parts.red.clone(),
        blue_part: parts.blue.clone(),
    })
}

impl DominatingOperator {
    pub fn n(&self) -> usize {
        self.red_part.n()
    }

    /// One application: per color, sum `x` over each block, push the sums
    /// through the base adjacency, and read the result back through block
    /// membership. Cost O(n + e(base)).
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n = self.n();
        assert_eq!(x.len(), n);
        assert_eq!(y.len(), n);
        y.iter_mut().for_each(|v| *v = 0.0);
        for (base, part) in [
            (&self.red_base, &self.red_part),
            (&self.blue_base, &self.blue_part),
        ] {
            let b = part.block_count();
            let mut block_sum = vec![0.0; b];
            for (v, &xv) in x.iter().enumerate() {
                block_sum[part.block_of(v as u32) as usize] += xv;
            }
            let mut pushed = vec![0.0; b];
            for i in 0..b {
                let mut acc = 0.0;
                for j in base.neighbors(i) {
                    acc += block_sum[j];
                }
                pushed[i] = acc;
            }
            for (v, yv) in y.iter_mut().enumerate() {
                *yv += pushed[part.block_of(v as u32) as usize];
            }
        }
    }

    /// Exact integer application (entries are 0, 1, 2), with overflow checks.
    pub fn apply_u128(&self, x: &[u128], y: &mut [u128]) {
        let n = self.n();
        assert_eq!(x.len(), n);
        assert_eq!(y.len(), n);
        y.iter_mut().for_each(|v| *v = 0);
        for (base, part) in [
            (&self.red_base, &self.red_part),
            (&self.blue_base, &self.blue_part),
        ] {
            let b = part.block_count();
            let mut block_sum = vec![0u128; b];
            for (v, &xv) in x.iter().enumerate() {
                let s = &mut block_sum[part.block_of(v as u32) as usize];
                *s = s.checked_add(xv).expect("walk count overflow");
            }
            let mut pushed = vec![0u128; b];
            for i in 0..b {
                let mut acc = 0u128;
                for j in base.neighbors(i) {
                    acc = acc.checked_add(block_sum[j]).expect("walk count overflow");
                }
                pushed[i] = acc;
            }
            for (v, yv) in y.iter_mut().enumerate() {
                *yv = yv
                    .checked_add(pushed[part.block_of(v as u32) as usize])
                    .expect("walk count overflow");
            }
        }
    }
}

/// Top eigenpair (μ, v) of the nonnegative operator via shifted power
/// iteration (A + I kills bipartite-style sign oscillation; the shift leaves
/// eigenvectors untouched). Exits when ‖Av − μv‖ ≤ tol·μ; v is entrywise
/// nonnegative and unit.
pub fn top_eigenpair(
    op: &DominatingOperator,
    tol: f64,
    cap: u64,
) -> Result<(f64, Vec<f64>), SpectralError> {
    let n = op.n();
    let mut x = linalg::perturbed_ones(n, 0xE16E_0001);
    let nx = norm(&x);
    x.iter_mut().for_each(|v| *v /= nx);
    let mut y = vec![0.0; n];
    let mut last = (0.0, f64::INFINITY);
    for it in 1..=cap {
        op.apply(&x, &mut y);
        let mu = dot(&x, &y);
        let res_sq = (norm(&y).powi(2) - mu * mu).max(0.0);
        let residual = res_sq.sqrt();
        if y.iter().all(|&v| v == 0.0) {
            // The operator annihilates a strictly positive vector: it is zero.
            return Ok((0.0, x));
        }
        if mu > 0.0 && residual <= tol * mu {
            return Ok((mu, x));
        }
        last = (mu, residual);
        // Shifted update keeps iterates nonnegative: x ← (Ax + x)/‖·‖.
        let mut z: Vec<f64> = y.iter().zip(&x).map(|(a, b)| a + b).collect();
        let nz = norm(&z);
        z.iter_mut().for_each(|v| *v /= nz);
        let _ = it;
        x = z;
    }
    Err(SpectralError::NoConvergence(NoConvergence {
        iterations: cap,
        value: last.0,
        residual: last.1,
    }))
}

fn orthogonalize(x: &mut [f64], v: &[f64]) {
    let c = dot(x, v);
    x.iter_mut().zip(v).for_each(|(xi, vi)| *xi -= c * vi);
}

/// Operator norm of the remainder M = A − μ·v⊗v: power iteration on M²
/// restricted to the orthogonal complement of v, re-orthogonalized each step.
pub(crate) fn deflated_norm(
    dim: usize,
    mut apply_a: impl FnMut(&[f64], &mut [f64]),
    mu: f64,
    v: &[f64],
    tol: f64,
    cap: u64,
) -> Result<f64, NoConvergence> {
    let mut start = linalg::perturbed_ones(dim, 0x0DEF_1A7E);
    orthogonalize(&mut start, v);
    if norm(&start) < 1e-12 {
        return Ok(0.0);
    }
    let mut w = vec![0.0; dim];
    let out = power_iterate_psd(
        dim,
        |x, y| {
            apply_a(x, &mut w);
            let c = mu * dot(v, x);
            w.iter_mut().zip(v).for_each(|(wi, vi)| *wi -= c * vi);
            orthogonalize(&mut w, v);
            apply_a(&w, y);
            let c = mu * dot(v, &w);
            y.iter_mut().zip(v).for_each(|(yi, vi)| *yi -= c * vi);
            orthogonalize(y, v);
        },
        start,
        tol,
        cap,
    )?;
    Ok(out.value.sqrt())
}

/// Estimated ‖A − μ·v⊗v‖ for a DominatingOperator eigenpair.
pub fn estimate_m_norm(
    op: &DominatingOperator,
    mu: f64,
    v: &[f64],
    tol: f64,
    cap: u64,
) -> Result<f64, SpectralError> {
    Ok(deflated_norm(op.n(), |x, y| op.apply(x, y), mu, v, tol, cap)?)
}

/// Rank-one-plus-remainder view of the dominating operator.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    /// Top eigenvalue.
    pub mu: f64,
    /// Unit nonnegative top eigenvector.
    pub v: Vec<f64>,
    /// Estimated operator norm of M = A − μ·v⊗v.
    pub m_norm: f64,
    /// Max-norm of v.
    pub v_inf: f64,
    /// ‖Av − μv‖₂ at exit.
    pub residual: f64,
}

/// Serialized summary (the eigenvector itself stays in memory).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SpectralSummary {
    pub mu: f64,
    pub v_inf: f64,
    pub m_norm: f64,
    pub residual: f64,
}

impl SpectralDecomposition {
    pub fn summary(&self) -> SpectralSummary {
        SpectralSummary {
            mu: self.mu,
            v_inf: self.v_inf,
            m_norm: self.m_norm,
            residual: self.residual,
        }
    }
}

/// Full decomposition: eigenpair, remainder norm, certificates.
pub fn decompose(
    op: &DominatingOperator,
    tol: f64,
    cap: u64,
) -> Result<SpectralDecomposition, SpectralError> {
    let (mu, v) = top_eigenpair(op, tol, cap)?;
    let mut av = vec![0.0; op.n()];
    op.apply(&v, &mut av);
    let residual = {
        let mut diff = av;
        diff.iter_mut().zip(&v).for_each(|(d, vi)| *d -= mu * vi);
        norm(&diff)
    };
    let m_norm = estimate_m_norm(op, mu, &v, tol, cap)?;
    let v_inf = v.iter().fold(0.0f64, |acc, &x| acc.max(x.abs()));
    Ok(SpectralDecomposition {
        mu,
        v,
        m_norm,
        v_inf,
        residual,
    })
}

/// Exact ordered J-to-J walk count of the given length in a plain graph.
pub fn count_walks_graph(g: &BitGraph, j: &[u32], length: u32) -> u128 {
    assert!(length >= 1 && !j.is_empty());
    let n = g.n();
    let mut x = vec![0u128; n];
    for &v in j {
        x[v as usize] = 1;
    }
    let mut y = vec![0u128; n];
    for _ in 0..length {
        for u in 0..n {
            let mut acc = 0u128;
            for v in g.neighbors(u) {
                acc = acc.checked_add(x[v]).expect("walk count overflow");
            }
            y[u] = acc;
        }
        std::mem::swap(&mut x, &mut y);
    }
    j.iter().map(|&v| x[v as usize]).sum()
}

/// Exact weighted J-to-J walk count under the dominating operator.
pub fn count_walks_operator(op: &DominatingOperator, j: &[u32], length: u32) -> u128 {
    assert!(length >= 1 && !j.is_empty());
    let n = op.n();
    let mut x = vec![0u128; n];
    for &v in j {
        x[v as usize] = 1;
    }
    let mut y = vec![0u128; n];
    for _ in 0..length {
        op.apply_u128(&x, &mut y);
        std::mem::swap(&mut x, &mut y);
    }
    j.iter().map(|&v| x[v as usize]).sum()
}

/// Closed-form walk bound δ⁻²·2^ℓ·p^(ℓ−1)·n^(ℓ−2)·|J|².
pub fn closed_form_walk_bound(params: &Params, j_size: u64) -> f64 {
    let ell = params.ell as i32;
    params.delta.powi(-2)
        * 2f64.powi(ell)
        * params.p.powi(ell - 1)
        * (params.n as f64).powi(ell - 2)
        * (j_size as f64).powi(2)
}

/// Spectral intermediate bound μ^(ℓ−1)·⟨1_J, v⟩² + |J|·‖M‖^(ℓ−1).
pub fn intermediate_walk_bound(decomp: &SpectralDecomposition, j: &[u32], ell: u32) -> f64 {
    let overlap: f64 = j.iter().map(|&v| decomp.v[v as usize]).sum();
    decomp.mu.powi(ell as i32 - 1) * overlap * overlap
        + j.len() as f64 * decomp.m_norm.powi(ell as i32 - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{blow_up, sample_base_graph, ColoredGraph};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn instance(
        n: usize,
        r: u32,
        p: f64,
        seed: u64,
    ) -> (BitGraph, BitGraph, PartitionPair, ColoredGraph) {
        let mut rng = StdRng::seed_from_u64(seed);
        let parts = PartitionPair::sample(n, r, &mut rng).unwrap();
        let m = n / r as usize;
        let red = sample_base_graph(m, p, &mut rng);
        let blue = sample_base_graph(m, p, &mut rng);
        let g = ColoredGraph::superimpose(blow_up(&red, &parts.red), blow_up(&blue, &parts.blue));
        (red, blue, parts, g)
    }

    #[test]
    fn all_ones_image_is_block_degree_sum() {
        let (red, blue, parts, _) = instance(24, 3, 0.5, 1);
        let op = dominating_operator(&red, &blue, &parts).unwrap();
        let x = vec![1.0; 24];
        let mut y = vec![0.0; 24];
        op.apply(&x, &mut y);
        for v in 0..24u32 {
            let expect = 3.0
                * (red.degree(parts.red.block_of(v) as usize) as f64
                    + blue.degree(parts.blue.block_of(v) as usize) as f64);
            assert!((y[v as usize] - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn operator_is_symmetric() {
        let (red, blue, parts, _) = instance(30, 3, 0.4, 2);
        let op = dominating_operator(&red, &blue, &parts).unwrap();
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..100 {
            let x: Vec<f64> = (0..30).map(|_| rng.gen::<f64>() - 0.5).collect();
            let yv: Vec<f64> = (0..30).map(|_| rng.gen::<f64>() - 0.5).collect();
            let mut ax = vec![0.0; 30];
            let mut ay = vec![0.0; 30];
            op.apply(&x, &mut ax);
            op.apply(&yv, &mut ay);
            let lhs = dot(&x, &ay);
            let rhs = dot(&ax, &yv);
            let scale = lhs.abs().max(rhs.abs()).max(1.0);
            assert!((lhs - rhs).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn operator_dominates_union_adjacency() {
        let (red, blue, parts, g) = instance(24, 2, 0.5, 4);
        let op = dominating_operator(&red, &blue, &parts).unwrap();
        let union = g.union_all();
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..100 {
            let x: Vec<u128> = (0..24).map(|_| rng.gen_range(0..16u128)).collect();
            let mut ax = vec![0u128; 24];
            op.apply_u128(&x, &mut ax);
            for u in 0..24 {
                let gu: u128 = union.neighbors(u).map(|v| x[v]).sum();
                assert!(ax[u] >= gu, "operator must dominate at vertex {u}");
            }
        }
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let (red, blue, parts, _) = instance(24, 3, 0.5, 6);
        let bad = sample_base_graph(5, 0.5, &mut StdRng::seed_from_u64(0));
        assert!(dominating_operator(&bad, &blue, &parts).is_err());
        assert!(dominating_operator(&red, &bad, &parts).is_err());
    }

    #[test]
    fn top_eigenpair_on_complete_base() {
        // r=1, red base complete, blue empty: A is the K_m adjacency with
        // top eigenvalue m−1 and uniform eigenvector.
        let n = 16usize;
        let mut red = BitGraph::new(n);
        for u in 0..n {
            for v in (u + 1)..n {
                red.add_edge(u, v);
            }
        }
        let blue = BitGraph::new(n);
        let parts = PartitionPair {
            red: Partition::from_blocks(n, 1, (0..n as u32).map(|v| vec![v]).collect()).unwrap(),
            blue: Partition::from_blocks(n, 1, (0..n as u32).map(|v| vec![v]).collect()).unwrap(),
        };
        let op = dominating_operator(&red, &blue, &parts).unwrap();
        let (mu, v) = top_eigenpair(&op, 1e-9, EIGEN_ITERATION_CAP).unwrap();
        assert!((mu - (n as f64 - 1.0)).abs() < 1e-6);
        let uniform = 1.0 / (n as f64).sqrt();
        assert!(v.iter().all(|&x| (x - uniform).abs() < 1e-5));
    }

    #[test]
    fn top_eigenpair_survives_bipartite_oscillation() {
        // A single base edge at r=1 has spectrum {+1, −1}; the shifted
        // iteration must still converge to the Perron pair.
        let mut red = BitGraph::new(2);
        red.add_edge(0, 1);
        let blue = BitGraph::new(2);
        let parts = PartitionPair {
            red: Partition::from_blocks(2, 1, vec![vec![0], vec![1]]).unwrap(),
            blue: Partition::from_blocks(2, 1, vec![vec![0], vec![1]]).unwrap(),
        };
        let op = dominating_operator(&red, &blue, &parts).unwrap();
        let (mu, v) = top_eigenpair(&op, 1e-9, EIGEN_ITERATION_CAP).unwrap();
        assert!((mu - 1.0).abs() < 1e-7, "mu {mu}");
        assert!(v.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn residual_contract_holds() {
        let (red, blue, parts, _) = instance(60, 3, 0.25, 7);
        let op = dominating_operator(&red, &blue, &parts).unwrap();
        let d = decompose(&op, EIGEN_REL_TOL, EIGEN_ITERATION_CAP).unwrap();
        assert!(d.residual <= EIGEN_REL_TOL * d.mu);
        assert!((norm(&d.v) - 1.0).abs() < 1e-12);
        assert!(d.v_inf > 0.0);
    }

    #[test]
    fn m_norm_of_rank_one_oracle_is_zero() {
        // Dense stand-in A = μ·v⊗v: the deflated norm must vanish.
        let dim = 12;
        let mut v: Vec<f64> = (0..dim).map(|i| 1.0 + (i as f64) * 0.1).collect();
        let nv = norm(&v);
        v.iter_mut().for_each(|x| *x /= nv);
        let mu = 5.0;
        let vv = v.clone();
        let apply = move |x: &[f64], y: &mut [f64]| {
            let c = mu * dot(&vv, x);
            y.iter_mut().zip(&vv).for_each(|(yi, vi)| *yi = c * vi);
        };
        let m = deflated_norm(dim, apply, mu, &v, 1e-9, 10_000).unwrap();
        assert!(m.abs() < 1e-8, "m = {m}");
    }

    #[test]
    fn decomposition_matches_dense_eigensolver() {
        let (red, blue, parts, _) = instance(60, 3, 0.3, 8);
        let op = dominating_operator(&red, &blue, &parts).unwrap();
        let d = decompose(&op, 1e-10, EIGEN_ITERATION_CAP).unwrap();

        // Materialize the operator column by column.
        let n = op.n();
        let mut dense = nalgebra::DMatrix::zeros(n, n);
        let mut e = vec![0.0; n];
        let mut col = vec![0.0; n];
        for i in 0..n {
            e[i] = 1.0;
            op.apply(&e, &mut col);
            for (r, &val) in col.iter().enumerate() {
                dense[(r, i)] = val;
            }
            e[i] = 0.0;
        }
        let mut eigs: Vec<f64> = dense.symmetric_eigen().eigenvalues.iter().copied().collect();
        eigs.sort_by(|a, b| b.abs().partial_cmp(&a.abs()).unwrap());
        assert!((d.mu - eigs[0]).abs() <= 1e-6 * eigs[0].abs().max(1.0));
        assert!(
            (d.m_norm - eigs[1].abs()).abs() <= 1e-6 * eigs[1].abs().max(1.0),
            "m_norm {} vs dense second |λ| {}",
            d.m_norm,
            eigs[1].abs()
        );
    }

    #[test]
    fn tensor_with_all_ones_block_scales_the_norm_by_r() {
        // ‖X ⊗ J_r‖ = r·‖X‖ for symmetric X.
        let mut rng = StdRng::seed_from_u64(9);
        for &(m, r) in &[(6usize, 2usize), (8, 3), (5, 5)] {
            let mut x = nalgebra::DMatrix::zeros(m, m);
            for i in 0..m {
                for j in i..m {
                    let val = rng.gen::<f64>() - 0.5;
                    x[(i, j)] = val;
                    x[(j, i)] = val;
                }
            }
            let big = nalgebra::DMatrix::from_fn(m * r, m * r, |a, b| x[(a / r, b / r)]);
            let top = |mat: &nalgebra::DMatrix<f64>| {
                mat.clone()
                    .symmetric_eigen()
                    .eigenvalues
                    .iter()
                    .fold(0.0f64, |acc, &ev| acc.max(ev.abs()))
            };
            let (nx, nbig) = (top(&x), top(&big));
            assert!(
                (nbig - r as f64 * nx).abs() <= 1e-9 * nbig.max(1.0),
                "m={m} r={r}: {nbig} vs {}",
                r as f64 * nx
            );
        }
    }

    #[test]
    fn walk_count_examples() {
        // Single edge, J = both endpoints, length 1: the two ordered walks.
        let mut g = BitGraph::new(2);
        g.add_edge(0, 1);
        assert_eq!(count_walks_graph(&g, &[0, 1], 1), 2);

        // C6, J = one vertex, length 2: out and back through either neighbor.
        let mut c6 = BitGraph::new(6);
        for v in 0..6 {
            c6.add_edge(v, (v + 1) % 6);
        }
        assert_eq!(count_walks_graph(&c6, &[0], 2), 2);
    }

    #[test]
    fn walk_counts_match_dense_matrix_power() {
        fn dense_walks(g: &BitGraph, j: &[u32], len: u32) -> u128 {
            let n = g.n();
            let mut a = vec![vec![0u128; n]; n];
            for (u, v) in g.edges() {
                a[u as usize][v as usize] = 1;
                a[v as usize][u as usize] = 1;
            }
            let mut pw = a.clone();
            for _ in 1..len {
                let mut next = vec![vec![0u128; n]; n];
                for i in 0..n {
                    for k in 0..n {
                        if pw[i][k] == 0 {
                            continue;
                        }
                        for (m, &av) in a[k].iter().enumerate() {
                            next[i][m] += pw[i][k] * av;
                        }
                    }
                }
                pw = next;
            }
            let mut total = 0u128;
            for &u in j {
                for &v in j {
                    total += pw[u as usize][v as usize];
                }
            }
            total
        }
        let mut rng = StdRng::seed_from_u64(10);
        let g = sample_base_graph(50, 0.2, &mut rng);
        let j: Vec<u32> = vec![0, 3, 17, 42];
        for len in 1..=4 {
            assert_eq!(
                count_walks_graph(&g, &j, len),
                dense_walks(&g, &j, len),
                "length {len}"
            );
        }
    }

    #[test]
    fn operator_walks_dominate_graph_walks() {
        let (red, blue, parts, g) = instance(36, 3, 0.3, 11);
        let op = dominating_operator(&red, &blue, &parts).unwrap();
        let union = g.union_all();
        let mut rng = StdRng::seed_from_u64(12);
        for _ in 0..20 {
            let size = rng.gen_range(1..=6);
            let j: Vec<u32> = rand::seq::index::sample(&mut rng, 36, size)
                .iter()
                .map(|v| v as u32)
                .collect();
            for len in 1..=4 {
                assert!(count_walks_graph(&union, &j, len) <= count_walks_operator(&op, &j, len));
            }
        }
    }

    #[test]
    fn closed_form_bound_matches_frozen_value_and_scaling() {
        use crate::params::{derive_params, Mode, Overrides};
        let params = derive_params(
            5,
            1000,
            Mode::Operational,
            &Overrides {
                p: Some(0.01),
                r: Some(4),
                k: Some(100),
                delta: Some(1.0 / (1000f64).ln()),
            },
        )
        .unwrap();
        let bound = closed_form_walk_bound(&params, 10);
        assert!(
            (bound - 1_526_946.66).abs() < 0.5,
            "frozen closed-form value changed: {bound}"
        );
        let doubled = closed_form_walk_bound(&params, 20);
        assert_eq!(doubled, 4.0 * bound, "must scale exactly as |J|²");
    }

    #[test]
    fn intermediate_bound_dominates_exact_operator_count() {
        let (red, blue, parts, _) = instance(60, 2, 0.15, 13);
        let op = dominating_operator(&red, &blue, &parts).unwrap();
        let d = decompose(&op, 1e-10, EIGEN_ITERATION_CAP).unwrap();
        let mut rng = StdRng::seed_from_u64(14);
        for _ in 0..20 {
            let size = rng.gen_range(1..=8);
            let j: Vec<u32> = rand::seq::index::sample(&mut rng, 60, size)
                .iter()
                .map(|v| v as u32)
                .collect();
            let exact = count_walks_operator(&op, &j, 4) as f64;
            let bound = intermediate_walk_bound(&d, &j, 5);
            assert!(
                exact <= bound * (1.0 + 1e-6),
                "exact {exact} vs intermediate {bound} for J = {j:?}"
            );
        }
    }
}
