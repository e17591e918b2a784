//! Parameter derivation and regime diagnostics.
//!
//! The construction is controlled by a cycle length `ell` (odd, ≥ 5), a vertex
//! count `n`, a base-graph density `p`, a block size `r`, an independence
//! target `k`, a projection fraction `delta`, and a double-degree exponent
//! `eta`. In *asymptotic* mode everything is derived from `(ell, n)` by the
//! defining formulas; in *operational* mode the caller supplies `p`, `r`, `k`,
//! `delta` directly so that desk-scale runs have workable densities.
//!
//! All logarithms are natural.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Default inflation applied to the derived independence target so that the
/// union-bound margin is strictly positive rather than exactly zero (the
/// uninflated formula sits exactly on the threshold; see
/// [`union_bound_margin_formula_gap`]).
pub const DEFAULT_K_INFLATION: f64 = 9.0 / 8.0;

#[derive(Debug, Error)]
pub enum ParamsError {
    #[error("ell must be odd and at least 5, got {0}")]
    BadEll(u32),
    #[error("n must be at least ell = {ell}, got {n}")]
    BadN { ell: u32, n: u64 },
    #[error("r = {r} must be at least 1 and divide n = {n}")]
    BadBlockSize { r: u32, n: u64 },
    #[error("p must lie in (0, 1), got {0}")]
    BadDensity(f64),
    #[error("k must be at least 1, got {0}")]
    BadK(u64),
    #[error("delta must lie in (0, 1], got {0}")]
    BadDelta(f64),
    #[error("operational mode requires explicit {0}")]
    MissingOverride(&'static str),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// How the numeric parameters were obtained.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Everything derived from `(ell, n)` by the defining formulas.
    Asymptotic,
    /// `p`, `r`, `k`, `delta` supplied by the caller.
    Operational,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Asymptotic => write!(f, "asymptotic"),
            Mode::Operational => write!(f, "operational"),
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "asymptotic" => Ok(Mode::Asymptotic),
            "operational" => Ok(Mode::Operational),
            other => Err(format!("unknown mode {other:?}")),
        }
    }
}

/// Optional replacements consumed by [`derive_params`]. All four are required
/// in operational mode; in asymptotic mode any subset may be pinned.
#[derive(Clone, Copy, Default, PartialEq, Debug)]
pub struct Overrides {
    pub p: Option<f64>,
    pub r: Option<u32>,
    pub k: Option<u64>,
    pub delta: Option<f64>,
}

/// Full parameter set for one construction instance.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct Params {
    pub ell: u32,
    pub n: u64,
    /// Density threshold `n^(−1+1/(ell−1))` below which short-cycle removal is cheap.
    pub p_c: f64,
    /// Density exponent boost `((2·ell−3)·(ell−1))^(−1)`.
    pub eps: f64,
    /// Base-graph edge probability.
    pub p: f64,
    /// Block size of the blow-up; divides `n`.
    pub r: u32,
    /// Independence target.
    pub k: u64,
    /// Projection fraction.
    pub delta: f64,
    /// Double-degree exponent `1/(4·ell)`.
    pub eta: f64,
    pub mode: Mode,
}

/// Exponent boost for the base-graph density, `((2ℓ−3)(ℓ−1))^(−1)`.
pub fn construction_epsilon(ell: u32) -> f64 {
    1.0 / (((2 * ell - 3) * (ell - 1)) as f64)
}

/// Exact rational value of [`construction_epsilon`].
pub fn construction_epsilon_exact(ell: u32) -> Ratio<i64> {
    Ratio::new(1, ((2 * ell as i64 - 3) * (ell as i64 - 1)) as i64)
}

/// Exponent in the `k`-scale form of the same bound, `((ℓ−2)(2ℓ−5))^(−1)`.
pub fn k_scale_epsilon(ell: u32) -> f64 {
    1.0 / (((ell - 2) * (2 * ell - 5)) as f64)
}

/// Exact rational value of [`k_scale_epsilon`].
pub fn k_scale_epsilon_exact(ell: u32) -> Ratio<i64> {
    Ratio::new(1, ((ell as i64 - 2) * (2 * ell as i64 - 5)) as i64)
}

/// Critical density `n^(−1+1/(ell−1))`.
pub fn critical_density(ell: u32, n: u64) -> f64 {
    (n as f64).powf(-1.0 + 1.0 / ((ell - 1) as f64))
}

/// The uninflated independence-target formula `8·p^(−1)·(log n)³`.
pub fn independence_target_formula(p: f64, n: u64) -> f64 {
    let log_n = (n as f64).ln();
    8.0 * log_n.powi(3) / p
}

/// Exact gap of the exponent identity
/// `1 + 1/(ℓ−2) + 1/((ℓ−2)(2ℓ−5)) − (1 + 2/(2ℓ−5))`,
/// computed in rational arithmetic. Zero for every ell outside {2, 5/2}.
pub fn exponent_identity_gap_exact(ell: u32) -> Ratio<i64> {
    let l = ell as i64;
    let lhs = Ratio::from_integer(1)
        + Ratio::new(1, l - 2)
        + Ratio::new(1, (l - 2) * (2 * l - 5));
    let rhs = Ratio::from_integer(1) + Ratio::new(2, 2 * l - 5);
    lhs - rhs
}

/// Multiplies out `p · delta² · k` with `k = 8·p^(−1)·(log n)³` and
/// `delta = (log n)^(−1)` over exact monomials `c · p^a · (log n)^b`, and
/// subtracts `8·log n`. Returns `(coefficient gap, p exponent gap, log
/// exponent gap)` — all identically zero, i.e. the union-bound margin
/// vanishes exactly at the uninflated target.
pub fn union_bound_margin_formula_gap() -> (Ratio<i64>, i32, i32) {
    // (coeff, power of p, power of log n)
    let p = (Ratio::from_integer(1), 1i32, 0i32);
    let delta_sq = (Ratio::from_integer(1), 0i32, -2i32);
    let k = (Ratio::from_integer(8), -1i32, 3i32);
    let prod = (p.0 * delta_sq.0 * k.0, p.1 + delta_sq.1 + k.1, p.2 + delta_sq.2 + k.2);
    let rhs = (Ratio::from_integer(8), 0i32, 1i32);
    (prod.0 - rhs.0, prod.1 - rhs.1, prod.2 - rhs.2)
}

/// Largest `r ≤ target` that divides `n`, with `r ≥ 1`.
fn adjust_block_size_to_divide(target: f64, n: u64) -> u32 {
    let mut r = target.floor() as i64;
    if r < 1 {
        return 1;
    }
    while r > 1 && n % (r as u64) != 0 {
        r -= 1;
    }
    r as u32
}

/// Derive a full parameter set. In asymptotic mode each override, when
/// present, replaces the derived value; in operational mode `p`, `r`, `k`,
/// `delta` must all be supplied.
pub fn derive_params(
    ell: u32,
    n: u64,
    mode: Mode,
    overrides: &Overrides,
) -> Result<Params, ParamsError> {
    if ell < 5 || ell % 2 == 0 {
        return Err(ParamsError::BadEll(ell));
    }
    if n < ell as u64 {
        return Err(ParamsError::BadN { ell, n });
    }
    let log_n = (n as f64).ln();
    let p_c = critical_density(ell, n);
    let eps = construction_epsilon(ell);
    let eta = 1.0 / (4 * ell) as f64;

    let (p, r, k, delta) = match mode {
        Mode::Asymptotic => {
            let p = overrides.p.unwrap_or(p_c * (n as f64).powf(eps) / log_n);
            let r = overrides.r.unwrap_or_else(|| {
                adjust_block_size_to_divide((p * n as f64).sqrt() * log_n.powf(-1.5), n)
            });
            let k = overrides.k.unwrap_or_else(|| {
                (DEFAULT_K_INFLATION * independence_target_formula(p, n)).ceil() as u64
            });
            let delta = overrides.delta.unwrap_or(1.0 / log_n);
            (p, r, k, delta)
        }
        Mode::Operational => {
            let p = overrides.p.ok_or(ParamsError::MissingOverride("p"))?;
            let r = overrides.r.ok_or(ParamsError::MissingOverride("r"))?;
            let k = overrides.k.ok_or(ParamsError::MissingOverride("k"))?;
            let delta = overrides.delta.ok_or(ParamsError::MissingOverride("delta"))?;
            (p, r, k, delta)
        }
    };

    if !(p > 0.0 && p < 1.0) {
        return Err(ParamsError::BadDensity(p));
    }
    if r < 1 || n % (r as u64) != 0 {
        return Err(ParamsError::BadBlockSize { r, n });
    }
    if k < 1 {
        return Err(ParamsError::BadK(k));
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(ParamsError::BadDelta(delta));
    }

    Ok(Params {
        ell,
        n,
        p_c,
        eps,
        p,
        r,
        k,
        delta,
        eta,
        mode,
    })
}

impl Params {
    /// Natural logarithm of `n`.
    pub fn log_n(&self) -> f64 {
        (self.n as f64).ln()
    }

    /// Number of blocks in each partition.
    pub fn block_count(&self) -> u64 {
        self.n / self.r as u64
    }

    /// Flat `key = value` document; round-trips through [`Params::from_kv_str`].
    pub fn to_kv_string(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("ell = {}\n", self.ell));
        s.push_str(&format!("n = {}\n", self.n));
        s.push_str(&format!("p_c = {}\n", self.p_c));
        s.push_str(&format!("eps = {}\n", self.eps));
        s.push_str(&format!("p = {}\n", self.p));
        s.push_str(&format!("r = {}\n", self.r));
        s.push_str(&format!("k = {}\n", self.k));
        s.push_str(&format!("delta = {}\n", self.delta));
        s.push_str(&format!("eta = {}\n", self.eta));
        s.push_str(&format!("mode = {}\n", self.mode));
        s
    }

    /// Parse the flat key-value document produced by [`Params::to_kv_string`].
    /// Lines starting with `#` and blank lines are ignored.
    pub fn from_kv_str(text: &str) -> Result<Params, ParamsError> {
        let mut ell = None;
        let mut n = None;
        let mut p_c = None;
        let mut eps = None;
        let mut p = None;
        let mut r = None;
        let mut k = None;
        let mut delta = None;
        let mut eta = None;
        let mut mode = None;

        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: String| ParamsError::Parse {
                line: idx + 1,
                msg,
            };
            let (key, value) = line
                .split_once('=')
                .map(|(a, b)| (a.trim(), b.trim()))
                .ok_or_else(|| err(format!("expected `key = value`, got {line:?}")))?;
            match key {
                "ell" => ell = Some(value.parse().map_err(|e| err(format!("ell: {e}")))?),
                "n" => n = Some(value.parse().map_err(|e| err(format!("n: {e}")))?),
                "p_c" => p_c = Some(value.parse().map_err(|e| err(format!("p_c: {e}")))?),
                "eps" => eps = Some(value.parse().map_err(|e| err(format!("eps: {e}")))?),
                "p" => p = Some(value.parse().map_err(|e| err(format!("p: {e}")))?),
                "r" => r = Some(value.parse().map_err(|e| err(format!("r: {e}")))?),
                "k" => k = Some(value.parse().map_err(|e| err(format!("k: {e}")))?),
                "delta" => delta = Some(value.parse().map_err(|e| err(format!("delta: {e}")))?),
                "eta" => eta = Some(value.parse().map_err(|e| err(format!("eta: {e}")))?),
                "mode" => {
                    mode = Some(value.parse::<Mode>().map_err(|e| err(e))?);
                }
                other => return Err(err(format!("unknown key {other:?}"))),
            }
        }

        let missing = |name: &'static str| ParamsError::Parse {
            line: 0,
            msg: format!("missing key {name}"),
        };
        Ok(Params {
            ell: ell.ok_or_else(|| missing("ell"))?,
            n: n.ok_or_else(|| missing("n"))?,
            p_c: p_c.ok_or_else(|| missing("p_c"))?,
            eps: eps.ok_or_else(|| missing("eps"))?,
            p: p.ok_or_else(|| missing("p"))?,
            r: r.ok_or_else(|| missing("r"))?,
            k: k.ok_or_else(|| missing("k"))?,
            delta: delta.ok_or_else(|| missing("delta"))?,
            eta: eta.ok_or_else(|| missing("eta"))?,
            mode: mode.ok_or_else(|| missing("mode"))?,
        })
    }
}

/// Finite-`n` truth of each asymptotic inequality the analysis relies on.
/// Ratios are normalized so that a value `< 1` (or a positive margin) means
/// the inequality holds at this `n`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RegimeDiagnostics {
    /// `p^(ℓ−1) n^(ℓ−2) (log n)² / r`; the short-cycle density condition asks ≪ 1.
    pub cycle_density_ratio: f64,
    pub cycle_density_ok: bool,
    /// `r / (4·sqrt(n/k))`; the projection lemma asks ≤ 1.
    pub block_vs_projection_ratio: f64,
    pub block_vs_projection_ok: bool,
    /// `r / (pn)^(1−2/(ℓ−1))`; the walk-count lemma asks ≤ 1.
    pub block_vs_walk_ratio: f64,
    pub block_vs_walk_ok: bool,
    /// `p·delta²·k − 8·log n`; the union bound asks > 0.
    pub union_bound_margin: f64,
    pub union_bound_ok: bool,
    /// Float image of the exact exponent-identity gap (identically zero).
    pub exponent_identity_err: f64,
}

/// Evaluate every regime inequality at the given parameters.
pub fn check_regime(params: &Params) -> RegimeDiagnostics {
    let n = params.n as f64;
    let log_n = params.log_n();
    let ell = params.ell as f64;
    let p = params.p;
    let r = params.r as f64;
    let k = params.k as f64;
    let delta = params.delta;

    let cycle_density_ratio = p.powi(params.ell as i32 - 1) * n.powi(params.ell as i32 - 2)
        / r
        * log_n.powi(2);
    let block_vs_projection_ratio = r / (4.0 * (n / k).sqrt());
    let block_vs_walk_ratio = r / (p * n).powf(1.0 - 2.0 / (ell - 1.0));
    let union_bound_margin = p * delta * delta * k - 8.0 * log_n;
    let gap = exponent_identity_gap_exact(params.ell);
    let exponent_identity_err = (*gap.numer() as f64) / (*gap.denom() as f64);

    RegimeDiagnostics {
        cycle_density_ratio,
        cycle_density_ok: cycle_density_ratio < 1.0,
        block_vs_projection_ratio,
        block_vs_projection_ok: block_vs_projection_ratio <= 1.0,
        block_vs_walk_ratio,
        block_vs_walk_ok: block_vs_walk_ratio <= 1.0,
        union_bound_margin,
        union_bound_ok: union_bound_margin > 0.0,
        exponent_identity_err,
    }
}
