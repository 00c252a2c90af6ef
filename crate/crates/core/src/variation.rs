//! p-variation sums under three partition regimes, the modulus of
//! continuity, and the two inequalities used to compare p-variations of a
//! path, its truncation and the residual.

use std::collections::VecDeque;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::path::{dyadic_partitions, fmt17, Partition, SampledPath};
use crate::truncation::truncated_path;

/// Absolute slack used by the inequality checks.
pub const CHECK_TOL: f64 = 1e-9;

/// Largest path accepted by the quadratic mesh-bounded program when `p > 1`.
pub const MESH_DP_MAX_LEN: usize = 5000;

/// Relative slack when comparing grid gaps against a mesh bound, so that a
/// bound equal to the nominal spacing of a uniform grid admits every gap.
const MESH_RTOL: f64 = 1e-9;

fn check_p(p: f64) -> Result<()> {
    if p.is_finite() && p > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositiveP(p))
    }
}

/// `Σ |x_j - x_i|^p` over consecutive indices of the partition.
pub fn pvar_sum(path: &SampledPath, partition: &Partition, p: f64) -> Result<f64> {
    check_p(p)?;
    partition.check_for(path)?;
    let x = path.values();
    Ok(partition.pairs().map(|(i, j)| (x[j] - x[i]).abs().powf(p)).sum())
}

/// Maximum of [`pvar_sum`] over grid subsequences running from the first to
/// the last index whose consecutive gaps are all at most `delta`.
///
/// For `p <= 1` the full grid is optimal (`|a + b|^p <= |a|^p + |b|^p`), so
/// no search is needed; otherwise a dynamic program over indices is used.
pub fn pvar_mesh_bounded(path: &SampledPath, p: f64, delta: f64) -> Result<f64> {
    check_p(p)?;
    let max_gap = path.max_gap();
    let bound = delta * (1.0 + MESH_RTOL);
    if !(delta > 0.0) || max_gap > bound {
        return Err(Error::MeshTooSmall { delta, max_gap });
    }
    let x = path.values();
    if p <= 1.0 {
        return Ok(path.increments().map(|d| d.abs().powf(p)).sum());
    }
    let n = path.len();
    if n > MESH_DP_MAX_LEN {
        return Err(Error::PathTooLong {
            len: n,
            max: MESH_DP_MAX_LEN,
        });
    }
    let t = path.times();
    let mut best = vec![f64::NEG_INFINITY; n];
    best[0] = 0.0;
    let mut lo = 0;
    for k in 1..n {
        while t[k] - t[lo] > bound {
            lo += 1;
        }
        best[k] = (lo..k)
            .map(|j| best[j] + (x[k] - x[j]).abs().powf(p))
            .fold(f64::NEG_INFINITY, f64::max);
    }
    Ok(best[n - 1])
}

/// Which p-variation regime a curve approximates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PvarScheme {
    /// Sup over partitions with mesh at most each `δ`.
    MeshSweep { deltas: Vec<f64> },
    /// Sup over partitions with mesh at most `δ_n`, reported against stage `n`.
    MeshSchedule { deltas: Vec<f64> },
    /// Sums along nested dyadic partitions of levels `1..=levels`.
    Nested { levels: u32 },
}

impl PvarScheme {
    /// `δ_n = T / ln(n + 2)` for `n = 1..=stages`.
    pub fn log_schedule(horizon: f64, stages: usize) -> Self {
        PvarScheme::MeshSchedule {
            deltas: (1..=stages).map(|n| horizon / ((n + 2) as f64).ln()).collect(),
        }
    }

    /// `δ_n = T / ln(n + 2)^2` for `n = 1..=stages`.
    pub fn log_squared_schedule(horizon: f64, stages: usize) -> Self {
        PvarScheme::MeshSchedule {
            deltas: (1..=stages)
                .map(|n| horizon / ((n + 2) as f64).ln().powi(2))
                .collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PvarScheme::MeshSweep { deltas } | PvarScheme::MeshSchedule { deltas } => {
                if deltas.is_empty() {
                    return Err(Error::InvalidScheme("empty mesh sequence".into()));
                }
                if deltas.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
                    return Err(Error::InvalidScheme("mesh bounds must be positive".into()));
                }
                if deltas.windows(2).any(|w| w[1] >= w[0]) {
                    return Err(Error::InvalidScheme("mesh bounds must be strictly decreasing".into()));
                }
                Ok(())
            }
            PvarScheme::Nested { levels } => {
                if *levels == 0 {
                    return Err(Error::InvalidScheme("levels must be >= 1".into()));
                }
                Ok(())
            }
        }
    }
}

/// Parameter (mesh bound, stage or level) paired with a p-variation sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PvarCurve {
    pub p: f64,
    pub scheme: String,
    pub params: Vec<f64>,
    pub sums: Vec<f64>,
}

impl PvarCurve {
    pub fn last(&self) -> Option<f64> {
        self.sums.last().copied()
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("param\tsum\n");
        for (a, s) in self.params.iter().zip(&self.sums) {
            let _ = writeln!(out, "{}\t{}", fmt17(*a), fmt17(*s));
        }
        out
    }
}

/// Evaluates a p-variation surrogate along a scheme. No extrapolation.
pub fn pvar_curve(path: &SampledPath, p: f64, scheme: &PvarScheme) -> Result<PvarCurve> {
    check_p(p)?;
    scheme.validate()?;
    let (name, params, sums) = match scheme {
        PvarScheme::MeshSweep { deltas } => {
            let sums = deltas
                .par_iter()
                .map(|&d| pvar_mesh_bounded(path, p, d))
                .collect::<Result<Vec<_>>>()?;
            ("mesh_sweep", deltas.clone(), sums)
        }
        PvarScheme::MeshSchedule { deltas } => {
            let sums = deltas
                .par_iter()
                .map(|&d| pvar_mesh_bounded(path, p, d))
                .collect::<Result<Vec<_>>>()?;
            let stages = (1..=deltas.len()).map(|n| n as f64).collect();
            ("mesh_schedule", stages, sums)
        }
        PvarScheme::Nested { levels } => {
            let parts = dyadic_partitions(path, *levels)?;
            let sums = parts
                .iter()
                .map(|part| pvar_sum(path, part, p))
                .collect::<Result<Vec<_>>>()?;
            let params = (1..=*levels).map(f64::from).collect();
            ("nested", params, sums)
        }
    };
    Ok(PvarCurve {
        p,
        scheme: name.to_string(),
        params,
        sums,
    })
}

/// `max |x_i - x_j|` over grid pairs with `|t_i - t_j| <= h`, via monotone
/// deques over a sliding time window.
pub fn modulus_of_continuity(path: &SampledPath, h: f64) -> Result<f64> {
    if !(h >= 0.0) {
        return Err(Error::NegativeH(h));
    }
    let t = path.times();
    let x = path.values();
    let mut maxq: VecDeque<usize> = VecDeque::new();
    let mut minq: VecDeque<usize> = VecDeque::new();
    let mut lo = 0;
    let mut best: f64 = 0.0;
    for r in 0..x.len() {
        while maxq.back().is_some_and(|&i| x[i] <= x[r]) {
            maxq.pop_back();
        }
        maxq.push_back(r);
        while minq.back().is_some_and(|&i| x[i] >= x[r]) {
            minq.pop_back();
        }
        minq.push_back(r);
        while t[r] - t[lo] > h {
            lo += 1;
        }
        while maxq.front().is_some_and(|&i| i < lo) {
            maxq.pop_front();
        }
        while minq.front().is_some_and(|&i| i < lo) {
            minq.pop_front();
        }
        best = best.max(x[maxq[0]] - x[minq[0]]);
    }
    Ok(best)
}

/// Both sides of the per-partition Minkowski inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TriangleReport {
    /// `pvar_sum(f + g)^(1/p)`
    pub lhs: f64,
    /// `pvar_sum(f)^(1/p) + pvar_sum(g)^(1/p)`
    pub rhs: f64,
    pub holds: bool,
}

pub fn check_pvar_triangle(
    f: &SampledPath,
    g: &SampledPath,
    partition: &Partition,
    p: f64,
) -> Result<TriangleReport> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::ExponentTooSmall { p, min: 1.0 });
    }
    if !f.same_grid(g) {
        return Err(Error::GridMismatch);
    }
    let sum: Vec<f64> = f.values().iter().zip(g.values()).map(|(a, b)| a + b).collect();
    let fg = f.with_values(sum)?;
    let inv = 1.0 / p;
    let lhs = pvar_sum(&fg, partition, p)?.powf(inv);
    let rhs = pvar_sum(f, partition, p)?.powf(inv) + pvar_sum(g, partition, p)?.powf(inv);
    Ok(TriangleReport {
        lhs,
        rhs,
        holds: lhs <= rhs + CHECK_TOL,
    })
}

/// Both sides of `Σ|ΔX^c|^p <= ω(mesh(π), X^c)^(p-1) · TV^c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncatedBoundReport {
    pub left: f64,
    pub right: f64,
    pub mesh: f64,
    pub modulus: f64,
    pub tvc: f64,
    pub holds: bool,
}

pub fn check_pvar_bound_for_truncated(
    path: &SampledPath,
    c: f64,
    partition: &Partition,
    p: f64,
) -> Result<TruncatedBoundReport> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::ExponentTooSmall { p, min: 1.0 });
    }
    partition.check_for(path)?;
    let trunc = truncated_path(path, c)?;
    truncated_bound(&trunc.truncated_path, trunc.tv, partition, p)
}

/// The bound for an already truncated path with known `TV^c`.
pub(crate) fn truncated_bound(
    trend: &SampledPath,
    tvc: f64,
    partition: &Partition,
    p: f64,
) -> Result<TruncatedBoundReport> {
    let left = pvar_sum(trend, partition, p)?;
    let mesh = partition.mesh();
    let modulus = modulus_of_continuity(trend, mesh)?;
    let right = modulus.powf(p - 1.0) * tvc;
    Ok(TruncatedBoundReport {
        left,
        right,
        mesh,
        modulus,
        tvc,
        holds: left <= right + CHECK_TOL,
    })
}

/// The bound evaluated along dyadic levels `1..=levels`.
pub fn truncated_bound_trend(
    path: &SampledPath,
    c: f64,
    levels: u32,
    p: f64,
) -> Result<Vec<TruncatedBoundReport>> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::ExponentTooSmall { p, min: 1.0 });
    }
    let trunc = truncated_path(path, c)?;
    dyadic_partitions(path, levels)?
        .iter()
        .map(|part| truncated_bound(&trunc.truncated_path, trunc.tv, part, p))
        .collect()
}
