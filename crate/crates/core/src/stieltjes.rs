//! Pathwise Stieltjes sums and discrete brackets on a common grid.
//!
//! Integrands are always evaluated at the left end of each step, which is
//! exactly the Riemann–Stieltjes integral `∫ Y_{t-} dX_t` when `X` is a step
//! function.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::GeneratedPath;
use crate::path::{Partition, SampledPath};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralValue {
    pub value: f64,
    /// `Σ |ΔX|` of the integrator over the grid.
    pub integrator_tv: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovariationValue {
    pub value: f64,
    /// Partition the sum ran over; `None` for sums over jump times.
    pub partition: Option<Partition>,
}

fn same_grid(a: &SampledPath, b: &SampledPath) -> Result<()> {
    if a.same_grid(b) {
        Ok(())
    } else {
        Err(Error::GridMismatch)
    }
}

/// `Σ_k Y_{t_{k-1}} (X_{t_k} - X_{t_{k-1}})`.
pub fn stieltjes_left(y: &SampledPath, x: &SampledPath) -> Result<IntegralValue> {
    same_grid(y, x)?;
    let (value, integrator_tv) = y
        .values()
        .iter()
        .zip(x.values().windows(2))
        .fold((0.0, 0.0), |(v, tv), (yl, w)| {
            let dx = w[1] - w[0];
            (v + yl * dx, tv + dx.abs())
        });
    Ok(IntegralValue { value, integrator_tv })
}

/// The Itô-type reference `∫ Y_{t-} dX_t`: the left-point sum against the
/// untruncated integrator on the full grid.
pub fn ito_reference_integral(y: &SampledPath, x: &SampledPath) -> Result<IntegralValue> {
    stieltjes_left(y, x)
}

/// Integral against a finite-variation integrator evaluated through
/// integration by parts:
///
/// ```text
/// Y_T F_T - Y_0 F_0 - Σ F_{t_{k-1}} ΔY_k - Σ_{k ∈ jumps} ΔY_k ΔF_k
/// ```
///
/// The bracket of `Y` against `F` only collects the listed jump indices;
/// off those indices `F` is treated as continuous so its bracket with `Y`
/// vanishes. With every nonzero increment listed this equals
/// [`stieltjes_left`].
pub fn stieltjes_by_parts(
    y: &SampledPath,
    integrator: &SampledPath,
    jump_indices: &[usize],
) -> Result<IntegralValue> {
    same_grid(y, integrator)?;
    let yv = y.values();
    let fv = integrator.values();
    let n = yv.len();
    if let Some(&bad) = jump_indices.iter().find(|&&k| k == 0 || k >= n) {
        return Err(Error::InvalidPartition(format!("jump index {bad} out of range")));
    }
    let boundary = yv[n - 1] * fv[n - 1] - yv[0] * fv[0];
    let reverse = stieltjes_left(integrator, y)?.value;
    let bracket: f64 = jump_indices
        .iter()
        .map(|&k| (yv[k] - yv[k - 1]) * (fv[k] - fv[k - 1]))
        .sum();
    Ok(IntegralValue {
        value: boundary - reverse - bracket,
        integrator_tv: integrator.total_variation(),
    })
}

/// Realized covariation `Σ ΔX ΔY` over consecutive partition indices.
pub fn discrete_bracket(x: &SampledPath, y: &SampledPath, partition: &Partition) -> Result<CovariationValue> {
    same_grid(x, y)?;
    partition.check_for(x)?;
    let xv = x.values();
    let yv = y.values();
    let value = partition
        .pairs()
        .map(|(i, j)| (xv[j] - xv[i]) * (yv[j] - yv[i]))
        .sum();
    Ok(CovariationValue {
        value,
        partition: Some(partition.clone()),
    })
}

/// `Σ ΔX ΔY` over jump times common to both paths, using the jump sizes
/// from the generator metadata.
pub fn jump_covariation(x: &GeneratedPath, y: &GeneratedPath) -> Result<CovariationValue> {
    same_grid(&x.path, &y.path)?;
    let xj = x.jump_increments();
    let yj = y.jump_increments();
    let value = xj
        .iter()
        .filter_map(|(k, dx)| yj.get(k).map(|dy| dx * dy))
        .sum();
    Ok(CovariationValue { value, partition: None })
}

/// `Σ ΔY ΔX^c` over jump times common to `x` and `y`, taking the increments
/// of the truncated path `x_trunc` at those times.
pub fn jump_covariation_truncated(
    x: &GeneratedPath,
    x_trunc: &SampledPath,
    y: &GeneratedPath,
) -> Result<CovariationValue> {
    same_grid(&x.path, &y.path)?;
    same_grid(&x.path, x_trunc)?;
    let xj = x.jump_increments();
    let yj = y.jump_increments();
    let tv = x_trunc.values();
    let value = xj
        .keys()
        .filter_map(|k| yj.get(k).map(|dy| dy * (tv[*k] - tv[*k - 1])))
        .sum();
    Ok(CovariationValue { value, partition: None })
}

/// Grid indices carrying a jump in both paths.
pub fn common_jump_indices(x: &GeneratedPath, y: &GeneratedPath) -> Vec<usize> {
    let yj = y.jump_increments();
    x.jump_increments()
        .into_keys()
        .filter(|k| yj.contains_key(k))
        .collect()
}
