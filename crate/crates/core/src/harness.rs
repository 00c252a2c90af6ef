//! Monte Carlo c-sweep experiments.
//!
//! Three studies are supported:
//!
//! * `ito_plus_bracket`: jump-free `X`, `Y`; the integral of `Y` against
//!   `X^c` is compared with `∫ Y dX + ⟨Y, X⟩_T` (and with
//!   `½ X_T² + ½ ⟨X, X⟩_T` when `Y = X`),
//! * `ito_plus_cont_bracket`: general `X`, `Y`; `∫ Y_{t-} dX^c` is compared
//!   with `∫ Y_{t-} dX + [X^cont, Y^cont]_T`,
//! * `decomposition_tv_growth`: variation of `X^c` and of `X - X^c` along
//!   nested dyadic partitions.
//!
//! Replication `r` draws its paths from seeds derived from
//! `(base_seed, r)`, so results do not depend on how many replications run
//! or in which order. Aggregation always sums in replication order.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::{generate, mix_seed, split_parts, GeneratedPath, GeneratorConfig, GeneratorKind};
use crate::path::{dyadic_partitions, fmt17, Partition, SampledPath};
use crate::stieltjes::{
    common_jump_indices, discrete_bracket, ito_reference_integral, jump_covariation, jump_covariation_truncated,
    stieltjes_by_parts, stieltjes_left,
};
use crate::truncation::{decompose, truncated_path};
use crate::variation::{modulus_of_continuity, pvar_mesh_bounded, pvar_sum, CHECK_TOL};

/// A warning is counted when `c < GUARD_FACTOR * median |ΔX|`.
pub const GUARD_FACTOR: f64 = 3.0;

/// Tolerance for per-path identities checked before aggregation.
pub const IDENTITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetKind {
    ItoPlusBracket,
    ItoPlusContBracket,
    DecompositionTvGrowth,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub x: GeneratorConfig,
    /// Integrand generator; `None` means `Y = X`.
    #[serde(default)]
    pub y: Option<GeneratorConfig>,
    pub c_values: Vec<f64>,
    pub replications: usize,
    pub base_seed: u64,
    pub target: TargetKind,
    /// Grid steps; overrides the generators' own `steps`.
    pub steps: usize,
    /// Read `c_values` as multiples of the smallest absolute jump of each
    /// `X` path.
    #[serde(default)]
    pub c_relative_to_min_jump: bool,
    /// Dyadic levels for the decomposition study; defaults to `ceil(log2 steps)`.
    #[serde(default)]
    pub levels: Option<u32>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidExperiment(m.into()));
        if self.c_values.is_empty() {
            return bad("c_values is empty");
        }
        if self.c_values.iter().any(|c| !(c.is_finite() && *c > 0.0)) {
            return bad("c_values must be positive");
        }
        if self.c_values.windows(2).any(|w| w[1] >= w[0]) {
            return bad("c_values must be strictly decreasing");
        }
        if self.replications == 0 {
            return bad("replications must be >= 1");
        }
        if self.steps == 0 {
            return bad("steps must be >= 1");
        }
        if let Some(y) = &self.y {
            if y.horizon != self.x.horizon {
                return Err(Error::GridMismatch);
            }
            y.validate()?;
        }
        self.x.validate()?;
        Ok(())
    }

    fn levels(&self) -> u32 {
        self.levels
            .unwrap_or_else(|| (self.steps as f64).log2().ceil().max(1.0) as u32)
    }

    fn paths(&self, replication: usize) -> Result<(GeneratedPath, Option<GeneratedPath>)> {
        let seed = mix_seed(self.base_seed, replication as u64);
        let x_cfg = GeneratorConfig {
            steps: self.steps,
            seed: mix_seed(seed, 0),
            ..self.x.clone()
        };
        let x = generate(&x_cfg)?;
        let y = match &self.y {
            None => None,
            Some(cfg) => Some(generate(&GeneratorConfig {
                steps: self.steps,
                seed: mix_seed(seed, 1),
                ..cfg.clone()
            })?),
        };
        Ok((x, y))
    }
}

/// Means over replications at one dyadic level of the decomposition study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelRow {
    pub level: u32,
    pub mesh: f64,
    /// `Σ|Δ(X - X^c)|` along the level.
    pub noise_tv: f64,
    /// `Σ|ΔX^c|` along the level.
    pub trend_tv_nested: f64,
    /// Sup of `Σ|ΔX^c|` over partitions with mesh at most this level's mesh.
    pub trend_tv_mesh_bounded: f64,
    /// Largest `|trend_tv_mesh_bounded - TV^c|` over replications.
    pub trend_tv_max_deviation: f64,
    pub v2_path: f64,
    pub v2_trend: f64,
    pub v2_noise: f64,
    /// `ω(mesh, X^c) · TV^c`, the bound on `v2_trend`.
    pub v2_trend_bound: f64,
    /// Replications where `|√v2(X) - √v2(X - X^c)| > √v2(X^c)`.
    pub minkowski_violations: usize,
    /// Replications where `v2(X^c) > ω(mesh, X^c) · TV^c`.
    pub modulus_bound_violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub c: f64,
    /// Mean and standard deviation of `observed - reference`.
    pub mean_err: f64,
    pub std_err: f64,
    pub mean_abs_err: f64,
    pub mean_abs_reference: f64,
    /// `Σ|observed - reference| / Σ|reference|`; absent when every reference is 0.
    pub relative_abs_err: Option<f64>,
    pub mean_tvc: f64,
    /// Mean of `c / median|ΔX|`.
    pub mean_guard_ratio: f64,
    pub guard_warnings: usize,
    /// Replications violating a per-path identity.
    pub identity_violations: usize,
    pub left_point_mean_abs_err: Option<f64>,
    pub by_parts_mean_abs_err: Option<f64>,
    /// `Y = X` continuous study: error against `½X_T² + ½Σ(ΔX)²`.
    pub closed_form_mean_abs_err: Option<f64>,
    /// Jump study: mean of `Σ ΔY ΔX^c` over common jump times.
    pub mean_jump_bracket_truncated: Option<f64>,
    /// Jump study: mean of `Σ ΔY ΔX` over common jump times.
    pub mean_jump_bracket: Option<f64>,
    pub levels: Option<Vec<LevelRow>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    /// How `observed` is computed.
    pub observable: String,
    pub guard_factor: f64,
    pub identity_tolerance: f64,
    /// Rows ordered by decreasing `c`.
    pub rows: Vec<ReportRow>,
}

impl ExperimentReport {
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("c\tmean_err\tstd_err\tmean_tvc\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}",
                fmt17(r.c),
                fmt17(r.mean_err),
                fmt17(r.std_err),
                fmt17(r.mean_tvc)
            );
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// One replication's numbers at one `c`.
#[derive(Debug, Clone, Default)]
struct Sample {
    observed: f64,
    reference: f64,
    tvc: f64,
    guard_ratio: f64,
    identity_ok: bool,
    left_point_err: f64,
    by_parts_err: f64,
    closed_form_err: Option<f64>,
    jump_bracket_truncated: Option<f64>,
    jump_bracket: Option<f64>,
    levels: Option<Vec<LevelSample>>,
}

#[derive(Debug, Clone)]
struct LevelSample {
    level: u32,
    mesh: f64,
    noise_tv: f64,
    trend_tv_nested: f64,
    trend_tv_mesh_bounded: f64,
    deviation: f64,
    v2_path: f64,
    v2_trend: f64,
    v2_noise: f64,
    v2_trend_bound: f64,
    minkowski_ok: bool,
    bound_ok: bool,
}

fn median_abs_increment(path: &SampledPath) -> f64 {
    let mut inc: Vec<f64> = path.increments().map(f64::abs).collect();
    if inc.is_empty() {
        return 0.0;
    }
    let mid = inc.len() / 2;
    let (_, m, _) = inc.select_nth_unstable_by(mid, f64::total_cmp);
    *m
}

fn guard_ratio(c: f64, median: f64) -> f64 {
    if median > 0.0 {
        c / median
    } else {
        f64::INFINITY
    }
}

/// Summation by parts on the grid:
/// `Σ Y_- ΔF + Σ F_- ΔY + Σ ΔY ΔF = Y_T F_T - Y_0 F_0`.
fn by_parts_identity_holds(y: &SampledPath, f: &SampledPath) -> Result<bool> {
    let a = stieltjes_left(y, f)?.value;
    let b = stieltjes_left(f, y)?.value;
    let br = discrete_bracket(y, f, &Partition::full(y))?.value;
    let (yv, fv) = (y.values(), f.values());
    let n = yv.len() - 1;
    let rhs = yv[n] * fv[n] - yv[0] * fv[0];
    Ok((a + b + br - rhs).abs() <= IDENTITY_TOL)
}

/// Continuous-case study on jump-free paths. The observed integral is evaluated
/// by parts with a vanishing bracket against the continuous finite-variation
/// integrator `X^c`; the left-point sum is reported alongside.
pub fn run_continuous_limit(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let jumpy = |k: GeneratorKind| k != GeneratorKind::Wiener;
    if jumpy(config.x.kind) || config.y.as_ref().is_some_and(|y| jumpy(y.kind)) {
        return Err(Error::JumpyGeneratorInContinuousExperiment);
    }
    let same = config.y.is_none();
    let per_rep: Vec<Vec<Sample>> = (0..config.replications)
        .into_par_iter()
        .map(|r| {
            let (gx, gy) = config.paths(r)?;
            let x = &gx.path;
            let y = gy.as_ref().map_or(x, |g| &g.path);
            let full = Partition::full(x);
            let bracket = discrete_bracket(x, y, &full)?.value;
            let reference = ito_reference_integral(y, x)?.value + bracket;
            let closed_form = if same {
                let qv = discrete_bracket(x, x, &full)?.value;
                Some(0.5 * x.last_value().powi(2) + 0.5 * qv)
            } else {
                None
            };
            let median = median_abs_increment(x);
            config
                .c_values
                .iter()
                .map(|&c| {
                    let trunc = truncated_path(x, c)?;
                    let xc = &trunc.truncated_path;
                    let observed = stieltjes_by_parts(y, xc, &[])?.value;
                    let left = stieltjes_left(y, xc)?.value;
                    Ok(Sample {
                        observed,
                        reference,
                        tvc: trunc.tv,
                        guard_ratio: guard_ratio(c, median),
                        identity_ok: by_parts_identity_holds(y, xc)?,
                        left_point_err: left - reference,
                        by_parts_err: observed - reference,
                        closed_form_err: closed_form.map(|t| observed - t),
                        ..Sample::default()
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(assemble(config, "by_parts: Y_T X^c_T - Y_0 X^c_0 - sum X^c_- dY", per_rep))
}

/// Jump-case study. The observed integral is the left-point sum
/// `Σ Y_{t-} ΔX^c`; the reference is `∫ Y_- dX + [X^cont, Y^cont]_T`.
pub fn run_jump_limit(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let per_rep: Vec<Vec<Sample>> = (0..config.replications)
        .into_par_iter()
        .map(|r| {
            let (gx, gy) = config.paths(r)?;
            let gy = gy.as_ref().unwrap_or(&gx);
            let (x, y) = (&gx.path, &gy.path);
            let (x_cont, _) = split_parts(&gx)?;
            let (y_cont, _) = split_parts(gy)?;
            let full = Partition::full(x);
            let reference =
                ito_reference_integral(y, x)?.value + discrete_bracket(&x_cont, &y_cont, &full)?.value;
            let jump_bracket = jump_covariation(&gx, gy)?.value;
            let common = common_jump_indices(&gx, gy);
            let min_jump = gx
                .jump_increments()
                .values()
                .map(|d| d.abs())
                .filter(|d| *d > 0.0)
                .fold(f64::INFINITY, f64::min);
            let median = median_abs_increment(x);
            config
                .c_values
                .iter()
                .map(|&c| {
                    let c_eff = if config.c_relative_to_min_jump && min_jump.is_finite() {
                        c * min_jump
                    } else {
                        c
                    };
                    let trunc = truncated_path(x, c_eff)?;
                    let xc = &trunc.truncated_path;
                    let observed = stieltjes_left(y, xc)?.value;
                    let by_parts = stieltjes_by_parts(y, xc, &common)?.value;
                    Ok(Sample {
                        observed,
                        reference,
                        tvc: trunc.tv,
                        guard_ratio: guard_ratio(c_eff, median),
                        identity_ok: by_parts_identity_holds(y, xc)?,
                        left_point_err: observed - reference,
                        by_parts_err: by_parts - reference,
                        jump_bracket_truncated: Some(jump_covariation_truncated(&gx, xc, gy)?.value),
                        jump_bracket: Some(jump_bracket),
                        ..Sample::default()
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(assemble(config, "left_point: sum Y_- dX^c", per_rep))
}

/// Decomposition study: for each `c`, variation of `X^c` and of `X - X^c` along
/// nested dyadic partitions of a Wiener path.
pub fn run_decomposition_study(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    if config.x.kind != GeneratorKind::Wiener {
        return Err(Error::InvalidExperiment(
            "decomposition study requires a wiener generator".into(),
        ));
    }
    let levels = config.levels();
    let per_rep: Vec<Vec<Sample>> = (0..config.replications)
        .into_par_iter()
        .map(|r| {
            let (gx, _) = config.paths(r)?;
            let x = &gx.path;
            let parts = dyadic_partitions(x, levels)?;
            let median = median_abs_increment(x);
            config
                .c_values
                .iter()
                .map(|&c| {
                    let (trend, noise) = decompose(x, c)?;
                    let tvc = truncated_path(x, c)?.tv;
                    let trend_tv = trend.total_variation();
                    let rows = parts
                        .iter()
                        .map(|part| level_sample(x, &trend, &noise, tvc, part))
                        .collect::<Result<Vec<_>>>()?;
                    Ok(Sample {
                        observed: trend_tv,
                        reference: tvc,
                        tvc,
                        guard_ratio: guard_ratio(c, median),
                        identity_ok: (trend_tv - tvc).abs() <= IDENTITY_TOL,
                        left_point_err: 0.0,
                        by_parts_err: 0.0,
                        levels: Some(rows),
                        ..Sample::default()
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(assemble(config, "total variation of X^c on the full grid vs TV^c", per_rep))
}

fn level_sample(
    x: &SampledPath,
    trend: &SampledPath,
    noise: &SampledPath,
    tvc: f64,
    part: &Partition,
) -> Result<LevelSample> {
    let mesh = part.mesh();
    let trend_tv_mesh_bounded = pvar_mesh_bounded(trend, 1.0, mesh)?;
    let v2_path = pvar_sum(x, part, 2.0)?;
    let v2_trend = pvar_sum(trend, part, 2.0)?;
    let v2_noise = pvar_sum(noise, part, 2.0)?;
    let v2_trend_bound = modulus_of_continuity(trend, mesh)? * tvc;
    Ok(LevelSample {
        level: part.level().unwrap_or(0),
        mesh,
        noise_tv: pvar_sum(noise, part, 1.0)?,
        trend_tv_nested: pvar_sum(trend, part, 1.0)?,
        trend_tv_mesh_bounded,
        deviation: (trend_tv_mesh_bounded - tvc).abs(),
        v2_path,
        v2_trend,
        v2_noise,
        v2_trend_bound,
        minkowski_ok: (v2_path.sqrt() - v2_noise.sqrt()).abs() <= v2_trend.sqrt() + CHECK_TOL,
        bound_ok: v2_trend <= v2_trend_bound + CHECK_TOL,
    })
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        0.0
    } else {
        s / n as f64
    }
}

fn std_dev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs.iter().copied());
    let ss: f64 = xs.iter().map(|x| (x - m).powi(2)).sum();
    (ss / (xs.len() - 1) as f64).sqrt()
}

fn assemble(config: &ExperimentConfig, observable: &str, per_rep: Vec<Vec<Sample>>) -> ExperimentReport {
    let rows = config
        .c_values
        .iter()
        .enumerate()
        .map(|(ci, &c)| {
            let samples: Vec<&Sample> = per_rep.iter().map(|r| &r[ci]).collect();
            let errs: Vec<f64> = samples.iter().map(|s| s.observed - s.reference).collect();
            let abs_err_sum: f64 = errs.iter().map(|e| e.abs()).sum();
            let abs_ref_sum: f64 = samples.iter().map(|s| s.reference.abs()).sum();
            let opt_mean = |f: &dyn Fn(&Sample) -> Option<f64>| -> Option<f64> {
                let vals: Option<Vec<f64>> = samples.iter().map(|s| f(s)).collect();
                vals.map(|v| mean(v.into_iter()))
            };
            ReportRow {
                c,
                mean_err: mean(errs.iter().copied()),
                std_err: std_dev(&errs),
                mean_abs_err: mean(errs.iter().map(|e| e.abs())),
                mean_abs_reference: mean(samples.iter().map(|s| s.reference.abs())),
                relative_abs_err: (abs_ref_sum > 0.0).then(|| abs_err_sum / abs_ref_sum),
                mean_tvc: mean(samples.iter().map(|s| s.tvc)),
                mean_guard_ratio: mean(samples.iter().map(|s| s.guard_ratio)),
                guard_warnings: samples.iter().filter(|s| s.guard_ratio < GUARD_FACTOR).count(),
                identity_violations: samples.iter().filter(|s| !s.identity_ok).count(),
                left_point_mean_abs_err: opt_mean(&|s| s.levels.is_none().then(|| s.left_point_err.abs())),
                by_parts_mean_abs_err: opt_mean(&|s| s.levels.is_none().then(|| s.by_parts_err.abs())),
                closed_form_mean_abs_err: opt_mean(&|s| s.closed_form_err.map(f64::abs)),
                mean_jump_bracket_truncated: opt_mean(&|s| s.jump_bracket_truncated),
                mean_jump_bracket: opt_mean(&|s| s.jump_bracket),
                levels: aggregate_levels(&samples),
            }
        })
        .collect();
    ExperimentReport {
        config: config.clone(),
        observable: observable.to_string(),
        guard_factor: GUARD_FACTOR,
        identity_tolerance: IDENTITY_TOL,
        rows,
    }
}

fn aggregate_levels(samples: &[&Sample]) -> Option<Vec<LevelRow>> {
    let per: Vec<&Vec<LevelSample>> = samples.iter().map(|s| s.levels.as_ref()).collect::<Option<_>>()?;
    let count = per.first().map_or(0, |v| v.len());
    Some(
        (0..count)
            .map(|li| {
                let at = |f: fn(&LevelSample) -> f64| mean(per.iter().map(|v| f(&v[li])));
                LevelRow {
                    level: per[0][li].level,
                    mesh: per[0][li].mesh,
                    noise_tv: at(|l| l.noise_tv),
                    trend_tv_nested: at(|l| l.trend_tv_nested),
                    trend_tv_mesh_bounded: at(|l| l.trend_tv_mesh_bounded),
                    trend_tv_max_deviation: per.iter().map(|v| v[li].deviation).fold(0.0, f64::max),
                    v2_path: at(|l| l.v2_path),
                    v2_trend: at(|l| l.v2_trend),
                    v2_noise: at(|l| l.v2_noise),
                    v2_trend_bound: at(|l| l.v2_trend_bound),
                    minkowski_violations: per.iter().filter(|v| !v[li].minkowski_ok).count(),
                    modulus_bound_violations: per.iter().filter(|v| !v[li].bound_ok).count(),
                }
            })
            .collect(),
    )
}

/// Dispatches on `config.target`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    match config.target {
        TargetKind::ItoPlusBracket => run_continuous_limit(config),
        TargetKind::ItoPlusContBracket => run_jump_limit(config),
        TargetKind::DecompositionTvGrowth => run_decomposition_study(config),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wiener_config(target: TargetKind) -> ExperimentConfig {
        ExperimentConfig {
            x: GeneratorConfig::wiener(0.0, 1.0, 1.0, 1024, 0),
            y: None,
            c_values: vec![0.4, 0.2, 0.1],
            replications: 8,
            base_seed: 99,
            target,
            steps: 1024,
            c_relative_to_min_jump: false,
            levels: None,
        }
    }

    #[test]
    fn config_validation() {
        let mut cfg = wiener_config(TargetKind::ItoPlusBracket);
        cfg.c_values = vec![0.1, 0.2];
        assert!(cfg.validate().is_err());
        cfg.c_values = vec![0.1, 0.0];
        assert!(cfg.validate().is_err());
        cfg.c_values = vec![0.1];
        cfg.replications = 0;
        assert!(cfg.validate().is_err());
        cfg.replications = 1;
        cfg.y = Some(GeneratorConfig::wiener(0.0, 1.0, 2.0, 10, 0));
        assert!(matches!(cfg.validate(), Err(Error::GridMismatch)));
    }

    #[test]
    fn continuous_rejects_jumps() {
        let mut cfg = wiener_config(TargetKind::ItoPlusBracket);
        cfg.y = Some(GeneratorConfig::compound_poisson(3.0, 0.0, 1.0, 1.0, 10, 0));
        assert!(matches!(
            run_continuous_limit(&cfg),
            Err(Error::JumpyGeneratorInContinuousExperiment)
        ));
    }

    #[test]
    fn drift_only_error_is_order_c() {
        let mut cfg = wiener_config(TargetKind::ItoPlusBracket);
        cfg.x = GeneratorConfig::wiener(1.0, 0.0, 1.0, 1024, 0);
        cfg.y = Some(GeneratorConfig::wiener(-0.5, 0.0, 1.0, 1024, 0));
        cfg.c_values = vec![0.4, 0.2, 0.1, 0.05, 0.025];
        cfg.replications = 2;
        let rep = run_continuous_limit(&cfg).unwrap();
        // |err| <= c (|Y_T| + TV(Y)) for a deterministic finite-variation pair
        for row in &rep.rows {
            assert!(row.mean_abs_err <= row.c * (0.5 + 0.5) + 1e-12, "{row:?}");
        }
        assert!(rep.rows.windows(2).all(|w| w[1].mean_abs_err < w[0].mean_abs_err));
    }

    #[test]
    fn huge_c_gives_zero_observed() {
        let mut cfg = wiener_config(TargetKind::ItoPlusBracket);
        cfg.c_values = vec![1e6];
        let rep = run_continuous_limit(&cfg).unwrap();
        let row = &rep.rows[0];
        assert_eq!(row.mean_tvc, 0.0);
        assert!((row.mean_abs_err - row.mean_abs_reference).abs() < 1e-12);
    }

    #[test]
    fn jump_free_jump_study_matches_reference_semantics() {
        let cfg = wiener_config(TargetKind::ItoPlusContBracket);
        let jump = run_jump_limit(&cfg).unwrap();
        let cont = run_continuous_limit(&cfg).unwrap();
        for (a, b) in jump.rows.iter().zip(&cont.rows) {
            assert_eq!(a.mean_abs_reference, b.mean_abs_reference);
            assert_eq!(a.mean_tvc, b.mean_tvc);
            assert_eq!(a.left_point_mean_abs_err, b.left_point_mean_abs_err);
            assert_eq!(a.by_parts_mean_abs_err, b.by_parts_mean_abs_err);
            assert_eq!(a.mean_jump_bracket, Some(0.0));
        }
    }

    #[test]
    fn zero_integrand_gives_zero_everywhere() {
        let mut cfg = wiener_config(TargetKind::ItoPlusContBracket);
        cfg.x = GeneratorConfig::compound_poisson(5.0, 0.0, 1.0, 1.0, 256, 0);
        cfg.y = Some(GeneratorConfig::wiener(0.0, 0.0, 1.0, 256, 0));
        let rep = run_jump_limit(&cfg).unwrap();
        for row in &rep.rows {
            assert_eq!(row.mean_abs_err, 0.0);
            assert_eq!(row.mean_abs_reference, 0.0);
            assert_eq!(row.relative_abs_err, None);
        }
    }

    #[test]
    fn deterministic_reports_and_replication_prefix_stability() {
        let cfg = wiener_config(TargetKind::ItoPlusBracket);
        let a = run_experiment(&cfg).unwrap().to_json().unwrap();
        let b = run_experiment(&cfg).unwrap().to_json().unwrap();
        assert_eq!(a, b);
        let (x3, _) = cfg.paths(3).unwrap();
        let more = ExperimentConfig {
            replications: 20,
            ..cfg.clone()
        };
        assert_eq!(more.paths(3).unwrap().0, x3);
    }

    #[test]
    fn decomposition_with_huge_c() {
        let mut cfg = wiener_config(TargetKind::DecompositionTvGrowth);
        cfg.c_values = vec![1e6];
        cfg.replications = 2;
        let rep = run_decomposition_study(&cfg).unwrap();
        let levels = rep.rows[0].levels.as_ref().unwrap();
        assert_eq!(levels.len(), 10);
        for l in levels {
            assert_eq!(l.v2_path, l.v2_noise);
            assert_eq!(l.v2_trend, 0.0);
            assert_eq!(l.trend_tv_mesh_bounded, 0.0);
        }
    }

    #[test]
    fn tsv_layout() {
        let cfg = wiener_config(TargetKind::ItoPlusBracket);
        let tsv = run_experiment(&cfg).unwrap().to_tsv();
        let mut lines = tsv.lines();
        assert_eq!(lines.next(), Some("c\tmean_err\tstd_err\tmean_tvc"));
        assert_eq!(lines.count(), 3);
    }
}
