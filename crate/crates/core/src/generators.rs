//! Seeded generators for Wiener, compound Poisson and jump-diffusion paths.
//!
//! Every path carries the ground truth needed by the experiments: the
//! quadratic variation of its continuous part, the grid-aligned jumps and
//! the drift contribution.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::path::SampledPath;

const CONTINUOUS_STREAM: u64 = 0;
const JUMP_STREAM: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    Wiener,
    CompoundPoisson,
    JumpDiffusion,
}

impl GeneratorKind {
    pub fn has_jumps(self) -> bool {
        !matches!(self, GeneratorKind::Wiener)
    }
}

/// Parameters of a generated path. Rates are per unit time, `volatility`
/// per square-root time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorConfig {
    pub kind: GeneratorKind,
    #[serde(default)]
    pub drift: f64,
    #[serde(default)]
    pub volatility: f64,
    #[serde(default)]
    pub jump_rate: f64,
    #[serde(default)]
    pub jump_mean: f64,
    #[serde(default)]
    pub jump_sd: f64,
    pub horizon: f64,
    pub steps: usize,
    #[serde(default)]
    pub seed: u64,
}

impl GeneratorConfig {
    pub fn wiener(drift: f64, volatility: f64, horizon: f64, steps: usize, seed: u64) -> Self {
        Self {
            kind: GeneratorKind::Wiener,
            drift,
            volatility,
            jump_rate: 0.0,
            jump_mean: 0.0,
            jump_sd: 0.0,
            horizon,
            steps,
            seed,
        }
    }

    pub fn compound_poisson(
        jump_rate: f64,
        jump_mean: f64,
        jump_sd: f64,
        horizon: f64,
        steps: usize,
        seed: u64,
    ) -> Self {
        Self {
            kind: GeneratorKind::CompoundPoisson,
            drift: 0.0,
            volatility: 0.0,
            jump_rate,
            jump_mean,
            jump_sd,
            horizon,
            steps,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("drift", self.drift),
            ("volatility", self.volatility),
            ("jump_rate", self.jump_rate),
            ("jump_mean", self.jump_mean),
            ("jump_sd", self.jump_sd),
            ("horizon", self.horizon),
        ];
        if let Some((name, _)) = finite.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidConfig(format!("{name} must be finite")));
        }
        if self.volatility < 0.0 {
            return Err(Error::InvalidConfig("volatility must be >= 0".into()));
        }
        if self.jump_rate < 0.0 {
            return Err(Error::InvalidConfig("jump_rate must be >= 0".into()));
        }
        if self.jump_sd < 0.0 {
            return Err(Error::InvalidConfig("jump_sd must be >= 0".into()));
        }
        if self.horizon <= 0.0 {
            return Err(Error::InvalidConfig("horizon must be > 0".into()));
        }
        if self.steps == 0 {
            return Err(Error::InvalidConfig("steps must be >= 1".into()));
        }
        if self.kind == GeneratorKind::CompoundPoisson && (self.volatility != 0.0 || self.drift != 0.0) {
            return Err(Error::InvalidConfig(
                "compound_poisson is a pure-jump process: drift and volatility must be 0".into(),
            ));
        }
        Ok(())
    }
}

/// A jump snapped to grid index `index` (time `time`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jump {
    pub time: f64,
    pub index: usize,
    pub size: f64,
}

/// A simulated path with its ground-truth decomposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratedPath {
    pub config: GeneratorConfig,
    pub path: SampledPath,
    /// Quadratic variation of the continuous part, `σ²T`.
    pub true_qv_cont: f64,
    /// Jumps sorted by grid index; several jumps may share an index.
    pub jumps: Vec<Jump>,
    /// `μT`.
    pub drift_part: f64,
    /// The simulated continuous component; `path = continuous + jump sum`.
    pub continuous: Vec<f64>,
}

/// SplitMix64 finalizer.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent seed from a base seed and an index.
pub fn mix_seed(base: u64, index: u64) -> u64 {
    splitmix64(splitmix64(base) ^ splitmix64(index.wrapping_mul(0xD6E8_FEB8_6659_FD93)))
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix_seed(seed, id))
}

/// Simulates a path; a pure function of the config, seed included.
pub fn generate(config: &GeneratorConfig) -> Result<GeneratedPath> {
    config.validate()?;
    let n = config.steps;
    let dt = config.horizon / n as f64;
    let times = SampledPath::uniform_grid(config.horizon, n);

    let mut continuous = vec![0.0; n + 1];
    if config.kind != GeneratorKind::CompoundPoisson {
        let mut rng = stream(config.seed, CONTINUOUS_STREAM);
        let drift_step = config.drift * dt;
        let scale = config.volatility * dt.sqrt();
        for i in 0..n {
            let z: f64 = StandardNormal.sample(&mut rng);
            continuous[i + 1] = continuous[i] + drift_step + scale * z;
        }
    }

    let mut jumps = Vec::new();
    if config.kind.has_jumps() && config.jump_rate > 0.0 {
        let mut rng = stream(config.seed, JUMP_STREAM);
        let intensity = config.jump_rate * config.horizon;
        let count = Poisson::new(intensity)
            .map_err(|e| Error::InvalidConfig(format!("jump intensity: {e}")))?
            .sample(&mut rng) as usize;
        let sizes = Normal::new(config.jump_mean, config.jump_sd)
            .map_err(|e| Error::InvalidConfig(format!("jump size law: {e}")))?;
        for _ in 0..count {
            let t: f64 = rng.random_range(0.0..config.horizon);
            // next grid point at or after t; a jump at t = 0 lands on the first step
            let index = ((t / dt).ceil() as usize).clamp(1, n);
            jumps.push(Jump {
                time: times[index],
                index,
                size: sizes.sample(&mut rng),
            });
        }
        jumps.sort_by_key(|j| j.index);
    }

    let jump_sum = running_jump_sum(&jumps, n + 1);
    let values: Vec<f64> = continuous.iter().zip(&jump_sum).map(|(c, j)| c + j).collect();
    let path = SampledPath::new(times, values)?;

    let (true_qv_cont, drift_part) = match config.kind {
        GeneratorKind::CompoundPoisson => (0.0, 0.0),
        _ => (
            config.volatility * config.volatility * config.horizon,
            config.drift * config.horizon,
        ),
    };
    Ok(GeneratedPath {
        config: config.clone(),
        path,
        true_qv_cont,
        jumps,
        drift_part,
        continuous,
    })
}

fn running_jump_sum(jumps: &[Jump], len: usize) -> Vec<f64> {
    let mut increments = vec![0.0; len];
    for j in jumps {
        increments[j.index] += j.size;
    }
    let mut acc = 0.0;
    increments
        .into_iter()
        .map(|d| {
            acc += d;
            acc
        })
        .collect()
}

impl GeneratedPath {
    /// Total jump per grid index, summing jumps that share an index.
    pub fn jump_increments(&self) -> BTreeMap<usize, f64> {
        let mut out = BTreeMap::new();
        for j in &self.jumps {
            *out.entry(j.index).or_insert(0.0) += j.size;
        }
        out
    }

    pub fn is_jump_free(&self) -> bool {
        self.jumps.is_empty()
    }
}

/// Splits a generated path into its continuous part and its running jump sum.
///
/// The two parts add back to the path bit-exactly because the generator
/// builds the path as exactly that sum.
pub fn split_parts(gp: &GeneratedPath) -> Result<(SampledPath, SampledPath)> {
    let jump_values = running_jump_sum(&gp.jumps, gp.path.len());
    let continuous = gp.path.with_values(gp.continuous.clone())?;
    let jump_path = gp.path.with_values(jump_values)?;
    Ok((continuous, jump_path))
}
