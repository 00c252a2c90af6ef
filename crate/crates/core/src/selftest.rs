//! Reduced-size oracle and invariant checks, runnable from the CLI.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::generators::{generate, GeneratorConfig, GeneratorKind};
use crate::path::{Partition, SampledPath};
use crate::stieltjes::{discrete_bracket, stieltjes_left};
use crate::truncation::{truncated_path, truncated_variations, truncated_variations_bruteforce};
use crate::variation::{check_pvar_bound_for_truncated, check_pvar_triangle, pvar_mesh_bounded};

const TOL: f64 = 1e-9;

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SelftestReport {
    pub checks: Vec<CheckOutcome>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckOutcome::passed)
    }
}

struct Check {
    outcome: CheckOutcome,
}

impl Check {
    fn new(name: &str) -> Self {
        Check {
            outcome: CheckOutcome {
                name: name.to_string(),
                cases: 0,
                failures: 0,
                first_failure: None,
            },
        }
    }

    fn record(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.outcome.cases += 1;
        if !ok {
            self.outcome.failures += 1;
            if self.outcome.first_failure.is_none() {
                self.outcome.first_failure = Some(detail());
            }
        }
    }
}

fn random_path(rng: &mut ChaCha8Rng, max_len: usize) -> SampledPath {
    let n = rng.random_range(1..=max_len);
    let times = (0..n).map(|i| i as f64).collect();
    let values = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
    SampledPath::new(times, values).expect("valid random path")
}

fn generated_paths(per_kind: usize, steps: usize) -> Result<Vec<SampledPath>> {
    let mut out = Vec::new();
    for (k, kind) in [
        GeneratorKind::Wiener,
        GeneratorKind::CompoundPoisson,
        GeneratorKind::JumpDiffusion,
    ]
    .into_iter()
    .enumerate()
    {
        for seed in 0..per_kind as u64 {
            let cfg = GeneratorConfig {
                kind,
                drift: if kind == GeneratorKind::CompoundPoisson { 0.0 } else { 0.3 },
                volatility: if kind == GeneratorKind::CompoundPoisson { 0.0 } else { 1.0 },
                jump_rate: 10.0,
                jump_mean: 0.0,
                jump_sd: 1.0,
                horizon: 1.0,
                steps,
                seed: seed * 3 + k as u64,
            };
            out.push(generate(&cfg)?.path);
        }
    }
    Ok(out)
}

/// Exhaustive mesh-bounded p-variation over spanning subsequences.
fn mesh_bounded_exhaustive(path: &SampledPath, p: f64, delta: f64) -> f64 {
    let n = path.len();
    let (t, x) = (path.times(), path.values());
    let mut best = f64::NEG_INFINITY;
    for mask in 0u32..(1u32 << n.saturating_sub(2)) {
        let mut chosen = vec![0];
        chosen.extend((1..n - 1).filter(|i| mask & (1 << (i - 1)) != 0));
        if n > 1 {
            chosen.push(n - 1);
        }
        if chosen.windows(2).any(|w| t[w[1]] - t[w[0]] > delta) {
            continue;
        }
        let s: f64 = chosen.windows(2).map(|w| (x[w[1]] - x[w[0]]).abs().powf(p)).sum();
        best = best.max(s);
    }
    best
}

pub fn run() -> Result<SelftestReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e1f_7e57);
    let mut checks = Vec::new();

    let mut oracle = Check::new("truncated variations match exhaustive oracle");
    for _ in 0..300 {
        let path = random_path(&mut rng, 10);
        for c in [0.0, 0.3, 1.0] {
            let fast = truncated_variations(&path, c)?;
            let slow = truncated_variations_bruteforce(&path, c)?;
            let ok = (fast.utv - slow.utv).abs() <= TOL
                && (fast.dtv - slow.dtv).abs() <= TOL
                && (fast.tv - slow.tv).abs() <= TOL;
            oracle.record(ok, || format!("{:?} c={c}: {fast:?} vs {slow:?}", path.values()));
        }
    }
    checks.push(oracle.outcome);

    let mut props = Check::new("truncated path properties (tube, increments, variation, jumps, prefix)");
    for path in generated_paths(20, 256)? {
        let x = path.values();
        for c in [0.05, 0.2, 1.0] {
            let res = truncated_path(&path, c)?;
            let xc = res.truncated_path.values();
            let tube = x.iter().zip(xc).all(|(a, b)| (a - b).abs() <= c + TOL);
            let noise: Vec<f64> = x.iter().zip(xc).map(|(a, b)| a - b).collect();
            let (lo, hi) = noise
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
            let increments = hi - lo <= c + TOL;
            let variation = (res.truncated_path.total_variation() - res.tv).abs() <= TOL
                && (res.utv + res.dtv - res.tv).abs() <= TOL;
            let jumps = x
                .windows(2)
                .zip(xc.windows(2))
                .all(|(a, b)| (b[1] - b[0]).abs() <= (a[1] - a[0]).abs() + TOL);
            let k = x.len() / 2;
            let prefix = truncated_path(&path.prefix(k), c)?.truncated_path.values() == &xc[..=k];
            props.record(tube && increments && variation && jumps && prefix, || {
                format!("c={c}: tube={tube} inc={increments} var={variation} jumps={jumps} prefix={prefix}")
            });
        }
    }
    checks.push(props.outcome);

    let mut sbp = Check::new("summation by parts");
    let paths = generated_paths(10, 256)?;
    for pair in paths.windows(2) {
        let (y, x) = (&pair[0], &pair[1]);
        let lhs = stieltjes_left(y, x)?.value
            + stieltjes_left(x, y)?.value
            + discrete_bracket(x, y, &Partition::full(x))?.value;
        let rhs = y.last_value() * x.last_value() - y.first_value() * x.first_value();
        sbp.record((lhs - rhs).abs() <= TOL, || format!("{lhs} vs {rhs}"));
    }
    checks.push(sbp.outcome);

    let mut dp = Check::new("mesh-bounded p-variation matches exhaustive search");
    for _ in 0..200 {
        let path = random_path(&mut rng, 9);
        if path.len() < 2 {
            continue;
        }
        let p = [0.5, 1.0, 1.5, 2.0, 3.0][rng.random_range(0..5)];
        let delta = rng.random_range(1..path.len()) as f64;
        let fast = pvar_mesh_bounded(&path, p, delta)?;
        let slow = mesh_bounded_exhaustive(&path, p, delta);
        dp.record((fast - slow).abs() <= TOL, || format!("p={p} delta={delta}: {fast} vs {slow}"));
    }
    checks.push(dp.outcome);

    let mut ineq = Check::new("modulus bound and Minkowski inequality");
    for _ in 0..200 {
        let n = rng.random_range(2..40);
        let times: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let f = SampledPath::new(times.clone(), (0..n).map(|_| rng.random_range(-2.0..2.0)).collect())?;
        let g = SampledPath::new(times, (0..n).map(|_| rng.random_range(-2.0..2.0)).collect())?;
        let mut idx: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.5)).collect();
        if idx.is_empty() {
            idx.push(0);
        }
        let part = Partition::new(&f, idx)?;
        let p = [1.5, 2.0, 3.0][rng.random_range(0..3)];
        let c = rng.random_range(0.0..1.0);
        let bound = check_pvar_bound_for_truncated(&f, c, &part, p)?;
        let tri = check_pvar_triangle(&f, &g, &part, p)?;
        ineq.record(bound.holds && tri.holds, || format!("{bound:?} {tri:?}"));
    }
    checks.push(ineq.outcome);

    Ok(SelftestReport { checks })
}
