//! Truncated variation of sampled paths and the finite-variation
//! approximation `X^c = X_0 + UTV^c - DTV^c`.
//!
//! For a grid path `x_0, ..., x_n` and `c >= 0`:
//!
//! * `UTV^c` is the supremum over index subsequences `i_0 < ... < i_k` of
//!   `Σ max(x_{i_j} - x_{i_{j-1}} - c, 0)`,
//! * `DTV^c` the same with the sign of the increment reversed,
//! * `TV^c` the same with `|x_{i_j} - x_{i_{j-1}}| - c`.
//!
//! For a step function these grid suprema are the continuous-time values.
//!
//! The streaming evaluation keeps, for each functional, the best value `B`
//! of a subsequence ending at some earlier point `j` together with
//! `max_j (B_j - x_j)` and `max_j (B_j + x_j)`. Appending `x_k` gives
//!
//! ```text
//! U_k = max(U_{k-1}, max_j (U_j - x_j) + x_k - c)
//! D_k = max(D_{k-1}, max_j (D_j + x_j) - x_k - c)
//! T_k = max(T_{k-1}, max_j (T_j - x_j) + x_k - c, max_j (T_j + x_j) - x_k - c)
//! ```
//!
//! which is exact, O(1) per sample and only looks at the prefix.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::path::SampledPath;

/// Longest path accepted by the exhaustive oracle.
pub const BRUTEFORCE_MAX_LEN: usize = 16;

/// A finite truncation level `c >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct TruncationLevel(f64);

impl TruncationLevel {
    pub fn new(c: f64) -> Result<Self> {
        if c.is_finite() && c >= 0.0 {
            Ok(Self(c))
        } else {
            Err(Error::NegativeC(c))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// `(UTV^c, DTV^c, TV^c)` of a whole path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncatedVariations {
    pub utv: f64,
    pub dtv: f64,
    pub tv: f64,
}

/// Truncated variations and the truncated path `X^c` on the input grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationResult {
    pub utv: f64,
    pub dtv: f64,
    pub tv: f64,
    pub truncated_path: SampledPath,
}

/// Per-prefix truncated variations; element `k` covers samples `0..=k`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunningVariations {
    pub utv: Vec<f64>,
    pub dtv: Vec<f64>,
    pub tv: Vec<f64>,
}

/// Online tracker of the three truncated variations.
#[derive(Debug, Clone)]
pub struct TruncationTracker {
    c: f64,
    utv: f64,
    dtv: f64,
    tv: f64,
    utv_minus: f64,
    dtv_plus: f64,
    tv_minus: f64,
    tv_plus: f64,
}

impl TruncationTracker {
    pub fn new(level: TruncationLevel, first: f64) -> Self {
        Self {
            c: level.value(),
            utv: 0.0,
            dtv: 0.0,
            tv: 0.0,
            utv_minus: -first,
            dtv_plus: first,
            tv_minus: -first,
            tv_plus: first,
        }
    }

    pub fn push(&mut self, x: f64) {
        let c = self.c;
        self.utv = self.utv.max(self.utv_minus + x - c);
        self.dtv = self.dtv.max(self.dtv_plus - x - c);
        self.tv = self.tv.max(self.tv_minus + x - c).max(self.tv_plus - x - c);
        self.utv_minus = self.utv_minus.max(self.utv - x);
        self.dtv_plus = self.dtv_plus.max(self.dtv + x);
        self.tv_minus = self.tv_minus.max(self.tv - x);
        self.tv_plus = self.tv_plus.max(self.tv + x);
    }

    pub fn current(&self) -> TruncatedVariations {
        TruncatedVariations {
            utv: self.utv,
            dtv: self.dtv,
            tv: self.tv,
        }
    }
}

/// Exact `(UTV^c, DTV^c, TV^c)` in one pass.
pub fn truncated_variations(path: &SampledPath, c: f64) -> Result<TruncatedVariations> {
    let level = TruncationLevel::new(c)?;
    let values = path.values();
    let mut tracker = TruncationTracker::new(level, values[0]);
    for &x in &values[1..] {
        tracker.push(x);
    }
    Ok(tracker.current())
}

/// Exhaustive maximisation over every index subsequence. Exponential cost,
/// limited to [`BRUTEFORCE_MAX_LEN`] points.
pub fn truncated_variations_bruteforce(path: &SampledPath, c: f64) -> Result<TruncatedVariations> {
    TruncationLevel::new(c)?;
    let x = path.values();
    let n = x.len();
    if n > BRUTEFORCE_MAX_LEN {
        return Err(Error::TooLong {
            len: n,
            max: BRUTEFORCE_MAX_LEN,
        });
    }
    let mut best = TruncatedVariations {
        utv: 0.0,
        dtv: 0.0,
        tv: 0.0,
    };
    let mut chosen = Vec::with_capacity(n);
    for mask in 1u32..(1u32 << n) {
        chosen.clear();
        chosen.extend((0..n).filter(|i| mask & (1 << i) != 0));
        let (mut u, mut d, mut t) = (0.0, 0.0, 0.0);
        for w in chosen.windows(2) {
            let inc = x[w[1]] - x[w[0]];
            u += (inc - c).max(0.0);
            d += (-inc - c).max(0.0);
            t += (inc.abs() - c).max(0.0);
        }
        best.utv = best.utv.max(u);
        best.dtv = best.dtv.max(d);
        best.tv = best.tv.max(t);
    }
    Ok(best)
}

/// Truncated variations of every prefix of the path.
pub fn running_truncated_variations(path: &SampledPath, c: f64) -> Result<RunningVariations> {
    let level = TruncationLevel::new(c)?;
    let values = path.values();
    let n = values.len();
    let mut out = RunningVariations {
        utv: Vec::with_capacity(n),
        dtv: Vec::with_capacity(n),
        tv: Vec::with_capacity(n),
    };
    let mut tracker = TruncationTracker::new(level, values[0]);
    for (k, &x) in values.iter().enumerate() {
        if k > 0 {
            tracker.push(x);
        }
        let cur = tracker.current();
        out.utv.push(cur.utv);
        out.dtv.push(cur.dtv);
        out.tv.push(cur.tv);
    }
    Ok(out)
}

/// Builds `X^c_k = x_0 + UTV^c(prefix k) - DTV^c(prefix k)`.
pub fn truncated_path(path: &SampledPath, c: f64) -> Result<TruncationResult> {
    let level = TruncationLevel::new(c)?;
    let values = path.values();
    let x0 = values[0];
    let mut tracker = TruncationTracker::new(level, x0);
    let mut trunc = Vec::with_capacity(values.len());
    trunc.push(x0);
    for &x in &values[1..] {
        tracker.push(x);
        let cur = tracker.current();
        trunc.push(x0 + cur.utv - cur.dtv);
    }
    let fin = tracker.current();
    Ok(TruncationResult {
        utv: fin.utv,
        dtv: fin.dtv,
        tv: fin.tv,
        truncated_path: path.with_values(trunc)?,
    })
}

/// Splits the path into the finite-variation trend `X^c` and the residual
/// `X - X^c`, whose amplitude is at most `c`.
pub fn decompose(path: &SampledPath, c: f64) -> Result<(SampledPath, SampledPath)> {
    let trend = truncated_path(path, c)?.truncated_path;
    let noise: Vec<f64> = path
        .values()
        .iter()
        .zip(trend.values())
        .map(|(x, t)| x - t)
        .collect();
    let noise = path.with_values(noise)?;
    Ok((trend, noise))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[f64]) -> SampledPath {
        let t = (0..v.len()).map(|i| i as f64).collect();
        SampledPath::new(t, v.to_vec()).unwrap()
    }

    fn tv3(v: TruncatedVariations) -> (f64, f64, f64) {
        (v.utv, v.dtv, v.tv)
    }

    #[test]
    fn worked_examples() {
        assert_eq!(tv3(truncated_variations(&p(&[2.0; 5]), 0.7).unwrap()), (0.0, 0.0, 0.0));
        assert_eq!(tv3(truncated_variations(&p(&[0.0, 5.0]), 0.0).unwrap()), (5.0, 0.0, 5.0));
        assert_eq!(tv3(truncated_variations(&p(&[0.0, 5.0]), 1.0).unwrap()), (4.0, 0.0, 4.0));
        assert_eq!(
            tv3(truncated_variations(&p(&[0.0, 3.0, 1.0, 4.0]), 1.0).unwrap()),
            (4.0, 1.0, 5.0)
        );
    }

    #[test]
    fn bruteforce_examples() {
        assert_eq!(
            tv3(truncated_variations_bruteforce(&p(&[0.0, 1.0]), 0.5).unwrap()),
            (0.5, 0.0, 0.5)
        );
        assert_eq!(
            tv3(truncated_variations_bruteforce(&p(&[0.0, 1.0, 0.0, 1.0, 0.0]), 0.0).unwrap()),
            (2.0, 2.0, 4.0)
        );
        assert_eq!(
            tv3(truncated_variations_bruteforce(&p(&[0.0, 3.0, 1.0, 4.0]), 1.0).unwrap()),
            (4.0, 1.0, 5.0)
        );
        assert!(matches!(
            truncated_variations_bruteforce(&p(&[0.0; 17]), 0.1),
            Err(Error::TooLong { len: 17, max: 16 })
        ));
    }

    #[test]
    fn running_examples() {
        let r = running_truncated_variations(&p(&[0.0, 3.0, 1.0, 4.0]), 1.0).unwrap();
        assert_eq!(r.utv, vec![0.0, 2.0, 2.0, 4.0]);
        assert_eq!(r.dtv, vec![0.0, 0.0, 1.0, 1.0]);

        let r = running_truncated_variations(&p(&[0.0, 0.5, 0.5, 2.0, 3.5]), 0.0).unwrap();
        assert_eq!(r.utv, vec![0.0, 0.5, 0.5, 2.0, 3.5]);
        assert!(r.dtv.iter().all(|&d| d == 0.0));

        let path = p(&[0.3, -0.4, 0.9, 0.1]);
        let r = running_truncated_variations(&path, path.range()).unwrap();
        assert!(r.utv.iter().chain(&r.dtv).all(|&v| v == 0.0));
    }

    #[test]
    fn truncated_path_examples() {
        let path = p(&[0.0, 3.0, 1.0, 4.0]);
        let res = truncated_path(&path, 1.0).unwrap();
        assert_eq!(res.truncated_path.values(), &[0.0, 2.0, 1.0, 3.0]);
        assert_eq!(res.truncated_path.total_variation(), 5.0);
        assert_eq!(res.tv, 5.0);

        assert_eq!(truncated_path(&path, 0.0).unwrap().truncated_path, path);

        let flat = truncated_path(&path, 10.0).unwrap();
        assert!(flat.truncated_path.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn decompose_examples() {
        let path = p(&[0.0, 3.0, 1.0, 4.0]);
        let (_, noise) = decompose(&path, 1.0).unwrap();
        assert_eq!(noise.values(), &[0.0, 1.0, 0.0, 1.0]);
        let (trend, noise) = decompose(&path, 0.0).unwrap();
        assert_eq!(trend, path);
        assert!(noise.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn rejects_bad_levels() {
        let path = p(&[0.0, 1.0]);
        assert!(matches!(truncated_variations(&path, -0.1), Err(Error::NegativeC(_))));
        assert!(matches!(truncated_path(&path, f64::NAN), Err(Error::NegativeC(_))));
        assert!(matches!(running_truncated_variations(&path, -1.0), Err(Error::NegativeC(_))));
        assert!(matches!(decompose(&path, f64::INFINITY), Err(Error::NegativeC(_))));
    }

    #[test]
    fn ties_contribute_nothing() {
        let r = truncated_variations(&p(&[0.0, 1.0, 0.0, 1.0]), 1.0).unwrap();
        assert_eq!(tv3(r), (0.0, 0.0, 0.0));
    }

    #[test]
    fn single_point() {
        let r = truncated_path(&p(&[1.5]), 0.2).unwrap();
        assert_eq!(r.truncated_path.values(), &[1.5]);
        assert_eq!(r.tv, 0.0);
    }
}
