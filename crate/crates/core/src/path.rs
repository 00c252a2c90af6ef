//! Sampled càdlàg paths and partitions of their grids.
//!
//! A [`SampledPath`] is read as the right-continuous step function
//! `t ↦ values[i]` for `times[i] <= t < times[i + 1]`, so the increment at
//! grid index `i` is a jump `values[i] - values[i - 1]`.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Formats a float with 17 significant digits, enough for an exact round-trip.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Deserialize)]
struct RawPath {
    times: Vec<f64>,
    values: Vec<f64>,
}

/// Strictly increasing time grid with one finite value per grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPath")]
pub struct SampledPath {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl TryFrom<RawPath> for SampledPath {
    type Error = Error;

    fn try_from(raw: RawPath) -> Result<Self> {
        SampledPath::new(raw.times, raw.values)
    }
}

impl SampledPath {
    /// Validates raw samples: equal lengths, at least one point, finite
    /// entries and strictly increasing times.
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::LengthMismatch {
                times: times.len(),
                values: values.len(),
            });
        }
        if times.is_empty() {
            return Err(Error::EmptyPath);
        }
        if let Some(index) = times.iter().position(|t| !t.is_finite()) {
            return Err(Error::NonFiniteValue { field: "time", index });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue { field: "value", index });
        }
        if let Some(i) = times.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::NonIncreasingTimes { index: i + 1 });
        }
        Ok(Self { times, values })
    }

    /// Uniform grid `{i * horizon / steps}` for `i = 0..=steps`.
    pub fn uniform_grid(horizon: f64, steps: usize) -> Vec<f64> {
        let dt = horizon / steps as f64;
        (0..=steps).map(|i| i as f64 * dt).collect()
    }

    /// Builds a path on the same grid as `self` with new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(self.times.clone(), values)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn first_value(&self) -> f64 {
        self.values[0]
    }

    pub fn last_value(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// Iterator over grid increments `values[k] - values[k - 1]`, `k >= 1`.
    pub fn increments(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.windows(2).map(|w| w[1] - w[0])
    }

    /// Classical total variation `Σ |Δx|` over the full grid.
    pub fn total_variation(&self) -> f64 {
        self.increments().map(f64::abs).sum()
    }

    /// `max - min` of the values.
    pub fn range(&self) -> f64 {
        let (lo, hi) = self
            .values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        hi - lo
    }

    /// Largest gap between consecutive grid times (0 for a single point).
    pub fn max_gap(&self) -> f64 {
        self.times.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    /// True when both paths have bit-identical time grids.
    pub fn same_grid(&self, other: &SampledPath) -> bool {
        self.times == other.times
    }

    /// Sub-path of the grid points lying in `[a, b]`.
    pub fn restrict(&self, a: f64, b: f64) -> Result<SampledPath> {
        if !(a < b) {
            return Err(Error::InvalidWindow { a, b });
        }
        let start = self.times.partition_point(|&t| t < a);
        let end = self.times.partition_point(|&t| t <= b);
        if start >= end {
            return Err(Error::EmptyWindow { a, b });
        }
        Ok(SampledPath {
            times: self.times[start..end].to_vec(),
            values: self.values[start..end].to_vec(),
        })
    }

    /// Prefix through grid index `last` (inclusive).
    pub fn prefix(&self, last: usize) -> SampledPath {
        SampledPath {
            times: self.times[..=last].to_vec(),
            values: self.values[..=last].to_vec(),
        }
    }

    /// Reads a `time,value` CSV document.
    pub fn read_csv<R: Read>(source: R) -> Result<SampledPath> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(source);
        let headers = reader.headers().map_err(|e| csv_error(e, 1))?.clone();
        if headers.len() != 2 || &headers[0] != "time" || &headers[1] != "value" {
            return Err(Error::ParseError {
                row: 1,
                message: "expected header `time,value`".into(),
            });
        }
        let mut times = Vec::new();
        let mut values = Vec::new();
        let mut row = 1;
        for record in reader.records() {
            row += 1;
            let record = record.map_err(|e| csv_error(e, row))?;
            if let Some(pos) = record.position() {
                row = pos.line();
            }
            if record.len() != 2 {
                return Err(Error::ParseError {
                    row,
                    message: format!("expected 2 fields, found {}", record.len()),
                });
            }
            let parse = |s: &str| {
                s.parse::<f64>().map_err(|e| Error::ParseError {
                    row,
                    message: format!("`{s}`: {e}"),
                })
            };
            times.push(parse(&record[0])?);
            values.push(parse(&record[1])?);
        }
        SampledPath::new(times, values)
    }

    /// Writes a `time,value` CSV document with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut sink: W) -> Result<()> {
        writeln!(sink, "time,value")?;
        for (t, v) in self.times.iter().zip(&self.values) {
            writeln!(sink, "{},{}", fmt17(*t), fmt17(*v))?;
        }
        sink.flush()?;
        Ok(())
    }
}

fn csv_error(e: csv::Error, row: u64) -> Error {
    let row = e.position().map(|p| p.line()).unwrap_or(row);
    Error::ParseError {
        row,
        message: e.to_string(),
    }
}

/// Strictly increasing subsequence of grid indices of some path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    path_length: usize,
    indices: Vec<usize>,
    mesh: f64,
    level: Option<u32>,
}

impl Partition {
    pub fn new(path: &SampledPath, indices: Vec<usize>) -> Result<Partition> {
        if indices.is_empty() {
            return Err(Error::InvalidPartition("no indices".into()));
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= path.len()) {
            return Err(Error::InvalidPartition(format!(
                "index {bad} out of range for path of length {}",
                path.len()
            )));
        }
        if indices.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidPartition("indices not strictly increasing".into()));
        }
        let t = path.times();
        let mesh = indices
            .windows(2)
            .map(|w| t[w[1]] - t[w[0]])
            .fold(0.0, f64::max);
        Ok(Partition {
            path_length: path.len(),
            indices,
            mesh,
            level: None,
        })
    }

    /// The partition made of every grid point.
    pub fn full(path: &SampledPath) -> Partition {
        Partition {
            path_length: path.len(),
            indices: (0..path.len()).collect(),
            mesh: path.max_gap(),
            level: None,
        }
    }

    pub fn with_level(mut self, level: u32) -> Partition {
        self.level = Some(level);
        self
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn path_length(&self) -> usize {
        self.path_length
    }

    /// Largest time gap between consecutive chosen points.
    pub fn mesh(&self) -> f64 {
        self.mesh
    }

    pub fn level(&self) -> Option<u32> {
        self.level
    }

    /// Checks that the partition was built for a path of this length.
    pub fn check_for(&self, path: &SampledPath) -> Result<()> {
        if self.path_length != path.len() {
            return Err(Error::InvalidPartition(format!(
                "partition built for length {}, path has length {}",
                self.path_length,
                path.len()
            )));
        }
        Ok(())
    }

    /// Consecutive index pairs `(i, j)`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.indices.windows(2).map(|w| (w[0], w[1]))
    }

    /// True when every index of `self` also belongs to `finer`.
    pub fn is_refined_by(&self, finer: &Partition) -> bool {
        let mut it = finer.indices.iter();
        self.indices.iter().all(|i| it.any(|j| j == i))
    }
}

/// Dyadic partitions for levels `1..=levels`.
///
/// Level `k` keeps the indices `round(j (n - 1) / 2^k)` for `j = 0..=2^k`;
/// rounding is done in exact integer arithmetic so the levels are nested.
pub fn dyadic_partitions(path: &SampledPath, levels: u32) -> Result<Vec<Partition>> {
    if path.len() < 2 {
        return Err(Error::InvalidPartition("dyadic partitions need at least two points".into()));
    }
    if levels == 0 {
        return Err(Error::InvalidPartition("levels must be >= 1".into()));
    }
    let last = (path.len() - 1) as u128;
    let mut out = Vec::with_capacity(levels as usize);
    for k in 1..=levels {
        let indices: Vec<usize> = if k >= 64 || (1u128 << k) >= last {
            (0..path.len()).collect()
        } else {
            let denom = 1u128 << k;
            let mut idx: Vec<usize> = (0..=denom)
                .map(|j| ((2 * j * last + denom) / (2 * denom)) as usize)
                .collect();
            idx.dedup();
            idx
        };
        out.push(Partition::new(path, indices)?.with_level(k));
    }
    Ok(out)
}
