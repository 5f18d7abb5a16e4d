//! Equidistribution diagnostics for the normalized roots `r/n`.

use num_complex::Complex64;
use thiserror::Error;

use crate::expsums::{root_count_series, s_sieve, ExpSumError};
use crate::roots::{enumerate_roots_up_to, FactoredPoly, RootsError};

/// Largest cutoff accepted by the diagnostics.
pub const ANALYSIS_X_LIMIT: u64 = 10_000_000;
/// Largest frequency in a Weyl profile.
pub const MAX_FREQUENCY: i64 = 50;
/// Above this many points a sample switches to bucket counts.
pub const EXACT_POINT_LIMIT: usize = 10_000_000;
pub const BUCKETS: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("cutoff {0} outside [1, 10^7]")]
    Scale(u64),
    #[error("frequency bound {0} outside [1, 50]")]
    Frequencies(i64),
    #[error("empty sample")]
    Empty,
    #[error("point {0} outside [0, 1)")]
    OutOfRange(f64),
    #[error("no checkpoints")]
    NoCheckpoints,
    #[error(transparent)]
    Sum(#[from] ExpSumError),
    #[error(transparent)]
    Roots(#[from] RootsError),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Points {
    Exact(Vec<f64>),
    /// Counts per interval `[b/B, (b+1)/B)`, `B = BUCKETS`.
    Bucketed(Vec<u64>),
}

/// The fractions `r/n` with `f(r) ≡ 0 (mod n)`, `0 ≤ r < n ≤ x`.
#[derive(Debug, Clone, PartialEq)]
pub struct FractionSample {
    pub x: u64,
    pub f: String,
    pub count: u64,
    pub points: Points,
}

impl FractionSample {
    pub fn from_points(points: Vec<f64>, x: u64, f: &str) -> Result<Self, AnalysisError> {
        if let Some(&bad) = points.iter().find(|p| !(0.0..1.0).contains(*p)) {
            return Err(AnalysisError::OutOfRange(bad));
        }
        Ok(FractionSample {
            x,
            f: f.to_string(),
            count: points.len() as u64,
            points: Points::Exact(points),
        })
    }

    pub fn collect(f: &FactoredPoly, x: u64) -> Result<Self, AnalysisError> {
        Self::collect_with_limit(f, x, EXACT_POINT_LIMIT)
    }

    /// As [`collect`](Self::collect) with a custom switch-over point.
    pub fn collect_with_limit(
        f: &FactoredPoly,
        x: u64,
        exact_limit: usize,
    ) -> Result<Self, AnalysisError> {
        if x == 0 || x > ANALYSIS_X_LIMIT {
            return Err(AnalysisError::Scale(x));
        }
        let mut exact = Vec::new();
        let mut buckets: Option<Vec<u64>> = None;
        let mut count = 0u64;
        enumerate_roots_up_to(f, x, |n, roots| {
            for &r in &roots.residues {
                count += 1;
                match buckets.as_mut() {
                    Some(b) => b[bucket_of(r, n)] += 1,
                    None => {
                        exact.push((r as f64 / n as f64).min(1.0 - f64::EPSILON / 2.0));
                        if exact.len() > exact_limit {
                            let mut b = vec![0u64; BUCKETS];
                            for &p in &exact {
                                b[((p * BUCKETS as f64) as usize).min(BUCKETS - 1)] += 1;
                            }
                            exact = Vec::new();
                            buckets = Some(b);
                        }
                    }
                }
            }
        })?;
        let points = match buckets {
            Some(b) => Points::Bucketed(b),
            None => Points::Exact(exact),
        };
        Ok(FractionSample {
            x,
            f: f.to_string(),
            count,
            points,
        })
    }
}

fn bucket_of(r: u64, n: u64) -> usize {
    ((r as u128 * BUCKETS as u128) / n as u128) as usize
}

/// Lower and upper bounds for the star discrepancy; equal for exact samples.
/// For bucketed samples the gap is at most the largest bucket mass plus `1/B`.
pub fn star_discrepancy_bounds(sample: &FractionSample) -> Result<(f64, f64), AnalysisError> {
    match &sample.points {
        Points::Exact(points) => {
            if points.is_empty() {
                return Err(AnalysisError::Empty);
            }
            let mut sorted = points.clone();
            sorted.sort_by(f64::total_cmp);
            let n = sorted.len() as f64;
            let d = sorted
                .iter()
                .enumerate()
                .map(|(i, &p)| ((i + 1) as f64 / n - p).max(p - i as f64 / n))
                .fold(0.0, f64::max);
            Ok((d, d))
        }
        Points::Bucketed(counts) => {
            let total: u64 = counts.iter().sum();
            if total == 0 {
                return Err(AnalysisError::Empty);
            }
            let (n, b) = (total as f64, counts.len() as f64);
            let (mut lo, mut hi) = (0.0f64, 0.0f64);
            let mut below = 0u64;
            for (i, &c) in counts.iter().enumerate() {
                let left = i as f64 / b;
                lo = lo.max((below as f64 / n - left).abs());
                let after = below + c;
                hi = hi
                    .max(after as f64 / n - left)
                    .max((i + 1) as f64 / b - below as f64 / n);
                below = after;
            }
            Ok((lo, hi.max(lo)))
        }
    }
}

/// Star discrepancy `D*`; for bucketed samples this is the upper bound.
pub fn star_discrepancy(sample: &FractionSample) -> Result<f64, AnalysisError> {
    star_discrepancy_bounds(sample).map(|(_, hi)| hi)
}

/// `(h, |S(f, x, h)| / N(x))` for `h = 1..=hmax`, `N(x)` the number of roots.
pub fn weyl_profile(
    f: &FactoredPoly,
    x: u64,
    hmax: i64,
    threads: usize,
) -> Result<Vec<(i64, f64)>, AnalysisError> {
    if x == 0 || x > ANALYSIS_X_LIMIT {
        return Err(AnalysisError::Scale(x));
    }
    if !(1..=MAX_FREQUENCY).contains(&hmax) {
        return Err(AnalysisError::Frequencies(hmax));
    }
    let count = *root_count_series(f, x, &[], threads)?
        .counts
        .last()
        .expect("series ends at x") as f64;
    (1..=hmax)
        .map(|h| {
            let s = s_sieve(f, x, h, &[], threads)?
                .last()
                .expect("series ends at x")
                .1;
            Ok((h, s.norm() / count))
        })
        .collect()
}

/// Exact root counts `N(x)` at the requested checkpoints.
pub fn root_count_profile(
    f: &FactoredPoly,
    checkpoints: &[u64],
    threads: usize,
) -> Result<Vec<(u64, u64)>, AnalysisError> {
    let &x = checkpoints
        .iter()
        .max()
        .ok_or(AnalysisError::NoCheckpoints)?;
    if checkpoints.contains(&0) || x > ANALYSIS_X_LIMIT {
        return Err(AnalysisError::Scale(if x > ANALYSIS_X_LIMIT {
            x
        } else {
            0
        }));
    }
    let series = root_count_series(f, x, checkpoints, threads)?;
    Ok(checkpoints
        .iter()
        .map(|&c| {
            let i = series
                .checkpoints
                .iter()
                .position(|&s| s == c)
                .expect("requested checkpoint recorded");
            (c, series.counts[i])
        })
        .collect())
}

/// Least-squares slope of `ln(N(x)/x)` against `ln ln x`; for `κ`
/// distinct irreducible factors it should come out near `κ − 1`.
pub fn log_log_slope(profile: &[(u64, u64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = profile
        .iter()
        .filter(|&&(x, n)| x >= 3 && n > 0)
        .map(|&(x, n)| ((x as f64).ln().ln(), (n as f64 / x as f64).ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let (sx, sy) = pts
        .iter()
        .fold((0.0, 0.0), |(a, b), &(u, v)| (a + u, b + v));
    let (mx, my) = (sx / m, sy / m);
    let sxx: f64 = pts.iter().map(|&(u, _)| (u - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|&(u, v)| (u - mx) * (v - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// One row of a convergence table for `S(f, x, h)/x` against a target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub x: u64,
    pub ratio: Complex64,
    pub deviation: f64,
}

pub fn convergence_table(
    f: &FactoredPoly,
    h: i64,
    checkpoints: &[u64],
    target: f64,
    threads: usize,
) -> Result<Vec<ConvergenceRow>, AnalysisError> {
    let &x = checkpoints
        .iter()
        .max()
        .ok_or(AnalysisError::NoCheckpoints)?;
    if checkpoints.contains(&0) || x > ANALYSIS_X_LIMIT {
        return Err(AnalysisError::Scale(x));
    }
    let series = s_sieve(f, x, h, checkpoints, threads)?;
    Ok(checkpoints
        .iter()
        .map(|&c| {
            let i = series
                .checkpoints
                .iter()
                .position(|&s| s == c)
                .expect("requested checkpoint recorded");
            let ratio = series.values[i] / c as f64;
            ConvergenceRow {
                x: c,
                ratio,
                deviation: (ratio - target).norm(),
            }
        })
        .collect())
}
