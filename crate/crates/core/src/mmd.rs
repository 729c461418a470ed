//! Maximum mean discrepancy two-sample statistics under an RBF kernel,
//! plus the permutation test that turns them into p-values.
//!
//! Kernel: `k(a, b) = exp(-||a - b||^2 / (2 * bandwidth_sq))`.
//!
//! One-shot statistics ([`mmd2`]) accumulate each Gram block as a value list
//! sorted before summation. That makes the estimate independent of row order
//! and exactly symmetric in its two arguments, at the price of an `O(n^2 log n)`
//! sort that only the one-shot path pays. The permutation path instead builds
//! the pooled Gram matrix once and reuses it for every relabeling, which is
//! what makes hundreds of permutations affordable.

use alloc::vec::Vec;

use libm::exp;

use crate::error::CoreError;
use crate::matrix::FeatureMatrix;
use crate::rng::{shuffled_indices, CounterRng, RngSeed};
use crate::Result;

/// Largest per-side row count for which kernel blocks are materialized.
/// Bigger inputs must be subsampled first; refusing early beats thrashing.
pub const MAX_GRAM_ROWS: usize = 4096;

/// Which MMD^2 estimator to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Estimator {
    /// V-statistic; includes same-point kernel terms, always >= 0.
    Biased,
    /// U-statistic; excludes within-sample diagonals, can go slightly
    /// negative under the null.
    Unbiased,
}

/// Kernel bandwidth selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelConfig {
    /// `bandwidth_sq` = half the median of squared pairwise distances over
    /// the pooled sample, self-pairs excluded.
    MedianHeuristic,
    /// Explicit positive `bandwidth_sq`.
    BandwidthSq(f64),
}

/// Outcome of an MMD computation or permutation test.
#[derive(Debug, Clone, PartialEq)]
pub struct MmdResult {
    pub statistic: f64,
    pub estimator: Estimator,
    /// Bandwidth actually used, after resolving the median heuristic.
    pub bandwidth_sq: f64,
    /// Present only for permutation tests.
    pub p_value: Option<f64>,
    /// Zero for plain statistics.
    pub n_permutations: usize,
    /// Seed of the permutation stream; meaningful only for tests.
    pub seed: RngSeed,
}

#[inline]
fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let diff = x - y;
            diff * diff
        })
        .sum()
}

#[inline]
fn rbf(dist_sq: f64, bandwidth_sq: f64) -> f64 {
    exp(-dist_sq / (2.0 * bandwidth_sq))
}

fn check_pair(x: &FeatureMatrix, y: &FeatureMatrix, estimator: Estimator) -> Result<()> {
    if x.is_empty() {
        return Err(CoreError::Empty { what: "x sample" });
    }
    if y.is_empty() {
        return Err(CoreError::Empty { what: "y sample" });
    }
    if x.d() != y.d() {
        return Err(CoreError::DimensionMismatch {
            expected: x.d(),
            actual: y.d(),
        });
    }
    if x.n() > MAX_GRAM_ROWS {
        return Err(CoreError::GramTooLarge {
            side: "x",
            n: x.n(),
            max: MAX_GRAM_ROWS,
        });
    }
    if y.n() > MAX_GRAM_ROWS {
        return Err(CoreError::GramTooLarge {
            side: "y",
            n: y.n(),
            max: MAX_GRAM_ROWS,
        });
    }
    if estimator == Estimator::Unbiased && (x.n() < 2 || y.n() < 2) {
        return Err(CoreError::InvalidParam {
            name: "n",
            reason: alloc::format!(
                "unbiased estimator needs >= 2 rows per side, got {} and {}",
                x.n(),
                y.n()
            ),
        });
    }
    Ok(())
}

/// Median-heuristic `bandwidth_sq` over the pooled rows of `x` and `y`:
/// half the median of squared pairwise Euclidean distances, self-pairs
/// excluded. The median of an even-length list is the mean of the two
/// central values. Errors if every pairwise distance is zero.
pub fn median_heuristic(x: &FeatureMatrix, y: &FeatureMatrix) -> Result<f64> {
    if x.d() != y.d() {
        return Err(CoreError::DimensionMismatch {
            expected: x.d(),
            actual: y.d(),
        });
    }
    let pooled: Vec<&[f64]> = x.rows().chain(y.rows()).collect();
    let m = pooled.len();
    if m < 2 {
        return Err(CoreError::Empty {
            what: "pooled sample (needs >= 2 rows)",
        });
    }
    let mut dists = Vec::with_capacity(m * (m - 1) / 2);
    for i in 0..m {
        for j in i + 1..m {
            dists.push(dist_sq(pooled[i], pooled[j]));
        }
    }
    let len = dists.len();
    let mid = len / 2;
    let (_, hi, _) = dists.select_nth_unstable_by(mid, f64::total_cmp);
    let hi = *hi;
    let median = if len % 2 == 1 {
        hi
    } else {
        let lo = dists[..mid]
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        (lo + hi) / 2.0
    };
    if median <= 0.0 {
        return Err(CoreError::DegenerateDistances);
    }
    Ok(median / 2.0)
}

fn resolve_bandwidth(x: &FeatureMatrix, y: &FeatureMatrix, kernel: &KernelConfig) -> Result<f64> {
    match *kernel {
        KernelConfig::MedianHeuristic => median_heuristic(x, y),
        KernelConfig::BandwidthSq(v) => {
            if !v.is_finite() {
                Err(CoreError::NonFinite {
                    what: "bandwidth_sq",
                })
            } else if v <= 0.0 {
                Err(CoreError::InvalidParam {
                    name: "bandwidth_sq",
                    reason: alloc::format!("must be positive, got {v}"),
                })
            } else {
                Ok(v)
            }
        }
    }
}

/// Sorts ascending and sums; canonical regardless of input order.
fn sorted_sum(mut vals: Vec<f64>) -> f64 {
    vals.sort_unstable_by(f64::total_cmp);
    vals.iter().sum()
}

/// Squared MMD between `x` and `y`.
///
/// The result is exactly symmetric in `x` and `y` and exactly invariant to
/// row order within each sample. The biased statistic is clamped at zero,
/// where it lands for identical samples.
pub fn mmd2(
    x: &FeatureMatrix,
    y: &FeatureMatrix,
    kernel: &KernelConfig,
    estimator: Estimator,
) -> Result<MmdResult> {
    check_pair(x, y, estimator)?;
    let bw = resolve_bandwidth(x, y, kernel)?;
    let nx = x.n() as f64;
    let ny = y.n() as f64;

    let xs: Vec<&[f64]> = x.rows().collect();
    let ys: Vec<&[f64]> = y.rows().collect();

    let within = |rows: &[&[f64]]| -> Vec<f64> {
        let n = rows.len();
        let mut vals = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                if estimator == Estimator::Unbiased && i == j {
                    continue;
                }
                vals.push(rbf(dist_sq(rows[i], rows[j]), bw));
            }
        }
        vals
    };
    let mut cross = Vec::with_capacity(xs.len() * ys.len());
    for xi in &xs {
        for yj in &ys {
            cross.push(rbf(dist_sq(xi, yj), bw));
        }
    }

    let sxx = sorted_sum(within(&xs));
    let syy = sorted_sum(within(&ys));
    let sxy = sorted_sum(cross);

    let statistic = match estimator {
        Estimator::Biased => {
            let v = sxx / (nx * nx) + syy / (ny * ny) - 2.0 * sxy / (nx * ny);
            v.max(0.0)
        }
        Estimator::Unbiased => {
            sxx / (nx * (nx - 1.0)) + syy / (ny * (ny - 1.0)) - 2.0 * sxy / (nx * ny)
        }
    };

    Ok(MmdResult {
        statistic,
        estimator,
        bandwidth_sq: bw,
        p_value: None,
        n_permutations: 0,
        seed: RngSeed(0),
    })
}

/// Pooled Gram matrix plus the aggregates needed to score any relabeling in
/// `O(n_x^2 + m)` instead of `O(m^2)`.
struct PooledGram {
    k: Vec<f64>,
    m: usize,
    row_sums: Vec<f64>,
    total: f64,
}

impl PooledGram {
    fn build(pooled: &[&[f64]], bw: f64) -> Self {
        let m = pooled.len();
        let mut k = alloc::vec![0.0; m * m];
        for i in 0..m {
            k[i * m + i] = 1.0;
            for j in i + 1..m {
                let v = rbf(dist_sq(pooled[i], pooled[j]), bw);
                k[i * m + j] = v;
                k[j * m + i] = v;
            }
        }
        let row_sums: Vec<f64> = (0..m).map(|i| k[i * m..(i + 1) * m].iter().sum()).collect();
        let total = row_sums.iter().sum();
        PooledGram { k, m, row_sums, total }
    }

    /// MMD^2 for the split that assigns `sel` (sorted ascending) to the x
    /// side and the rest to the y side.
    fn stat_for(&self, sel: &[usize], ny: usize, estimator: Estimator) -> f64 {
        let nx = sel.len();
        let mut sxx = 0.0;
        let mut sel_row_total = 0.0;
        let mut diag_x = 0.0;
        for &i in sel {
            let row = &self.k[i * self.m..(i + 1) * self.m];
            for &j in sel {
                sxx += row[j];
            }
            sel_row_total += self.row_sums[i];
            diag_x += row[i];
        }
        let sxy = sel_row_total - sxx;
        let syy = self.total - 2.0 * sxy - sxx;
        let (nx, ny) = (nx as f64, ny as f64);
        match estimator {
            Estimator::Biased => {
                let v = sxx / (nx * nx) + syy / (ny * ny) - 2.0 * sxy / (nx * ny);
                v.max(0.0)
            }
            Estimator::Unbiased => {
                let diag_y = (self.m as f64) - diag_x;
                (sxx - diag_x) / (nx * (nx - 1.0)) + (syy - diag_y) / (ny * (ny - 1.0))
                    - 2.0 * sxy / (nx * ny)
            }
        }
    }
}

/// Permutation test of `x` against `y`.
///
/// The bandwidth is resolved once on the original pooled sample and held
/// fixed across permutations. Trial `t` draws its shuffle from `seed XOR t`,
/// so any evaluation order, including a parallel one, reproduces the same
/// p-value:
///
/// `p = (1 + #{permuted statistic >= observed}) / (1 + n_permutations)`.
pub fn permutation_test(
    x: &FeatureMatrix,
    y: &FeatureMatrix,
    kernel: &KernelConfig,
    estimator: Estimator,
    n_permutations: usize,
    seed: RngSeed,
) -> Result<MmdResult> {
    check_pair(x, y, estimator)?;
    if n_permutations == 0 {
        return Err(CoreError::InvalidParam {
            name: "n_permutations",
            reason: alloc::string::String::from("must be >= 1"),
        });
    }
    let bw = resolve_bandwidth(x, y, kernel)?;
    let nx = x.n();
    let ny = y.n();
    let pooled: Vec<&[f64]> = x.rows().chain(y.rows()).collect();
    let gram = PooledGram::build(&pooled, bw);

    let observed_sel: Vec<usize> = (0..nx).collect();
    let observed = gram.stat_for(&observed_sel, ny, estimator);

    let mut at_least = 0usize;
    for t in 0..n_permutations {
        let mut rng = CounterRng::new(seed.xor(t as u64));
        let mut perm = shuffled_indices(nx + ny, &mut rng);
        perm.truncate(nx);
        perm.sort_unstable();
        let stat = gram.stat_for(&perm, ny, estimator);
        if stat >= observed {
            at_least += 1;
        }
    }
    let p = (1 + at_least) as f64 / (1 + n_permutations) as f64;

    Ok(MmdResult {
        statistic: observed,
        estimator,
        bandwidth_sq: bw,
        p_value: Some(p),
        n_permutations,
        seed,
    })
}
