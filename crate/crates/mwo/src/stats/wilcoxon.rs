//! Two-sided Wilcoxon rank-sum test with +/=/− verdicts.
//!
//! Small samples (at most 8 per side) are handled by exact enumeration of
//! all rank splits; larger samples use the tie-corrected normal
//! approximation with continuity correction.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("both samples must be nonempty")]
    EmptySample,
    #[error("samples must be finite")]
    NonFiniteSample,
}

/// Significance verdict at alpha = 0.05 from the perspective of sample A
/// under minimization: '+' means A is significantly smaller.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "+")]
    Better,
    #[serde(rename = "=")]
    Equivalent,
    #[serde(rename = "-")]
    Worse,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Better => "+",
            Verdict::Equivalent => "=",
            Verdict::Worse => "-",
        })
    }
}

impl Verdict {
    pub fn flipped(self) -> Self {
        match self {
            Verdict::Better => Verdict::Worse,
            Verdict::Worse => Verdict::Better,
            Verdict::Equivalent => Verdict::Equivalent,
        }
    }
}

const ALPHA: f64 = 0.05;
const EXACT_LIMIT: usize = 8;

/// Doubled mid-ranks of the pooled sample: doubling keeps tie-averaged
/// ranks integral, which lets the exact path count rank splits without any
/// floating-point comparisons.
fn doubled_ranks(pooled: &[f64]) -> Vec<u64> {
    let mut order: Vec<usize> = (0..pooled.len()).collect();
    order.sort_by(|&a, &b| pooled[a].partial_cmp(&pooled[b]).unwrap());
    let mut ranks = vec![0u64; pooled.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && pooled[order[j + 1]] == pooled[order[i]] {
            j += 1;
        }
        // Positions i..=j share the average rank; doubled it is (i+j+2).
        let doubled = (i + j + 2) as u64;
        for &idx in &order[i..=j] {
            ranks[idx] = doubled;
        }
        i = j + 1;
    }
    ranks
}

/// Exact two-sided p: probability, over all C(n, n_a) equally likely rank
/// splits, of a rank sum at least as far from its mean as the observed one.
fn exact_p(ranks_doubled: &[u64], n_a: usize) -> f64 {
    let n = ranks_doubled.len();
    let w_obs: u64 = ranks_doubled[..n_a].iter().sum();
    // Doubled rank sums are integers; mean of W (doubled) is n_a (n + 1).
    let mu2 = (n_a as u64) * (n as u64 + 1);
    let dev_obs = w_obs.abs_diff(mu2);

    // DP over subsets: count[k][s] = number of k-subsets with doubled rank
    // sum s. Sums are bounded by n(n+1), small enough for a dense table.
    let max_sum: usize = ranks_doubled.iter().sum::<u64>() as usize;
    let mut count = vec![vec![0u128; max_sum + 1]; n_a + 1];
    count[0][0] = 1;
    for &r in ranks_doubled {
        for k in (0..n_a).rev() {
            for s in 0..=(max_sum - r as usize) {
                if count[k][s] > 0 {
                    let c = count[k][s];
                    count[k + 1][s + r as usize] += c;
                }
            }
        }
    }
    let total: u128 = count[n_a].iter().sum();
    let extreme: u128 = count[n_a]
        .iter()
        .enumerate()
        .filter(|&(s, _)| (s as u64).abs_diff(mu2) >= dev_obs)
        .map(|(_, &c)| c)
        .sum();
    extreme as f64 / total as f64
}

/// Tie-corrected normal approximation with 0.5 continuity correction.
fn normal_p(pooled: &[f64], ranks_doubled: &[u64], n_a: usize) -> f64 {
    let n = pooled.len() as f64;
    let na = n_a as f64;
    let nb = n - na;
    let w: f64 = ranks_doubled[..n_a].iter().sum::<u64>() as f64 / 2.0;
    let mu = na * (n + 1.0) / 2.0;

    // Tie correction: sum over tie groups of (t^3 - t).
    let mut sorted: Vec<f64> = pooled.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        i = j + 1;
    }
    let sigma2 = na * nb / 12.0 * (n + 1.0 - tie_term / (n * (n - 1.0)));
    if sigma2 <= 0.0 {
        return f64::NAN;
    }
    let z = ((w - mu).abs() - 0.5).max(0.0) / sigma2.sqrt();
    let normal = Normal::new(0.0, 1.0).unwrap();
    2.0 * (1.0 - normal.cdf(z))
}

/// Two-sided Wilcoxon rank-sum test.
///
/// Identical samples yield a NaN p-value and the '=' verdict. Otherwise
/// '+' / '−' are declared at p < 0.05 by the ordering of the sample means
/// (smaller mean is better).
pub fn wilcoxon_rank_sum(sample_a: &[f64], sample_b: &[f64]) -> Result<(f64, Verdict), StatsError> {
    if sample_a.is_empty() || sample_b.is_empty() {
        return Err(StatsError::EmptySample);
    }
    if sample_a.iter().chain(sample_b).any(|v| !v.is_finite()) {
        return Err(StatsError::NonFiniteSample);
    }
    if sample_a.len() == sample_b.len() {
        let mut a = sample_a.to_vec();
        let mut b = sample_b.to_vec();
        a.sort_by(|x, y| x.partial_cmp(y).unwrap());
        b.sort_by(|x, y| x.partial_cmp(y).unwrap());
        if a == b {
            return Ok((f64::NAN, Verdict::Equivalent));
        }
    }

    let pooled: Vec<f64> = sample_a.iter().chain(sample_b).copied().collect();
    let ranks = doubled_ranks(&pooled);
    let p = if sample_a.len() <= EXACT_LIMIT && sample_b.len() <= EXACT_LIMIT {
        exact_p(&ranks, sample_a.len())
    } else {
        normal_p(&pooled, &ranks, sample_a.len())
    };

    let verdict = if !(p < ALPHA) {
        Verdict::Equivalent
    } else {
        let mean_a = sample_a.iter().sum::<f64>() / sample_a.len() as f64;
        let mean_b = sample_b.iter().sum::<f64>() / sample_b.len() as f64;
        if mean_a < mean_b {
            Verdict::Better
        } else if mean_a > mean_b {
            Verdict::Worse
        } else {
            Verdict::Equivalent
        }
    };
    Ok((p, verdict))
}
