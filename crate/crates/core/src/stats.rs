//! Two-sided Mann–Whitney rank-sum test.
//!
//! Tie-free samples use the exact null distribution of U. With ties the
//! normal approximation with tie-corrected variance and a 0.5 continuity
//! correction is used instead.

use statrs::distribution::{ContinuousCDF, Normal};

/// Above this combined size the exact distribution is skipped.
const EXACT_MAX_N: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankSum {
    /// U statistic of the first sample.
    pub u: f64,
    pub p_value: f64,
    pub exact: bool,
}

/// Ranks with ties resolved to their average position, 1-based.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Number of ways to pick `m` of the ranks `1..=n` with each possible rank
/// sum; index `s` holds the count for sum `s`.
fn rank_sum_counts(m: usize, n: usize) -> Vec<f64> {
    let max_sum = (n - m + 1..=n).sum::<usize>();
    // counts[k][s]: subsets of size k with sum s
    let mut counts = vec![vec![0.0f64; max_sum + 1]; m + 1];
    counts[0][0] = 1.0;
    for rank in 1..=n {
        for k in (1..=m.min(rank)).rev() {
            let (lower, upper) = counts.split_at_mut(k);
            let prev = &lower[k - 1];
            let cur = &mut upper[0];
            for s in (rank..=max_sum).rev() {
                cur[s] += prev[s - rank];
            }
        }
    }
    counts.swap_remove(m)
}

fn exact_p(u: f64, m: usize, n: usize) -> f64 {
    let counts = rank_sum_counts(m, m + n);
    let offset = m * (m + 1) / 2;
    let total: f64 = counts.iter().sum();
    let u = u.round() as usize;
    let (mut lower, mut upper) = (0.0, 0.0);
    for (s, &c) in counts.iter().enumerate().skip(offset) {
        let us = s - offset;
        if us <= u {
            lower += c;
        }
        if us >= u {
            upper += c;
        }
    }
    (2.0 * lower.min(upper) / total).min(1.0)
}

/// Returns `None` when either sample is empty.
pub fn mann_whitney(x: &[f64], y: &[f64]) -> Option<RankSum> {
    let (m, n) = (x.len(), y.len());
    if m == 0 || n == 0 {
        return None;
    }
    let pooled: Vec<f64> = x.iter().chain(y).copied().collect();
    let ranks = midranks(&pooled);
    let rank_sum_x: f64 = ranks[..m].iter().sum();
    let (mf, nf) = (m as f64, n as f64);
    let u = rank_sum_x - mf * (mf + 1.0) / 2.0;

    let mut sorted = pooled.clone();
    sorted.sort_by(f64::total_cmp);
    let tie_term: f64 = sorted
        .chunk_by(|a, b| a == b)
        .map(|g| {
            let t = g.len() as f64;
            t * t * t - t
        })
        .sum();

    if tie_term == 0.0 && m + n <= EXACT_MAX_N {
        return Some(RankSum {
            u,
            p_value: exact_p(u, m, n),
            exact: true,
        });
    }

    let total = mf + nf;
    let mean = mf * nf / 2.0;
    let var = mf * nf / 12.0 * ((total + 1.0) - tie_term / (total * (total - 1.0)));
    let p_value = if var <= 0.0 {
        1.0
    } else {
        let z = ((u - mean).abs() - 0.5).max(0.0) / var.sqrt();
        let std_normal = Normal::standard();
        (2.0 * std_normal.sf(z)).min(1.0)
    };
    Some(RankSum {
        u,
        p_value,
        exact: false,
    })
}
