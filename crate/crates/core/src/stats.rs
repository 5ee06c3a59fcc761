//! Small descriptive statistics used by intervals, baselines and density.
//!
//! Quantiles use linear interpolation between order statistics (Hyndman and
//! Fan type 7, the default of R and NumPy) everywhere in the crate.

use crate::sum::exact_sum;

/// Type-7 quantile of an ascending slice. `p` is clamped to `[0, 1]`.
///
/// Panics on an empty slice.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty sample");
    let n = sorted.len();
    let p = p.clamp(0.0, 1.0);
    let h = (n - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    let frac = h - lo as f64;
    if frac == 0.0 {
        sorted[lo]
    } else {
        sorted[lo] + frac * (sorted[hi] - sorted[lo])
    }
}

pub fn sorted_copy(samples: &[f64]) -> Vec<f64> {
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

pub fn mean(samples: &[f64]) -> Option<f64> {
    if samples.is_empty() {
        return None;
    }
    Some(exact_sum(samples.iter().copied()) / samples.len() as f64)
}

/// Sample standard deviation with the `n - 1` denominator.
pub fn sample_std(samples: &[f64]) -> Option<f64> {
    if samples.len() < 2 {
        return None;
    }
    let m = mean(samples)?;
    let ss = exact_sum(samples.iter().map(|x| (x - m) * (x - m)));
    Some((ss / (samples.len() - 1) as f64).sqrt())
}
