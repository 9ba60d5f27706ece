//! Two-sample statistics and small summary helpers.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::C64;

fn mean_pair_distance(p: &[C64], q: &[C64]) -> f64 {
    let mut total = 0.0;
    for a in p {
        let mut row = 0.0;
        for b in q {
            row += (a - b).norm();
        }
        total += row;
    }
    total / (p.len() as f64 * q.len() as f64)
}

/// Mean `|x - x'|` over all ordered pairs of a sample (diagonal included).
/// Reusable across many [`energy_distance_with`] calls against one sample.
pub fn mean_self_distance(p: &[C64]) -> Result<f64> {
    if p.is_empty() {
        return Err(Error::Empty);
    }
    let mut total = 0.0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            total += (p[i] - p[j]).norm();
        }
    }
    Ok(2.0 * total / (p.len() as f64 * p.len() as f64))
}

/// `2 mean|p - q| - mean|p - p'| - mean|q - q'|` over all pairs, the
/// V-statistic form: nonnegative and zero for identical multisets.
pub fn energy_distance(p: &[C64], q: &[C64]) -> Result<f64> {
    let q_self = mean_self_distance(q)?;
    energy_distance_with(p, q, q_self)
}

/// [`energy_distance`] with the `q` self term precomputed.
pub fn energy_distance_with(p: &[C64], q: &[C64], q_self: f64) -> Result<f64> {
    if p.is_empty() || q.is_empty() {
        return Err(Error::Empty);
    }
    let cross = mean_pair_distance(p, q);
    let p_self = mean_self_distance(p)?;
    Ok((2.0 * cross - p_self - q_self).max(0.0))
}

/// Two-sample Kolmogorov-Smirnov statistic `sup_x |F_p(x) - F_q(x)|`.
pub fn ks_distance(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.is_empty() || q.is_empty() {
        return Err(Error::Empty);
    }
    let mut a = p.to_vec();
    let mut b = q.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut best: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        best = best.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(best)
}

/// Median; the mean of the two central values for even lengths.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v: Vec<f64> = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    })
}

/// Wilson score interval for `hits / trials` at normal quantile `z`.
pub fn wilson_interval(hits: usize, trials: usize, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Least-squares slope of `y` against `x`.
pub fn ols_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}
