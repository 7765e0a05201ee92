//! Summary statistics and goodness-of-fit distances for Monte Carlo checks.

use std::collections::BTreeMap;

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::scalar::Real;

#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct MeanSe {
    pub mean: f64,
    pub std_error: f64,
    pub count: usize,
}

pub fn mean_se<T: Real>(xs: &[T]) -> MeanSe {
    let n = xs.len();
    if n == 0 {
        return MeanSe { mean: f64::NAN, std_error: f64::NAN, count: 0 };
    }
    let mean = xs.iter().map(|x| x.as_f64()).sum::<f64>() / n as f64;
    let var = if n > 1 {
        xs.iter().map(|x| (x.as_f64() - mean).powi(2)).sum::<f64>() / (n - 1) as f64
    } else {
        0.0
    };
    MeanSe { mean, std_error: (var / n as f64).sqrt(), count: n }
}

/// `sup_x |F_n(x) - F(x)|` for the empirical law of `sample`.
pub fn ks_one_sample<T: Real>(sample: &[T], mut cdf: impl FnMut(T) -> T) -> f64 {
    let mut xs: Vec<T> = sample.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).expect("finite sample"));
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < xs.len() {
        let mut j = i;
        while j + 1 < xs.len() && xs[j + 1] == xs[i] {
            j += 1;
        }
        let f = cdf(xs[i]).as_f64();
        d = d.max(f - i as f64 / n).max((j + 1) as f64 / n - f);
        i = j + 1;
    }
    d
}

/// Two-sample Kolmogorov-Smirnov distance.
pub fn ks_two_sample<T: Real>(a: &[T], b: &[T]) -> f64 {
    let mut xa: Vec<T> = a.to_vec();
    let mut xb: Vec<T> = b.to_vec();
    let cmp = |x: &T, y: &T| x.partial_cmp(y).expect("finite sample");
    xa.sort_by(cmp);
    xb.sort_by(cmp);
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < xa.len() && j < xb.len() {
        let x = if xa[i] <= xb[j] { xa[i] } else { xb[j] };
        while i < xa.len() && xa[i] <= x {
            i += 1;
        }
        while j < xb.len() && xb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Total-variation distance between two empirical laws on a discrete set.
pub fn tv_distance<K: Ord + Clone>(a: &[K], b: &[K]) -> f64 {
    let mut diff: BTreeMap<K, f64> = BTreeMap::new();
    for k in a {
        *diff.entry(k.clone()).or_default() += 1.0 / a.len() as f64;
    }
    for k in b {
        *diff.entry(k.clone()).or_default() -= 1.0 / b.len() as f64;
    }
    0.5 * diff.values().map(|v| v.abs()).sum::<f64>()
}

#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson test of observed counts against expected probabilities.
pub fn chi_square(observed: &[u64], expected: &[f64]) -> ChiSquare {
    let total: u64 = observed.iter().sum();
    let mut stat = 0.0;
    let mut cells = 0;
    for (&o, &p) in observed.iter().zip(expected) {
        if p <= 0.0 {
            continue;
        }
        let e = p * total as f64;
        stat += (o as f64 - e).powi(2) / e;
        cells += 1;
    }
    let dof = cells.max(2) - 1;
    let p_value = ChiSquared::new(dof as f64).map(|d| 1.0 - d.cdf(stat)).unwrap_or(f64::NAN);
    ChiSquare { statistic: stat, dof, p_value }
}
