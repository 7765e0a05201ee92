//! Exact samplers for Galton-Watson trees, unconditioned and conditioned on
//! `ζ = n`.
//!
//! Conditioned trees are built from `n` i.i.d. step-law draws conditioned to
//! sum to `-1`, rotated at the first minimum of their partial sums (cycle
//! lemma) and decoded as a Lukasiewicz path.

use std::collections::BTreeMap;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::Serialize;

use crate::codings::{tree_from_walk, LukasiewiczPath, Tree};
use crate::error::{Error, Result};
use crate::offspring::{Family, OffspringLaw, StepLaw};
use crate::rng::{replicate_rng, rng_from_seed, GwRng};
use crate::scalar::{axpy, Real, Weight};

/// Number of degrees tabulated by [`DegreeSampler`]; larger degrees use the
/// analytic tail.
pub const DEGREE_TABLE_LEN: usize = 1 << 16;
/// Entry budget for the `DpExact` tables.
pub const DP_TABLE_BUDGET: usize = 1 << 22;
pub const DEFAULT_MAX_ATTEMPTS: u64 = 1 << 40;
const INDIVIDUAL_THRESHOLD: u64 = 8;
const MAX_DEGREE: usize = 1 << 52;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Whole-block rejection; each block is drawn through its degree
    /// histogram and shuffled.
    Rejection,
    /// Whole-block rejection drawing the steps one at a time.
    SequentialRejection,
    /// Sequential sampling reweighted by exact walk tables.
    DpExact,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rejection" => Ok(Self::Rejection),
            "sequential" | "sequential_rejection" => Ok(Self::SequentialRejection),
            "dp_exact" | "dp-exact" => Ok(Self::DpExact),
            other => Err(Error::InvalidParameter(format!("unknown sampling method {other:?}"))),
        }
    }
}

/// Draws from an offspring law by inversion of its tail function.
#[derive(Clone, Debug)]
pub struct DegreeSampler<T> {
    law: OffspringLaw<T>,
    geometric: Option<f64>,
    pmf: Vec<f64>,
    /// `tails[k] = mu([k, inf))`.
    tails: Vec<f64>,
}

impl<T: Real> DegreeSampler<T> {
    pub fn new(law: &OffspringLaw<T>) -> Self {
        let len = law.support_max().map_or(DEGREE_TABLE_LEN, |k| k + 2).min(DEGREE_TABLE_LEN);
        let geometric = match law.family() {
            Family::Geometric { p } => Some(p.as_f64()),
            _ => None,
        };
        Self {
            law: law.clone(),
            geometric,
            pmf: law.pmf_vec(len).iter().map(|p| p.as_f64()).collect(),
            tails: law.tail_vec(len).iter().map(|p| p.as_f64()).collect(),
        }
    }

    pub fn law(&self) -> &OffspringLaw<T> {
        &self.law
    }

    pub fn pmf(&self, k: usize) -> f64 {
        self.pmf.get(k).copied().unwrap_or_else(|| self.law.pmf(k).as_f64())
    }

    pub fn tail(&self, k: usize) -> f64 {
        self.tails.get(k).copied().unwrap_or_else(|| self.law.tail(k).as_f64())
    }

    /// `P[k | >= k]`.
    pub fn hazard(&self, k: usize) -> f64 {
        let t = self.tail(k);
        if t > 0.0 {
            (self.pmf(k) / t).clamp(0.0, 1.0)
        } else {
            1.0
        }
    }

    /// Smallest `j` with `mu([j+1, inf)) <= v`.
    pub fn inverse_tail(&self, v: f64) -> usize {
        if let Some(p) = self.geometric {
            let j = (v.ln() / p.ln()).ceil() - 1.0;
            return if j.is_finite() && j > 0.0 { (j as usize).min(MAX_DEGREE) } else { 0 };
        }
        let last = self.tails.len() - 1;
        if self.tails[last] <= v {
            // first j with tails[j+1] <= v inside the table
            let idx = self.tails[1..].partition_point(|&t| t > v);
            return idx;
        }
        if self.law.support_max().is_some() {
            return last;
        }
        let mut lo = last - 1;
        let mut hi = last;
        while self.tail(hi + 1) > v {
            lo = hi;
            hi = hi.saturating_mul(2);
            if hi >= MAX_DEGREE {
                return MAX_DEGREE;
            }
        }
        // tail(lo + 1) > v >= tail(hi + 1)
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.tail(mid + 1) > v {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }

    pub fn sample(&self, rng: &mut GwRng) -> usize {
        let v = 1.0 - rng.random::<f64>();
        self.inverse_tail(v)
    }

    /// Draw from `mu(. | >= k)`.
    pub fn sample_at_least(&self, k: usize, rng: &mut GwRng) -> usize {
        let v = self.tail(k) * (1.0 - rng.random::<f64>());
        self.inverse_tail(v).max(k)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GwOutcome {
    Tree(Tree),
    /// The tree reached `size_cap` vertices with individuals still unexplored.
    CapExceeded,
}

/// Unconditioned `GW_mu` tree, explored depth first up to `size_cap` vertices.
pub fn sample_gw<T: Real>(law: &OffspringLaw<T>, size_cap: usize, seed: u64) -> Result<GwOutcome> {
    if size_cap == 0 {
        return Err(Error::InvalidParameter("size_cap must be at least 1".into()));
    }
    if law.mean() > T::one() + T::tolerance(crate::offspring::CRITICALITY_TOL) {
        return Err(Error::InvalidLaw("sample_gw needs a critical or subcritical law".into()));
    }
    let sampler = DegreeSampler::new(law);
    let mut rng = rng_from_seed(seed);
    Ok(sample_gw_with(&sampler, size_cap, &mut rng))
}

pub fn sample_gw_with<T: Real>(sampler: &DegreeSampler<T>, size_cap: usize, rng: &mut GwRng) -> GwOutcome {
    let mut degrees = Vec::new();
    let mut pending: usize = 1;
    while pending > 0 {
        if degrees.len() == size_cap {
            return GwOutcome::CapExceeded;
        }
        let k = sampler.sample(rng);
        degrees.push(k);
        pending = match (pending - 1).checked_add(k) {
            Some(p) => p,
            None => return GwOutcome::CapExceeded,
        };
    }
    GwOutcome::Tree(Tree::from_child_counts(degrees).expect("depth-first exploration yields a valid tree"))
}

/// Rotation at the first index attaining the minimum of the partial sums;
/// the result is the unique rotation that first hits `-1` at time `n`.
pub fn cycle_shift(increments: &[i64]) -> Result<LukasiewiczPath> {
    let (k, _) = rotation_index(increments)?;
    let mut rotated = Vec::with_capacity(increments.len());
    rotated.extend_from_slice(&increments[k..]);
    rotated.extend_from_slice(&increments[..k]);
    Ok(LukasiewiczPath::from_increments_unchecked(&rotated))
}

/// `(k*, min)`; `k* = n` is reported as 0 (identity rotation).
pub fn rotation_index(increments: &[i64]) -> Result<(usize, i64)> {
    if increments.is_empty() {
        return Err(Error::InvalidParameter("empty increment sequence".into()));
    }
    if let Some(i) = increments.iter().position(|&x| x < -1) {
        return Err(Error::InvalidCoding(format!("increment {} < -1 at index {i}", increments[i])));
    }
    let mut s = 0i64;
    let mut best = (0usize, i64::MAX);
    for (i, &x) in increments.iter().enumerate() {
        s += x;
        if s < best.1 {
            best = (i + 1, s);
        }
    }
    if s != -1 {
        return Err(Error::BadIncrementSum(s));
    }
    let n = increments.len();
    Ok((if best.0 == n { 0 } else { best.0 }, best.1))
}

/// Exact walk tables for [`Method::DpExact`]:
/// `rows[r][v + r] = P[W_r = v]` for `v` in `[-r, n-r-1]`.
#[derive(Clone, Debug)]
pub struct DpTables {
    n: usize,
    rows: Vec<Vec<f64>>,
    nu: Vec<f64>,
}

impl DpTables {
    pub fn new<T: Real>(step: &StepLaw<T>, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("n >= 1 required".into()));
        }
        let entries = n * (n + 1);
        if entries > DP_TABLE_BUDGET {
            return Err(Error::TableTooLarge { n, entries, budget: DP_TABLE_BUDGET });
        }
        // nu[i] = nu(i - 1) = mu(i)
        let nu: Vec<f64> = step.offspring().pmf_vec(n + 1).iter().map(|p| p.as_f64()).collect();
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
        let mut first = vec![0.0; n];
        first[0] = 1.0;
        rows.push(first);
        for r in 1..=n {
            let mut row = vec![0.0; n];
            // P[W_{r-1} = u] spreads over v = u - 1 + i, stored at index u - 1 + r
            for (start, &pval) in rows[r - 1].iter().enumerate() {
                if pval != 0.0 {
                    let len = n - start;
                    axpy(&mut row[start..], pval, &nu[..len]);
                }
            }
            rows.push(row);
        }
        Ok(Self { n, rows, nu })
    }

    /// `P[W_r = v]`.
    pub fn prob(&self, r: usize, v: i64) -> f64 {
        let idx = v + r as i64;
        if idx < 0 {
            return 0.0;
        }
        self.rows[r].get(idx as usize).copied().unwrap_or(0.0)
    }

    fn sample(&self, rng: &mut GwRng) -> Result<Vec<i64>> {
        let n = self.n;
        let mut out = Vec::with_capacity(n);
        let mut target: i64 = -1;
        for r in (1..=n).rev() {
            let total = self.prob(r, target);
            if !(total > 0.0) {
                return Err(Error::ZeroConditionalProbability { n });
            }
            let u = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut chosen = None;
            let mut last_positive = None;
            for (i, &p) in self.nu.iter().enumerate() {
                let x = i as i64 - 1;
                let w = p * self.prob(r - 1, target - x);
                if w > 0.0 {
                    last_positive = Some(x);
                    acc += w;
                    if u < acc {
                        chosen = Some(x);
                        break;
                    }
                }
            }
            let x = chosen.or(last_positive).ok_or(Error::ZeroConditionalProbability { n })?;
            out.push(x);
            target -= x;
        }
        Ok(out)
    }
}

/// Reusable conditioned sampler for a fixed law and size.
#[derive(Clone, Debug)]
pub struct ConditionedSampler<T> {
    degrees: DegreeSampler<T>,
    n: usize,
    method: Method,
    dp: Option<DpTables>,
    max_attempts: u64,
}

impl<T: Real> ConditionedSampler<T> {
    pub fn new(law: &OffspringLaw<T>, n: usize, method: Method) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("n >= 1 required".into()));
        }
        if !size_is_reachable(law, n) {
            return Err(Error::ZeroConditionalProbability { n });
        }
        let dp = match method {
            Method::DpExact => Some(DpTables::new(&law.step_law(), n)?),
            _ => None,
        };
        Ok(Self { degrees: DegreeSampler::new(law), n, method, dp, max_attempts: DEFAULT_MAX_ATTEMPTS })
    }

    pub fn with_max_attempts(mut self, attempts: u64) -> Self {
        self.max_attempts = attempts;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `n` i.i.d. steps conditioned on summing to `-1`.
    pub fn increments(&self, rng: &mut GwRng) -> Result<Vec<i64>> {
        match self.method {
            Method::Rejection => self.histogram_rejection(rng),
            Method::SequentialRejection => self.sequential_rejection(rng),
            Method::DpExact => self.dp.as_ref().expect("tables built").sample(rng),
        }
    }

    pub fn walk(&self, rng: &mut GwRng) -> Result<LukasiewiczPath> {
        cycle_shift(&self.increments(rng)?)
    }

    pub fn tree(&self, rng: &mut GwRng) -> Result<Tree> {
        Ok(tree_from_walk(&self.walk(rng)?))
    }

    fn budget_error(&self) -> Error {
        Error::Budget(format!("no accepted block after {} attempts at n = {}", self.max_attempts, self.n))
    }

    fn sequential_rejection(&self, rng: &mut GwRng) -> Result<Vec<i64>> {
        let n = self.n as i64;
        let mut steps = Vec::with_capacity(self.n);
        for _ in 0..self.max_attempts {
            steps.clear();
            let mut s = 0i64;
            let mut ok = true;
            for m in 1..=n {
                let x = self.degrees.sample(rng).min(MAX_DEGREE) as i64 - 1;
                s += x;
                steps.push(x);
                if s >= n - m {
                    ok = m == n && s == -1;
                    if !ok {
                        break;
                    }
                }
            }
            if ok && s == -1 {
                return Ok(steps);
            }
        }
        Err(self.budget_error())
    }

    /// Draws the degree histogram of `n` i.i.d. `mu` values by successive
    /// binomials `N_k ~ Bin(R, mu(k)/mu([k,inf)))`, rejecting as soon as the
    /// degree sum must exceed `n - 1`, then shuffles the accepted multiset.
    fn histogram_rejection(&self, rng: &mut GwRng) -> Result<Vec<i64>> {
        let n = self.n as u64;
        let target = n - 1;
        let mut counts: Vec<(usize, u64)> = Vec::new();
        let mut singles: Vec<usize> = Vec::new();
        'attempt: for _ in 0..self.max_attempts {
            counts.clear();
            singles.clear();
            let mut remaining = n;
            let mut sum: u64 = 0;
            let mut k = 0usize;
            while remaining > 0 {
                if sum.saturating_add((k as u64).saturating_mul(remaining)) > target {
                    continue 'attempt;
                }
                if remaining <= INDIVIDUAL_THRESHOLD {
                    for _ in 0..remaining {
                        let d = self.degrees.sample_at_least(k, rng);
                        sum = sum.saturating_add(d as u64);
                        if sum > target {
                            continue 'attempt;
                        }
                        singles.push(d);
                    }
                    break;
                }
                let h = self.degrees.hazard(k);
                let c = if h >= 1.0 {
                    remaining
                } else if h <= 0.0 {
                    0
                } else {
                    Binomial::new(remaining, h).expect("valid binomial").sample(rng)
                };
                if c > 0 {
                    counts.push((k, c));
                    remaining -= c;
                    sum += k as u64 * c;
                }
                k += 1;
            }
            if sum != target {
                continue;
            }
            let mut steps: Vec<i64> = Vec::with_capacity(self.n);
            for &(k, c) in &counts {
                steps.extend(std::iter::repeat_n(k as i64 - 1, c as usize));
            }
            steps.extend(singles.iter().map(|&d| d as i64 - 1));
            steps.shuffle(rng);
            return Ok(steps);
        }
        Err(self.budget_error())
    }
}

/// Whether `P_mu[ζ = n] > 0`: `n - 1` must be a sum of `n` support points.
pub fn size_is_reachable<T: Real>(law: &OffspringLaw<T>, n: usize) -> bool {
    let Some(kmax) = law.support_max() else {
        return true;
    };
    let target = n - 1;
    let support: Vec<usize> = (1..=kmax.min(target)).filter(|&k| law.pmf(k) > T::zero()).collect();
    // sums of at most n-1 positive parts; parts >= 1 so the count bound is automatic
    let mut reach = vec![false; target + 1];
    reach[0] = true;
    for s in 1..=target {
        reach[s] = support.iter().any(|&k| k <= s && reach[s - k]);
    }
    reach[target]
}

pub fn conditioned_increments<T: Real>(step: &StepLaw<T>, n: usize, method: Method, seed: u64) -> Result<Vec<i64>> {
    let sampler = ConditionedSampler::new(step.offspring(), n, method)?;
    sampler.increments(&mut rng_from_seed(seed))
}

pub fn sample_conditioned<T: Real>(law: &OffspringLaw<T>, n: usize, method: Method, seed: u64) -> Result<Tree> {
    let sampler = ConditionedSampler::new(law, n, method)?;
    sampler.tree(&mut rng_from_seed(seed))
}

/// `count` conditioned trees; replicate `i` uses the stream derived from
/// `(seed, i)`, so output is independent of the thread count.
pub fn sample_conditioned_many<T: Real>(
    law: &OffspringLaw<T>,
    n: usize,
    count: usize,
    method: Method,
    seed: u64,
) -> Result<Vec<Tree>> {
    let sampler = ConditionedSampler::new(law, n, method)?;
    map_replicates(count, seed, |rng| sampler.tree(rng))
}

/// Runs `f` on replicate streams `0..count` in parallel, in index order.
pub fn map_replicates<R: Send>(
    count: usize,
    seed: u64,
    f: impl Fn(&mut GwRng) -> Result<R> + Sync,
) -> Result<Vec<R>> {
    (0..count)
        .into_par_iter()
        .map(|i| f(&mut replicate_rng(seed, i as u64)))
        .collect()
}

/// Exact law of the conditioned sampler's output: every step sequence with
/// sum `-1`, weighted by its probability, pushed through [`cycle_shift`].
pub fn sampler_law_exact<W: Weight>(pmf: &[W], n: usize) -> Result<Vec<(Tree, W)>> {
    if n == 0 || n > crate::exactlaw::MAX_ENUMERATION_N {
        return Err(Error::EnumerationTooLarge { n, max: crate::exactlaw::MAX_ENUMERATION_N });
    }
    let mut law: BTreeMap<Tree, W> = BTreeMap::new();
    let mut total = W::zero();
    let mut degrees = Vec::with_capacity(n);
    fn rec<W: Weight>(
        pmf: &[W],
        n: usize,
        left: usize,
        weight: W,
        degrees: &mut Vec<usize>,
        law: &mut BTreeMap<Tree, W>,
        total: &mut W,
    ) {
        if degrees.len() == n {
            if left == 0 {
                let inc: Vec<i64> = degrees.iter().map(|&k| k as i64 - 1).collect();
                let tree = tree_from_walk(&cycle_shift(&inc).expect("sum is -1"));
                *total = total.clone() + weight.clone();
                let slot = law.entry(tree).or_insert_with(W::zero);
                *slot = slot.clone() + weight;
            }
            return;
        }
        for k in 0..=left {
            let p = pmf.get(k).cloned().unwrap_or_else(W::zero);
            if p.is_zero() {
                continue;
            }
            degrees.push(k);
            rec(pmf, n, left - k, weight.clone() * p, degrees, law, total);
            degrees.pop();
        }
    }
    rec(pmf, n, n - 1, W::one(), &mut degrees, &mut law, &mut total);
    if total.is_zero() {
        return Err(Error::ZeroConditionalProbability { n });
    }
    Ok(law.into_iter().map(|(t, w)| (t, w / total.clone())).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlaw::{enumerate_conditioned, enumerate_conditioned_weights, geometric_half_exact};
    use crate::stats::{chi_square, tv_distance};

    fn geo() -> OffspringLaw<f64> {
        OffspringLaw::geometric(0.5).unwrap()
    }

    #[test]
    fn cycle_shift_examples() {
        assert_eq!(cycle_shift(&[-1, 1, -1]).unwrap().values(), &[0, 1, 0, -1]);
        assert_eq!(cycle_shift(&[0, -1, 1, -1]).unwrap().values(), &[0, 1, 0, 0, -1]);
        assert_eq!(rotation_index(&[1, -1, -1]).unwrap().0, 0);
        assert!(matches!(cycle_shift(&[0, 0]), Err(Error::BadIncrementSum(0))));
        assert!(cycle_shift(&[-2, 1]).is_err());
    }

    #[test]
    fn cycle_lemma_uniqueness_exhaustive() {
        for n in 1..=6usize {
            let mut seq = vec![-1i64; n];
            loop {
                if seq.iter().sum::<i64>() == -1 {
                    let valid = (0..n)
                        .filter(|&k| {
                            let rot: Vec<i64> = seq[k..].iter().chain(&seq[..k]).copied().collect();
                            let mut s = 0;
                            rot.iter().enumerate().all(|(i, &x)| {
                                s += x;
                                if i + 1 < n { s >= 0 } else { s == -1 }
                            })
                        })
                        .count();
                    assert_eq!(valid, 1, "{seq:?}");
                    let path = cycle_shift(&seq).unwrap();
                    assert!(LukasiewiczPath::new(path.values().to_vec()).is_ok());
                }
                // odometer over steps in [-1, n-1]
                let mut i = 0;
                while i < n {
                    seq[i] += 1;
                    if seq[i] < n as i64 {
                        break;
                    }
                    seq[i] = -1;
                    i += 1;
                }
                if i == n {
                    break;
                }
            }
        }
    }

    #[test]
    fn degree_sampler_inversion_matches_law() {
        for law in [geo(), OffspringLaw::stable(1.5f64).unwrap(), OffspringLaw::explicit(vec![0.3, 0.45, 0.0, 0.25]).unwrap()] {
            let s = DegreeSampler::new(&law);
            for k in 0..40 {
                let v_hi = law.tail(k);
                let v_lo = law.tail(k + 1);
                if v_hi > v_lo {
                    let mid = 0.5 * (v_hi + v_lo);
                    assert_eq!(s.inverse_tail(mid), k, "k = {k}");
                }
            }
        }
        let st = DegreeSampler::new(&OffspringLaw::stable(1.5f64).unwrap());
        let far = DEGREE_TABLE_LEN * 4;
        let v = 0.5 * (st.tail(far) + st.tail(far + 1));
        assert_eq!(st.inverse_tail(v), far);
    }

    #[test]
    fn gw_single_vertex_frequency() {
        let law = geo();
        let reps = 100_000;
        let mut ones = 0u64;
        let mut threes = 0u64;
        let sampler = DegreeSampler::new(&law);
        for i in 0..reps {
            match sample_gw_with(&sampler, 3, &mut replicate_rng(11, i)) {
                GwOutcome::Tree(t) if t.size() == 1 => ones += 1,
                GwOutcome::Tree(t) if t.size() == 3 => threes += 1,
                _ => {}
            }
        }
        let p1 = ones as f64 / reps as f64;
        assert!((p1 - 0.5).abs() < 3.0 * (0.25f64 / reps as f64).sqrt());
        let p3 = threes as f64 / reps as f64;
        let sd = (1.0 / 16.0 * 15.0 / 16.0 / reps as f64).sqrt();
        assert!((p3 - 1.0 / 16.0).abs() < 3.0 * sd);
        assert_eq!(sample_gw(&law, 1, 3).unwrap(), sample_gw(&law, 1, 3).unwrap());
        assert!(sample_gw(&OffspringLaw::geometric(0.7f64).unwrap(), 10, 0).is_err());
    }

    #[test]
    fn small_conditioned_samples() {
        let law = geo();
        for method in [Method::Rejection, Method::SequentialRejection, Method::DpExact] {
            let step = law.step_law();
            assert_eq!(conditioned_increments(&step, 1, method, 5).unwrap(), vec![-1]);
            let t = sample_conditioned(&law, 2, method, 9).unwrap();
            assert_eq!(t.child_counts(), &[1, 0]);
            for seed in 0..50 {
                let inc = conditioned_increments(&step, 7, method, seed).unwrap();
                assert_eq!(inc.iter().sum::<i64>(), -1);
                assert_eq!(sample_conditioned(&law, 7, method, seed).unwrap().size(), 7);
            }
        }
    }

    #[test]
    fn three_step_sequences_are_uniform() {
        let sampler = ConditionedSampler::new(&geo(), 3, Method::Rejection).unwrap();
        let draws: Vec<Vec<i64>> = (0..60_000).map(|i| sampler.increments(&mut replicate_rng(1, i)).unwrap()).collect();
        let mut counts: BTreeMap<Vec<i64>, u64> = BTreeMap::new();
        for d in &draws {
            *counts.entry(d.clone()).or_default() += 1;
        }
        assert_eq!(counts.len(), 6);
        let obs: Vec<u64> = counts.values().copied().collect();
        assert!(chi_square(&obs, &[1.0 / 6.0; 6]).p_value > 0.001);
    }

    #[test]
    fn methods_agree_in_distribution() {
        let law = geo();
        let draws = |method| -> Vec<Vec<i64>> {
            let s = ConditionedSampler::new(&law, 4, method).unwrap();
            (0..100_000).map(|i| s.increments(&mut replicate_rng(3, i)).unwrap()).collect()
        };
        let a = draws(Method::Rejection);
        let b = draws(Method::DpExact);
        let c = draws(Method::SequentialRejection);
        let (ab, ac) = (tv_distance(&a, &b), tv_distance(&a, &c));
        assert!(ab < 0.02 && ac < 0.02, "{ab} {ac}");
    }

    #[test]
    fn three_vertex_trees_equiprobable() {
        let trees = sample_conditioned_many(&geo(), 3, 20_000, Method::Rejection, 5).unwrap();
        let cherries = trees.iter().filter(|t| t.child_counts() == [2, 0, 0]).count();
        let frac = cherries as f64 / trees.len() as f64;
        assert!((frac - 0.5).abs() < 3.0 * (0.25f64 / 20_000.0).sqrt());
    }

    #[test]
    fn analytic_sampler_law_matches_enumeration() {
        let pmf = geometric_half_exact(8);
        for n in 2..=6 {
            let sampler = sampler_law_exact(&pmf, n).unwrap();
            let exact = enumerate_conditioned_weights(&pmf, n).unwrap();
            assert_eq!(sampler, exact);
        }
        let law = OffspringLaw::explicit(vec![0.3f64, 0.45, 0.0, 0.25]).unwrap();
        let a = sampler_law_exact(&law.pmf_vec(8), 6).unwrap();
        let b = enumerate_conditioned(&law, 6).unwrap();
        let b: Vec<_> = b.into_iter().filter(|(_, p)| *p > 0.0).collect();
        assert_eq!(a.len(), b.len());
        for ((ta, pa), (tb, pb)) in a.iter().zip(&b) {
            assert_eq!(ta, tb);
            assert!((pa - pb).abs() < 1e-12);
        }
    }

    #[test]
    fn unreachable_sizes_are_reported() {
        let periodic = OffspringLaw::explicit(vec![0.5f64, 0.0, 0.5]).unwrap();
        assert!(matches!(
            sample_conditioned(&periodic, 4, Method::Rejection, 0),
            Err(Error::ZeroConditionalProbability { n: 4 })
        ));
        assert_eq!(sample_conditioned(&periodic, 5, Method::Rejection, 0).unwrap().size(), 5);
        let gappy = OffspringLaw::explicit(vec![0.5f64, 0.0, 0.0, 0.3, 0.0, 0.2]).unwrap();
        assert!(!size_is_reachable(&gappy, 5));
        assert!(size_is_reachable(&gappy, 9));
    }

    #[test]
    fn dp_budget_is_enforced() {
        let r = ConditionedSampler::new(&geo(), 10_000, Method::DpExact);
        assert!(matches!(r, Err(Error::TableTooLarge { .. })));
    }

    #[test]
    fn replicates_are_deterministic() {
        let a = sample_conditioned_many(&geo(), 50, 20, Method::Rejection, 42).unwrap();
        let b = sample_conditioned_many(&geo(), 50, 20, Method::Rejection, 42).unwrap();
        assert_eq!(a, b);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let c = pool.install(|| sample_conditioned_many(&geo(), 50, 20, Method::Rejection, 42).unwrap());
        assert_eq!(a, c);
    }

    #[test]
    fn heavy_tailed_conditioned_sample() {
        let st = OffspringLaw::stable(1.5f64).unwrap();
        let t = sample_conditioned(&st, 5000, Method::Rejection, 1).unwrap();
        assert_eq!(t.size(), 5000);
    }
}
