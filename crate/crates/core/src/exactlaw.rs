//! Exact finite-n probabilities: walk marginals, progeny laws, the hitting
//! quantities `phi_n(j) = P[ζ_j = n]` and `phi*_n(j) = P[ζ_j >= n]`, the
//! absolute-continuity ratio `D_n^(a)` and exhaustive small-n checks.
//!
//! Here `W` is the random walk with steps `nu(k) = mu(k+1)` started at 0 and
//! `ζ_j` its first hitting time of `-j`.

use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::codings::{all_trees, walk_from_tree, Tree};
use crate::error::{Error, Result};
use crate::offspring::{OffspringLaw, StepLaw};
use crate::report::ExperimentReport;
use crate::scalar::{axpy, dot, series_pow, Real, Weight};

pub const DEFAULT_TRUNCATION_BUDGET: f64 = 1e-12;
pub const CROSS_CHECK_TOL: f64 = 1e-12;
pub const MAX_ENUMERATION_N: usize = 9;
pub const AC_CHECK_TOL: f64 = 1e-10;
/// Largest walk table (number of represented values) built by auto-sizing.
pub const MAX_WALK_TABLE_LEN: usize = 1 << 15;

/// Law on the integers `offset, offset+1, ...`; `truncated_mass` is the mass
/// of values above the window.
#[derive(Clone, Debug, Serialize)]
pub struct PmfTable<T> {
    pub offset: i64,
    pub masses: Vec<T>,
    pub truncated_mass: T,
}

impl<T: Real> PmfTable<T> {
    /// Largest represented value.
    pub fn last(&self) -> i64 {
        self.offset + self.masses.len() as i64 - 1
    }

    /// `P[X = k]`; values above the window read as 0.
    pub fn prob(&self, k: i64) -> T {
        if k < self.offset {
            return T::zero();
        }
        self.masses.get((k - self.offset) as usize).copied().unwrap_or_else(T::zero)
    }

    /// `P[X = k]`, refusing values above the window.
    pub fn get(&self, k: i64) -> Result<T> {
        if k > self.last() {
            return Err(Error::OutsideWindow { k, last: self.last() });
        }
        Ok(self.prob(k))
    }

    pub fn total(&self) -> T {
        self.masses.iter().copied().sum()
    }
}

/// Value window for [`walk_pmf`]. With `top = None` the window covers the
/// whole support for finite laws and otherwise grows until the excluded
/// upper tail is below `budget`.
#[derive(Clone, Copy, Debug)]
pub struct WalkWindow {
    pub top: Option<i64>,
    pub budget: f64,
}

impl Default for WalkWindow {
    fn default() -> Self {
        Self { top: None, budget: DEFAULT_TRUNCATION_BUDGET }
    }
}

impl WalkWindow {
    pub fn up_to(top: i64) -> Self {
        Self { top: Some(top), budget: 1.0 }
    }
}

/// Law of `W_n` on `[-n, top]`: `P[W_n = v] = [u^(v+n)] f(u)^n`. Every value
/// inside the window is exact (it only involves `mu(0..=n+top)`).
pub fn walk_pmf<T: Real>(step: &StepLaw<T>, n: usize, window: &WalkWindow) -> Result<PmfTable<T>> {
    if n == 0 {
        return Err(Error::InvalidParameter("walk_pmf needs n >= 1".into()));
    }
    let law = step.offspring();
    let ni = n as i64;
    let full_top = law.support_max().map(|k| (k as i64 - 1) * ni);
    let budget = T::tolerance(window.budget);
    let mut top = match (window.top, full_top) {
        (Some(t), Some(f)) => t.min(f),
        (Some(t), None) => t,
        (None, Some(f)) => f,
        (None, None) => (8.0 * (n as f64).sqrt()).ceil() as i64 + 32,
    }
    .max(-ni);
    loop {
        let len = (top + ni + 1) as usize;
        if len > MAX_WALK_TABLE_LEN && window.top.is_none() {
            return Err(Error::TruncationBudget { excluded: f64::NAN, budget: window.budget });
        }
        let masses = series_pow(&law.pmf_vec(len), n, len);
        let total: T = masses.iter().copied().sum();
        let truncated = if Some(top) == full_top {
            T::zero()
        } else {
            (T::one() - total).max(T::zero())
        };
        let table = PmfTable { offset: -ni, masses, truncated_mass: truncated };
        if truncated <= budget {
            return Ok(table);
        }
        if window.top.is_some() {
            return Err(Error::TruncationBudget {
                excluded: truncated.as_f64(),
                budget: window.budget,
            });
        }
        top = 2 * top.max(16);
    }
}

/// `P[W_n = -j]` for `j = 0..=n`.
pub fn hitting_masses<T: Real>(law: &OffspringLaw<T>, n: usize) -> Vec<T> {
    let coeffs = series_pow(&law.pmf_vec(n + 1), n, n + 1);
    (0..=n).map(|j| coeffs[n - j]).collect()
}

/// `phi_n(j) = (j/n) P[W_n = -j]` for `j = 0..=n`.
pub fn phi_table<T: Real>(law: &OffspringLaw<T>, n: usize) -> Vec<T> {
    let nn = T::from_count(n);
    hitting_masses(law, n)
        .into_iter()
        .enumerate()
        .map(|(j, p)| T::from_count(j) / nn * p)
        .collect()
}

pub fn phi<T: Real>(law: &OffspringLaw<T>, n: usize, j: usize) -> Result<T> {
    if n == 0 || j == 0 {
        return Err(Error::InvalidParameter("phi needs n >= 1 and j >= 1".into()));
    }
    if j > n {
        return Ok(T::zero());
    }
    Ok(phi_table(law, n)[j])
}

pub fn phi_star<T: Real>(law: &OffspringLaw<T>, n: usize, j: usize) -> Result<T> {
    if n == 0 || j == 0 {
        return Err(Error::InvalidParameter("phi_star needs n >= 1 and j >= 1".into()));
    }
    Ok(survival_table(law, n - 1).phi_star(j))
}

/// `P[ζ = n]` for `n = 0..=n_max` from `Z(s) = s f(Z(s))`.
pub fn progeny_recursion<T: Real>(law: &OffspringLaw<T>, n_max: usize) -> Vec<T> {
    use crate::offspring::Family;
    let mut z = vec![T::zero(); n_max + 1];
    if n_max == 0 {
        return z;
    }
    match *law.family() {
        Family::Geometric { p } => {
            z[1] = T::one() - p;
            for n in 2..=n_max {
                let s: T = (1..n).map(|i| z[i] * z[n - i]).sum();
                z[n] = p * s;
            }
        }
        Family::Stable { theta } => {
            // P = (1 - Z)^theta by the power recurrence, then z_n = z_{n-1} + p_{n-1}/theta.
            let mut pw = vec![T::zero(); n_max];
            pw[0] = T::one();
            z[1] = T::one() / theta;
            let th1 = theta + T::one();
            for n in 2..=n_max {
                let m = n - 1;
                let mm = T::from_count(m);
                let mut acc = T::zero();
                for i in 1..=m {
                    acc += (th1 * T::from_count(i) - mm) * (-z[i]) * pw[m - i];
                }
                pw[m] = acc / mm;
                z[n] = z[n - 1] + pw[m] / theta;
            }
        }
        Family::Explicit => {
            let mu = law.pmf_vec(n_max);
            let kmax = law.support_max().unwrap_or(0).min(n_max.saturating_sub(1));
            // c[k][m] = [s^m] Z^k
            let mut c = vec![vec![T::zero(); n_max]; kmax + 1];
            c[0][0] = T::one();
            for n in 1..=n_max {
                let m = n - 1;
                let mut zn = if m == 0 { mu[0] } else { T::zero() };
                for k in 1..=kmax.min(m) {
                    let v = if k == 1 {
                        z[m]
                    } else {
                        (1..=m + 1 - k).map(|i| z[i] * c[k - 1][m - i]).sum()
                    };
                    c[k][m] = v;
                    zn += mu[k] * v;
                }
                z[n] = zn;
            }
        }
    }
    z
}

/// Law of ζ on `1..=n_max`, with the upper tail `P[ζ > n_max]` as the
/// truncated mass.
#[derive(Clone, Debug, Serialize)]
pub struct ProgenyLaw<T> {
    pub table: PmfTable<T>,
    /// Largest `|P[ζ=n] - P[W_n=-1]/n|` over the checked sizes.
    pub cross_check_gap: T,
    pub checked: Vec<usize>,
}

impl<T: Real> ProgenyLaw<T> {
    pub fn prob(&self, n: usize) -> T {
        self.table.prob(n as i64)
    }

    /// `P[ζ >= n]`.
    pub fn survival(&self, n: usize) -> T {
        let below: T = (1..n).map(|p| self.prob(p)).sum();
        T::one() - below
    }
}

/// Sizes at which the recursion is compared with the walk route: every
/// `n <= 64`, powers of two and `n_max`.
fn kemperman_checkpoints(n_max: usize) -> Vec<usize> {
    let mut pts: Vec<usize> = (1..=n_max.min(64)).collect();
    let mut p = 128;
    while p < n_max {
        pts.push(p);
        p *= 2;
    }
    if n_max > 64 {
        pts.push(n_max);
    }
    pts
}

/// `P[ζ = n]` for `n <= n_max` by the recursion, cross-checked against
/// `P[W_n = -1]/n`.
pub fn progeny_pmf<T: Real>(law: &OffspringLaw<T>, n_max: usize) -> Result<ProgenyLaw<T>> {
    if n_max == 0 {
        return Err(Error::InvalidParameter("progeny_pmf needs n_max >= 1".into()));
    }
    let z = progeny_recursion(law, n_max);
    let checked = kemperman_checkpoints(n_max);
    let tol = T::tolerance(CROSS_CHECK_TOL);
    let mut worst = T::zero();
    for &n in &checked {
        let walk = hitting_masses(law, n)[1] / T::from_count(n);
        let gap = (walk - z[n]).abs();
        if gap > tol {
            return Err(Error::CrossCheck {
                what: "progeny law (recursion vs hitting time)",
                n,
                gap: gap.as_f64(),
                tolerance: tol.as_f64(),
            });
        }
        worst = worst.max(gap);
    }
    let masses = z[1..].to_vec();
    let total: T = masses.iter().copied().sum();
    Ok(ProgenyLaw {
        table: PmfTable { offset: 1, masses, truncated_mass: (T::one() - total).max(T::zero()) },
        cross_check_gap: worst,
        checked,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct KempermanCheck {
    pub n_max: usize,
    pub j_max: usize,
    pub max_gap: f64,
    pub worst: (usize, usize),
}

/// Compares `(j/n) P[W_n=-j]` with `P[ζ_j = n]`, the latter as the `j`-fold
/// convolution of the recursion-based progeny law.
pub fn kemperman_check<T: Real>(law: &OffspringLaw<T>, n_max: usize, j_max: usize) -> KempermanCheck {
    let z = progeny_recursion(law, n_max);
    let mut hits = vec![Vec::new()];
    for n in 1..=n_max {
        hits.push(hitting_masses(law, n));
    }
    let mut out = KempermanCheck { n_max, j_max, max_gap: 0.0, worst: (0, 0) };
    for j in 1..=j_max {
        let zj = series_pow(&z, j, n_max + 1);
        for n in 1..=n_max {
            let walk = if j <= n {
                T::from_count(j) / T::from_count(n) * hits[n][j]
            } else {
                T::zero()
            };
            let gap = (walk - zj[n]).abs().as_f64();
            if gap > out.max_gap {
                out.max_gap = gap;
                out.worst = (n, j);
            }
        }
    }
    out
}

/// `h(x) = P[walk from x stays >= 0 during `steps` steps]`, so that
/// `phi*_{steps+1}(j) = h(j-1)`.
#[derive(Clone, Debug)]
pub struct SurvivalTable<T> {
    steps: usize,
    h: Vec<T>,
}

impl<T: Real> SurvivalTable<T> {
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn get(&self, x: i64) -> T {
        if x < 0 {
            T::zero()
        } else {
            self.h.get(x as usize).copied().unwrap_or_else(T::one)
        }
    }

    /// `phi*_{steps+1}(j) = P[ζ_j >= steps+1]`.
    pub fn phi_star(&self, j: usize) -> T {
        self.get(j as i64 - 1)
    }
}

/// Backward dynamic programme
/// `h_t(x) = sum_{y >= x-1} mu(y-x+1) h_{t-1}(y) + mu([t-x, inf))` on `0 <= x < t`.
pub fn survival_table<T: Real>(law: &OffspringLaw<T>, steps: usize) -> SurvivalTable<T> {
    let mu = law.pmf_vec(steps + 1);
    let tail = law.tail_vec(steps + 2);
    let mut h: Vec<T> = Vec::new();
    for t in 1..=steps {
        let mut next = Vec::with_capacity(t);
        for x in 0..t {
            let inner = if x == 0 {
                dot(&mu[1..t], &h[0..t - 1])
            } else {
                dot(&mu[0..t - x], &h[x - 1..t - 1])
            };
            next.push(inner + tail[t - x]);
        }
        h = next;
    }
    SurvivalTable { steps, h }
}

/// Everything needed for `D_n^(a)(k)`.
#[derive(Clone, Debug)]
pub struct RatioTable<T> {
    pub n: usize,
    pub a: T,
    /// `⌊an⌋`.
    pub m: usize,
    /// `n - ⌊an⌋`.
    pub r: usize,
    phi_r: Vec<T>,
    survival_r: SurvivalTable<T>,
    pub phi_n1: T,
    pub phi_star_n1: T,
}

impl<T: Real> RatioTable<T> {
    pub fn new(law: &OffspringLaw<T>, n: usize, a: T) -> Result<Self> {
        if !(a > T::zero() && a < T::one()) {
            return Err(Error::InvalidParameter(format!("a = {a} not in (0,1)")));
        }
        if n < 2 {
            return Err(Error::InvalidParameter("ratio needs n >= 2".into()));
        }
        let m = (a * T::from_count(n)).floor().to_usize().unwrap_or(0);
        let r = n - m;
        let progeny = progeny_pmf(law, n)?;
        let phi_n1 = progeny.prob(n);
        if !(phi_n1 > T::zero()) {
            return Err(Error::ZeroConditionalProbability { n });
        }
        Ok(Self {
            n,
            a,
            m,
            r,
            phi_r: phi_table(law, r),
            survival_r: survival_table(law, r - 1),
            phi_n1,
            phi_star_n1: progeny.survival(n),
        })
    }

    pub fn phi_r(&self, j: usize) -> T {
        self.phi_r.get(j).copied().unwrap_or_else(T::zero)
    }

    pub fn phi_star_r(&self, j: usize) -> T {
        self.survival_r.phi_star(j)
    }

    pub fn survival(&self) -> &SurvivalTable<T> {
        &self.survival_r
    }

    /// `D_n^(a)(k) = [phi_r(k+1)/phi_n(1)] / [phi*_r(k+1)/phi*_n(1)]`.
    pub fn ratio(&self, k: usize) -> Result<T> {
        let star = self.phi_star_r(k + 1);
        if !(star > T::zero()) {
            return Err(Error::Unreachable(format!(
                "phi*_{}({}) = 0, state k = {k} cannot be reached on the event",
                self.r,
                k + 1
            )));
        }
        Ok((self.phi_r(k + 1) / self.phi_n1) / (star / self.phi_star_n1))
    }
}

pub fn discrete_ratio<T: Real>(law: &OffspringLaw<T>, n: usize, a: T, k: usize) -> Result<T> {
    RatioTable::new(law, n, a)?.ratio(k)
}

/// `K_m(x) = P[W_1..W_m >= 0, W_m = x]` for `x` in `[0, top]`, computed on a
/// window shrinking by one per step so every entry is exact.
pub fn killed_walk<T: Real>(law: &OffspringLaw<T>, m: usize, top: usize) -> Vec<T> {
    let mu = law.pmf_vec(top + m + 3);
    let mut cur = vec![T::one()];
    for i in 1..=m {
        let w = top + (m - i);
        let mut next = vec![T::zero(); w + 1];
        let reach = cur.len().min(w + 2);
        for (y, &val) in cur.iter().enumerate().take(reach) {
            if val == T::zero() {
                continue;
            }
            let x0 = y.saturating_sub(1);
            let m0 = x0 + 1 - y;
            let len = w + 1 - x0;
            axpy(&mut next[x0..=w], val, &mu[m0..m0 + len]);
        }
        cur = next;
    }
    cur.resize(top + 1, T::zero());
    cur
}

/// Law of `W_⌊an⌋` given `ζ >= n`, on `[0, r-1]`.
#[derive(Clone, Debug)]
pub struct ConditionedPrefix<T> {
    pub ratio: RatioTable<T>,
    /// `P[W_m = x | ζ >= n]` for `x < r`.
    pub weights: Vec<T>,
}

impl<T: Real> ConditionedPrefix<T> {
    pub fn new(law: &OffspringLaw<T>, n: usize, a: T) -> Result<Self> {
        let ratio = RatioTable::new(law, n, a)?;
        let killed = killed_walk(law, ratio.m, ratio.r - 1);
        let weights = killed
            .iter()
            .enumerate()
            .map(|(x, &k)| k * ratio.survival().get(x as i64) / ratio.phi_star_n1)
            .collect();
        Ok(Self { ratio, weights })
    }

    /// Conditional mass of the window `W_m < r`.
    pub fn covered_mass(&self) -> T {
        self.weights.iter().copied().sum()
    }

    /// `E[g(W_m); W_m < r | ζ >= n]`.
    pub fn expectation(&self, mut g: impl FnMut(usize) -> Result<T>) -> Result<T> {
        let mut acc = T::zero();
        for (x, &w) in self.weights.iter().enumerate() {
            if w > T::zero() {
                acc += w * g(x)?;
            }
        }
        Ok(acc)
    }

    /// `E[D_n^(a)(W_m) | ζ >= n]`, equal to 1.
    pub fn mean_ratio(&self) -> Result<T> {
        self.expectation(|x| self.ratio.ratio(x))
    }
}

/// `P_mu[τ]` for a fixed tree.
pub fn tree_weight<W: Weight>(pmf: &[W], tree: &Tree) -> W {
    tree.child_counts().iter().fold(W::one(), |acc, &k| {
        acc * pmf.get(k).cloned().unwrap_or_else(W::zero)
    })
}

/// Every tree with `n` vertices with its conditional probability
/// `P_mu[τ] / P_mu[ζ = n]`, generic over the weight ring.
pub fn enumerate_conditioned_weights<W: Weight>(pmf: &[W], n: usize) -> Result<Vec<(Tree, W)>> {
    if n == 0 {
        return Err(Error::InvalidParameter("n >= 1 required".into()));
    }
    if n > MAX_ENUMERATION_N {
        return Err(Error::EnumerationTooLarge { n, max: MAX_ENUMERATION_N });
    }
    let raw: Vec<(Tree, W)> = all_trees(n)
        .into_iter()
        .map(|t| {
            let w = tree_weight(pmf, &t);
            (t, w)
        })
        .collect();
    let total = raw.iter().fold(W::zero(), |acc, (_, w)| acc + w.clone());
    if total.is_zero() {
        return Err(Error::ZeroConditionalProbability { n });
    }
    Ok(raw.into_iter().map(|(t, w)| (t, w / total.clone())).collect())
}

pub fn enumerate_conditioned<T: Real>(law: &OffspringLaw<T>, n: usize) -> Result<Vec<(Tree, T)>> {
    enumerate_conditioned_weights(&law.pmf_vec(n), n)
}

/// `mu(k) = 2^-(k+1)` for `k < len` as exact rationals.
pub fn geometric_half_exact(len: usize) -> Vec<BigRational> {
    let two = BigInt::from(2);
    (0..len)
        .map(|k| BigRational::new(BigInt::from(1), num_traits::pow(two.clone(), k + 1)))
        .collect()
}

/// Exhaustive check of
/// `E[f(W_0..W_m) | ζ = n] = E[f(W_0..W_m) D_n^(a)(W_m) | ζ >= n]`
/// for `f` the indicator of each walk prefix.
pub fn check_absolute_continuity<T: Real>(law: &OffspringLaw<T>, n: usize, a: T) -> Result<ExperimentReport> {
    let started = Instant::now();
    if n > MAX_ENUMERATION_N {
        return Err(Error::EnumerationTooLarge { n, max: MAX_ENUMERATION_N });
    }
    let table = RatioTable::new(law, n, a)?;
    let m = table.m;
    let mut lhs: BTreeMap<Vec<i64>, T> = BTreeMap::new();
    for (tree, p) in enumerate_conditioned(law, n)? {
        let walk = walk_from_tree(&tree);
        *lhs.entry(walk.values()[..=m].to_vec()).or_insert_with(T::zero) += p;
    }
    // Prefixes staying in [0, n-1]: any prefix ending at W_m >= r has D = 0.
    let step = law.step_law();
    let cap = n as i64 - 1;
    let mut rhs: BTreeMap<Vec<i64>, T> = BTreeMap::new();
    let mut stack: Vec<(Vec<i64>, T)> = vec![(vec![0], T::one())];
    while let Some((prefix, p)) = stack.pop() {
        if prefix.len() == m + 1 {
            let x = *prefix.last().expect("nonempty") as usize;
            let star = table.phi_star_r(x + 1);
            let value = if star > T::zero() {
                p * star / table.phi_star_n1 * table.ratio(x)?
            } else {
                T::zero()
            };
            rhs.insert(prefix, value);
            continue;
        }
        let w = *prefix.last().expect("nonempty");
        for k in -1..=(cap - w) {
            let pk = step.pmf(k);
            if w + k < 0 || pk == T::zero() {
                continue;
            }
            let mut next = prefix.clone();
            next.push(w + k);
            stack.push((next, p * pk));
        }
    }
    let mut max_gap = T::zero();
    for key in lhs.keys().chain(rhs.keys()) {
        let l = lhs.get(key).copied().unwrap_or_else(T::zero);
        let r = rhs.get(key).copied().unwrap_or_else(T::zero);
        max_gap = max_gap.max((l - r).abs());
    }
    let lhs_total: T = lhs.values().copied().sum();
    let rhs_total: T = rhs.values().copied().sum();
    let tol = T::tolerance(AC_CHECK_TOL);
    let mut report = ExperimentReport::new("absolute_continuity")
        .param("n", n)
        .param("a", a.as_f64())
        .param("m", m)
        .param("law", law.to_spec());
    report.stat("prefixes", lhs.len().max(rhs.len()));
    report.stat("max_discrepancy", max_gap.as_f64());
    report.stat("f_one_lhs", lhs_total.as_f64());
    report.stat("f_one_rhs", rhs_total.as_f64());
    report.tolerance("max_discrepancy", tol.as_f64());
    report.pass = Some(
        max_gap <= tol && (lhs_total - T::one()).abs() <= tol && (rhs_total - T::one()).abs() <= tol,
    );
    report.finish(started);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{One, ToPrimitive};

    fn geo() -> OffspringLaw<f64> {
        OffspringLaw::geometric(0.5).unwrap()
    }

    fn catalan(n: usize) -> f64 {
        let mut c = 1.0;
        for k in 0..n {
            c = c * 2.0 * (2 * k + 1) as f64 / (k + 2) as f64;
        }
        c
    }

    #[test]
    fn walk_examples() {
        let step = geo().step_law();
        let t1 = walk_pmf(&step, 1, &WalkWindow::default()).unwrap();
        assert_eq!(t1.prob(-1), 0.5);
        let t3 = walk_pmf(&step, 3, &WalkWindow::default()).unwrap();
        assert!((t3.prob(-1) - 3.0 / 16.0).abs() < 1e-15);
        assert!(t3.truncated_mass <= 1e-12);
        assert!((t3.total() + t3.truncated_mass - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_steps_is_a_self_convolution() {
        let law = OffspringLaw::explicit(vec![0.3f64, 0.2, 0.1, 0.4]).unwrap();
        let step = law.step_law();
        let t = walk_pmf(&step, 2, &WalkWindow::default()).unwrap();
        assert_eq!(t.offset, -2);
        assert_eq!(t.last(), 4);
        for v in -2..=4i64 {
            let direct: f64 = (-1..=2).map(|k| step.pmf(k) * step.pmf(v - k)).sum();
            assert!((t.prob(v) - direct).abs() < 1e-15);
        }
        assert_eq!(t.truncated_mass, 0.0);
        assert!(matches!(t.get(5), Err(Error::OutsideWindow { .. })));
    }

    #[test]
    fn heavy_tail_window_is_exact_inside() {
        let law = OffspringLaw::stable(1.5f64).unwrap();
        let step = law.step_law();
        let small = walk_pmf(&step, 40, &WalkWindow::up_to(30)).unwrap();
        let large = walk_pmf(&step, 40, &WalkWindow::up_to(300)).unwrap();
        for v in -40..=30 {
            assert!((small.prob(v) - large.prob(v)).abs() < 1e-15);
        }
        assert!(small.truncated_mass > large.truncated_mass);
        let strict = WalkWindow { top: Some(30), budget: 1e-12 };
        assert!(matches!(walk_pmf(&step, 40, &strict), Err(Error::TruncationBudget { .. })));
    }

    #[test]
    fn progeny_geometric_catalan() {
        let p = progeny_pmf(&geo(), 200).unwrap();
        assert_eq!(p.prob(1), 0.5);
        assert!((p.prob(2) - 0.125).abs() < 1e-15);
        assert!((p.prob(3) - 0.0625).abs() < 1e-15);
        for n in 1..=60 {
            let oracle = catalan(n - 1) * 0.5f64.powi(2 * n as i32 - 1);
            assert!((p.prob(n) - oracle).abs() < 1e-15 * oracle.max(1e-300) * 10.0);
        }
        assert!(p.cross_check_gap <= 1e-12);
    }

    #[test]
    fn progeny_first_mass_is_mu_zero() {
        let st = OffspringLaw::stable(1.5f64).unwrap();
        let p = progeny_pmf(&st, 300).unwrap();
        assert!((p.prob(1) - 2.0 / 3.0).abs() < 1e-15);
        let ex = OffspringLaw::explicit(vec![0.3f64, 0.45, 0.0, 0.25]).unwrap();
        let p = progeny_pmf(&ex, 300).unwrap();
        assert!((p.prob(1) - 0.3).abs() < 1e-15);
        assert!(p.cross_check_gap <= 1e-12);
    }

    #[test]
    fn stable_progeny_recursion_holds_at_large_n() {
        let st = OffspringLaw::stable(1.3f64).unwrap();
        let p = progeny_pmf(&st, 2048).unwrap();
        assert!(p.cross_check_gap <= 1e-12);
        assert!(p.checked.contains(&2048));
    }

    #[test]
    fn phi_examples() {
        let law = geo();
        assert!((phi(&law, 3, 1).unwrap() - 1.0 / 16.0).abs() < 1e-15);
        for j in 1..5 {
            assert_eq!(phi_star(&law, 1, j).unwrap(), 1.0);
        }
        assert!((phi_star(&law, 2, 1).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn survival_dp_matches_hitting_sum() {
        for law in [geo(), OffspringLaw::stable(1.5f64).unwrap(), OffspringLaw::explicit(vec![0.5, 0.0, 0.5]).unwrap()] {
            let n = 25;
            let dp = survival_table(&law, n - 1);
            for j in 1..=8 {
                let direct = 1.0 - (1..n).map(|p| phi(&law, p, j).unwrap()).sum::<f64>();
                assert!((dp.phi_star(j) - direct).abs() < 1e-13, "j = {j}");
            }
            let prog = progeny_pmf(&law, n).unwrap();
            assert!((dp.phi_star(1) - prog.survival(n)).abs() < 1e-13);
        }
    }

    #[test]
    fn phi_star_is_nonincreasing_in_n() {
        let law = OffspringLaw::stable(1.5f64).unwrap();
        for j in 1..4 {
            let mut prev = 1.0;
            for n in 1..30 {
                let v = phi_star(&law, n, j).unwrap();
                assert!(v <= prev + 1e-15);
                prev = v;
            }
        }
    }

    #[test]
    fn ratio_pinned_value_and_mean_identity() {
        let law = geo();
        let table = RatioTable::new(&law, 6, 0.5).unwrap();
        assert_eq!((table.m, table.r), (3, 3));
        // phi_3(1) = 1/16, phi_6(1) = C_5 2^-11 = 42/2048,
        // phi*_3(1) = 1 - 1/2 - 1/8 = 3/8, phi*_6(1) = 1 - (1/2+1/8+1/16+5/128+14/512)
        let phi_star6 = 1.0 - (0.5 + 0.125 + 0.0625 + 5.0 / 128.0 + 14.0 / 512.0);
        let expect = (1.0 / 16.0) / (42.0 / 2048.0) / ((3.0 / 8.0) / phi_star6);
        assert!((table.ratio(0).unwrap() - expect).abs() < 1e-13);
        for n in [6usize, 9, 40] {
            for a in [0.25, 0.5, 0.75] {
                let prefix = ConditionedPrefix::new(&law, n, a).unwrap();
                assert!((prefix.mean_ratio().unwrap() - 1.0).abs() < 1e-12);
                for k in 0..n {
                    assert!(prefix.ratio.ratio(k).unwrap() >= 0.0);
                }
            }
        }
    }

    #[test]
    fn killed_walk_small_case() {
        // geometric(1/2), m = 2: P[W_1 >= 0, W_2 = x] = sum_{y>=0} nu(y) nu(x-y)
        let law = geo();
        let k = killed_walk(&law, 2, 5);
        let step = law.step_law();
        for x in 0..=5i64 {
            let direct: f64 = (0..=x + 1).map(|y| step.pmf(y) * step.pmf(x - y)).sum();
            assert!((k[x as usize] - direct).abs() < 1e-15);
        }
    }

    #[test]
    fn enumeration_examples() {
        let law = geo();
        let one = enumerate_conditioned(&law, 1).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].1, 1.0);
        let three = enumerate_conditioned(&law, 3).unwrap();
        assert_eq!(three.len(), 2);
        assert!(three.iter().all(|(_, p)| (p - 0.5).abs() < 1e-15));
        assert_eq!(enumerate_conditioned(&law, 4).unwrap().len(), 5);
        assert!(matches!(enumerate_conditioned(&law, 10), Err(Error::EnumerationTooLarge { .. })));
        let periodic = OffspringLaw::explicit(vec![0.5, 0.0, 0.5]).unwrap();
        assert!(matches!(
            enumerate_conditioned(&periodic, 2),
            Err(Error::ZeroConditionalProbability { n: 2 })
        ));
    }

    #[test]
    fn exact_rational_enumeration_is_uniform_for_geometric_half() {
        let pmf = geometric_half_exact(8);
        for n in 1..=8 {
            let trees = enumerate_conditioned_weights(&pmf, n).unwrap();
            let total = trees.iter().fold(BigRational::from_integer(0.into()), |a, (_, w)| a + w);
            assert!(total.is_one());
            let first = trees[0].1.clone();
            assert!(trees.iter().all(|(_, w)| *w == first));
            assert!(((first.to_f64().unwrap()) * catalan(n - 1) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn kemperman_small() {
        let check = kemperman_check(&geo(), 14, 4);
        assert!(check.max_gap <= 1e-12, "{check:?}");
        let st = OffspringLaw::stable(1.5f64).unwrap();
        assert!(kemperman_check(&st, 14, 4).max_gap <= 1e-12);
    }

    #[test]
    fn absolute_continuity_geometric() {
        let r = check_absolute_continuity(&geo(), 4, 0.5).unwrap();
        assert_eq!(r.pass, Some(true), "{}", r.to_json());
        let disc = r.statistics["max_discrepancy"].as_f64().unwrap();
        assert!(disc <= 1e-10);
    }

    #[test]
    fn tilting_preserves_conditioned_law() {
        let sub = OffspringLaw::explicit(vec![0.5f64, 0.3, 0.2]).unwrap();
        let (crit, _) = sub.tilt_to_critical().unwrap();
        for n in 2..=6 {
            let a = enumerate_conditioned(&sub, n).unwrap();
            let b = enumerate_conditioned(&crit, n).unwrap();
            for ((ta, pa), (tb, pb)) in a.iter().zip(&b) {
                assert_eq!(ta, tb);
                assert!((pa - pb).abs() < 1e-12);
            }
        }
    }
}
