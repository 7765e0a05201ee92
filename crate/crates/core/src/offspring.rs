//! Offspring distributions and their shifted step laws.
//!
//! Three families are supported:
//!
//! * geometric, `mu(k) = (1-p) p^k`, critical at `p = 1/2` (finite variance);
//! * the stable family with generating function `f(s) = s + (1-s)^theta / theta`,
//!   `theta` in `(1,2)`, critical with `mu(k) ~ c k^(-1-theta)`;
//! * explicit finite lists `p_0..p_K`.
//!
//! Closed-form families are evaluated lazily and carry an analytic tail
//! `mu([k, inf))`, so no truncation is ever implicit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{gamma, ln_gamma, Real};

pub const CRITICALITY_TOL: f64 = 1e-10;
pub const NORMALIZATION_TOL: f64 = 1e-12;
pub const TILT_BISECTION_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum Family<T> {
    Geometric { p: T },
    Stable { theta: T },
    Explicit,
}

#[derive(Clone, Debug)]
pub struct OffspringLaw<T> {
    family: Family<T>,
    probabilities: Vec<T>,
    suffix: Vec<T>,
    theta: T,
    tail_constant: Option<T>,
    mean: T,
    variance: Option<T>,
}

impl<T: Real> OffspringLaw<T> {
    pub fn geometric(p: T) -> Result<Self> {
        if !(p > T::zero() && p < T::one()) {
            return Err(Error::InvalidParameter(format!("geometric p = {p} not in (0,1)")));
        }
        let q = T::one() - p;
        Ok(Self {
            family: Family::Geometric { p },
            probabilities: Vec::new(),
            suffix: Vec::new(),
            theta: T::lit(2.0),
            tail_constant: None,
            mean: p / q,
            variance: Some(p / (q * q)),
        })
    }

    /// Member of the stable family `f(s) = s + (1-s)^theta / theta`.
    pub fn stable(theta: T) -> Result<Self> {
        if !(theta > T::one() && theta < T::lit(2.0)) {
            return Err(Error::InvalidParameter(format!(
                "stable family needs theta in the open interval (1,2), got {theta}"
            )));
        }
        let c = (theta - T::one()) / gamma(T::lit(2.0) - theta);
        Ok(Self {
            family: Family::Stable { theta },
            probabilities: Vec::new(),
            suffix: Vec::new(),
            theta,
            tail_constant: Some(c),
            mean: T::one(),
            variance: None,
        })
    }

    pub fn explicit(probabilities: Vec<T>) -> Result<Self> {
        let mut probs = probabilities;
        if probs.iter().any(|&p| !(p >= T::zero()) || !p.is_finite()) {
            return Err(Error::InvalidLaw("probabilities must be finite and nonnegative".into()));
        }
        while probs.len() > 1 && probs.last() == Some(&T::zero()) {
            probs.pop();
        }
        let total: T = probs.iter().copied().sum();
        if (total - T::one()).abs() > T::tolerance(NORMALIZATION_TOL) {
            return Err(Error::InvalidLaw(format!("probabilities sum to {total}, not 1")));
        }
        let p0 = probs.first().copied().unwrap_or_else(T::zero);
        let p1 = probs.get(1).copied().unwrap_or_else(T::zero);
        if !(p0 > T::zero()) {
            return Err(Error::InvalidLaw("mu(0) must be positive".into()));
        }
        if !(p1 < T::one()) {
            return Err(Error::InvalidLaw("mu(1) must be below 1".into()));
        }
        let mut suffix = vec![T::zero(); probs.len() + 1];
        for k in (0..probs.len()).rev() {
            suffix[k] = suffix[k + 1] + probs[k];
        }
        let mean: T = probs
            .iter()
            .enumerate()
            .map(|(k, &p)| T::from_count(k) * p)
            .sum();
        let second: T = probs
            .iter()
            .enumerate()
            .map(|(k, &p)| T::from_count(k * k) * p)
            .sum();
        Ok(Self {
            family: Family::Explicit,
            probabilities: probs,
            suffix,
            theta: T::lit(2.0),
            tail_constant: None,
            mean,
            variance: Some(second - mean * mean),
        })
    }

    pub fn from_spec(spec: &LawSpec) -> Result<Self> {
        match spec.family {
            FamilyTag::Geometric => Self::geometric(T::lit(spec.param.unwrap_or(0.5))),
            FamilyTag::Stable => {
                let theta = spec
                    .param
                    .ok_or_else(|| Error::InvalidLaw("stable family needs \"param\" (theta)".into()))?;
                Self::stable(T::lit(theta))
            }
            FamilyTag::Explicit => {
                let probs = spec.probabilities.as_ref().ok_or_else(|| {
                    Error::InvalidLaw("explicit family needs \"probabilities\"".into())
                })?;
                Self::explicit(probs.iter().map(|&p| T::lit(p)).collect())
            }
        }
    }

    pub fn to_spec(&self) -> LawSpec {
        match &self.family {
            Family::Geometric { p } => LawSpec {
                family: FamilyTag::Geometric,
                param: Some(p.as_f64()),
                probabilities: None,
            },
            Family::Stable { theta } => LawSpec {
                family: FamilyTag::Stable,
                param: Some(theta.as_f64()),
                probabilities: None,
            },
            Family::Explicit => LawSpec {
                family: FamilyTag::Explicit,
                param: None,
                probabilities: Some(self.probabilities.iter().map(|p| p.as_f64()).collect()),
            },
        }
    }

    pub fn family(&self) -> &Family<T> {
        &self.family
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    pub fn tail_constant(&self) -> Option<T> {
        self.tail_constant
    }

    pub fn mean(&self) -> T {
        self.mean
    }

    /// `None` encodes infinite variance.
    pub fn variance(&self) -> Option<T> {
        self.variance
    }

    /// Largest degree with positive mass, if the support is finite.
    pub fn support_max(&self) -> Option<usize> {
        match self.family {
            Family::Explicit => Some(self.probabilities.len() - 1),
            _ => None,
        }
    }

    pub fn is_critical(&self) -> bool {
        (self.mean - T::one()).abs() <= T::tolerance(CRITICALITY_TOL)
    }

    /// gcd of the support equals 1 (the support always contains 0).
    pub fn is_aperiodic(&self) -> bool {
        match self.family {
            Family::Geometric { .. } | Family::Stable { .. } => true,
            Family::Explicit => {
                let g = self
                    .probabilities
                    .iter()
                    .enumerate()
                    .filter(|(_, &p)| p > T::zero())
                    .fold(0usize, |g, (k, _)| gcd(g, k));
                g == 1
            }
        }
    }

    pub fn require_critical(&self) -> Result<()> {
        if self.is_critical() {
            Ok(())
        } else {
            Err(Error::InvalidLaw(format!("law has mean {}, not 1", self.mean)))
        }
    }

    pub fn pmf(&self, k: usize) -> T {
        match self.family {
            Family::Geometric { p } => (T::one() - p) * p.powi(k as i32),
            Family::Stable { theta } => stable_pmf(theta, k),
            Family::Explicit => self.probabilities.get(k).copied().unwrap_or_else(T::zero),
        }
    }

    /// `mu(0..len)`.
    pub fn pmf_vec(&self, len: usize) -> Vec<T> {
        match self.family {
            Family::Geometric { p } => {
                let mut out = Vec::with_capacity(len);
                let mut v = T::one() - p;
                for _ in 0..len {
                    out.push(v);
                    v *= p;
                }
                out
            }
            Family::Stable { theta } => {
                let mut out = Vec::with_capacity(len);
                for k in 0..len {
                    let v = match k {
                        0 => T::one() / theta,
                        1 => T::zero(),
                        2 => (theta - T::one()) / T::lit(2.0),
                        _ => out[k - 1] * (T::from_count(k - 1) - theta) / T::from_count(k),
                    };
                    out.push(v);
                }
                out
            }
            Family::Explicit => (0..len).map(|k| self.pmf(k)).collect(),
        }
    }

    /// `mu([k, inf))`.
    pub fn tail(&self, k: usize) -> T {
        match self.family {
            Family::Geometric { p } => p.powi(k as i32),
            Family::Stable { theta } => stable_tail(theta, k),
            Family::Explicit => self.suffix.get(k).copied().unwrap_or_else(T::zero),
        }
    }

    /// `mu([k, inf))` for `k in 0..len`.
    pub fn tail_vec(&self, len: usize) -> Vec<T> {
        match self.family {
            Family::Stable { theta } => {
                let mut out = Vec::with_capacity(len);
                for k in 0..len {
                    let v = match k {
                        0 => T::one(),
                        1 | 2 => T::one() - T::one() / theta,
                        _ => out[k - 1] * (T::from_count(k - 1) - theta) / T::from_count(k - 1),
                    };
                    out.push(v);
                }
                out
            }
            _ => (0..len).map(|k| self.tail(k)).collect(),
        }
    }

    pub fn step_law(&self) -> StepLaw<T> {
        StepLaw { law: self.clone() }
    }

    /// Explicit law `mu(0..=cap)` renormalized to total mass 1.
    pub fn truncated(&self, cap: usize) -> Result<Self> {
        let mut probs = self.pmf_vec(cap + 1);
        let total: T = probs.iter().copied().sum();
        for p in &mut probs {
            *p /= total;
        }
        Self::explicit(probs)
    }

    /// Exponentially tilts the law to mean 1. Returns the tilted law and the
    /// tilt parameter `lambda`.
    pub fn tilt_to_critical(&self) -> Result<(Self, T)> {
        if self.is_critical() {
            return Ok((self.clone(), T::one()));
        }
        let radius = match self.family {
            Family::Geometric { p } => T::one() / p,
            Family::Explicit => T::infinity(),
            Family::Stable { .. } => unreachable!("stable family is critical by construction"),
        };
        let m = |lambda: T| self.tilted_mean(lambda);
        let one = T::one();
        let (mut lo, mut hi);
        if self.mean > one {
            hi = one;
            lo = T::lit(0.5);
            let mut guard = 0;
            while m(lo) >= one {
                lo *= T::lit(0.5);
                guard += 1;
                if guard > 2000 {
                    return Err(Error::NoCriticalTilt(format!(
                        "tilted mean stays >= 1 down to lambda = {lo}"
                    )));
                }
            }
        } else {
            if self.support_max().is_some_and(|k| k <= 1) {
                return Err(Error::NoCriticalTilt(
                    "support is contained in {0,1}, tilted mean is below 1 for every lambda".into(),
                ));
            }
            lo = one;
            hi = one;
            let mut guard = 0;
            while m(hi) <= one {
                hi = if radius.is_finite() {
                    (hi + radius) * T::lit(0.5)
                } else {
                    hi * T::lit(2.0)
                };
                guard += 1;
                if guard > 2000 || !hi.is_finite() {
                    return Err(Error::NoCriticalTilt(format!(
                        "tilted mean stays <= 1 up to lambda = {hi} (radius of convergence {radius})"
                    )));
                }
            }
        }
        let tol = T::tolerance(TILT_BISECTION_TOL);
        while hi - lo > tol * hi.max(one) {
            let mid = (lo + hi) * T::lit(0.5);
            if mid <= lo || mid >= hi {
                break;
            }
            if m(mid) < one {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let lambda = (lo + hi) * T::lit(0.5);
        let tilted = match self.family {
            Family::Geometric { p } => Self::geometric(p * lambda)?,
            Family::Explicit => {
                let w = self.tilt_weights(lambda);
                Self::explicit(w)?
            }
            Family::Stable { .. } => unreachable!(),
        };
        if !tilted.is_critical() {
            return Err(Error::NoCriticalTilt(format!(
                "bisection converged to lambda = {lambda} but the tilted mean is {}",
                tilted.mean
            )));
        }
        Ok((tilted, lambda))
    }

    fn tilt_weights(&self, lambda: T) -> Vec<T> {
        let ln_l = lambda.ln();
        let logs: Vec<T> = self
            .probabilities
            .iter()
            .enumerate()
            .map(|(k, &p)| {
                if p > T::zero() {
                    p.ln() + T::from_count(k) * ln_l
                } else {
                    T::neg_infinity()
                }
            })
            .collect();
        let top = logs.iter().copied().fold(T::neg_infinity(), T::max);
        let w: Vec<T> = logs.iter().map(|&l| (l - top).exp()).collect();
        let z: T = w.iter().copied().sum();
        w.into_iter().map(|x| x / z).collect()
    }

    fn tilted_mean(&self, lambda: T) -> T {
        match self.family {
            Family::Geometric { p } => {
                let q = p * lambda;
                q / (T::one() - q)
            }
            Family::Explicit => self
                .tilt_weights(lambda)
                .iter()
                .enumerate()
                .map(|(k, &w)| T::from_count(k) * w)
                .sum(),
            Family::Stable { .. } => self.mean,
        }
    }

    /// Normalizing sequence with `W_n / B_n -> X_1`, `E[exp(-l X_1)] = exp(l^theta)`.
    pub fn calibrate_bn(&self, n: usize) -> Result<T> {
        if n == 0 {
            return Err(Error::InvalidParameter("B_n needs n >= 1".into()));
        }
        self.require_critical()?;
        let nn = T::from_count(n);
        if let Some(var) = self.variance {
            return Ok((var * nn / T::lit(2.0)).sqrt());
        }
        let c = self.tail_constant.ok_or(Error::UnknownTail)?;
        let th = self.theta;
        let scale = c * gamma(T::lit(2.0) - th) / (th * (th - T::one()));
        Ok((scale * nn).powf(T::one() / th))
    }
}

fn stable_pmf<T: Real>(theta: T, k: usize) -> T {
    match k {
        0 => T::one() / theta,
        1 => T::zero(),
        _ if k <= 64 => {
            let mut v = (theta - T::one()) / T::lit(2.0);
            for j in 2..k {
                v = v * (T::from_count(j) - theta) / T::from_count(j + 1);
            }
            v
        }
        _ => {
            let kk = T::from_count(k);
            let c = (theta - T::one()) / gamma(T::lit(2.0) - theta);
            c * (ln_gamma(kk - theta) - ln_gamma(kk + T::one())).exp()
        }
    }
}

fn stable_tail<T: Real>(theta: T, k: usize) -> T {
    match k {
        0 => T::one(),
        1 | 2 => T::one() - T::one() / theta,
        _ if k <= 64 => {
            let mut v = T::one() - T::one() / theta;
            for j in 2..k {
                v = v * (T::from_count(j) - theta) / T::from_count(j);
            }
            v
        }
        _ => {
            let kk = T::from_count(k);
            let c = (theta - T::one()) / (theta * gamma(T::lit(2.0) - theta));
            c * (ln_gamma(kk - theta) - ln_gamma(kk)).exp()
        }
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// The shifted law `nu(k) = mu(k+1)` on `{-1, 0, 1, ...}`.
#[derive(Clone, Debug)]
pub struct StepLaw<T> {
    law: OffspringLaw<T>,
}

impl<T: Real> StepLaw<T> {
    pub fn offspring(&self) -> &OffspringLaw<T> {
        &self.law
    }

    pub fn pmf(&self, k: i64) -> T {
        if k < -1 {
            T::zero()
        } else {
            self.law.pmf((k + 1) as usize)
        }
    }

    /// `P[nu >= k]`.
    pub fn tail(&self, k: i64) -> T {
        if k <= -1 {
            T::one()
        } else {
            self.law.tail((k + 1) as usize)
        }
    }

    pub fn mean(&self) -> T {
        self.law.mean() - T::one()
    }
}

/// Newtype for laws with finite variance (`theta = 2`), the only case where
/// density-level references for the excursion height exist.
#[derive(Clone, Debug)]
pub struct FiniteVarianceLaw<T>(OffspringLaw<T>);

impl<T: Real> FiniteVarianceLaw<T> {
    pub fn law(&self) -> &OffspringLaw<T> {
        &self.0
    }
}

impl<T: Real> TryFrom<OffspringLaw<T>> for FiniteVarianceLaw<T> {
    type Error = Error;

    fn try_from(law: OffspringLaw<T>) -> Result<Self> {
        if law.variance().is_none() {
            return Err(Error::InvalidLaw(format!(
                "law has theta = {} (infinite variance); excursion density references need theta = 2",
                law.theta()
            )));
        }
        law.require_critical()?;
        Ok(Self(law))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyTag {
    Geometric,
    Stable,
    Explicit,
}

/// On-disk law description:
/// `{"family": "geometric"|"stable"|"explicit", "param": ..., "probabilities": [...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LawSpec {
    pub family: FamilyTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub param: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probabilities: Option<Vec<f64>>,
}
