//! Spectrally positive stable law with `E[exp(-l X_t)] = exp(t l^theta)`,
//! `theta` in `(1, 2]`, and the continuous-side quantities built from it.
//!
//! Densities come from Fourier inversion
//! `p_1(x) = (1/pi) int_0^inf exp(u^theta c) cos(xu + u^theta s) du` with
//! `c = cos(theta pi/2) < 0` and `s = sin(theta pi/2)`. At `theta = 2` every
//! quantity short-circuits to its Gaussian closed form (`X_1 ~ N(0, 2)`).

use crate::error::{Error, Result};
use crate::quadrature::{integrate, uniform_breaks};
use crate::scalar::{erf, gamma, Real};

pub const GAMMA_DOMAIN: (f64, f64) = (1e-3, 1e3);

#[derive(Clone, Copy, Debug)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    /// The inversion integral is cut where `exp(u^theta c)` drops below this.
    pub envelope: f64,
    pub max_intervals: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { abs_tol: 1e-12, envelope: 1e-16, max_intervals: 50_000 }
    }
}

#[derive(Clone, Debug)]
pub struct StableLaw<T> {
    theta: T,
    quad: QuadratureConfig,
    c: T,
    s: T,
    upper: T,
}

impl<T: Real> StableLaw<T> {
    pub fn new(theta: T) -> Result<Self> {
        Self::with_quadrature(theta, QuadratureConfig::default())
    }

    pub fn with_quadrature(theta: T, quad: QuadratureConfig) -> Result<Self> {
        if !(theta > T::one() && theta <= T::lit(2.0)) {
            return Err(Error::InvalidParameter(format!("stable index theta = {theta} not in (1,2]")));
        }
        if !(quad.abs_tol > 0.0 && quad.envelope > 0.0 && quad.envelope < 1.0) {
            return Err(Error::InvalidParameter("quadrature tolerances must be positive".into()));
        }
        let half = theta * T::FRAC_PI_2();
        let c = half.cos();
        let s = half.sin();
        let upper = (-T::lit(quad.envelope).ln() / c.abs()).powf(T::one() / theta);
        Ok(Self { theta, quad, c, s, upper })
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    pub fn quadrature(&self) -> QuadratureConfig {
        self.quad
    }

    fn is_gaussian(&self) -> bool {
        self.theta == T::lit(2.0)
    }

    fn tol(&self) -> T {
        T::tolerance(self.quad.abs_tol)
    }

    /// Panels of the inversion range short enough to resolve the oscillation
    /// of `cos(xu + u^theta s)`.
    fn panels(&self, x: T) -> Vec<T> {
        let freq = x.abs() + self.theta * self.s.abs() * self.upper.powf(self.theta - T::one());
        let width = T::PI() / (freq + T::one());
        let count = (self.upper / width).ceil().to_usize().unwrap_or(1).clamp(4, 20_000);
        uniform_breaks(T::zero(), self.upper, count)
    }

    fn envelope(&self, u: T) -> T {
        (u.powf(self.theta) * self.c).exp()
    }

    /// `p_1(x)`; exact at `theta = 2`.
    pub fn density_p1(&self, x: T) -> Result<T> {
        if self.is_gaussian() {
            return Ok(gaussian_density(x));
        }
        self.density_p1_quadrature(x)
    }

    /// `p_1(x)` by the inversion integral, also at `theta = 2`.
    pub fn density_p1_quadrature(&self, x: T) -> Result<T> {
        let (th, s) = (self.theta, self.s);
        let r = integrate(
            |u: T| {
                let w = u.powf(th);
                self.envelope(u) * (x * u + w * s).cos()
            },
            &self.panels(x),
            self.tol() * T::PI(),
            self.quad.max_intervals,
        )?;
        Ok((r.value / T::PI()).max(T::zero()))
    }

    /// `p_1(0) = Gamma(1/theta) sin(pi/theta) / (pi theta)`.
    pub fn p1_at_zero(&self) -> T {
        let th = self.theta;
        gamma(T::one() / th) * (T::PI() / th).sin() / (T::PI() * th)
    }

    /// `p_t(x) = t^(-1/theta) p_1(x t^(-1/theta))`.
    pub fn density_pt(&self, t: T, x: T) -> Result<T> {
        if !(t > T::zero()) {
            return Err(Error::InvalidParameter(format!("t = {t} must be positive")));
        }
        let sc = t.powf(-T::one() / self.theta);
        Ok(sc * self.density_p1(x * sc)?)
    }

    /// `P[X_1 <= x]`.
    pub fn cdf(&self, x: T) -> Result<T> {
        if self.is_gaussian() {
            return Ok(T::lit(0.5) * (T::one() + erf(x / T::lit(2.0))));
        }
        self.cdf_quadrature(x)
    }

    /// Gil-Pelaez: `F(x) = 1/2 + (1/pi) int exp(u^theta c) sin(ux + u^theta s) / u du`.
    pub fn cdf_quadrature(&self, x: T) -> Result<T> {
        let (th, s) = (self.theta, self.s);
        let r = integrate(
            |u: T| {
                let w = u.powf(th);
                self.envelope(u) * (x * u + w * s).sin() / u
            },
            &self.panels(x),
            self.tol() * T::PI(),
            self.quad.max_intervals,
        )?;
        Ok(T::lit(0.5) + r.value / T::PI())
    }

    /// `q_s(x) = (x/s) p_s(-x)`, the density at `s` of the first passage of
    /// `-X` above `x`.
    pub fn first_passage_density(&self, s: T, x: T) -> Result<T> {
        if !(s > T::zero() && x > T::zero()) {
            return Err(Error::InvalidParameter(format!("q_s(x) needs s, x > 0, got s = {s}, x = {x}")));
        }
        Ok(x / s * self.density_pt(s, -x)?)
    }

    /// `int_lower^inf q_s(x) ds = theta int_0^V p_1(-v) dv` with
    /// `V = x lower^(-1/theta)`, evaluated as one Fourier integral.
    pub fn passage_integral(&self, lower: T, x: T) -> Result<T> {
        if !(x > T::zero() && lower >= T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "passage integral needs x > 0 and lower >= 0, got x = {x}, lower = {lower}"
            )));
        }
        let th = self.theta;
        let v = if lower == T::zero() { T::infinity() } else { x * lower.powf(-T::one() / th) };
        if self.is_gaussian() {
            return Ok(if v.is_finite() { erf(v / T::lit(2.0)) } else { T::one() });
        }
        let s = self.s;
        let breaks = self.panels(if v.is_finite() { v } else { T::zero() });
        let r = integrate(
            |u: T| {
                let w = u.powf(th);
                let osc = if v.is_finite() { (u * v - w * s).sin() } else { T::zero() };
                self.envelope(u) * ((w * s).sin() + osc) / u
            },
            &breaks,
            self.tol() * T::PI(),
            self.quad.max_intervals,
        )?;
        let base = if v.is_finite() { T::zero() } else { th * T::lit(0.5) };
        Ok(base + th * r.value / T::PI())
    }

    /// `theta int_0^V p_1(-v) dv` by nested quadrature over `v`, an
    /// independent route to [`Self::passage_integral`].
    pub fn passage_integral_direct(&self, lower: T, x: T) -> Result<T> {
        let th = self.theta;
        let v = if lower == T::zero() { T::infinity() } else { x * lower.powf(-T::one() / th) };
        let cut = T::lit(40.0);
        let top = v.min(cut);
        let mut err = None;
        let r = integrate(
            |w: T| match self.density_p1(-w) {
                Ok(p) => p,
                Err(e) => {
                    err = Some(e);
                    T::zero()
                }
            },
            &uniform_breaks(T::zero(), top, 16),
            self.tol() * T::lit(10.0),
            self.quad.max_intervals,
        )?;
        if let Some(e) = err {
            return Err(e);
        }
        Ok(th * r.value)
    }

    /// `Gamma_a(x) = theta q_{1-a}(x) / int_{1-a}^inf q_s(x) ds` on
    /// `x in [1e-3, 1e3]`.
    pub fn gamma_a(&self, a: T, x: T) -> Result<T> {
        if !(a > T::zero() && a < T::one()) {
            return Err(Error::InvalidParameter(format!("a = {a} not in (0,1)")));
        }
        let (lo, hi) = GAMMA_DOMAIN;
        if !(x >= T::lit(lo) && x <= T::lit(hi)) {
            return Err(Error::OutOfDomain { what: "Gamma_a argument", value: x.as_f64(), lo, hi });
        }
        let s = T::one() - a;
        let den = self.passage_integral(s, x)?;
        if !(den > T::zero()) {
            return Err(Error::Unreachable(format!("passage integral vanished at x = {x}")));
        }
        Ok((self.theta * self.first_passage_density(s, x)? / den).max(T::zero()))
    }

    /// `lim_{x -> 0} Gamma_a(x) = 1/(1-a)`.
    pub fn gamma_a_at_zero(&self, a: T) -> T {
        T::one() / (T::one() - a)
    }

    /// `N(ζ > t) = t^(-1/theta) / Gamma(1 - 1/theta)`.
    pub fn zeta_tail(&self, t: T) -> Result<T> {
        if !(t > T::zero()) {
            return Err(Error::InvalidParameter(format!("t = {t} must be positive")));
        }
        let inv = T::one() / self.theta;
        Ok(t.powf(-inv) / gamma(T::one() - inv))
    }
}

/// Density of `N(0, 2)`.
pub fn gaussian_density<T: Real>(x: T) -> T {
    (-x * x / T::lit(4.0)).exp() / (T::lit(2.0) * T::PI().sqrt())
}

fn check_time<T: Real>(t: T) -> Result<T> {
    if !(t > T::zero() && t < T::one()) {
        return Err(Error::InvalidParameter(format!("excursion time t = {t} not in (0,1)")));
    }
    Ok((t * (T::one() - t)).sqrt())
}

/// Density at `y` of `H_t` under `N(. | ζ = 1)` for `theta = 2`:
/// `sqrt(2)` times a Brownian excursion, whose marginal is Maxwell with
/// `sigma^2 = t(1-t)`.
pub fn excursion_marginal_theta2<T: Real>(t: T, y: T) -> Result<T> {
    let sigma = check_time(t)?;
    if !(y > T::zero()) {
        return Ok(T::zero());
    }
    let x = y / T::SQRT_2();
    let f = (T::lit(2.0) / T::PI()).sqrt() * x * x / sigma.powi(3) * (-x * x / (T::lit(2.0) * sigma * sigma)).exp();
    Ok(f / T::SQRT_2())
}

/// Distribution function of [`excursion_marginal_theta2`].
pub fn excursion_marginal_cdf_theta2<T: Real>(t: T, y: T) -> Result<T> {
    let sigma = check_time(t)?;
    if !(y > T::zero()) {
        return Ok(T::zero());
    }
    let z = y / T::SQRT_2() / sigma;
    Ok(erf(z / T::SQRT_2()) - (T::lit(2.0) / T::PI()).sqrt() * z * (-z * z / T::lit(2.0)).exp())
}

/// `E[sup_t H_t] = sqrt(pi)` for `theta = 2`.
pub fn excursion_max_mean_theta2<T: Real>() -> T {
    T::PI().sqrt()
}
