//! Adaptive Gauss-Kronrod (7/15) quadrature.

use crate::error::{Error, Result};
use crate::scalar::Real;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Gauss weights for the nodes `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Clone, Copy, Debug)]
pub struct QuadResult<T> {
    pub value: T,
    pub error: T,
    pub intervals: usize,
}

/// Kronrod estimate and `|K15 - G7|` on `[a, b]`.
pub fn gauss_kronrod<T: Real>(f: &mut impl FnMut(T) -> T, a: T, b: T) -> (T, T) {
    let half = (b - a) * T::lit(0.5);
    let mid = (a + b) * T::lit(0.5);
    let fc = f(mid);
    let mut k = fc * T::lit(WGK[7]);
    let mut g = fc * T::lit(WG[3]);
    for i in 0..7 {
        let dx = half * T::lit(XGK[i]);
        let s = f(mid - dx) + f(mid + dx);
        k += s * T::lit(WGK[i]);
        if i % 2 == 1 {
            g += s * T::lit(WG[i / 2]);
        }
    }
    ((k * half), ((k - g) * half).abs())
}

/// Integrates over consecutive panels `breakpoints[i]..breakpoints[i+1]`,
/// bisecting the panel with the largest error until the summed error
/// estimate is at most `abs_tol`.
pub fn integrate<T: Real>(
    mut f: impl FnMut(T) -> T,
    breakpoints: &[T],
    abs_tol: T,
    max_intervals: usize,
) -> Result<QuadResult<T>> {
    let mut parts: Vec<(T, T, T, T)> = breakpoints
        .windows(2)
        .filter(|w| w[1] != w[0])
        .map(|w| {
            let (v, e) = gauss_kronrod(&mut f, w[0], w[1]);
            (w[0], w[1], v, e)
        })
        .collect();
    loop {
        let total_err: T = parts.iter().map(|p| p.3).sum();
        if total_err <= abs_tol {
            break;
        }
        let (idx, worst) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.partial_cmp(&y.1 .3).unwrap_or(std::cmp::Ordering::Equal))
            .map(|(i, p)| (i, *p))
            .expect("at least one panel");
        let (a, b, _, _) = worst;
        let mid = (a + b) * T::lit(0.5);
        if parts.len() >= max_intervals || mid <= a || mid >= b {
            return Err(Error::Quadrature { estimate: total_err.as_f64(), tolerance: abs_tol.as_f64() });
        }
        let (v1, e1) = gauss_kronrod(&mut f, a, mid);
        let (v2, e2) = gauss_kronrod(&mut f, mid, b);
        parts[idx] = (a, mid, v1, e1);
        parts.push((mid, b, v2, e2));
    }
    let value = parts.iter().map(|p| p.2).sum();
    let error = parts.iter().map(|p| p.3).sum();
    Ok(QuadResult { value, error, intervals: parts.len() })
}

/// `n + 1` equally spaced breakpoints on `[a, b]`.
pub fn uniform_breaks<T: Real>(a: T, b: T, n: usize) -> Vec<T> {
    let n = n.max(1);
    (0..=n)
        .map(|i| a + (b - a) * T::from_count(i) / T::from_count(n))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let (v, e) = gauss_kronrod(&mut |x: f64| x.powi(10), 0.0, 1.0);
        assert!((v - 1.0 / 11.0).abs() < 1e-15);
        assert!(e < 1e-10);
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let r = integrate(|x: f64| x.powf(0.3) / x.max(1e-300).sqrt(), &[0.0, 1.0], 1e-10, 2000).unwrap();
        assert!((r.value - 1.0 / 0.8).abs() < 1e-8);
    }

    #[test]
    fn oscillatory_integral() {
        let r = integrate(|x: f64| (20.0 * x).cos(), &uniform_breaks(0.0, 3.0, 20), 1e-12, 1000).unwrap();
        assert!((r.value - (60.0f64).sin() / 20.0).abs() < 1e-12);
    }

    #[test]
    fn reports_non_convergence() {
        let r = integrate(|x: f64| 1.0 / x, &[0.0, 1.0], 1e-12, 10);
        assert!(matches!(r, Err(Error::Quadrature { .. })));
    }
}
