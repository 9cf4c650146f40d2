//! Special functions and normalization constants.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Index of the Bessel operator, restricted to `alpha > -1/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Alpha(f64);

impl Alpha {
    pub fn new(value: f64) -> Result<Self> {
        if !(value.is_finite() && value > -0.5) {
            return Err(Error::InvalidParameter(format!(
                "alpha must satisfy alpha > -1/2, got {value}"
            )));
        }
        Ok(Alpha(value))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Number of non-radial axes, at least one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dimension(usize);

impl Dimension {
    pub fn new(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParameter("d must be at least 1".into()));
        }
        Ok(Dimension(d))
    }

    pub fn get(self) -> usize {
        self.0
    }
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function for real arguments (Lanczos, g = 7, nine terms).
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
}

/// Natural log of |Gamma(x)| for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        return (PI / (PI * x).sin()).abs().ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

const SERIES_CUTOFF: f64 = 2.0;

/// Normalized Bessel function `j_alpha(t) = Gamma(alpha+1) (2/t)^alpha J_alpha(t)`, with `j_alpha(0) = 1`.
pub fn normalized_bessel(alpha: f64, t: f64) -> f64 {
    let t = t.abs();
    if t <= SERIES_CUTOFF {
        bessel_series(alpha, t)
    } else {
        bessel_miller(alpha, t)
    }
}

fn bessel_series(alpha: f64, t: f64) -> f64 {
    let q = -0.25 * t * t;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= q / (k * (alpha + k));
        sum += term;
        if term.abs() <= 1e-18 * sum.abs().max(1e-300) && k > 0.5 * t {
            break;
        }
        if k > 400.0 {
            break;
        }
    }
    sum
}

// Backward recurrence on J_{alpha+j}(t), normalized with
// (t/2)^alpha = sum_k (alpha+2k) Gamma(alpha+k)/k! J_{alpha+2k}(t).
fn bessel_miller(alpha: f64, t: f64) -> f64 {
    let start = (t + 16.0 * t.cbrt() + 40.0).ceil() as usize;
    let start = start + start % 2;
    let mut upper = 0.0_f64;
    let mut cur = 1e-30_f64;
    // norm accumulates sum_k c'_k y_{2k} where c'_0 = 1, c'_k = (alpha+2k)(alpha+1)_{k-1}/k!
    let mut weights = vec![0.0; start / 2 + 1];
    weights[0] = 1.0;
    let mut r = 1.0;
    for k in 1..weights.len() {
        if k > 1 {
            r *= (alpha + (k - 1) as f64) / k as f64;
        }
        weights[k] = (alpha + 2.0 * k as f64) * r;
    }
    let mut norm = 0.0;
    let mut j = start;
    loop {
        if j % 2 == 0 {
            norm += weights[j / 2] * cur;
        }
        if j == 0 {
            break;
        }
        let nu = alpha + j as f64;
        let lower = 2.0 * nu / t * cur - upper;
        upper = cur;
        cur = lower;
        j -= 1;
        if cur.abs() > 1e200 {
            cur *= 1e-200;
            upper *= 1e-200;
            norm *= 1e-200;
        }
    }
    cur / norm
}

/// The kernel `Lambda(lambda, x) = exp(-i <x', lambda'>) j_alpha(x_{d+1} lambda_{d+1})`.
/// Both slices hold `d + 1` coordinates, the last one radial.
pub fn weinstein_kernel(alpha: f64, lambda: &[f64], x: &[f64]) -> Complex64 {
    debug_assert_eq!(lambda.len(), x.len());
    let d = x.len() - 1;
    let phase: f64 = (0..d).map(|i| x[i] * lambda[i]).sum();
    let radial = normalized_bessel(alpha, x[d] * lambda[d]);
    Complex64::from_polar(radial, -phase)
}

/// Normalizing constant of the measure `c x_{d+1}^{2 alpha + 1} dx` that makes the
/// transform unitary: `1 / ((2 pi)^{d/2} 2^alpha Gamma(alpha + 1))`.
pub fn measure_constant(alpha: f64, d: usize) -> f64 {
    1.0 / ((2.0 * PI).powf(0.5 * d as f64) * 2f64.powf(alpha) * gamma(alpha + 1.0))
}

/// The square of [`measure_constant`], `1 / ((2 pi)^d 2^{2 alpha} Gamma(alpha + 1)^2)`.
/// Kept for comparison only; with it the transform is not an isometry.
pub fn printed_measure_constant(alpha: f64, d: usize) -> f64 {
    measure_constant(alpha, d).powi(2)
}

/// Constant of the radial integration formula, `1 / (2^{alpha + d/2} Gamma(alpha + d/2 + 1))`.
pub fn radial_constant(alpha: f64, d: usize) -> f64 {
    let e = alpha + 0.5 * d as f64;
    1.0 / (2f64.powf(e) * gamma(e + 1.0))
}

/// `C_alpha = Gamma(alpha + 1) / (sqrt(pi) Gamma(alpha + 1/2))`, so that
/// `C_alpha * int_0^pi sin^{2 alpha} = 1`.
pub fn translation_constant(alpha: f64) -> f64 {
    (ln_gamma(alpha + 1.0) - ln_gamma(alpha + 0.5)).exp() / PI.sqrt()
}

/// Homogeneous dimension `2 alpha + d + 2` governing dilations.
pub fn homogeneous_dim(alpha: f64, d: usize) -> f64 {
    2.0 * alpha + d as f64 + 2.0
}

/// Gauss-Legendre nodes and weights on [-1, 1], nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_known_values() {
        assert!((gamma(1.0) - 1.0).abs() < 1e-14);
        assert!((gamma(0.5) - PI.sqrt()).abs() < 1e-14);
        assert!((gamma(1.5) - 0.5 * PI.sqrt()).abs() < 1e-14);
        assert!((gamma(6.0) - 120.0).abs() < 120.0 * 1e-14);
        assert!((gamma(0.25) - 3.625_609_908_221_908).abs() < 3.7e-14);
        assert!((ln_gamma(30.0) - 71.257_038_967_168_01).abs() < 1e-12);
    }

    #[test]
    fn half_integer_closed_forms() {
        for &t in &[0.1, 1.0, PI, 7.3, 11.9, 12.1, 40.0, 333.3, 999.0] {
            let j = normalized_bessel(0.5, t);
            assert!((j - t.sin() / t).abs() < 1e-13, "t={t} j={j}");
            let j = normalized_bessel(1.5, t);
            let exact = 3.0 * (t.sin() - t * t.cos()) / (t * t * t);
            assert!((j - exact).abs() < 1e-13, "t={t}");
        }
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(10);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(18)).sum();
        assert!((s - 2.0 / 19.0).abs() < 1e-14);
        assert!(x.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn constants() {
        assert!((measure_constant(0.5, 1) - 1.0 / PI).abs() < 1e-15);
        assert!((measure_constant(0.0, 1) - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-15);
        assert!((printed_measure_constant(0.5, 1) - 1.0 / (PI * PI)).abs() < 1e-15);
        assert!((printed_measure_constant(0.0, 1) - 1.0 / (2.0 * PI)).abs() < 1e-15);
        assert!((radial_constant(0.0, 2) - 0.5).abs() < 1e-15);
        assert!((radial_constant(0.5, 1) - 0.5).abs() < 1e-15);
        assert!((translation_constant(0.5) - 0.5).abs() < 1e-15);
        assert!((translation_constant(0.0) - 1.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn alpha_validation() {
        assert!(Alpha::new(-0.7).is_err());
        assert!(Alpha::new(-0.5).is_err());
        assert!(Alpha::new(-0.49).is_ok());
        assert!(Dimension::new(0).is_err());
    }
}
