//! Seeded random Gaussian-class test functions.

use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;

use crate::grid::{BaseGrid, Field};

/// One term `amp (1 + b x_r^2) exp(i <k, x'>) exp(-|x' - c|^2 / (2 s^2) - x_r^2 / (2 t^2))`.
/// Even and smooth in the radial variable, so its transform decays like a Gaussian.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianTerm {
    pub amp: Complex64,
    pub centre: Vec<f64>,
    pub freq: Vec<f64>,
    pub width: f64,
    pub radial_width: f64,
    pub radial_poly: f64,
}

impl GaussianTerm {
    pub fn eval(&self, x: &[f64]) -> Complex64 {
        let d = self.centre.len();
        let r2: f64 = (0..d).map(|i| (x[i] - self.centre[i]).powi(2)).sum();
        let xr2 = x[d] * x[d];
        let phase: f64 = (0..d).map(|i| self.freq[i] * x[i]).sum();
        let env = (-r2 / (2.0 * self.width * self.width) - xr2 / (2.0 * self.radial_width * self.radial_width)).exp();
        self.amp * Complex64::from_polar(env * (1.0 + self.radial_poly * xr2), phase)
    }
}

/// Terms with centres in the middle half of the box, widths in `[1, 1.5]` and modulations up to
/// 0.5. The spectra then stay below `2 pi / h - L` at default resolution, where the trapezoid
/// rule would otherwise fold energy back into the frequency box.
pub fn random_terms<R: Rng>(grid: &BaseGrid, rng: &mut R, terms: usize) -> Vec<GaussianTerm> {
    let d = grid.d();
    let l = 0.25 * grid.cart_extent().min(grid.radial_extent());
    (0..terms)
        .map(|_| GaussianTerm {
            amp: Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            centre: (0..d).map(|_| rng.gen_range(-l..l)).collect(),
            freq: (0..d).map(|_| rng.gen_range(-0.5..0.5)).collect(),
            width: rng.gen_range(1.0..1.5),
            radial_width: rng.gen_range(1.0..1.5),
            radial_poly: rng.gen_range(0.0..0.5),
        })
        .collect()
}

pub fn mixture(grid: &Arc<BaseGrid>, terms: &[GaussianTerm]) -> Field {
    Field::from_fn(grid, |x| terms.iter().map(|t| t.eval(x)).sum())
}

/// A random mixture of three terms.
pub fn random_mixture<R: Rng>(grid: &Arc<BaseGrid>, rng: &mut R) -> Field {
    mixture(grid, &random_terms(grid, rng, 3))
}

/// `exp(-|x|^2 / (2 s^2))`, the centred Gaussian.
pub fn centred_gaussian(grid: &Arc<BaseGrid>, s: f64) -> Field {
    Field::from_real_fn(grid, |x| (-x.iter().map(|v| v * v).sum::<f64>() / (2.0 * s * s)).exp())
}
