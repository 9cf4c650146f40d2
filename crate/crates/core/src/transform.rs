//! The Weinstein transform on a self-dual grid.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{reflect, BaseGrid, Field};
use crate::linalg::{apply_axis, CMatrix, Matrix};
use crate::par;
use crate::specfun::{normalized_bessel, weinstein_kernel};

/// Quadrature realization of `F_W f(lambda) = int f(x) Lambda(x, lambda) dmu_alpha(x)` with
/// frequencies sampled on the same nodes as space.
///
/// The kernel factorizes over axes, so the plan stores one `n x n` exponential factor shared by
/// the cartesian axes and one `m x m` Bessel factor; [`TransformPlan::matrix`] materializes the
/// full `N x N` matrix when it is needed.
#[derive(Debug, Clone)]
pub struct TransformPlan {
    grid: Arc<BaseGrid>,
    cart: CMatrix,
    radial: CMatrix,
}

impl TransformPlan {
    pub fn new(grid: &Arc<BaseGrid>) -> Self {
        let xs = grid.cart_nodes();
        let rs = grid.radial_nodes();
        let alpha = grid.alpha();
        let cart = Matrix::from_fn(xs.len(), xs.len(), |i, j| {
            Complex64::from_polar(1.0, -xs[i] * xs[j])
        });
        let radial = Matrix::from_fn(rs.len(), rs.len(), |i, j| {
            Complex64::new(normalized_bessel(alpha, rs[i] * rs[j]), 0.0)
        });
        TransformPlan {
            grid: grid.clone(),
            cart,
            radial,
        }
    }

    pub fn grid(&self) -> &Arc<BaseGrid> {
        &self.grid
    }

    fn shape(&self) -> Vec<usize> {
        let mut s = vec![self.grid.n(); self.grid.d()];
        s.push(self.grid.m());
        s
    }

    /// `sum_x Lambda(x, lambda) v(x)` for every node `lambda`, without quadrature weights.
    pub(crate) fn apply_kernel(&self, v: &[Complex64]) -> Vec<Complex64> {
        let shape = self.shape();
        let d = self.grid.d();
        let mut out = apply_axis(v, &shape, d, &self.radial);
        for axis in 0..d {
            out = apply_axis(&out, &shape, axis, &self.cart);
        }
        out
    }

    pub fn forward(&self, f: &Field) -> Result<Field> {
        self.grid.check_same(f.grid())?;
        let w = self.grid.weights();
        let wf: Vec<Complex64> = f.values().iter().zip(w).map(|(v, w)| v * w).collect();
        Field::from_values(&self.grid, self.apply_kernel(&wf))
    }

    /// `F_W^{-1} g(x) = F_W g(-x)`.
    pub fn inverse(&self, g: &Field) -> Result<Field> {
        Ok(reflect(&self.forward(g)?))
    }

    /// `F_W f(a lambda)` at every frequency node.
    pub fn forward_dilated(&self, f: &Field, a: f64) -> Result<Field> {
        self.grid.check_same(f.grid())?;
        let xs = self.grid.cart_nodes();
        let rs = self.grid.radial_nodes();
        let alpha = self.grid.alpha();
        let cart = Matrix::from_fn(xs.len(), xs.len(), |i, j| {
            Complex64::from_polar(1.0, -a * xs[i] * xs[j])
        });
        let radial = Matrix::from_fn(rs.len(), rs.len(), |i, j| {
            Complex64::new(normalized_bessel(alpha, a * rs[i] * rs[j]), 0.0)
        });
        let shape = self.shape();
        let d = self.grid.d();
        let w = self.grid.weights();
        let wf: Vec<Complex64> = f.values().iter().zip(w).map(|(v, w)| v * w).collect();
        let mut out = apply_axis(&wf, &shape, d, &radial);
        for axis in 0..d {
            out = apply_axis(&out, &shape, axis, &cart);
        }
        Field::from_values(&self.grid, out)
    }

    /// Transform evaluated at an arbitrary frequency by direct quadrature.
    pub fn eval_at(&self, f: &Field, lambda: &[f64]) -> Result<Complex64> {
        self.grid.check_same(f.grid())?;
        if lambda.len() != self.grid.d() + 1 {
            return Err(Error::InvalidParameter(format!(
                "frequency has {} coordinates, expected {}",
                lambda.len(),
                self.grid.d() + 1
            )));
        }
        let g = &self.grid;
        let w = g.weights();
        let alpha = g.alpha();
        Ok(par::csum_by(g.n_nodes(), |k| {
            let x = g.node(k);
            f.values()[k] * w[k] * weinstein_kernel(alpha, lambda, &x)
        }))
    }

    /// Dense matrix with entries `Lambda(x_k, lambda_j) w_k`, rows indexed by frequency.
    pub fn matrix(&self) -> CMatrix {
        let w = self.grid.weights();
        let e = self.kernel_matrix();
        Matrix::from_fn(e.rows(), e.cols(), |j, k| e.get(j, k) * w[k])
    }

    /// Dense matrix with entries `Lambda(x_k, lambda_j)`.
    pub fn kernel_matrix(&self) -> CMatrix {
        let g = &self.grid;
        let d = g.d();
        let n = g.n();
        Matrix::from_fn(g.n_nodes(), g.n_nodes(), |j, k| {
            let (cj, rj) = g.split(j);
            let (ck, rk) = g.split(k);
            let mut v = self.radial.get(rj, rk);
            let (mut a, mut b) = (cj, ck);
            for _ in 0..d {
                v *= self.cart.get(a % n, b % n);
                a /= n;
                b /= n;
            }
            v
        })
    }

    /// `(||F_W f||_2, ||f||_2)`.
    pub fn check_plancherel(&self, f: &Field) -> Result<(f64, f64)> {
        Ok((self.forward(f)?.lp_norm(2.0)?, f.lp_norm(2.0)?))
    }

    /// `(<F_W f, F_W g>, <f, g>)`.
    pub fn check_parseval(&self, f: &Field, g: &Field) -> Result<(Complex64, Complex64)> {
        let lhs = self.forward(f)?.inner(&self.forward(g)?)?;
        Ok((lhs, f.inner(g)?))
    }

    /// `(||F_W f||_q, ||f||_p)` with `q` the conjugate exponent of `p` in `[1, 2]`.
    pub fn check_hausdorff_young(&self, f: &Field, p: f64) -> Result<(f64, f64)> {
        if !(1.0..=2.0).contains(&p) {
            return Err(Error::InvalidParameter(format!(
                "Hausdorff-Young exponent must lie in [1, 2], got {p}"
            )));
        }
        let q = conjugate_exponent(p);
        Ok((self.forward(f)?.lp_norm(q)?, f.lp_norm(p)?))
    }
}

/// `p / (p - 1)`, with `1 -> inf` and `inf -> 1`.
pub fn conjugate_exponent(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(g: &Arc<BaseGrid>) -> Field {
        Field::from_real_fn(g, |x| (-0.5 * x.iter().map(|v| v * v).sum::<f64>()).exp())
    }

    #[test]
    fn gaussian_is_fixed() {
        for &alpha in &[0.0, 0.5, 1.5] {
            let g = BaseGrid::new(alpha, 1, 12.0, 65, 12.0, 64).unwrap();
            let plan = TransformPlan::new(&g);
            let h = gaussian(&g);
            let fh = plan.forward(&h).unwrap();
            assert!(fh.rel_l2_error(&h).unwrap() < 1e-4, "alpha={alpha}");
            let back = plan.inverse(&fh).unwrap();
            assert!(back.rel_l2_error(&h).unwrap() < 1e-3);
        }
    }

    #[test]
    fn matrix_agrees_with_separable_application_in_two_dimensions() {
        let g = BaseGrid::new(0.3, 2, 3.0, 5, 3.0, 4).unwrap();
        let plan = TransformPlan::new(&g);
        let f = Field::from_fn(&g, |x| Complex64::new(x[0] + 0.3 * x[1] * x[2], (x[1] - x[2]).sin()));
        let a = plan.forward(&f).unwrap();
        let mat = plan.matrix();
        let b = crate::linalg::matvec(&mat, f.values());
        for (u, v) in a.values().iter().zip(&b) {
            assert!((u - v).norm() < 1e-12);
        }
        let lambda = g.node(17);
        let direct = plan.eval_at(&f, &lambda).unwrap();
        assert!((direct - a.values()[17]).norm() < 1e-12);
    }

    #[test]
    fn dilated_transform_matches_pointwise_evaluation() {
        let g = BaseGrid::new(1.0, 1, 6.0, 25, 6.0, 20).unwrap();
        let plan = TransformPlan::new(&g);
        let f = gaussian(&g);
        let fa = plan.forward_dilated(&f, 0.7).unwrap();
        for k in [0usize, 33, 250, 499] {
            let l: Vec<f64> = g.node(k).iter().map(|v| 0.7 * v).collect();
            assert!((plan.eval_at(&f, &l).unwrap() - fa.values()[k]).norm() < 1e-12);
        }
    }

    #[test]
    fn zero_frequency_row_sums_weights() {
        let g = BaseGrid::new(0.5, 1, 4.0, 9, 4.0, 6).unwrap();
        let plan = TransformPlan::new(&g);
        let one = Field::from_real_fn(&g, |_| 1.0);
        let total: f64 = g.weights().iter().sum();
        let v = plan.eval_at(&one, &[0.0, 0.0]).unwrap();
        assert!((v.re - total).abs() < 1e-13 * total && v.im.abs() < 1e-13);
    }

    #[test]
    fn exponents() {
        assert_eq!(conjugate_exponent(2.0), 2.0);
        assert_eq!(conjugate_exponent(1.0), f64::INFINITY);
        assert_eq!(conjugate_exponent(f64::INFINITY), 1.0);
        assert!((conjugate_exponent(1.5) - 3.0).abs() < 1e-15);
        let g = BaseGrid::new(0.5, 1, 4.0, 9, 4.0, 6).unwrap();
        let plan = TransformPlan::new(&g);
        assert!(plan.check_hausdorff_young(&gaussian(&g), 2.5).is_err());
    }
}
