//! Generalized translation and Weinstein convolution.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{BaseGrid, Field};
use crate::interp::{cart_stencil_nd, RadialInterpolant};
use crate::linalg::{matmul_complex, Matrix};
use crate::par;
use crate::specfun::gauss_legendre;
use crate::transform::TransformPlan;

/// Quadrature for `C_alpha int_0^pi g(theta) sin^{2 alpha}(theta) d theta`, weights summing to one.
#[derive(Debug, Clone)]
pub struct ThetaRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl ThetaRule {
    pub const DEFAULT_POINTS: usize = 64;

    pub fn new(alpha: f64, points: usize) -> Result<Self> {
        if points == 0 {
            return Err(Error::InvalidParameter("theta rule needs at least one point".into()));
        }
        let (t, w) = gauss_legendre(points);
        let nodes: Vec<f64> = t.iter().map(|t| 0.5 * PI * (t + 1.0)).collect();
        let mut weights: Vec<f64> = nodes
            .iter()
            .zip(&w)
            .map(|(th, w)| w * th.sin().powf(2.0 * alpha))
            .collect();
        let total: f64 = weights.iter().sum();
        for v in &mut weights {
            *v /= total;
        }
        Ok(ThetaRule { nodes, weights })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Translation and convolution on one grid.
///
/// Holds the radial averaging tensor `T[x_r][y_r][j] = sum_theta w_theta l_j(rho)` with
/// `rho = sqrt(x_r^2 + y_r^2 + 2 x_r y_r cos theta)` and `l_j` the radial Lagrange basis.
#[derive(Debug, Clone)]
pub struct Translator {
    grid: Arc<BaseGrid>,
    rule: ThetaRule,
    radial: RadialInterpolant,
    tensor: Vec<f64>,
}

impl Translator {
    pub fn new(grid: &Arc<BaseGrid>, rule: ThetaRule) -> Self {
        let radial = RadialInterpolant::new(grid);
        let m = grid.m();
        let rs = grid.radial_nodes();
        let mut tensor = vec![0.0; m * m * m];
        par::for_each_chunk(&mut tensor, m * m, |i, block| {
            let mut basis = vec![0.0; m];
            for (k, row) in block.chunks_mut(m).enumerate() {
                average_basis(&radial, &rule, rs[i], rs[k], &mut basis, row);
            }
        });
        Translator {
            grid: grid.clone(),
            rule,
            radial,
            tensor,
        }
    }

    pub fn with_default_rule(grid: &Arc<BaseGrid>) -> Self {
        let rule = ThetaRule::new(grid.alpha(), ThetaRule::DEFAULT_POINTS)
            .expect("default rule has points");
        Self::new(grid, rule)
    }

    pub fn grid(&self) -> &Arc<BaseGrid> {
        &self.grid
    }
    pub fn rule(&self) -> &ThetaRule {
        &self.rule
    }
    pub fn radial_interpolant(&self) -> &RadialInterpolant {
        &self.radial
    }

    /// `tau_x f` sampled on the grid of `f`, for any point `x` of the half-space.
    pub fn translate(&self, x: &[f64], f: &Field) -> Result<Field> {
        self.grid.check_same(f.grid())?;
        let g = &self.grid;
        let d = g.d();
        if x.len() != d + 1 {
            return Err(Error::InvalidParameter(format!(
                "translation point has {} coordinates, expected {}",
                x.len(),
                d + 1
            )));
        }
        if x.iter().all(|&v| v == 0.0) {
            return Ok(f.clone());
        }
        let m = g.m();
        let rs = g.radial_nodes();
        let xr = x[d].abs();
        // averaged radial basis for every target radius
        let mut avg = vec![0.0; m * m];
        par::for_each_chunk(&mut avg, m, |k, row| {
            let mut basis = vec![0.0; m];
            average_basis(&self.radial, &self.rule, xr, rs[k], &mut basis, row);
        });
        let vals = f.values();
        let out = par::map_collect(g.n_cart(), |c| {
            let y = g.node(c * m);
            let shifted: Vec<f64> = (0..d).map(|i| x[i] + y[i]).collect();
            let stencil = cart_stencil_nd(g, &shifted);
            let mut col = vec![Complex64::new(0.0, 0.0); m];
            for (src, w) in stencil {
                let row = &vals[src * m..(src + 1) * m];
                for (k, out) in col.iter_mut().enumerate() {
                    let a = &avg[k * m..(k + 1) * m];
                    let mut s = Complex64::new(0.0, 0.0);
                    for (b, v) in a.iter().zip(row) {
                        s += v * *b;
                    }
                    *out += s * w;
                }
            }
            col
        });
        Field::from_values(g, out.into_iter().flatten().collect())
    }

    /// `(f * g)(x) = int tau_x f(-y) g(y) dmu_alpha(y)`.
    pub fn convolve(&self, f: &Field, h: &Field) -> Result<Field> {
        self.grid.check_same(f.grid())?;
        self.grid.check_same(h.grid())?;
        let g = &self.grid;
        let d = g.d();
        let m = g.m();
        let nc = g.n_cart();
        // pre[c][x_r][y_r] = sum_j T[x_r][y_r][j] f(c, j)
        let t = Matrix::from_vec(
            m * m,
            m,
            self.tensor.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        );
        let fm = Matrix::from_vec(nc, m, f.values().to_vec());
        let pre = matmul_complex(&fm, false, &t, true);
        let w = g.weights();
        let wh: Vec<Complex64> = h.values().iter().zip(w).map(|(v, w)| v * w).collect();
        let out = par::map_collect(nc, |cx| {
            let x = g.node(cx * m);
            let mut col = vec![Complex64::new(0.0, 0.0); m];
            for cy in 0..nc {
                let y = g.node(cy * m);
                let diff: Vec<f64> = (0..d).map(|i| x[i] - y[i]).collect();
                let gy = &wh[cy * m..(cy + 1) * m];
                for (src, sw) in cart_stencil_nd(g, &diff) {
                    let block = &pre.data()[src * m * m..(src + 1) * m * m];
                    for (xr, out) in col.iter_mut().enumerate() {
                        let row = &block[xr * m..(xr + 1) * m];
                        let mut s = Complex64::new(0.0, 0.0);
                        for (a, b) in row.iter().zip(gy) {
                            s += a * b;
                        }
                        *out += s * sw;
                    }
                }
            }
            col
        });
        Field::from_values(g, out.into_iter().flatten().collect())
    }
}

fn average_basis(
    radial: &RadialInterpolant,
    rule: &ThetaRule,
    xr: f64,
    yr: f64,
    scratch: &mut [f64],
    out: &mut [f64],
) {
    out.fill(0.0);
    for (th, w) in rule.nodes().iter().zip(rule.weights()) {
        let rho = (xr * xr + yr * yr + 2.0 * xr * yr * th.cos()).max(0.0).sqrt();
        radial.basis_into(rho, scratch);
        for (o, b) in out.iter_mut().zip(scratch.iter()) {
            *o += w * b;
        }
    }
}

/// `F_W^{-1}(F_W f . F_W g)`.
pub fn convolve_spectral(plan: &TransformPlan, f: &Field, g: &Field) -> Result<Field> {
    let prod = plan.forward(f)?.mul(&plan.forward(g)?)?;
    plan.inverse(&prod)
}

/// `(F_W(tau_x f), Lambda(-x, .) F_W f)`; the second factor is the one consistent with the
/// translation acting on `x' + y'`.
pub fn check_translate_fourier(
    plan: &TransformPlan,
    translator: &Translator,
    x: &[f64],
    f: &Field,
) -> Result<(Field, Field)> {
    let lhs = plan.forward(&translator.translate(x, f)?)?;
    let rhs = kernel_times_transform(plan, x, f, true)?;
    Ok((lhs, rhs))
}

/// `Lambda(x, .) F_W f`, or `Lambda(-x, .) F_W f` when `reflected`.
pub fn kernel_times_transform(
    plan: &TransformPlan,
    x: &[f64],
    f: &Field,
    reflected: bool,
) -> Result<Field> {
    let g = plan.grid();
    let d = g.d();
    let alpha = g.alpha();
    let mut point = x.to_vec();
    if reflected {
        for v in &mut point[..d] {
            *v = -*v;
        }
    }
    let lambda = Field::from_fn(g, |l| crate::specfun::weinstein_kernel(alpha, &point, l));
    plan.forward(f)?.mul(&lambda)
}
