//! Windows, admissibility constants and the continuous wavelet transform.
//!
//! The family `phi_{a,x} = a^{D/2} tau_x phi_a` (with `D = 2 alpha + d + 2`) is applied per scale
//! through one of two routes. When `a` is large compared with the grid spacing the members are
//! sampled exactly: for Laguerre-Gaussian windows `tau_x phi_a(y)` separates into cartesian tables
//! in `x' + y'` and theta-averaged radial tables. Below that the members are not resolved by the
//! grid and are applied on the frequency side through `F_W phi_{a,x} = a^{D/2} Lambda(-x, .) F_W phi(a .)`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{reflect, BaseGrid, Field, ScaleField, ScaleGrid};
use crate::interp::{interpolate, RadialInterpolant};
use crate::linalg::{apply_axis, CMatrix, Matrix};
use crate::par;
use crate::specfun::{gamma, gauss_legendre, ln_gamma, radial_constant};
use crate::transform::TransformPlan;
use crate::translation::{ThetaRule, Translator};

/// Scales below `DEFAULT_SWITCH_FACTOR * grid.resolution()` use the frequency-side route.
pub const DEFAULT_SWITCH_FACTOR: f64 = 4.0 / 3.0;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone)]
pub enum Window {
    /// `F_W phi(xi) = |xi|^{2k} e^{-|xi|^2 / 2}`, in space `P_k(|x|^2) e^{-|x|^2 / 2}` where
    /// `P_k(t) = 2^k k! L_k^{(D/2 - 1)}(t / 2)`.
    LaguerreGaussian { k: usize },
    /// A window given by samples on a grid.
    Sampled {
        field: Field,
        radial: RadialInterpolant,
    },
}

impl Window {
    pub fn laguerre_gaussian(k: usize) -> Self {
        Window::LaguerreGaussian { k }
    }

    pub fn sampled(field: Field) -> Self {
        let radial = RadialInterpolant::new(field.grid());
        Window::Sampled { field, radial }
    }

    pub fn name(&self) -> String {
        match self {
            Window::LaguerreGaussian { k } => format!("laguerre_gaussian_{k}"),
            Window::Sampled { .. } => "sampled".into(),
        }
    }

    /// Real-valued and even in `x'`.
    pub fn is_real_even(&self) -> bool {
        match self {
            Window::LaguerreGaussian { .. } => true,
            Window::Sampled { field, .. } => {
                let r = reflect(field);
                let scale = field.lp_norm(f64::INFINITY).unwrap_or(0.0).max(f64::MIN_POSITIVE);
                field.values().iter().all(|v| v.im.abs() <= 1e-14 * scale)
                    && field.max_abs_diff(&r).map(|e| e <= 1e-14 * scale).unwrap_or(false)
            }
        }
    }

    /// `phi(x)`; sampled windows are interpolated.
    pub fn spatial(&self, grid: &BaseGrid, x: &[f64]) -> Complex64 {
        match self {
            Window::LaguerreGaussian { k } => {
                let t: f64 = x.iter().map(|v| v * v).sum();
                let c = laguerre_coefficients(*k, grid.homogeneous_dim());
                Complex64::new(poly(&c, t) * (-0.5 * t).exp(), 0.0)
            }
            Window::Sampled { field, radial } => interpolate(field, radial, x),
        }
    }

    /// Samples of `phi` on `grid`.
    pub fn samples(&self, grid: &Arc<BaseGrid>) -> Field {
        match self {
            Window::Sampled { field, .. } if field.grid().same_as(grid) => field.clone(),
            _ => Field::from_fn(grid, |x| self.spatial(grid, x)),
        }
    }

    /// Samples of `phi_a(x) = a^{-D} phi(x / a)`.
    pub fn dilated_samples(&self, grid: &Arc<BaseGrid>, a: f64) -> Field {
        let dim = grid.homogeneous_dim();
        let s = a.powf(-dim);
        Field::from_fn(grid, |x| {
            let y: Vec<f64> = x.iter().map(|v| v / a).collect();
            self.spatial(grid, &y) * s
        })
    }

    /// `F_W phi(xi)` at an arbitrary frequency.
    pub fn profile(&self, plan: &TransformPlan, xi: &[f64]) -> Result<Complex64> {
        match self {
            Window::LaguerreGaussian { k } => {
                let t: f64 = xi.iter().map(|v| v * v).sum();
                Ok(Complex64::new(t.powi(*k as i32) * (-0.5 * t).exp(), 0.0))
            }
            Window::Sampled { field, .. } => plan.eval_at(field, xi),
        }
    }

    /// `||phi||_{alpha,p}`. Laguerre-Gaussian windows are integrated on the whole half-space by
    /// one-dimensional radial quadrature; sampled windows use the grid quadrature.
    pub fn norm(&self, grid: &BaseGrid, p: f64) -> Result<f64> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidParameter(format!("norm exponent must be >= 1, got {p}")));
        }
        match self {
            Window::LaguerreGaussian { k } => {
                let dim = grid.homogeneous_dim();
                let c = laguerre_coefficients(*k, dim);
                let profile = |r: f64| (poly(&c, r * r) * (-0.5 * r * r).exp()).abs();
                let q = if p.is_infinite() { 1.0 } else { p };
                let r_max = (80.0 / q).sqrt() + 2.0 * (*k as f64).sqrt() + 4.0;
                if p.is_infinite() {
                    return Ok(radial_sup(profile, r_max));
                }
                // split at the sign changes of P_k so every panel integrates a smooth function
                let mut breaks = vec![0.0];
                let steps = 10_000;
                let h = r_max / steps as f64;
                for i in 0..steps {
                    let (mut lo, mut hi) = (i as f64 * h, (i + 1) as f64 * h);
                    if poly(&c, lo * lo).signum() != poly(&c, hi * hi).signum() {
                        for _ in 0..100 {
                            let mid = 0.5 * (lo + hi);
                            if poly(&c, lo * lo).signum() == poly(&c, mid * mid).signum() {
                                lo = mid;
                            } else {
                                hi = mid;
                            }
                        }
                        breaks.push(0.5 * (lo + hi));
                    }
                }
                breaks.push(r_max);
                let s: f64 = breaks
                    .windows(2)
                    .map(|b| panel_quadrature(b[0], b[1], 100, |r| profile(r).powf(p) * r.powf(dim - 1.0)))
                    .sum();
                Ok((radial_constant(grid.alpha(), grid.d()) * s).powf(1.0 / p))
            }
            Window::Sampled { field, .. } => field.lp_norm(p),
        }
    }

    /// `F_W phi(a xi)` at every frequency node of the plan.
    pub fn dilated_profile(&self, plan: &TransformPlan, a: f64) -> Result<Vec<Complex64>> {
        match self {
            Window::LaguerreGaussian { .. } => {
                let g = plan.grid();
                par::map_collect(g.n_nodes(), |k| {
                    let xi: Vec<f64> = g.node(k).iter().map(|v| a * v).collect();
                    self.profile(plan, &xi)
                })
                .into_iter()
                .collect()
            }
            Window::Sampled { field, .. } => Ok(plan.forward_dilated(field, a)?.into_values()),
        }
    }
}

fn panel_quadrature<F: Fn(f64) -> f64>(a: f64, b: f64, panels: usize, f: F) -> f64 {
    let (t, w) = gauss_legendre(8);
    let h = (b - a) / panels as f64;
    let mut s = 0.0;
    for i in 0..panels {
        let mid = a + (i as f64 + 0.5) * h;
        for (t, w) in t.iter().zip(&w) {
            s += 0.5 * h * w * f(mid + 0.5 * h * t);
        }
    }
    s
}

/// Maximum of a smooth profile on `[0, r_max]`: dense sampling, then golden-section refinement.
fn radial_sup<F: Fn(f64) -> f64>(f: F, r_max: f64) -> f64 {
    let samples = 20_000;
    let h = r_max / samples as f64;
    let (mut best, mut at) = (f(0.0), 0usize);
    for i in 1..=samples {
        let v = f(i as f64 * h);
        if v > best {
            best = v;
            at = i;
        }
    }
    let (mut lo, mut hi) = ((at as f64 - 1.0).max(0.0) * h, (at as f64 + 1.0) * h);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let (x1, x2) = (hi - g * (hi - lo), lo + g * (hi - lo));
        if f(x1) > f(x2) {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    best.max(f(0.5 * (lo + hi)))
}

/// Power-basis coefficients of `P_k(t) = 2^k k! L_k^{(D/2 - 1)}(t / 2)`.
pub fn laguerre_coefficients(k: usize, dim: f64) -> Vec<f64> {
    let beta = 0.5 * dim - 1.0;
    let kf = k as f64;
    let lead = 2f64.powi(k as i32) * gamma(kf + 1.0);
    (0..=k)
        .map(|j| {
            let jf = j as f64;
            // binom(k + beta, k - j) / j! / 2^j
            let ln_binom = ln_gamma(kf + beta + 1.0) - ln_gamma(kf - jf + 1.0) - ln_gamma(beta + jf + 1.0);
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            lead * sign * ln_binom.exp() / (gamma(jf + 1.0) * 2f64.powi(j as i32))
        })
        .collect()
}

fn poly(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &v| acc * t + v)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// All ways to write `total` as an ordered sum of `parts` non-negative integers.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn multinomial(parts: &[usize]) -> f64 {
    let total: usize = parts.iter().sum();
    let mut acc = 1.0;
    let mut left = total;
    for &p in parts {
        acc *= binomial(left, p);
        left -= p;
    }
    acc
}

#[derive(Debug, Clone)]
struct SpatialTerm {
    coef: f64,
    cart: Vec<usize>,
    radial: usize,
}

#[derive(Debug, Clone)]
enum Route {
    /// Separable exact members: `sum coef (x) cart_tables[p_i] (x) radial_tables[q]`.
    Spatial {
        cart_tables: Vec<CMatrix>,
        radial_tables: Vec<CMatrix>,
        terms: Vec<SpatialTerm>,
    },
    /// `w_xi F_W phi(a xi)` on the frequency nodes.
    Spectral(Vec<Complex64>),
}

/// The symmetric kernel `K_a(x, y) = phi_{a,x}(y)` at one scale.
#[derive(Debug, Clone)]
pub struct ScaleKernel {
    scale: f64,
    pref: f64,
    route: Route,
}

impl ScaleKernel {
    fn spatial(grid: &BaseGrid, rule: &ThetaRule, k: usize, a: f64) -> Self {
        let dim = grid.homogeneous_dim();
        let coefs = laguerre_coefficients(k, dim);
        let xs = grid.cart_nodes();
        let rs = grid.radial_nodes();
        let cart_tables: Vec<CMatrix> = (0..=k)
            .map(|p| {
                Matrix::from_fn(xs.len(), xs.len(), |i, j| {
                    let t = ((xs[i] + xs[j]) / a).powi(2);
                    Complex64::new(t.powi(p as i32) * (-0.5 * t).exp(), 0.0)
                })
            })
            .collect();
        let radial_tables: Vec<CMatrix> = (0..=k)
            .map(|q| {
                Matrix::from_fn(rs.len(), rs.len(), |i, j| {
                    let (x, y) = (rs[i], rs[j]);
                    let mut s = 0.0;
                    for (th, w) in rule.nodes().iter().zip(rule.weights()) {
                        let t = (x * x + y * y + 2.0 * x * y * th.cos()).max(0.0) / (a * a);
                        s += w * t.powi(q as i32) * (-0.5 * t).exp();
                    }
                    Complex64::new(s, 0.0)
                })
            })
            .collect();
        let mut terms = Vec::new();
        for (j, &c) in coefs.iter().enumerate() {
            for p in 0..=j {
                for parts in compositions(p, grid.d()) {
                    terms.push(SpatialTerm {
                        coef: c * binomial(j, p) * multinomial(&parts),
                        cart: parts,
                        radial: j - p,
                    });
                }
            }
        }
        ScaleKernel {
            scale: a,
            pref: a.powf(-0.5 * dim),
            route: Route::Spatial {
                cart_tables,
                radial_tables,
                terms,
            },
        }
    }

    fn spectral(plan: &TransformPlan, window: &Window, a: f64) -> Result<Self> {
        let g = plan.grid();
        let profile = window.dilated_profile(plan, a)?;
        let weighted = profile.iter().zip(g.weights()).map(|(p, w)| p * w).collect();
        Ok(ScaleKernel {
            scale: a,
            pref: a.powf(0.5 * g.homogeneous_dim()),
            route: Route::Spectral(weighted),
        })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Whether members at this scale are sampled exactly in space.
    pub fn is_spatial(&self) -> bool {
        matches!(self.route, Route::Spatial { .. })
    }

    fn apply_spatial(&self, grid: &BaseGrid, v: &[Complex64]) -> Vec<Complex64> {
        let Route::Spatial {
            cart_tables,
            radial_tables,
            terms,
        } = &self.route
        else {
            unreachable!()
        };
        let d = grid.d();
        let mut shape = vec![grid.n(); d];
        shape.push(grid.m());
        let mut out = vec![ZERO; v.len()];
        // radial products are shared by all terms with the same radial index
        let radial: Vec<Vec<Complex64>> = radial_tables
            .iter()
            .map(|t| apply_axis(v, &shape, d, t))
            .collect();
        for term in terms {
            let mut acc = radial[term.radial].clone();
            for (axis, &p) in term.cart.iter().enumerate() {
                acc = apply_axis(&acc, &shape, axis, &cart_tables[p]);
            }
            let c = term.coef * self.pref;
            for (o, a) in out.iter_mut().zip(&acc) {
                *o += a * c;
            }
        }
        out
    }

    /// `(K v)(x) = sum_y phi_{a,x}(y) v(y)`.
    pub fn apply(&self, plan: &TransformPlan, v: &[Complex64]) -> Vec<Complex64> {
        let g = plan.grid();
        match &self.route {
            Route::Spatial { .. } => self.apply_spatial(g, v),
            Route::Spectral(wp) => {
                let reflected: Vec<Complex64> = (0..v.len()).map(|k| v[g.reflect_index(k)]).collect();
                let mut u = plan.apply_kernel(&reflected);
                for (x, p) in u.iter_mut().zip(wp) {
                    *x *= p * self.pref;
                }
                let t = plan.apply_kernel(&u);
                (0..t.len()).map(|k| t[g.reflect_index(k)]).collect()
            }
        }
    }

    /// `(conj(K) v)(x) = sum_y conj(phi_{a,x}(y)) v(y)`.
    pub fn apply_conj(&self, plan: &TransformPlan, v: &[Complex64]) -> Vec<Complex64> {
        match &self.route {
            Route::Spatial { .. } => {
                let cv: Vec<Complex64> = v.iter().map(|x| x.conj()).collect();
                self.apply_spatial(plan.grid(), &cv).into_iter().map(|x| x.conj()).collect()
            }
            Route::Spectral(wp) => {
                let mut u = plan.apply_kernel(v);
                for (x, p) in u.iter_mut().zip(wp) {
                    *x *= p.conj() * self.pref;
                }
                plan.apply_kernel(&u)
            }
        }
    }

    /// Dense `N x N` matrix of `K_a`.
    pub fn matrix(&self, plan: &TransformPlan) -> CMatrix {
        self.matrix_with(plan, &mut None)
    }

    /// As [`ScaleKernel::matrix`], reusing the reflected kernel matrix of the plan across calls.
    pub(crate) fn matrix_with(&self, plan: &TransformPlan, reflected: &mut Option<CMatrix>) -> CMatrix {
        let g = plan.grid();
        let n_nodes = g.n_nodes();
        match &self.route {
            Route::Spatial {
                cart_tables,
                radial_tables,
                terms,
            } => {
                let (n, m, d) = (g.n(), g.m(), g.d());
                Matrix::from_fn(n_nodes, n_nodes, |x, y| {
                    let (cx, rx) = (x / m, x % m);
                    let (cy, ry) = (y / m, y % m);
                    let mut s = ZERO;
                    for term in terms {
                        let mut v = radial_tables[term.radial].get(rx, ry) * term.coef;
                        let (mut a, mut b) = (cx, cy);
                        for axis in (0..d).rev() {
                            v *= cart_tables[term.cart[axis]].get(a % n, b % n);
                            a /= n;
                            b /= n;
                        }
                        s += v;
                    }
                    s * self.pref
                })
            }
            Route::Spectral(wp) => {
                // E[xi][y] = Lambda(-y, xi); K = E^T diag(w F phi(a .)) E
                let em = reflected.get_or_insert_with(|| {
                    let e = plan.kernel_matrix();
                    Matrix::from_fn(n_nodes, n_nodes, |xi, y| e.get(xi, g.reflect_index(y)))
                });
                let scaled = Matrix::from_fn(n_nodes, n_nodes, |xi, y| em.get(xi, y) * wp[xi] * self.pref);
                crate::linalg::matmul_complex(em, true, &scaled, false)
            }
        }
    }
}

/// The wavelet family of one window on a scale grid, with per-scale kernels.
#[derive(Debug, Clone)]
pub struct WaveletBank {
    plan: TransformPlan,
    scales: Arc<ScaleGrid>,
    window: Window,
    kernels: Vec<ScaleKernel>,
    switch_scale: f64,
}

impl WaveletBank {
    pub fn new(
        plan: &TransformPlan,
        scales: &Arc<ScaleGrid>,
        window: &Window,
        switch_factor: f64,
    ) -> Result<Self> {
        let g = plan.grid();
        g.check_same(scales.base())?;
        if !(switch_factor >= 0.0 && switch_factor.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "switch factor must be a non-negative number, got {switch_factor}"
            )));
        }
        let switch_scale = switch_factor * g.resolution();
        let rule = ThetaRule::new(g.alpha(), ThetaRule::DEFAULT_POINTS)?;
        let kernels = par::map_collect(scales.len(), |s| {
            let a = scales.scales()[s];
            match window {
                Window::LaguerreGaussian { k } if a >= switch_scale => {
                    Ok(ScaleKernel::spatial(g, &rule, *k, a))
                }
                _ => ScaleKernel::spectral(plan, window, a),
            }
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        Ok(WaveletBank {
            plan: plan.clone(),
            scales: scales.clone(),
            window: window.clone(),
            kernels,
            switch_scale,
        })
    }

    pub fn plan(&self) -> &TransformPlan {
        &self.plan
    }
    pub fn scales(&self) -> &Arc<ScaleGrid> {
        &self.scales
    }
    pub fn window(&self) -> &Window {
        &self.window
    }
    pub fn kernels(&self) -> &[ScaleKernel] {
        &self.kernels
    }
    pub fn switch_scale(&self) -> f64 {
        self.switch_scale
    }

    /// `Phi_phi(f)(a, x) = <f, phi_{a,x}>`.
    pub fn analyze(&self, f: &Field) -> Result<ScaleField> {
        let g = self.plan.grid();
        g.check_same(f.grid())?;
        let wf: Vec<Complex64> = f.values().iter().zip(g.weights()).map(|(v, w)| v * w).collect();
        let per_scale = par::map_collect(self.kernels.len(), |s| {
            self.kernels[s].apply_conj(&self.plan, &wf)
        });
        ScaleField::from_values(&self.scales, per_scale.into_iter().flatten().collect())
    }

    /// `sum over cells of w(a, x) c(a, x) phi_{a,x}`.
    pub fn synthesize(&self, c: &ScaleField) -> Result<Field> {
        self.scales.check_same(c.grid())?;
        let g = self.plan.grid();
        let w = g.weights();
        let per_scale = par::map_collect(self.kernels.len(), |s| {
            let sf = self.scales.scale_factors()[s];
            let wc: Vec<Complex64> = c.at_scale(s).iter().zip(w).map(|(v, w)| v * (w * sf)).collect();
            self.kernels[s].apply(&self.plan, &wc)
        });
        let mut out = vec![ZERO; g.n_nodes()];
        for contrib in per_scale {
            for (o, v) in out.iter_mut().zip(contrib) {
                *o += v;
            }
        }
        Field::from_values(g, out)
    }
}

/// `Phi_phi(f)` with the default scale routing.
pub fn cwt(
    plan: &TransformPlan,
    scales: &Arc<ScaleGrid>,
    window: &Window,
    f: &Field,
) -> Result<ScaleField> {
    WaveletBank::new(plan, scales, window, DEFAULT_SWITCH_FACTOR)?.analyze(f)
}

/// `Phi_phi(f)(a, .) = a^{D/2} (conj(phi_a) * f_check)` with `f_check(y) = f(-y', y_{d+1})`.
///
/// Resolved scales use the direct convolution with sampled `conj(phi_a)`; the others use the
/// convolution theorem with `F_W(conj(phi_a))(xi) = conj(F_W phi(-a xi))`.
pub fn cwt_convolution_form(
    plan: &TransformPlan,
    translator: &Translator,
    scales: &Arc<ScaleGrid>,
    window: &Window,
    f: &Field,
    switch_factor: f64,
) -> Result<ScaleField> {
    let g = plan.grid();
    g.check_same(f.grid())?;
    g.check_same(translator.grid())?;
    g.check_same(scales.base())?;
    let dim = g.homogeneous_dim();
    let switch_scale = switch_factor * g.resolution();
    let f_check = reflect(f);
    let f_check_hat = plan.forward(&f_check)?;
    let mut values = Vec::with_capacity(scales.n_cells());
    for &a in scales.scales() {
        let pref = Complex64::new(a.powf(0.5 * dim), 0.0);
        let direct = matches!(window, Window::LaguerreGaussian { .. }) && a >= switch_scale;
        let conv = if direct {
            let phi_a = window.dilated_samples(g, a).conj();
            translator.convolve(&f_check, &phi_a)?
        } else {
            let profile = window.dilated_profile(plan, a)?;
            let hat: Vec<Complex64> = (0..g.n_nodes())
                .map(|k| f_check_hat.values()[k] * profile[g.reflect_index(k)].conj())
                .collect();
            plan.inverse(&Field::from_values(g, hat)?)?
        };
        values.extend(conv.values().iter().map(|v| v * pref));
    }
    ScaleField::from_values(scales, values)
}

/// `phi_a` sampled from an arbitrary field by interpolation.
pub fn dilate(a: f64, f: &Field) -> Result<Field> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::InvalidParameter(format!("dilation must be positive, got {a}")));
    }
    let g = f.grid();
    let radial = RadialInterpolant::new(g);
    let s = a.powf(-g.homogeneous_dim());
    Ok(Field::from_fn(g, |x| {
        let y: Vec<f64> = x.iter().map(|v| v / a).collect();
        interpolate(f, &radial, &y) * s
    }))
}

/// `phi_{a,x} = a^{D/2} tau_x phi_a` via the translation operator.
pub fn family_member(translator: &Translator, a: f64, x: &[f64], window: &Window) -> Result<Field> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::InvalidParameter(format!("dilation must be positive, got {a}")));
    }
    let g = translator.grid();
    let phi_a = window.dilated_samples(g, a);
    let t = translator.translate(x, &phi_a)?;
    Ok(t.scale(Complex64::new(a.powf(0.5 * g.homogeneous_dim()), 0.0)))
}

/// Frequencies at which constancy of scale integrals is tested: 16 radii spread log-uniformly
/// over the band fully covered by the scale range, times 8 directions in the upper half-plane
/// spanned by the first cartesian axis and the radial axis.
pub fn witness_frequencies(scales: &ScaleGrid) -> Vec<Vec<f64>> {
    let d = scales.base().d();
    let (lo, hi) = (5.0 / scales.a_max(), 0.15 / scales.a_min());
    let mut out = Vec::with_capacity(128);
    for i in 0..16 {
        let rho = if hi > lo {
            lo * (hi / lo).powf(i as f64 / 15.0)
        } else {
            lo
        };
        for j in 0..8 {
            let beta = (j as f64 + 0.5) * PI / 8.0;
            let mut xi = vec![0.0; d + 1];
            xi[0] = rho * beta.cos();
            xi[d] = rho * beta.sin();
            out.push(xi);
        }
    }
    out
}

/// `int conj(F_W phi(a xi)) F_W psi(a xi) da / a` on the scale grid, at each frequency.
pub fn scale_integral(
    plan: &TransformPlan,
    scales: &ScaleGrid,
    phi: &Window,
    psi: &Window,
    frequencies: &[Vec<f64>],
) -> Result<Vec<Complex64>> {
    par::map_collect(frequencies.len(), |i| {
        let mut s = ZERO;
        for (&a, &w) in scales.scales().iter().zip(scales.scale_weights()) {
            let xi: Vec<f64> = frequencies[i].iter().map(|v| a * v).collect();
            s += phi.profile(plan, &xi)?.conj() * psi.profile(plan, &xi)? * w;
        }
        Ok(s)
    })
    .into_iter()
    .collect()
}

fn mean_and_spread(values: &[Complex64]) -> (Complex64, f64) {
    let mean = values.iter().sum::<Complex64>() / values.len() as f64;
    let scale = mean.norm();
    let spread = values.iter().map(|v| (v - mean).norm()).fold(0.0, f64::max);
    (mean, if scale > 0.0 { spread / scale } else { f64::INFINITY })
}

/// `(C_phi, spread)` over the witness frequencies.
pub fn admissibility_constant(
    plan: &TransformPlan,
    scales: &ScaleGrid,
    window: &Window,
) -> Result<(f64, f64)> {
    let (c, spread) = two_wavelet_constant(plan, scales, window, window)?;
    Ok((c.re, spread))
}

/// `(C_{phi,psi}, spread)` over the witness frequencies.
pub fn two_wavelet_constant(
    plan: &TransformPlan,
    scales: &ScaleGrid,
    phi: &Window,
    psi: &Window,
) -> Result<(Complex64, f64)> {
    let values = scale_integral(plan, scales, phi, psi, &witness_frequencies(scales))?;
    Ok(mean_and_spread(&values))
}

/// Exact constants of Laguerre-Gaussian windows: `Gamma(k1 + k2) / 2`.
pub fn laguerre_gaussian_constant(k1: usize, k2: usize) -> f64 {
    0.5 * gamma((k1 + k2) as f64)
}

/// Two windows with their admissibility and two-wavelet constants.
#[derive(Debug, Clone)]
pub struct WaveletPair {
    pub phi: Window,
    pub psi: Window,
    pub c_phi: f64,
    pub c_psi: f64,
    pub c_phi_psi: Complex64,
    /// Largest constancy spread of the three scale integrals.
    pub spread: f64,
}

impl WaveletPair {
    pub fn new(plan: &TransformPlan, scales: &ScaleGrid, phi: Window, psi: Window) -> Result<Self> {
        let (c_phi, s1) = admissibility_constant(plan, scales, &phi)?;
        let (c_psi, s2) = admissibility_constant(plan, scales, &psi)?;
        let (c_phi_psi, s3) = two_wavelet_constant(plan, scales, &phi, &psi)?;
        Ok(WaveletPair {
            phi,
            psi,
            c_phi,
            c_psi,
            c_phi_psi,
            spread: s1.max(s2).max(s3),
        })
    }

    /// The pair with roles exchanged.
    pub fn swapped(&self) -> Self {
        WaveletPair {
            phi: self.psi.clone(),
            psi: self.phi.clone(),
            c_phi: self.c_psi,
            c_psi: self.c_phi,
            c_phi_psi: self.c_phi_psi.conj(),
            spread: self.spread,
        }
    }
}

/// `(int_X Phi_phi(f) conj(Phi_psi(g)) dmu, C_{phi,psi} <f, g>)`.
pub fn check_two_wavelet_parseval(
    pair: &WaveletPair,
    phi_bank: &WaveletBank,
    psi_bank: &WaveletBank,
    f: &Field,
    g: &Field,
) -> Result<(Complex64, Complex64)> {
    let lhs = phi_bank.analyze(f)?.inner(&psi_bank.analyze(g)?)?;
    Ok((lhs, pair.c_phi_psi * f.inner(g)?))
}

/// `(1 / C_{phi,psi}) int_X W(a, x) psi_{a,x} dmu(a, x)`.
pub fn invert_cwt(pair: &WaveletPair, psi_bank: &WaveletBank, w: &ScaleField) -> Result<Field> {
    let c = pair.c_phi_psi;
    if !(c.norm() > 1e-8 * (pair.c_phi * pair.c_psi).abs().sqrt()) || !c.norm().is_finite() {
        return Err(Error::DegenerateConstant(c.norm()));
    }
    Ok(psi_bank.synthesize(w)?.scale(c.inv()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laguerre_polynomials() {
        let c = laguerre_coefficients(1, 3.0);
        assert!((c[0] - 3.0).abs() < 1e-14 && (c[1] + 1.0).abs() < 1e-14);
        // P_2(t) = t^2 - 2 (D + 2) t + D (D + 2)
        let dim = 4.5;
        let c = laguerre_coefficients(2, dim);
        let expect = [dim * (dim + 2.0), -2.0 * (dim + 2.0), 1.0];
        for (a, b) in c.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12, "{a} {b}");
        }
    }

    #[test]
    fn continuum_norms_of_windows() {
        for &alpha in &[0.0, 0.5, 1.5] {
            let g = BaseGrid::new(alpha, 1, 12.0, 97, 12.0, 96).unwrap();
            let dim = g.homogeneous_dim();
            let w = Window::laguerre_gaussian(1);
            // sup of |(D - t) e^{-t/2}| is attained at the origin
            assert!((w.norm(&g, f64::INFINITY).unwrap() - dim).abs() < 1e-12);
            // the grid rule loses accuracy where |phi| has a kink, so odd p get a looser tolerance
            for &(p, tol) in &[(1.0, 1e-3), (2.0, 1e-9), (3.0, 1e-5)] {
                let exact = w.norm(&g, p).unwrap();
                let grid = w.samples(&g).lp_norm(p).unwrap();
                assert!((exact - grid).abs() < tol * exact, "alpha={alpha} p={p} {exact} {grid}");
            }
        }
    }

    #[test]
    fn compositions_and_multinomials() {
        assert_eq!(compositions(2, 2), vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
        assert_eq!(multinomial(&[1, 1]), 2.0);
        assert_eq!(multinomial(&[2, 1, 1]), 12.0);
    }

    #[test]
    fn constants_of_default_windows() {
        assert!((laguerre_gaussian_constant(1, 1) - 0.5).abs() < 1e-15);
        assert!((laguerre_gaussian_constant(1, 2) - 1.0).abs() < 1e-15);
        assert!((laguerre_gaussian_constant(2, 2) - 3.0).abs() < 1e-14);
    }
}
