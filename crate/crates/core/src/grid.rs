//! Discretizations of the half-space and of the scale space `X = (0, inf) x half-space`.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::par;
use crate::specfun::{gauss_legendre, homogeneous_dim, measure_constant, Alpha, Dimension};

/// Tensor grid on `[-L, L]^d x (0, R]`: uniform trapezoid rules on the cartesian axes and a
/// Gauss-Legendre rule on the radial axis, with weights realizing `d mu_alpha`.
///
/// Nodes are flattened with the cartesian multi-index first (row-major) and the radial
/// index fastest: `k = c * m + j`.
#[derive(Debug, Clone)]
pub struct BaseGrid {
    alpha: f64,
    d: usize,
    cart_extent: f64,
    n: usize,
    radial_extent: f64,
    m: usize,
    cart_nodes: Vec<f64>,
    cart_weights: Vec<f64>,
    radial_nodes: Vec<f64>,
    radial_weights: Vec<f64>,
    weights: Vec<f64>,
}

impl BaseGrid {
    pub fn new(
        alpha: f64,
        d: usize,
        cart_extent: f64,
        n: usize,
        radial_extent: f64,
        m: usize,
    ) -> Result<Arc<Self>> {
        let alpha = Alpha::new(alpha)?.get();
        let d = Dimension::new(d)?.get();
        if !(cart_extent > 0.0 && cart_extent.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "cartesian extent must be positive, got {cart_extent}"
            )));
        }
        if !(radial_extent > 0.0 && radial_extent.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "radial extent must be positive, got {radial_extent}"
            )));
        }
        if n < 2 || m < 2 {
            return Err(Error::InvalidParameter(format!(
                "point counts must be at least 2, got n={n}, m={m}"
            )));
        }
        let h = 2.0 * cart_extent / (n - 1) as f64;
        let cart_nodes: Vec<f64> = (0..n)
            .map(|i| {
                // symmetric construction keeps x_i = -x_{n-1-i} exactly
                let s = i as f64 - 0.5 * (n - 1) as f64;
                s * h
            })
            .collect();
        let mut cart_weights = vec![h; n];
        cart_weights[0] = 0.5 * h;
        cart_weights[n - 1] = 0.5 * h;

        let c = measure_constant(alpha, d);
        let (t, w) = gauss_legendre(m);
        let radial_nodes: Vec<f64> = t.iter().map(|t| 0.5 * radial_extent * (t + 1.0)).collect();
        let radial_weights: Vec<f64> = radial_nodes
            .iter()
            .zip(&w)
            .map(|(r, w)| 0.5 * radial_extent * w * c * r.powf(2.0 * alpha + 1.0))
            .collect();

        let n_cart = n.pow(d as u32);
        let mut weights = Vec::with_capacity(n_cart * m);
        let mut digits = vec![0usize; d];
        for ci in 0..n_cart {
            unflatten(ci, n, &mut digits);
            let wc: f64 = digits.iter().map(|&i| cart_weights[i]).product();
            for wr in &radial_weights {
                weights.push(wc * wr);
            }
        }
        Ok(Arc::new(BaseGrid {
            alpha,
            d,
            cart_extent,
            n,
            radial_extent,
            m,
            cart_nodes,
            cart_weights,
            radial_nodes,
            radial_weights,
            weights,
        }))
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn d(&self) -> usize {
        self.d
    }
    pub fn cart_extent(&self) -> f64 {
        self.cart_extent
    }
    pub fn radial_extent(&self) -> f64 {
        self.radial_extent
    }
    /// Points per cartesian axis.
    pub fn n(&self) -> usize {
        self.n
    }
    /// Radial points.
    pub fn m(&self) -> usize {
        self.m
    }
    /// Number of cartesian multi-indices, `n^d`.
    pub fn n_cart(&self) -> usize {
        self.n.pow(self.d as u32)
    }
    pub fn n_nodes(&self) -> usize {
        self.weights.len()
    }
    pub fn cart_nodes(&self) -> &[f64] {
        &self.cart_nodes
    }
    pub fn cart_weights(&self) -> &[f64] {
        &self.cart_weights
    }
    pub fn radial_nodes(&self) -> &[f64] {
        &self.radial_nodes
    }
    pub fn radial_weights(&self) -> &[f64] {
        &self.radial_weights
    }
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
    /// `2 alpha + d + 2`.
    pub fn homogeneous_dim(&self) -> f64 {
        homogeneous_dim(self.alpha, self.d)
    }
    /// Cartesian node spacing.
    pub fn spacing(&self) -> f64 {
        2.0 * self.cart_extent / (self.n - 1) as f64
    }
    /// Largest gap between neighbouring nodes on any axis.
    pub fn resolution(&self) -> f64 {
        let radial_gap = self
            .radial_nodes
            .windows(2)
            .map(|p| p[1] - p[0])
            .fold(self.radial_nodes[0], f64::max);
        self.spacing().max(radial_gap)
    }

    /// Cartesian and radial indices of node `k`.
    pub fn split(&self, k: usize) -> (usize, usize) {
        (k / self.m, k % self.m)
    }

    pub fn cart_digits(&self, c: usize, out: &mut [usize]) {
        unflatten(c, self.n, out);
    }

    /// Coordinates of node `k` written into `out` (length `d + 1`).
    pub fn node_into(&self, k: usize, out: &mut [f64]) {
        let (c, j) = self.split(k);
        let mut rem = c;
        for i in (0..self.d).rev() {
            out[i] = self.cart_nodes[rem % self.n];
            rem /= self.n;
        }
        out[self.d] = self.radial_nodes[j];
    }

    pub fn node(&self, k: usize) -> Vec<f64> {
        let mut v = vec![0.0; self.d + 1];
        self.node_into(k, &mut v);
        v
    }

    /// Index of the node `(-x', x_{d+1})`.
    pub fn reflect_index(&self, k: usize) -> usize {
        let (c, j) = self.split(k);
        let mut rem = c;
        let mut rc = 0;
        let mut mult = 1;
        for _ in 0..self.d {
            let i = rem % self.n;
            rem /= self.n;
            rc += (self.n - 1 - i) * mult;
            mult *= self.n;
        }
        rc * self.m + j
    }

    /// Structural equality of the discretization parameters.
    pub fn same_as(&self, other: &BaseGrid) -> bool {
        std::ptr::eq(self, other)
            || (self.alpha == other.alpha
                && self.d == other.d
                && self.cart_extent == other.cart_extent
                && self.n == other.n
                && self.radial_extent == other.radial_extent
                && self.m == other.m)
    }

    pub(crate) fn check_same(&self, other: &BaseGrid) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch("fields live on different base grids"))
        }
    }
}

pub(crate) fn unflatten(mut c: usize, n: usize, out: &mut [usize]) {
    for slot in out.iter_mut().rev() {
        *slot = c % n;
        c /= n;
    }
}

/// Complex samples of a function on a [`BaseGrid`].
#[derive(Debug, Clone)]
pub struct Field {
    grid: Arc<BaseGrid>,
    values: Vec<Complex64>,
}

impl Field {
    pub fn zeros(grid: &Arc<BaseGrid>) -> Self {
        Field {
            grid: grid.clone(),
            values: vec![Complex64::new(0.0, 0.0); grid.n_nodes()],
        }
    }

    pub fn from_values(grid: &Arc<BaseGrid>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n_nodes() {
            return Err(Error::GridMismatch("value count differs from node count"));
        }
        Ok(Field {
            grid: grid.clone(),
            values,
        })
    }

    pub fn from_fn<F>(grid: &Arc<BaseGrid>, f: F) -> Self
    where
        F: Fn(&[f64]) -> Complex64 + Sync + Send,
    {
        let values = par::map_collect(grid.n_nodes(), |k| f(&grid.node(k)));
        Field {
            grid: grid.clone(),
            values,
        }
    }

    pub fn from_real_fn<F>(grid: &Arc<BaseGrid>, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Sync + Send,
    {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    pub fn grid(&self) -> &Arc<BaseGrid> {
        &self.grid
    }
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }
    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// `<f, g> = sum w f conj(g)`.
    pub fn inner(&self, other: &Field) -> Result<Complex64> {
        self.grid.check_same(&other.grid)?;
        let w = self.grid.weights();
        Ok(par::csum_by(w.len(), |k| {
            self.values[k] * other.values[k].conj() * w[k]
        }))
    }

    /// Weighted `p`-norm; `p = f64::INFINITY` gives the largest modulus.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        weighted_lp(&self.values, self.grid.weights(), p)
    }

    pub fn map<F: Fn(Complex64) -> Complex64>(&self, f: F) -> Field {
        Field {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn conj(&self) -> Field {
        self.map(|v| v.conj())
    }

    pub fn scale(&self, c: Complex64) -> Field {
        self.map(|v| v * c)
    }

    pub fn zip_with<F>(&self, other: &Field, f: F) -> Result<Field>
    where
        F: Fn(Complex64, Complex64) -> Complex64,
    {
        self.grid.check_same(&other.grid)?;
        Ok(Field {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Field) -> Result<Field> {
        self.zip_with(other, |a, b| a * b)
    }

    /// `||f - g||_2 / ||g||_2`.
    pub fn rel_l2_error(&self, reference: &Field) -> Result<f64> {
        let diff = self.sub(reference)?.lp_norm(2.0)?;
        let base = reference.lp_norm(2.0)?;
        Ok(if base == 0.0 { diff } else { diff / base })
    }

    pub fn max_abs_diff(&self, other: &Field) -> Result<f64> {
        self.grid.check_same(&other.grid)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

pub(crate) fn weighted_lp(values: &[Complex64], w: &[f64], p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidParameter(format!("norm exponent must be >= 1, got {p}")));
    }
    if p.is_infinite() {
        return Ok(par::max_by(values.len(), |k| values[k].norm()));
    }
    let s = if p == 2.0 {
        par::sum_by(values.len(), |k| w[k] * values[k].norm_sqr())
    } else if p == 1.0 {
        par::sum_by(values.len(), |k| w[k] * values[k].norm())
    } else {
        par::sum_by(values.len(), |k| w[k] * values[k].norm().powf(p))
    };
    Ok(s.powf(1.0 / p))
}

/// Field with values permuted by `x -> (-x', x_{d+1})`.
pub fn reflect(f: &Field) -> Field {
    let g = f.grid();
    let values = (0..g.n_nodes()).map(|k| f.values[g.reflect_index(k)]).collect();
    Field {
        grid: g.clone(),
        values,
    }
}

/// Geometric scale grid on `[a_min, a_max]` with log-uniform trapezoid weights for `da/a`.
#[derive(Debug, Clone)]
pub struct ScaleGrid {
    base: Arc<BaseGrid>,
    a_min: f64,
    a_max: f64,
    scales: Vec<f64>,
    scale_weights: Vec<f64>,
    scale_factors: Vec<f64>,
}

impl ScaleGrid {
    pub fn new(base: &Arc<BaseGrid>, a_min: f64, a_max: f64, points: usize) -> Result<Arc<Self>> {
        if !(a_min > 0.0 && a_min < a_max && a_max.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "scale range must satisfy 0 < a_min < a_max, got [{a_min}, {a_max}]"
            )));
        }
        if points < 2 {
            return Err(Error::InvalidParameter(format!(
                "scale count must be at least 2, got {points}"
            )));
        }
        let (l0, l1) = (a_min.ln(), a_max.ln());
        let step = (l1 - l0) / (points - 1) as f64;
        let mut scales: Vec<f64> = (0..points).map(|i| (l0 + step * i as f64).exp()).collect();
        scales[0] = a_min;
        scales[points - 1] = a_max;
        let mut scale_weights = vec![step; points];
        scale_weights[0] = 0.5 * step;
        scale_weights[points - 1] = 0.5 * step;
        let dim = base.homogeneous_dim();
        let scale_factors = scales
            .iter()
            .zip(&scale_weights)
            .map(|(a, w)| w * a.powf(-dim))
            .collect();
        Ok(Arc::new(ScaleGrid {
            base: base.clone(),
            a_min,
            a_max,
            scales,
            scale_weights,
            scale_factors,
        }))
    }

    pub fn base(&self) -> &Arc<BaseGrid> {
        &self.base
    }
    pub fn a_min(&self) -> f64 {
        self.a_min
    }
    pub fn a_max(&self) -> f64 {
        self.a_max
    }
    pub fn scales(&self) -> &[f64] {
        &self.scales
    }
    pub fn len(&self) -> usize {
        self.scales.len()
    }
    pub fn is_empty(&self) -> bool {
        self.scales.is_empty()
    }
    pub fn scale_weights(&self) -> &[f64] {
        &self.scale_weights
    }
    /// `w_a * a^{-(2 alpha + d + 2)}` per scale.
    pub fn scale_factors(&self) -> &[f64] {
        &self.scale_factors
    }
    pub fn n_cells(&self) -> usize {
        self.scales.len() * self.base.n_nodes()
    }
    /// Weight of cell `(s, k)` realizing `d mu_alpha(a, x)`.
    pub fn combined_weight(&self, s: usize, k: usize) -> f64 {
        self.base.weights()[k] * self.scale_factors[s]
    }

    pub fn same_as(&self, other: &ScaleGrid) -> bool {
        std::ptr::eq(self, other)
            || (self.base.same_as(&other.base)
                && self.a_min == other.a_min
                && self.a_max == other.a_max
                && self.scales.len() == other.scales.len())
    }

    pub(crate) fn check_same(&self, other: &ScaleGrid) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch("scale fields live on different scale grids"))
        }
    }
}

/// Complex samples on a [`ScaleGrid`], stored scale-major.
#[derive(Debug, Clone)]
pub struct ScaleField {
    grid: Arc<ScaleGrid>,
    values: Vec<Complex64>,
}

impl ScaleField {
    pub fn zeros(grid: &Arc<ScaleGrid>) -> Self {
        ScaleField {
            grid: grid.clone(),
            values: vec![Complex64::new(0.0, 0.0); grid.n_cells()],
        }
    }

    pub fn from_values(grid: &Arc<ScaleGrid>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n_cells() {
            return Err(Error::GridMismatch("value count differs from cell count"));
        }
        Ok(ScaleField {
            grid: grid.clone(),
            values,
        })
    }

    pub fn from_fn<F>(grid: &Arc<ScaleGrid>, f: F) -> Self
    where
        F: Fn(f64, &[f64]) -> Complex64 + Sync + Send,
    {
        let base = grid.base();
        let n = base.n_nodes();
        let values = par::map_collect(grid.n_cells(), |i| {
            let (s, k) = (i / n, i % n);
            f(grid.scales()[s], &base.node(k))
        });
        ScaleField {
            grid: grid.clone(),
            values,
        }
    }

    pub fn grid(&self) -> &Arc<ScaleGrid> {
        &self.grid
    }
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    /// Values at scale index `s`.
    pub fn at_scale(&self, s: usize) -> &[Complex64] {
        let n = self.grid.base().n_nodes();
        &self.values[s * n..(s + 1) * n]
    }

    pub fn at_scale_mut(&mut self, s: usize) -> &mut [Complex64] {
        let n = self.grid.base().n_nodes();
        &mut self.values[s * n..(s + 1) * n]
    }

    fn weight(&self, i: usize) -> f64 {
        let n = self.grid.base().n_nodes();
        self.grid.combined_weight(i / n, i % n)
    }

    pub fn inner(&self, other: &ScaleField) -> Result<Complex64> {
        self.grid.check_same(&other.grid)?;
        Ok(par::csum_by(self.values.len(), |i| {
            self.values[i] * other.values[i].conj() * self.weight(i)
        }))
    }

    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidParameter(format!("norm exponent must be >= 1, got {p}")));
        }
        if p.is_infinite() {
            return Ok(par::max_by(self.values.len(), |i| self.values[i].norm()));
        }
        let s = par::sum_by(self.values.len(), |i| {
            self.weight(i) * self.values[i].norm().powf(p)
        });
        Ok(s.powf(1.0 / p))
    }

    pub fn map<F: Fn(Complex64) -> Complex64>(&self, f: F) -> ScaleField {
        ScaleField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }
}
