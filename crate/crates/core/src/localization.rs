//! Two-wavelet localization operators on the discretized half-space.
//!
//! `L(sigma) f(y) = sum over cells of w(a, x) sigma(a, x) <f, phi_{a,x}> psi_{a,x}(y)` is stored
//! through its kernel `R(y, z) = sum w sigma conj(phi_{a,x}(z)) psi_{a,x}(y)`, so that
//! `L f = R (w f)` with `w` the base quadrature weights.

use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{reflect, BaseGrid, Field, ScaleField, ScaleGrid};
use crate::linalg::{
    matmul_complex, matmul_real, matvec, singular_values_complex, singular_values_real, CMatrix,
    Matrix, RMatrix,
};
use crate::par;
use crate::transform::{conjugate_exponent, TransformPlan};
use crate::translation::Translator;
use crate::wavelet::{Window, WaveletBank, WaveletPair};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Declared hypothesis class of a symbol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SymbolClass {
    L1OfX,
    /// `sigma in L^r(X)` with `r` in `[1, 2]`.
    LrOfX(f64),
    /// `chi(a) zeta(x)`.
    Separable,
    /// `chi(a)`.
    ScaleOnly,
    /// `zeta(x)`.
    SpaceOnly,
}

impl SymbolClass {
    pub fn name(&self) -> String {
        match self {
            SymbolClass::L1OfX => "l1_of_x".into(),
            SymbolClass::LrOfX(r) => format!("lr_of_x_{r}"),
            SymbolClass::Separable => "separable".into(),
            SymbolClass::ScaleOnly => "scale_only".into(),
            SymbolClass::SpaceOnly => "space_only".into(),
        }
    }

    /// Whether the class lies in `L^1(X)` on the unbounded domain. Scale-only and space-only
    /// symbols do not; they are integrable only after truncation.
    pub fn is_integrable(&self) -> bool {
        matches!(self, SymbolClass::L1OfX | SymbolClass::LrOfX(_) | SymbolClass::Separable)
    }
}

/// A symbol `sigma(a, x)` sampled on a scale grid.
#[derive(Debug, Clone)]
pub struct SymbolField {
    values: ScaleField,
    class: SymbolClass,
    chi: Option<Vec<Complex64>>,
    zeta: Option<Field>,
}

fn check_finite(values: &[Complex64], what: &'static str) -> Result<()> {
    if values.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

impl SymbolField {
    /// A symbol without stored factors; only `L1OfX` and `LrOfX` are accepted here.
    pub fn new(values: ScaleField, class: SymbolClass) -> Result<Self> {
        match class {
            SymbolClass::L1OfX => {}
            SymbolClass::LrOfX(r) if (1.0..=2.0).contains(&r) => {}
            SymbolClass::LrOfX(r) => {
                return Err(Error::InvalidParameter(format!(
                    "symbol exponent r must lie in [1, 2], got {r}"
                )))
            }
            other => {
                return Err(Error::InvalidParameter(format!(
                    "class {} needs its factors; use the dedicated constructor",
                    other.name()
                )))
            }
        }
        check_finite(values.values(), "symbol")?;
        Ok(SymbolField {
            values,
            class,
            chi: None,
            zeta: None,
        })
    }

    pub fn from_fn<F>(grid: &Arc<ScaleGrid>, class: SymbolClass, f: F) -> Result<Self>
    where
        F: Fn(f64, &[f64]) -> Complex64 + Sync + Send,
    {
        Self::new(ScaleField::from_fn(grid, f), class)
    }

    /// `chi(a) zeta(x)`, with `chi` given per scale.
    pub fn separable(grid: &Arc<ScaleGrid>, chi: Vec<Complex64>, zeta: Field) -> Result<Self> {
        Self::product(grid, SymbolClass::Separable, chi, zeta)
    }

    pub fn scale_only(grid: &Arc<ScaleGrid>, chi: Vec<Complex64>) -> Result<Self> {
        let one = Field::from_real_fn(grid.base(), |_| 1.0);
        Self::product(grid, SymbolClass::ScaleOnly, chi, one)
    }

    pub fn space_only(grid: &Arc<ScaleGrid>, zeta: Field) -> Result<Self> {
        let one = vec![Complex64::new(1.0, 0.0); grid.len()];
        Self::product(grid, SymbolClass::SpaceOnly, one, zeta)
    }

    fn product(
        grid: &Arc<ScaleGrid>,
        class: SymbolClass,
        chi: Vec<Complex64>,
        zeta: Field,
    ) -> Result<Self> {
        if chi.len() != grid.len() {
            return Err(Error::GridMismatch("scale factor length differs from scale count"));
        }
        grid.base().check_same(zeta.grid())?;
        check_finite(&chi, "scale factor")?;
        check_finite(zeta.values(), "space factor")?;
        let n = grid.base().n_nodes();
        let values = (0..grid.n_cells())
            .map(|i| chi[i / n] * zeta.values()[i % n])
            .collect();
        Ok(SymbolField {
            values: ScaleField::from_values(grid, values)?,
            class,
            chi: Some(chi),
            zeta: Some(zeta),
        })
    }

    /// Indicator of the single cell `(s, k)`.
    pub fn single_cell(grid: &Arc<ScaleGrid>, s: usize, k: usize) -> Result<Self> {
        let n = grid.base().n_nodes();
        if s >= grid.len() || k >= n {
            return Err(Error::InvalidParameter(format!("cell ({s}, {k}) is outside the grid")));
        }
        let mut values = ScaleField::zeros(grid);
        values.values_mut()[s * n + k] = Complex64::new(1.0, 0.0);
        Self::new(values, SymbolClass::L1OfX)
    }

    pub fn grid(&self) -> &Arc<ScaleGrid> {
        self.values.grid()
    }
    pub fn values(&self) -> &ScaleField {
        &self.values
    }
    pub fn class(&self) -> SymbolClass {
        self.class
    }
    pub fn chi(&self) -> Option<&[Complex64]> {
        self.chi.as_deref()
    }
    pub fn zeta(&self) -> Option<&Field> {
        self.zeta.as_ref()
    }

    /// `||sigma||_{L^r(X)}` over the truncated domain.
    pub fn norm(&self, r: f64) -> Result<f64> {
        self.values.lp_norm(r)
    }

    pub fn is_real(&self) -> bool {
        self.values.values().iter().all(|v| v.im == 0.0)
    }

    /// `c sigma`, keeping the class and factors.
    pub fn scaled(&self, c: f64) -> Self {
        let s = Complex64::new(c, 0.0);
        SymbolField {
            values: self.values.map(|v| v * s),
            class: self.class,
            chi: self.chi.as_ref().map(|v| v.iter().map(|x| x * s).collect()),
            zeta: self.zeta.clone(),
        }
    }

    pub fn conj(&self) -> Self {
        SymbolField {
            values: self.values.map(|v| v.conj()),
            class: self.class,
            chi: self.chi.as_ref().map(|v| v.iter().map(|x| x.conj()).collect()),
            zeta: self.zeta.as_ref().map(|z| z.conj()),
        }
    }
}

/// The default symbol suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolKind {
    /// Indicator of `{a in [1/2, 2], |x| <= 2}`.
    Indicator,
    /// `exp(-ln(a)^2 / (2 s^2) - |x - x0|^2 / (2 w^2)`.
    GaussianBump,
    /// Log-normal `chi(a)` times a spatial Gaussian `zeta(x)` centred off the axis.
    Separable,
    /// Log-normal `chi(a)` alone.
    ScaleOnly,
}

const LOG_WIDTH: f64 = 0.6;
const SPACE_WIDTH: f64 = 1.5;

fn default_centre(d: usize) -> Vec<f64> {
    let mut c = vec![0.0; d + 1];
    c[0] = 0.5;
    c[d] = 1.0;
    c
}

fn log_normal(a: f64) -> f64 {
    (-(a.ln().powi(2)) / (2.0 * LOG_WIDTH * LOG_WIDTH)).exp()
}

impl SymbolKind {
    pub const ALL: [SymbolKind; 4] = [
        SymbolKind::Indicator,
        SymbolKind::GaussianBump,
        SymbolKind::Separable,
        SymbolKind::ScaleOnly,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SymbolKind::Indicator => "indicator",
            SymbolKind::GaussianBump => "gaussian_bump",
            SymbolKind::Separable => "separable",
            SymbolKind::ScaleOnly => "scale_only",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    pub fn build(&self, grid: &Arc<ScaleGrid>) -> Result<SymbolField> {
        let d = grid.base().d();
        let centre = default_centre(d);
        let gauss = move |x: &[f64]| {
            let r2: f64 = x.iter().zip(&centre).map(|(u, v)| (u - v).powi(2)).sum();
            (-r2 / (2.0 * SPACE_WIDTH * SPACE_WIDTH)).exp()
        };
        let chi: Vec<Complex64> = grid
            .scales()
            .iter()
            .map(|&a| Complex64::new(log_normal(a), 0.0))
            .collect();
        match self {
            SymbolKind::Indicator => SymbolField::from_fn(grid, SymbolClass::L1OfX, |a, x| {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                let inside = (0.5..=2.0).contains(&a) && r2 <= 4.0;
                Complex64::new(if inside { 1.0 } else { 0.0 }, 0.0)
            }),
            SymbolKind::GaussianBump => SymbolField::from_fn(grid, SymbolClass::L1OfX, |a, x| {
                Complex64::new(log_normal(a) * gauss(x), 0.0)
            }),
            SymbolKind::Separable => {
                let zeta = Field::from_real_fn(grid.base(), gauss);
                SymbolField::separable(grid, chi, zeta)
            }
            SymbolKind::ScaleOnly => SymbolField::scale_only(grid, chi),
        }
    }
}

/// All per-scale kernel matrices `K_a(x, y) = phi_{a,x}(y)` of one window, stacked as
/// `J N x N` (scale-major rows).
#[derive(Debug)]
pub struct KernelSet {
    stack: Stack,
    n_nodes: usize,
}

#[derive(Debug)]
enum Stack {
    Real(RMatrix),
    Complex(CMatrix),
}

impl KernelSet {
    /// Materializes every scale of `bank`. Real-even windows are stored as real matrices.
    pub fn new(bank: &WaveletBank) -> Self {
        let plan = bank.plan();
        let n = plan.grid().n_nodes();
        let j = bank.kernels().len();
        let real = bank.window().is_real_even();
        let mut reflected = None;
        let stack = if real {
            let mut m = RMatrix::zeros(j * n, n);
            for (s, k) in bank.kernels().iter().enumerate() {
                let km = k.matrix_with(plan, &mut reflected);
                for (o, v) in m.data_mut()[s * n * n..(s + 1) * n * n].iter_mut().zip(km.data()) {
                    *o = v.re;
                }
            }
            Stack::Real(m)
        } else {
            let mut m = CMatrix::zeros(j * n, n);
            for (s, k) in bank.kernels().iter().enumerate() {
                let km = k.matrix_with(plan, &mut reflected);
                m.data_mut()[s * n * n..(s + 1) * n * n].copy_from_slice(km.data());
            }
            Stack::Complex(m)
        };
        KernelSet {
            stack,
            n_nodes: n,
        }
    }

    pub fn is_real(&self) -> bool {
        matches!(self.stack, Stack::Real(_))
    }

    /// `phi_{a_s, x_k}` sampled on the grid.
    pub fn member(&self, s: usize, k: usize) -> Vec<Complex64> {
        let row = s * self.n_nodes + k;
        match &self.stack {
            Stack::Real(m) => m.row(row).iter().map(|&v| Complex64::new(v, 0.0)).collect(),
            Stack::Complex(m) => m.row(row).to_vec(),
        }
    }

    fn complex(&self) -> CMatrix {
        match &self.stack {
            Stack::Real(m) => m.to_complex(),
            Stack::Complex(m) => m.clone(),
        }
    }
}

/// Everything needed to assemble operators for one window pair on one scale grid.
#[derive(Debug, Clone)]
pub struct Assembler {
    pair: WaveletPair,
    phi_bank: Arc<WaveletBank>,
    psi_bank: Arc<WaveletBank>,
    phi: Arc<KernelSet>,
    psi: Arc<KernelSet>,
}

fn same_window(a: &Window, b: &Window) -> bool {
    matches!((a, b), (Window::LaguerreGaussian { k: i }, Window::LaguerreGaussian { k: j }) if i == j)
}

impl Assembler {
    pub fn new(
        plan: &TransformPlan,
        scales: &Arc<ScaleGrid>,
        pair: WaveletPair,
        switch_factor: f64,
    ) -> Result<Self> {
        let phi_bank = Arc::new(WaveletBank::new(plan, scales, &pair.phi, switch_factor)?);
        let phi = Arc::new(KernelSet::new(&phi_bank));
        let (psi_bank, psi) = if same_window(&pair.phi, &pair.psi) {
            (phi_bank.clone(), phi.clone())
        } else {
            let b = Arc::new(WaveletBank::new(plan, scales, &pair.psi, switch_factor)?);
            let k = Arc::new(KernelSet::new(&b));
            (b, k)
        };
        Ok(Assembler {
            pair,
            phi_bank,
            psi_bank,
            phi,
            psi,
        })
    }

    pub fn pair(&self) -> &WaveletPair {
        &self.pair
    }
    pub fn phi_bank(&self) -> &WaveletBank {
        &self.phi_bank
    }
    pub fn psi_bank(&self) -> &WaveletBank {
        &self.psi_bank
    }
    pub fn phi_kernels(&self) -> &KernelSet {
        &self.phi
    }
    pub fn psi_kernels(&self) -> &KernelSet {
        &self.psi
    }
    pub fn scales(&self) -> &Arc<ScaleGrid> {
        self.phi_bank.scales()
    }

    /// The assembler with the roles of the two windows exchanged.
    pub fn swapped(&self) -> Self {
        Assembler {
            pair: self.pair.swapped(),
            phi_bank: self.psi_bank.clone(),
            psi_bank: self.phi_bank.clone(),
            phi: self.psi.clone(),
            psi: self.phi.clone(),
        }
    }

    /// `R = sum_a K_psi(a)^T diag(c_a) conj(K_phi(a))` with `c_a(x) = w(a, x) sigma(a, x)`.
    pub fn assemble(&self, symbol: &SymbolField) -> Result<LocalizationOperator> {
        let scales = self.scales();
        scales.check_same(symbol.grid())?;
        check_finite(symbol.values().values(), "symbol")?;
        let g = scales.base();
        let n = g.n_nodes();
        let w = g.weights();
        let coef: Vec<Complex64> = (0..scales.n_cells())
            .map(|i| symbol.values().values()[i] * scales.combined_weight(i / n, i % n))
            .collect();
        let kernel = match (&self.psi.stack, &self.phi.stack) {
            (Stack::Real(kp), Stack::Real(kf)) => {
                let part = |f: fn(Complex64) -> f64| -> Option<RMatrix> {
                    let c: Vec<f64> = coef.iter().map(|&v| f(v)).collect();
                    if c.iter().all(|&v| v == 0.0) {
                        return None;
                    }
                    let mut b = kf.clone();
                    par::for_each_chunk(b.data_mut(), n, |row, data| {
                        let s = c[row];
                        for v in data.iter_mut() {
                            *v *= s;
                        }
                    });
                    Some(matmul_real(kp, true, &b, false))
                };
                let re = part(|v| v.re);
                let im = part(|v| v.im);
                Matrix::from_fn(n, n, |y, z| {
                    Complex64::new(
                        re.as_ref().map_or(0.0, |m| m.get(y, z)),
                        im.as_ref().map_or(0.0, |m| m.get(y, z)),
                    )
                })
            }
            _ => {
                let kp = self.psi.complex();
                let mut b = self.phi.complex();
                par::for_each_chunk(b.data_mut(), n, |row, data| {
                    let s = coef[row];
                    for v in data.iter_mut() {
                        *v = v.conj() * s;
                    }
                });
                matmul_complex(&kp, true, &b, false)
            }
        };
        Ok(LocalizationOperator {
            kernel,
            weights: w.to_vec(),
            grid: g.clone(),
            symbol: symbol.clone(),
            pair: self.pair.clone(),
            singular_values: OnceLock::new(),
        })
    }

    /// `L_{psi,phi}(conj sigma)`, the adjoint of `assemble(symbol)`.
    pub fn adjoint(&self, symbol: &SymbolField) -> Result<LocalizationOperator> {
        self.swapped().assemble(&symbol.conj())
    }
}

/// `sum over cells of w sigma Phi_phi(f) conj(Phi_psi(g))`, computed from the wavelet transforms.
pub fn weak_form(
    symbol: &SymbolField,
    phi_bank: &WaveletBank,
    psi_bank: &WaveletBank,
    f: &Field,
    g: &Field,
) -> Result<Complex64> {
    let wf = phi_bank.analyze(f)?;
    let wg = psi_bank.analyze(g)?;
    symbol.grid().check_same(wf.grid())?;
    let sigma = symbol.values().values();
    let weighted = ScaleField::from_values(
        wf.grid(),
        wf.values().iter().zip(sigma).map(|(a, s)| a * s).collect(),
    )?;
    weighted.inner(&wg)
}

/// A realized localization operator.
#[derive(Debug)]
pub struct LocalizationOperator {
    kernel: CMatrix,
    weights: Vec<f64>,
    grid: Arc<BaseGrid>,
    symbol: SymbolField,
    pair: WaveletPair,
    singular_values: OnceLock<Vec<f64>>,
}

impl LocalizationOperator {
    /// `R(y, z)`, rows indexed by `y`.
    pub fn kernel(&self) -> &CMatrix {
        &self.kernel
    }

    /// `R diag(w)`: the matrix acting on samples.
    pub fn matrix(&self) -> CMatrix {
        let w = &self.weights;
        Matrix::from_fn(self.kernel.rows(), self.kernel.cols(), |y, z| self.kernel.get(y, z) * w[z])
    }

    pub fn grid(&self) -> &Arc<BaseGrid> {
        &self.grid
    }
    pub fn symbol(&self) -> &SymbolField {
        &self.symbol
    }
    pub fn pair(&self) -> &WaveletPair {
        &self.pair
    }

    pub fn apply(&self, f: &Field) -> Result<Field> {
        self.grid.check_same(f.grid())?;
        let wf: Vec<Complex64> = f.values().iter().zip(&self.weights).map(|(v, w)| v * w).collect();
        Field::from_values(&self.grid, matvec(&self.kernel, &wf))
    }

    /// Kernel of the adjoint for the weighted pairing, `R^H`.
    pub fn conjugate_transpose(&self) -> CMatrix {
        self.kernel.adjoint()
    }

    /// `W^{1/2} R W^{1/2}`, whose spectral norm is the `L^2` operator norm.
    pub fn symmetrized(&self) -> CMatrix {
        let s: Vec<f64> = self.weights.iter().map(|w| w.sqrt()).collect();
        Matrix::from_fn(self.kernel.rows(), self.kernel.cols(), |y, z| {
            self.kernel.get(y, z) * (s[y] * s[z])
        })
    }

    /// Singular values of the symmetrized matrix, decreasing.
    pub fn singular_value_profile(&self) -> &[f64] {
        self.singular_values.get_or_init(|| {
            let m = self.symmetrized();
            if m.data().iter().all(|v| v.im == 0.0) {
                singular_values_real(&m.real_part())
            } else {
                singular_values_complex(&m)
            }
        })
    }

    /// Induced norm on the weighted `L^p` space. Exact for `p` in `{1, 2, inf}`; otherwise a
    /// lower bound from random Gaussian-class inputs refined by power iteration.
    pub fn measured_norm(&self, p: f64, seed: u64) -> Result<NormEstimate> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidParameter(format!("norm exponent must be >= 1, got {p}")));
        }
        let n = self.kernel.rows();
        let w = &self.weights;
        let value = if p == 1.0 {
            par::max_by(n, |z| (0..n).map(|y| w[y] * self.kernel.get(y, z).norm()).sum())
        } else if p.is_infinite() {
            par::max_by(n, |y| self.kernel.row(y).iter().zip(w).map(|(r, w)| r.norm() * w).sum())
        } else if p == 2.0 {
            self.singular_value_profile().first().copied().unwrap_or(0.0)
        } else {
            return Ok(NormEstimate {
                value: self.norm_lower_bound(p, seed),
                exact: false,
            });
        };
        Ok(NormEstimate { value, exact: true })
    }

    fn norm_lower_bound(&self, p: f64, seed: u64) -> f64 {
        const RANDOM_INPUTS: usize = 200;
        const REFINED: usize = 4;
        const ITERATIONS: usize = 30;
        let g = &self.grid;
        let d = g.d();
        let n = g.n_nodes();
        let q = conjugate_exponent(p);
        // unweighted coordinates u = w^{1/p} f, operator B = W^{1/p} R W^{1/q}
        let wp: Vec<f64> = self.weights.iter().map(|w| w.powf(1.0 / p)).collect();
        let wq: Vec<f64> = self.weights.iter().map(|w| w.powf(1.0 / q)).collect();
        let b = Matrix::from_fn(n, n, |y, z| self.kernel.get(y, z) * (wp[y] * wq[z]));
        let bh = b.adjoint();
        let lp = |v: &[Complex64], e: f64| v.iter().map(|x| x.norm().powf(e)).sum::<f64>().powf(1.0 / e);
        let ratio = |u: &[Complex64]| {
            let den = lp(u, p);
            if den > 0.0 {
                lp(&matvec(&b, u), p) / den
            } else {
                0.0
            }
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (lx, rx) = (g.cart_extent(), g.radial_extent());
        let mut candidates: Vec<(f64, Vec<Complex64>)> = (0..RANDOM_INPUTS)
            .map(|_| {
                let bumps: Vec<(Vec<f64>, f64, Complex64)> = (0..3)
                    .map(|_| {
                        let mut c: Vec<f64> = (0..d).map(|_| rng.gen_range(-0.5 * lx..0.5 * lx)).collect();
                        c.push(rng.gen_range(0.0..0.5 * rx));
                        let s = (rng.gen_range(0.3f64.ln()..2f64.ln())).exp();
                        let amp = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                        (c, s, amp)
                    })
                    .collect();
                let u: Vec<Complex64> = (0..n)
                    .map(|k| {
                        let x = g.node(k);
                        let f: Complex64 = bumps
                            .iter()
                            .map(|(c, s, amp)| {
                                let r2: f64 = x.iter().zip(c).map(|(a, b)| (a - b).powi(2)).sum();
                                amp * (-r2 / (2.0 * s * s)).exp()
                            })
                            .sum();
                        f * wp[k]
                    })
                    .collect();
                (ratio(&u), u)
            })
            .collect();
        candidates.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut best = candidates.first().map_or(0.0, |c| c.0);
        let dual = |v: &[Complex64], e: f64| -> Vec<Complex64> {
            let norm = lp(v, e);
            if norm == 0.0 {
                return vec![ZERO; v.len()];
            }
            v.iter()
                .map(|x| {
                    let m = x.norm();
                    if m == 0.0 {
                        ZERO
                    } else {
                        x / m * (m / norm).powf(e - 1.0)
                    }
                })
                .collect()
        };
        for (_, start) in candidates.into_iter().take(REFINED) {
            let mut u = start;
            for _ in 0..ITERATIONS {
                let y = matvec(&b, &u);
                let z = matvec(&bh, &dual(&y, p));
                let next = dual(&z, q);
                if lp(&next, p) == 0.0 {
                    break;
                }
                u = next;
                best = best.max(ratio(&u));
            }
        }
        best
    }
}

/// A measured operator norm; `exact` is false for lower bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    pub exact: bool,
}

/// The norm inequalities for localization operators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Theorem {
    /// `||phi||_inf ||psi||_1 ||sigma||_1` on `L^1`.
    L1Endpoint,
    /// `||phi||_1 ||psi||_inf ||sigma||_1` on `L^inf`.
    LinfEndpoint,
    /// `||phi||_1^{1/q} ||psi||_1^{1/p} ||phi||_inf^{1/p} ||psi||_inf^{1/q} ||sigma||_1`.
    InterpolatedL1Linf,
    /// `||phi||_q ||psi||_p ||sigma||_1`.
    HolderPq,
    /// `max(||phi||_1 ||psi||_inf, ||phi||_inf ||psi||_1) ||sigma||_1` by the Schur test.
    Schur,
    /// `K1^t K2^{1-t} ||sigma||_{L^r}` for `p` in `[r, r']`.
    LrSymbol(f64),
}

impl Theorem {
    pub fn all() -> Vec<Theorem> {
        vec![
            Theorem::L1Endpoint,
            Theorem::LinfEndpoint,
            Theorem::InterpolatedL1Linf,
            Theorem::HolderPq,
            Theorem::Schur,
            Theorem::LrSymbol(1.0),
            Theorem::LrSymbol(1.5),
            Theorem::LrSymbol(2.0),
        ]
    }

    pub fn id(&self) -> String {
        match self {
            Theorem::L1Endpoint => "l1_endpoint".into(),
            Theorem::LinfEndpoint => "linf_endpoint".into(),
            Theorem::InterpolatedL1Linf => "interpolated_l1_linf".into(),
            Theorem::HolderPq => "holder_pq".into(),
            Theorem::Schur => "schur".into(),
            Theorem::LrSymbol(r) => format!("lr_symbol_r{r}"),
        }
    }

    /// The right-hand side in words.
    pub fn anchor(&self) -> &'static str {
        match self {
            Theorem::L1Endpoint => "||phi||_inf ||psi||_1 ||sigma||_L1(X)",
            Theorem::LinfEndpoint => "||phi||_1 ||psi||_inf ||sigma||_L1(X)",
            Theorem::InterpolatedL1Linf => {
                "||phi||_1^(1/q) ||psi||_1^(1/p) ||phi||_inf^(1/p) ||psi||_inf^(1/q) ||sigma||_L1(X)"
            }
            Theorem::HolderPq => "||phi||_q ||psi||_p ||sigma||_L1(X)",
            Theorem::Schur => "max(||phi||_1 ||psi||_inf, ||phi||_inf ||psi||_1) ||sigma||_L1(X)",
            Theorem::LrSymbol(_) => "K1^t K2^(1-t) ||sigma||_Lr(X)",
        }
    }

    /// Whether the inequality covers `L^p`.
    pub fn covers(&self, p: f64) -> bool {
        match self {
            Theorem::L1Endpoint => p == 1.0,
            Theorem::LinfEndpoint => p.is_infinite(),
            Theorem::LrSymbol(r) => {
                let rp = conjugate_exponent(*r);
                p >= *r && p <= rp
            }
            _ => p >= 1.0,
        }
    }
}

/// Window norms and constants entering the bounds.
#[derive(Debug, Clone)]
pub struct BoundInputs {
    grid: Arc<BaseGrid>,
    phi: Window,
    psi: Window,
    c_phi: f64,
    c_psi: f64,
    phi_norms: [f64; 3],
    psi_norms: [f64; 3],
}

impl BoundInputs {
    pub fn new(grid: &Arc<BaseGrid>, pair: &WaveletPair) -> Result<Self> {
        let norms = |w: &Window| -> Result<[f64; 3]> {
            Ok([w.norm(grid, 1.0)?, w.norm(grid, 2.0)?, w.norm(grid, f64::INFINITY)?])
        };
        Ok(BoundInputs {
            grid: grid.clone(),
            phi: pair.phi.clone(),
            psi: pair.psi.clone(),
            c_phi: pair.c_phi,
            c_psi: pair.c_psi,
            phi_norms: norms(&pair.phi)?,
            psi_norms: norms(&pair.psi)?,
        })
    }

    /// `(||phi||_1, ||phi||_2, ||phi||_inf)`.
    pub fn phi_norms(&self) -> [f64; 3] {
        self.phi_norms
    }
    pub fn psi_norms(&self) -> [f64; 3] {
        self.psi_norms
    }

    fn norm(&self, which: &Window, cached: &[f64; 3], p: f64) -> Result<f64> {
        if p == 1.0 {
            Ok(cached[0])
        } else if p == 2.0 {
            Ok(cached[1])
        } else if p.is_infinite() {
            Ok(cached[2])
        } else {
            which.norm(&self.grid, p)
        }
    }

    /// The right-hand side of `theorem` on `L^p` for `symbol`.
    pub fn bound(&self, theorem: Theorem, symbol: &SymbolField, p: f64) -> Result<f64> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidParameter(format!("norm exponent must be >= 1, got {p}")));
        }
        if !theorem.covers(p) {
            return Err(Error::NoApplicableBound(format!("{} does not cover p = {p}", theorem.id())));
        }
        let [f1, f2, finf] = self.phi_norms;
        let [g1, g2, ginf] = self.psi_norms;
        let q = conjugate_exponent(p);
        let inv = |e: f64| if e.is_infinite() { 0.0 } else { 1.0 / e };
        let value = match theorem {
            Theorem::L1Endpoint => finf * g1 * symbol.norm(1.0)?,
            Theorem::LinfEndpoint => f1 * ginf * symbol.norm(1.0)?,
            Theorem::InterpolatedL1Linf => {
                f1.powf(inv(q)) * g1.powf(inv(p)) * finf.powf(inv(p)) * ginf.powf(inv(q)) * symbol.norm(1.0)?
            }
            Theorem::HolderPq => {
                self.norm(&self.phi, &self.phi_norms, q)? * self.norm(&self.psi, &self.psi_norms, p)? * symbol.norm(1.0)?
            }
            Theorem::Schur => (f1 * ginf).max(finf * g1) * symbol.norm(1.0)?,
            Theorem::LrSymbol(r) => {
                let rp = conjugate_exponent(r);
                let l2 = (self.c_phi * self.c_psi).sqrt() * f2 * g2;
                let e1 = 2.0 / r - 1.0;
                let e2 = inv(rp);
                let k1 = (finf * g1).powf(e1) * l2.powf(e2);
                let k2 = (f1 * ginf).powf(e1) * l2.powf(e2);
                let span = 1.0 / r - inv(rp);
                let t = if span > 0.0 { (inv(p) - inv(rp)) / span } else { 1.0 };
                k1.powf(t) * k2.powf(1.0 - t) * symbol.norm(r)?
            }
        };
        Ok(value)
    }

    /// Every inequality covering `L^p`, in declaration order.
    pub fn applicable_bounds(&self, symbol: &SymbolField, p: f64) -> Result<Vec<(Theorem, f64)>> {
        Theorem::all()
            .into_iter()
            .filter(|t| t.covers(p))
            .map(|t| Ok((t, self.bound(t, symbol, p)?)))
            .collect()
    }

    /// The smallest applicable right-hand side and the inequality producing it.
    pub fn theoretical_bound(&self, symbol: &SymbolField, p: f64) -> Result<(Theorem, f64)> {
        self.applicable_bounds(symbol, p)?
            .into_iter()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .ok_or_else(|| Error::NoApplicableBound(format!("p = {p}")))
    }
}

/// `m(xi) = int chi(a) conj(F_W phi(a xi)) F_W psi(a xi) da / a` on the frequency nodes.
pub fn multiplier_symbol(
    plan: &TransformPlan,
    scales: &ScaleGrid,
    phi: &Window,
    psi: &Window,
    chi: &[Complex64],
) -> Result<Field> {
    let g = plan.grid();
    g.check_same(scales.base())?;
    if chi.len() != scales.len() {
        return Err(Error::GridMismatch("scale factor length differs from scale count"));
    }
    let mut m = vec![ZERO; g.n_nodes()];
    for (s, (&a, &w)) in scales.scales().iter().zip(scales.scale_weights()).enumerate() {
        if chi[s] == ZERO {
            continue;
        }
        let pf = phi.dilated_profile(plan, a)?;
        let pp = psi.dilated_profile(plan, a)?;
        for ((o, u), v) in m.iter_mut().zip(&pf).zip(&pp) {
            *o += chi[s] * u.conj() * v * w;
        }
    }
    Field::from_values(g, m)
}

/// `T_m f = F_W^{-1}(m F_W f)`.
pub fn apply_multiplier(plan: &TransformPlan, m: &Field, f: &Field) -> Result<Field> {
    plan.inverse(&plan.forward(f)?.mul(m)?)
}

/// `K(xi, eta) = int chi(a) conj(F_W phi(a xi)) F_W psi(a eta) da / a`.
pub fn paracommutator_kernel(
    plan: &TransformPlan,
    scales: &ScaleGrid,
    phi: &Window,
    psi: &Window,
    chi: &[Complex64],
    xi: &[f64],
    eta: &[f64],
) -> Result<Complex64> {
    if chi.len() != scales.len() {
        return Err(Error::GridMismatch("scale factor length differs from scale count"));
    }
    let mut s = ZERO;
    for (i, (&a, &w)) in scales.scales().iter().zip(scales.scale_weights()).enumerate() {
        let ax: Vec<f64> = xi.iter().map(|v| a * v).collect();
        let ae: Vec<f64> = eta.iter().map(|v| a * v).collect();
        s += chi[i] * phi.profile(plan, &ax)?.conj() * psi.profile(plan, &ae)? * w;
    }
    Ok(s)
}

/// `int int K(xi, eta) G(xi, eta) F_W f(xi) conj(F_W g(eta)) dmu(eta) dmu(xi)` for the symbol
/// `chi(a) zeta(x)`, where `G(xi, eta)` is the translate of `F_W zeta` averaging
/// `F_W zeta(xi' - eta', rho(xi_{d+1}, eta_{d+1}, theta))`. With the translation acting on
/// `x' + y'` this equals `tau_{eta_check}(F_W zeta)(xi)`, `eta_check = (-eta', eta_{d+1})`.
#[allow(clippy::too_many_arguments)]
pub fn paracommutator_weak_form(
    plan: &TransformPlan,
    translator: &Translator,
    scales: &ScaleGrid,
    phi: &Window,
    psi: &Window,
    chi: &[Complex64],
    zeta: &Field,
    f: &Field,
    g: &Field,
) -> Result<Complex64> {
    let grid = plan.grid();
    grid.check_same(translator.grid())?;
    grid.check_same(scales.base())?;
    if chi.len() != scales.len() {
        return Err(Error::GridMismatch("scale factor length differs from scale count"));
    }
    let n = grid.n_nodes();
    let d = grid.d();
    let w = grid.weights();
    let j = scales.len();
    // K = A B with A[xi][s] = w_s chi_s conj(F phi(a_s xi)) and B[s][eta] = F psi(a_s eta)
    let mut a_mat = CMatrix::zeros(n, j);
    let mut b_mat = CMatrix::zeros(j, n);
    for (s, (&a, &ws)) in scales.scales().iter().zip(scales.scale_weights()).enumerate() {
        let pf = phi.dilated_profile(plan, a)?;
        let pp = psi.dilated_profile(plan, a)?;
        for k in 0..n {
            a_mat.set(k, s, pf[k].conj() * chi[s] * ws);
            b_mat.set(s, k, pp[k]);
        }
    }
    let kernel = matmul_complex(&a_mat, false, &b_mat, false);
    let fz = plan.forward(zeta)?;
    let ff = plan.forward(f)?;
    let fg = plan.forward(g)?;
    let terms = par::map_collect(n, |eta| -> Result<Complex64> {
        let mut point = grid.node(eta);
        for v in &mut point[..d] {
            *v = -*v;
        }
        let t = translator.translate(&point, &fz)?;
        let mut s = ZERO;
        for xi in 0..n {
            s += kernel.get(xi, eta) * t.values()[xi] * ff.values()[xi] * w[xi];
        }
        Ok(s * fg.values()[eta].conj() * w[eta])
    });
    let mut total = ZERO;
    for t in terms {
        total += t?;
    }
    Ok(total)
}

/// `p(f, g)(x) = int (Theta_a * f)(x) conj((Upsilon_a * g)(x)) da / a` with
/// `Theta = conj(phi(-.))`, `Upsilon = conj(psi(-.))`.
///
/// Uses `(Theta_a * f)(x) = a^{-D/2} Phi_phi(f)(a, x_check)`, so the paraproduct is the reflected
/// scale sum of the two wavelet transforms.
pub fn paraproduct(phi_bank: &WaveletBank, psi_bank: &WaveletBank, f: &Field, g: &Field) -> Result<Field> {
    let wf = phi_bank.analyze(f)?;
    let wg = psi_bank.analyze(g)?;
    wf.grid().check_same(wg.grid())?;
    let scales = wf.grid();
    let base = scales.base();
    let mut out = vec![ZERO; base.n_nodes()];
    for (s, &sf) in scales.scale_factors().iter().enumerate() {
        for ((o, u), v) in out.iter_mut().zip(wf.at_scale(s)).zip(wg.at_scale(s)) {
            *o += u * v.conj() * sf;
        }
    }
    Ok(reflect(&Field::from_values(base, out)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavelet::DEFAULT_SWITCH_FACTOR;

    fn setup(alpha: f64) -> (TransformPlan, Arc<ScaleGrid>, Assembler) {
        let g = BaseGrid::new(alpha, 1, 5.0, 13, 5.0, 10).unwrap();
        let plan = TransformPlan::new(&g);
        let scales = ScaleGrid::new(&g, 0.25, 4.0, 9).unwrap();
        let pair = WaveletPair::new(&plan, &scales, Window::laguerre_gaussian(1), Window::laguerre_gaussian(2)).unwrap();
        let asm = Assembler::new(&plan, &scales, pair, DEFAULT_SWITCH_FACTOR).unwrap();
        (plan, scales, asm)
    }

    #[test]
    fn zero_symbol_gives_zero_operator() {
        let (_, scales, asm) = setup(0.5);
        let sym = SymbolField::new(ScaleField::zeros(&scales), SymbolClass::L1OfX).unwrap();
        let op = asm.assemble(&sym).unwrap();
        assert!(op.kernel().data().iter().all(|v| *v == ZERO));
        assert_eq!(op.measured_norm(1.0, 1).unwrap().value, 0.0);
        assert_eq!(op.measured_norm(2.0, 1).unwrap().value, 0.0);
    }

    #[test]
    fn single_cell_is_rank_one() {
        let (_, scales, asm) = setup(0.5);
        let (s, k) = (4, 37);
        let sym = SymbolField::single_cell(&scales, s, k).unwrap();
        let op = asm.assemble(&sym).unwrap();
        let phi = asm.phi_kernels().member(s, k);
        let psi = asm.psi_kernels().member(s, k);
        let cw = scales.combined_weight(s, k);
        let err = (0..phi.len())
            .flat_map(|y| (0..phi.len()).map(move |z| (y, z)))
            .map(|(y, z)| (op.kernel().get(y, z) - psi[y] * phi[z].conj() * cw).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-14);
        let sv = op.singular_value_profile();
        assert!(sv[1] <= 1e-10 * sv[0]);
    }

    #[test]
    fn separable_values_are_products() {
        let (_, scales, _) = setup(0.5);
        let sym = SymbolKind::Separable.build(&scales).unwrap();
        let n = scales.base().n_nodes();
        let (chi, zeta) = (sym.chi().unwrap(), sym.zeta().unwrap());
        for (i, v) in sym.values().values().iter().enumerate() {
            assert!((v - chi[i / n] * zeta.values()[i % n]).norm() <= 1e-12);
        }
    }

    #[test]
    fn non_finite_symbols_are_rejected() {
        let (_, scales, _) = setup(0.5);
        let mut v = ScaleField::zeros(&scales);
        v.values_mut()[3] = Complex64::new(f64::NAN, 0.0);
        assert!(SymbolField::new(v, SymbolClass::L1OfX).is_err());
        assert!(SymbolField::new(ScaleField::zeros(&scales), SymbolClass::LrOfX(3.0)).is_err());
    }

    #[test]
    fn theorem_coverage() {
        assert!(Theorem::LrSymbol(1.5).covers(2.5));
        assert!(!Theorem::LrSymbol(1.5).covers(3.5));
        assert!(Theorem::LrSymbol(2.0).covers(2.0));
        assert!(!Theorem::LrSymbol(2.0).covers(1.5));
        assert!(Theorem::LrSymbol(1.0).covers(f64::INFINITY));
        assert!(!Theorem::L1Endpoint.covers(2.0));
    }
}
