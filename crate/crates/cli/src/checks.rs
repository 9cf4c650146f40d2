//! The verification suite: every identity and inequality as a report row.

use std::path::Path;
use std::sync::Arc;

use anyhow::Result;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use weinstein_core::grid::{BaseGrid, Field, ScaleGrid};
use weinstein_core::localization::{
    apply_multiplier, multiplier_symbol, paracommutator_weak_form, paraproduct, weak_form, Assembler, BoundInputs,
    LocalizationOperator, SymbolField, SymbolKind,
};
use weinstein_core::samples::{centred_gaussian, mixture, random_mixture, random_terms};
use weinstein_core::specfun::{homogeneous_dim, weinstein_kernel};
use weinstein_core::transform::TransformPlan;
use weinstein_core::translation::{check_translate_fourier, convolve_spectral, Translator};
use weinstein_core::wavelet::{
    admissibility_constant, check_two_wavelet_parseval, invert_cwt, laguerre_gaussian_constant, WaveletBank,
    WaveletPair, Window, DEFAULT_SWITCH_FACTOR,
};

use crate::config::{GridParams, RunConfig, Tolerances, WindowSpec};
use crate::output::{fmt_f64, BoundRow};

/// Errors at or below this level count as converged when forming refinement ratios.
pub const ROUNDOFF_FLOOR: f64 = 1e-12;

/// Families of checks, in report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Group {
    Kernel,
    FixedPoint,
    Plancherel,
    Translation,
    Convolution,
    Admissibility,
    WaveletParseval,
    ExactIdentities,
    NormBounds,
    Examples,
    Compactness,
    Convergence,
    Resources,
}

impl Group {
    pub fn title(&self) -> &'static str {
        match self {
            Group::Kernel => "kernel properties",
            Group::FixedPoint => "Gaussian fixed point and round trip",
            Group::Plancherel => "Plancherel and Parseval",
            Group::Translation => "generalized translation",
            Group::Convolution => "convolution",
            Group::Admissibility => "admissibility constant",
            Group::WaveletParseval => "two-wavelet Parseval and inversion",
            Group::ExactIdentities => "localization operator exact identities",
            Group::NormBounds => "norm-bound dominance",
            Group::Examples => "multiplier, paraproduct, paracommutator",
            Group::Compactness => "singular-value decay",
            Group::Convergence => "convergence under refinement",
            Group::Resources => "resource limits",
        }
    }
}

/// One report row.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub group: Group,
    pub id: String,
    pub anchor: String,
    pub lhs: f64,
    pub rhs: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn new(group: Group, id: String, anchor: &str, lhs: f64, rhs: f64, tolerance: f64, pass: bool) -> Self {
        Check {
            group,
            id,
            anchor: anchor.to_string(),
            lhs,
            rhs,
            tolerance,
            pass,
        }
    }

    /// `|lhs - rhs| <= tol`.
    pub fn abs(group: Group, id: String, anchor: &str, lhs: f64, rhs: f64, tol: f64) -> Self {
        let pass = (lhs - rhs).abs() <= tol;
        Self::new(group, id, anchor, lhs, rhs, tol, pass)
    }

    /// `|lhs - rhs| <= tol |rhs|`.
    pub fn rel(group: Group, id: String, anchor: &str, lhs: f64, rhs: f64, tol: f64) -> Self {
        let pass = (lhs - rhs).abs() <= tol * rhs.abs();
        Self::new(group, id, anchor, lhs, rhs, tol, pass)
    }

    /// `lhs <= (1 + slack) rhs`.
    pub fn at_most(group: Group, id: String, anchor: &str, lhs: f64, rhs: f64, slack: f64) -> Self {
        let pass = lhs <= (1.0 + slack) * rhs;
        Self::new(group, id, anchor, lhs, rhs, slack, pass)
    }

    /// An error-reduction ratio `coarse / fine >= target`; a coarse error already at roundoff
    /// counts as converged.
    pub fn ratio(group: Group, id: String, anchor: &str, coarse: f64, fine: f64, target: f64) -> Self {
        let ratio = if fine > 0.0 { coarse / fine } else { f64::INFINITY };
        let pass = ratio >= target || coarse <= ROUNDOFF_FLOOR;
        Self::new(group, id, anchor, ratio, target, ROUNDOFF_FLOOR, pass)
    }

    /// A flagged row recording that part of a run was skipped.
    pub fn flag(group: Group, id: String, anchor: &str) -> Self {
        Self::new(group, id, anchor, f64::NAN, f64::NAN, 0.0, false)
    }
}

/// Columns `check_id, paper_anchor, lhs, rhs, tolerance, pass`.
pub fn write_report(path: &Path, checks: &[Check]) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["check_id", "paper_anchor", "lhs", "rhs", "tolerance", "pass"])?;
    for c in checks {
        w.write_record([
            c.id.clone(),
            c.anchor.clone(),
            fmt_f64(c.lhs),
            fmt_f64(c.rhs),
            fmt_f64(c.tolerance),
            c.pass.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// A base grid with its transform plan and translation operator.
pub struct Level {
    pub grid: Arc<BaseGrid>,
    pub plan: TransformPlan,
    pub translator: Translator,
}

impl Level {
    pub fn new(alpha: f64, d: usize, p: GridParams) -> Result<Self> {
        let grid = BaseGrid::new(alpha, d, p.cart_extent, p.n, p.radial_extent, p.m)?;
        Ok(Level {
            plan: TransformPlan::new(&grid),
            translator: Translator::with_default_rule(&grid),
            grid,
        })
    }
}

/// The grid with half the spacing on every axis.
pub fn doubled(p: GridParams) -> GridParams {
    GridParams {
        n: 2 * (p.n - 1) + 1,
        m: 2 * p.m,
        ..p
    }
}

/// Independent stream per check family and order, so adding rows elsewhere never shifts them.
fn rng_for(seed: u64, group: Group, alpha_index: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ ((group as u64 + 1) << 40) ^ ((alpha_index as u64 + 1) << 20))
}

pub fn window(spec: &WindowSpec, grid: &Arc<BaseGrid>) -> Result<Window> {
    Ok(match spec {
        WindowSpec::LaguerreGaussian(k) => Window::laguerre_gaussian(*k),
        WindowSpec::Csv(p) => Window::sampled(crate::output::read_field(p, grid)?),
    })
}

fn tag(alpha: f64) -> String {
    format!("alpha={alpha}")
}

fn p_tag(p: f64) -> String {
    if p.is_infinite() {
        "inf".into()
    } else {
        p.to_string()
    }
}

fn kernel_checks(cfg: &RunConfig, alpha: f64, rng: &mut ChaCha8Rng) -> Vec<Check> {
    let d = cfg.d;
    let mut worst = [0.0f64; 4];
    for _ in 0..cfg.kernel_samples {
        let point = |rng: &mut ChaCha8Rng| -> Vec<f64> {
            let mut v: Vec<f64> = (0..d).map(|_| rng.gen_range(-10.0..10.0)).collect();
            v.push(rng.gen_range(0.0..10.0));
            v
        };
        let (lambda, x) = (point(rng), point(rng));
        let k = weinstein_kernel(alpha, &lambda, &x);
        let zero = vec![0.0; d + 1];
        let mut reflected = lambda.clone();
        for v in &mut reflected[..d] {
            *v = -*v;
        }
        worst[0] = worst[0].max(k.norm() - 1.0);
        worst[1] = worst[1].max((weinstein_kernel(alpha, &lambda, &zero) - 1.0).norm());
        worst[2] = worst[2].max((k - weinstein_kernel(alpha, &x, &lambda)).norm());
        worst[3] = worst[3].max((weinstein_kernel(alpha, &reflected, &x) - k.conj()).norm());
    }
    let t = tag(alpha);
    let tol = cfg.tol.kernel;
    vec![
        Check::at_most(Group::Kernel, format!("kernel_bound[{t}]"), "|Lambda(lambda, x)| <= 1", 1.0 + worst[0], 1.0, tol),
        Check::abs(Group::Kernel, format!("kernel_origin[{t}]"), "Lambda(lambda, 0) = 1", worst[1], 0.0, tol),
        Check::abs(Group::Kernel, format!("kernel_symmetry[{t}]"), "Lambda(lambda, x) = Lambda(x, lambda)", worst[2], 0.0, tol),
        Check::abs(
            Group::Kernel,
            format!("kernel_reflection[{t}]"),
            "Lambda((-lambda', lambda_r), x) = conj Lambda(lambda, x)",
            worst[3],
            0.0,
            tol,
        ),
    ]
}

fn fixed_point_checks(cfg: &RunConfig, lvl: &Level) -> Result<Vec<Check>> {
    let t = tag(lvl.grid.alpha());
    let f = centred_gaussian(&lvl.grid, 1.0);
    let ff = lvl.plan.forward(&f)?;
    let back = lvl.plan.inverse(&ff)?;
    let tol = cfg.tol.fixed_point;
    Ok(vec![
        Check::abs(
            Group::FixedPoint,
            format!("gaussian_fixed_point[{t}]"),
            "F_W exp(-|x|^2/2) = exp(-|xi|^2/2)",
            ff.rel_l2_error(&f)?,
            0.0,
            tol,
        ),
        Check::abs(Group::FixedPoint, format!("round_trip[{t}]"), "F_W^-1 F_W f = f", back.rel_l2_error(&f)?, 0.0, tol),
    ])
}

fn plancherel_error(plan: &TransformPlan, f: &Field) -> Result<f64> {
    let (lhs, rhs) = plan.check_plancherel(f)?;
    Ok((lhs - rhs).abs() / rhs)
}

fn plancherel_checks(cfg: &RunConfig, lvl: &Level, fine: Option<&Level>, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let t = tag(lvl.grid.alpha());
    let tol = cfg.tol.plancherel;
    let terms: Vec<_> = (0..cfg.mixtures).map(|_| random_terms(&lvl.grid, rng, 3)).collect();
    let fs: Vec<Field> = terms.iter().map(|tm| mixture(&lvl.grid, tm)).collect();
    let mut out = Vec::new();
    for (i, f) in fs.iter().enumerate() {
        let (lhs, rhs) = lvl.plan.check_plancherel(f)?;
        out.push(Check::rel(Group::Plancherel, format!("plancherel[{t},i={i}]"), "||F_W f||_2 = ||f||_2", lhs, rhs, tol));
    }
    for i in 0..fs.len() {
        let (f, g) = (&fs[i], &fs[(i + 1) % fs.len()]);
        let (lhs, rhs) = lvl.plan.check_parseval(f, g)?;
        let gap = (lhs - rhs).norm() / (f.lp_norm(2.0)? * g.lp_norm(2.0)?);
        out.push(Check::abs(Group::Plancherel, format!("parseval[{t},i={i}]"), "<F_W f, F_W g> = <f, g>", gap, 0.0, tol));
    }
    if let Some(fine) = fine {
        let (mut coarse_err, mut fine_err) = (0.0f64, 0.0f64);
        for tm in terms.iter().take(3) {
            coarse_err = coarse_err.max(plancherel_error(&lvl.plan, &mixture(&lvl.grid, tm))?);
            fine_err = fine_err.max(plancherel_error(&fine.plan, &mixture(&fine.grid, tm))?);
        }
        out.push(Check::ratio(
            Group::Plancherel,
            format!("plancherel_refinement[{t}]"),
            "e(h) / e(h/2) >= 3 for ||F_W f||_2 = ||f||_2",
            coarse_err,
            fine_err,
            cfg.tol.refinement,
        ));
    }
    Ok(out)
}

/// A random node whose coordinates all lie within `reach`.
fn inner_node(g: &BaseGrid, rng: &mut ChaCha8Rng, reach: f64) -> Vec<f64> {
    loop {
        let x = g.node(rng.gen_range(0..g.n_nodes()));
        if x.iter().all(|v| v.abs() <= reach) {
            return x;
        }
    }
}

fn translation_checks(cfg: &RunConfig, lvl: &Level, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let g = &lvl.grid;
    let d = g.d();
    let t = tag(g.alpha());
    let mut out = Vec::new();
    let gauss = centred_gaussian(g, 1.0);
    let t0 = lvl.translator.translate(&vec![0.0; d + 1], &gauss)?;
    out.push(Check::abs(Group::Translation, format!("translation_zero[{t}]"), "tau_0 f = f", t0.max_abs_diff(&gauss)?, 0.0, 0.0));

    let one = Field::from_real_fn(g, |_| 1.0);
    let mass = gauss.inner(&one)?.re;
    // translates must stay inside the box for the mass to be kept
    let reach = 0.25 * g.cart_extent().min(g.radial_extent());
    for i in 0..4 {
        let x = inner_node(g, rng, reach);
        let moved = lvl.translator.translate(&x, &gauss)?.inner(&one)?.re;
        out.push(Check::rel(Group::Translation, format!("translation_mass[{t},i={i}]"), "int tau_x f dmu = int f dmu", moved, mass, cfg.tol.mass));
    }
    for i in 0..3 {
        let f = random_mixture(g, rng);
        let mut x: Vec<f64> = (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect();
        x.push(rng.gen_range(0.0..2.5));
        let moved = lvl.translator.translate(&x, &f)?;
        for p in [1.0, 2.0, f64::INFINITY] {
            out.push(Check::at_most(
                Group::Translation,
                format!("translation_contraction[{t},i={i},p={}]", p_tag(p)),
                "||tau_x f||_p <= ||f||_p",
                moved.lp_norm(p)?,
                f.lp_norm(p)?,
                cfg.tol.slack,
            ));
        }
        let (lhs, rhs) = check_translate_fourier(&lvl.plan, &lvl.translator, &x, &f)?;
        out.push(Check::abs(
            Group::Translation,
            format!("translation_transform[{t},i={i}]"),
            "F_W(tau_x f) = Lambda((-x', x_r), .) F_W f",
            lhs.rel_l2_error(&rhs)?,
            0.0,
            cfg.tol.translation,
        ));
    }
    Ok(out)
}

fn convolution_checks(cfg: &RunConfig, lvl: &Level, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let g = &lvl.grid;
    let d = g.d();
    let t = tag(g.alpha());
    let tol = cfg.tol.convolution;
    let f = random_mixture(g, rng);
    let h = random_mixture(g, rng);
    let fh = lvl.translator.convolve(&f, &h)?;
    let product = lvl.plan.forward(&f)?.mul(&lvl.plan.forward(&h)?)?;
    let mut out = vec![Check::abs(
        Group::Convolution,
        format!("convolution_theorem[{t}]"),
        "F_W(f * g) = F_W f F_W g",
        lvl.plan.forward(&fh)?.rel_l2_error(&product)?,
        0.0,
        tol,
    )];
    // the spectral route inverts a transform: keep both factors narrow
    let a = centred_gaussian(g, 0.7);
    let b = Field::from_real_fn(g, |x| (1.0 + 0.3 * x[0]) * (-x.iter().map(|v| v * v).sum::<f64>() / 1.445).exp());
    let direct = lvl.translator.convolve(&a, &b)?;
    let spectral = convolve_spectral(&lvl.plan, &a, &b)?;
    out.push(Check::abs(
        Group::Convolution,
        format!("convolution_pipelines[{t}]"),
        "tau-convolution = F_W^-1(F_W f F_W g)",
        direct.rel_l2_error(&spectral)?,
        0.0,
        tol,
    ));
    // closed form for two centred Gaussians
    let (s, w) = (0.8f64, 0.85f64);
    let u = (s * s + w * w).sqrt();
    let exact = centred_gaussian(g, u).scale(Complex64::new((s * w / u).powf(homogeneous_dim(g.alpha(), d)), 0.0));
    let conv = lvl.translator.convolve(&centred_gaussian(g, s), &centred_gaussian(g, w))?;
    out.push(Check::abs(
        Group::Convolution,
        format!("convolution_gaussians[{t}]"),
        "G_s * G_t = (st/u)^D G_u, u^2 = s^2 + t^2",
        conv.rel_l2_error(&exact)?,
        0.0,
        tol,
    ));
    for (p, q, r) in [(1.0, 1.0, 1.0), (1.0, 2.0, 2.0), (2.0, 2.0, f64::INFINITY)] {
        out.push(Check::at_most(
            Group::Convolution,
            format!("young[{t},p={},q={},r={}]", p_tag(p), p_tag(q), p_tag(r)),
            "||f * g||_r <= ||f||_p ||g||_q",
            fh.lp_norm(r)?,
            f.lp_norm(p)? * h.lp_norm(q)?,
            cfg.tol.slack,
        ));
    }
    Ok(out)
}

/// Every distinct window of the verified pairs plus the configured `phi` and `psi`.
fn verified_windows(cfg: &RunConfig) -> Vec<WindowSpec> {
    let mut out: Vec<WindowSpec> = Vec::new();
    let lg = cfg.pairs.iter().flat_map(|&(a, b)| [a, b]).map(WindowSpec::LaguerreGaussian);
    for w in lg.chain([cfg.phi.clone(), cfg.psi.clone()]) {
        if !out.contains(&w) {
            out.push(w);
        }
    }
    out
}

fn admissibility_checks(cfg: &RunConfig, lvl: &Level, scales: &ScaleGrid) -> Result<Vec<Check>> {
    let t = tag(lvl.grid.alpha());
    let mut out = Vec::new();
    for spec in verified_windows(cfg) {
        let w = window(&spec, &lvl.grid)?;
        let (c, spread) = admissibility_constant(&lvl.plan, scales, &w)?;
        if let WindowSpec::LaguerreGaussian(k) = spec {
            out.push(Check::abs(
                Group::Admissibility,
                format!("admissibility[{t},window={spec}]"),
                "C_phi = int |F_W phi(a xi)|^2 da/a = Gamma(2k)/2",
                c,
                laguerre_gaussian_constant(k, k),
                cfg.tol.admissibility,
            ));
        }
        out.push(Check::abs(
            Group::Admissibility,
            format!("admissibility_spread[{t},window={spec}]"),
            "int |F_W phi(a xi)|^2 da/a independent of xi",
            spread,
            0.0,
            cfg.tol.spread,
        ));
    }
    Ok(out)
}

/// `(Parseval relative gap, reconstruction relative L^2 error)` for the centred Gaussian.
fn wavelet_errors(cfg: &RunConfig, lvl: &Level) -> Result<(f64, f64, f64, f64)> {
    let scales = ScaleGrid::new(&lvl.grid, cfg.a_min, cfg.a_max, cfg.scales)?;
    let (phi, psi) = (window(&cfg.phi, &lvl.grid)?, window(&cfg.psi, &lvl.grid)?);
    let pair = WaveletPair::new(&lvl.plan, &scales, phi, psi)?;
    let pb = WaveletBank::new(&lvl.plan, &scales, &pair.phi, DEFAULT_SWITCH_FACTOR)?;
    let qb = WaveletBank::new(&lvl.plan, &scales, &pair.psi, DEFAULT_SWITCH_FACTOR)?;
    let f = centred_gaussian(&lvl.grid, 1.0);
    let (lhs, rhs) = check_two_wavelet_parseval(&pair, &pb, &qb, &f, &f)?;
    let rec = invert_cwt(&pair, &qb, &pb.analyze(&f)?)?;
    Ok((lhs.re, rhs.re, (lhs - rhs).norm() / rhs.norm(), rec.rel_l2_error(&f)?))
}

fn wavelet_checks(cfg: &RunConfig, lvl: &Level, fine: Option<&Level>) -> Result<Vec<Check>> {
    let t = tag(lvl.grid.alpha());
    let tol = cfg.tol.wavelet;
    let (lhs, rhs, gap, rec) = wavelet_errors(cfg, lvl)?;
    let mut out = vec![
        Check::rel(
            Group::WaveletParseval,
            format!("wavelet_parseval[{t}]"),
            "int_X Phi_phi f conj Phi_psi g dmu = C_phi,psi <f, g>",
            lhs,
            rhs,
            tol,
        ),
        Check::abs(
            Group::WaveletParseval,
            format!("wavelet_reconstruction[{t}]"),
            "f = (1/C_phi,psi) int_X Phi_phi f(a, x) psi_{a,x} dmu(a, x)",
            rec,
            0.0,
            tol,
        ),
    ];
    let sampled = matches!(cfg.phi, WindowSpec::Csv(_)) || matches!(cfg.psi, WindowSpec::Csv(_));
    if let (Some(fine), false) = (fine, sampled) {
        let (_, _, gap2, rec2) = wavelet_errors(cfg, fine)?;
        out.push(Check::ratio(
            Group::WaveletParseval,
            format!("wavelet_parseval_refinement[{t}]"),
            "e(h) / e(h/2) >= 3 for the two-wavelet Parseval gap",
            gap,
            gap2,
            cfg.tol.refinement,
        ));
        out.push(Check::ratio(
            Group::WaveletParseval,
            format!("wavelet_reconstruction_refinement[{t}]"),
            "e(h) / e(h/2) >= 3 for the reconstruction error",
            rec,
            rec2,
            cfg.tol.refinement,
        ));
    }
    Ok(out)
}

/// A Gaussian centred at `(0.3, 0, .., 1)` and a modulated one centred at `(-0.5, 0, .., 0.7)`.
pub fn operator_test_pair(g: &Arc<BaseGrid>) -> (Field, Field) {
    let d = g.d();
    let dist2 = |x: &[f64], c0: f64, cr: f64| -> f64 {
        (0..d).map(|i| (x[i] - if i == 0 { c0 } else { 0.0 }).powi(2)).sum::<f64>() + (x[d] - cr).powi(2)
    };
    let f = Field::from_real_fn(g, |x| (-dist2(x, 0.3, 1.0) / 2.0).exp());
    let h = Field::from_fn(g, |x| Complex64::from_polar((-dist2(x, -0.5, 0.7) / 1.28).exp(), 0.4 * x[0]));
    (f, h)
}

fn max_abs(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Weak against strong form and the adjoint identity for one assembled operator.
pub fn identity_rows(
    asm: &Assembler,
    sym: &SymbolField,
    op: &LocalizationOperator,
    f: &Field,
    h: &Field,
    t: &str,
    tol: &Tolerances,
) -> Result<Vec<Check>> {
    let strong = op.apply(f)?.inner(h)?;
    let weak = weak_form(sym, asm.phi_bank(), asm.psi_bank(), f, h)?;
    let adj = asm.adjoint(sym)?;
    let ct = op.conjugate_transpose();
    let diff: Vec<Complex64> = adj.kernel().data().iter().zip(ct.data()).map(|(a, b)| a - b).collect();
    Ok(vec![
        Check::abs(
            Group::ExactIdentities,
            format!("weak_strong[{t}]"),
            "<L f, g> = int_X sigma Phi_phi f conj Phi_psi g dmu",
            (strong - weak).norm() / weak.norm(),
            0.0,
            tol.exact,
        ),
        Check::abs(
            Group::ExactIdentities,
            format!("adjoint[{t}]"),
            "L_phi,psi(sigma)^* = L_psi,phi(conj sigma)",
            max_abs(&diff) / max_abs(ct.data()),
            0.0,
            tol.exact,
        ),
    ])
}

/// Every applicable bound at every configured exponent, as report rows and bound-table rows.
pub fn bound_rows(
    bi: &BoundInputs,
    sym: &SymbolField,
    op: &LocalizationOperator,
    cfg: &RunConfig,
    t: &str,
) -> Result<(Vec<Check>, Vec<BoundRow>)> {
    let (mut checks, mut table) = (Vec::new(), Vec::new());
    for &p in &cfg.norm_p {
        let m = op.measured_norm(p, cfg.seed)?;
        for (theorem, bound) in bi.applicable_bounds(sym, p)? {
            checks.push(Check::at_most(
                Group::NormBounds,
                format!(
                    "bound[{t},p={},{},{}]",
                    p_tag(p),
                    theorem.id(),
                    if m.exact { "exact" } else { "lower" }
                ),
                theorem.anchor(),
                m.value,
                bound,
                cfg.tol.slack,
            ));
            table.push(BoundRow {
                theorem_id: theorem.id(),
                p,
                measured: m.value,
                bound,
            });
        }
    }
    Ok((checks, table))
}

/// Fraction of singular values above the threshold, for symbols in an integrable class.
pub fn compactness_row(op: &LocalizationOperator, t: &str, tol: &Tolerances) -> Option<Check> {
    if !op.symbol().class().is_integrable() {
        return None;
    }
    let sv = op.singular_value_profile();
    let above = sv.iter().take_while(|s| **s >= tol.sv_threshold * sv[0]).count();
    Some(Check::new(
        Group::Compactness,
        format!("singular_decay[{t}]"),
        "#{sigma_k >= threshold sigma_0} / N <= fraction",
        above as f64 / sv.len() as f64,
        tol.sv_fraction,
        tol.sv_threshold,
        above as f64 <= tol.sv_fraction * sv.len() as f64,
    ))
}

/// Exact identities, bound dominance, the worked examples and the singular-value diagnostic
/// for one order and window pair on the operator grid.
fn operator_checks(cfg: &RunConfig, alpha: f64, (k1, k2): (usize, usize)) -> Result<Vec<Check>> {
    let lvl = Level::new(alpha, cfg.d, cfg.op_grid)?;
    let g = &lvl.grid;
    let scales = ScaleGrid::new(g, cfg.a_min, cfg.a_max, cfg.op_scales)?;
    let pair = WaveletPair::new(&lvl.plan, &scales, Window::laguerre_gaussian(k1), Window::laguerre_gaussian(k2))?;
    let asm = Assembler::new(&lvl.plan, &scales, pair.clone(), DEFAULT_SWITCH_FACTOR)?;
    let bi = BoundInputs::new(g, &pair)?;
    let t = format!("alpha={alpha},pair={k1}:{k2}");
    let tol = &cfg.tol;
    let (f, h) = operator_test_pair(g);
    let mut out = Vec::new();
    for kind in SymbolKind::ALL {
        let sym = kind.build(&scales)?;
        let ts = format!("{t},symbol={}", kind.name());
        let op = asm.assemble(&sym)?;
        let lf = op.apply(&f)?;
        let strong = lf.inner(&h)?;
        out.extend(identity_rows(&asm, &sym, &op, &f, &h, &ts, tol)?);
        out.extend(bound_rows(&bi, &sym, &op, cfg, &ts)?.0);
        out.extend(compactness_row(&op, &ts, tol));
        match kind {
            SymbolKind::ScaleOnly => {
                let m = multiplier_symbol(&lvl.plan, &scales, &pair.phi, &pair.psi, sym.chi().unwrap_or_default())?;
                let tm = apply_multiplier(&lvl.plan, &m, &f)?;
                out.push(Check::abs(
                    Group::Examples,
                    format!("multiplier[{ts}]"),
                    "L_phi,psi(chi) f = F_W^-1(m F_W f), m(xi) = int chi(a) conj F_W phi(a xi) F_W psi(a xi) da/a",
                    lf.rel_l2_error(&tm)?,
                    0.0,
                    tol.examples,
                ));
            }
            SymbolKind::Separable => {
                let pc = paracommutator_weak_form(
                    &lvl.plan,
                    &lvl.translator,
                    &scales,
                    &pair.phi,
                    &pair.psi,
                    sym.chi().unwrap_or_default(),
                    sym.zeta().ok_or_else(|| anyhow::anyhow!("separable symbol without space factor"))?,
                    &f,
                    &h,
                )?;
                out.push(Check::abs(
                    Group::Examples,
                    format!("paracommutator[{ts}]"),
                    "<L f, g> = int int K(xi, eta) G(xi, eta) F_W f(xi) conj F_W g(eta) dmu dmu",
                    (pc - strong).norm() / strong.norm(),
                    0.0,
                    tol.examples,
                ));
            }
            _ => {}
        }
    }

    // rank one: a single off-axis cell in the middle of the scale range
    let s = scales.len() * 2 / 5;
    let k = (g.n() / 2 + 2) * g.m() + 3;
    let op = asm.assemble(&SymbolField::single_cell(&scales, s, k)?)?;
    let phi = Field::from_values(g, asm.phi_kernels().member(s, k))?;
    let psi = Field::from_values(g, asm.psi_kernels().member(s, k))?;
    let expect = psi.scale(f.inner(&phi)? * scales.combined_weight(s, k));
    let err = op.apply(&f)?.max_abs_diff(&expect)? / expect.lp_norm(f64::INFINITY)?;
    out.push(Check::abs(
        Group::ExactIdentities,
        format!("rank_one[{t}]"),
        "L(1_cell) f = w(a, x) <f, phi_{a,x}> psi_{a,x}",
        err,
        0.0,
        tol.rank_one,
    ));

    let p = paraproduct(asm.phi_bank(), asm.psi_bank(), &f, &h)?;
    let one = Field::from_real_fn(g, |_| 1.0);
    let integral = p.inner(&one)?;
    let rhs = pair.c_phi_psi * f.inner(&h)?;
    out.push(Check::abs(
        Group::Examples,
        format!("paraproduct_lemma[{t}]"),
        "int p(f, g) dmu = C_phi,psi <f, g>",
        (integral - rhs).norm() / rhs.norm(),
        0.0,
        tol.examples,
    ));
    out.push(Check::at_most(
        Group::Examples,
        format!("paraproduct_l1[{t}]"),
        "||p(f, g)||_1 <= sqrt(C_phi C_psi) ||f||_2 ||g||_2",
        p.lp_norm(1.0)?,
        (pair.c_phi * pair.c_psi).sqrt() * f.lp_norm(2.0)? * h.lp_norm(2.0)?,
        tol.slack,
    ));
    Ok(out)
}

/// Every check of the suite, for every configured order, in a fixed order.
pub fn run_verify(cfg: &RunConfig) -> Result<Vec<Check>> {
    let mut all = Vec::new();
    for (ai, &alpha) in cfg.alphas.iter().enumerate() {
        let lvl = Level::new(alpha, cfg.d, cfg.grid)?;
        let fine = Level::new(alpha, cfg.d, doubled(cfg.grid))?;
        let scales = ScaleGrid::new(&lvl.grid, cfg.a_min, cfg.a_max, cfg.scales)?;
        all.extend(kernel_checks(cfg, alpha, &mut rng_for(cfg.seed, Group::Kernel, ai)));
        all.extend(fixed_point_checks(cfg, &lvl)?);
        all.extend(plancherel_checks(cfg, &lvl, Some(&fine), &mut rng_for(cfg.seed, Group::Plancherel, ai))?);
        all.extend(translation_checks(cfg, &lvl, &mut rng_for(cfg.seed, Group::Translation, ai))?);
        all.extend(convolution_checks(cfg, &lvl, &mut rng_for(cfg.seed, Group::Convolution, ai))?);
        all.extend(admissibility_checks(cfg, &lvl, &scales)?);
        all.extend(wavelet_checks(cfg, &lvl, Some(&fine))?);
        for &pair in &cfg.pairs {
            all.extend(operator_checks(cfg, alpha, pair)?);
        }
    }
    all.sort_by_key(|c| c.group);
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_predicates() {
        assert!(Check::rel(Group::Kernel, "a".into(), "", 1.0005, 1.0, 1e-3).pass);
        assert!(!Check::rel(Group::Kernel, "a".into(), "", f64::NAN, 1.0, 1e-3).pass);
        assert!(Check::at_most(Group::Kernel, "a".into(), "", 1.04, 1.0, 0.05).pass);
        assert!(!Check::at_most(Group::Kernel, "a".into(), "", 1.06, 1.0, 0.05).pass);
        assert!(Check::ratio(Group::Kernel, "a".into(), "", 1e-4, 2e-5, 3.0).pass);
        assert!(!Check::ratio(Group::Kernel, "a".into(), "", 1e-4, 5e-5, 3.0).pass);
        assert!(Check::ratio(Group::Kernel, "a".into(), "", 1e-15, 1e-15, 3.0).pass);
        assert!(!Check::flag(Group::Resources, "a".into(), "").pass);
    }

    #[test]
    fn doubling_halves_the_spacing() {
        let p = GridParams {
            cart_extent: 12.0,
            n: 65,
            radial_extent: 12.0,
            m: 64,
        };
        let q = doubled(p);
        assert_eq!((q.n, q.m), (129, 128));
    }
}
