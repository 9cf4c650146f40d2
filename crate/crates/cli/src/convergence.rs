//! Refinement study: every quadrature-limited error on successively doubled grids.

use anyhow::Result;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use weinstein_core::grid::{Field, ScaleField, ScaleGrid};
use weinstein_core::localization::{weak_form, SymbolKind};
use weinstein_core::samples::{centred_gaussian, mixture, random_terms, GaussianTerm};
use weinstein_core::specfun::homogeneous_dim;
use weinstein_core::translation::check_translate_fourier;
use weinstein_core::wavelet::{check_two_wavelet_parseval, invert_cwt, WaveletBank, WaveletPair, DEFAULT_SWITCH_FACTOR};

use crate::checks::{doubled, window, write_report, Check, Group, Level};
use crate::config::{GridParams, RunConfig, WindowSpec};
use crate::output::fmt_f64;

/// One measured error at one level.
#[derive(Debug, Clone)]
pub struct Measurement {
    pub quantity: &'static str,
    pub anchor: &'static str,
    pub error: f64,
    pub tolerance: f64,
    /// Whether the error is set by the quadrature and must shrink under refinement. Errors set
    /// by the box or the scale range do not.
    pub refines: bool,
}

fn level_params(base: GridParams, level: usize) -> GridParams {
    (0..level).fold(base, |p, _| doubled(p))
}

fn node_count(d: usize, p: GridParams) -> usize {
    p.n.pow(d as u32) * p.m
}

fn measure(cfg: &RunConfig, lvl: &Level, terms: &[Vec<GaussianTerm>]) -> Result<Vec<Measurement>> {
    let g = &lvl.grid;
    let d = g.d();
    let tol = &cfg.tol;
    let mut out = Vec::new();
    let mut push = |quantity, anchor, error, tolerance, refines| {
        out.push(Measurement {
            quantity,
            anchor,
            error,
            tolerance,
            refines,
        })
    };
    let fs: Vec<Field> = terms.iter().map(|t| mixture(g, t)).collect();

    let mut plancherel = 0.0f64;
    for f in &fs {
        let (lhs, rhs) = lvl.plan.check_plancherel(f)?;
        plancherel = plancherel.max((lhs - rhs).abs() / rhs);
    }
    push("plancherel", "||F_W f||_2 = ||f||_2", plancherel, tol.plancherel, true);

    let gauss = centred_gaussian(g, 1.0);
    let fg = lvl.plan.forward(&gauss)?;
    push("fixed_point", "F_W exp(-|x|^2/2) = exp(-|xi|^2/2)", fg.rel_l2_error(&gauss)?, tol.fixed_point, true);
    let back = lvl.plan.inverse(&fg)?;
    push("round_trip", "F_W^-1 F_W f = f", back.rel_l2_error(&gauss)?, tol.fixed_point, true);

    let mut x = vec![0.0; d + 1];
    x[0] = 0.7;
    x[d] = 1.3;
    let (lhs, rhs) = check_translate_fourier(&lvl.plan, &lvl.translator, &x, &fs[0])?;
    push(
        "translation",
        "F_W(tau_x f) = Lambda((-x', x_r), .) F_W f",
        lhs.rel_l2_error(&rhs)?,
        tol.translation,
        true,
    );

    // wide mixtures: the translates leave the box, so this one is box-limited
    let conv = lvl.translator.convolve(&fs[0], &fs[1])?;
    let product = lvl.plan.forward(&fs[0])?.mul(&lvl.plan.forward(&fs[1])?)?;
    push(
        "convolution",
        "F_W(f * g) = F_W f F_W g",
        lvl.plan.forward(&conv)?.rel_l2_error(&product)?,
        tol.convolution,
        false,
    );
    let (s, w) = (0.8f64, 0.85f64);
    let u = (s * s + w * w).sqrt();
    let exact = centred_gaussian(g, u).scale(Complex64::new((s * w / u).powf(homogeneous_dim(g.alpha(), d)), 0.0));
    let conv = lvl.translator.convolve(&centred_gaussian(g, s), &centred_gaussian(g, w))?;
    push(
        "convolution_gaussians",
        "G_s * G_t = (st/u)^D G_u, u^2 = s^2 + t^2",
        conv.rel_l2_error(&exact)?,
        tol.convolution,
        true,
    );

    let scales = ScaleGrid::new(g, cfg.a_min, cfg.a_max, cfg.scales)?;
    let pair = WaveletPair::new(&lvl.plan, &scales, window(&cfg.phi, g)?, window(&cfg.psi, g)?)?;
    let pb = WaveletBank::new(&lvl.plan, &scales, &pair.phi, DEFAULT_SWITCH_FACTOR)?;
    let qb = WaveletBank::new(&lvl.plan, &scales, &pair.psi, DEFAULT_SWITCH_FACTOR)?;
    let (lhs, rhs) = check_two_wavelet_parseval(&pair, &pb, &qb, &gauss, &gauss)?;
    push(
        "wavelet_parseval",
        "int_X Phi_phi f conj Phi_psi g dmu = C_phi,psi <f, g>",
        (lhs - rhs).norm() / rhs.norm(),
        tol.wavelet,
        true,
    );
    let rec = invert_cwt(&pair, &qb, &pb.analyze(&gauss)?)?;
    push(
        "wavelet_reconstruction",
        "f = (1/C_phi,psi) int_X Phi_phi f(a, x) psi_{a,x} dmu(a, x)",
        rec.rel_l2_error(&gauss)?,
        tol.wavelet,
        true,
    );

    // matrix-free operator: exact discrete identities at every level
    let sym = SymbolKind::GaussianBump.build(&scales)?;
    let sigma = sym.values();
    let apply = |bank_in: &WaveletBank, bank_out: &WaveletBank, f: &Field, conj: bool| -> Result<Field> {
        let w = bank_in.analyze(f)?;
        let v = w.values().iter().zip(sigma.values()).map(|(a, s)| a * if conj { s.conj() } else { *s }).collect();
        Ok(bank_out.synthesize(&ScaleField::from_values(&scales, v)?)?)
    };
    let (f, h) = (&fs[0], &fs[1]);
    let strong = apply(&pb, &qb, f, false)?.inner(h)?;
    let weak = weak_form(&sym, &pb, &qb, f, h)?;
    push(
        "weak_strong",
        "<L f, g> = int_X sigma Phi_phi f conj Phi_psi g dmu",
        (strong - weak).norm() / weak.norm(),
        tol.exact,
        false,
    );
    let adjoint = f.inner(&apply(&qb, &pb, h, true)?)?;
    push(
        "adjoint",
        "<L f, g> = <f, L_psi,phi(conj sigma) g>",
        (strong - adjoint).norm() / strong.norm(),
        tol.exact,
        false,
    );
    Ok(out)
}

/// Report rows plus the raw `(quantity, alpha, level, n, m, error)` table.
pub fn run_convergence(cfg: &RunConfig) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let mut table = Vec::new();
    let sampled = matches!(cfg.phi, WindowSpec::Csv(_)) || matches!(cfg.psi, WindowSpec::Csv(_));
    if sampled {
        anyhow::bail!("convergence needs analytic windows; sampled windows live on one grid");
    }
    for &alpha in &cfg.alphas {
        let t = format!("alpha={alpha}");
        let mut previous: Option<Vec<Measurement>> = None;
        let mut terms = None;
        for level in 0..cfg.levels {
            let p = level_params(cfg.grid, level);
            if node_count(cfg.d, p) > cfg.max_nodes {
                checks.push(Check::flag(
                    Group::Resources,
                    format!("level_skipped[{t},level={level},n={},m={}]", p.n, p.m),
                    "resource limit: partial report",
                ));
                break;
            }
            let lvl = Level::new(alpha, cfg.d, p)?;
            let terms = terms.get_or_insert_with(|| {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                (0..3).map(|_| random_terms(&lvl.grid, &mut rng, 3)).collect::<Vec<_>>()
            });
            let current = measure(cfg, &lvl, terms)?;
            for m in &current {
                table.push((m.quantity, alpha, level, p.n, p.m, m.error));
                checks.push(Check::abs(
                    Group::Convergence,
                    format!("{}[{t},level={level}]", m.quantity),
                    m.anchor,
                    m.error,
                    0.0,
                    m.tolerance,
                ));
            }
            if let Some(prev) = &previous {
                for (c, f) in prev.iter().zip(&current).filter(|(c, _)| c.refines) {
                    checks.push(Check::ratio(
                        Group::Convergence,
                        format!("{}_ratio[{t},level={}->{level}]", c.quantity, level - 1),
                        "e(h) / e(h/2) >= 3",
                        c.error,
                        f.error,
                        cfg.tol.refinement,
                    ));
                }
            }
            previous = Some(current);
        }
    }
    std::fs::create_dir_all(&cfg.out)?;
    std::fs::write(cfg.out.join("config.txt"), cfg.serialize())?;
    let mut w = csv::Writer::from_path(cfg.out.join("convergence.csv"))?;
    w.write_record(["quantity", "alpha", "level", "n", "m", "error"])?;
    for (q, a, l, n, m, e) in table {
        w.write_record([q.to_string(), a.to_string(), l.to_string(), n.to_string(), m.to_string(), fmt_f64(e)])?;
    }
    w.flush()?;
    write_report(&cfg.out.join("report.csv"), &checks)?;
    Ok(checks)
}
