//! The `transform`, `cwt` and `localize` experiments. Each writes its fields and a report.

use std::path::Path;
use std::sync::Arc;

use anyhow::{Context, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use weinstein_core::grid::{BaseGrid, Field, ScaleGrid};
use weinstein_core::localization::{Assembler, BoundInputs, SymbolClass, SymbolField};
use weinstein_core::samples::{centred_gaussian, random_mixture};
use weinstein_core::wavelet::{
    admissibility_constant, check_two_wavelet_parseval, invert_cwt, laguerre_gaussian_constant, WaveletBank,
    WaveletPair, DEFAULT_SWITCH_FACTOR,
};

use crate::checks::{
    bound_rows, compactness_row, identity_rows, operator_test_pair, window, write_report, Check, Group, Level,
};
use crate::config::{InputSpec, RunConfig, SymbolSpec, WindowSpec};
use crate::output::{read_field, read_scale_field, write_bounds, write_field, write_operator, write_scale_field, write_spectrum};

pub fn input_field(cfg: &RunConfig, grid: &Arc<BaseGrid>) -> Result<Field> {
    Ok(match &cfg.input {
        InputSpec::Gaussian(s) => centred_gaussian(grid, *s),
        InputSpec::Mixture => random_mixture(grid, &mut ChaCha8Rng::seed_from_u64(cfg.seed)),
        InputSpec::Csv(p) => read_field(p, grid)?,
    })
}

/// Sampled symbols live on a bounded grid and are treated as integrable.
pub fn symbol_field(cfg: &RunConfig, scales: &Arc<ScaleGrid>) -> Result<SymbolField> {
    Ok(match &cfg.symbol {
        SymbolSpec::Named(kind) => kind.build(scales)?,
        SymbolSpec::Csv(p) => SymbolField::new(read_scale_field(p, scales)?, SymbolClass::L1OfX)?,
    })
}

fn finish(out: &Path, cfg: &RunConfig, checks: Vec<Check>) -> Result<Vec<Check>> {
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    std::fs::write(out.join("config.txt"), cfg.serialize())?;
    write_report(&out.join("report.csv"), &checks)?;
    Ok(checks)
}

fn admissibility_rows(cfg: &RunConfig, lvl: &Level, scales: &ScaleGrid, t: &str) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (role, spec) in [("phi", &cfg.phi), ("psi", &cfg.psi)] {
        let (c, spread) = admissibility_constant(&lvl.plan, scales, &window(spec, &lvl.grid)?)?;
        if let WindowSpec::LaguerreGaussian(k) = spec {
            out.push(Check::abs(
                Group::Admissibility,
                format!("admissibility[{t},{role}={spec}]"),
                "C_phi = int |F_W phi(a xi)|^2 da/a = Gamma(2k)/2",
                c,
                laguerre_gaussian_constant(*k, *k),
                cfg.tol.admissibility,
            ));
        }
        out.push(Check::abs(
            Group::Admissibility,
            format!("admissibility_spread[{t},{role}={spec}]"),
            "int |F_W phi(a xi)|^2 da/a independent of xi",
            spread,
            0.0,
            cfg.tol.spread,
        ));
    }
    Ok(out)
}

/// Forward and inverse transform of the configured input.
pub fn run_transform(cfg: &RunConfig) -> Result<Vec<Check>> {
    let lvl = Level::new(cfg.alpha, cfg.d, cfg.grid)?;
    let f = input_field(cfg, &lvl.grid)?;
    let ff = lvl.plan.forward(&f)?;
    let back = lvl.plan.inverse(&ff)?;
    let fields = cfg.out.join("fields");
    write_field(&fields.join("input.csv"), &f)?;
    write_field(&fields.join("transform.csv"), &ff)?;
    write_field(&fields.join("roundtrip.csv"), &back)?;

    let t = format!("alpha={}", cfg.alpha);
    let (lhs, rhs) = lvl.plan.check_plancherel(&f)?;
    let mut checks = vec![
        Check::rel(Group::Plancherel, format!("plancherel[{t}]"), "||F_W f||_2 = ||f||_2", lhs, rhs, cfg.tol.plancherel),
        Check::abs(Group::FixedPoint, format!("round_trip[{t}]"), "F_W^-1 F_W f = f", back.rel_l2_error(&f)?, 0.0, cfg.tol.fixed_point),
    ];
    for p in [1.0, 1.5] {
        let (lhs, rhs) = lvl.plan.check_hausdorff_young(&f, p)?;
        checks.push(Check::at_most(
            Group::Plancherel,
            format!("hausdorff_young[{t},p={p}]"),
            "||F_W f||_p' <= ||f||_p",
            lhs,
            rhs,
            cfg.tol.slack,
        ));
    }
    finish(&cfg.out, cfg, checks)
}

/// Wavelet transform of the input with `phi` and reconstruction with `psi`.
pub fn run_cwt(cfg: &RunConfig) -> Result<Vec<Check>> {
    let lvl = Level::new(cfg.alpha, cfg.d, cfg.grid)?;
    let scales = ScaleGrid::new(&lvl.grid, cfg.a_min, cfg.a_max, cfg.scales)?;
    let pair = WaveletPair::new(&lvl.plan, &scales, window(&cfg.phi, &lvl.grid)?, window(&cfg.psi, &lvl.grid)?)?;
    let pb = WaveletBank::new(&lvl.plan, &scales, &pair.phi, DEFAULT_SWITCH_FACTOR)?;
    let qb = WaveletBank::new(&lvl.plan, &scales, &pair.psi, DEFAULT_SWITCH_FACTOR)?;
    let f = input_field(cfg, &lvl.grid)?;
    let w = pb.analyze(&f)?;
    let rec = invert_cwt(&pair, &qb, &w)?;
    let fields = cfg.out.join("fields");
    write_field(&fields.join("input.csv"), &f)?;
    write_scale_field(&fields.join("cwt.csv"), &w)?;
    write_field(&fields.join("reconstruction.csv"), &rec)?;

    let t = format!("alpha={}", cfg.alpha);
    let (lhs, rhs) = check_two_wavelet_parseval(&pair, &pb, &qb, &f, &f)?;
    let mut checks = vec![
        Check::rel(
            Group::WaveletParseval,
            format!("wavelet_parseval[{t}]"),
            "int_X Phi_phi f conj Phi_psi g dmu = C_phi,psi <f, g>",
            lhs.re,
            rhs.re,
            cfg.tol.wavelet,
        ),
        Check::abs(
            Group::WaveletParseval,
            format!("wavelet_reconstruction[{t}]"),
            "f = (1/C_phi,psi) int_X Phi_phi f(a, x) psi_{a,x} dmu(a, x)",
            rec.rel_l2_error(&f)?,
            0.0,
            cfg.tol.wavelet,
        ),
    ];
    checks.extend(admissibility_rows(cfg, &lvl, &scales, &t)?);
    checks.sort_by_key(|c| c.group);
    finish(&cfg.out, cfg, checks)
}

/// Dense localization operator for the configured windows and symbol on the operator grid.
pub fn run_localize(cfg: &RunConfig) -> Result<Vec<Check>> {
    let lvl = Level::new(cfg.alpha, cfg.d, cfg.op_grid)?;
    let scales = ScaleGrid::new(&lvl.grid, cfg.a_min, cfg.a_max, cfg.op_scales)?;
    let pair = WaveletPair::new(&lvl.plan, &scales, window(&cfg.phi, &lvl.grid)?, window(&cfg.psi, &lvl.grid)?)?;
    let asm = Assembler::new(&lvl.plan, &scales, pair.clone(), DEFAULT_SWITCH_FACTOR)?;
    let sym = symbol_field(cfg, &scales)?;
    let op = asm.assemble(&sym)?;
    let f = input_field(cfg, &lvl.grid)?;
    let lf = op.apply(&f)?;
    write_operator(&cfg.out.join("operator.csv"), &op.matrix())?;
    write_spectrum(&cfg.out.join("spectrum.csv"), op.singular_value_profile())?;
    let fields = cfg.out.join("fields");
    write_field(&fields.join("input.csv"), &f)?;
    write_field(&fields.join("output.csv"), &lf)?;

    let t = format!("alpha={},symbol={}", cfg.alpha, cfg.symbol);
    let (_, h) = operator_test_pair(&lvl.grid);
    let mut checks = identity_rows(&asm, &sym, &op, &f, &h, &t, &cfg.tol)?;
    let (rows, table) = bound_rows(&BoundInputs::new(&lvl.grid, &pair)?, &sym, &op, cfg, &t)?;
    checks.extend(rows);
    checks.extend(compactness_row(&op, &t, &cfg.tol));
    write_bounds(&cfg.out.join("bounds.csv"), &table)?;
    finish(&cfg.out, cfg, checks)
}
