use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use weinstein_core::grid::{BaseGrid, Field};
use weinstein_core::samples::{centred_gaussian, random_mixture};
use weinstein_core::specfun::homogeneous_dim;
use weinstein_core::transform::TransformPlan;
use weinstein_core::translation::{check_translate_fourier, convolve_spectral, Translator};

const ALPHAS: [f64; 3] = [0.0, 0.5, 1.5];

fn default_grid(alpha: f64) -> Arc<BaseGrid> {
    BaseGrid::new(alpha, 1, 12.0, 65, 12.0, 64).unwrap()
}

/// `Gamma(alpha+1) (2/t)^alpha I_alpha(t)` by its positive series.
fn modified_bessel(alpha: f64, t: f64) -> f64 {
    let q = 0.25 * t * t;
    let (mut term, mut sum) = (1.0, 1.0);
    for k in 1..400 {
        let k = k as f64;
        term *= q / (k * (alpha + k));
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    sum
}

/// `tau_x exp(-|.|^2/2)` at `y`: the theta-average of a Gaussian in `x_r^2 + y_r^2 + 2 x_r y_r cos`.
fn translated_gaussian(alpha: f64, x: &[f64], y: &[f64]) -> f64 {
    let d = x.len() - 1;
    let cart: f64 = (0..d).map(|i| (x[i] + y[i]).powi(2)).sum();
    let (xr, yr) = (x[d], y[d]);
    (-0.5 * (cart + xr * xr + yr * yr)).exp() * modified_bessel(alpha, xr * yr)
}

fn node_index(g: &BaseGrid, rng: &mut ChaCha8Rng, reach: f64) -> usize {
    loop {
        let k = rng.gen_range(0..g.n_nodes());
        if g.node(k).iter().all(|v| v.abs() <= reach) {
            return k;
        }
    }
}

#[test]
fn translation_matches_series_closed_form() {
    for &alpha in &ALPHAS {
        let g = default_grid(alpha);
        let tr = Translator::with_default_rule(&g);
        let f = centred_gaussian(&g, 1.0);
        for x in [vec![1.5, 2.0], vec![-3.0, 0.7], vec![0.0, 4.0]] {
            let t = tr.translate(&x, &f).unwrap();
            let exact = Field::from_real_fn(&g, |y| translated_gaussian(alpha, &x, y));
            let err = t.max_abs_diff(&exact).unwrap();
            assert!(err < 1e-6, "alpha={alpha} x={x:?}: {err:e}");
        }
        // tau_0 is the identity, bit for bit
        let t0 = tr.translate(&[0.0, 0.0], &f).unwrap();
        assert_eq!(t0.values(), f.values());
    }
}

#[test]
fn translation_symmetry_positivity_and_mass() {
    for &alpha in &ALPHAS {
        let g = default_grid(alpha);
        let tr = Translator::with_default_rule(&g);
        let f = centred_gaussian(&g, 1.0);
        let one = Field::from_real_fn(&g, |_| 1.0);
        let mass = f.inner(&one).unwrap().re;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..6 {
            let (i, j) = (node_index(&g, &mut rng, 3.0), node_index(&g, &mut rng, 3.0));
            let (xi, xj) = (g.node(i), g.node(j));
            let a = tr.translate(&xi, &f).unwrap().values()[j];
            let b = tr.translate(&xj, &f).unwrap().values()[i];
            assert!((a - b).norm() <= 1e-6, "alpha={alpha}: {a} vs {b}");
            let t = tr.translate(&xi, &f).unwrap();
            assert!(t.values().iter().all(|v| v.re >= -1e-12));
            // the translate stays well inside the box, so its mass is preserved
            let moved = t.inner(&one).unwrap().re;
            assert!((moved - mass).abs() <= 1e-6 * mass, "alpha={alpha}: {moved} vs {mass}");
        }
    }
}

#[test]
fn translation_contracts_norms_and_multiplies_transform() {
    for &alpha in &ALPHAS {
        let g = default_grid(alpha);
        let plan = TransformPlan::new(&g);
        let tr = Translator::with_default_rule(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..3 {
            let f = random_mixture(&g, &mut rng);
            let x = vec![rng.gen_range(-2.0..2.0), rng.gen_range(0.0..2.5)];
            let t = tr.translate(&x, &f).unwrap();
            for &p in &[1.0, 2.0, f64::INFINITY] {
                assert!(t.lp_norm(p).unwrap() <= 1.05 * f.lp_norm(p).unwrap());
            }
            let (lhs, rhs) = check_translate_fourier(&plan, &tr, &x, &f).unwrap();
            let err = lhs.rel_l2_error(&rhs).unwrap();
            assert!(err <= 1e-3, "alpha={alpha} x={x:?}: {err:e}");
        }
    }
}

#[test]
fn convolution_of_gaussians_has_closed_form() {
    for &alpha in &ALPHAS {
        let g = default_grid(alpha);
        let tr = Translator::with_default_rule(&g);
        let plan = TransformPlan::new(&g);
        let dim = homogeneous_dim(alpha, 1);
        // the spectral pipeline inverts a transform, so the result must stay inside
        // |x| < 2 pi / h - L (about 4.8 at default resolution)
        let (s, t) = (0.8, 0.85);
        let u = (s * s + t * t as f64).sqrt();
        let exact = centred_gaussian(&g, u).scale((s * t / u).powf(dim).into());
        let (gs, gt) = (centred_gaussian(&g, s), centred_gaussian(&g, t));
        let direct = tr.convolve(&gs, &gt).unwrap();
        let spectral = convolve_spectral(&plan, &gs, &gt).unwrap();
        assert!(direct.rel_l2_error(&exact).unwrap() < 1e-12);
        assert!(spectral.rel_l2_error(&exact).unwrap() < 2e-3);
    }
}

#[test]
fn convolution_theorem_young_and_algebra() {
    for &alpha in &ALPHAS {
        let g = default_grid(alpha);
        let tr = Translator::with_default_rule(&g);
        let plan = TransformPlan::new(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let f = random_mixture(&g, &mut rng);
        let h = random_mixture(&g, &mut rng);
        let k = centred_gaussian(&g, 1.1);
        let fh = tr.convolve(&f, &h).unwrap();
        let product = plan.forward(&f).unwrap().mul(&plan.forward(&h).unwrap()).unwrap();
        assert!(plan.forward(&fh).unwrap().rel_l2_error(&product).unwrap() <= 2e-3);
        assert!((fh.lp_norm(2.0).unwrap() - product.lp_norm(2.0).unwrap()).abs() <= 2e-3 * fh.lp_norm(2.0).unwrap());
        let hf = tr.convolve(&h, &f).unwrap();
        assert!(fh.max_abs_diff(&hf).unwrap() <= 1e-6);
        for &(p, q, r) in &[(1.0, 1.0, 1.0), (1.0, 2.0, 2.0), (2.0, 2.0, f64::INFINITY)] {
            let lhs = fh.lp_norm(r).unwrap();
            let rhs = f.lp_norm(p).unwrap() * h.lp_norm(q).unwrap();
            assert!(lhs <= 1.05 * rhs, "({p},{q},{r}): {lhs} > {rhs}");
        }
        let narrow = Field::from_real_fn(&g, |x| (1.0 + 0.3 * x[0]) * (-(x[0] * x[0] + x[1] * x[1]) / 1.445).exp());
        let a = centred_gaussian(&g, 0.7);
        let pipelines = tr.convolve(&a, &narrow).unwrap().rel_l2_error(&convolve_spectral(&plan, &a, &narrow).unwrap());
        assert!(pipelines.unwrap() <= 2e-3);
        let left = tr.convolve(&fh, &k).unwrap();
        let right = tr.convolve(&f, &tr.convolve(&h, &k).unwrap()).unwrap();
        assert!(left.rel_l2_error(&right).unwrap() <= 2e-3);
    }
}
