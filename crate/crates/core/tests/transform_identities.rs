use std::sync::Arc;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use weinstein_core::grid::{reflect, BaseGrid, Field};
use weinstein_core::samples::{centred_gaussian, random_mixture};
use weinstein_core::transform::TransformPlan;

const ALPHAS: [f64; 3] = [0.0, 0.5, 1.5];

fn default_grid(alpha: f64) -> Arc<BaseGrid> {
    BaseGrid::new(alpha, 1, 12.0, 65, 12.0, 64).unwrap()
}

/// `F_W(exp(-s|x|^2))(lambda) = (2s)^{-(alpha + 1 + d/2)} exp(-|lambda|^2 / (4s))`.
fn gaussian_transform(alpha: f64, d: usize, s: f64, lambda: &[f64]) -> f64 {
    let l2: f64 = lambda.iter().map(|v| v * v).sum();
    (2.0 * s).powf(-(alpha + 1.0 + 0.5 * d as f64)) * (-l2 / (4.0 * s)).exp()
}

#[test]
fn gaussian_is_a_fixed_point_and_round_trips() {
    for &alpha in &ALPHAS {
        let g = default_grid(alpha);
        let plan = TransformPlan::new(&g);
        let h = centred_gaussian(&g, 1.0);
        let fh = plan.forward(&h).unwrap();
        assert!(fh.rel_l2_error(&h).unwrap() <= 1e-3);
        assert!(plan.inverse(&h).unwrap().rel_l2_error(&h).unwrap() <= 1e-3);
        assert!(plan.inverse(&fh).unwrap().rel_l2_error(&h).unwrap() <= 1e-3);
        let zero = plan.inverse(&Field::zeros(&g)).unwrap();
        assert_eq!(zero.lp_norm(f64::INFINITY).unwrap(), 0.0);
    }
}

#[test]
fn transforms_of_dilated_and_modulated_gaussians() {
    for &alpha in &ALPHAS {
        for d in 1..3 {
            let g = if d == 1 { default_grid(alpha) } else { BaseGrid::new(alpha, 2, 8.0, 41, 8.0, 32).unwrap() };
            let plan = TransformPlan::new(&g);
            // wider spectra alias on the default grid (node spacing times box half-width must stay below pi)
            for &s in &[0.2, 0.35, 0.5] {
                let f = Field::from_real_fn(&g, |x| (-s * x.iter().map(|v| v * v).sum::<f64>()).exp());
                let ff = plan.forward(&f).unwrap();
                let exact = Field::from_real_fn(&g, |l| gaussian_transform(alpha, d, s, l));
                let err = ff.rel_l2_error(&exact).unwrap();
                assert!(err < 1e-4, "alpha={alpha} d={d} s={s}: {err:e}");
            }
            // modulation by exp(i k x_1) shifts the transform by k
            let k = 0.8;
            let f = Field::from_fn(&g, |x| {
                Complex64::from_polar((-0.5 * x.iter().map(|v| v * v).sum::<f64>()).exp(), k * x[0])
            });
            for lambda in [vec![0.8, 0.0, 0.3], vec![-1.0, 0.5, 1.2], vec![2.0, -0.4, 0.1]] {
                let lambda = if d == 1 { vec![lambda[0], lambda[2]] } else { lambda };
                let got = plan.eval_at(&f, &lambda).unwrap();
                let mut shifted = lambda.clone();
                shifted[0] -= k;
                let exact = gaussian_transform(alpha, d, 0.5, &shifted);
                assert!((got - exact).norm() < 1e-6, "alpha={alpha} d={d}: {got} vs {exact}");
            }
        }
    }
}

#[test]
fn plancherel_and_parseval_on_random_mixtures() {
    for &alpha in &ALPHAS {
        let g = default_grid(alpha);
        let plan = TransformPlan::new(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let f = random_mixture(&g, &mut rng);
            let h = random_mixture(&g, &mut rng);
            let (lhs, rhs) = plan.check_plancherel(&f).unwrap();
            assert!((lhs - rhs).abs() <= 1e-3 * rhs);
            let (lhs, rhs) = plan.check_parseval(&f, &h).unwrap();
            let scale = f.lp_norm(2.0).unwrap() * h.lp_norm(2.0).unwrap();
            assert!((lhs - rhs).norm() <= 1e-3 * scale);
        }
        // odd against even in x_1
        let odd = Field::from_real_fn(&g, |x| x[0] * (-0.5 * (x[0] * x[0] + x[1] * x[1])).exp());
        let even = centred_gaussian(&g, 1.2);
        let (lhs, rhs) = plan.check_parseval(&odd, &even).unwrap();
        assert!(lhs.norm() < 1e-12 && rhs.norm() < 1e-12);
    }
}

#[test]
fn plancherel_error_shrinks_under_refinement() {
    let alpha = 0.5;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let coarse = BaseGrid::new(alpha, 1, 12.0, 33, 12.0, 32).unwrap();
    let terms = weinstein_core::samples::random_terms(&coarse, &mut rng, 3);
    let mut errors = Vec::new();
    for &(n, m) in &[(33, 32), (65, 64)] {
        let g = BaseGrid::new(alpha, 1, 12.0, n, 12.0, m).unwrap();
        let f = weinstein_core::samples::mixture(&g, &terms);
        let (lhs, rhs) = TransformPlan::new(&g).check_plancherel(&f).unwrap();
        errors.push((lhs - rhs).abs() / rhs);
    }
    assert!(errors[0] >= 3.0 * errors[1], "{errors:?}");
}

#[test]
fn hausdorff_young_and_kernel_bound() {
    for &alpha in &ALPHAS {
        let g = default_grid(alpha);
        let plan = TransformPlan::new(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let f = random_mixture(&g, &mut rng)
                .zip_with(&Field::from_real_fn(&g, |x| 1.0 + x[0] * x[0] - 0.3 * x[1]), |a, b| a * b)
                .unwrap();
            let l1 = f.lp_norm(1.0).unwrap();
            let ff = plan.forward(&f).unwrap();
            assert!(ff.values().iter().all(|v| v.norm() <= l1 * (1.0 + 1e-12)));
            for &p in &[1.0, 1.5, 2.0] {
                let (lhs, rhs) = plan.check_hausdorff_young(&f, p).unwrap();
                assert!(lhs <= rhs * (1.0 + 1e-3), "p={p}: {lhs} > {rhs}");
            }
        }
        assert!(plan.check_hausdorff_young(&centred_gaussian(&g, 1.0), 2.5).is_err());
    }
}

#[test]
fn zero_frequency_row_sums_weights() {
    let g = BaseGrid::new(1.5, 2, 3.0, 5, 3.0, 4).unwrap();
    let plan = TransformPlan::new(&g);
    let one = Field::from_real_fn(&g, |_| 1.0);
    let total: f64 = g.weights().iter().sum();
    assert!((plan.eval_at(&one, &[0.0, 0.0, 0.0]).unwrap().re - total).abs() < 1e-13 * total);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn linearity_and_symmetry_identities(seed in any::<u64>(), a in (-2.0..2.0f64, -2.0..2.0f64), alpha in prop::sample::select(ALPHAS.to_vec())) {
        let g = BaseGrid::new(alpha, 1, 8.0, 41, 8.0, 32).unwrap();
        let plan = TransformPlan::new(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_mixture(&g, &mut rng);
        let h = random_mixture(&g, &mut rng);
        let a = Complex64::new(a.0, a.1);
        let ff = plan.forward(&f).unwrap();
        let fh = plan.forward(&h).unwrap();
        let combined = plan.forward(&f.scale(a).add(&h).unwrap()).unwrap();
        let expect = ff.scale(a).add(&fh).unwrap();
        let scale = 1.0 + expect.lp_norm(f64::INFINITY).unwrap();
        prop_assert!(combined.max_abs_diff(&expect).unwrap() <= 1e-12 * scale);
        // F(conj f) = conj(F(reflect f)) and F f = reflect(F(reflect f))
        let fr = plan.forward(&reflect(&f)).unwrap();
        let fc = plan.forward(&f.conj()).unwrap();
        prop_assert!(fc.max_abs_diff(&fr.conj()).unwrap() <= 1e-10);
        prop_assert!(ff.max_abs_diff(&reflect(&fr)).unwrap() <= 1e-10);
    }
}
