use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use proptest::prelude::*;
use weinstein_core::grid::{reflect, BaseGrid, Field, ScaleField, ScaleGrid};
use weinstein_core::specfun::{gamma, measure_constant, radial_constant};

/// `int e^{-s|x|^2} dmu_alpha` over the whole half-space, written as a product of
/// cartesian Gaussian integrals and a radial Gamma integral.
fn gaussian_mass(alpha: f64, d: usize, s: f64) -> f64 {
    measure_constant(alpha, d) * (PI / s).powf(0.5 * d as f64) * gamma(alpha + 1.0)
        / (2.0 * s.powf(alpha + 1.0))
}

fn gaussian(g: &Arc<BaseGrid>, s: f64) -> Field {
    Field::from_real_fn(g, |x| (-s * x.iter().map(|v| v * v).sum::<f64>()).exp())
}

#[test]
fn gaussian_integrals_match_both_closed_forms() {
    for &alpha in &[0.0, 0.5, 1.5] {
        for d in 1..3 {
            let g = BaseGrid::new(alpha, d, 7.0, if d == 1 { 49 } else { 25 }, 7.0, 40).unwrap();
            let one = Field::from_real_fn(&g, |_| 1.0);
            let got = gaussian(&g, 1.0).inner(&one).unwrap().re;
            let product = gaussian_mass(alpha, d, 1.0);
            let polar = radial_constant(alpha, d) * gamma(alpha + 0.5 * d as f64 + 1.0) / 2.0;
            assert!((product - polar).abs() < 1e-14 * polar);
            assert!((got - product).abs() < 1e-6 * product, "alpha={alpha} d={d}: {got} vs {product}");
        }
    }
}

#[test]
fn gaussian_norms_match_closed_forms() {
    let alpha = 0.5;
    let g = BaseGrid::new(alpha, 1, 10.0, 65, 10.0, 48).unwrap();
    let f = gaussian(&g, 0.5);
    // ||e^{-|x|^2/2}||_p^p = int e^{-p|x|^2/2}
    for &p in &[1.0, 2.0, 3.0] {
        let exact = gaussian_mass(alpha, 1, 0.5 * p).powf(1.0 / p);
        let got = f.lp_norm(p).unwrap();
        assert!((got - exact).abs() < 1e-9 * exact, "p={p}");
    }
    // the radial rule has no node at the origin
    let r0 = g.radial_nodes()[0];
    assert!((f.lp_norm(f64::INFINITY).unwrap() - (-0.5 * r0 * r0).exp()).abs() < 1e-15);
    let self_product = f.inner(&f).unwrap();
    assert!(self_product.im == 0.0);
    assert!((self_product.re - gaussian_mass(alpha, 1, 1.0)).abs() < 1e-9);
}

#[test]
fn quadrature_error_decreases_under_refinement() {
    // coarse grids where the Gaussian is still visibly under-resolved
    let alpha = 0.5;
    let exact = gaussian_mass(alpha, 1, 1.0);
    let mut errors = Vec::new();
    for &(n, m) in &[(5, 3), (9, 6), (17, 12)] {
        let g = BaseGrid::new(alpha, 1, 6.0, n, 6.0, m).unwrap();
        let one = Field::from_real_fn(&g, |_| 1.0);
        errors.push((gaussian(&g, 1.0).inner(&one).unwrap().re - exact).abs());
    }
    for w in errors.windows(2) {
        assert!(w[0] >= 4.0 * w[1], "errors {errors:?}");
    }
}

#[test]
fn scale_rule_integrates_gamma_integral() {
    let g = BaseGrid::new(0.5, 1, 1.0, 3, 1.0, 2).unwrap();
    let sg = ScaleGrid::new(&g, 1e-3, 20.0, 4000).unwrap();
    // int a^3 e^{-a^2} da = int a^4 e^{-a^2} da / a
    let s: f64 = sg
        .scales()
        .iter()
        .zip(sg.scale_weights())
        .map(|(a, w)| w * a.powi(4) * (-a * a).exp())
        .sum();
    assert!((s - 0.5).abs() < 1e-6, "{s}");
    let total: f64 = sg.scale_weights().iter().sum();
    assert!((total - (20.0f64 / 1e-3).ln()).abs() < 1e-12);
    let e = ScaleGrid::new(&g, 1.0, std::f64::consts::E, 2).unwrap();
    assert!((e.scale_weights().iter().sum::<f64>() - 1.0).abs() < 1e-15);
}

#[test]
fn single_cell_scale_norm_is_weight_power() {
    let g = BaseGrid::new(1.5, 1, 4.0, 9, 4.0, 8).unwrap();
    let sg = ScaleGrid::new(&g, 0.25, 4.0, 7).unwrap();
    let (s, k) = (3, 17);
    let mut f = ScaleField::zeros(&sg);
    f.at_scale_mut(s)[k] = Complex64::new(1.0, 0.0);
    let w = sg.combined_weight(s, k);
    let a = sg.scales()[s];
    assert!((w - g.weights()[k] * sg.scale_weights()[s] * a.powf(-6.0)).abs() < 1e-15 * w);
    for &p in &[1.0, 1.5, 2.0, 4.0] {
        assert!((f.lp_norm(p).unwrap() - w.powf(1.0 / p)).abs() < 1e-14 * w.powf(1.0 / p));
    }
    assert_eq!(ScaleField::zeros(&sg).lp_norm(2.0).unwrap(), 0.0);
}

#[test]
fn reflection_of_plane_wave() {
    let g = BaseGrid::new(0.5, 2, 3.0, 7, 3.0, 5).unwrap();
    let f = Field::from_fn(&g, |x| Complex64::from_polar(1.0, x[0] - 2.0 * x[1]));
    let expect = Field::from_fn(&g, |x| Complex64::from_polar(1.0, -x[0] + 2.0 * x[1]));
    assert!(reflect(&f).max_abs_diff(&expect).unwrap() < 1e-15);
    let even = gaussian(&g, 0.3);
    assert_eq!(reflect(&even).values(), even.values());
}

fn field_values(len: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64), len)
        .prop_map(|v| v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norm_and_inner_product_laws(
        (u, v) in (field_values(9 * 6), field_values(9 * 6)),
        c in (-3.0..3.0f64, -3.0..3.0f64),
        p in prop::sample::select(vec![1.0, 1.5, 2.0, 3.0, f64::INFINITY]),
    ) {
        let g = BaseGrid::new(0.5, 1, 2.0, 9, 2.0, 6).unwrap();
        let f = Field::from_values(&g, u).unwrap();
        let h = Field::from_values(&g, v).unwrap();
        let c = Complex64::new(c.0, c.1);
        let n = f.lp_norm(p).unwrap();
        prop_assert!((f.scale(c).lp_norm(p).unwrap() - c.norm() * n).abs() <= 1e-12 * (1.0 + c.norm() * n));
        prop_assert!((reflect(&f).lp_norm(p).unwrap() - n).abs() <= 1e-13 * (1.0 + n));
        let back = reflect(&reflect(&f));
        prop_assert_eq!(back.values(), f.values());
        let fh = f.inner(&h).unwrap();
        prop_assert!((fh - h.inner(&f).unwrap().conj()).norm() <= 1e-13 * (1.0 + fh.norm()));
        let ff = f.inner(&f).unwrap();
        prop_assert!(ff.re >= 0.0 && ff.im.abs() <= 1e-14 * ff.re);
    }
}
