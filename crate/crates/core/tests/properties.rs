use proptest::prelude::*;

use stablab::inequality::harmonic::{harmonic_median_control, SphereRule};
use stablab::inequality::simon::conclusion_constant;
use stablab::interior::{check_interior_estimate, InteriorEstimate, InteriorInput, InteriorParams};
use stablab::radial::continue_branch_on;
use stablab::sampler::{sample_harmonic, sample_trig, SamplerConfig};
use stablab::{Dimension, Nonlinearity, RadialField, RadialMesh};

/// Σ c_k r^{2k}: smooth and radial, with u_r = 0 at the origin.
fn even_polynomial(coeffs: &[f64], n: usize, nodes: usize) -> RadialField {
    let c = coeffs.to_vec();
    RadialField::from_fn(RadialMesh::unit_uniform(nodes).unwrap(), Dimension::new(n).unwrap(), move |r| {
        c.iter().enumerate().map(|(k, a)| a * r.powi(2 * k as i32)).sum()
    })
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conclusion_constant_grows_with_beta_and_covering(b in 0.0..4.0f64, db in 0.0..2.0f64, m in 1usize..500, dm in 0usize..500) {
        prop_assert!(conclusion_constant(b, m) <= conclusion_constant(b + db, m));
        prop_assert!(conclusion_constant(b, m) <= conclusion_constant(b, m + dm));
    }

    #[test]
    fn sampler_is_a_function_of_seed_and_index(seed in any::<u64>(), index in any::<u64>(), degree in 0u32..=8) {
        let cfg = SamplerConfig { seed, ..SamplerConfig::default() };
        prop_assert_eq!(sample_trig(&cfg, 2, degree, index).unwrap().probe, sample_trig(&cfg, 2, degree, index).unwrap().probe);
        prop_assert_eq!(sample_harmonic(&cfg, 6, index).unwrap().probe, sample_harmonic(&cfg, 6, index).unwrap().probe);
    }

    #[test]
    fn boundary_median_splits_the_sphere(seed in any::<u64>(), index in 0u64..1000, degree in 0usize..=10) {
        let cfg = SamplerConfig { seed, ..SamplerConfig::default() };
        let v = sample_harmonic(&cfg, degree, index).unwrap().probe;
        let rep = harmonic_median_control(&v, &SphereRule::standard()).unwrap();
        prop_assert!(rep.above_fraction <= 0.5 + 1e-9);
        prop_assert!(rep.below_fraction <= 0.5 + 1e-9);
        prop_assert!(rep.pass_sup && rep.pass_l1);
    }

    #[test]
    fn hessian_excess_is_controlled_pointwise(coeffs in prop::collection::vec(-3.0..3.0f64, 2..6), n in 3usize..=9) {
        let u = even_polynomial(&coeffs, n, 512);
        let rep = check_interior_estimate(InteriorEstimate::HessByLapl, &InteriorInput::bare(&u), &InteriorParams::default()).unwrap();
        prop_assert!(rep.pass, "C = {}", rep.empirical_constant);
        prop_assert!(rep.empirical_constant <= 10.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// v = u(s·) at scale ρ and u at scale sρ give the same constant.
    #[test]
    fn weighted_by_gradient_is_dilation_invariant(
        coeffs in prop::collection::vec(-3.0..3.0f64, 2..6),
        n in 3usize..=9,
        s in 0.5..1.0f64,
        third in any::<bool>(),
    ) {
        prop_assume!(coeffs[1].abs() > 0.1);
        let rho = if third { 1.0 / 3.0 } else { 0.5 };
        let u = even_polynomial(&coeffs, n, 1024);
        let v = u.dilated(s);
        let at = |field: &RadialField, r: f64| {
            let params = InteriorParams { rho: Some(r), ..InteriorParams::default() };
            check_interior_estimate(InteriorEstimate::WeightedByGradient, &InteriorInput::bare(field), &params)
                .unwrap()
                .empirical_constant
        };
        let (cv, cu) = (at(&v, rho), at(&u, s * rho));
        prop_assert!((cv - cu).abs() <= 1e-6 * cu.abs(), "{cv} vs {cu}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn fold_estimate_survives_node_doubling(n in 2usize..=9) {
        let d = Dimension::new(n).unwrap();
        let f = Nonlinearity::exp();
        let coarse = continue_branch_on(d, &f, 12.0, 60, &RadialMesh::unit_uniform(1024).unwrap()).unwrap();
        let fine = continue_branch_on(d, &f, 12.0, 60, &RadialMesh::unit_uniform(2048).unwrap()).unwrap();
        let rel = (coarse.lambda_star_estimate - fine.lambda_star_estimate).abs() / fine.lambda_star_estimate;
        prop_assert!(rel < 5e-3, "n = {n}: {} vs {}", coarse.lambda_star_estimate, fine.lambda_star_estimate);
    }
}
