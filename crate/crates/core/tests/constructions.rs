use approx::assert_relative_eq;
use std::f64::consts::PI;

use puncture_core::criterion::{classify_divergence, ClassifyOptions, Divergence, PhiSpec};
use puncture_core::differential::{dilatation_sample, orlicz_energy, JacobianMethod};
use puncture_core::fields::{ball_lp_norm, spherical_mean, DilatationExponent, QField};
use puncture_core::geometry::{AnnulusSpec, DEFAULT_ORDER};
use puncture_core::maps::{LimitSetDescription, MapSpec, Profile};
use puncture_core::modulus::{lower_q_check_radial, sphere_family_modulus};

fn power_shift(alpha: f64, n: usize) -> MapSpec {
    MapSpec::radial(Profile::power_shift(alpha).unwrap(), n).unwrap()
}

#[test]
fn power_shift_samples_on_a_sphere() {
    let f = power_shift(0.5, 3);
    for x in [
        [0.25, 0.0, 0.0],
        [0.0, 0.15, 0.2],
        [-0.1, 0.1, (0.0625f64 - 0.02).sqrt()],
    ] {
        let s = dilatation_sample(&f, &x, JacobianMethod::Analytic).unwrap();
        assert_relative_eq!(s.inner_dilatation, 36.0, max_relative = 1e-12);
        // stretches 6, 6 and 1
        assert_relative_eq!(s.jac_det_abs, 36.0, max_relative = 1e-12);
    }
}

#[test]
fn power_shift_is_bounded_and_does_not_extend() {
    let f = power_shift(0.3, 4);
    match f.limit_set_at_zero().unwrap() {
        LimitSetDescription::SphereSet { radius, .. } => assert_relative_eq!(radius, 1.0, max_relative = 1e-9),
        other => panic!("{other:?}"),
    }
    let q = QField::from_map(f, DilatationExponent::One).unwrap();
    // K_I grows like |x|^{-alpha (n-1)} = |x|^{-0.9}, integrable to the power 4 in R^4
    assert!(ball_lp_norm(&q, 4.0, 1.0, 4, DEFAULT_ORDER).unwrap().is_finite());
    assert!(!ball_lp_norm(&q, 5.0, 1.0, 4, DEFAULT_ORDER).unwrap().is_finite());
}

#[test]
fn orlicz_energy_bound_for_power_shift() {
    let n = 3;
    let f = power_shift(0.5, n);
    let region = AnnulusSpec::centered(n, 0.5, 0.9).unwrap();
    for phi in [PhiSpec::Power { p: 2.0 }, PhiSpec::PowerLogPhi { p: 3.0, s: 1.0 }] {
        let energy = orlicz_energy(&f, &region, &phi, DEFAULT_ORDER).unwrap();
        let c = (1.0 + 0.5f64.sqrt()) / 0.5;
        assert!(energy <= phi.eval(3f64.sqrt() * c) * region.volume());
    }
}

#[test]
fn planar_square_orlicz_energy_on_thin_annuli() {
    // |grad z^2|^2 = 8 r^2 integrates to 4 pi over the unit disk
    let f = MapSpec::planar_power(2).unwrap();
    let mut prev = 0.0;
    for d in [1e-2, 1e-3, 1e-4] {
        let region = AnnulusSpec::centered(2, d, 1.0 - d).unwrap();
        let e = orlicz_energy(&f, &region, &PhiSpec::Power { p: 2.0 }, DEFAULT_ORDER).unwrap();
        assert_relative_eq!(e, 4.0 * PI * ((1.0 - d).powi(4) - d.powi(4)), max_relative = 1e-12);
        assert!(e > prev);
        prev = e;
    }
}

#[test]
fn exp_integral_map_realizes_its_majorant() {
    let n = 3;
    let q0 = QField::power_log(2.0, 0.0, 3.0).unwrap();
    assert_eq!(
        classify_divergence(&q0, n, &ClassifyOptions::default())
            .unwrap()
            .verdict,
        Divergence::Converges
    );
    let f = MapSpec::radial(Profile::exp_integral(q0.clone(), n).unwrap(), n).unwrap();
    let k = QField::from_map(f.clone(), DilatationExponent::One).unwrap();
    for r in [0.01, 0.1, 0.4] {
        // off-center spheres would mix radii; centered means equal the profile
        assert_relative_eq!(
            spherical_mean(&k, &[0.0; 3], r, DEFAULT_ORDER).unwrap(),
            q0.radial_value(r),
            max_relative = 1e-6
        );
    }
    assert!(!f.extendable_ground_truth().unwrap());
    let majorant = QField::from_map(f.clone(), DilatationExponent::OneOverNMinusOne).unwrap();
    let check = lower_q_check_radial(&f, &majorant, 1e-4, 0.9).unwrap();
    assert!(check.gap.abs() < 1e-8, "{check:?}");
    // the image family is strictly smaller than the source family
    assert!(check.lhs < sphere_family_modulus(1e-4, 0.9, n).unwrap());
}

#[test]
fn finite_differences_track_analytic_for_every_builtin_map() {
    let q = QField::power_log(1.0, 0.5, 0.0).unwrap();
    let maps = [
        power_shift(0.5, 3),
        MapSpec::radial(Profile::exp_integral(q, 3).unwrap(), 3).unwrap(),
        MapSpec::twist(3, 3).unwrap(),
        MapSpec::planar_power(3).unwrap(),
        MapSpec::planar_shear(0.5).unwrap(),
    ];
    for f in &maps {
        let x: Vec<f64> = [0.3, -0.2, 0.1][..f.dim()].to_vec();
        let a = dilatation_sample(f, &x, JacobianMethod::Analytic).unwrap();
        let d = dilatation_sample(f, &x, JacobianMethod::FiniteDifference { h: Some(1e-5) }).unwrap();
        assert_relative_eq!(a.inner_dilatation, d.inner_dilatation, max_relative = 1e-6);
    }
}
