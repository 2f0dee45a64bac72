//! Fixtures shared by the benchmarks.

use puncture_core::fields::QField;
use puncture_core::maps::{MapSpec, Profile};

pub fn power_shift_map(n: usize) -> MapSpec {
    MapSpec::radial(Profile::power_shift(0.5).expect("valid alpha"), n).expect("valid map")
}

pub fn exp_integral_map(n: usize) -> MapSpec {
    let q = QField::power_log(1.0, 0.0, 3.0).expect("valid field");
    MapSpec::radial(Profile::exp_integral(q, n).expect("valid profile"), n).expect("valid map")
}

/// Points on a spiral through the punctured ball, away from the puncture.
pub fn sample_points(n: usize, count: usize) -> Vec<Vec<f64>> {
    (0..count)
        .map(|i| {
            let t = (i as f64 + 0.5) / count as f64;
            let r = 0.01 + 0.98 * t;
            let mut x: Vec<f64> = (0..n).map(|k| ((k + 1) as f64 * 7.0 * t).sin()).collect();
            let len = x.iter().map(|c| c * c).sum::<f64>().sqrt().max(1e-12);
            x.iter_mut().for_each(|c| *c *= r / len);
            x
        })
        .collect()
}
