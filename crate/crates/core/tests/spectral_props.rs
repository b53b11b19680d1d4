use nocgf::spectral::{bandwidth_w01, sample_spectrum, to_dimensionful};
use proptest::prelude::*;

fn smooth(coeffs: &[f64], n: usize, h: f64) -> Vec<f64> {
    (0..n)
        .map(|k| {
            let t = k as f64 * h;
            let wave: f64 = coeffs
                .iter()
                .enumerate()
                .map(|(j, c)| c * (0.3 * j as f64 * t).cos())
                .sum();
            (-t / 10.0).exp() * (2.0 + wave)
        })
        .collect()
}

proptest! {
    #[test]
    fn parseval(x in prop::collection::vec(-1.0f64..1.0, 1..200), h in 0.01f64..1.0) {
        let x = if x.len() % 2 == 0 { x[1..].to_vec() } else { x };
        let s = sample_spectrum(&x, h, 1);
        let half: f64 = s.magnitude[1..].iter().map(|m| m * m).sum();
        let total = s.magnitude[0].powi(2) + 2.0 * half;
        let energy = x.iter().map(|v| v * v).sum::<f64>() * h * h * x.len() as f64;
        prop_assert!((total - energy).abs() <= 1e-9 * energy.max(1e-300));
    }

    #[test]
    fn bandwidth_is_scale_invariant(coeffs in prop::collection::vec(-0.5f64..0.5, 3), scale in 1e-6f64..1e6) {
        let x = smooth(&coeffs, 4001, 0.04);
        let y: Vec<f64> = x.iter().map(|v| v * scale).collect();
        let a = bandwidth_w01(&sample_spectrum(&x, 0.04, 8)).unwrap();
        let b = bandwidth_w01(&sample_spectrum(&y, 0.04, 8)).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * a);
    }

    #[test]
    fn padding_refines_within_a_bin(coeffs in prop::collection::vec(-0.5f64..0.5, 3)) {
        let (n, h) = (4001, 0.04);
        let x = smooth(&coeffs, n, h);
        let a = bandwidth_w01(&sample_spectrum(&x, h, 8)).unwrap();
        let b = bandwidth_w01(&sample_spectrum(&x, h, 16)).unwrap();
        let bin = 2.0 * std::f64::consts::PI / (n as f64 * h);
        prop_assert!((a - b).abs() < bin);
    }

    #[test]
    fn dimensionful_scales_inversely_with_time(w in 0.0f64..100.0, t in 1e-7f64..1e-4) {
        let a = to_dimensionful(w, 160.0, t);
        let b = to_dimensionful(w, 160.0, 2.0 * t);
        prop_assert!((a - 2.0 * b).abs() <= 1e-12 * a.max(1.0));
    }
}
