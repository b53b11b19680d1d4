use nocgf::noise::{jitter_report, sample_realization, EnsembleStats, NoiseParams};
use proptest::prelude::*;

proptest! {
    #[test]
    fn realizations_are_deterministic(seed in any::<u64>(), trial in 0u32..1000) {
        let p = NoiseParams::default_for(1, 0.001);
        let a = sample_realization(&p, 160.0, seed, trial).unwrap();
        let b = sample_realization(&p, 160.0, seed, trial).unwrap();
        prop_assert_eq!(&a, &b);
        let c = sample_realization(&p, 160.0, seed, trial + 1).unwrap();
        prop_assert_ne!(a.centers, c.centers);
    }

    #[test]
    fn power_is_normalized(seed in any::<u64>(), power in 1e-6f64..0.05, two in any::<bool>()) {
        let (qubits, tau0) = if two { (2, 120.0) } else { (1, 160.0) };
        let p = NoiseParams::default_for(qubits, power);
        let r = sample_realization(&p, tau0, seed, 0).unwrap();
        prop_assert!((r.mean_power() - power).abs() <= 1e-12 * power);
    }
}

#[test]
fn time_average_matches_power() {
    let p = NoiseParams::default_for(1, 0.001);
    let r = sample_realization(&p, 160.0, 99, 3).unwrap();
    let n = 400_000;
    let h = 160.0 / n as f64;
    let avg = (0..n)
        .map(|k| r.evaluate(-80.0 + (k as f64 + 0.5) * h).powi(2))
        .sum::<f64>()
        / n as f64;
    assert!((avg - 0.001).abs() < 1e-5, "{avg}");
}

#[test]
fn count_and_amplitude_moments() {
    let p = NoiseParams::default_for(1, 0.001);
    let n = 10_000u32;
    let mut counts = Vec::with_capacity(n as usize);
    let mut amps = Vec::new();
    for trial in 0..n {
        let r = sample_realization(&p, 160.0, 2024, trial).unwrap();
        counts.push(r.count() as f64);
        amps.extend_from_slice(&r.amplitudes);
    }
    let mean_count = p.rate() * 160.0;
    let c = EnsembleStats::from_trials(counts);
    let se = (mean_count / f64::from(n)).sqrt();
    assert!(
        (c.mean - mean_count).abs() < 3.0 * se,
        "{} vs {mean_count}",
        c.mean
    );
    let m = amps.len() as f64;
    let var = amps.iter().map(|x| x * x).sum::<f64>() / m;
    let s2 = p.sigma * p.sigma;
    assert!(
        (var - s2).abs() < 3.0 * s2 * (2.0 / m).sqrt(),
        "{var} vs {s2}"
    );
}

#[test]
fn jitter_conversions() {
    let ps = |p: f64| jitter_report(p, 1e9).sigma_t * 1e12;
    for (p, expected) in [
        (0.001, 5.03f64),
        (0.005, 11.3),
        (0.008, 14.2),
        (6.25e-5, 1.26),
    ] {
        let got = ps(p);
        let digits = 10f64.powi(2 - expected.log10().floor() as i32);
        assert_eq!((got * digits).round() / digits, expected);
    }
}

#[test]
fn zero_power_is_silent() {
    let r = sample_realization(&NoiseParams::default_for(2, 0.0), 120.0, 5, 0).unwrap();
    assert_eq!(r.count(), 0);
    assert_eq!(r.mean_power(), 0.0);
}
