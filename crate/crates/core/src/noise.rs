//! Shot-noise model of phase jitter in the twist profile.
//!
//! A realization is a sum of square pulses of half-width `τ_f` with Gaussian
//! amplitudes at uniformly distributed centers, the count drawn from a
//! Poisson law with mean `n̄ τ₀`, `n̄ = P̄ / (2σ²τ_f)`. Each realization is
//! rescaled so its mean power over the sweep is exactly `P̄`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};
use rayon::prelude::*;

use crate::control::GateFrame;
use crate::error::{Error, Result};
use crate::metrics::trace_p;
use crate::noc::{self, ControlModification, NominalGate};

const MAX_ATTEMPTS: u32 = 64;

/// Shot-noise parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams {
    /// Target mean power `P̄`.
    pub mean_power: f64,
    /// Amplitude standard deviation `σ`.
    pub sigma: f64,
    /// Pulse half-width `τ_f`.
    pub tau_f: f64,
}

impl NoiseParams {
    /// Defaults for a sweep of the given size.
    pub fn default_for(qubits: usize, mean_power: f64) -> Self {
        Self {
            mean_power,
            sigma: 0.1,
            tau_f: if qubits == 1 { 0.3 } else { 0.1 },
        }
    }

    /// Pulse rate `n̄ = P̄ / (2σ²τ_f)`.
    pub fn rate(&self) -> f64 {
        self.mean_power / (2.0 * self.sigma * self.sigma * self.tau_f)
    }

    /// True when pulses are long enough to blur the sweep.
    pub fn pulses_too_wide(&self, tau0: f64) -> bool {
        2.0 * self.tau_f > tau0 / 10.0
    }
}

/// One sampled phase-noise profile `δφ(τ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseRealization {
    pub tau0: f64,
    pub tau_f: f64,
    pub centers: Vec<f64>,
    /// Amplitudes before rescaling.
    pub amplitudes: Vec<f64>,
    pub scale: f64,
    breaks: Vec<f64>,
    levels: Vec<f64>,
}

impl NoiseRealization {
    /// The zero profile.
    pub fn silent(tau0: f64, tau_f: f64) -> Self {
        Self::build(tau0, tau_f, Vec::new(), Vec::new(), 0.0)
    }

    pub fn build(
        tau0: f64,
        tau_f: f64,
        centers: Vec<f64>,
        amplitudes: Vec<f64>,
        scale: f64,
    ) -> Self {
        let mut events: Vec<(f64, f64)> = Vec::with_capacity(2 * centers.len());
        for (&c, &x) in centers.iter().zip(&amplitudes) {
            events.push((c - tau_f, x));
            events.push((c + tau_f, -x));
        }
        events.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut breaks = Vec::with_capacity(events.len());
        let mut levels = vec![0.0];
        let mut acc = 0.0;
        for (t, dx) in events {
            acc += dx;
            if breaks.last() == Some(&t) {
                *levels.last_mut().unwrap() = acc;
            } else {
                breaks.push(t);
                levels.push(acc);
            }
        }
        Self {
            tau0,
            tau_f,
            centers,
            amplitudes,
            scale,
            breaks,
            levels,
        }
    }

    pub fn count(&self) -> usize {
        self.centers.len()
    }

    /// Unscaled profile: left and right limits at `tau`.
    fn raw_limits(&self, tau: f64) -> (f64, f64) {
        let right = self.breaks.partition_point(|&b| b <= tau);
        let left = self.breaks.partition_point(|&b| b < tau);
        (self.levels[left], self.levels[right])
    }

    /// `δφ(τ)`, taking the midpoint value exactly at a pulse edge.
    pub fn evaluate(&self, tau: f64) -> f64 {
        if self.scale == 0.0 {
            return 0.0;
        }
        let (l, r) = self.raw_limits(tau);
        self.scale * 0.5 * (l + r)
    }

    /// `(1/τ₀) ∫ δΦ_raw² dτ` over the sweep, pulses clipped at the edges.
    pub fn raw_power(&self) -> f64 {
        let (lo, hi) = (-self.tau0 / 2.0, self.tau0 / 2.0);
        let mut total = 0.0;
        let mut prev = lo;
        let mut level = self.levels[self.breaks.partition_point(|&b| b <= lo)];
        for (i, &b) in self.breaks.iter().enumerate() {
            if b <= lo {
                continue;
            }
            let end = b.min(hi);
            total += level * level * (end - prev);
            if b >= hi {
                prev = hi;
                break;
            }
            prev = b;
            level = self.levels[i + 1];
        }
        if prev < hi {
            total += level * level * (hi - prev);
        }
        total / self.tau0
    }

    /// Mean power of the rescaled profile.
    pub fn mean_power(&self) -> f64 {
        self.scale * self.scale * self.raw_power()
    }
}

/// Generator for trial `trial` of an ensemble seeded by `seed`.
pub fn child_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Draw a realization normalized to `p.mean_power`.
pub fn sample_realization(
    p: &NoiseParams,
    tau0: f64,
    seed: u64,
    trial: u32,
) -> Result<NoiseRealization> {
    if p.mean_power == 0.0 {
        return Ok(NoiseRealization::silent(tau0, p.tau_f));
    }
    let poisson = Poisson::new(p.rate() * tau0).map_err(|e| Error::Config {
        path: "noise.power".into(),
        reason: e.to_string(),
    })?;
    let normal = Normal::new(0.0, p.sigma).map_err(|e| Error::Config {
        path: "noise.sigma".into(),
        reason: e.to_string(),
    })?;
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = child_rng(seed, (u64::from(attempt) << 32) | u64::from(trial));
        let count = poisson.sample(&mut rng) as usize;
        let mut centers = Vec::with_capacity(count);
        let mut amplitudes = Vec::with_capacity(count);
        for _ in 0..count {
            centers.push(rng.random_range(-tau0 / 2.0..tau0 / 2.0));
            amplitudes.push(normal.sample(&mut rng));
        }
        let r = NoiseRealization::build(tau0, p.tau_f, centers, amplitudes, 1.0);
        let raw = r.raw_power();
        if raw > 0.0 {
            let scale = (p.mean_power / raw).sqrt();
            return Ok(NoiseRealization { scale, ..r });
        }
    }
    Err(Error::DegenerateRealization {
        attempts: MAX_ATTEMPTS,
    })
}

/// Phase and timing jitter implied by a mean power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JitterReport {
    pub sigma_phi: f64,
    /// Seconds.
    pub sigma_t: f64,
    pub f_clock: f64,
}

pub fn jitter_report(mean_power: f64, f_clock: f64) -> JitterReport {
    let sigma_phi = mean_power.sqrt();
    JitterReport {
        sigma_phi,
        sigma_t: sigma_phi / (2.0 * std::f64::consts::PI * f_clock),
        f_clock,
    }
}

/// Ensemble statistics of `Tr P`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleStats {
    pub mean: f64,
    /// Sample standard deviation (divisor `n − 1`).
    pub std: f64,
    pub trials: Vec<f64>,
}

impl EnsembleStats {
    pub fn from_trials(trials: Vec<f64>) -> Self {
        let n = trials.len() as f64;
        let mean = trials.iter().sum::<f64>() / n;
        let std = if trials.len() > 1 {
            (trials.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Self { mean, std, trials }
    }
}

/// `Tr P` of the controlled gate under `realizations` independent noise
/// samples. The control is the one computed for the noise-free sweep.
pub fn noise_ensemble(
    nominal: &NominalGate,
    control: &ControlModification,
    p: &NoiseParams,
    realizations: u32,
    seed: u64,
) -> Result<EnsembleStats> {
    let target = nominal.gate.target();
    let frame: &GateFrame = &nominal.frame;
    let trials = (0..realizations)
        .into_par_iter()
        .map(|k| {
            let r = sample_realization(p, nominal.sweep.tau0(), seed, k)?;
            let u = noc::apply_control_on(
                &nominal.sweep,
                nominal.grid,
                frame,
                Some(control),
                Some(&r),
            )?;
            trace_p(&u, &target)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EnsembleStats::from_trials(trials))
}
