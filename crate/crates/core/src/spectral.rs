//! Fourier spectra of control modifications and the `ω₀.₁` bandwidth.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::noc::ControlModification;

/// Zero-padding factor applied before the transform.
pub const PADDING: usize = 8;

/// Magnitude spectrum on non-negative angular frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub omega: Vec<f64>,
    pub magnitude: Vec<f64>,
    pub component: usize,
}

/// Spectrum of uniformly spaced real samples with spacing `h`, normalized
/// as `|h Σ_k x_k e^{−iωτ_k}|`. No window is applied.
pub fn sample_spectrum(samples: &[f64], h: f64, padding: usize) -> Spectrum {
    let len = samples.len() * padding.max(1);
    let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    buf.resize(len, Complex64::new(0.0, 0.0));
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    let bins = len / 2 + 1;
    let step = 2.0 * std::f64::consts::PI / (len as f64 * h);
    Spectrum {
        omega: (0..bins).map(|k| k as f64 * step).collect(),
        magnitude: buf[..bins].iter().map(|z| z.norm() * h).collect(),
        component: 0,
    }
}

/// Spectrum of one component (0 = x, 1 = y, 2 = z) of a control modification.
pub fn control_spectrum(control: &ControlModification, component: usize) -> Spectrum {
    let s = sample_spectrum(&control.component(component), control.grid.h(), PADDING);
    Spectrum { component, ..s }
}

/// Smallest `ω` above which the magnitude stays below 10% of its `ω = 0`
/// value, found from the last up-crossing and linear interpolation.
pub fn bandwidth_w01(s: &Spectrum) -> Result<f64> {
    let peak = s.magnitude.first().copied().unwrap_or(0.0);
    if peak <= 0.0 {
        return Err(Error::BandwidthUndefined);
    }
    let thr = 0.1 * peak;
    let last_above = s
        .magnitude
        .iter()
        .rposition(|&m| m >= thr)
        .expect("the zero bin is above threshold");
    if last_above + 1 >= s.magnitude.len() {
        return Err(Error::BandwidthUndefined);
    }
    let (m0, m1) = (s.magnitude[last_above], s.magnitude[last_above + 1]);
    let (w0, w1) = (s.omega[last_above], s.omega[last_above + 1]);
    Ok(w0 + (m0 - thr) / (m0 - m1) * (w1 - w0))
}

/// `ω̄₀.₁ = ω₀.₁ τ₀ / t_phys`, in MHz.
pub fn to_dimensionful(omega01: f64, tau0: f64, t_phys: f64) -> f64 {
    omega01 * tau0 / t_phys / 1e6
}
