//! Finite-precision robustness: shift one sweep parameter by one unit in its
//! last printed digit and re-evaluate `Tr P` with the control held fixed.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::control::{GateFrame, Sweep};
use crate::error::{Error, Result};
use crate::metrics::trace_p;
use crate::noc::{self, ControlModification, NominalGate};

/// Sweep parameters that can be perturbed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parameter {
    Lambda,
    Eta4,
    D1,
    D4,
    C4,
}

impl Parameter {
    pub fn name(&self) -> &'static str {
        match self {
            Parameter::Lambda => "lambda",
            Parameter::Eta4 => "eta4",
            Parameter::D1 => "d1",
            Parameter::D4 => "d4",
            Parameter::C4 => "c4",
        }
    }

    /// Decimal exponent of the last printed digit of the optimized value.
    pub fn last_digit_exponent(&self, sweep: &Sweep) -> Result<i32> {
        match (self, sweep) {
            (Parameter::Lambda, Sweep::One(_)) => Ok(-3),
            (Parameter::Eta4, Sweep::One(_)) => Ok(-7),
            (Parameter::Lambda, Sweep::Two(_)) => Ok(-1),
            (Parameter::Eta4, Sweep::Two(_)) => Ok(-5),
            (Parameter::D1, Sweep::Two(_)) => Ok(-3),
            (Parameter::D4 | Parameter::C4, Sweep::Two(_)) => Ok(-4),
            _ => Err(Error::Unsupported(format!(
                "parameter {} does not exist for a one-qubit sweep",
                self.name()
            ))),
        }
    }

    pub fn get(&self, sweep: &Sweep) -> Result<f64> {
        self.last_digit_exponent(sweep)?;
        Ok(match (self, sweep) {
            (Parameter::Lambda, Sweep::One(p)) => p.lambda,
            (Parameter::Eta4, Sweep::One(p)) => p.eta4,
            (Parameter::Lambda, Sweep::Two(p)) => p.lambda,
            (Parameter::Eta4, Sweep::Two(p)) => p.eta4,
            (Parameter::D1, Sweep::Two(p)) => p.d1,
            (Parameter::D4, Sweep::Two(p)) => p.d4,
            (Parameter::C4, Sweep::Two(p)) => p.c4,
            _ => unreachable!(),
        })
    }

    pub fn set(&self, sweep: &Sweep, value: f64) -> Result<Sweep> {
        self.last_digit_exponent(sweep)?;
        let mut out = *sweep;
        match (self, &mut out) {
            (Parameter::Lambda, Sweep::One(p)) => p.lambda = value,
            (Parameter::Eta4, Sweep::One(p)) => p.eta4 = value,
            (Parameter::Lambda, Sweep::Two(p)) => p.lambda = value,
            (Parameter::Eta4, Sweep::Two(p)) => p.eta4 = value,
            (Parameter::D1, Sweep::Two(p)) => p.d1 = value,
            (Parameter::D4, Sweep::Two(p)) => p.d4 = value,
            (Parameter::C4, Sweep::Two(p)) => p.c4 = value,
            _ => unreachable!(),
        }
        Ok(out)
    }

    /// Value shifted by `units` in the last printed digit, rounded to that
    /// digit so that e.g. `7.820 + 1` is exactly the double nearest `7.821`.
    pub fn shifted(&self, sweep: &Sweep, units: i64) -> Result<f64> {
        let e = self.last_digit_exponent(sweep)?;
        let v = self.get(sweep)?;
        let scale = 10f64.powi(-e);
        let n = (v * scale).round() as i64 + units;
        Ok(n as f64 / scale)
    }
}

impl fmt::Display for Parameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Parameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            Parameter::Lambda,
            Parameter::Eta4,
            Parameter::D1,
            Parameter::D4,
            Parameter::C4,
        ]
        .into_iter()
        .find(|p| p.name().eq_ignore_ascii_case(s.trim()))
        .ok_or_else(|| Error::Config {
            path: "param".into(),
            reason: format!("unknown parameter `{s}` (expected lambda, eta4, d1, d4, c4)"),
        })
    }
}

/// One perturbed evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensitivityRow {
    pub parameter: Parameter,
    pub value: f64,
    pub trace_p_with_noc: f64,
    pub trace_p_without_noc: f64,
}

/// `Tr P` with and without the frozen control at `units` last-digit steps
/// away from the optimum. Each perturbed sweep is read out in its own frame.
pub fn evaluate_shift(
    nominal: &NominalGate,
    control: &ControlModification,
    parameter: Parameter,
    units: i64,
) -> Result<SensitivityRow> {
    let value = parameter.shifted(&nominal.sweep, units)?;
    let sweep = parameter.set(&nominal.sweep, value)?;
    let frame = GateFrame::for_sweep(&sweep);
    let target = nominal.gate.target();
    let with = noc::apply_control_on(&sweep, nominal.grid, &frame, Some(control), None)?;
    let without = noc::apply_control_on(&sweep, nominal.grid, &frame, None, None)?;
    Ok(SensitivityRow {
        parameter,
        value,
        trace_p_with_noc: trace_p(&with, &target)?,
        trace_p_without_noc: trace_p(&without, &target)?,
    })
}

/// Rows for shifts of −1, 0 and +1.
pub fn run_sensitivity(
    nominal: &NominalGate,
    control: &ControlModification,
    parameter: Parameter,
) -> Result<Vec<SensitivityRow>> {
    [-1i64, 0, 1]
        .into_par_iter()
        .map(|u| evaluate_shift(nominal, control, parameter, u))
        .collect()
}
