//! Experiment configuration, orchestration and CSV output.
//!
//! Configuration is a JSON document. Every key is optional; an empty file
//! yields the defaults. Unknown keys are rejected.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::control::Sweep;
use crate::error::{Error, Result};
use crate::metrics::{ErrorReport, Gate};
use crate::noc::{self, ImprovedGateResult, NominalGate, Strategy};
use crate::noise::{self, EnsembleStats, JitterReport, NoiseParams};
use crate::propagate::TimeGrid;
use crate::sensitivity::{self, Parameter, SensitivityRow};
use crate::spectral::{self, Spectrum};

/// Environment variable capping worker threads (0 or unset = automatic).
pub const THREADS_ENV: &str = "NOCGF_THREADS";

/// Which strategy to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyChoice {
    /// Ansatz for one qubit, Riccati for two.
    #[default]
    Auto,
    Ansatz,
    Riccati,
}

impl StrategyChoice {
    pub fn resolve(self, qubits: usize) -> Strategy {
        match self {
            StrategyChoice::Auto => Strategy::for_qubits(qubits),
            StrategyChoice::Ansatz => Strategy::Ansatz,
            StrategyChoice::Riccati => Strategy::Riccati,
        }
    }
}

/// Replacement values for sweep parameters of one gate.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepOverride {
    pub lambda: Option<f64>,
    pub eta4: Option<f64>,
    pub tau0: Option<f64>,
    pub d1: Option<f64>,
    pub d2: Option<f64>,
    pub d3: Option<f64>,
    pub d4: Option<f64>,
    pub c4: Option<f64>,
}

impl SweepOverride {
    pub fn apply(&self, sweep: Sweep, path: &str) -> Result<Sweep> {
        let mut out = sweep;
        match &mut out {
            Sweep::One(p) => {
                let two_only = [
                    ("d1", self.d1),
                    ("d2", self.d2),
                    ("d3", self.d3),
                    ("d4", self.d4),
                    ("c4", self.c4),
                ];
                if let Some((name, _)) = two_only.iter().find(|(_, v)| v.is_some()) {
                    return Err(Error::Config {
                        path: format!("{path}.{name}"),
                        reason: "not a parameter of a one-qubit sweep".into(),
                    });
                }
                set(&mut p.lambda, self.lambda);
                set(&mut p.eta4, self.eta4);
                set(&mut p.tau0, self.tau0);
            }
            Sweep::Two(p) => {
                set(&mut p.lambda, self.lambda);
                set(&mut p.eta4, self.eta4);
                set(&mut p.tau0, self.tau0);
                set(&mut p.d1, self.d1);
                set(&mut p.d2, self.d2);
                set(&mut p.d3, self.d3);
                set(&mut p.d4, self.d4);
                set(&mut p.c4, self.c4);
            }
        }
        for (name, v) in [("lambda", self.lambda), ("tau0", self.tau0)] {
            if let Some(v) = v {
                positive(&format!("{path}.{name}"), v)?;
            }
        }
        Ok(out)
    }
}

fn set(dst: &mut f64, v: Option<f64>) {
    if let Some(v) = v {
        *dst = v;
    }
}

/// Noise block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseConfig {
    /// Mean noise power `P̄`.
    pub power: f64,
    /// Pulse amplitude standard deviation.
    pub sigma: f64,
    /// Pulse half-width; `null` selects 0.3 (one qubit) or 0.1 (two qubits).
    pub tau_f: Option<f64>,
    pub realizations: u32,
    /// Clock frequency used for timing-jitter conversion, in Hz.
    pub f_clock_hz: f64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self {
            power: 0.001,
            sigma: 0.1,
            tau_f: None,
            realizations: 10,
            f_clock_hz: 1e9,
        }
    }
}

/// A complete experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub gates: Vec<Gate>,
    pub strategy: StrategyChoice,
    pub overrides: BTreeMap<Gate, SweepOverride>,
    /// Integration steps for every gate; `null` selects per-system defaults.
    pub steps: Option<usize>,
    pub seed: u64,
    pub noise: NoiseConfig,
    /// Physical gate time of one-qubit sweeps, in seconds.
    pub t_phys_1q: f64,
    /// Physical gate time of two-qubit sweeps, in seconds.
    pub t_phys_2q: f64,
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            gates: Gate::ALL.to_vec(),
            strategy: StrategyChoice::Auto,
            overrides: BTreeMap::new(),
            steps: None,
            seed: 1,
            noise: NoiseConfig::default(),
            t_phys_1q: 1e-6,
            t_phys_2q: 5e-6,
            out: None,
        }
    }
}

fn positive(path: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Config {
            path: path.into(),
            reason: format!("must be a positive finite number, got {v}"),
        })
    }
}

impl ExperimentConfig {
    /// Range checks on every field.
    pub fn validate(&self) -> Result<()> {
        if self.gates.is_empty() {
            return Err(Error::Config {
                path: "gates".into(),
                reason: "at least one gate is required".into(),
            });
        }
        if let Some(steps) = self.steps {
            if steps < 100 {
                return Err(Error::Config {
                    path: "steps".into(),
                    reason: format!("must be at least 100, got {steps}"),
                });
            }
        }
        let n = &self.noise;
        if !(n.power.is_finite() && n.power >= 0.0) {
            return Err(Error::Config {
                path: "noise.power".into(),
                reason: format!("must be a non-negative finite number, got {}", n.power),
            });
        }
        positive("noise.sigma", n.sigma)?;
        if let Some(t) = n.tau_f {
            positive("noise.tau_f", t)?;
        }
        if n.realizations == 0 {
            return Err(Error::Config {
                path: "noise.realizations".into(),
                reason: "must be at least 1".into(),
            });
        }
        positive("noise.f_clock_hz", n.f_clock_hz)?;
        positive("t_phys_1q", self.t_phys_1q)?;
        positive("t_phys_2q", self.t_phys_2q)?;
        for (gate, o) in &self.overrides {
            o.apply(gate.sweep(), &format!("overrides.{gate}"))?;
        }
        Ok(())
    }

    /// Sweep of a gate with overrides applied.
    pub fn sweep_for(&self, gate: Gate) -> Result<Sweep> {
        match self.overrides.get(&gate) {
            Some(o) => o.apply(gate.sweep(), &format!("overrides.{gate}")),
            None => Ok(gate.sweep()),
        }
    }

    pub fn grid_for(&self, sweep: &Sweep) -> TimeGrid {
        match self.steps {
            Some(steps) => TimeGrid::new(sweep.tau0(), steps),
            None => TimeGrid::default_for(sweep),
        }
    }

    pub fn noise_params(&self, qubits: usize, power: f64) -> NoiseParams {
        let d = NoiseParams::default_for(qubits, power);
        NoiseParams {
            mean_power: power,
            sigma: self.noise.sigma,
            tau_f: self.noise.tau_f.unwrap_or(d.tau_f),
        }
    }

    pub fn t_phys(&self, qubits: usize) -> f64 {
        if qubits == 1 {
            self.t_phys_1q
        } else {
            self.t_phys_2q
        }
    }

    /// Keep only `gate`.
    pub fn with_gate(&self, gate: Gate) -> Self {
        Self {
            gates: vec![gate],
            ..self.clone()
        }
    }
}

/// Parse and validate a configuration document.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let config = if text.trim().is_empty() {
        ExperimentConfig::default()
    } else {
        serde_json::from_str(text).map_err(|e| Error::Config {
            path: "<document>".into(),
            reason: e.to_string(),
        })?
    };
    config.validate()?;
    Ok(config)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text).map_err(|e| match e {
        Error::Config { path: p, reason } if p == "<document>" => Error::Config {
            path: path.display().to_string(),
            reason,
        },
        other => other,
    })
}

/// Apply the thread cap from the environment to the global pool.
pub fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().map_err(|_| Error::Config {
        path: THREADS_ENV.into(),
        reason: format!("expected a non-negative integer, got `{raw}`"),
    })?;
    if n > 0 {
        // A pool that already exists keeps its size.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    Ok(())
}

/// Nominal gate and its improvement.
#[derive(Debug, Clone)]
pub struct GateRun {
    pub nominal: NominalGate,
    pub result: ImprovedGateResult,
}

pub fn run_gate(config: &ExperimentConfig, gate: Gate) -> Result<GateRun> {
    let sweep = config.sweep_for(gate)?;
    let grid = config.grid_for(&sweep);
    let nominal = NominalGate::new(gate, sweep, grid)?;
    let result = noc::improve_nominal(&nominal, config.strategy.resolve(sweep.qubits()))?;
    Ok(GateRun { nominal, result })
}

/// Run every configured gate, in declaration order of the gate set.
pub fn run_gates(config: &ExperimentConfig) -> Result<Vec<GateRun>> {
    sorted_gates(config)
        .into_par_iter()
        .map(|g| run_gate(config, g))
        .collect()
}

fn sorted_gates(config: &ExperimentConfig) -> Vec<Gate> {
    let mut gates = config.gates.clone();
    gates.sort();
    gates.dedup();
    gates
}

/// One row of the ideal-control table.
#[derive(Debug, Clone, PartialEq)]
pub struct IdealRow {
    pub gate: Gate,
    pub steps: usize,
    pub nominal: ErrorReport,
    pub improved: ErrorReport,
}

pub fn ideal_rows(runs: &[GateRun]) -> Vec<IdealRow> {
    runs.iter()
        .map(|r| IdealRow {
            gate: r.nominal.gate,
            steps: r.nominal.grid.steps,
            nominal: r.result.nominal_report,
            improved: r.result.improved_report,
        })
        .collect()
}

pub fn run_ideal_table(config: &ExperimentConfig) -> Result<Vec<IdealRow>> {
    Ok(ideal_rows(&run_gates(config)?))
}

/// One row of the bandwidth table.
#[derive(Debug, Clone, PartialEq)]
pub struct BandwidthRow {
    pub gate: Gate,
    pub steps: usize,
    pub component: usize,
    pub omega01: f64,
    pub tau0: f64,
    pub t_phys: f64,
    pub omega01_mhz: f64,
}

pub fn bandwidth_rows(
    config: &ExperimentConfig,
    runs: &[GateRun],
    component: usize,
) -> Result<Vec<BandwidthRow>> {
    runs.iter()
        .map(|r| {
            let s = spectral::control_spectrum(&r.result.control, component);
            let omega01 = spectral::bandwidth_w01(&s)?;
            let tau0 = r.nominal.sweep.tau0();
            let t_phys = config.t_phys(r.nominal.sweep.qubits());
            Ok(BandwidthRow {
                gate: r.nominal.gate,
                steps: r.nominal.grid.steps,
                component,
                omega01,
                tau0,
                t_phys,
                omega01_mhz: spectral::to_dimensionful(omega01, tau0, t_phys),
            })
        })
        .collect()
}

pub fn run_bandwidth_table(config: &ExperimentConfig) -> Result<Vec<BandwidthRow>> {
    bandwidth_rows(config, &run_gates(config)?, 0)
}

/// Sensitivity rows for every configured gate that has `parameter`.
pub fn run_sensitivity_sweep(
    config: &ExperimentConfig,
    parameter: Parameter,
) -> Result<Vec<(Gate, SensitivityRow)>> {
    let mut gates = Vec::new();
    for g in sorted_gates(config) {
        if parameter.last_digit_exponent(&config.sweep_for(g)?).is_ok() {
            gates.push(g);
        }
    }
    if gates.is_empty() {
        return Err(Error::Config {
            path: "param".into(),
            reason: format!("no selected gate has parameter {parameter}"),
        });
    }
    let mut out = Vec::new();
    for g in gates {
        let run = run_gate(config, g)?;
        for row in sensitivity::run_sensitivity(&run.nominal, &run.result.control, parameter)? {
            out.push((g, row));
        }
    }
    Ok(out)
}

/// One (gate, power) point of a jitter sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct JitterRow {
    pub gate: Gate,
    pub power: f64,
    pub jitter: JitterReport,
    pub stats: EnsembleStats,
    pub seed: u64,
}

pub fn run_jitter_sweep(config: &ExperimentConfig, powers: &[f64]) -> Result<Vec<JitterRow>> {
    if let Some(&p) = powers.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
        return Err(Error::Config {
            path: "powers".into(),
            reason: format!("noise powers must be non-negative, got {p}"),
        });
    }
    let mut sorted = powers.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut out = Vec::new();
    for run in run_gates(config)? {
        let qubits = run.nominal.sweep.qubits();
        for &power in &sorted {
            let p = config.noise_params(qubits, power);
            let stats = noise::noise_ensemble(
                &run.nominal,
                &run.result.control,
                &p,
                config.noise.realizations,
                config.seed,
            )?;
            out.push(JitterRow {
                gate: run.nominal.gate,
                power,
                jitter: noise::jitter_report(power, config.noise.f_clock_hz),
                stats,
                seed: config.seed,
            });
        }
    }
    Ok(out)
}

/// Spectrum of one control component for one gate.
pub fn run_spectrum(config: &ExperimentConfig, gate: Gate, component: usize) -> Result<Spectrum> {
    let run = run_gate(config, gate)?;
    Ok(spectral::control_spectrum(&run.result.control, component))
}

/// A CSV table.
#[derive(Debug, Clone, PartialEq)]
pub struct Csv {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Csv {
    /// Body without the comment line.
    pub fn body(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for row in &self.rows {
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }

    /// Comment line with version and time, then the body.
    pub fn render(&self) -> String {
        format!("{}\n{}", header_line(), self.body())
    }
}

/// `# nocgf <version> generated_unix=<seconds>`.
pub fn header_line() -> String {
    let secs = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    format!(
        "# nocgf {} generated_unix={secs}",
        env!("CARGO_PKG_VERSION")
    )
}

/// Six significant digits; scientific below `1e−3` in magnitude.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let a = x.abs();
    if !(1e-3..1e15).contains(&a) {
        return format!("{x:.5e}");
    }
    let digits = a.log10().floor() as i32;
    let decimals = (5 - digits).max(0) as usize;
    format!("{x:.decimals$}")
}

pub fn ideal_csv(rows: &[IdealRow]) -> Csv {
    Csv {
        columns: vec![
            "gate",
            "steps",
            "trace_p_nominal",
            "trace_p_noc",
            "d_star_noc",
            "fidelity_noc",
        ],
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    r.gate.to_string(),
                    r.steps.to_string(),
                    format_float(r.nominal.trace_p),
                    format_float(r.improved.trace_p),
                    format_float(r.improved.d_star),
                    format_float(r.improved.fidelity),
                ]
            })
            .collect(),
    }
}

pub fn bandwidth_csv(rows: &[BandwidthRow]) -> Csv {
    Csv {
        columns: vec![
            "gate",
            "steps",
            "component",
            "omega01",
            "tau0",
            "t_phys_s",
            "omega01_mhz",
        ],
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    r.gate.to_string(),
                    r.steps.to_string(),
                    ["x", "y", "z"][r.component].to_string(),
                    format_float(r.omega01),
                    format_float(r.tau0),
                    format_float(r.t_phys),
                    format_float(r.omega01_mhz),
                ]
            })
            .collect(),
    }
}

pub fn sensitivity_csv(rows: &[(Gate, SensitivityRow)]) -> Csv {
    Csv {
        columns: vec![
            "gate",
            "parameter",
            "value",
            "trp_with_noc",
            "trp_without_noc",
        ],
        rows: rows
            .iter()
            .map(|(g, r)| {
                vec![
                    g.to_string(),
                    r.parameter.to_string(),
                    format_float(r.value),
                    format_float(r.trace_p_with_noc),
                    format_float(r.trace_p_without_noc),
                ]
            })
            .collect(),
    }
}

pub fn jitter_csv(rows: &[JitterRow]) -> Csv {
    Csv {
        columns: vec![
            "gate",
            "power",
            "sigma_phi",
            "sigma_t_ps",
            "realizations",
            "seed",
            "mean_trace_p",
            "std_trace_p",
        ],
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    r.gate.to_string(),
                    format_float(r.power),
                    format_float(r.jitter.sigma_phi),
                    format_float(r.jitter.sigma_t * 1e12),
                    r.stats.trials.len().to_string(),
                    r.seed.to_string(),
                    format_float(r.stats.mean),
                    format_float(r.stats.std),
                ]
            })
            .collect(),
    }
}

pub fn spectrum_csv(s: &Spectrum) -> Csv {
    Csv {
        columns: vec!["omega", "magnitude"],
        rows: s
            .omega
            .iter()
            .zip(&s.magnitude)
            .map(|(w, m)| vec![format_float(*w), format_float(*m)])
            .collect(),
    }
}

/// Human-readable summary of one improved gate.
pub fn improve_summary(run: &GateRun) -> String {
    let mut s = String::new();
    let r = &run.result;
    let _ = writeln!(s, "gate      {}", r.gate);
    let _ = writeln!(s, "steps     {}", run.nominal.grid.steps);
    for (label, rep) in [("nominal", &r.nominal_report), ("noc", &r.improved_report)] {
        let _ = writeln!(
            s,
            "{label:<9} trace_p={} d_star={} fidelity={}",
            format_float(rep.trace_p),
            format_float(rep.d_star),
            format_float(rep.fidelity)
        );
    }
    s
}
