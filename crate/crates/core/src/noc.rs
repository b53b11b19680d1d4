//! Neighboring optimal control around a nominal TRP gate.
//!
//! Strategy 1 (one qubit) uses the decaying Lagrange-multiplier ansatz
//! `Δλ(τ) = −e^{−(τ+τ₀/2)/10} w` with `w = Δb/20`, which gives the control
//! `Δf(τ) = e^{−(τ+τ₀/2)/10} G†(τ) w`. `Q(τ)` is never formed.
//!
//! Strategy 2 (two qubits) takes `S = I₁₆`, `R = I₃`, `Q = G G†`, so the
//! Riccati equation is satisfied identically and the feedback law is
//! `Δf = −G† Δy` with `Δy' = −G G† Δy`, `Δy(−τ₀/2) = −Δb`.
//!
//! `δβ` is Hermitized before use, so both `G† w` and `G† Δy` are real up to
//! rounding; the real part is kept and the discarded residue is checked.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::control::{self, ControlField3, DriveMatrix, GateFrame, Sweep};
use crate::error::{Error, Result};
use crate::lincore::{self, devectorize, CMatrix, CVector};
use crate::metrics::{self, ErrorReport, Gate, TargetOffset};
use crate::noise::NoiseRealization;
use crate::propagate::{self, DriveSamples, Options, TimeGrid, Trajectory};

/// Decay time of the multiplier ansatz.
pub const ANSATZ_DECAY: f64 = 10.0;

/// Largest imaginary part that may be dropped from a control sample.
pub const IMAGINARY_GUARD: f64 = 1e-6;

/// Sampled control modification `Δf(τ_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlModification {
    pub grid: TimeGrid,
    pub samples: Vec<ControlField3>,
}

impl ControlModification {
    pub fn zero(grid: TimeGrid) -> Self {
        Self {
            grid,
            samples: vec![ControlField3::default(); grid.points()],
        }
    }

    /// Linear interpolation between samples `k` and `k + 1`.
    pub fn interpolate(&self, k: usize, frac: f64) -> ControlField3 {
        let a = self.samples[k].0;
        if frac == 0.0 || k + 1 >= self.samples.len() {
            return ControlField3(a);
        }
        let b = self.samples[k + 1].0;
        ControlField3([0, 1, 2].map(|j| a[j] + frac * (b[j] - a[j])))
    }

    /// Samples of one component (0 = x, 1 = y, 2 = z).
    pub fn component(&self, j: usize) -> Vec<f64> {
        self.samples.iter().map(|s| s.0[j]).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.samples
            .iter()
            .flat_map(|s| s.0)
            .fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// Solution strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Lagrange-multiplier ansatz.
    Ansatz,
    /// Constant Riccati matrix with feedback gain `G†`.
    Riccati,
}

impl Strategy {
    pub fn for_qubits(qubits: usize) -> Self {
        if qubits == 1 {
            Strategy::Ansatz
        } else {
            Strategy::Riccati
        }
    }
}

/// `Δλ(τ) = −exp[−(τ + τ₀/2)/decay] w`.
pub fn lambda_ansatz(tau: f64, w: &CVector, tau0: f64, decay: f64) -> CVector {
    w * Complex64::new(-ansatz_envelope(tau, tau0, decay), 0.0)
}

fn ansatz_envelope(tau: f64, tau0: f64, decay: f64) -> f64 {
    (-(tau + tau0 / 2.0) / decay).exp()
}

/// Weights `w = Δb / 20`.
#[derive(Debug, Clone, PartialEq)]
pub struct Strategy1Weights {
    pub w: CVector,
}

pub fn strategy1_weights(offset: &TargetOffset) -> Result<Strategy1Weights> {
    if offset.delta_b.len() != 4 {
        return Err(Error::Unsupported(
            "the multiplier ansatz applies to one-qubit gates only".into(),
        ));
    }
    Ok(Strategy1Weights {
        w: &offset.delta_b / Complex64::new(2.0 * ANSATZ_DECAY, 0.0),
    })
}

/// Real part of a complex control vector, checking the dropped residue.
fn real_control(v: &CVector) -> Result<ControlField3> {
    let residue = v.iter().fold(0.0f64, |m, z| m.max(z.im.abs()));
    if residue > IMAGINARY_GUARD {
        return Err(Error::ImaginaryResidue { residue });
    }
    Ok(ControlField3([v[0].re, v[1].re, v[2].re]))
}

/// Strategy-1 control from drive matrices at every grid point.
pub fn strategy1_control(
    g_samples: &[DMatrix<Complex64>],
    w: &Strategy1Weights,
    grid: TimeGrid,
    decay: f64,
) -> Result<ControlModification> {
    if g_samples.len() != grid.points() {
        return Err(Error::Dimension {
            expected: grid.points(),
            found: g_samples.len(),
        });
    }
    let samples = g_samples
        .iter()
        .enumerate()
        .map(|(k, g)| {
            let env = ansatz_envelope(grid.tau(k), grid.tau0, decay);
            real_control(&((g.adjoint() * &w.w) * Complex64::new(env, 0.0)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ControlModification { grid, samples })
}

/// `Σ_j Ḡ_j (G† w)_j` for one qubit.
pub fn contracted_drive(couplings_bar: &[CMatrix; 3], g: &DriveMatrix, w: &CVector) -> CMatrix {
    let coeffs = g.entries.adjoint() * w;
    let mut out = lincore::zeros(2);
    for (gb, cj) in couplings_bar.iter().zip(coeffs.iter()) {
        out += gb * *cj;
    }
    out
}

/// `[[w₁ − w₄, 2w₃], [2w₂, w₄ − w₁]]`.
pub fn contracted_closed_form(w: &CVector) -> CMatrix {
    let two = Complex64::new(2.0, 0.0);
    CMatrix::from_row_slice(2, 2, &[w[0] - w[3], two * w[2], two * w[1], w[3] - w[0]])
}

/// Strategy-2 state, gain and control.
#[derive(Debug, Clone)]
pub struct Strategy2Solution {
    /// `‖Δy(τ_k)‖` at every grid point.
    pub delta_y_norms: Vec<f64>,
    /// `Δy(τ₀/2)`.
    pub delta_y_final: CVector,
    pub control: ControlModification,
    /// Largest `‖−Q + S G R⁻¹ G† S‖` over the grid.
    pub riccati_residual: f64,
}

impl Strategy2Solution {
    /// Feedback gain `C = R⁻¹ G† S = G†`.
    pub fn gain(g: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        g.adjoint()
    }
}

/// Incremental Strategy-2 solver fed one grid point at a time.
struct Strategy2Stepper {
    h: f64,
    y: CVector,
    g_prev: Option<DMatrix<Complex64>>,
    s: DMatrix<Complex64>,
    r_inv: DMatrix<Complex64>,
    norms: Vec<f64>,
    samples: Vec<ControlField3>,
    residual: f64,
}

impl Strategy2Stepper {
    fn new(delta_b: &CVector, grid: TimeGrid) -> Self {
        let rows = delta_b.len();
        Self {
            h: grid.h(),
            y: -delta_b.clone(),
            g_prev: None,
            s: DMatrix::identity(rows, rows),
            r_inv: DMatrix::identity(3, 3),
            norms: Vec::with_capacity(grid.points()),
            samples: Vec::with_capacity(grid.points()),
            residual: 0.0,
        }
    }

    /// Accept `G` at the next grid point and, after the first, at the
    /// midpoint of the step leading to it.
    fn push(&mut self, g: DMatrix<Complex64>, g_mid: Option<&DMatrix<Complex64>>) -> Result<()> {
        if let (Some(g0), Some(gm)) = (&self.g_prev, g_mid) {
            self.y = propagate::delta_y_step(&self.y, g0, gm, &g, self.h);
        }
        let q = &g * g.adjoint();
        let quad = &self.s * &g * &self.r_inv * g.adjoint() * &self.s;
        self.residual = self.residual.max(lincore::max_norm(&(quad - q)));
        self.norms.push(self.y.norm());
        self.samples
            .push(real_control(&(-(Strategy2Solution::gain(&g) * &self.y)))?);
        self.g_prev = Some(g);
        Ok(())
    }

    fn finish(self, grid: TimeGrid) -> Strategy2Solution {
        Strategy2Solution {
            delta_y_norms: self.norms,
            delta_y_final: self.y,
            control: ControlModification {
                grid,
                samples: self.samples,
            },
            riccati_residual: self.residual,
        }
    }
}

/// Solve Strategy 2 from precomputed drive samples and the target offset.
pub fn strategy2_solve(
    samples: &DriveSamples,
    offset: &TargetOffset,
    grid: TimeGrid,
) -> Result<Strategy2Solution> {
    if samples.nodes.len() != grid.points() || samples.midpoints.len() != grid.steps {
        return Err(Error::Dimension {
            expected: grid.points(),
            found: samples.nodes.len(),
        });
    }
    if samples.nodes[0].nrows() != offset.delta_b.len() {
        return Err(Error::Dimension {
            expected: samples.nodes[0].nrows(),
            found: offset.delta_b.len(),
        });
    }
    let mut st = Strategy2Stepper::new(&offset.delta_b, grid);
    for (k, g) in samples.nodes.iter().enumerate() {
        st.push(g.clone(), k.checked_sub(1).map(|m| &samples.midpoints[m]))?;
    }
    Ok(st.finish(grid))
}

/// Solve Strategy 2 by re-propagating the nominal sweep, so drive matrices
/// are never stored.
pub fn strategy2_stream(
    sweep: &Sweep,
    grid: TimeGrid,
    offset: &TargetOffset,
) -> Result<Strategy2Solution> {
    let mut st = Strategy2Stepper::new(&offset.delta_b, grid);
    let ham = propagate::hamiltonian_fn(sweep, grid, None, None);
    propagate::integrate_observed(sweep.dim(), grid, ham, true, |k, u, mid| {
        let tau = grid.tau(k);
        let g = control::drive_matrix_unchecked(u, &sweep.couplings(tau), tau).entries;
        let g_mid = mid.map(|m| {
            let t = tau - grid.h() / 2.0;
            control::drive_matrix_unchecked(m, &sweep.couplings(t), t).entries
        });
        st.push(g, g_mid.as_ref())
    })?;
    Ok(st.finish(grid))
}

/// Strategy-1 control by re-propagating the nominal sweep.
pub fn strategy1_stream(
    sweep: &Sweep,
    grid: TimeGrid,
    w: &Strategy1Weights,
    decay: f64,
) -> Result<ControlModification> {
    let mut samples = Vec::with_capacity(grid.points());
    let ham = propagate::hamiltonian_fn(sweep, grid, None, None);
    propagate::integrate_observed(sweep.dim(), grid, ham, true, |k, u, _| {
        let tau = grid.tau(k);
        let g = control::drive_matrix_unchecked(u, &sweep.couplings(tau), tau).entries;
        let env = ansatz_envelope(tau, grid.tau0, decay);
        samples.push(real_control(
            &((g.adjoint() * &w.w) * Complex64::new(env, 0.0)),
        )?);
        Ok(())
    })?;
    Ok(ControlModification { grid, samples })
}

/// Drive matrices along a trajectory; midpoints only if the trajectory has them.
pub fn drive_samples(sweep: &Sweep, traj: &Trajectory) -> DriveSamples {
    let grid = traj.grid;
    let nodes = traj
        .unitaries
        .iter()
        .enumerate()
        .map(|(k, u)| {
            let tau = grid.tau(k);
            control::drive_matrix_unchecked(u, &sweep.couplings(tau), tau).entries
        })
        .collect();
    let midpoints = traj
        .midpoints
        .iter()
        .enumerate()
        .map(|(k, u)| {
            let tau = grid.tau(k) + grid.h() / 2.0;
            control::drive_matrix_unchecked(u, &sweep.couplings(tau), tau).entries
        })
        .collect();
    DriveSamples { nodes, midpoints }
}

/// Nominal gate data needed by every NOC experiment.
#[derive(Debug, Clone)]
pub struct NominalGate {
    pub gate: Gate,
    pub sweep: Sweep,
    pub grid: TimeGrid,
    pub frame: GateFrame,
    /// Target expressed as the lab-frame propagator that reports it.
    pub lab_target: CMatrix,
    /// Final lab-frame propagator of the noise-free sweep.
    pub unitary: CMatrix,
    pub offset: TargetOffset,
}

impl NominalGate {
    pub fn new(gate: Gate, sweep: Sweep, grid: TimeGrid) -> Result<Self> {
        if sweep.qubits() != gate.qubits() {
            return Err(Error::Config {
                path: "gate".into(),
                reason: format!("{gate} needs a {}-qubit sweep", gate.qubits()),
            });
        }
        let unitary = propagate::propagate(&sweep, grid, None, None, Options::final_only())?
            .final_unitary()
            .clone();
        let frame = GateFrame::for_sweep(&sweep);
        let lab_target = frame.to_lab(&gate.target());
        let offset = metrics::target_offset(&unitary, &lab_target)?;
        Ok(Self {
            gate,
            sweep,
            grid,
            frame,
            lab_target,
            unitary,
            offset,
        })
    }

    /// Nominal gate in the reporting frame.
    pub fn reported(&self) -> CMatrix {
        self.frame.report(&self.unitary)
    }

    pub fn report(&self) -> Result<ErrorReport> {
        ErrorReport::new(&self.reported(), &self.gate.target())
    }
}

/// Control modification for a nominal gate.
pub fn solve_control(nominal: &NominalGate, strategy: Strategy) -> Result<ControlModification> {
    let expected = Strategy::for_qubits(nominal.sweep.qubits());
    if strategy != expected {
        return Err(Error::Config {
            path: "strategy".into(),
            reason: format!("{:?} does not apply to {}", strategy, nominal.gate),
        });
    }
    match strategy {
        Strategy::Ansatz => {
            let w = strategy1_weights(&nominal.offset)?;
            strategy1_stream(&nominal.sweep, nominal.grid, &w, ANSATZ_DECAY)
        }
        Strategy::Riccati => {
            Ok(strategy2_stream(&nominal.sweep, nominal.grid, &nominal.offset)?.control)
        }
    }
}

/// Reported gate produced by `sweep` with a control modification and noise.
pub fn apply_control(
    sweep: &Sweep,
    frame: &GateFrame,
    control: Option<&ControlModification>,
    noise: Option<&NoiseRealization>,
) -> Result<CMatrix> {
    let grid = control.map_or_else(|| TimeGrid::default_for(sweep), |c| c.grid);
    apply_control_on(sweep, grid, frame, control, noise)
}

/// As [`apply_control`], on an explicit grid.
pub fn apply_control_on(
    sweep: &Sweep,
    grid: TimeGrid,
    frame: &GateFrame,
    control: Option<&ControlModification>,
    noise: Option<&NoiseRealization>,
) -> Result<CMatrix> {
    let traj = propagate::propagate(sweep, grid, control, noise, Options::final_only())?;
    Ok(frame.report(traj.final_unitary()))
}

/// Outcome of the full improvement pipeline.
#[derive(Debug, Clone)]
pub struct ImprovedGateResult {
    pub gate: Gate,
    pub nominal_report: ErrorReport,
    pub improved_report: ErrorReport,
    pub control: ControlModification,
    pub nominal_unitary: CMatrix,
    pub improved_unitary: CMatrix,
}

/// Nominal propagation, offset, drive matrices, control, and re-propagation.
pub fn improve_gate(
    gate: Gate,
    sweep: Sweep,
    grid: TimeGrid,
    strategy: Strategy,
) -> Result<ImprovedGateResult> {
    let nominal = NominalGate::new(gate, sweep, grid)?;
    improve_nominal(&nominal, strategy)
}

/// Improvement pipeline from an already propagated nominal gate.
pub fn improve_nominal(nominal: &NominalGate, strategy: Strategy) -> Result<ImprovedGateResult> {
    let control = solve_control(nominal, strategy)?;
    let improved = apply_control_on(
        &nominal.sweep,
        nominal.grid,
        &nominal.frame,
        Some(&control),
        None,
    )?;
    let target = nominal.gate.target();
    Ok(ImprovedGateResult {
        gate: nominal.gate,
        nominal_report: nominal.report()?,
        improved_report: ErrorReport::new(&improved, &target)?,
        control,
        nominal_unitary: nominal.reported(),
        improved_unitary: improved,
    })
}

/// Devectorized `δβ` of a vector offset, for diagnostics.
pub fn offset_matrix(delta_b: &CVector) -> Result<CMatrix> {
    let n = (delta_b.len() as f64).sqrt().round() as usize;
    devectorize(delta_b, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lincore::{identity, max_norm};

    fn w(vals: [(f64, f64); 4]) -> CVector {
        CVector::from_iterator(4, vals.map(|(a, b)| Complex64::new(a, b)))
    }

    #[test]
    fn ansatz_endpoints() {
        let wv = w([(1., 0.), (0., 1.), (0., -1.), (-1., 0.)]);
        assert_eq!(lambda_ansatz(-80.0, &wv, 160.0, 10.0), -wv.clone());
        let end = lambda_ansatz(80.0, &wv, 160.0, 10.0);
        assert!((end[0].re + (-16f64).exp()).abs() < 1e-20);
        assert_eq!(
            lambda_ansatz(3.0, &CVector::zeros(4), 160.0, 10.0).norm(),
            0.0
        );
    }

    #[test]
    fn contraction_at_identity() {
        let sweep = Gate::Hadamard.sweep();
        let g = sweep.couplings(0.0);
        let d = control::drive_matrix(&identity(2), &g, 0.0).unwrap();
        let e1 = w([(1., 0.), (0., 0.), (0., 0.), (0., 0.)]);
        let got = contracted_drive(&g.0, &d, &e1);
        assert!(max_norm(&(got - contracted_closed_form(&e1))) < 1e-15);
        assert_eq!(contracted_closed_form(&e1)[(1, 1)].re, -1.0);
        let e2 = w([(0., 0.), (1., 0.), (0., 0.), (0., 0.)]);
        assert_eq!(contracted_closed_form(&e2)[(1, 0)].re, 2.0);
        let third = (d.entries.adjoint() * &e1)[2];
        assert!((third.re + 1.0).abs() < 1e-15);
    }

    #[test]
    fn weights_reject_two_qubit_offsets() {
        let off = TargetOffset {
            delta_beta: lincore::zeros(4),
            delta_b: CVector::zeros(16),
        };
        assert!(matches!(
            strategy1_weights(&off),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn imaginary_residue_is_guarded() {
        let v = CVector::from_vec(vec![Complex64::new(1.0, 1e-3); 3]);
        assert!(real_control(&v).is_err());
    }
}
