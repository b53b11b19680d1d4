//! Fixed-step RK4 integration of `iU' = H(τ)U` and of the Strategy-2 state
//! equation on a uniform grid over `[−τ₀/2, τ₀/2]`.
//!
//! Unitarity is measured, never enforced.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::control::Sweep;
use crate::error::{Error, Result};
use crate::lincore::{identity, unitarity_defect, CMatrix, CVector, I};
use crate::noc::ControlModification;
use crate::noise::NoiseRealization;

/// Largest accepted unitarity defect of a propagated unitary.
pub const UNITARITY_BUDGET: f64 = 1e-10;

/// Default step counts.
pub const STEPS_1Q: usize = 320_000;
pub const STEPS_2Q: usize = 600_000;

/// Uniform grid `τ_k = −τ₀/2 + k h`, `k = 0..=steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub tau0: f64,
    pub steps: usize,
}

impl TimeGrid {
    pub fn new(tau0: f64, steps: usize) -> Self {
        assert!(
            steps >= 1 && tau0 > 0.0,
            "grid needs tau0 > 0 and steps >= 1"
        );
        Self { tau0, steps }
    }

    /// Default grid for a sweep.
    pub fn default_for(sweep: &Sweep) -> Self {
        let steps = if sweep.qubits() == 1 {
            STEPS_1Q
        } else {
            STEPS_2Q
        };
        Self::new(sweep.tau0(), steps)
    }

    pub fn h(&self) -> f64 {
        self.tau0 / self.steps as f64
    }

    pub fn start(&self) -> f64 {
        -self.tau0 / 2.0
    }

    pub fn tau(&self, k: usize) -> f64 {
        self.start() + k as f64 * self.h()
    }

    pub fn points(&self) -> usize {
        self.steps + 1
    }
}

/// Propagators on a grid.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub grid: TimeGrid,
    /// `U(τ_k)` for every grid point, or only the endpoints when not stored.
    pub unitaries: Vec<CMatrix>,
    /// Cubic-Hermite estimates of `U` at step midpoints, when requested.
    pub midpoints: Vec<CMatrix>,
}

impl Trajectory {
    pub fn final_unitary(&self) -> &CMatrix {
        self.unitaries.last().expect("trajectory is never empty")
    }

    /// Largest unitarity defect over the stored propagators.
    pub fn max_defect(&self) -> f64 {
        self.unitaries
            .iter()
            .map(unitarity_defect)
            .fold(0.0, f64::max)
    }
}

/// What to record and check during a propagation.
#[derive(Debug, Clone, Copy)]
pub struct Options {
    pub store: bool,
    pub midpoints: bool,
    pub check_unitarity: bool,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            store: true,
            midpoints: false,
            check_unitarity: true,
        }
    }
}

impl Options {
    /// Keep only the final propagator.
    pub fn final_only() -> Self {
        Self {
            store: false,
            ..Self::default()
        }
    }
}

/// Nominal propagation, optionally with phase noise.
pub fn propagate_nominal(
    sweep: &Sweep,
    grid: TimeGrid,
    noise: Option<&NoiseRealization>,
) -> Result<Trajectory> {
    propagate(sweep, grid, None, noise, Options::default())
}

/// Propagation under `H₀ + Σ_j 𝒢_j ΔF_j`.
pub fn propagate_modified(
    sweep: &Sweep,
    grid: TimeGrid,
    delta_f: &ControlModification,
    noise: Option<&NoiseRealization>,
) -> Result<Trajectory> {
    propagate(sweep, grid, Some(delta_f), noise, Options::default())
}

/// General propagation. `delta_f` samples are linearly interpolated at the
/// RK4 substage times.
pub fn propagate(
    sweep: &Sweep,
    grid: TimeGrid,
    delta_f: Option<&ControlModification>,
    noise: Option<&NoiseRealization>,
    opts: Options,
) -> Result<Trajectory> {
    if let Some(df) = delta_f {
        if df.grid.steps != grid.steps || df.grid.tau0 != grid.tau0 {
            return Err(Error::Dimension {
                expected: grid.points(),
                found: df.samples.len(),
            });
        }
    }
    let ham = hamiltonian_fn(sweep, grid, delta_f, noise);
    integrate(sweep.dim(), grid, ham, opts)
}

fn integrate<F>(dim: usize, grid: TimeGrid, ham: F, opts: Options) -> Result<Trajectory>
where
    F: Fn(usize, f64) -> Result<CMatrix>,
{
    let mut unitaries = Vec::with_capacity(if opts.store { grid.points() } else { 2 });
    let mut midpoints = Vec::with_capacity(if opts.midpoints { grid.steps } else { 0 });
    let last = integrate_observed(dim, grid, ham, opts.check_unitarity, |k, u, mid| {
        if opts.store || k == 0 {
            unitaries.push(u.clone());
        }
        if let (true, Some(m)) = (opts.midpoints, mid) {
            midpoints.push(m.clone());
        }
        Ok(())
    })?;
    if !opts.store {
        unitaries.push(last);
    }
    Ok(Trajectory {
        grid,
        unitaries,
        midpoints,
    })
}

/// RK4 propagation that hands each `U(τ_k)` to `observe` instead of storing
/// it. `observe(k, U_k, mid)` is called for `k = 0..=steps`; `mid` is the
/// cubic-Hermite estimate of `U` halfway through step `k − 1` (absent for
/// `k = 0`). Returns the final propagator.
pub fn integrate_observed<F, O>(
    dim: usize,
    grid: TimeGrid,
    ham: F,
    check_unitarity: bool,
    mut observe: O,
) -> Result<CMatrix>
where
    F: Fn(usize, f64) -> Result<CMatrix>,
    O: FnMut(usize, &CMatrix, Option<&CMatrix>) -> Result<()>,
{
    let h = grid.h();
    let mi = -I;
    let half = Complex64::new(h / 2.0, 0.0);
    let mut u = identity(dim);
    observe(0, &u, None)?;
    let mut h_start = ham(0, 0.0)?;
    for k in 0..grid.steps {
        let h_mid = ham(k, 0.5)?;
        let h_end = ham(k, 1.0)?;
        let k1 = &h_start * &u * mi;
        let k2 = &h_mid * (&u + &k1 * half) * mi;
        let k3 = &h_mid * (&u + &k2 * half) * mi;
        let k4 = &h_end * (&u + &k3 * Complex64::new(h, 0.0)) * mi;
        let next =
            &u + (&k1 + (k2 + k3) * Complex64::new(2.0, 0.0) + k4) * Complex64::new(h / 6.0, 0.0);
        let d_end = &h_end * &next * mi;
        let mid =
            (&u + &next) * Complex64::new(0.5, 0.0) + (k1 - d_end) * Complex64::new(h / 8.0, 0.0);
        u = next;
        observe(k + 1, &u, Some(&mid))?;
        h_start = h_end;
    }
    if check_unitarity {
        let defect = unitarity_defect(&u);
        if defect > UNITARITY_BUDGET {
            return Err(Error::Accuracy {
                steps: grid.steps,
                defect,
            });
        }
    }
    Ok(u)
}

/// Hamiltonian closure for [`integrate_observed`]: the nominal sweep plus an
/// optional control modification and phase noise.
pub fn hamiltonian_fn<'a>(
    sweep: &'a Sweep,
    grid: TimeGrid,
    delta_f: Option<&'a ControlModification>,
    noise: Option<&'a NoiseRealization>,
) -> impl Fn(usize, f64) -> Result<CMatrix> + 'a {
    move |k: usize, frac: f64| -> Result<CMatrix> {
        let tau = grid.tau(k) + frac * grid.h();
        let dphi = noise.map_or(0.0, |r| r.evaluate(tau));
        let mut h = sweep.hamiltonian(tau, dphi)?;
        if let Some(df) = delta_f {
            let f = df.interpolate(k, frac);
            let g = sweep.couplings(tau);
            for (gj, fj) in g.0.iter().zip(f.0) {
                if fj != 0.0 {
                    h += gj * Complex64::new(fj, 0.0);
                }
            }
        }
        Ok(h)
    }
}

/// Drive matrices at grid points and step midpoints.
#[derive(Debug, Clone)]
pub struct DriveSamples {
    pub nodes: Vec<DMatrix<Complex64>>,
    pub midpoints: Vec<DMatrix<Complex64>>,
}

/// Integrate `Δy' = −G G† Δy` from `Δy(−τ₀/2) = −Δb` with RK4.
pub fn integrate_delta_y(
    samples: &DriveSamples,
    grid: TimeGrid,
    delta_b: &CVector,
) -> Result<Vec<CVector>> {
    if samples.nodes.len() != grid.points() || samples.midpoints.len() != grid.steps {
        return Err(Error::Dimension {
            expected: grid.points(),
            found: samples.nodes.len(),
        });
    }
    let rows = samples.nodes[0].nrows();
    if delta_b.len() != rows {
        return Err(Error::Dimension {
            expected: rows,
            found: delta_b.len(),
        });
    }
    let mut y = -delta_b.clone();
    let mut out = Vec::with_capacity(grid.points());
    out.push(y.clone());
    for k in 0..grid.steps {
        y = delta_y_step(
            &y,
            &samples.nodes[k],
            &samples.midpoints[k],
            &samples.nodes[k + 1],
            grid.h(),
        );
        out.push(y.clone());
    }
    Ok(out)
}

/// One RK4 step of `Δy' = −G G† Δy` given `G` at the start, middle and end.
pub fn delta_y_step(
    y: &CVector,
    g0: &DMatrix<Complex64>,
    gm: &DMatrix<Complex64>,
    g1: &DMatrix<Complex64>,
    h: f64,
) -> CVector {
    let rhs = |g: &DMatrix<Complex64>, v: &CVector| -> CVector { -(g * (g.adjoint() * v)) };
    let half = Complex64::new(h / 2.0, 0.0);
    let a1 = rhs(g0, y);
    let a2 = rhs(gm, &(y + &a1 * half));
    let a3 = rhs(gm, &(y + &a2 * half));
    let a4 = rhs(g1, &(y + &a3 * Complex64::new(h, 0.0)));
    y + (a1 + (a2 + a3) * Complex64::new(2.0, 0.0) + a4) * Complex64::new(h / 6.0, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lincore::{max_norm, sigma_z, unitary_exp};

    #[test]
    fn zero_hamiltonian_is_identity() {
        let grid = TimeGrid::new(10.0, 100);
        let t = integrate(
            2,
            grid,
            |_, _| Ok(crate::lincore::zeros(2)),
            Options::default(),
        )
        .unwrap();
        assert!(t.unitaries.iter().all(|u| *u == identity(2)));
    }

    #[test]
    fn constant_hamiltonian_matches_exponential() {
        let grid = TimeGrid::new(20.0, 20_000);
        let t = integrate(2, grid, |_, _| Ok(-sigma_z()), Options::default()).unwrap();
        for k in [0, 5000, 20_000] {
            let exact = unitary_exp(&-sigma_z(), grid.tau(k) - grid.start()).unwrap();
            assert!(max_norm(&(&t.unitaries[k] - exact)) < 1e-10);
        }
    }

    #[test]
    fn zero_offset_keeps_delta_y_zero() {
        let grid = TimeGrid::new(1.0, 4);
        let g = nalgebra::DMatrix::from_element(4, 3, Complex64::new(0.3, 0.1));
        let s = DriveSamples {
            nodes: vec![g.clone(); 5],
            midpoints: vec![g; 4],
        };
        let y = integrate_delta_y(&s, grid, &CVector::zeros(4)).unwrap();
        assert!(y.iter().all(|v| v.norm() == 0.0));
        assert!(integrate_delta_y(&s, TimeGrid::new(1.0, 5), &CVector::zeros(4)).is_err());
    }
}
