//! Target gates, the `Tr P` error bound, `d*`, fidelity and the target offset.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::control::{ProjectedLevel, Sweep, SweepParams1Q, SweepParams2Q};
use crate::error::{Error, Result};
use crate::lincore::{
    self, hermitian_eigensystem, hermitize, identity, kron, sigma_x, sigma_y, sigma_z, trace,
    vectorize, CMatrix, CVector, I,
};

/// The five gates of the universal set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Gate {
    #[serde(rename = "not")]
    Not,
    #[serde(rename = "hadamard")]
    Hadamard,
    #[serde(rename = "pi8")]
    Pi8,
    #[serde(rename = "phase")]
    Phase,
    #[serde(rename = "cphase")]
    ControlledPhase,
}

impl Gate {
    pub const ALL: [Gate; 5] = [
        Gate::Not,
        Gate::Hadamard,
        Gate::Pi8,
        Gate::Phase,
        Gate::ControlledPhase,
    ];

    pub const ONE_QUBIT: [Gate; 4] = [Gate::Not, Gate::Hadamard, Gate::Pi8, Gate::Phase];

    /// Short name accepted on the command line.
    pub fn name(&self) -> &'static str {
        match self {
            Gate::Not => "not",
            Gate::Hadamard => "hadamard",
            Gate::Pi8 => "pi8",
            Gate::Phase => "phase",
            Gate::ControlledPhase => "cphase",
        }
    }

    pub fn qubits(&self) -> usize {
        match self {
            Gate::ControlledPhase => 2,
            _ => 1,
        }
    }

    /// Target unitary.
    pub fn target(&self) -> CMatrix {
        let r = |x: f64| Complex64::new(x, 0.0);
        let s2 = std::f64::consts::FRAC_1_SQRT_2;
        let p8 = std::f64::consts::PI / 8.0;
        match self {
            Gate::Not => sigma_x(),
            Gate::Hadamard => (sigma_z() + sigma_x()) * r(s2),
            Gate::Pi8 => sigma_x() * r(p8.cos()) - sigma_y() * r(p8.sin()),
            Gate::Phase => (sigma_x() - sigma_y()) * r(s2),
            Gate::ControlledPhase => {
                let id = identity(2);
                let up = kron(&(&id + sigma_z()), &id);
                let down = kron(&(&id - sigma_z()), &sigma_z());
                (up - down) * r(0.5)
            }
        }
    }

    /// Optimized sweep parameters that approximate the gate.
    pub fn sweep(&self) -> Sweep {
        let one = |lambda, eta4| {
            Sweep::One(SweepParams1Q {
                lambda,
                eta4,
                tau0: 160.0,
            })
        };
        match self {
            Gate::Not => one(6.965, 2.189e-4),
            Gate::Hadamard => one(7.820, 1.792e-4),
            Gate::Pi8 => one(8.465, 1.675e-4),
            Gate::Phase => one(8.073, 1.666e-4),
            Gate::ControlledPhase => Sweep::Two(SweepParams2Q {
                lambda: 5.1,
                eta4: 2.4e-4,
                tau0: 120.0,
                d1: 11.702,
                d2: -2.6,
                d3: -0.41,
                d4: 6.6650,
                c4: 5.0003,
                projected: ProjectedLevel::Ground,
            }),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Gate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Gate::ALL
            .into_iter()
            .find(|g| g.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Config {
                path: "gate".into(),
                reason: format!("unknown gate `{s}` (expected not, hadamard, pi8, phase, cphase)"),
            })
    }
}

/// Error bounds for an applied gate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    pub trace_p: f64,
    pub d_star: f64,
    pub fidelity: f64,
    pub qubits: usize,
}

impl ErrorReport {
    pub fn new(u_a: &CMatrix, u_tgt: &CMatrix) -> Result<Self> {
        let qubits = u_a.nrows().trailing_zeros() as usize;
        let tp = trace_p(u_a, u_tgt)?;
        Ok(Self {
            trace_p: tp,
            d_star: d_star(u_a, u_tgt)?,
            fidelity: fidelity(tp, qubits),
            qubits,
        })
    }
}

fn check_dims(a: &CMatrix, b: &CMatrix) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(Error::Dimension {
            expected: b.nrows(),
            found: a.nrows(),
        });
    }
    Ok(())
}

/// `Tr[(U_a − U_tgt)†(U_a − U_tgt)]`.
pub fn trace_p(u_a: &CMatrix, u_tgt: &CMatrix) -> Result<f64> {
    check_dims(u_a, u_tgt)?;
    Ok(lincore::frobenius(&(u_a - u_tgt)).powi(2))
}

/// Largest eigenvalue of `P = D†D` with `D = U_a − U_tgt`.
pub fn d_star(u_a: &CMatrix, u_tgt: &CMatrix) -> Result<f64> {
    check_dims(u_a, u_tgt)?;
    let d = u_a - u_tgt;
    let p = hermitize(&(d.adjoint() * d));
    let es = hermitian_eigensystem(&p)?;
    Ok(es.values.last().copied().unwrap_or(0.0).max(0.0))
}

/// `1 − Tr P / 2^(n+1)`.
pub fn fidelity(trace_p: f64, qubits: usize) -> f64 {
    1.0 - trace_p / f64::from(1u32 << (qubits + 1))
}

/// Hermitian offset `δβ` between the nominal gate and the target, and its
/// vectorized form `Δb`.
#[derive(Debug, Clone)]
pub struct TargetOffset {
    pub delta_beta: CMatrix,
    pub delta_b: CVector,
}

/// `δβ = herm(i (U₀† U_tgt − I))`, both operands in the same frame.
pub fn target_offset(u0_final: &CMatrix, u_tgt: &CMatrix) -> Result<TargetOffset> {
    check_dims(u0_final, u_tgt)?;
    let defect = lincore::unitarity_defect(u0_final);
    if defect > 1e-8 {
        return Err(Error::NotUnitary { defect });
    }
    let n = u0_final.nrows();
    let raw = (u0_final.adjoint() * u_tgt - identity(n)) * I;
    let delta_beta = hermitize(&raw);
    let delta_b = vectorize(&delta_beta);
    Ok(TargetOffset {
        delta_beta,
        delta_b,
    })
}

/// `Tr(U₀† U_tgt)`.
pub fn overlap(u0_final: &CMatrix, u_tgt: &CMatrix) -> Complex64 {
    trace(&(u0_final.adjoint() * u_tgt))
}
