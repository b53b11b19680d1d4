//! TRP control fields, Hamiltonians, coupling matrices and the drive matrix.
//!
//! Everything is dimensionless: time `τ` runs over `[−τ₀/2, τ₀/2]` and the
//! Hamiltonians are measured in the units fixed by the sweep parameters.

use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lincore::{self, identity, kron, sigma_x, sigma_y, sigma_z, vectorize, CMatrix, I};

/// Parameters of a one-qubit quartic TRP sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepParams1Q {
    pub lambda: f64,
    pub eta4: f64,
    pub tau0: f64,
}

/// Which instantaneous eigenstate of the bare two-qubit Hamiltonian receives
/// the degeneracy-breaking shift `c₄`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectedLevel {
    Ground,
    Top,
}

/// Parameters of the two-qubit sweep with Ising coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepParams2Q {
    pub lambda: f64,
    pub eta4: f64,
    pub tau0: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    pub d4: f64,
    pub c4: f64,
    pub projected: ProjectedLevel,
}

impl SweepParams2Q {
    /// Rotation rates `(k₁, k₂)` of the transverse couplings.
    pub fn coupling_rates(&self) -> (f64, f64) {
        let k2 = self.d1 / (self.d3 - 1.0);
        (k2 + self.d1, k2)
    }
}

/// A sweep of either size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sweep {
    One(SweepParams1Q),
    Two(SweepParams2Q),
}

impl Sweep {
    pub fn tau0(&self) -> f64 {
        match self {
            Sweep::One(p) => p.tau0,
            Sweep::Two(p) => p.tau0,
        }
    }

    pub fn qubits(&self) -> usize {
        match self {
            Sweep::One(_) => 1,
            Sweep::Two(_) => 2,
        }
    }

    /// Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        1 << self.qubits()
    }

    /// Nominal Hamiltonian at `tau`, with an optional twist-phase offset.
    pub fn hamiltonian(&self, tau: f64, phase_noise: f64) -> Result<CMatrix> {
        match self {
            Sweep::One(p) => Ok(one_qubit_hamiltonian(&one_qubit_field(tau, p, phase_noise))),
            Sweep::Two(p) => two_qubit_hamiltonian(tau, p, phase_noise),
        }
    }

    pub fn couplings(&self, tau: f64) -> CouplingSet {
        coupling_matrices(self, tau)
    }
}

/// Real control field `(f₁, f₂, f₃)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ControlField3(pub [f64; 3]);

/// The three Hermitian matrices `𝒢_j = ∂H/∂f_j`.
#[derive(Debug, Clone)]
pub struct CouplingSet(pub [CMatrix; 3]);

/// `N² x 3` matrix whose column `j` is `vec(U₀† 𝒢_j U₀)`.
#[derive(Debug, Clone)]
pub struct DriveMatrix {
    pub entries: DMatrix<Complex64>,
    pub tau: f64,
}

/// `φ₄(τ) = (η₄ / 2λ) τ⁴`, plus an optional noise offset.
pub fn twist_phase(tau: f64, lambda: f64, eta4: f64, offset: f64) -> f64 {
    eta4 / (2.0 * lambda) * tau.powi(4) + offset
}

/// One-qubit TRP field `(1/λ)(cos φ₄, −sin φ₄, τ)`.
///
/// The transverse component turns clockwise seen from `+z`. With this sense
/// the rotating-frame detuning `τ/λ − φ₄'/2` vanishes at `τ = 0, ±1/√η₄`.
pub fn one_qubit_field(tau: f64, p: &SweepParams1Q, phase_noise: f64) -> ControlField3 {
    let phi = twist_phase(tau, p.lambda, p.eta4, phase_noise);
    let inv = 1.0 / p.lambda;
    ControlField3([inv * phi.cos(), -inv * phi.sin(), inv * tau])
}

/// `H = −σ·f`.
pub fn one_qubit_hamiltonian(f: &ControlField3) -> CMatrix {
    let [fx, fy, fz] = f.0;
    CMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(-fz, 0.0),
            Complex64::new(-fx, fy),
            Complex64::new(-fx, -fy),
            Complex64::new(fz, 0.0),
        ],
    )
}

struct TwoQubitOps {
    x1: CMatrix,
    y1: CMatrix,
    z1: CMatrix,
    x2: CMatrix,
    y2: CMatrix,
    z2: CMatrix,
    zz: CMatrix,
}

fn ops() -> &'static TwoQubitOps {
    static OPS: OnceLock<TwoQubitOps> = OnceLock::new();
    OPS.get_or_init(|| {
        let id = identity(2);
        let z1 = kron(&sigma_z(), &id);
        let z2 = kron(&id, &sigma_z());
        TwoQubitOps {
            x1: kron(&sigma_x(), &id),
            y1: kron(&sigma_y(), &id),
            x2: kron(&id, &sigma_x()),
            y2: kron(&id, &sigma_y()),
            zz: &z1 * &z2,
            z1,
            z2,
        }
    })
}

/// Two-qubit Hamiltonian without the projector term. Qubit 1 is the left
/// tensor factor.
pub fn two_qubit_bare_hamiltonian(tau: f64, p: &SweepParams2Q, phase_noise: f64) -> CMatrix {
    let o = ops();
    let phi = twist_phase(tau, p.lambda, p.eta4, phase_noise);
    let (cp, sp) = (phi.cos(), phi.sin());
    let sweep = tau / p.lambda;
    let r = |x: f64| Complex64::new(x, 0.0);
    &o.z1 * r(-(p.d1 + p.d2) / 2.0 + sweep) + &o.z2 * r(-p.d2 / 2.0 + sweep)
        - (&o.x1 * r(cp) + &o.y1 * r(sp)) * r(p.d3 / p.lambda)
        - (&o.x2 * r(cp) + &o.y2 * r(sp)) * r(1.0 / p.lambda)
        - &o.zz * r(std::f64::consts::PI * p.d4 / 2.0)
}

/// Full two-qubit Hamiltonian: the bare part plus `c₄` times the projector
/// onto its selected instantaneous eigenstate.
pub fn two_qubit_hamiltonian(tau: f64, p: &SweepParams2Q, phase_noise: f64) -> Result<CMatrix> {
    let bare = two_qubit_bare_hamiltonian(tau, p, phase_noise);
    let eig = bare.clone().symmetric_eigen();
    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let (k, gap) = match p.projected {
        ProjectedLevel::Ground => (
            order[0],
            eig.eigenvalues[order[1]] - eig.eigenvalues[order[0]],
        ),
        ProjectedLevel::Top => (
            order[3],
            eig.eigenvalues[order[3]] - eig.eigenvalues[order[2]],
        ),
    };
    if gap < 1e-10 {
        return Err(Error::Degenerate { tau, gap });
    }
    let v = eig.eigenvectors.column(k);
    Ok(bare + (v * v.adjoint()) * Complex64::new(p.c4, 0.0))
}

/// Coupling matrices of the control field.
///
/// One qubit: `𝒢_j = −σ_j`. Two qubits: transverse couplings rotating at
/// `k₁` (qubit 1) and `k₂` (qubit 2), and `𝒢₃ = d₃σ_z¹ + σ_z²`.
pub fn coupling_matrices(sweep: &Sweep, tau: f64) -> CouplingSet {
    match sweep {
        Sweep::One(_) => CouplingSet(lincore::paulis().map(|s| -s)),
        Sweep::Two(p) => {
            let o = ops();
            let (k1, k2) = p.coupling_rates();
            let r = |x: f64| Complex64::new(x, 0.0);
            let (c1, s1) = ((k1 * tau).cos(), (k1 * tau).sin());
            let (c2, s2) = ((k2 * tau).cos(), (k2 * tau).sin());
            let g1 = (&o.x1 * r(c1) + &o.y1 * r(s1)) * r(p.d3) + &o.x2 * r(c2) + &o.y2 * r(s2);
            let g2 = (&o.y1 * r(c1) - &o.x1 * r(s1)) * r(p.d3) + &o.y2 * r(c2) - &o.x2 * r(s2);
            let g3 = &o.z1 * r(p.d3) + &o.z2;
            CouplingSet([g1, g2, g3])
        }
    }
}

/// Drive matrix at one time from the nominal propagator there.
pub fn drive_matrix(u0: &CMatrix, couplings: &CouplingSet, tau: f64) -> Result<DriveMatrix> {
    let defect = lincore::unitarity_defect(u0);
    if defect > 1e-8 {
        return Err(Error::NotUnitary { defect });
    }
    Ok(drive_matrix_unchecked(u0, couplings, tau))
}

pub(crate) fn drive_matrix_unchecked(
    u0: &CMatrix,
    couplings: &CouplingSet,
    tau: f64,
) -> DriveMatrix {
    let n = u0.nrows();
    let ud = u0.adjoint();
    let mut entries = DMatrix::zeros(n * n, 3);
    for (j, g) in couplings.0.iter().enumerate() {
        entries.set_column(j, &vectorize(&(&ud * g * u0)));
    }
    DriveMatrix { entries, tau }
}

/// A resonance time of the one-qubit sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resonance {
    pub tau: f64,
    pub inside: bool,
}

/// Roots of `τ(1 − η₄τ²) = 0`, flagged by whether they fall inside the sweep.
pub fn resonance_times(p: &SweepParams1Q) -> Vec<Resonance> {
    let r = 1.0 / p.eta4.sqrt();
    [-r, 0.0, r]
        .into_iter()
        .map(|tau| Resonance {
            tau,
            inside: tau.abs() <= p.tau0 / 2.0,
        })
        .collect()
}

/// `R_z(θ) = diag(e^{−iθ/2}, e^{iθ/2})`.
pub fn rz(theta: f64) -> CMatrix {
    let mut m = lincore::zeros(2);
    m[(0, 0)] = Complex64::from_polar(1.0, -theta / 2.0);
    m[(1, 1)] = Complex64::from_polar(1.0, theta / 2.0);
    m
}

/// `R_y(θ) = exp(−iθσ_y/2)`.
pub fn ry(theta: f64) -> CMatrix {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    CMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(c, 0.0),
            Complex64::new(-s, 0.0),
            Complex64::new(s, 0.0),
            Complex64::new(c, 0.0),
        ],
    )
}

/// Bases in which gates are read out at the start and end of a sweep.
///
/// A propagator `U` is reported as `i F_end† U F_start`. For one qubit the
/// bases follow the nominal field direction at each endpoint, with a half
/// turn about `z` at the end. For two qubits both bases are the identity.
#[derive(Debug, Clone)]
pub struct GateFrame {
    pub start: CMatrix,
    pub end: CMatrix,
}

impl GateFrame {
    pub fn for_sweep(sweep: &Sweep) -> Self {
        match sweep {
            Sweep::One(p) => {
                let half = p.tau0 / 2.0;
                Self {
                    start: field_basis(-half, p),
                    end: field_basis(half, p) * rz(std::f64::consts::PI).adjoint(),
                }
            }
            Sweep::Two(_) => Self {
                start: identity(4),
                end: identity(4),
            },
        }
    }

    /// Lab-frame propagator to reported gate.
    pub fn report(&self, u: &CMatrix) -> CMatrix {
        self.end.adjoint() * u * &self.start * I
    }

    /// Reported gate to the lab-frame propagator that produces it.
    pub fn to_lab(&self, gate: &CMatrix) -> CMatrix {
        &self.end * gate * self.start.adjoint() * (-I)
    }
}

/// `R_z(azimuth) R_y(atan(f⊥ / f_z))` for the noise-free field at `tau`.
fn field_basis(tau: f64, p: &SweepParams1Q) -> CMatrix {
    let [fx, fy, fz] = one_qubit_field(tau, p, 0.0).0;
    let azimuth = fy.atan2(fx);
    let tilt = (fx.hypot(fy) / fz).atan();
    rz(azimuth) * ry(tilt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lincore::{frobenius, hermitian_defect, max_norm};

    fn had() -> SweepParams1Q {
        SweepParams1Q {
            lambda: 7.820,
            eta4: 1.792e-4,
            tau0: 160.0,
        }
    }

    fn cp() -> SweepParams2Q {
        SweepParams2Q {
            lambda: 5.1,
            eta4: 2.4e-4,
            tau0: 120.0,
            d1: 11.702,
            d2: -2.6,
            d3: -0.41,
            d4: 6.6650,
            c4: 5.0003,
            projected: ProjectedLevel::Ground,
        }
    }

    #[test]
    fn twist_phase_values() {
        assert_eq!(twist_phase(0.0, 7.82, 1.792e-4, 0.0), 0.0);
        let v = twist_phase(80.0, 7.820, 1.792e-4, 0.0);
        assert!((v - 1.792e-4 / 15.64 * 80f64.powi(4)).abs() < 1e-9);
        assert!((v - 469.33).abs() < 0.05);
        assert_eq!(
            twist_phase(-13.5, 7.82, 1.792e-4, 0.0),
            twist_phase(13.5, 7.82, 1.792e-4, 0.0)
        );
    }

    #[test]
    fn one_qubit_field_values() {
        let p = had();
        assert_eq!(one_qubit_field(0.0, &p, 0.0).0, [1.0 / 7.82, 0.0, 0.0]);
        let f = one_qubit_field(0.0, &p, std::f64::consts::PI).0;
        assert!((f[0] + 1.0 / 7.82).abs() < 1e-15 && f[1].abs() < 1e-15 && f[2] == 0.0);
        for tau in [-80.0, -31.2, 5.0, 77.7] {
            let f = one_qubit_field(tau, &p, 0.0).0;
            let sq: f64 = f.iter().map(|x| x * x).sum();
            assert!((sq - (1.0 + tau * tau) / (7.82f64 * 7.82)).abs() < 1e-12);
        }
    }

    #[test]
    fn one_qubit_hamiltonian_examples() {
        assert_eq!(
            one_qubit_hamiltonian(&ControlField3([0., 0., 1.])),
            -sigma_z()
        );
        let h = one_qubit_hamiltonian(&ControlField3([1.0 / 7.82, 0., 0.]));
        assert!(max_norm(&(h + sigma_x() * Complex64::new(1.0 / 7.82, 0.0))) < 1e-16);
    }

    #[test]
    fn two_qubit_hamiltonian_trace_and_hermiticity() {
        let mut p = cp();
        for tau in [-60.0, -12.3, 0.0, 33.3, 60.0] {
            let h = two_qubit_hamiltonian(tau, &p, 0.0).unwrap();
            assert!(hermitian_defect(&h) < 1e-12);
            assert!((lincore::trace(&h).re - p.c4).abs() < 1e-12);
        }
        p.c4 = 0.0;
        let h = two_qubit_hamiltonian(7.0, &p, 0.0).unwrap();
        assert!(lincore::trace(&h).norm() < 1e-12);
    }

    #[test]
    fn couplings() {
        let one = coupling_matrices(&Sweep::One(had()), 3.0);
        assert_eq!(one.0[0], -sigma_x());
        assert_eq!(one.0[2], -sigma_z());
        let p = cp();
        let two = coupling_matrices(&Sweep::Two(p), 12.7);
        let o = ops();
        assert!(max_norm(&(&two.0[2] - (&o.z1 * Complex64::new(p.d3, 0.0) + &o.z2))) < 1e-15);
        for g in &two.0[..2] {
            assert!(hermitian_defect(g) < 1e-14);
            assert!((0..4).all(|k| g[(k, k)].norm() == 0.0));
        }
    }

    #[test]
    fn drive_matrix_at_identity() {
        let g = coupling_matrices(&Sweep::One(had()), 0.0);
        let d = drive_matrix(&identity(2), &g, 0.0).unwrap();
        assert_eq!(d.entries.column(0).into_owned(), vectorize(&-sigma_x()));
        assert_eq!(d.entries.column(2).into_owned(), vectorize(&-sigma_z()));
        assert!(drive_matrix(&identity(2).scale(1.1), &g, 0.0).is_err());
        assert!((frobenius(&g.0[1]) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn resonances() {
        let r = resonance_times(&SweepParams1Q {
            lambda: 1.0,
            eta4: 1.0,
            tau0: 160.0,
        });
        assert_eq!(
            r.iter().map(|x| x.tau).collect::<Vec<_>>(),
            vec![-1.0, 0.0, 1.0]
        );
        let r = resonance_times(&had());
        assert!((r[2].tau - 74.70).abs() < 0.01 && r[2].inside);
        let not = SweepParams1Q {
            lambda: 6.965,
            eta4: 2.189e-4,
            tau0: 160.0,
        };
        assert!((resonance_times(&not)[0].tau + 67.59).abs() < 0.01);
    }

    #[test]
    fn frame_round_trip() {
        let f = GateFrame::for_sweep(&Sweep::One(had()));
        let g = sigma_x();
        assert!(max_norm(&(f.report(&f.to_lab(&g)) - g)) < 1e-14);
    }
}
