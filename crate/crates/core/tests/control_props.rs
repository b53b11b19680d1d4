mod common;

use common::{reals, unitary_from};
use nocgf::control::{
    coupling_matrices, drive_matrix, one_qubit_field, resonance_times, ProjectedLevel, Sweep,
    SweepParams1Q, SweepParams2Q,
};
use nocgf::lincore::{devectorize, frobenius, hermitian_defect, trace};
use nocgf::metrics::Gate;
use proptest::prelude::*;

fn one(lambda: f64, eta4: f64) -> SweepParams1Q {
    SweepParams1Q {
        lambda,
        eta4,
        tau0: 160.0,
    }
}

fn two(c4: f64) -> SweepParams2Q {
    match Gate::ControlledPhase.sweep() {
        Sweep::Two(p) => SweepParams2Q { c4, ..p },
        Sweep::One(_) => unreachable!(),
    }
}

proptest! {
    #[test]
    fn field_magnitude(tau in -80.0f64..80.0, lambda in 1.0f64..20.0, eta4 in 1e-5f64..1e-3, noise in -0.5f64..0.5) {
        let f = one_qubit_field(tau, &one(lambda, eta4), noise).0;
        let m2 = f.iter().map(|x| x * x).sum::<f64>();
        let expected = (1.0 + tau * tau) / (lambda * lambda);
        prop_assert!((m2 - expected).abs() <= 1e-12 * expected);
    }

    #[test]
    fn hamiltonians_are_hermitian(tau in -60.0f64..60.0, noise in -0.3f64..0.3) {
        for sweep in [Gate::Hadamard.sweep(), Gate::ControlledPhase.sweep()] {
            let h = sweep.hamiltonian(tau, noise).unwrap();
            prop_assert!(hermitian_defect(&h) <= 1e-12);
        }
    }

    #[test]
    fn projector_shifts_trace_by_c4(tau in -60.0f64..60.0, c4 in 0.5f64..8.0) {
        let bare = Sweep::Two(two(0.0)).hamiltonian(tau, 0.0).unwrap();
        prop_assert!(trace(&bare).norm() < 1e-12);
        let full = Sweep::Two(two(c4)).hamiltonian(tau, 0.0).unwrap();
        prop_assert!((trace(&full).re - c4).abs() < 1e-12);
        let top = Sweep::Two(SweepParams2Q { projected: ProjectedLevel::Top, ..two(c4) });
        prop_assert!((trace(&top.hamiltonian(tau, 0.0).unwrap()).re - c4).abs() < 1e-12);
    }

    #[test]
    fn drive_columns_are_hermitian_with_preserved_norms(vals in reals(16), tau in -60.0f64..60.0) {
        for sweep in [Gate::Not.sweep(), Gate::ControlledPhase.sweep()] {
            let n = sweep.dim();
            let u = unitary_from(n, &vals);
            let g = coupling_matrices(&sweep, tau);
            let d = drive_matrix(&u, &g, tau).unwrap();
            for j in 0..3 {
                let col = devectorize(&d.entries.column(j).into_owned(), n).unwrap();
                prop_assert!(hermitian_defect(&col) < 1e-12);
                prop_assert!((frobenius(&col) - frobenius(&g.0[j])).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn resonances_bracket_sign_changes(eta4 in 1e-5f64..1e-2) {
        let cond = |t: f64| t * (1.0 - eta4 * t * t);
        for r in resonance_times(&one(7.0, eta4)) {
            let d = 1e-6 * (1.0 + r.tau.abs());
            prop_assert!(cond(r.tau - d) * cond(r.tau + d) < 0.0);
            prop_assert_eq!(r.inside, r.tau.abs() <= 80.0);
        }
    }
}
