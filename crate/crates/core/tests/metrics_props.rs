mod common;

use common::{reals, unitary_from};
use nocgf::lincore::{hermitian_defect, identity, max_norm, trace};
use nocgf::metrics::{d_star, fidelity, target_offset, trace_p, Gate};
use proptest::prelude::*;

proptest! {
    #[test]
    fn trace_p_symmetry_and_invariance(a in reals(16), b in reals(16), w in reals(16)) {
        let (u, v, w) = (unitary_from(4, &a), unitary_from(4, &b), unitary_from(4, &w));
        let t = trace_p(&u, &v).unwrap();
        prop_assert!((t - trace_p(&v, &u).unwrap()).abs() < 1e-12);
        prop_assert!((t - trace_p(&(&w * &u), &(&w * &v)).unwrap()).abs() < 1e-12);
        let identity_form = 8.0 - 2.0 * trace(&(u.adjoint() * &v)).re;
        prop_assert!((t - identity_form).abs() < 1e-12);
    }

    #[test]
    fn bounds_are_ordered(a in reals(4), b in reals(4)) {
        let (u, v) = (unitary_from(2, &a), unitary_from(2, &b));
        let t = trace_p(&u, &v).unwrap();
        let d = d_star(&u, &v).unwrap();
        prop_assert!(d >= 0.0);
        prop_assert!(d <= t + 1e-12);
        prop_assert!(t <= 8.0 + 1e-12);
        prop_assert!((fidelity(t, 1) - (1.0 - t / 4.0)).abs() < 1e-15);
    }

    #[test]
    fn offset_is_hermitian(a in reals(16), b in reals(16)) {
        let (u, v) = (unitary_from(4, &a), unitary_from(4, &b));
        let off = target_offset(&u, &v).unwrap();
        prop_assert!(hermitian_defect(&off.delta_beta) < 1e-15);
        prop_assert_eq!(off.delta_b.len(), 16);
    }
}

#[test]
fn targets_are_unitary_and_self_offset_is_zero() {
    for g in Gate::ALL {
        let t = g.target();
        assert!(max_norm(&(t.adjoint() * &t - identity(t.nrows()))) < 1e-15);
        let off = target_offset(&t, &t).unwrap();
        assert!(off.delta_b.norm() < 1e-15);
        assert_eq!(trace_p(&t, &t).unwrap(), 0.0);
    }
}

#[test]
fn fidelity_examples() {
    assert!((fidelity(1.12e-4, 1) - 0.99997).abs() < 5e-6);
    assert!((fidelity(1.27e-3, 2) - 0.99984).abs() < 5e-6);
}

#[test]
fn mismatched_dimensions_are_rejected() {
    assert!(trace_p(&identity(2), &identity(4)).is_err());
    assert!(target_offset(
        &(identity(2) * num_complex::Complex64::new(1.1, 0.0)),
        &identity(2)
    )
    .is_err());
}
