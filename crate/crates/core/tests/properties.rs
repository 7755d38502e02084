use mnn22_core::polytope::local_max_lp;
use mnn22_core::quantum::{bell_value_closed, violation_threshold};
use mnn22_core::*;
use proptest::prelude::*;

fn functional(max_a: usize, max_b: usize) -> impl Strategy<Value = BellFunctional> {
    (1..=max_a, 2..=max_b).prop_flat_map(|(n_a, n_b)| {
        let dim = n_a + n_b + n_a * n_b;
        prop::collection::vec(-3i32..=3, dim).prop_map(move |c| {
            let c: Vec<f64> = c.into_iter().map(f64::from).collect();
            BellFunctional::new(CgTable::from_coords(n_a, n_b, &c).unwrap(), 0.0).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn vertex_lp_agrees_with_enumeration(f in functional(4, 4)) {
        let e = local_max(&f).unwrap().value;
        prop_assert!((e - local_max_lp(&f).unwrap()).abs() <= 1e-8);
    }

    #[test]
    fn bounds_are_ordered(f in functional(3, 3)) {
        let l = local_max(&f).unwrap().value;
        let g = gns_max(&f).unwrap().value;
        let ns = ns_max(&f).unwrap().value;
        prop_assert!(g >= l - 1e-8);
        prop_assert!(ns >= g - 1e-8);
    }

    #[test]
    fn local_witness_attains_value(f in functional(4, 4)) {
        let l = local_max(&f).unwrap();
        prop_assert_eq!(evaluate(&f, &l.witness.table()).unwrap(), l.value);
    }

    #[test]
    fn ns_optimum_is_valid_table(f in functional(3, 3)) {
        let m = ns_max(&f).unwrap();
        prop_assert!(validate(&m.point, 1e-8).is_empty());
        prop_assert!((evaluate(&f, &m.point).unwrap() - m.value).abs() <= 1e-8);
    }

    #[test]
    fn self_domination_is_zero(f in functional(3, 3)) {
        prop_assert_eq!(domination_check(&f, &f).unwrap(), 0.0);
    }

    #[test]
    fn closed_value_sign_structure(n in 2usize..=12, u in 0.0f64..=1.0) {
        let lo = violation_threshold(n);
        let below = u * lo;
        prop_assert!(bell_value_closed(n, below) <= 0.0);
        prop_assert!(bell_value_closed(n, 1.0) == 0.0);
    }

    #[test]
    fn quantum_behaviors_are_valid(n in 2usize..=10, q0 in 0.0f64..=1.0) {
        let b = QuantumConstruction::build(n, q0).unwrap().behavior();
        prop_assert!(validate(&b, 1e-12).is_empty());
    }

    #[test]
    fn quantum_behaviors_respect_ns_bound(n in 2usize..=4, q0 in 0.0f64..=1.0) {
        let f = m_nn22(n).unwrap();
        let b = QuantumConstruction::build(n, q0).unwrap().behavior();
        prop_assert!(evaluate(&f, &b).unwrap() <= ns_max(&f).unwrap().value + 1e-9);
    }
}

#[test]
fn ns_max_dominates_closed_optimum() {
    for n in 2..=6 {
        let f = m_nn22(n).unwrap();
        let q = optimize_q0(n, 1e-10).unwrap();
        assert!(ns_max(&f).unwrap().value >= q.value);
    }
}

#[test]
fn quantum_restriction_is_nonlocal_at_n3() {
    let q = optimize_q0(3, 1e-10).unwrap();
    let b = QuantumConstruction::build(3, q.q0).unwrap().behavior();
    assert!(!local_membership(&b, &[0, 1, 2], &[0, 1], 1e-9).unwrap());
}

#[test]
fn claim_lps_are_optimal() {
    for n in 2..=5 {
        let f = m_nn22(n).unwrap();
        for p in PairLabel::all(n) {
            assert!(pairwise_local_max(&f, p).is_ok());
            assert!(pairwise_local_max(&reduced_chsh(n, p).unwrap(), p).is_ok());
        }
    }
}
