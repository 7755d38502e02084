//! Acceptance criteria, one test per criterion. Each test prints a single
//! `[PASS]` / `[FAIL]` line (run with `--nocapture` to see them) and then
//! asserts the outcome.

use std::time::Instant;

use mnn22_core::polytope::{local_max_lp, DeterministicStrategy, CLAIM_TOL};
use mnn22_core::quantum::{bell_value_closed, violation_threshold, DEFAULT_Q0_TOL};
use mnn22_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(id: u32, title: &str, pass: bool, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("[{tag}] criterion {id:>2}: {title} -- {detail}");
    assert!(pass, "criterion {id} failed: {detail}");
}

fn table(alice: &[i32], rows: &[&[i32]]) -> (Vec<f64>, Vec<f64>, Vec<Vec<f64>>) {
    let alice = alice.iter().map(|&v| f64::from(v)).collect();
    let bob = rows.iter().map(|r| f64::from(r[0])).collect();
    let joint = rows.iter().map(|r| r[1..].iter().map(|&v| f64::from(v)).collect()).collect();
    (alice, bob, joint)
}

fn same_table(f: &BellFunctional, expected: (Vec<f64>, Vec<f64>, Vec<Vec<f64>>)) -> bool {
    let c = f.coefficients();
    let (alice, bob, joint) = expected;
    c.alice() == alice.as_slice()
        && c.bob() == bob.as_slice()
        && (0..c.n_b()).all(|y| c.joint_row(y) == joint[y].as_slice())
        && f.bound() == 0.0
}

fn pair(s: usize, t: usize) -> PairLabel {
    PairLabel::new(s, t).unwrap()
}

#[test]
fn criterion_01_table_exactness() {
    // rows: Bob coefficient, then joint coefficients for Alice settings 1..n
    let m3322 = table(&[-2, 0, 0], &[&[-2, 1, 1, 1], &[-1, 1, 1, -1], &[0, 1, -1, 0]]);
    let r12 = table(&[-1, 0, 0], &[&[-1, 1, 0, 1], &[0, 1, 0, -1], &[0, 0, 0, 0]]);
    let r13 = table(&[-1, 0, 0], &[&[-1, 1, 1, 0], &[0, 0, 0, 0], &[0, 1, -1, 0]]);
    let r23 = table(&[-1, 0, 0], &[&[0, 0, 0, 0], &[-1, 1, 1, 0], &[0, 1, -1, 0]]);
    let chsh_t = table(&[-1, 0], &[&[-1, 1, 1], &[0, 1, -1]]);

    let checks = [
        ("M3322", same_table(&m_nn22(3).unwrap(), m3322)),
        ("reduced (1,2)", same_table(&reduced_chsh(3, pair(1, 2)).unwrap(), r12)),
        ("reduced (1,3)", same_table(&reduced_chsh(3, pair(1, 3)).unwrap(), r13)),
        ("reduced (2,3)", same_table(&reduced_chsh(3, pair(2, 3)).unwrap(), r23)),
        ("CHSH", same_table(&chsh(), chsh_t.clone())),
        ("M2222 = CHSH", same_table(&m_nn22(2).unwrap(), chsh_t)),
    ];
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    report(
        1,
        "table exactness",
        failed.is_empty(),
        &if failed.is_empty() {
            "all 6 tables equal coefficient-for-coefficient".to_string()
        } else {
            format!("mismatch: {failed:?}")
        },
    );
}

#[test]
fn criterion_02_local_bounds() {
    let mut values = Vec::new();
    let mut ok = true;
    let mut n8_time = 0.0;
    for n in 2..=8 {
        let f = m_nn22(n).unwrap();
        let start = Instant::now();
        let l = local_max(&f).unwrap();
        let secs = start.elapsed().as_secs_f64();
        if n == 8 {
            n8_time = secs;
        }
        // the all-ones strategy produces the zero table
        let ones = DeterministicStrategy {
            alice: vec![1; n],
            bob: vec![1; n],
        };
        let at_ones = evaluate(&f, &ones.table()).unwrap();
        ok &= l.value == 0.0 && at_ones == 0.0;
        values.push(format!("n={n}:{}", l.value));
    }
    ok &= n8_time < 30.0;
    report(
        2,
        "local bounds by enumeration",
        ok,
        &format!("{}; n=8 took {n8_time:.3}s", values.join(" ")),
    );
}

#[test]
fn criterion_03_quantum_violation_values() {
    let o3 = optimize_q0(3, DEFAULT_Q0_TOL).unwrap();
    let o5 = optimize_q0(5, DEFAULT_Q0_TOL).unwrap();
    let mut ok = (o3.value - 0.0239).abs() <= 5e-4 && (o5.value - 0.0035).abs() <= 5e-4;
    let mut sign_errors = Vec::new();
    for n in 2..=8 {
        let lo = violation_threshold(n);
        // 100 points strictly inside the interval must violate
        for k in 1..=100 {
            let q0 = lo + (1.0 - lo) * f64::from(k) / 101.0;
            if bell_value_closed(n, q0) <= 0.0 {
                sign_errors.push(format!("n={n} q0={q0}: not positive"));
            }
        }
        // 100 points across [0,1]: positive exactly on the open interval
        for k in 0..100 {
            let q0 = f64::from(k) / 99.0;
            let inside = q0 > lo && q0 < 1.0;
            if (bell_value_closed(n, q0) > 0.0) != inside {
                sign_errors.push(format!("n={n} q0={q0}: sign mismatch"));
            }
        }
        ok &= optimize_q0(n, DEFAULT_Q0_TOL).unwrap().value > 0.0;
    }
    ok &= sign_errors.is_empty();
    report(
        3,
        "quantum violation values",
        ok,
        &format!(
            "M3322*={:.6} (q0*={:.6}), M5522*={:.6} (q0*={:.6}), sign errors: {}",
            o3.value,
            o3.q0,
            o5.value,
            o5.q0,
            sign_errors.len()
        ),
    );
}

#[test]
fn criterion_04_closed_form_matches_direct() {
    let mut worst = (0.0f64, 0usize, 0.0f64, 0.0f64, 0.0f64);
    for n in 3..=6 {
        let f = m_nn22(n).unwrap();
        for k in 0..25 {
            let q0 = f64::from(k) / 24.0;
            let direct = evaluate(&f, &QuantumConstruction::build(n, q0).unwrap().behavior()).unwrap();
            let closed = bell_value_closed(n, q0);
            let diff = (direct - closed).abs();
            if diff > worst.0 {
                worst = (diff, n, q0, direct, closed);
            }
        }
    }
    let (diff, n, q0, direct, closed) = worst;
    report(
        4,
        "closed-form / direct agreement",
        diff <= 1e-9,
        &format!(
            "max |direct - closed| = {diff:.3e} at n={n}, q0={q0:.4} (direct {direct:.6}, closed {closed:.6})"
        ),
    );
}

#[test]
fn criterion_05_gns_bounds() {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in 3..=5 {
        let g = gns_max(&m_nn22(n).unwrap()).unwrap();
        ok &= g.value.abs() <= CLAIM_TOL && g.per_pair.len() == n * (n - 1) / 2;
        parts.push(format!("n={n}: {:.2e} over {} pairs", g.value, g.per_pair.len()));
    }
    report(5, "GNS bounds", ok, &parts.join("; "));
}

#[test]
fn criterion_06_separation_witness() {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in 3..=6 {
        let f = m_nn22(n).unwrap();
        let g = gns_max(&f).unwrap().value;
        let opt = optimize_q0(n, DEFAULT_Q0_TOL).unwrap();
        let q = evaluate(&f, &QuantumConstruction::build(n, opt.q0).unwrap().behavior()).unwrap();
        let witness = g <= CLAIM_TOL && q > 0.0 && q >= 1e-3 * opt.value;
        ok &= witness;
        parts.push(format!(
            "n={n}: gns={g:.1e} quantum={q:.6} (closed {:.6}) {}",
            opt.value,
            if witness { "ok" } else { "no separation" }
        ));
    }
    report(6, "separation witness", ok, &parts.join("; "));
}

#[test]
fn criterion_07_domination_lemmas() {
    let mut worst = (f64::NEG_INFINITY, String::new());
    let mut count = 0;
    for n in 2..=5 {
        let f = m_nn22(n).unwrap();
        for p in PairLabel::all(n) {
            let d = domination_check(&f, &reduced_chsh(n, p).unwrap()).unwrap();
            count += 1;
            if d > worst.0 {
                worst = (d, format!("n={n} pair {p}"));
            }
        }
        if n >= 3 {
            let lifted = sub_embedding(n).unwrap().lifted().unwrap();
            let d = domination_check(&f, &lifted).unwrap();
            count += 1;
            if d > worst.0 {
                worst = (d, format!("n={n} embedding"));
            }
        }
    }
    report(
        7,
        "domination lemmas",
        worst.0 <= CLAIM_TOL,
        &format!("{count} checks, largest value {:.2e} ({})", worst.0, worst.1),
    );
}

#[test]
fn criterion_08_construction_invariants() {
    let mut worst_norm = 0.0f64;
    let mut worst_schmidt = 0.0f64;
    for n in 2..=64 {
        for q0 in [0.0, 0.3, violation_threshold(n), 0.97, 1.0] {
            let c = QuantumConstruction::build(n, q0).unwrap();
            for v in c.alice_vecs().iter().chain(c.bob_vecs()) {
                let norm: f64 = v.iter().map(|a| a * a).sum::<f64>().sqrt();
                worst_norm = worst_norm.max((norm - 1.0).abs());
            }
            let s: f64 = c.schmidt().iter().map(|l| l * l).sum();
            worst_schmidt = worst_schmidt.max((s - 1.0).abs());
        }
    }
    let mut invalid = 0;
    for n in 2..=8 {
        for k in 0..=20 {
            let q0 = f64::from(k) / 20.0;
            if !validate(&QuantumConstruction::build(n, q0).unwrap().behavior(), 1e-12).is_empty() {
                invalid += 1;
            }
        }
    }
    report(
        8,
        "construction invariants",
        worst_norm <= 1e-12 && worst_schmidt <= 1e-12 && invalid == 0,
        &format!(
            "max norm error {worst_norm:.1e}, max Schmidt error {worst_schmidt:.1e}, invalid behaviors {invalid}"
        ),
    );
}

fn random_functional(rng: &mut ChaCha8Rng) -> BellFunctional {
    let n_a = rng.gen_range(1..=5);
    let n_b = rng.gen_range(1..=10 - n_a);
    let integer = rng.gen_bool(0.5);
    let draw = |rng: &mut ChaCha8Rng| {
        if integer {
            f64::from(rng.gen_range(-3i32..=3))
        } else {
            rng.gen_range(-1.0..1.0)
        }
    };
    let alice = (0..n_a).map(|_| draw(rng)).collect();
    let bob = (0..n_b).map(|_| draw(rng)).collect();
    let joint = (0..n_b).map(|_| (0..n_a).map(|_| draw(rng)).collect()).collect();
    BellFunctional::new(CgTable::from_parts(alice, bob, joint).unwrap(), 0.0).unwrap()
}

#[test]
fn criterion_09_solver_soundness() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_2222);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let f = random_functional(&mut rng);
        let e = local_max(&f).unwrap().value;
        let l = local_max_lp(&f).unwrap();
        worst = worst.max((e - l).abs());
    }
    report(
        9,
        "solver soundness",
        worst <= 1e-8,
        &format!("50 random functionals, max |LP - enumeration| = {worst:.2e}"),
    );
}

#[test]
fn criterion_10_out_of_scope() {
    println!(
        "[N/A ] criterion 10: NPA level-3 upper bounds are documentation-only reference constants; \
         the all-n statement is checked only at finite n (criteria 5 and 6)"
    );
}
