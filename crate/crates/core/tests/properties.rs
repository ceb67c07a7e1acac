use std::sync::Arc;

use proptest::prelude::*;
use qunforge::attacks::{qe_one_block_emulator, qe_stage1_state, qe_stage1_success};
use qunforge::games::p_ov_classical;
use qunforge::oracles::{ClassicalFunctionTable, OracleInstance, ANC, MSG};
use qunforge::qstate::{haar_random_state, haar_random_unitary, Complex64, DensityMatrix, Layout, StateVector};
use qunforge::verifiers::{TestConfig, TestKind};

fn haar(q: usize, seed: u64) -> StateVector {
    haar_random_state(Layout::single("q", q), seed).unwrap()
}

// Reduced density matrix of the first register, summed by hand.
fn brute_partial_trace(s: &StateVector, qa: usize, qb: usize) -> Vec<Vec<Complex64>> {
    let (da, db) = (1usize << qa, 1usize << qb);
    let a = s.amplitudes();
    let mut r = vec![vec![Complex64::new(0.0, 0.0); da]; da];
    for (i, row) in r.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            for k in 0..db {
                *cell += a[i * db + k] * a[j * db + k].conj();
            }
        }
    }
    r
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn unitaries_preserve_norm(q in 1usize..=4, s in any::<u64>()) {
        let psi = haar(q, s);
        let u = haar_random_unitary(1 << q, s ^ 0x55).unwrap();
        prop_assert!(u.deviation() < 1e-9);
        prop_assert!((psi.apply_unitary(&u, &["q"]).unwrap().norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn oracle_queries_preserve_norm_and_act_as_xor(n in 1usize..=4, m in 1usize..=4, s in any::<u64>(), x in any::<usize>(), y in any::<u64>()) {
        let mask = (1u64 << m) - 1;
        let f = Arc::new(ClassicalFunctionTable::from_fn(n, m, |v| (v as u64).wrapping_mul(s | 1) & mask).unwrap());
        let l = Layout::new([(MSG, n), (ANC, m)]);
        let mut o = OracleInstance::standard(f.clone());
        let mut psi = haar_random_state(l.clone(), s).unwrap();
        o.query(&mut psi).unwrap();
        prop_assert!((psi.norm() - 1.0).abs() < 1e-9);
        let (x, y) = (x % (1 << n), y & mask);
        let mut b = StateVector::basis(l.clone(), (x << m) | y as usize).unwrap();
        o.query(&mut b).unwrap();
        let want = (x << m) | (y ^ f.eval(x)) as usize;
        prop_assert!((b.amplitudes()[want].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fidelity_is_bounded_and_symmetric(q in 1usize..=3, s in any::<u64>()) {
        let (a, b) = (haar(q, s), haar(q, s.wrapping_add(1)));
        let f = a.fidelity(&b).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&f));
        prop_assert!((f - b.fidelity(&a).unwrap()).abs() < 1e-12);
        prop_assert!((f - a.inner(&b).unwrap().norm_sqr()).abs() < 1e-12);
        let (ra, rb) = (a.density(), b.density());
        prop_assert!((ra.fidelity(&rb).unwrap() - f).abs() < 1e-9);
        prop_assert!((ra.fidelity(&rb).unwrap() - rb.fidelity(&ra).unwrap()).abs() < 1e-9);
        prop_assert!((ra.fidelity(&ra).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn mixed_fidelity_is_bounded(q in 1usize..=2, s in any::<u64>(), w in 0.0f64..1.0) {
        let r1 = DensityMatrix::mixture(&[(w, haar(q, s)), (1.0 - w, haar(q, s ^ 1))]).unwrap();
        let r2 = DensityMatrix::mixture(&[(0.5, haar(q, s ^ 2)), (0.5, haar(q, s ^ 3))]).unwrap();
        let f = r1.fidelity(&r2).unwrap();
        prop_assert!((-1e-9..=1.0 + 1e-9).contains(&f));
        prop_assert!((f - r2.fidelity(&r1).unwrap()).abs() < 1e-7);
    }

    #[test]
    fn partial_trace_matches_brute_force(qa in 1usize..=3, qb in 1usize..=3, s in any::<u64>()) {
        let psi = haar_random_state(Layout::new([("a", qa), ("b", qb)]), s).unwrap();
        let want = brute_partial_trace(&psi, qa, qb);
        let got = psi.reduced(&["a"]).unwrap();
        for (i, row) in want.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                prop_assert!((got.matrix()[(i, j)] - v).norm() < 1e-12);
            }
        }
        let via_density = psi.density().partial_trace(&["a"]).unwrap();
        prop_assert!((via_density.matrix() - got.matrix()).norm() < 1e-12);
        prop_assert!((got.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn stage1_state_is_normalized(q in 1usize..=3, s in any::<u64>()) {
        let chi = qe_stage1_state(&haar(q, s), &haar(q, s ^ 7), &haar(q, s ^ 9)).unwrap();
        prop_assert!((chi.norm() - 1.0).abs() < 1e-9);
        let p = qe_stage1_success(&haar(q, s), &haar(q, s ^ 7), &haar(q, s ^ 9)).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&p));
    }

    #[test]
    fn emulation_bound_on_random_triples(q in 2usize..=3, s in any::<u64>()) {
        let (phi1, phir, psi) = (haar(q, s), haar(q, s ^ 1), haar(q, s ^ 2));
        let u = haar_random_unitary(1 << q, s ^ 3).unwrap();
        let at = |v: &StateVector| v.apply_unitary(&u, &["q"]).unwrap();
        let e = qe_one_block_emulator((&phi1, &at(&phi1)), (&phir, &at(&phir)), &psi, s).unwrap();
        let bound = qe_stage1_success(&phi1, &phir, &psi).unwrap().sqrt();
        if let Some(f) = e.conditioned_fidelity(&at(&psi)).unwrap() {
            prop_assert!(f >= bound - 1e-9, "{} < {}", f, bound);
        }
    }

    #[test]
    fn p_ov_is_monotone(q in 1usize..=6, a in 0.01f64..=1.0, b in 0.01f64..=1.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(p_ov_classical(q, hi) <= p_ov_classical(q, lo) + 1e-15);
        prop_assert!(p_ov_classical(q, lo) <= p_ov_classical(q + 1, lo) + 1e-15);
        prop_assert!((0.0..=1.0).contains(&p_ov_classical(q, lo)));
    }

    #[test]
    fn swap_acceptance_is_monotone(f1 in 0.0f64..=1.0, f2 in 0.0f64..=1.0, k in 1usize..=3) {
        let t = TestConfig::new(TestKind::SwapTest, k, k).unwrap();
        let (lo, hi) = if f1 <= f2 { (f1, f2) } else { (f2, f1) };
        prop_assert!(t.acceptance_probability(lo) <= t.acceptance_probability(hi) + 1e-15);
    }
}
