use std::fs;
use std::io::Write;
use std::path::Path;
use std::sync::OnceLock;

use qunforge_cli::acceptance::{Budget, CriterionOutcome};
use qunforge_cli::manifest::DEFAULT_SEED;
use qunforge_cli::reproduce::cmd_reproduce_all;

struct Suite {
    criteria: Vec<CriterionOutcome>,
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap())
        })
        .collect();
    out.sort();
    out
}

// Runs the full suite twice with the same seed; the second run is only used
// for the byte-identity criterion.
fn suite() -> &'static Suite {
    static SUITE: OnceLock<Suite> = OnceLock::new();
    SUITE.get_or_init(|| {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let first = cmd_reproduce_all(DEFAULT_SEED, Budget::default(), Some(a.path())).unwrap();
        cmd_reproduce_all(DEFAULT_SEED, Budget::default(), Some(b.path())).unwrap();
        let (fa, fb) = (files(a.path()), files(b.path()));
        let mut criteria = first.criteria;
        criteria.push(CriterionOutcome::determinism(fa == fb, fa.len()));
        let mut err = std::io::stderr().lock();
        for c in &criteria {
            let _ = writeln!(err, "{}", c.line());
        }
        Suite { criteria }
    })
}

fn check(id: u8) {
    let c = suite().criteria.iter().find(|c| c.id == id).expect("criterion ran");
    assert!(c.passed, "{}", c.line());
}

#[test]
fn criterion_01_superposition_attack_always_wins() {
    check(1);
}

#[test]
fn criterion_02_emulation_fidelity_bound() {
    check(2);
}

#[test]
fn criterion_03_emulation_closed_form() {
    check(3);
}

#[test]
fn criterion_04_emulation_attack_advantage() {
    check(4);
}

#[test]
fn criterion_05_trivial_overlap_calibration() {
    check(5);
}

#[test]
fn criterion_06_double_emulation_per_target() {
    check(6);
}

#[test]
fn criterion_07_randomized_mac_separation() {
    check(7);
}

#[test]
fn criterion_08_adaptive_entanglement_attack() {
    check(8);
}

#[test]
fn criterion_09_verifier_contracts() {
    check(9);
}

#[test]
fn criterion_10_random_function_collisions() {
    check(10);
}

#[test]
fn criterion_11_reproduce_all_is_byte_identical() {
    check(11);
}
