//! Acceptance gate: one test per criterion, each running its verification
//! suite at full size and printing a pass/fail line.

use kuiper_core::verify::{run_suite, SuiteReport};

const SEED: u64 = 42;

fn check(criterion: &str, suite: &str, trials: u64) {
    let report: SuiteReport = run_suite(suite, SEED, Some(trials)).expect("known suite");
    let status = if report.passed() { "PASS" } else { "FAIL" };
    println!(
        "{status}  {criterion}  [{} trials, {}, {} ms]",
        report.trials,
        report.exactness_summary(),
        report.wall_ms
    );
    assert!(
        report.passed(),
        "criterion failed: {criterion}\nfirst failures: {:#?}",
        report.failures
    );
}

#[test]
fn criterion_01_exact_fixtures() {
    check(
        "criterion 1: exact fixture distances and witness, under 10 ms",
        "fixtures",
        4,
    );
}

#[test]
fn criterion_02_maximum_attainment() {
    check(
        "criterion 2: kuiper equals the brute-force interval supremum with an attaining witness (1000 pairs)",
        "witness",
        1000,
    );
}

#[test]
fn criterion_03_metric_chain() {
    check(
        "criterion 3: exact chain 0 ≤ KS ≤ Kuiper ≤ min(2·KS, TV) ≤ 1, symmetry, triangle on 300 triples",
        "chain",
        1000,
    );
}

#[test]
fn criterion_04_continuous_family_invariance() {
    check(
        "criterion 4: continuous family g∘r_x preserves the distance (500 trials, exact or 1e-9)",
        "continuous-transport",
        500,
    );
}

#[test]
fn criterion_05_general_family_invariance() {
    check(
        "criterion 5: general family preserves distance and atom masses; pole atoms raise mass deficiency",
        "general-transport",
        500,
    );
}

#[test]
fn criterion_06_conditioning_identity() {
    check(
        "criterion 6: kuiper(μ, μ|I) = 1 − μ(I) exactly, and measures in I are at least that far",
        "conditioning",
        500,
    );
}

#[test]
fn criterion_07_dirac_formula() {
    check(
        "criterion 7: dirac_distance = kuiper(μ, δ_x) = 1 − μ({x}) exactly (500 trials)",
        "dirac",
        500,
    );
}

#[test]
fn criterion_08_unit_distance_characterization() {
    check(
        "criterion 8: is_unit_distant ⇔ kuiper = 1 exactly, symmetric (1000 mixed pairs)",
        "unitdist",
        1000,
    );
}

#[test]
fn criterion_09_quantization_density() {
    check(
        "criterion 9: d_Ku(μ, quantize(μ,n)) ≤ 2/n for n ∈ {4,16,256}; quantize(U[0,1],4) hits 1/4",
        "quantize",
        100,
    );
}

#[test]
fn criterion_10_circle_correspondence() {
    check(
        "criterion 10: |circle_kuiper − kuiper| ≤ 2e-6 + 1e-9 at ε = 1e-6; rotation invariance 1e-12",
        "circle",
        200,
    );
}
