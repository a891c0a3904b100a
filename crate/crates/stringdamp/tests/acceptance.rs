//! Acceptance suite: one test per verification criterion, at the same
//! tolerances enforced by `stringdamp verify all`. Each test prints a
//! one-line pass/fail verdict (visible with `--nocapture`).

use stringdamp::verify::{self, CheckResult};

fn assert_check(n: usize, check: CheckResult) {
    println!("criterion {:>2} {}", n, check.summary_line());
    assert!(
        check.passed,
        "criterion {n} failed: {} (measured {:.3e} > {:.3e})\n{}",
        check.id,
        check.measured,
        check.threshold,
        check.details.join("\n")
    );
}

#[test]
fn criterion_01_exact_decay_law() {
    let start = std::time::Instant::now();
    assert_check(1, verify::check_decay_law(verify::DEFAULT_SEED));
    assert!(start.elapsed().as_secs_f64() < 1.0, "decay check exceeded 1 s");
}

#[test]
fn criterion_02_asymptotic_optimality_rate() {
    let start = std::time::Instant::now();
    assert_check(2, verify::check_optimality_rate(verify::DEFAULT_SEED));
    assert!(start.elapsed().as_secs_f64() < 5.0, "optimality check exceeded 5 s");
}

#[test]
fn criterion_03_near_target_characterization() {
    assert_check(3, verify::check_near_target(verify::DEFAULT_SEED));
}

#[test]
fn criterion_04_a_priori_reachability_bound() {
    assert_check(4, verify::check_apriori_bound(verify::DEFAULT_SEED));
}

#[test]
fn criterion_05_limit_shape_convergence() {
    assert_check(5, verify::check_shape_convergence(verify::DEFAULT_SEED));
}

#[test]
fn criterion_06_duality_attainment() {
    assert_check(6, verify::check_duality_attainment(verify::DEFAULT_SEED));
}

#[test]
fn criterion_07_spectral_truncation() {
    assert_check(7, verify::check_secular_truncation());
}

#[test]
fn criterion_08_singular_arc_identities() {
    assert_check(8, verify::check_singular_arcs(verify::DEFAULT_SEED));
}

#[test]
fn criterion_09_energy_contraction_empirical() {
    assert_check(9, verify::check_energy_contraction(verify::DEFAULT_SEED));
}

#[test]
fn criterion_10_eisenstein_kernel_oracle() {
    assert_check(10, verify::check_eisenstein_kernel());
}

#[test]
fn reachable_states_pass_membership_and_scaled_states_fail() {
    let (margin, scaled) = verify::membership_probe(verify::DEFAULT_SEED).unwrap();
    println!("membership margin {margin:.3e}; scaled-state margin {scaled:.3e}");
    assert!(margin <= 1e-8);
    assert!(scaled > 0.0);
}
