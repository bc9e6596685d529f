//! Acceptance suite. Runs every criterion at full size, prints one PASS/FAIL
//! line per criterion and exits non-zero if any failed.
//!
//! Arguments that are not flags act as substring filters on the criterion
//! names, e.g. `cargo test --test acceptance -- birthday`.

use std::process::ExitCode;

use riffle_core::validation::{self, CriterionResult};
use riffle_core::Caps;

type Criterion = (&'static str, fn(&Caps) -> CriterionResult);

const CRITERIA: &[Criterion] = &[
    (
        "criterion_01_closed_form_matches_enumeration",
        validation::closed_form_vs_enumeration,
    ),
    (
        "criterion_02_descent_formula_matches_brute_force",
        validation::stanley_vs_brute_force,
    ),
    ("criterion_03_monte_carlo_consistency", |_| {
        validation::monte_carlo_consistency()
    }),
    ("criterion_04_sst_tail_is_separation", |_| {
        validation::sst_equals_separation()
    }),
    ("criterion_05_spectrum_sanity", validation::spectrum_sanity),
    ("criterion_06_birthday_identity_and_bound", validation::birthday),
    (
        "criterion_07_approximation_near_cutoff",
        validation::approximation_at_cutoff,
    ),
    ("criterion_08_cutoff_profile", validation::cutoff_shape),
    (
        "criterion_09_strict_refinement_monotonicity",
        validation::refinement_monotonicity,
    ),
    (
        "criterion_09_weak_refinement_monotonicity",
        validation::refinement_monotonicity_weak,
    ),
    ("criterion_10_seeded_rerun_is_identical", |_| {
        validation::determinism()
    }),
];

fn main() -> ExitCode {
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let caps = Caps::default();
    let mut failed = Vec::new();
    let mut ran = 0;
    for (name, run) in CRITERIA {
        if !filters.is_empty() && !filters.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        ran += 1;
        let r = run(&caps);
        println!("{r}");
        if !r.passed {
            failed.push(*name);
        }
    }
    println!(
        "\nacceptance: {} passed; {} failed",
        ran - failed.len(),
        failed.len()
    );
    for name in &failed {
        println!("    {name}");
    }
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
