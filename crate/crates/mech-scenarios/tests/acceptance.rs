//! One line per acceptance criterion; exits nonzero if any fails.

use std::process::ExitCode;

use mech_scenarios::acceptance_criteria;

fn main() -> ExitCode {
    let criteria = acceptance_criteria();
    for c in &criteria {
        let status = if c.pass { "PASS" } else { "FAIL" };
        match c.first_failure() {
            Some(f) => println!("criterion {:>2} {status}: {} ({} = {:e})", c.number, c.title, f.name, f.value),
            None => println!("criterion {:>2} {status}: {}", c.number, c.title),
        }
    }
    for c in &criteria {
        for check in c.checks.iter().filter(|k| !k.pass) {
            println!("  criterion {}: {} value {:e} tolerance {:?}", c.number, check.name, check.value, check.tolerance);
        }
    }
    let passed = criteria.iter().filter(|c| c.pass).count();
    println!("acceptance: {passed} of {} criteria pass", criteria.len());
    if criteria.len() == 12 && passed == criteria.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
