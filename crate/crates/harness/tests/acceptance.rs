//! One PASS/FAIL line per acceptance criterion.

use std::process::ExitCode;

use bifidelity_harness::verify::{self, Check};
use bifidelity_harness::HarnessError;

type CheckFn = fn() -> Result<Check, HarnessError>;

fn main() -> ExitCode {
    let criteria: [(u32, CheckFn); 10] = [
        (1, verify::example1_ordering),
        (2, || verify::example1_rates(100)),
        (3, verify::cv_laws),
        (4, verify::fem_gradient_check),
        (5, verify::transfer_check),
        (6, verify::kl_spectrum),
        (7, verify::cost_ledger),
        (8, verify::contraction_check),
        (9, verify::topopt_qualitative),
        (10, verify::variance_reduction),
    ];
    let mut failed = 0;
    for (n, check) in criteria {
        match check() {
            Ok(c) => {
                println!("criterion {n}: {} {} ({})", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
                failed += usize::from(!c.passed);
            }
            Err(e) => {
                println!("criterion {n}: FAIL error: {e}");
                failed += 1;
            }
        }
    }
    println!("{} of 10 criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
