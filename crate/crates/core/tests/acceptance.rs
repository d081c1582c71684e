//! The ten acceptance criteria, exact (tolerance 0). Runs without the test
//! harness so the one-line-per-criterion report is always shown.

use std::process::ExitCode;

use gt_core::checks::{self, SuiteOptions};

fn main() -> ExitCode {
    let opts = SuiteOptions::default();
    let criteria: [fn(&SuiteOptions) -> checks::CriterionResult; 10] = [
        checks::criterion_1,
        checks::criterion_2,
        checks::criterion_3,
        checks::criterion_4,
        checks::criterion_5,
        checks::criterion_6,
        checks::criterion_7,
        checks::criterion_8,
        checks::criterion_9,
        checks::criterion_10,
    ];
    let mut failed = 0;
    for run in criteria {
        let r = run(&opts);
        println!("{}", r.line());
        for n in &r.notes {
            println!("      note: {n}");
        }
        for f in r.failures.iter().take(20) {
            println!("      fail: {f}");
        }
        failed += usize::from(!r.passed());
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
