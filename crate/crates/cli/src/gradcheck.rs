use anyhow::Result;
use clap::Args;
use serde::Serialize;
use sgnn::model::gradcheck::{default_cases, run_suite, CaseReport, GradcheckOptions, FD_STEP, REL_TOLERANCE};
use sgnn::model::Arch;

use crate::{print_json, Outcome};

#[derive(Args, Debug)]
pub struct GradcheckArgs {
    /// Only check this architecture.
    #[arg(long)]
    arch: Option<Arch>,
    /// Corrupt the analytic gradient; the check must then fail.
    #[arg(long, hide = true)]
    inject_fault: bool,
}

#[derive(Serialize)]
struct GradcheckOutput {
    passed: bool,
    step: f64,
    tolerance: f64,
    cases: Vec<CaseReport>,
}

pub fn run(a: GradcheckArgs) -> Result<Outcome> {
    let opts = GradcheckOptions {
        inject_fault: a.inject_fault,
        ..GradcheckOptions::default()
    };
    let cases = run_suite(&default_cases(a.arch), &opts)?;
    let passed = cases.iter().all(|c| c.passed);
    for c in cases.iter().filter(|c| !c.passed) {
        for m in &c.mismatches {
            eprintln!(
                "FAIL {} L={} multilabel={} {}[{},{}]: analytic {:.6e} numeric {:.6e} rel {:.2e}",
                c.case.arch, c.case.layers, c.case.multilabel, m.tensor, m.row, m.col, m.analytic, m.numeric, m.rel_error
            );
        }
    }
    print_json(&GradcheckOutput {
        passed,
        step: FD_STEP,
        tolerance: REL_TOLERANCE,
        cases,
    })?;
    Ok(if passed { Outcome::Success } else { Outcome::CheckFailed })
}
