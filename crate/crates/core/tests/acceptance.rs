//! All twelve criteria at full size and their pinned tolerances, one line
//! per criterion. Exits non-zero if any criterion fails.

use std::process::ExitCode;

use bridgecut::suites::{Suite, Verifier, VerifyConfig, CRITERIA};

fn main() -> ExitCode {
    let verifier = Verifier::new(VerifyConfig::default()).expect("default configuration is valid");
    let level = Suite::All.level();
    let mut failed = Vec::new();
    for id in CRITERIA {
        match verifier.criterion(id, level) {
            Ok(result) => {
                println!("{}", result.summary_line());
                if !result.passed() {
                    failed.push(id);
                }
            }
            Err(e) => {
                println!("criterion {id:2} FAIL error: {e}");
                failed.push(id);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria pass", CRITERIA.count());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
