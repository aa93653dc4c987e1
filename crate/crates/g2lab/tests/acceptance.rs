#[path = "common/suite.rs"]
#[allow(dead_code)]
mod suite;

use std::process::ExitCode;

use suite::{acceptance, Level};

fn main() -> ExitCode {
    let checks = acceptance(Level::Full, 0);
    for c in &checks {
        println!("{} ({:.1}s)", c.line(), c.seconds);
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    println!("acceptance: {} passed, {failed} failed", checks.len() - failed);
    if failed == 0 && checks.len() == 12 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
