use std::process::ExitCode;

use fracpq::criteria::{self, Context};

fn main() -> ExitCode {
    let dir = tempfile::tempdir().expect("temporary directory");
    let ctx = Context::new(dir.path());
    let mut failed = 0;
    for id in 1..=criteria::COUNT {
        let r = criteria::run(id, &ctx);
        println!("{}", r.line());
        if !r.passed {
            failed += 1;
            if !r.detail.is_empty() {
                println!("    {}", r.detail);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria::COUNT as usize - failed, criteria::COUNT);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
