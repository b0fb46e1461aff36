mod common;

use std::process::ExitCode;

fn main() -> ExitCode {
    let mut failed = 0;
    for (id, name, run) in common::criteria() {
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS  {id}  {name}  ({detail})"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {id}  {name}  ({why})");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
