use lrtrace::asymptotics::Mutation;
use lrtrace::verify::{run, VerifyOptions};
use std::process::ExitCode;

fn main() -> ExitCode {
    let report = run(&VerifyOptions { mutation: Mutation::None, ..Default::default() });
    assert_eq!(report.criteria.len(), 13);
    for c in &report.criteria {
        println!(
            "criterion {:>2} {:<22} {} ({:.1} ms) {}",
            c.id,
            c.name,
            if c.passed { "PASS" } else { "FAIL" },
            c.elapsed_ms,
            c.detail
        );
    }
    let passed = report.criteria.iter().filter(|c| c.passed).count();
    println!("acceptance: {passed}/{} criteria passed", report.criteria.len());
    if report.all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
