//! Acceptance suite: runs every verification check at the pinned seed and
//! prints one pass/fail line per criterion. Exits nonzero on any failure.

use fdtrace::verify::{run_all, VerifyConfig};

fn main() {
    let cfg = VerifyConfig::default();
    let report = run_all(&cfg);
    for c in &report.checks {
        println!(
            "{} {} (cases {}, max residual {:.3e}, {:.2}s)",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.cases_run,
            c.max_residual,
            c.seconds,
        );
        if let Some(note) = &c.note {
            println!("     note: {note}");
        }
    }
    if !report.all_passed {
        std::process::exit(1);
    }
}
