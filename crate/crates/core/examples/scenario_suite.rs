//! Run the bundled scenario corpus and print the text report.

use std::path::Path;

use ks_collapse::scenario::{run_suite, RunOptions};

fn main() -> ks_collapse::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    let report = run_suite(&dir, &RunOptions::default())?;
    print!("{}", report.render_text());
    std::process::exit(report.status().exit_code());
}
