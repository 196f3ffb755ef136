//! Runs the bundled scenario into a temporary directory and lists its outputs.

use std::path::Path;

use eigencount::scenario;

fn main() {
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/b0-alpha1.json");
    let out = std::env::temp_dir().join("eigencount-scenario-example");
    let manifest = scenario::run_scenario(&config, Some(&out));
    for stage in &manifest.stages {
        println!("{:?}: {} ({})", stage.stage, if stage.ok { "ok" } else { "failed" }, stage.detail);
    }
    println!("{} files under {}", manifest.files.len(), out.display());
    std::process::exit(manifest.exit_code);
}
