//! Drive the configuration runner from code, as the command-line tool does,
//! and show that a rerun produces the same content hash.

use std::path::Path;

use padic_sde::runner::{run, Command};

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs");
    let out = std::env::temp_dir().join("padic-sde-example");
    for (cmd, file) in [(Command::Charfun, "charfun.toml"), (Command::Solve, "solve.toml"), (Command::Evolve, "evolve.toml")] {
        let a = run(cmd, &dir.join(file), None, &out.join(cmd.name())).expect("run");
        let b = run(cmd, &dir.join(file), None, &out.join(cmd.name())).expect("rerun");
        println!("{:<8} {} reproducible: {}", cmd.name(), a.content_hash, a.content_hash == b.content_hash);
    }
}
