use clap::Parser;

use fredholm_kp::cli::{run, Cli, JobConfig};

fn main() {
    let config = JobConfig::from(Cli::parse());
    let code = run(&config, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    std::process::exit(code);
}
