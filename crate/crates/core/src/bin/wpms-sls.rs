use std::io;
use std::process::ExitCode;

use clap::Parser;
use wpms_sls::cli::{solve_main, CliConfig};

fn main() -> ExitCode {
    let cfg = CliConfig::parse();
    let code = solve_main(&cfg, &mut io::stdout().lock(), &mut io::stderr().lock());
    ExitCode::from(code as u8)
}
