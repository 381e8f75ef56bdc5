use clap::Parser;

use euq_cli::{run, RunConfig, Status};

fn main() {
    let config = RunConfig::parse();
    let mut stdout = std::io::stdout().lock();
    let status = match run(&config, &mut stdout) {
        Ok(status) => status,
        Err(e) => {
            eprintln!("error: {e}");
            Status::Usage
        }
    };
    std::process::exit(status.code());
}
