use clap::Parser;
use falsetate_cli::{exit_code, run, Cli};

fn main() {
    let cli = Cli::parse();
    let r = run(cli);
    if let Err(e) = &r {
        eprintln!("{e}");
    }
    std::process::exit(exit_code(&r));
}
