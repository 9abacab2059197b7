use clap::Parser;
use jacobi::cli::{run, Cli};

fn main() {
    match run(Cli::parse()) {
        Ok(out) => {
            print!("{}", out.stdout);
            std::process::exit(out.exit_code);
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(2);
        }
    }
}
