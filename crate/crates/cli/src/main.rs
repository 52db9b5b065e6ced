use clap::Parser;
use free_jacobi::{run, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("free-jacobi: {e}");
        std::process::exit(e.exit_code());
    }
}
