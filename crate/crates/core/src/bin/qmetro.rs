use clap::Parser;
use qubit_metrology::cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    let mut stdout = std::io::stdout().lock();
    if let Err(err) = run(cli, &mut stdout) {
        eprintln!("qmetro: {err}");
        std::process::exit(err.exit_code());
    }
}
