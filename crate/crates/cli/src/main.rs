use clap::Parser;

fn main() {
    let cli = bohmtrap_cli::Cli::parse();
    if let Err(e) = bohmtrap_cli::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
