use clap::Parser;

fn main() {
    let cli = l1sketch::cli::Cli::parse();
    if let Err(e) = l1sketch::cli::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
