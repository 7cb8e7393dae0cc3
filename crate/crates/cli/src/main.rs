use clap::Parser;
use entpoly_cli::args::Cli;

fn main() {
    let cli = Cli::parse();
    match entpoly_cli::run_cli(cli) {
        Ok(out) => {
            print!("{out}");
        }
        Err(e) => {
            eprintln!("error [{}]: {}", e.stage, e.failure);
            std::process::exit(e.exit_code());
        }
    }
}
