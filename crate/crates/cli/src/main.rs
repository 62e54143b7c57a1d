use clap::Parser;

fn main() {
    let cli = ces_interp_cli::Cli::parse();
    std::process::exit(ces_interp_cli::run(cli));
}
