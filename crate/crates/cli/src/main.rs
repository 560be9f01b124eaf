use clap::Parser;

fn main() {
    let cli = lpsym_cli::Cli::parse();
    std::process::exit(lpsym_cli::run(&cli));
}
