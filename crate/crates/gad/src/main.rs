use clap::Parser;

fn main() {
    let cli = gad::cli::Cli::parse();
    std::process::exit(gad::cli::main_with(&cli));
}
