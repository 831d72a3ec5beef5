use clap::Parser;

fn main() {
    let cli = gasurf::cli::Cli::parse();
    std::process::exit(gasurf::cli::run(cli));
}
