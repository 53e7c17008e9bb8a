use clap::Parser;

fn main() {
    let cli = tto_cli::Cli::parse();
    std::process::exit(tto_cli::run(cli));
}
