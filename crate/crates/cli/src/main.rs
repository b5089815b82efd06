use clap::Parser;
use toric_k_cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    let report = run(&cli);
    if cli.options.json {
        println!("{}", report.to_json());
    } else {
        print!("{}", report.to_text());
    }
    std::process::exit(report.exit_status.code());
}
