use clap::Parser;

fn main() {
    let cli = nerode_cli::Cli::parse();
    let code = nerode_cli::run(cli, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    std::process::exit(code);
}
