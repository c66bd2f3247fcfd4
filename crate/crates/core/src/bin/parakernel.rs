use clap::Parser;

fn main() {
    let cli = parakernel::cli::Cli::parse();
    let code = parakernel::cli::run(&cli, &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}
