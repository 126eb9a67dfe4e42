use clap::Parser;

fn main() {
    let cli = match uoh::cli::Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            std::process::exit(if e.use_stderr() { 4 } else { 0 });
        }
    };
    if let Err(e) = uoh::cli::run(&cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
