use clap::Parser;
use tfzak_cli::{run, Cli};

fn main() {
    let exit = match Cli::try_parse() {
        Ok(cli) => run(cli),
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Some(m) = &exit.message {
        eprintln!("tfzak: {m}");
    }
    std::process::exit(exit.code);
}
