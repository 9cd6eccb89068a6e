use clap::Parser;

use vclab::cli::{dispatch, Cli};

fn main() {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        // a second init in the same process is harmless; ignore it
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build_global();
    }
    match dispatch(&cli) {
        Ok(outcome) => {
            let mut body = outcome.body;
            if !body.ends_with('\n') {
                body.push('\n');
            }
            match &cli.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, body) {
                        eprintln!("error: {e}");
                        std::process::exit(2);
                    }
                }
                None => print!("{body}"),
            }
            std::process::exit(outcome.exit);
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    }
}
