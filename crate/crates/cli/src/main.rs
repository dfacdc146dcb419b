use clap::Parser;
use hscaler_cli::{run, Cli};

fn main() {
    let cli = Cli::try_parse().unwrap_or_else(|e| {
        let code = if e.use_stderr() { 1 } else { 0 };
        let _ = e.print();
        std::process::exit(code);
    });
    if let Ok(n) = std::env::var("HSCALER_THREADS") {
        match n.parse::<usize>() {
            Ok(n) if n > 0 => {
                rayon::ThreadPoolBuilder::new().num_threads(n).build_global().expect("thread pool is built once");
            }
            _ => {
                eprintln!("error: HSCALER_THREADS must be a positive integer, got {n:?}");
                std::process::exit(1);
            }
        }
    }
    if let Err(e) = run(&cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
