use std::io::{self, Write};
use std::process::ExitCode;

fn main() -> ExitCode {
    let cfg = match reviewclf_cli::parse_args(std::env::args_os()) {
        Ok(cfg) => cfg,
        Err(e) => e.exit(),
    };
    let stdin = io::stdin();
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let result = reviewclf_cli::run(&cfg, &mut stdin.lock(), &mut out).and_then(|()| Ok(out.flush()?));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("reviewclf: error: {e}");
            ExitCode::FAILURE
        }
    }
}
