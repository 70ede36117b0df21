use std::fs::File;
use std::io::{BufWriter, Write};
use std::process::ExitCode;

use zetagen::{write_ordinates, ZeroFinder};

fn usage() -> ExitCode {
    eprintln!("usage: zetagen <count> [output-file]");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let Some(count) = args.first().and_then(|c| c.parse::<usize>().ok()) else {
        return usage();
    };
    let zeros = match ZeroFinder::new().first_zeros(count) {
        Ok(z) => z,
        Err(e) => {
            eprintln!("zetagen: {e}");
            return ExitCode::FAILURE;
        }
    };
    let result = match args.get(1) {
        Some(path) => File::create(path).and_then(|f| {
            let mut out = BufWriter::new(f);
            write_ordinates(&mut out, &zeros)?;
            out.flush()
        }),
        None => write_ordinates(std::io::stdout().lock(), &zeros),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("zetagen: {e}");
            ExitCode::FAILURE
        }
    }
}
