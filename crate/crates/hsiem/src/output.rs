use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use crate::CliError;

/// Shortest round-trip formatting; plain decimals for moderate magnitudes.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e6).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn io_error(e: io::Error) -> CliError {
    if e.kind() == io::ErrorKind::BrokenPipe {
        CliError::BrokenPipe
    } else {
        CliError::Io(e.to_string())
    }
}

/// One line to stdout; a closed pipe is reported as [`CliError::BrokenPipe`].
pub fn say(line: &str) -> Result<(), CliError> {
    writeln!(io::stdout().lock(), "{line}").map_err(io_error)
}

/// Writes a header and rows as CSV to `path`, or to stdout.
pub fn write_csv(path: Option<&Path>, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let sink: Box<dyn Write> = match path {
        Some(p) => Box::new(File::create(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?),
        None => Box::new(io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(sink);
    let io_err = |e: csv::Error| match e.into_kind() {
        csv::ErrorKind::Io(e) => io_error(e),
        other => CliError::Io(format!("{other:?}")),
    };
    w.write_record(header).map_err(io_err)?;
    for r in rows {
        w.write_record(r).map_err(io_err)?;
    }
    w.flush().map_err(io_error)
}
