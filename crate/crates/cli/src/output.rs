use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::Result;

/// Destination named by `--out`: a file path, or `-` for standard output.
#[derive(Clone, Debug)]
pub enum Sink {
    Stdout,
    File(PathBuf),
}

impl Sink {
    pub fn parse(arg: &str) -> Self {
        if arg == "-" {
            Sink::Stdout
        } else {
            Sink::File(PathBuf::from(arg))
        }
    }

    pub fn path(&self) -> Option<&Path> {
        match self {
            Sink::Stdout => None,
            Sink::File(p) => Some(p),
        }
    }

    pub fn open(&self) -> Result<Box<dyn Write>> {
        Ok(match self {
            Sink::Stdout => Box::new(BufWriter::new(io::stdout().lock())),
            Sink::File(p) => Box::new(BufWriter::new(File::create(p)?)),
        })
    }

    pub fn write_json(&self, value: &impl Serialize) -> Result<()> {
        let mut w = self.open()?;
        serde_json::to_writer_pretty(&mut w, value)?;
        w.write_all(b"\n")?;
        w.flush()?;
        Ok(())
    }
}

/// Shortest decimal that round-trips to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

/// Writes `rows` as CSV with a leading comment line and a header, LF endings.
pub fn write_csv(w: &mut dyn Write, comment: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    writeln!(w, "# {comment}")?;
    writeln!(w, "{}", header.join(","))?;
    for row in rows {
        writeln!(w, "{}", row.join(","))?;
    }
    w.flush()?;
    Ok(())
}
