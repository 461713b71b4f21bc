use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use crate::error::CliError;

/// `x` with 17 significant digits, enough to round-trip any `f64`.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

/// Opens `path`, or stdout when `None`.
pub fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    match path {
        None => Ok(Box::new(io::stdout().lock())),
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| CliError::Usage(format!("{}: {e}", dir.display())))?;
            }
            let f = File::create(p).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?;
            Ok(Box::new(io::BufWriter::new(f)))
        }
    }
}

pub struct Csv {
    w: csv::Writer<Box<dyn Write>>,
}

impl Csv {
    pub fn create(path: Option<&Path>, header: &[&str]) -> Result<Self, CliError> {
        let mut w = csv::Writer::from_writer(sink(path)?);
        w.write_record(header).map_err(io_err)?;
        Ok(Csv { w })
    }

    pub fn row(&mut self, values: &[f64]) -> Result<(), CliError> {
        self.w.write_record(values.iter().map(|&x| fmt17(x))).map_err(io_err)
    }

    /// A leading text field followed by numbers.
    pub fn labelled_row(&mut self, label: &str, values: &[f64]) -> Result<(), CliError> {
        let mut rec = vec![label.to_string()];
        rec.extend(values.iter().map(|&x| fmt17(x)));
        self.w.write_record(&rec).map_err(io_err)
    }

    pub fn finish(mut self) -> Result<(), CliError> {
        self.w.flush().map_err(|e| CliError::Usage(e.to_string()))
    }
}

fn io_err(e: csv::Error) -> CliError {
    CliError::Usage(e.to_string())
}

pub fn write_text(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    let mut w = sink(path)?;
    w.write_all(text.as_bytes()).and_then(|_| w.flush()).map_err(|e| CliError::Usage(e.to_string()))
}

/// `dir/stem.suffix` next to `path`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}"))
}
