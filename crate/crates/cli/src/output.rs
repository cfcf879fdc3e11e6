use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::CliError;

/// CSV file with the config echo as its first line.
pub struct Table {
    path: PathBuf,
    writer: csv::Writer<BufWriter<File>>,
}

impl Table {
    pub fn create(dir: &Path, name: &str, echo: &str, header: &[&str]) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::config(format!("{}: {e}", dir.display())))?;
        let path = dir.join(name);
        let file = File::create(&path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        let mut buf = BufWriter::new(file);
        writeln!(buf, "# {echo}")?;
        let mut writer = csv::Writer::from_writer(buf);
        writer.write_record(header)?;
        Ok(Table { path, writer })
    }

    pub fn row<I, S>(&mut self, fields: I) -> Result<(), CliError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields)?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<PathBuf, CliError> {
        self.writer.flush()?;
        Ok(self.path)
    }
}

/// File-name fragment for a correlation length (`0.5` → `0.5`, `2` → `2`).
pub fn tag(d: f64) -> String {
    format!("{d}")
}
