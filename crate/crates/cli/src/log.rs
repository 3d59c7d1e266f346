use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use crate::error::CliError;

/// In-memory cycle log: one row per cycle, columns named after channels.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LogTable {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl LogTable {
    pub fn new(headers: Vec<String>) -> Self {
        Self { headers, rows: Vec::new() }
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }

    pub fn column(&self, index: usize) -> impl Iterator<Item = f64> + '_ {
        self.rows.iter().map(move |r| r[index])
    }

    pub fn read_csv(path: &Path) -> Result<Self, CliError> {
        let csv_err = |source| CliError::Csv {
            path: path.to_path_buf(),
            source,
        };
        let file = File::open(path).map_err(|e| CliError::io(path, e))?;
        let mut reader = csv::Reader::from_reader(file);
        let headers = reader.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
        let mut table = Self::new(headers);
        for (line, record) in reader.records().enumerate() {
            let record = record.map_err(csv_err)?;
            let row = record
                .iter()
                .map(|field| field.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| CliError::scenario(path, format!("data row {}: {e}", line + 1)))?;
            table.rows.push(row);
        }
        Ok(table)
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), CliError> {
        let mut writer = CsvLogWriter::create(path, &self.headers)?;
        for row in &self.rows {
            writer.write_row(row)?;
        }
        writer.finish()
    }
}

/// Streams log rows to a CSV file.
pub struct CsvLogWriter {
    path: PathBuf,
    writer: csv::Writer<BufWriter<File>>,
}

impl CsvLogWriter {
    pub fn create(path: &Path, headers: &[String]) -> Result<Self, CliError> {
        let file = File::create(path).map_err(|e| CliError::io(path, e))?;
        let mut writer = csv::Writer::from_writer(BufWriter::new(file));
        writer.write_record(headers).map_err(|source| CliError::Csv {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(Self {
            path: path.to_path_buf(),
            writer,
        })
    }

    fn csv_err(&self, source: csv::Error) -> CliError {
        CliError::Csv {
            path: self.path.clone(),
            source,
        }
    }

    pub fn write_row(&mut self, row: &[f64]) -> Result<(), CliError> {
        // ryu formatting through serde: shortest round-trip, platform independent
        self.writer.serialize(row).map_err(|e| self.csv_err(e))
    }

    pub fn finish(mut self) -> Result<(), CliError> {
        self.writer.flush().map_err(|e| CliError::io(&self.path, e))?;
        let inner = self.writer.into_inner().map_err(|e| CliError::io(&self.path, e.into_error()))?;
        inner
            .into_inner()
            .map_err(|e| CliError::io(&self.path, e.into_error()))?
            .sync_all()
            .map_err(|e| CliError::io(&self.path, e))
    }
}
