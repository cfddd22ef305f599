use std::fs::File;
use std::path::Path;

use crate::error::{Error, Result};

/// Whether the last CSV column is a regression target.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schema {
    /// `d` input columns followed by one target column.
    WithTarget,
    /// `d` input columns only.
    InputsOnly,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    /// 1-based line number in the file.
    pub line: u64,
    pub x: Vec<f64>,
    pub y: Option<f64>,
}

/// Streaming CSV reader yielding validated numeric rows.
pub struct CsvRows {
    reader: csv::Reader<File>,
    header: Vec<String>,
    schema: Schema,
    record: csv::StringRecord,
}

impl CsvRows {
    pub fn open(path: impl AsRef<Path>, schema: Schema) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::Dataset(format!("cannot open {}: {e}", path.display())))?;
        let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(file);
        let header: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
        let min = if schema == Schema::WithTarget { 2 } else { 1 };
        if header.len() < min || header.iter().all(|h| h.is_empty()) {
            return Err(Error::Dataset(format!("{}: missing or too short header row", path.display())));
        }
        Ok(CsvRows { reader, header, schema, record: csv::StringRecord::new() })
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    /// Number of input columns.
    pub fn dim(&self) -> usize {
        match self.schema {
            Schema::WithTarget => self.header.len() - 1,
            Schema::InputsOnly => self.header.len(),
        }
    }

    /// Next row, `None` at end of file.
    pub fn next_row(&mut self) -> Result<Option<Row>> {
        let ok = self.reader.read_record(&mut self.record).map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            Error::Data { line, msg: e.to_string() }
        })?;
        if !ok {
            return Ok(None);
        }
        let line = self.record.position().map(|p| p.line()).unwrap_or(0);
        if self.record.len() != self.header.len() {
            return Err(Error::Data {
                line,
                msg: format!("expected {} columns, found {}", self.header.len(), self.record.len()),
            });
        }
        let mut vals = Vec::with_capacity(self.record.len());
        for (field, name) in self.record.iter().zip(&self.header) {
            let v: f64 = field
                .parse()
                .map_err(|_| Error::Data { line, msg: format!("column {name}: cannot parse {field:?}") })?;
            if !v.is_finite() {
                return Err(Error::Data { line, msg: format!("column {name}: non-finite value {field:?}") });
            }
            vals.push(v);
        }
        let y = match self.schema {
            Schema::WithTarget => vals.pop(),
            Schema::InputsOnly => None,
        };
        Ok(Some(Row { line, x: vals, y }))
    }
}

/// In-memory dataset with row-major inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    dim: usize,
    inputs: Vec<f64>,
    targets: Vec<f64>,
}

impl Dataset {
    pub fn new(dim: usize, inputs: Vec<f64>, targets: Vec<f64>) -> Result<Self> {
        if dim == 0 || inputs.len() != dim * targets.len() {
            return Err(Error::Dataset(format!(
                "{} input values do not form {} rows of dimension {dim}",
                inputs.len(),
                targets.len()
            )));
        }
        if targets.is_empty() {
            return Err(Error::Dataset("dataset is empty".into()));
        }
        if inputs.iter().chain(&targets).any(|v| !v.is_finite()) {
            return Err(Error::Dataset("dataset contains non-finite values".into()));
        }
        Ok(Dataset { dim, inputs, targets })
    }

    pub fn from_rows<P: AsRef<[f64]>>(xs: &[P], ys: &[f64]) -> Result<Self> {
        let dim = xs.first().map(|x| x.as_ref().len()).unwrap_or(0);
        if xs.iter().any(|x| x.as_ref().len() != dim) || xs.len() != ys.len() {
            return Err(Error::Dataset("rows have inconsistent dimensions".into()));
        }
        Self::new(dim, xs.iter().flat_map(|x| x.as_ref().iter().copied()).collect(), ys.to_vec())
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn input(&self, i: usize) -> &[f64] {
        &self.inputs[i * self.dim..(i + 1) * self.dim]
    }

    pub fn inputs(&self) -> Vec<&[f64]> {
        self.inputs.chunks_exact(self.dim).collect()
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn rows(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.inputs.chunks_exact(self.dim).zip(self.targets.iter().copied())
    }

    /// Per-axis `(min, max)` of the inputs.
    pub fn bounds(&self) -> Vec<(f64, f64)> {
        let mut b = vec![(f64::INFINITY, f64::NEG_INFINITY); self.dim];
        for x in self.inputs.chunks_exact(self.dim) {
            for (k, &v) in x.iter().enumerate() {
                b[k].0 = b[k].0.min(v);
                b[k].1 = b[k].1.max(v);
            }
        }
        b
    }

    /// Same inputs, replaced targets.
    pub fn with_targets(&self, targets: Vec<f64>) -> Result<Self> {
        Self::new(self.dim, self.inputs.clone(), targets)
    }
}

/// Reads a whole CSV file. Inputs-only files get all-zero targets.
pub fn load_csv(path: impl AsRef<Path>, schema: Schema) -> Result<Dataset> {
    let mut rows = CsvRows::open(path.as_ref(), schema)?;
    let dim = rows.dim();
    let mut inputs = Vec::new();
    let mut targets = Vec::new();
    while let Some(row) = rows.next_row()? {
        inputs.extend_from_slice(&row.x);
        targets.push(row.y.unwrap_or(0.0));
    }
    if targets.is_empty() {
        return Err(Error::Dataset(format!("{}: no data rows", path.as_ref().display())));
    }
    Dataset::new(dim, inputs, targets)
}

/// Subtracts the target mean; returns the centered dataset and the mean.
pub fn center_targets(ds: &Dataset) -> (Dataset, f64) {
    let mean = ds.targets.iter().sum::<f64>() / ds.len() as f64;
    let centered = ds.targets.iter().map(|y| y - mean).collect();
    (Dataset { dim: ds.dim, inputs: ds.inputs.clone(), targets: centered }, mean)
}
