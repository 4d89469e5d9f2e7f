//! Histogram files.
//!
//! | Format | Row | Id |
//! |--------|-----|----|
//! | CSV | `0.2,0.3,0.5` | first column with `--id-column`, else the row number |
//! | JSONL | `[0.2, 0.3, 0.5]` or `{"id": "a", "weights": [...]}` | `id` field, else the row number |
//!
//! Blank lines and lines starting with `#` are skipped. Row numbers count
//! data rows from 0.

use std::fs::File;
use std::io::{self, BufRead, BufReader, Read};
use std::path::Path;

use divmetric_core::{validate_distribution, Distribution, ValidateOptions};
use serde::{Deserialize, Serialize};

use crate::args::{Format, InputArgs};
use crate::error::{CliError, CliResult};

/// Row identifier. Numeric ids sort before names; ties in query results
/// break on this order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RowId {
    Num(u64),
    Name(String),
}

impl RowId {
    fn parse(s: &str) -> Self {
        match s.trim().parse::<u64>() {
            Ok(n) => RowId::Num(n),
            Err(_) => RowId::Name(s.trim().to_string()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Row {
    pub id: RowId,
    pub line: u64,
    pub dist: Distribution,
}

fn open(path: &str) -> CliResult<Box<dyn Read>> {
    if path == "-" {
        return Ok(Box::new(io::stdin()));
    }
    File::open(path)
        .map(|f| Box::new(f) as Box<dyn Read>)
        .map_err(|source| CliError::Io {
            path: path.into(),
            source,
        })
}

fn detect(path: &str, format: Format) -> Format {
    match format {
        Format::Auto => {
            let ext = Path::new(path)
                .extension()
                .and_then(|e| e.to_str())
                .unwrap_or("");
            if ext.eq_ignore_ascii_case("jsonl") || ext.eq_ignore_ascii_case("ndjson") {
                Format::Jsonl
            } else {
                Format::Csv
            }
        }
        f => f,
    }
}

/// Reads and validates every row of `path`.
pub fn read_rows(path: &str, args: &InputArgs) -> CliResult<Vec<Row>> {
    let opts = ValidateOptions {
        smoothing: args.smooth,
        renormalize: args.renormalize,
    };
    let reader = open(path)?;
    let raw = match detect(path, args.format) {
        Format::Jsonl => read_jsonl(path, reader)?,
        _ => read_csv(path, reader, args.header, args.id_column)?,
    };
    if raw.is_empty() {
        return Err(CliError::BadFile {
            path: path.into(),
            message: "no data rows".into(),
        });
    }
    raw.into_iter()
        .enumerate()
        .map(|(i, (id, line, values))| {
            let dist = validate_distribution(&values, opts).map_err(|e| CliError::Row {
                path: path.into(),
                line,
                message: e.to_string(),
            })?;
            Ok(Row {
                id: id.unwrap_or(RowId::Num(i as u64)),
                line,
                dist,
            })
        })
        .collect()
}

type RawRow = (Option<RowId>, u64, Vec<f64>);

fn read_csv(
    path: &str,
    reader: Box<dyn Read>,
    header: bool,
    id_column: bool,
) -> CliResult<Vec<RawRow>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(header)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| CliError::Row {
            path: path.into(),
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let mut fields = record.iter();
        let id = if id_column {
            fields.next().map(RowId::parse)
        } else {
            None
        };
        let values = fields
            .map(|f| {
                f.parse::<f64>().map_err(|_| CliError::Row {
                    path: path.into(),
                    line,
                    message: format!("not a number: {f:?}"),
                })
            })
            .collect::<CliResult<Vec<_>>>()?;
        rows.push((id, line, values));
    }
    Ok(rows)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum JsonRow {
    Bare(Vec<f64>),
    Tagged {
        id: Option<JsonId>,
        weights: Vec<f64>,
    },
}

#[derive(Deserialize)]
#[serde(untagged)]
enum JsonId {
    Num(u64),
    Name(String),
}

fn read_jsonl(path: &str, reader: Box<dyn Read>) -> CliResult<Vec<RawRow>> {
    let mut rows = Vec::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line_no = i as u64 + 1;
        let text = line.map_err(|source| CliError::Io {
            path: path.into(),
            source,
        })?;
        let t = text.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let row: JsonRow = serde_json::from_str(t).map_err(|e| CliError::Row {
            path: path.into(),
            line: line_no,
            message: format!("expected an array of numbers or {{\"id\", \"weights\"}}: {e}"),
        })?;
        rows.push(match row {
            JsonRow::Bare(w) => (None, line_no, w),
            JsonRow::Tagged { id, weights } => {
                let id = id.map(|j| match j {
                    JsonId::Num(n) => RowId::Num(n),
                    JsonId::Name(s) => RowId::Name(s),
                });
                (id, line_no, weights)
            }
        });
    }
    Ok(rows)
}
