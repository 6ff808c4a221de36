use std::io::Read;
use std::path::Path;

use ndarray::Array2;

use crate::{Error, Result};

/// Which CSV column holds the class label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelColumn {
    Index(usize),
    Name(String),
    /// The rightmost column.
    Last,
}

impl std::str::FromStr for LabelColumn {
    type Err = std::convert::Infallible;

    /// Plain non-negative integers select by index, `last` the rightmost
    /// column, anything else a header name.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim();
        Ok(match s.parse::<usize>() {
            Ok(i) => LabelColumn::Index(i),
            Err(_) if s == "last" => LabelColumn::Last,
            Err(_) => LabelColumn::Name(s.to_string()),
        })
    }
}

impl std::fmt::Display for LabelColumn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LabelColumn::Index(i) => write!(f, "{i}"),
            LabelColumn::Name(n) => f.write_str(n),
            LabelColumn::Last => f.write_str("last"),
        }
    }
}

impl LabelColumn {
    fn resolve(&self, header: Option<&[String]>, width: usize) -> Result<usize> {
        match self {
            LabelColumn::Index(i) if *i < width => Ok(*i),
            LabelColumn::Index(i) => Err(Error::MissingLabelColumn(format!("index {i} (file has {width} columns)"))),
            LabelColumn::Last => Ok(width - 1),
            LabelColumn::Name(name) => header
                .and_then(|h| h.iter().position(|c| c == name))
                .ok_or_else(|| Error::MissingLabelColumn(format!("{name:?}"))),
        }
    }
}

/// Parsed CSV: numeric feature rows plus the raw label strings.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTable {
    /// Feature column names (label column removed). Synthesized as
    /// `x0, x1, ...` when the file has no header.
    pub headers: Vec<String>,
    pub label_header: String,
    pub features: Array2<f64>,
    pub labels: Vec<String>,
}

impl RawTable {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

pub fn load_csv(path: impl AsRef<Path>, label_column: &LabelColumn, has_header: bool) -> Result<RawTable> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::file(path, e))?;
    read_csv(file, label_column, has_header)
}

/// Parses comma-separated data. Error locations use 0-based data-row indices
/// (the header is not counted) and 0-based column indices of the file.
pub fn read_csv<R: Read>(reader: R, label_column: &LabelColumn, has_header: bool) -> Result<RawTable> {
    let mut rdr = self::reader(reader, has_header);

    let header: Option<Vec<String>> = if has_header {
        let h = rdr.headers().map_err(|e| csv_error(e, 0))?;
        Some(h.iter().map(str::to_string).collect())
    } else {
        None
    };

    let rows = data_rows(&mut rdr)?;
    let width = match (&header, rows.first()) {
        (Some(h), _) if !h.is_empty() && !(h.len() == 1 && h[0].is_empty()) => h.len(),
        (None, Some(r)) => r.len(),
        _ => {
            return Err(Error::Parse {
                row: 0,
                column: 0,
                message: "file contains no data".into(),
            })
        }
    };
    if rows.is_empty() {
        return Err(Error::Parse {
            row: 0,
            column: 0,
            message: "file contains no data rows".into(),
        });
    }

    let label_idx = label_column.resolve(header.as_deref(), width)?;
    if width < 2 {
        return Err(Error::Parse {
            row: 0,
            column: 0,
            message: "need at least one feature column besides the label".into(),
        });
    }

    let mut values = Vec::with_capacity(rows.len() * (width - 1));
    let mut labels = Vec::with_capacity(rows.len());
    for (r, rec) in rows.iter().enumerate() {
        if rec.len() != width {
            return Err(Error::Parse {
                row: r,
                column: rec.len().min(width),
                message: format!("expected {width} fields, found {}", rec.len()),
            });
        }
        for (c, field) in rec.iter().enumerate() {
            if c == label_idx {
                labels.push(field.to_string());
                continue;
            }
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                row: r,
                column: c,
                message: format!("non-numeric feature value {field:?}"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    row: r,
                    column: c,
                    message: format!("non-finite feature value {field:?}"),
                });
            }
            values.push(v);
        }
    }

    let names: Vec<String> = match &header {
        Some(h) => h.clone(),
        None => (0..width).map(|i| format!("x{i}")).collect(),
    };
    let label_header = names[label_idx].clone();
    let headers = names
        .into_iter()
        .enumerate()
        .filter(|(i, _)| *i != label_idx)
        .map(|(_, n)| n)
        .collect();
    let features = Array2::from_shape_vec((labels.len(), width - 1), values).expect("row widths validated");
    Ok(RawTable {
        headers,
        label_header,
        features,
        labels,
    })
}

fn reader<R: Read>(reader: R, has_header: bool) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader)
}

fn data_rows<R: Read>(rdr: &mut csv::Reader<R>) -> Result<Vec<csv::StringRecord>> {
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| csv_error(e, i))?;
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        rows.push(rec);
    }
    Ok(rows)
}

/// Reads an all-numeric CSV as a feature matrix, optionally dropping a label
/// column. Input without data rows gives a `0 × 0` matrix.
pub fn read_features<R: Read>(reader: R, drop: Option<&LabelColumn>, has_header: bool) -> Result<Array2<f64>> {
    let mut rdr = self::reader(reader, has_header);
    let header: Option<Vec<String>> = if has_header {
        let h = rdr.headers().map_err(|e| csv_error(e, 0))?;
        Some(h.iter().map(str::to_string).collect())
    } else {
        None
    };
    let rows = data_rows(&mut rdr)?;
    let Some(first) = rows.first() else {
        return Ok(Array2::zeros((0, 0)));
    };
    let width = first.len();
    let skip = drop.map(|c| c.resolve(header.as_deref(), width)).transpose()?;
    let mut values = Vec::with_capacity(rows.len() * width);
    for (r, rec) in rows.iter().enumerate() {
        if rec.len() != width {
            return Err(Error::Parse {
                row: r,
                column: rec.len().min(width),
                message: format!("expected {width} fields, found {}", rec.len()),
            });
        }
        for (c, field) in rec.iter().enumerate() {
            if Some(c) == skip {
                continue;
            }
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                row: r,
                column: c,
                message: format!("non-numeric feature value {field:?}"),
            })?;
            values.push(v);
        }
    }
    let cols = width - usize::from(skip.is_some());
    Ok(Array2::from_shape_vec((rows.len(), cols), values).expect("row widths validated"))
}

fn csv_error(e: csv::Error, row: usize) -> Error {
    match e.kind() {
        csv::ErrorKind::Io(_) => Error::Io(std::io::Error::other(e.to_string())),
        _ => Error::Parse {
            row,
            column: 0,
            message: e.to_string(),
        },
    }
}
