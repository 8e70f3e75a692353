//! Deterministic CSV output.
//!
//! Floats are written in fixed notation with nine significant digits,
//! obtained from the digits of `{:.8e}`: `0.1464843` becomes `0.146484300`,
//! `1114112.0` becomes `1114112.00`. Negative zero prints as zero. Files are
//! written to a temporary sibling and renamed, so a failed write never
//! leaves a partial file behind.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("schema mismatch: {0}")]
    Schema(String),
    #[error("non-finite value {value} in column {column}")]
    NonFinite { column: String, value: f64 },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnType {
    Int,
    Float,
    Bool,
    Text,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Int(i64),
    Float(f64),
    Bool(bool),
    Text(String),
}

impl Field {
    fn kind(&self) -> ColumnType {
        match self {
            Self::Int(_) => ColumnType::Int,
            Self::Float(_) => ColumnType::Float,
            Self::Bool(_) => ColumnType::Bool,
            Self::Text(_) => ColumnType::Text,
        }
    }
}

impl From<f64> for Field {
    fn from(v: f64) -> Self {
        Self::Float(v)
    }
}

impl From<bool> for Field {
    fn from(v: bool) -> Self {
        Self::Bool(v)
    }
}

impl From<&str> for Field {
    fn from(v: &str) -> Self {
        Self::Text(v.to_string())
    }
}

macro_rules! int_field {
    ($($t:ty),*) => {$(
        impl From<$t> for Field {
            fn from(v: $t) -> Self {
                Self::Int(i64::try_from(v).expect("integer column value out of i64 range"))
            }
        }
    )*};
}
int_field!(i32, i64, u32, u64, usize);

#[derive(Debug, Clone, PartialEq)]
pub struct Schema {
    pub columns: Vec<(String, ColumnType)>,
}

impl Schema {
    pub fn new(columns: &[(&str, ColumnType)]) -> Self {
        Self {
            columns: columns.iter().map(|(n, t)| (n.to_string(), *t)).collect(),
        }
    }
}

/// Nine significant digits in fixed notation.
pub fn format_float(x: f64) -> Option<String> {
    if !x.is_finite() {
        return None;
    }
    let x = if x == 0.0 { 0.0 } else { x };
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    let mut out = String::from(sign);
    if exp < 0 {
        out.push_str("0.");
        out.extend(std::iter::repeat('0').take((-exp - 1) as usize));
        out.push_str(&digits);
    } else if exp as usize >= digits.len() - 1 {
        out.push_str(&digits);
        out.extend(std::iter::repeat('0').take(exp as usize + 1 - digits.len()));
    } else {
        let split = exp as usize + 1;
        out.push_str(&digits[..split]);
        out.push('.');
        out.push_str(&digits[split..]);
    }
    Some(out)
}

fn quote(text: &str) -> String {
    if text.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}

/// Renders the whole file, validating every row against the schema.
pub fn render_csv(rows: &[Vec<Field>], schema: &Schema) -> Result<String, CsvError> {
    let mut out = String::new();
    let header: Vec<String> = schema.columns.iter().map(|(n, _)| quote(n)).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for (i, row) in rows.iter().enumerate() {
        if row.len() != schema.columns.len() {
            return Err(CsvError::Schema(format!(
                "row {i} has {} fields, schema has {}",
                row.len(),
                schema.columns.len()
            )));
        }
        for (j, (field, (name, kind))) in row.iter().zip(&schema.columns).enumerate() {
            if field.kind() != *kind {
                return Err(CsvError::Schema(format!(
                    "row {i}, column {name}: expected {kind:?}, got {:?}",
                    field.kind()
                )));
            }
            if j > 0 {
                out.push(',');
            }
            match field {
                Field::Int(v) => write!(out, "{v}").expect("write to string"),
                Field::Float(v) => {
                    let s = format_float(*v).ok_or_else(|| CsvError::NonFinite {
                        column: name.clone(),
                        value: *v,
                    })?;
                    out.push_str(&s);
                }
                Field::Bool(v) => out.push_str(if *v { "true" } else { "false" }),
                Field::Text(v) => out.push_str(&quote(v)),
            }
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn emit_csv(rows: &[Vec<Field>], schema: &Schema, path: &Path) -> Result<(), CsvError> {
    let text = render_csv(rows, schema)?;
    let io = |source| CsvError::Io {
        path: path.display().to_string(),
        source,
    };
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    fs::write(&tmp, text).map_err(io)?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        io(e)
    })
}
