//! Bit-stable emission: every float is written with 17 significant digits and
//! non-finite values are refused.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

/// `{:.16e}` for a finite float.
pub fn fmt_f64(v: f64) -> io::Result<String> {
    if v.is_finite() {
        Ok(format!("{v:.16e}"))
    } else {
        Err(io::Error::new(
            io::ErrorKind::InvalidData,
            format!("non-finite value {v} in output"),
        ))
    }
}

/// Pretty JSON whose floats use [`fmt_f64`]. serde_json routes NaN and
/// infinities to `write_null`, so null is refused outright; optional fields
/// are skipped instead of written as null.
struct ExactFloats<'a>(PrettyFormatter<'a>);

impl Formatter for ExactFloats<'_> {
    fn write_null<W: ?Sized + Write>(&mut self, _writer: &mut W) -> io::Result<()> {
        Err(io::Error::new(
            io::ErrorKind::InvalidData,
            "null or non-finite value in output",
        ))
    }

    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt_f64(value)?.as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_array(writer)
    }

    fn end_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object(writer)
    }

    fn end_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object_value(writer)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, ExactFloats(PrettyFormatter::new()));
    value.serialize(&mut ser).context("serializing JSON output")?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

/// A CSV table whose rows are integer columns followed by float columns.
pub struct CsvTable {
    text: String,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        Self {
            text: format!("{}\n", header.join(",")),
        }
    }

    pub fn row(&mut self, ints: &[usize], floats: &[f64]) -> Result<()> {
        let mut fields: Vec<String> = ints.iter().map(|i| i.to_string()).collect();
        for &v in floats {
            fields.push(fmt_f64(v)?);
        }
        self.text.push_str(&fields.join(","));
        self.text.push('\n');
        Ok(())
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

/// Where a run's artifacts go: JSON to a file or stdout, CSV to a file only.
pub struct Sink<'a> {
    pub csv: Option<&'a Path>,
    pub json: Option<&'a Path>,
}

impl Sink<'_> {
    pub fn emit<T: Serialize>(&self, summary: &T, table: Option<CsvTable>) -> Result<()> {
        let json = to_json(summary)?;
        if let (Some(path), Some(table)) = (self.csv, table) {
            write_file(path, &table.into_string())?;
        }
        match self.json {
            Some(path) => write_file(path, &json),
            None => {
                io::stdout().write_all(json.as_bytes())?;
                Ok(())
            }
        }
    }
}

pub fn finite(name: &str, v: f64) -> Result<f64> {
    if !v.is_finite() {
        bail!("{name} is not finite ({v})");
    }
    Ok(v)
}
