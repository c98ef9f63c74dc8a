//! CSV and JSON writers shared by all subcommands.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::args::Format;
use crate::error::{CliError, CliResult};

/// 17 significant digits, enough to round-trip any f64.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// A result that can be written as CSV or wrapped in a JSON envelope.
pub trait Product {
    /// Name stored in the JSON `schema` field.
    fn schema(&self) -> &'static str;
    fn default_format(&self) -> Format {
        Format::Json
    }
    /// Error to report after the data has been written, if any.
    fn failure(&self) -> Option<CliError> {
        None
    }
    fn write_json(&self, w: &mut dyn Write) -> CliResult<()>;
    fn write_csv(&self, w: &mut csv::Writer<&mut dyn Write>) -> CliResult<()>;
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema: &'a str,
    data: &'a T,
}

pub fn json_envelope<T: Serialize>(schema: &str, data: &T, w: &mut dyn Write) -> CliResult<()> {
    serde_json::to_writer_pretty(&mut *w, &Envelope { schema, data })?;
    writeln!(w)?;
    Ok(())
}

/// Two-column `key,value` layout for scalar reports.
pub fn write_key_values(
    w: &mut csv::Writer<&mut dyn Write>,
    rows: &[(&str, String)],
) -> CliResult<()> {
    w.write_record(["key", "value"])?;
    for (k, v) in rows {
        w.write_record([*k, v.as_str()])?;
    }
    Ok(())
}

pub fn export(product: &dyn Product, format: Option<Format>, path: Option<&Path>) -> CliResult<()> {
    let format = format.unwrap_or_else(|| product.default_format());
    let mut sink: Box<dyn Write> = match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    match format {
        Format::Json => product.write_json(&mut *sink)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *sink as &mut dyn Write);
            product.write_csv(&mut w)?;
            w.flush()?;
        }
    }
    sink.flush()?;
    Ok(())
}
