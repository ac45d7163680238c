//! Reading input files and the CSV formats.

use std::path::{Path, PathBuf};

use structinfo::conservation::{ColumnScore, ConservationReport, GapMode};
use structinfo::io::{alignment, json, newick};
use structinfo::{
    Alphabet, DistanceMatrix, Distribution, JointDistribution, PartitionStructure, UltrametricTree,
};

use crate::error::{CliError, CliResult};
use crate::output::csv_num;

pub fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })
}

/// Attaches the file name to parse errors raised while reading `path`.
fn in_file<T>(path: &Path, r: structinfo::Result<T>) -> CliResult<T> {
    r.map_err(|e| match e {
        structinfo::Error::Parse { location, reason } => CliError::Parse {
            path: path.to_path_buf(),
            location,
            reason,
        },
        other => CliError::Core(other),
    })
}

pub fn load_distribution(path: &Path, renormalize: bool) -> CliResult<Distribution> {
    let text = read_text(path)?;
    in_file(path, json::parse_distribution(&text, renormalize))
}

pub fn load_structure(path: &Path, on: Option<&Alphabet>) -> CliResult<PartitionStructure> {
    let text = read_text(path)?;
    in_file(path, json::parse_structure(&text, on))
}

pub fn load_joint(path: &Path) -> CliResult<JointDistribution> {
    let text = read_text(path)?;
    in_file(path, json::parse_joint(&text))
}

pub fn load_alignment(path: &Path) -> CliResult<alignment::Alignment> {
    let text = read_text(path)?;
    in_file(path, alignment::parse_alignment(&text))
}

/// Where the ultrametric comes from: a Newick tree or a CSV distance matrix.
#[derive(Clone, Debug)]
pub enum TreeSource {
    Newick(PathBuf, newick::BranchLengths),
    Matrix(PathBuf),
}

impl TreeSource {
    pub fn load(&self) -> CliResult<UltrametricTree> {
        match self {
            TreeSource::Newick(path, lengths) => {
                let text = read_text(path)?;
                in_file(path, newick::parse_newick(&text, *lengths))
            }
            TreeSource::Matrix(path) => {
                let d = load_distance_csv(path)?;
                Ok(UltrametricTree::from_distance(&d)?)
            }
        }
    }
}

pub fn load_distance_csv(path: &Path) -> CliResult<DistanceMatrix> {
    let text = read_text(path)?;
    parse_distance_csv(&text).map_err(|e| match e {
        CsvError::Parse { location, reason } => CliError::Parse {
            path: path.to_path_buf(),
            location,
            reason,
        },
        CsvError::Core(e) => CliError::Core(e),
    })
}

#[derive(Debug)]
pub enum CsvError {
    Parse { location: String, reason: String },
    Core(structinfo::Error),
}

fn csv_parse_error(line: u64, column: usize, reason: impl Into<String>) -> CsvError {
    CsvError::Parse {
        location: format!("line {line}, column {column}"),
        reason: reason.into(),
    }
}

fn csv_records(text: &str) -> Result<Vec<(u64, csv::StringRecord)>, CsvError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            csv_parse_error(line, 1, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        out.push((line, rec));
    }
    Ok(out)
}

fn parse_float(field: &str, line: u64, column: usize) -> Result<f64, CsvError> {
    match field {
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        "nan" => Ok(f64::NAN),
        _ => field
            .parse()
            .map_err(|_| csv_parse_error(line, column, format!("`{field}` is not a number"))),
    }
}

/// A square matrix with a header row of letters and a leading letter column:
///
/// ```text
/// ,a,b
/// a,0,1
/// b,1,0
/// ```
pub fn parse_distance_csv(text: &str) -> Result<DistanceMatrix, CsvError> {
    let records = csv_records(text)?;
    let Some(((_, header), rows)) = records.split_first() else {
        return Err(csv_parse_error(1, 1, "empty matrix"));
    };
    let letters: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let n = letters.len();
    if rows.len() != n {
        return Err(csv_parse_error(
            rows.last().map_or(1, |r| r.0),
            1,
            format!("{n} letters in the header but {} rows", rows.len()),
        ));
    }
    let mut d = Vec::with_capacity(n * n);
    for (i, (line, rec)) in rows.iter().enumerate() {
        if rec.len() != n + 1 {
            return Err(csv_parse_error(
                *line,
                1,
                format!("expected {} fields, found {}", n + 1, rec.len()),
            ));
        }
        if rec[0] != letters[i] {
            return Err(csv_parse_error(
                *line,
                1,
                format!(
                    "row label `{}` differs from header letter `{}`",
                    &rec[0], letters[i]
                ),
            ));
        }
        for (j, field) in rec.iter().enumerate().skip(1) {
            d.push(parse_float(field, *line, j + 1)?);
        }
    }
    let alphabet = Alphabet::new(letters).map_err(CsvError::Core)?;
    DistanceMatrix::new(alphabet, d).map_err(CsvError::Core)
}

pub fn write_distance_csv(d: &DistanceMatrix) -> String {
    let letters = d.alphabet().letters();
    let mut w = csv::Writer::from_writer(Vec::new());
    let header: Vec<&str> = std::iter::once("")
        .chain(letters.iter().map(String::as_str))
        .collect();
    w.write_record(&header).expect("in-memory write");
    for (a, name) in letters.iter().enumerate() {
        let row: Vec<String> = std::iter::once(name.clone())
            .chain((0..letters.len()).map(|b| csv_num(d.get(a, b))))
            .collect();
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV of UTF-8 fields")
}

pub const CONSERVATION_HEADER: [&str; 6] = [
    "column",
    "coverage",
    "h_u",
    "h",
    "h_reduced",
    "low_coverage",
];

/// One row per column; scores are empty when undefined. Score columns are
/// written through `scale` (the display log base).
pub fn write_conservation_csv(report: &ConservationReport, scale: impl Fn(f64) -> f64) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CONSERVATION_HEADER)
        .expect("in-memory write");
    let opt = |x: Option<f64>| x.map_or(String::new(), |v| csv_num(scale(v)));
    for c in &report.columns {
        w.write_record([
            c.index.to_string(),
            csv_num(c.coverage),
            opt(c.h_u),
            opt(c.h),
            opt(c.h_reduced),
            c.low_coverage.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV of UTF-8 fields")
}

/// Reads back [`write_conservation_csv`] output (scores in bits).
pub fn parse_conservation_csv(
    text: &str,
    gap_mode: GapMode,
    coverage_threshold: f64,
) -> Result<ConservationReport, CsvError> {
    let records = csv_records(text)?;
    let Some(((line, header), rows)) = records.split_first() else {
        return Err(csv_parse_error(1, 1, "empty report"));
    };
    if header.iter().ne(CONSERVATION_HEADER) {
        return Err(csv_parse_error(*line, 1, "unexpected header"));
    }
    let mut columns = Vec::with_capacity(rows.len());
    for (line, rec) in rows {
        if rec.len() != CONSERVATION_HEADER.len() {
            return Err(csv_parse_error(
                *line,
                1,
                format!("expected 6 fields, found {}", rec.len()),
            ));
        }
        let opt = |k: usize| -> Result<Option<f64>, CsvError> {
            if rec[k].is_empty() {
                Ok(None)
            } else {
                parse_float(&rec[k], *line, k + 1).map(Some)
            }
        };
        columns.push(ColumnScore {
            index: rec[0].parse().map_err(|_| {
                csv_parse_error(*line, 1, format!("`{}` is not a column index", &rec[0]))
            })?,
            coverage: parse_float(&rec[1], *line, 2)?,
            h_u: opt(2)?,
            h: opt(3)?,
            h_reduced: opt(4)?,
            low_coverage: rec[5].parse().map_err(|_| {
                csv_parse_error(*line, 6, format!("`{}` is not a boolean", &rec[5]))
            })?,
        });
    }
    Ok(ConservationReport {
        gap_mode,
        coverage_threshold,
        columns,
    })
}
