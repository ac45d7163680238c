//! Protein multiple sequence alignments in FASTA and Stockholm format.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// The twenty standard amino acids in one-letter code.
pub const AMINO_ACIDS: &str = "ACDEFGHIKLMNPQRSTVWY";

/// Gap characters accepted in alignments; both count as a gap.
pub const GAP_SYMBOLS: &str = "-.";

/// Rows of equal length over the amino acids and the gap symbol `-`.
/// Residues are stored upper-case and `.` is normalized to `-`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alignment {
    names: Vec<String>,
    rows: Vec<Vec<u8>>,
}

impl Alignment {
    pub fn new(names: Vec<String>, rows: Vec<Vec<u8>>) -> Result<Self> {
        if names.len() != rows.len() {
            return Err(Error::Validation("one name per row required".into()));
        }
        if rows.is_empty() {
            return Err(Error::Validation("alignment has no rows".into()));
        }
        let width = rows[0].len();
        for (name, row) in names.iter().zip(&rows) {
            if row.len() != width {
                return Err(Error::Validation(format!(
                    "row `{name}` has length {} but the first row has {width}",
                    row.len()
                )));
            }
        }
        let mut clean = Vec::with_capacity(rows.len());
        for (name, row) in names.iter().zip(rows) {
            let mut r = Vec::with_capacity(row.len());
            for (col, c) in row.into_iter().enumerate() {
                r.push(normalize_residue(c).ok_or_else(|| {
                    Error::parse(
                        format!("row `{name}`, column {}", col + 1),
                        format!("invalid residue `{}`", c as char),
                    )
                })?);
            }
            clean.push(r);
        }
        Ok(Alignment { names, rows: clean })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn width(&self) -> usize {
        self.rows[0].len()
    }

    /// The residues of column `j`, one per row.
    pub fn column(&self, j: usize) -> Vec<u8> {
        self.rows.iter().map(|r| r[j]).collect()
    }
}

fn normalize_residue(c: u8) -> Option<u8> {
    let u = c.to_ascii_uppercase();
    if AMINO_ACIDS.as_bytes().contains(&u) {
        Some(u)
    } else if GAP_SYMBOLS.as_bytes().contains(&c) {
        Some(b'-')
    } else {
        None
    }
}

fn check_residues(line_no: usize, col_offset: usize, seq: &str) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(seq.len());
    for (k, c) in seq.bytes().enumerate() {
        if c.is_ascii_whitespace() {
            continue;
        }
        out.push(normalize_residue(c).ok_or_else(|| {
            Error::parse(
                format!("line {line_no}, column {}", col_offset + k + 1),
                format!("invalid residue `{}`", c as char),
            )
        })?);
    }
    Ok(out)
}

/// Parses FASTA: `>name` header lines followed by sequence lines.
pub fn parse_fasta(text: &str) -> Result<Alignment> {
    let mut names = Vec::new();
    let mut rows: Vec<Vec<u8>> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let trimmed = line.trim_end();
        if trimmed.is_empty() || trimmed.starts_with(';') {
            continue;
        }
        if let Some(header) = trimmed.strip_prefix('>') {
            let name = header.split_whitespace().next().unwrap_or("").to_string();
            if name.is_empty() {
                return Err(Error::parse(
                    format!("line {line_no}"),
                    "empty sequence name",
                ));
            }
            names.push(name);
            rows.push(Vec::new());
        } else {
            let row = rows.last_mut().ok_or_else(|| {
                Error::parse(
                    format!("line {line_no}"),
                    "sequence before the first `>` header",
                )
            })?;
            row.extend(check_residues(line_no, 0, trimmed)?);
        }
    }
    Alignment::new(names, rows)
}

/// Parses single-block or interleaved Stockholm (`# STOCKHOLM 1.0` … `//`).
pub fn parse_stockholm(text: &str) -> Result<Alignment> {
    let mut lines = text.lines().enumerate();
    match lines.by_ref().find(|(_, l)| !l.trim().is_empty()) {
        Some((_, l)) if l.trim_start().starts_with("# STOCKHOLM") => {}
        Some((i, _)) => {
            return Err(Error::parse(
                format!("line {}", i + 1),
                "missing `# STOCKHOLM` header",
            ))
        }
        None => return Err(Error::parse("line 1", "empty input")),
    }
    let mut names: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut rows: Vec<Vec<u8>> = Vec::new();
    let mut terminated = false;
    for (i, line) in lines {
        let line_no = i + 1;
        let trimmed = line.trim();
        if trimmed == "//" {
            terminated = true;
            break;
        }
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut parts = trimmed.splitn(2, char::is_whitespace);
        let name = parts.next().expect("non-empty line").to_string();
        let seq = parts.next().map(str::trim_start).ok_or_else(|| {
            Error::parse(
                format!("line {line_no}"),
                format!("row `{name}` has no sequence"),
            )
        })?;
        let offset = line.len() - line.trim_start().len() + line.trim_start().len() - seq.len();
        let residues = check_residues(line_no, offset, seq)?;
        let k = *index.entry(name.clone()).or_insert_with(|| {
            names.push(name);
            rows.push(Vec::new());
            rows.len() - 1
        });
        rows[k].extend(residues);
    }
    if !terminated {
        return Err(Error::parse("end of input", "missing `//` terminator"));
    }
    Alignment::new(names, rows)
}

/// Parses either format, choosing Stockholm when the header is present.
pub fn parse_alignment(text: &str) -> Result<Alignment> {
    if text.trim_start().starts_with("# STOCKHOLM") {
        parse_stockholm(text)
    } else {
        parse_fasta(text)
    }
}

/// Writes the alignment as FASTA.
pub fn write_fasta(aln: &Alignment) -> String {
    let mut out = String::new();
    for (name, row) in aln.names().iter().zip(aln.rows()) {
        out.push('>');
        out.push_str(name);
        out.push('\n');
        out.push_str(std::str::from_utf8(row).expect("ASCII residues"));
        out.push('\n');
    }
    out
}
