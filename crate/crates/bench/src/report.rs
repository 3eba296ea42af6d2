//! CSV and Markdown rendering of benchmark rows.
//!
//! Column order is part of the output format:
//!
//! * throughput: `algorithm, precision, lanes, size, threads, queries, repetitions, passes, mops`
//! * setup statistics: `size, precision, samples, infeasible, updates_mean, updates_min,
//!   updates_max, updates_stdev, ns_per_elem_mean, ns_per_elem_min, ns_per_elem_max,
//!   ns_per_elem_stdev`
//!
//! Throughput rows are emitted sorted by algorithm (in [`Kernel::ALL`] order) and then size,
//! setup rows by size, independent of the order they were measured in. Only `passes`, `mops`
//! and the `ns_per_elem_*` columns depend on timing.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

#[cfg(doc)]
use fastsearch_core::Kernel;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Markdown,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "md" | "markdown" => Ok(Format::Markdown),
            other => Err(format!("unknown format `{other}` (expected csv or md)")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Markdown => "md",
        })
    }
}

/// A row type with a fixed column layout.
pub trait ReportRow {
    const COLUMNS: &'static [&'static str];

    /// One cell per entry of [`ReportRow::COLUMNS`].
    fn cells(&self) -> Vec<String>;

    /// Total order used to sort rows before emitting.
    fn order(&self, other: &Self) -> Ordering;
}

pub fn emit_report<R: ReportRow>(rows: &[R], format: Format) -> String {
    let mut sorted: Vec<&R> = rows.iter().collect();
    sorted.sort_by(|a, b| a.order(b));
    match format {
        Format::Csv => csv_table(R::COLUMNS, sorted.iter().map(|r| r.cells())),
        Format::Markdown => md_table(R::COLUMNS, sorted.iter().map(|r| r.cells())),
    }
}

fn csv_table(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header).expect("writing to memory");
    for r in rows {
        w.write_record(&r).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("cells are utf-8")
}

fn md_escape(cell: &str) -> String {
    cell.replace('\\', "\\\\").replace('|', "\\|").replace('\n', " ")
}

fn md_table(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> String {
    let line = |cells: &mut dyn Iterator<Item = String>| {
        let mut s = String::from("|");
        for c in cells {
            s.push(' ');
            s.push_str(&md_escape(&c));
            s.push_str(" |");
        }
        s.push('\n');
        s
    };
    let mut out = line(&mut header.iter().map(|h| h.to_string()));
    out.push_str(&line(&mut header.iter().map(|_| "---".to_string())));
    for r in rows {
        out.push_str(&line(&mut r.into_iter()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Row(&'static str, u32);

    impl ReportRow for Row {
        const COLUMNS: &'static [&'static str] = &["name", "n"];

        fn cells(&self) -> Vec<String> {
            vec![self.0.to_string(), self.1.to_string()]
        }

        fn order(&self, other: &Self) -> Ordering {
            self.1.cmp(&other.1)
        }
    }

    #[test]
    fn empty_is_header_only() {
        assert_eq!(emit_report::<Row>(&[], Format::Csv), "name,n\n");
        assert_eq!(emit_report::<Row>(&[], Format::Markdown), "| name | n |\n| --- | --- |\n");
    }

    #[test]
    fn rows_sorted_and_escaped() {
        let rows = [Row("b|c", 2), Row("a,b", 1)];
        assert_eq!(emit_report(&rows, Format::Csv), "name,n\n\"a,b\",1\nb|c,2\n");
        let md = emit_report(&rows, Format::Markdown);
        assert_eq!(md.lines().nth(3), Some("| b\\|c | 2 |"));
    }

    #[test]
    fn format_names() {
        assert_eq!("md".parse::<Format>(), Ok(Format::Markdown));
        assert_eq!("csv".parse::<Format>(), Ok(Format::Csv));
        assert!("json".parse::<Format>().is_err());
    }
}
