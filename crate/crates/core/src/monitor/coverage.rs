//! Fault-by-monitor coverage matrix.

use std::fmt;

use thiserror::Error;

use super::report::RunReport;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoverageError {
    #[error("run `{row}` has monitors [{}], expected [{}]", .found.join(", "), .expected.join(", "))]
    MismatchedRunIds { row: String, expected: Vec<String>, found: Vec<String> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cell {
    /// Tick at which the monitor first reported a violation.
    Detected(u64),
    Missed,
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Detected(t) => write!(f, "detected@{t}"),
            Cell::Missed => f.write_str("missed"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageMatrix {
    pub monitors: Vec<String>,
    pub rows: Vec<(String, Vec<Cell>)>,
}

fn monitor_ids(report: &RunReport) -> Vec<String> {
    let mut ids: Vec<String> = Vec::new();
    for r in &report.runs {
        if !ids.contains(&r.monitor) {
            ids.push(r.monitor.clone());
        }
    }
    ids
}

/// Builds the matrix from labelled runs. Every run must use the same monitors.
pub fn coverage_matrix(runs: &[(String, &RunReport)]) -> Result<CoverageMatrix, CoverageError> {
    let monitors = runs.first().map(|(_, r)| monitor_ids(r)).unwrap_or_default();
    let mut rows = Vec::new();
    for (label, report) in runs {
        let found = monitor_ids(report);
        if found != monitors {
            return Err(CoverageError::MismatchedRunIds { row: label.clone(), expected: monitors, found });
        }
        let cells = monitors.iter().map(|m| report.detected_by(m).map_or(Cell::Missed, Cell::Detected)).collect();
        rows.push((label.clone(), cells));
    }
    Ok(CoverageMatrix { monitors, rows })
}

impl CoverageMatrix {
    pub fn cell(&self, row: &str, monitor: &str) -> Option<Cell> {
        let col = self.monitors.iter().position(|m| m == monitor)?;
        self.rows.iter().find(|(r, _)| r == row).map(|(_, cells)| cells[col])
    }

    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(std::iter::once("fault").chain(self.monitors.iter().map(String::as_str)))?;
        for (label, cells) in &self.rows {
            w.write_record(std::iter::once(label.clone()).chain(cells.iter().map(Cell::to_string)))?;
        }
        Ok(String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf8 csv"))
    }
}

impl fmt::Display for CoverageMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let first = self.rows.iter().map(|(l, _)| l.len()).chain([5]).max().unwrap_or(5);
        let widths: Vec<usize> = self
            .monitors
            .iter()
            .enumerate()
            .map(|(i, m)| self.rows.iter().map(|(_, c)| c[i].to_string().len()).chain([m.len()]).max().unwrap_or(0))
            .collect();
        write!(f, "{:<first$}", "fault")?;
        for (m, w) in self.monitors.iter().zip(&widths) {
            write!(f, "  {m:<w$}")?;
        }
        writeln!(f)?;
        for (label, cells) in &self.rows {
            write!(f, "{label:<first$}")?;
            for (c, w) in cells.iter().zip(&widths) {
                write!(f, "  {:<w$}", c.to_string())?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
