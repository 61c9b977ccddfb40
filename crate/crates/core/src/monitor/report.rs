//! Run reports: detections, hazard onsets, lead times and output files.

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use super::engine::PropertyRun;
use crate::property::{evaluate, format_seconds, parse_predicate, EvalError, Formula, Params, ParseError, Status};
use crate::sim::{BusStats, HazardDef};
use crate::time::StepSize;
use crate::trace::{export_csv, export_log, Level, Trace};

/// No monitor reported a violation.
pub const EXIT_CLEAN: i32 = 0;
/// At least one violation, and every hazard onset was preceded by one.
pub const EXIT_VIOLATIONS: i32 = 3;
/// A hazard occurred with no earlier detection.
pub const EXIT_MISSED_HAZARD: i32 = 4;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("hazard {id}: {source}")]
    HazardPredicate { id: String, source: ParseError },
    #[error("hazard {id}: {source}")]
    HazardEval { id: String, source: EvalError },
    #[error("writing {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HazardOnset {
    pub id: String,
    pub description: String,
    /// First tick at which the hazard predicate holds.
    pub onset: Option<u64>,
}

/// First tick at which each hazard predicate holds in `trace`.
pub fn hazard_onsets(hazards: &[HazardDef], params: &Params, trace: &Trace) -> Result<Vec<HazardOnset>, ReportError> {
    hazards
        .iter()
        .map(|h| {
            let pred = parse_predicate(&h.when, params)
                .map_err(|source| ReportError::HazardPredicate { id: h.id.clone(), source })?;
            let verdicts = evaluate(&Formula::HoldsAt(pred), trace)
                .map_err(|source| ReportError::HazardEval { id: h.id.clone(), source })?;
            let onset = verdicts.iter().find(|v| v.status == Status::Satisfied).map(|v| v.at);
            Ok(HazardOnset { id: h.id.clone(), description: h.description.clone(), onset })
        })
        .collect()
}

/// First violation of one property in one monitor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Detection {
    pub monitor: String,
    pub level: Level,
    pub placement: String,
    pub property: String,
    /// Tick the violated obligation refers to.
    pub at: u64,
    /// Tick at which the monitor could report it.
    pub decided: u64,
    pub violations: usize,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub scenario: String,
    pub seed: u64,
    pub fault: Option<String>,
    pub step: StepSize,
    pub ticks: u64,
    pub runs: Vec<PropertyRun>,
    pub detections: Vec<Detection>,
    pub hazards: Vec<HazardOnset>,
    pub bus: BusStats,
}

impl RunReport {
    pub fn new(
        scenario: &str,
        seed: u64,
        fault: Option<String>,
        trace: &Trace,
        runs: Vec<PropertyRun>,
        hazards: Vec<HazardOnset>,
        bus: BusStats,
    ) -> Self {
        let mut detections: Vec<Detection> = runs
            .iter()
            .filter_map(|r| {
                r.first_violation().map(|v| Detection {
                    monitor: r.monitor.clone(),
                    level: r.level,
                    placement: r.placement.clone(),
                    property: r.property.clone(),
                    at: v.at,
                    decided: v.decided,
                    violations: r.violations().count(),
                })
            })
            .collect();
        detections.sort_by(|a, b| (a.decided, a.at, &a.monitor, &a.property).cmp(&(b.decided, b.at, &b.monitor, &b.property)));
        RunReport {
            scenario: scenario.to_string(),
            seed,
            fault,
            step: trace.step(),
            ticks: trace.end_tick().map_or(0, |e| e + 1),
            runs,
            detections,
            hazards,
            bus,
        }
    }

    pub fn first_detection(&self) -> Option<&Detection> {
        self.detections.first()
    }

    /// Earliest tick at which `monitor` reported any violation.
    pub fn detected_by(&self, monitor: &str) -> Option<u64> {
        self.detections.iter().filter(|d| d.monitor == monitor).map(|d| d.decided).min()
    }

    pub fn detecting_monitors(&self) -> Vec<&str> {
        let mut m: Vec<&str> = self.detections.iter().map(|d| d.monitor.as_str()).collect();
        m.sort();
        m.dedup();
        m
    }

    /// Ticks from the first detection to the hazard onset; negative when
    /// the hazard came first, `None` when either is absent.
    pub fn lead_ticks(&self, hazard: &str) -> Option<i64> {
        let onset = self.hazards.iter().find(|h| h.id == hazard)?.onset?;
        let first = self.first_detection()?.decided;
        Some(onset as i64 - first as i64)
    }

    pub fn exit_code(&self) -> i32 {
        let first = self.first_detection().map(|d| d.decided);
        let missed = self.hazards.iter().filter_map(|h| h.onset).any(|onset| first.is_none_or(|f| f >= onset));
        if missed {
            EXIT_MISSED_HAZARD
        } else if first.is_some() {
            EXIT_VIOLATIONS
        } else {
            EXIT_CLEAN
        }
    }

    fn seconds(&self, ticks: u64) -> String {
        format_seconds(self.step.wall(ticks))
    }

    fn signed_seconds(&self, ticks: i64) -> String {
        let s = self.seconds(ticks.unsigned_abs());
        if ticks < 0 {
            format!("-{s}")
        } else {
            s
        }
    }

    /// One row per monitor and property.
    pub fn report_csv(&self) -> Result<String, ReportError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["monitor", "level", "placement", "property", "violations", "first_at", "first_decided", "first_decided_s"])?;
        for r in &self.runs {
            let first = r.first_violation();
            w.write_record([
                r.monitor.clone(),
                r.level.to_string(),
                r.placement.clone(),
                r.property.clone(),
                r.violations().count().to_string(),
                first.map_or(String::new(), |v| v.at.to_string()),
                first.map_or(String::new(), |v| v.decided.to_string()),
                first.map_or(String::new(), |v| self.seconds(v.decided)),
            ])?;
        }
        Ok(String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf8 csv"))
    }

    /// Every verdict of every property.
    pub fn verdicts_csv(&self) -> Result<String, ReportError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["monitor", "property", "at", "decided", "status"])?;
        for r in &self.runs {
            for v in &r.verdicts {
                w.write_record([&r.monitor, &r.property, &v.at.to_string(), &v.decided.to_string(), &v.status.to_string()])?;
            }
        }
        Ok(String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf8 csv"))
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "scenario {} (seed {})", self.scenario, self.seed);
        let _ = writeln!(s, "fault    {}", self.fault.as_deref().unwrap_or("none"));
        let _ = writeln!(s, "duration {} s ({} ticks of {} s)", self.seconds(self.ticks), self.ticks, format_seconds(self.step.seconds()));
        let _ = writeln!(s, "bus      sent {} delivered {} dropped {}", self.bus.sent, self.bus.delivered, self.bus.dropped);
        let _ = writeln!(s);
        if self.detections.is_empty() {
            let _ = writeln!(s, "no violations");
        }
        for d in &self.detections {
            let _ = writeln!(
                s,
                "violation {} ({} at {}) {}: first at {} s, reported at {} s, {} violating tick(s)",
                d.monitor,
                d.level,
                d.placement,
                d.property,
                self.seconds(d.at),
                self.seconds(d.decided),
                d.violations
            );
        }
        for h in &self.hazards {
            match h.onset {
                None => {
                    let _ = writeln!(s, "hazard {}: not reached", h.id);
                }
                Some(onset) => {
                    let lead = self.lead_ticks(&h.id).map_or("no detection".to_string(), |l| format!("lead time {} s", self.signed_seconds(l)));
                    let _ = writeln!(s, "hazard {}: onset at {} s, {}", h.id, self.seconds(onset), lead);
                }
            }
        }
        let _ = writeln!(s, "exit code {}", self.exit_code());
        s
    }

    /// Writes report.csv, summary.txt, verdicts.csv, trace.log and trace.csv into `dir`.
    pub fn write_outputs(&self, trace: &Trace, dir: &Path) -> Result<(), ReportError> {
        let io = |path: &Path, source| ReportError::Io { path: path.display().to_string(), source };
        std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
        let files = [
            ("report.csv", self.report_csv()?),
            ("summary.txt", self.summary()),
            ("verdicts.csv", self.verdicts_csv()?),
            ("trace.log", export_log(trace)),
            ("trace.csv", export_csv(trace)),
        ];
        for (name, body) in files {
            let path = dir.join(name);
            std::fs::write(&path, body).map_err(|e| io(&path, e))?;
        }
        Ok(())
    }
}
