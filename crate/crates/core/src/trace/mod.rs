//! Time-stamped streams shared by the simulator, the injector and the monitors.
//!
//! A [`Trace`] stores one column per declared stream. Signal streams carry a
//! level-valued sample per tick; event streams are sparse occurrence marks.
//! Samples within a column are strictly increasing in tick, which keeps
//! lookups a binary search and windows a plain slice.

mod log;
mod value;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::time::{StepSize, Timestamp};

pub use log::{export_csv, export_log, import_log};
pub use value::{Sort, Value};

/// Default history retained by online consumers, in ticks.
pub const DEFAULT_WINDOW_LENGTH: u64 = 512;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TraceError {
    #[error("unknown stream `{0}`")]
    UnknownStream(String),
    #[error("stream `{0}` declared twice")]
    DuplicateStream(String),
    #[error("stream `{stream}`: tick {tick} is before last recorded tick {last}")]
    NonMonotonicTimestamp { stream: String, tick: u64, last: u64 },
    #[error("signal `{stream}` already has a sample at tick {tick}")]
    DuplicateSignalSample { stream: String, tick: u64 },
    #[error("event `{stream}` already occurred at tick {tick}")]
    DuplicateEvent { stream: String, tick: u64 },
    #[error("stream `{stream}` has sort {expected}, got a {got} value")]
    SortMismatch { stream: String, expected: String, got: &'static str },
    #[error("value {value} outside the domain of `{stream}`")]
    DomainViolation { stream: String, value: String },
    #[error("bad declaration for `{stream}`: {reason}")]
    BadDeclaration { stream: String, reason: String },
    #[error("trace log line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StreamKind {
    Signal,
    Event,
}

impl fmt::Display for StreamKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StreamKind::Signal => "signal",
            StreamKind::Event => "event",
        })
    }
}

impl FromStr for StreamKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "signal" => Ok(StreamKind::Signal),
            "event" => Ok(StreamKind::Event),
            _ => Err(format!("unknown stream kind `{s}`")),
        }
    }
}

/// Monitoring level: data (M_d), network (M_eta) or functional (M_delta).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    Data,
    Network,
    Functional,
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::Data => "data",
            Level::Network => "network",
            Level::Functional => "functional",
        })
    }
}

impl FromStr for Level {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "data" => Ok(Level::Data),
            "network" => Ok(Level::Network),
            "functional" => Ok(Level::Functional),
            _ => Err(format!("unknown level `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StreamDecl {
    pub id: String,
    pub kind: StreamKind,
    pub sort: Sort,
    pub unit: String,
    /// Component the stream originates at.
    pub source: String,
    pub level: Level,
}

impl StreamDecl {
    pub fn signal(id: &str, sort: Sort, unit: &str, source: &str, level: Level) -> Self {
        StreamDecl {
            id: id.to_string(),
            kind: StreamKind::Signal,
            sort,
            unit: unit.to_string(),
            source: source.to_string(),
            level,
        }
    }

    pub fn event(id: &str, source: &str, level: Level) -> Self {
        StreamDecl {
            id: id.to_string(),
            kind: StreamKind::Event,
            sort: Sort::Event,
            unit: String::new(),
            source: source.to_string(),
            level,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub stream: String,
    pub tick: u64,
    pub value: Value,
}

impl Sample {
    pub fn new(stream: &str, tick: u64, value: Value) -> Self {
        Sample { stream: stream.to_string(), tick, value }
    }
}

/// Index of a declared stream, for allocation-free appends in hot loops.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamHandle(usize);

#[derive(Debug, Clone)]
pub struct Trace {
    step: StepSize,
    window_length: u64,
    decls: Vec<StreamDecl>,
    index: BTreeMap<String, usize>,
    columns: Vec<Vec<(u64, Value)>>,
}

impl Trace {
    pub fn new(step: StepSize) -> Self {
        Trace {
            step,
            window_length: DEFAULT_WINDOW_LENGTH,
            decls: Vec::new(),
            index: BTreeMap::new(),
            columns: Vec::new(),
        }
    }

    pub fn with_window_length(mut self, m: u64) -> Self {
        self.window_length = m;
        self
    }

    pub fn with_streams(step: StepSize, decls: impl IntoIterator<Item = StreamDecl>) -> Result<Self, TraceError> {
        let mut trace = Trace::new(step);
        for d in decls {
            trace.declare(d)?;
        }
        Ok(trace)
    }

    pub fn declare(&mut self, decl: StreamDecl) -> Result<StreamHandle, TraceError> {
        if self.index.contains_key(&decl.id) {
            return Err(TraceError::DuplicateStream(decl.id));
        }
        let consistent = match decl.kind {
            StreamKind::Event => decl.sort == Sort::Event,
            StreamKind::Signal => decl.sort != Sort::Event,
        };
        if !consistent {
            return Err(TraceError::BadDeclaration {
                stream: decl.id,
                reason: format!("{} stream cannot have sort {}", decl.kind, decl.sort),
            });
        }
        if decl.id.is_empty() || decl.id.contains(|c: char| c == ',' || c.is_whitespace()) {
            return Err(TraceError::BadDeclaration { stream: decl.id, reason: "invalid identifier".into() });
        }
        let idx = self.decls.len();
        self.index.insert(decl.id.clone(), idx);
        self.decls.push(decl);
        self.columns.push(Vec::new());
        Ok(StreamHandle(idx))
    }

    pub fn step(&self) -> StepSize {
        self.step
    }

    pub fn window_length(&self) -> u64 {
        self.window_length
    }

    pub fn declarations(&self) -> &[StreamDecl] {
        &self.decls
    }

    pub fn decl(&self, id: &str) -> Option<&StreamDecl> {
        self.index.get(id).map(|&i| &self.decls[i])
    }

    pub fn handle(&self, id: &str) -> Result<StreamHandle, TraceError> {
        self.index
            .get(id)
            .map(|&i| StreamHandle(i))
            .ok_or_else(|| TraceError::UnknownStream(id.to_string()))
    }

    pub fn timestamp(&self, tick: u64) -> Timestamp {
        Timestamp::new(tick, self.step)
    }

    pub fn append(&mut self, sample: Sample) -> Result<(), TraceError> {
        let h = self.handle(&sample.stream)?;
        self.push(h, sample.tick, sample.value)
    }

    pub fn push(&mut self, handle: StreamHandle, tick: u64, value: Value) -> Result<(), TraceError> {
        let decl = &self.decls[handle.0];
        if !decl.sort.admits(&value) {
            return Err(match (&decl.sort, value) {
                (Sort::Enum(_), Value::Enum(v)) => TraceError::DomainViolation { stream: decl.id.clone(), value: v.to_string() },
                _ => TraceError::SortMismatch {
                    stream: decl.id.clone(),
                    expected: decl.sort.to_string(),
                    got: value.sort_tag(),
                },
            });
        }
        let column = &mut self.columns[handle.0];
        if let Some(&(last, _)) = column.last() {
            if tick < last {
                return Err(TraceError::NonMonotonicTimestamp { stream: decl.id.clone(), tick, last });
            }
            if tick == last {
                return Err(match decl.kind {
                    StreamKind::Signal => TraceError::DuplicateSignalSample { stream: decl.id.clone(), tick },
                    StreamKind::Event => TraceError::DuplicateEvent { stream: decl.id.clone(), tick },
                });
            }
        }
        column.push((tick, value));
        Ok(())
    }

    /// Samples of one stream in tick order.
    pub fn column(&self, id: &str) -> Result<&[(u64, Value)], TraceError> {
        let h = self.handle(id)?;
        Ok(&self.columns[h.0])
    }

    pub fn column_at(&self, handle: StreamHandle) -> &[(u64, Value)] {
        &self.columns[handle.0]
    }

    /// Value at exactly `tick`: the signal sample or event mark there, else `None` (absent).
    pub fn value_at(&self, id: &str, tick: u64) -> Result<Option<Value>, TraceError> {
        let h = self.handle(id)?;
        Ok(self.value_at_handle(h, tick))
    }

    pub fn value_at_handle(&self, handle: StreamHandle, tick: u64) -> Option<Value> {
        let column = &self.columns[handle.0];
        column.binary_search_by_key(&tick, |&(t, _)| t).ok().map(|i| column[i].1)
    }

    /// Samples with ticks in `[t - m, t]`, oldest first (clamped at tick 0).
    pub fn window(&self, id: &str, t: u64, m: u64) -> Result<&[(u64, Value)], TraceError> {
        let h = self.handle(id)?;
        let column = &self.columns[h.0];
        let lo = t.saturating_sub(m);
        let start = column.partition_point(|&(tick, _)| tick < lo);
        let end = column.partition_point(|&(tick, _)| tick <= t);
        Ok(&column[start..end])
    }

    /// Largest tick of any sample, or `None` for a trace without samples.
    pub fn end_tick(&self) -> Option<u64> {
        self.columns.iter().filter_map(|c| c.last().map(|&(t, _)| t)).max()
    }

    pub fn len(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All samples ordered by `(tick, stream_id)`.
    pub fn samples(&self) -> Vec<Sample> {
        let mut out: Vec<Sample> = self
            .decls
            .iter()
            .zip(&self.columns)
            .flat_map(|(d, col)| col.iter().map(move |&(tick, value)| Sample { stream: d.id.clone(), tick, value }))
            .collect();
        out.sort_by(|a, b| a.tick.cmp(&b.tick).then_with(|| a.stream.cmp(&b.stream)));
        out
    }

    /// Copy restricted to samples with tick `<= last`.
    pub fn truncated(&self, last: u64) -> Trace {
        let mut t = self.clone();
        for col in &mut t.columns {
            let keep = col.partition_point(|&(tick, _)| tick <= last);
            col.truncate(keep);
        }
        t
    }

    /// Structural equality with bit-exact real values.
    pub fn identical(&self, other: &Trace) -> bool {
        self.step == other.step
            && self.window_length == other.window_length
            && self.decls == other.decls
            && self.columns.len() == other.columns.len()
            && self.columns.iter().zip(&other.columns).all(|(a, b)| {
                a.len() == b.len() && a.iter().zip(b).all(|((ta, va), (tb, vb))| ta == tb && va.bit_eq(vb))
            })
    }
}
