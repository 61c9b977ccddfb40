//! Fault descriptions and their per-tick effect.

use std::fmt;

use thiserror::Error;

use crate::property::format_seconds;
use crate::sim::{injectable_sort, MessageId, ScenarioConfig};
use crate::time::{Seconds, StepSize};
use crate::trace::{Sort, Value};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FaultError {
    #[error("fault {fault}: unknown target `{target}`")]
    UnknownTarget { fault: String, target: String },
    #[error("fault {fault}: `{value}` is outside the {sort} domain of `{target}`")]
    DomainViolation { fault: String, target: String, value: String, sort: String },
    #[error("fault {fault}: {kind} cannot target `{target}`")]
    KindMismatch { fault: String, kind: &'static str, target: String },
    #[error("fault {fault}: window [{start}, {end}) s lies outside the {duration} s scenario")]
    WindowOutOfRange { fault: String, start: String, end: String, duration: String },
}

/// What a fault is attached to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FaultTarget {
    /// An output signal, overridden after the producing component computed it.
    Signal(String),
    /// All bus messages with this id.
    Message(MessageId),
    /// The bus as a whole.
    Bus,
}

impl FaultTarget {
    /// `bus`, `bus.<message>` or a signal stream name.
    pub fn parse(text: &str) -> Result<FaultTarget, String> {
        if text == "bus" {
            return Ok(FaultTarget::Bus);
        }
        if let Some(m) = text.strip_prefix("bus.") {
            return m.parse().map(FaultTarget::Message);
        }
        if injectable_sort(text).is_some() {
            return Ok(FaultTarget::Signal(text.to_string()));
        }
        Err(format!("unknown target `{text}`"))
    }
}

impl fmt::Display for FaultTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FaultTarget::Signal(s) => f.write_str(s),
            FaultTarget::Message(m) => write!(f, "bus.{m}"),
            FaultTarget::Bus => f.write_str("bus"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FaultKind {
    /// Output replaced by a constant.
    StuckAt(Value),
    /// Constant added to a real-valued output.
    Offset(f64),
    /// Extra ticks before delivery.
    Delay(u64),
    /// Filler messages put on the bus every tick.
    Flood(u32),
}

impl FaultKind {
    pub fn name(&self) -> &'static str {
        match self {
            FaultKind::StuckAt(_) => "stuck_at",
            FaultKind::Offset(_) => "offset",
            FaultKind::Delay(_) => "delay",
            FaultKind::Flood(_) => "flood",
        }
    }
}

impl fmt::Display for FaultKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FaultKind::StuckAt(v) => write!(f, "stuck_at({v})"),
            FaultKind::Offset(d) => write!(f, "offset({d})"),
            FaultKind::Delay(n) => write!(f, "delay({n} ticks)"),
            FaultKind::Flood(r) => write!(f, "flood({r} msgs/tick)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FaultSpec {
    pub id: String,
    pub target: FaultTarget,
    pub kind: FaultKind,
    pub start: Seconds,
    /// Open-ended when `None`.
    pub duration: Option<Seconds>,
}

impl FaultSpec {
    /// Active ticks as `[first, end)`; `end` is `None` for an open window.
    pub fn window(&self, step: StepSize) -> (u64, Option<u64>) {
        (step.ticks_ceil(self.start), self.duration.map(|d| step.ticks_ceil(self.start + d)))
    }

    pub fn active_at(&self, step: StepSize, tick: u64) -> bool {
        let (first, end) = self.window(step);
        tick >= first && end.is_none_or(|e| tick < e)
    }

    /// Checks target, kind, value domain and window against a scenario.
    pub fn validate(&self, scenario: &ScenarioConfig) -> Result<(), FaultError> {
        let mismatch = || FaultError::KindMismatch { fault: self.id.clone(), kind: self.kind.name(), target: self.target.to_string() };
        match (&self.target, &self.kind) {
            (FaultTarget::Signal(name), kind @ (FaultKind::StuckAt(_) | FaultKind::Offset(_))) => {
                let sort = injectable_sort(name)
                    .ok_or_else(|| FaultError::UnknownTarget { fault: self.id.clone(), target: name.clone() })?;
                let ok = match kind {
                    FaultKind::StuckAt(v) => sort.admits(v),
                    FaultKind::Offset(d) => sort == Sort::Real && d.is_finite(),
                    _ => unreachable!(),
                };
                if !ok {
                    let value = match kind {
                        FaultKind::StuckAt(v) => v.to_string(),
                        FaultKind::Offset(d) => format!("offset {d}"),
                        _ => unreachable!(),
                    };
                    return Err(FaultError::DomainViolation { fault: self.id.clone(), target: name.clone(), value, sort: sort.to_string() });
                }
            }
            (FaultTarget::Message(_), FaultKind::Delay(_)) | (FaultTarget::Bus, FaultKind::Flood(_)) => {}
            _ => return Err(mismatch()),
        }
        let zero = Seconds::from_integer(0);
        let end = self.duration.map(|d| self.start + d);
        let bad = self.start < zero
            || self.start >= scenario.duration
            || self.duration.is_some_and(|d| d <= zero)
            || end.is_some_and(|e| e > scenario.duration);
        if bad {
            return Err(FaultError::WindowOutOfRange {
                fault: self.id.clone(),
                start: format_seconds(self.start),
                end: end.map_or_else(|| "end".to_string(), format_seconds),
                duration: format_seconds(scenario.duration),
            });
        }
        Ok(())
    }
}

impl fmt::Display for FaultSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} on {} from {} s", self.id, self.kind, self.target, format_seconds(self.start))?;
        if let Some(d) = self.duration {
            write!(f, " for {} s", format_seconds(d))?;
        }
        Ok(())
    }
}

/// Faults of one run, queried tick by tick by the simulator.
#[derive(Debug, Clone, Default)]
pub struct FaultSet {
    step: Option<StepSize>,
    faults: Vec<FaultSpec>,
}

impl FaultSet {
    pub fn new(step: StepSize, faults: impl IntoIterator<Item = FaultSpec>) -> Self {
        FaultSet { step: Some(step), faults: faults.into_iter().collect() }
    }

    pub fn none() -> Self {
        FaultSet::default()
    }

    pub fn faults(&self) -> &[FaultSpec] {
        &self.faults
    }

    fn active(&self, tick: u64) -> impl Iterator<Item = &FaultSpec> {
        self.faults.iter().filter(move |f| self.step.is_some_and(|s| f.active_at(s, tick)))
    }

    /// Whether any fault targets this signal.
    pub fn targets_signal(&self, name: &str) -> bool {
        self.faults.iter().any(|f| matches!(&f.target, FaultTarget::Signal(s) if s == name))
    }

    /// Output of `signal` after the faults active at `tick`.
    pub fn apply(&self, signal: &str, tick: u64, value: Value) -> Value {
        self.active(tick)
            .filter(|f| matches!(&f.target, FaultTarget::Signal(s) if s == signal))
            .fold(value, |v, f| match (f.kind, v) {
                (FaultKind::StuckAt(x), _) => x,
                (FaultKind::Offset(d), Value::Real(r)) => Value::Real(r + d),
                _ => v,
            })
    }

    pub fn extra_delay(&self, id: MessageId, tick: u64) -> u64 {
        self.active(tick)
            .filter_map(|f| match (&f.target, f.kind) {
                (FaultTarget::Message(m), FaultKind::Delay(n)) if *m == id => Some(n),
                _ => None,
            })
            .sum()
    }

    pub fn flood_rate(&self, tick: u64) -> u32 {
        self.active(tick)
            .filter_map(|f| match f.kind {
                FaultKind::Flood(r) => Some(r),
                _ => None,
            })
            .sum()
    }
}
