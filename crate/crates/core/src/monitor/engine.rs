//! Placing properties into monitors and running them over a trace.
//!
//! A monitor only sees streams that originate at its own component. Binding
//! a property that reads a stream from elsewhere is rejected up front, so
//! the verdicts a monitor produces always come from local observations.

use thiserror::Error;

use super::binding::MonitorBinding;
use crate::property::{bind, evaluate, BindError, EvalError, Evaluator, PropertySpec, Status, Verdict};
use crate::trace::{Level, StreamDecl, Trace};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MonitorError {
    #[error("monitor {monitor} at {placement} cannot observe `{stream}` of property {property}: it originates at {origin}")]
    LocalityViolation { monitor: String, property: String, stream: String, origin: String, placement: String },
    #[error("monitor {monitor} checks unknown property `{property}`")]
    UnknownProperty { monitor: String, property: String },
    #[error("property {property}: {source}")]
    Bind { property: String, source: BindError },
    #[error("property {property}: {source}")]
    Eval { property: String, source: EvalError },
}

/// A monitor with its properties resolved and type-checked.
#[derive(Debug, Clone)]
pub struct Monitor {
    pub id: String,
    pub level: Level,
    pub placement: String,
    pub properties: Vec<PropertySpec>,
}

impl Monitor {
    pub fn new(binding: &MonitorBinding, properties: &[PropertySpec], decls: &[StreamDecl]) -> Result<Monitor, MonitorError> {
        let mut resolved = Vec::new();
        for pid in &binding.properties {
            let spec = properties
                .iter()
                .find(|p| &p.id == pid)
                .ok_or_else(|| MonitorError::UnknownProperty { monitor: binding.id.clone(), property: pid.clone() })?;
            let formula =
                bind(&spec.formula, decls).map_err(|source| MonitorError::Bind { property: spec.id.clone(), source })?;
            for stream in formula.streams() {
                let decl = decls.iter().find(|d| d.id == stream).expect("bound formulas only name declared streams");
                if decl.source != binding.placement {
                    return Err(MonitorError::LocalityViolation {
                        monitor: binding.id.clone(),
                        property: spec.id.clone(),
                        stream,
                        origin: decl.source.clone(),
                        placement: binding.placement.clone(),
                    });
                }
            }
            resolved.push(PropertySpec { formula, ..spec.clone() });
        }
        Ok(Monitor { id: binding.id.clone(), level: binding.level, placement: binding.placement.clone(), properties: resolved })
    }
}

/// Resolves every binding against one property set and stream table.
pub fn build_monitors(
    bindings: &[MonitorBinding],
    properties: &[PropertySpec],
    decls: &[StreamDecl],
) -> Result<Vec<Monitor>, MonitorError> {
    bindings.iter().map(|b| Monitor::new(b, properties, decls)).collect()
}

/// Verdicts of one property inside one monitor.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyRun {
    pub monitor: String,
    pub level: Level,
    pub placement: String,
    pub property: String,
    pub verdicts: Vec<Verdict>,
}

impl PropertyRun {
    pub fn violations(&self) -> impl Iterator<Item = &Verdict> {
        self.verdicts.iter().filter(|v| v.status == Status::Violated)
    }

    /// Violation that became known first.
    pub fn first_violation(&self) -> Option<Verdict> {
        self.violations().min_by_key(|v| (v.decided, v.at)).copied()
    }
}

/// Offline evaluation of every monitor over a complete trace.
pub fn run_monitors(monitors: &[Monitor], trace: &Trace) -> Result<Vec<PropertyRun>, MonitorError> {
    let mut out = Vec::new();
    for m in monitors {
        for p in &m.properties {
            let verdicts =
                evaluate(&p.formula, trace).map_err(|source| MonitorError::Eval { property: p.id.clone(), source })?;
            out.push(PropertyRun {
                monitor: m.id.clone(),
                level: m.level,
                placement: m.placement.clone(),
                property: p.id.clone(),
                verdicts,
            });
        }
    }
    Ok(out)
}

/// A violation reported while the trace is still being produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Alert {
    pub monitor: String,
    pub property: String,
    pub verdict: Verdict,
}

/// Tick-by-tick evaluation of every monitor.
pub struct OnlineMonitors {
    slots: Vec<(usize, usize, Evaluator)>,
    monitors: Vec<Monitor>,
    verdicts: Vec<Vec<Verdict>>,
}

impl OnlineMonitors {
    /// `trace` supplies the stream declarations; it may still be empty.
    pub fn new(monitors: &[Monitor], trace: &Trace) -> Result<Self, MonitorError> {
        let mut slots = Vec::new();
        for (mi, m) in monitors.iter().enumerate() {
            for (pi, p) in m.properties.iter().enumerate() {
                let ev = Evaluator::new(&p.formula, trace).map_err(|source| MonitorError::Eval { property: p.id.clone(), source })?;
                slots.push((mi, pi, ev));
            }
        }
        let n = slots.len();
        Ok(OnlineMonitors { slots, monitors: monitors.to_vec(), verdicts: vec![Vec::new(); n] })
    }

    /// Feeds tick `t`, which must be the next one, and returns violations decided now.
    pub fn step(&mut self, trace: &Trace, t: u64) -> Result<Vec<Alert>, MonitorError> {
        let mut alerts = Vec::new();
        for (i, (mi, pi, ev)) in self.slots.iter_mut().enumerate() {
            let m = &self.monitors[*mi];
            let p = &m.properties[*pi];
            let got = ev.step(trace, t).map_err(|source| MonitorError::Eval { property: p.id.clone(), source })?;
            for v in &got {
                if v.status == Status::Violated {
                    alerts.push(Alert { monitor: m.id.clone(), property: p.id.clone(), verdict: *v });
                }
            }
            self.verdicts[i].extend(got);
        }
        Ok(alerts)
    }

    /// Closes every open obligation and returns the full verdict sequences.
    pub fn finish(mut self) -> Vec<PropertyRun> {
        let mut out = Vec::new();
        for (i, (mi, pi, ev)) in self.slots.iter_mut().enumerate() {
            let m = &self.monitors[*mi];
            let mut verdicts = std::mem::take(&mut self.verdicts[i]);
            verdicts.extend(ev.finish());
            out.push(PropertyRun {
                monitor: m.id.clone(),
                level: m.level,
                placement: m.placement.clone(),
                property: m.properties[*pi].id.clone(),
                verdicts,
            });
        }
        out
    }
}
