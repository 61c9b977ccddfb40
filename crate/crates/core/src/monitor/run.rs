//! One scenario, one property set, one monitor layout: simulate and monitor.

use thiserror::Error;

use super::binding::{parse_bindings, BindingError, MonitorBinding};
use super::engine::{build_monitors, run_monitors, Monitor, MonitorError, OnlineMonitors, PropertyRun};
use super::report::{hazard_onsets, ReportError, RunReport};
use crate::inject::{FaultError, FaultSet, FaultSpec};
use crate::property::{parse_properties, ParseError, PropertySpec};
use crate::sim::{simulate, stream_decls, ScenarioConfig, SimOutput};
use crate::trace::Trace;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("properties: {0}")]
    Properties(#[from] ParseError),
    #[error("monitor bindings: {0}")]
    Bindings(#[from] BindingError),
    #[error(transparent)]
    Monitor(#[from] MonitorError),
    #[error(transparent)]
    Fault(#[from] FaultError),
    #[error(transparent)]
    Report(#[from] ReportError),
}

#[derive(Debug, Clone)]
pub struct RunSetup {
    pub scenario: ScenarioConfig,
    pub properties: Vec<PropertySpec>,
    pub bindings: Vec<MonitorBinding>,
    monitors: Vec<Monitor>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub sim: SimOutput,
    pub report: RunReport,
}

impl RunSetup {
    /// Parses properties with the scenario's parameters and binds every
    /// monitor, checking locality against the simulator's streams.
    pub fn new(scenario: ScenarioConfig, properties: &str, bindings: &str) -> Result<RunSetup, RunError> {
        let properties = parse_properties(properties, &scenario.params())?;
        let bindings = parse_bindings(bindings)?;
        let monitors = build_monitors(&bindings, &properties, &stream_decls())?;
        Ok(RunSetup { scenario, properties, bindings, monitors })
    }

    pub fn monitors(&self) -> &[Monitor] {
        &self.monitors
    }

    /// Same setup with another noise seed.
    pub fn with_seed(&self, seed: u64) -> RunSetup {
        let mut s = self.clone();
        s.scenario.seed = seed;
        s
    }

    /// Simulates with `faults` and monitors the resulting trace.
    pub fn run(&self, faults: &[FaultSpec]) -> Result<RunOutcome, RunError> {
        for f in faults {
            f.validate(&self.scenario)?;
        }
        let sim = simulate(&self.scenario, &FaultSet::new(self.scenario.step, faults.iter().cloned()));
        let runs = run_monitors(&self.monitors, &sim.trace)?;
        let report = self.report(faults, &sim, runs)?;
        Ok(RunOutcome { sim, report })
    }

    /// Like [`RunSetup::run`] but feeding the monitors one tick at a time.
    pub fn run_online(&self, faults: &[FaultSpec]) -> Result<RunOutcome, RunError> {
        for f in faults {
            f.validate(&self.scenario)?;
        }
        let sim = simulate(&self.scenario, &FaultSet::new(self.scenario.step, faults.iter().cloned()));
        let mut online = OnlineMonitors::new(&self.monitors, &sim.trace)?;
        for t in sim.trace.end_tick().map_or(0..0, |e| 0..e + 1) {
            online.step(&sim.trace, t)?;
        }
        let runs = online.finish();
        let report = self.report(faults, &sim, runs)?;
        Ok(RunOutcome { sim, report })
    }

    /// Monitors an existing trace, for instance one loaded from a log.
    pub fn monitor_trace(&self, trace: &Trace) -> Result<RunReport, RunError> {
        let runs = run_monitors(&self.monitors, trace)?;
        let hazards = hazard_onsets(&self.scenario.hazards, &self.scenario.params(), trace)?;
        Ok(RunReport::new(&self.scenario.name, self.scenario.seed, None, trace, runs, hazards, Default::default()))
    }

    fn report(&self, faults: &[FaultSpec], sim: &SimOutput, runs: Vec<PropertyRun>) -> Result<RunReport, RunError> {
        let hazards = hazard_onsets(&self.scenario.hazards, &self.scenario.params(), &sim.trace)?;
        let label = (!faults.is_empty()).then(|| faults.iter().map(|f| f.to_string()).collect::<Vec<_>>().join("; "));
        Ok(RunReport::new(&self.scenario.name, self.scenario.seed, label, &sim.trace, runs, hazards, sim.bus))
    }
}
