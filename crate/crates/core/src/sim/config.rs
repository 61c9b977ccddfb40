//! Scenario files.
//!
//! ```text
//! scenario nominal {
//!     step = 0.01
//!     duration = 8
//!     seed = 1
//!     ego { speed = 20 set_speed = 20 max_accel = 2 gain = 0.5 }
//!     mio {
//!         gap = 60
//!         speed = 20
//!         segment { from = 1.0 accel = -6 }
//!     }
//!     fusion { period = 2 noise_distance = 0.05 noise_velocity = 0.05 }
//!     bus { latency = 1 capacity = 3 queue_limit = 400 status_period = 1 }
//!     aeb { pb1 = 3.8 pb2 = 5.3 fb = 9.8 t_react = 1.2 }
//!     limits { T_safe = 0.04 D_safe = 1.0 safe_headway = 2.4 }
//!     hazard H-1 { when = "headway < $safe_headway" }
//! }
//! ```

use thiserror::Error;

use crate::blocks::{parse_blocks, Block, BlockError};
use crate::property::{format_seconds, Params};
use crate::time::{Seconds, StepSize};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error(transparent)]
    Parse(#[from] BlockError),
    #[error("expected exactly one `scenario` block, found {0}")]
    ScenarioCount(usize),
    #[error("{field} must be {requirement}, got {value}")]
    OutOfRange { field: &'static str, requirement: &'static str, value: String },
}

/// Deceleration of each partial and full braking stage, in m/s^2, plus the
/// driver reaction time added to the warning threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageTable {
    pub pb1: f64,
    pub pb2: f64,
    pub fb: f64,
    pub t_react: f64,
}

impl Default for StageTable {
    fn default() -> Self {
        StageTable { pb1: 3.8, pb2: 5.3, fb: 9.8, t_react: 1.2 }
    }
}

/// From `from` seconds on, the MIO accelerates at `accel` until the next segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MioSegment {
    pub from: Seconds,
    pub accel: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HazardDef {
    pub id: String,
    /// Predicate text; `$name` refers to scenario parameters.
    pub when: String,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    pub step: StepSize,
    pub duration: Seconds,
    pub seed: u64,

    pub ego_speed: f64,
    pub set_speed: f64,
    pub max_accel: f64,
    pub gain: f64,

    pub initial_gap: f64,
    pub mio_speed: f64,
    pub mio_profile: Vec<MioSegment>,

    /// Ticks between fusion outputs.
    pub fusion_period: u64,
    pub noise_distance: f64,
    pub noise_velocity: f64,

    pub bus_latency: u64,
    pub bus_capacity: usize,
    pub bus_queue_limit: usize,
    /// Ticks between AEBstatus messages.
    pub status_period: u64,

    pub stages: StageTable,
    pub t_safe: Seconds,
    pub d_safe: f64,
    pub safe_headway: f64,
    pub hazards: Vec<HazardDef>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            name: "default".into(),
            step: StepSize::centisecond(),
            duration: Seconds::from_integer(8),
            seed: 0,
            ego_speed: 20.0,
            set_speed: 20.0,
            max_accel: 2.0,
            gain: 0.5,
            initial_gap: 60.0,
            mio_speed: 20.0,
            mio_profile: Vec::new(),
            fusion_period: 2,
            noise_distance: 0.0,
            noise_velocity: 0.0,
            bus_latency: 1,
            bus_capacity: 3,
            bus_queue_limit: 400,
            status_period: 1,
            stages: StageTable::default(),
            t_safe: Seconds::new(4, 100),
            d_safe: 1.0,
            safe_headway: 2.4,
            hazards: vec![HazardDef {
                id: "H-1".into(),
                when: "headway < $safe_headway".into(),
                description: "Unsafe headway distance with the MIO".into(),
            }],
        }
    }
}

impl ScenarioConfig {
    /// Number of simulated ticks.
    pub fn ticks(&self) -> u64 {
        self.step.ticks_ceil(self.duration)
    }

    /// MIO acceleration in effect at wall time `t`.
    pub fn mio_accel(&self, t: Seconds) -> f64 {
        self.mio_profile.iter().filter(|s| s.from <= t).last().map_or(0.0, |s| s.accel)
    }

    /// Parameters substituted into property and hazard texts.
    pub fn params(&self) -> Params {
        let mut p = Params::new();
        p.insert("T_safe".into(), format_seconds(self.t_safe));
        p.insert("D_safe".into(), self.d_safe.to_string());
        p.insert("safe_headway".into(), self.safe_headway.to_string());
        p.insert("fusion_period".into(), format_seconds(self.step.wall(self.fusion_period)));
        p.insert("status_period".into(), format_seconds(self.step.wall(self.status_period)));
        p
    }

    fn check(&self) -> Result<(), ConfigError> {
        let bad = |field, requirement, value: String| Err(ConfigError::OutOfRange { field, requirement, value });
        if self.duration <= Seconds::from_integer(0) {
            return bad("duration", "positive", self.duration.to_string());
        }
        if self.fusion_period == 0 {
            return bad("fusion.period", "at least 1", "0".into());
        }
        if self.status_period == 0 {
            return bad("bus.status_period", "at least 1", "0".into());
        }
        if self.bus_capacity == 0 {
            return bad("bus.capacity", "at least 1", "0".into());
        }
        if self.bus_queue_limit == 0 {
            return bad("bus.queue_limit", "at least 1", "0".into());
        }
        for (field, v) in [("ego.speed", self.ego_speed), ("mio.speed", self.mio_speed), ("ego.set_speed", self.set_speed)] {
            if !(v >= 0.0 && v.is_finite()) {
                return bad(field, "finite and non-negative", v.to_string());
            }
        }
        for (field, v) in [("aeb.pb1", self.stages.pb1), ("aeb.pb2", self.stages.pb2), ("aeb.fb", self.stages.fb)] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(field, "positive", v.to_string());
            }
        }
        if !(self.stages.pb1 <= self.stages.pb2 && self.stages.pb2 <= self.stages.fb) {
            return bad("aeb stages", "ordered pb1 <= pb2 <= fb", format!("{:?}", self.stages));
        }
        for (field, v) in [("fusion.noise_distance", self.noise_distance), ("fusion.noise_velocity", self.noise_velocity)] {
            if !(v >= 0.0 && v.is_finite()) {
                return bad(field, "finite and non-negative", v.to_string());
            }
        }
        if self.t_safe <= Seconds::from_integer(0) {
            return bad("limits.T_safe", "positive", self.t_safe.to_string());
        }
        Ok(())
    }
}

fn section<'a>(b: &'a Block, kind: &str, keys: &[&str]) -> Result<Option<&'a Block>, BlockError> {
    match b.child(kind) {
        None => Ok(None),
        Some(c) => {
            c.expect_keys(keys, &[])?;
            Ok(Some(c))
        }
    }
}

fn usize_or(b: &Block, key: &str, default: usize) -> Result<usize, BlockError> {
    Ok(b.opt_u64(key)?.map_or(default, |v| v as usize))
}

/// Parses a scenario file, filling unspecified fields with defaults.
pub fn parse_scenario(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let blocks = parse_blocks(text)?;
    let scenarios: Vec<&Block> = blocks.iter().filter(|b| b.kind == "scenario").collect();
    if scenarios.len() != 1 || blocks.len() != 1 {
        return Err(ConfigError::ScenarioCount(scenarios.len()));
    }
    let b = scenarios[0];
    b.expect_keys(&["step", "duration", "seed"], &["ego", "mio", "fusion", "bus", "aeb", "limits", "hazard"])?;
    let mut c = ScenarioConfig { name: b.label()?.to_string(), ..ScenarioConfig::default() };
    if let Some(s) = b.opt_str("step")? {
        c.step = s.parse().map_err(|e: crate::time::TimeError| b.pos_of("step", e.to_string()))?;
    }
    if let Some(d) = b.opt_seconds("duration")? {
        c.duration = d;
    }
    c.seed = b.opt_u64("seed")?.unwrap_or(c.seed);

    if let Some(e) = section(b, "ego", &["speed", "set_speed", "max_accel", "gain"])? {
        c.ego_speed = e.f64_or("speed", c.ego_speed)?;
        c.set_speed = e.f64_or("set_speed", c.ego_speed)?;
        c.max_accel = e.f64_or("max_accel", c.max_accel)?;
        c.gain = e.f64_or("gain", c.gain)?;
    }
    if let Some(m) = b.child("mio") {
        m.expect_keys(&["gap", "speed"], &["segment"])?;
        c.initial_gap = m.f64_or("gap", c.initial_gap)?;
        c.mio_speed = m.f64_or("speed", c.mio_speed)?;
        for s in m.children("segment") {
            s.expect_keys(&["from", "accel"], &[])?;
            let from = s.opt_seconds("from")?.ok_or_else(|| s.fail("`segment` block is missing `from`"))?;
            let accel = s.opt_f64("accel")?.ok_or_else(|| s.fail("`segment` block is missing `accel`"))?;
            if c.mio_profile.last().is_some_and(|p: &MioSegment| p.from >= from) {
                return Err(s.pos_of("from", "segments must be in increasing `from` order").into());
            }
            c.mio_profile.push(MioSegment { from, accel });
        }
    }
    if let Some(f) = section(b, "fusion", &["period", "noise_distance", "noise_velocity"])? {
        c.fusion_period = f.opt_u64("period")?.unwrap_or(c.fusion_period);
        c.noise_distance = f.f64_or("noise_distance", c.noise_distance)?;
        c.noise_velocity = f.f64_or("noise_velocity", c.noise_velocity)?;
    }
    if let Some(n) = section(b, "bus", &["latency", "capacity", "queue_limit", "status_period"])? {
        c.bus_latency = n.opt_u64("latency")?.unwrap_or(c.bus_latency);
        c.bus_capacity = usize_or(n, "capacity", c.bus_capacity)?;
        c.bus_queue_limit = usize_or(n, "queue_limit", c.bus_queue_limit)?;
        c.status_period = n.opt_u64("status_period")?.unwrap_or(c.status_period);
    }
    if let Some(a) = section(b, "aeb", &["pb1", "pb2", "fb", "t_react"])? {
        c.stages = StageTable {
            pb1: a.f64_or("pb1", c.stages.pb1)?,
            pb2: a.f64_or("pb2", c.stages.pb2)?,
            fb: a.f64_or("fb", c.stages.fb)?,
            t_react: a.f64_or("t_react", c.stages.t_react)?,
        };
    }
    if let Some(l) = section(b, "limits", &["T_safe", "D_safe", "safe_headway"])? {
        c.t_safe = l.opt_seconds("T_safe")?.unwrap_or(c.t_safe);
        c.d_safe = l.f64_or("D_safe", c.d_safe)?;
        c.safe_headway = l.f64_or("safe_headway", c.safe_headway)?;
    }
    let hazards: Vec<&Block> = b.children("hazard").collect();
    if !hazards.is_empty() {
        c.hazards.clear();
        for h in hazards {
            h.expect_keys(&["when", "description"], &[])?;
            c.hazards.push(HazardDef {
                id: h.label()?.to_string(),
                when: h.str("when")?.to_string(),
                description: h.opt_str("description")?.unwrap_or_default().to_string(),
            });
        }
    }
    c.check()?;
    Ok(c)
}
