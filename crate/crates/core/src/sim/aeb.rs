//! Forward collision warning and staged braking.

use std::fmt;

use thiserror::Error;

use super::config::StageTable;

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum AebError {
    #[error("deceleration must be positive, got {0}")]
    NonPositiveDecel(f64),
}

/// Braking stage, published as the AEBstatus value 0 to 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum Stage {
    #[default]
    Off,
    PartialOne,
    PartialTwo,
    Full,
}

impl Stage {
    pub fn status(self) -> u8 {
        self as u8
    }

    pub fn from_status(v: u8) -> Option<Stage> {
        match v {
            0 => Some(Stage::Off),
            1 => Some(Stage::PartialOne),
            2 => Some(Stage::PartialTwo),
            3 => Some(Stage::Full),
            _ => None,
        }
    }

    /// Commanded deceleration in m/s^2; zero when off.
    pub fn decel(self, table: &StageTable) -> f64 {
        match self {
            Stage::Off => 0.0,
            Stage::PartialOne => table.pb1,
            Stage::PartialTwo => table.pb2,
            Stage::Full => table.fb,
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Off => "off",
            Stage::PartialOne => "PB1",
            Stage::PartialTwo => "PB2",
            Stage::Full => "FB",
        })
    }
}

/// Time to collision in seconds, or `None` when the gap is not closing.
///
/// `relative_velocity` is MIO speed minus ego speed. A negative distance
/// means the vehicles already overlap and gives zero.
pub fn compute_ttc(relative_distance: f64, relative_velocity: f64) -> Option<f64> {
    if !(relative_velocity < 0.0) {
        return None;
    }
    if relative_distance <= 0.0 {
        return Some(0.0);
    }
    Some(relative_distance / -relative_velocity)
}

/// Seconds to stop from `v` at constant deceleration `decel`.
pub fn compute_stopping_time(v: f64, decel: f64) -> Result<f64, AebError> {
    if !(decel > 0.0) {
        return Err(AebError::NonPositiveDecel(decel));
    }
    Ok(v.max(0.0) / decel)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Decision {
    pub fcw: bool,
    pub stage: Stage,
}

/// Stateless decision for one instant.
///
/// The warning is raised when TTC falls below the reaction time plus the
/// first-stage stopping time. The stage is the strongest one whose stopping
/// time exceeds TTC.
pub fn aeb_decide(ttc: Option<f64>, v_ego: f64, table: &StageTable) -> Decision {
    let Some(ttc) = ttc else { return Decision { fcw: false, stage: Stage::Off } };
    let stop = |a: f64| v_ego.max(0.0) / a;
    let fcw = ttc < table.t_react + stop(table.pb1);
    let stage = if ttc < stop(table.fb) {
        Stage::Full
    } else if ttc < stop(table.pb2) {
        Stage::PartialTwo
    } else if ttc < stop(table.pb1) {
        Stage::PartialOne
    } else {
        Stage::Off
    };
    Decision { fcw, stage }
}

/// Relative velocity above which a braking episode ends once TTC is gone.
pub const CLEAR_OPENING_SPEED: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AebOutput {
    pub stage: Stage,
    pub decel: f64,
    pub ttc: Option<f64>,
    pub fcw: bool,
    /// A stage is engaged and TTC is below its stopping time.
    pub ttc_lt_stopping: bool,
}

/// AEB controller holding the latest fusion input and the latched stage.
///
/// Within one braking episode the stage never steps down. The episode ends
/// when the gap is no longer closing and is opening by at least
/// [`CLEAR_OPENING_SPEED`].
#[derive(Debug, Clone, Default)]
pub struct AebController {
    table: StageTable,
    input: Option<(f64, f64)>,
    latched: Stage,
}

impl AebController {
    pub fn new(table: StageTable) -> Self {
        AebController { table, input: None, latched: Stage::Off }
    }

    /// Records a delivered fusion output.
    pub fn receive(&mut self, relative_distance: f64, relative_velocity: f64) {
        self.input = Some((relative_distance, relative_velocity));
    }

    pub fn step(&mut self, v_ego: f64) -> AebOutput {
        let ttc = self.input.and_then(|(d, rv)| compute_ttc(d, rv));
        let decision = aeb_decide(ttc, v_ego, &self.table);
        let clear = ttc.is_none() && self.input.is_some_and(|(_, rv)| rv >= CLEAR_OPENING_SPEED);
        self.latched = if clear { decision.stage } else { self.latched.max(decision.stage) };
        let stage = self.latched;
        let ttc_lt_stopping = match (stage, ttc) {
            (Stage::Off, _) | (_, None) => false,
            (s, Some(t)) => t < v_ego.max(0.0) / s.decel(&self.table),
        };
        AebOutput { stage, decel: stage.decel(&self.table), ttc, fcw: decision.fcw, ttc_lt_stopping }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ttc_cases() {
        assert_eq!(compute_ttc(40.0, -10.0), Some(4.0));
        assert_eq!(compute_ttc(40.0, 0.0), None);
        assert_eq!(compute_ttc(40.0, 3.0), None);
        assert_eq!(compute_ttc(-1.0, -3.0), Some(0.0));
    }

    #[test]
    fn stopping_time_rejects_non_positive_decel() {
        assert_eq!(compute_stopping_time(20.0, 4.0), Ok(5.0));
        assert_eq!(compute_stopping_time(20.0, 0.0), Err(AebError::NonPositiveDecel(0.0)));
        assert_eq!(compute_stopping_time(20.0, -1.0), Err(AebError::NonPositiveDecel(-1.0)));
    }

    #[test]
    fn warning_threshold_at_twenty_metres_per_second() {
        let t = StageTable::default();
        // Threshold is 1.2 + 20 / 3.8, roughly 6.463 s.
        assert_eq!(aeb_decide(Some(6.0), 20.0, &t), Decision { fcw: true, stage: Stage::Off });
        assert_eq!(aeb_decide(Some(6.5), 20.0, &t), Decision { fcw: false, stage: Stage::Off });
        assert_eq!(aeb_decide(Some(5.0), 20.0, &t).stage, Stage::PartialOne);
        assert_eq!(aeb_decide(Some(3.0), 20.0, &t).stage, Stage::PartialTwo);
        assert_eq!(aeb_decide(Some(2.0), 20.0, &t).stage, Stage::Full);
        assert_eq!(aeb_decide(None, 20.0, &t), Decision { fcw: false, stage: Stage::Off });
    }

    #[test]
    fn stage_latches_until_the_gap_opens() {
        let mut c = AebController::new(StageTable::default());
        c.receive(30.0, -10.0);
        assert_eq!(c.step(20.0).stage, Stage::PartialTwo);
        c.receive(30.0, -6.0);
        assert_eq!(c.step(20.0).stage, Stage::PartialTwo);
        c.receive(30.0, 0.1);
        let out = c.step(15.0);
        assert_eq!(out.stage, Stage::PartialTwo);
        assert!(!out.ttc_lt_stopping);
        c.receive(30.0, 1.0);
        assert_eq!(c.step(15.0).stage, Stage::Off);
    }
}
