//! Fixed-step time base.
//!
//! All simulation time is an integer tick count. Wall time is recovered
//! exactly as `ticks * step_size` with a rational step size, so timing
//! comparisons such as "gap > 0.040 s" never suffer from float rounding.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use thiserror::Error;

/// Exact rational seconds.
pub type Seconds = Ratio<i64>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TimeError {
    #[error("invalid decimal literal `{0}`")]
    BadDecimal(String),
    #[error("step size must be positive, got `{0}`")]
    NonPositiveStep(String),
}

/// Parses a plain decimal (`12`, `-0.040`, `1/100`) into an exact rational.
pub fn parse_decimal(text: &str) -> Result<Seconds, TimeError> {
    let bad = || TimeError::BadDecimal(text.to_string());
    let s = text.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Ratio::new(n, d));
    }
    let (negative, digits) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    if frac_part.len() > 15 {
        return Err(bad());
    }
    let denom = 10i64.pow(frac_part.len() as u32);
    let int_val: i64 = if int_part.is_empty() { 0 } else { int_part.parse().map_err(|_| bad())? };
    let frac_val: i64 = if frac_part.is_empty() { 0 } else { frac_part.parse().map_err(|_| bad())? };
    let numer = int_val
        .checked_mul(denom)
        .and_then(|v| v.checked_add(frac_val))
        .ok_or_else(bad)?;
    Ok(Ratio::new(if negative { -numer } else { numer }, denom))
}

/// Converts exact seconds to `f64` for reporting.
pub fn seconds_f64(s: Seconds) -> f64 {
    *s.numer() as f64 / *s.denom() as f64
}

/// Seconds per tick.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StepSize(Seconds);

impl StepSize {
    pub fn new(seconds: Seconds) -> Result<Self, TimeError> {
        if seconds <= Ratio::from_integer(0) {
            return Err(TimeError::NonPositiveStep(seconds.to_string()));
        }
        Ok(StepSize(seconds))
    }

    /// 0.01 s
    pub fn centisecond() -> Self {
        StepSize(Ratio::new(1, 100))
    }

    pub fn seconds(self) -> Seconds {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        seconds_f64(self.0)
    }

    /// Exact wall time of `ticks` steps.
    pub fn wall(self, ticks: u64) -> Seconds {
        self.0 * Ratio::from_integer(ticks as i64)
    }

    /// Number of whole ticks in `duration`, rounding up partial steps.
    pub fn ticks_ceil(self, duration: Seconds) -> u64 {
        let q = duration / self.0;
        q.ceil().to_integer().max(0) as u64
    }
}

impl Default for StepSize {
    fn default() -> Self {
        StepSize::centisecond()
    }
}

impl fmt::Display for StepSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl FromStr for StepSize {
    type Err = TimeError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        StepSize::new(parse_decimal(s)?)
    }
}

/// A tick count paired with the step size that gives it a wall time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Timestamp {
    pub ticks: u64,
    pub step: StepSize,
}

impl Timestamp {
    pub fn new(ticks: u64, step: StepSize) -> Self {
        Timestamp { ticks, step }
    }

    pub fn wall(&self) -> Seconds {
        self.step.wall(self.ticks)
    }
}

impl PartialOrd for Timestamp {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        if self.step == other.step {
            Some(self.ticks.cmp(&other.ticks))
        } else {
            self.wall().partial_cmp(&other.wall())
        }
    }
}
