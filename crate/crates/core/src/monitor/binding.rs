//! Monitor binding files.
//!
//! ```text
//! # one monitor per line
//! monitor M_eta level network at can_bus checks P2
//! monitor M_delta_aeb level functional at aeb_controller checks P3, P4
//! ```

use std::fmt;

use thiserror::Error;

use crate::trace::Level;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BindingError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: duplicate monitor id `{id}`")]
    DuplicateMonitor { line: usize, id: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonitorBinding {
    pub id: String,
    pub level: Level,
    /// Component whose local streams the monitor observes.
    pub placement: String,
    pub properties: Vec<String>,
}

impl fmt::Display for MonitorBinding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "monitor {} level {} at {} checks {}", self.id, self.level, self.placement, self.properties.join(", "))
    }
}

fn parse_line(line: usize, text: &str) -> Result<MonitorBinding, BindingError> {
    let err = |message: String| BindingError::Syntax { line, message };
    let rest: Vec<&str> = text.split_whitespace().collect();
    if rest[0] != "monitor" {
        return Err(err(format!("expected `monitor`, found `{}`", rest[0])));
    }
    if rest.len() < 8 {
        return Err(err("expected `monitor <id> level <level> at <component> checks <property>[, ...]`".into()));
    }
    let id = rest[1].to_string();
    if rest[2] != "level" {
        return Err(err(format!("expected `level`, found `{}`", rest[2])));
    }
    let level: Level = rest[3].parse().map_err(err)?;
    if rest[4] != "at" {
        return Err(err(format!("expected `at`, found `{}`", rest[4])));
    }
    let placement = rest[5].to_string();
    if rest[6] != "checks" {
        return Err(err(format!("expected `checks`, found `{}`", rest[6])));
    }
    let properties: Vec<String> = rest[7..].join(" ").split(',').map(|p| p.trim().to_string()).collect();
    if properties.iter().any(|p| p.is_empty() || p.contains(char::is_whitespace)) {
        return Err(err("property list must be comma-separated ids".into()));
    }
    Ok(MonitorBinding { id, level, placement, properties })
}

pub fn parse_bindings(text: &str) -> Result<Vec<MonitorBinding>, BindingError> {
    let mut out: Vec<MonitorBinding> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let b = parse_line(i + 1, line)?;
        if out.iter().any(|o| o.id == b.id) {
            return Err(BindingError::DuplicateMonitor { line: i + 1, id: b.id });
        }
        out.push(b);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_round_trips() {
        let text = "# header\nmonitor M_eta level network at can_bus checks P2\n\nmonitor M_a level functional at aeb_controller checks P3, P4 # two\n";
        let b = parse_bindings(text).unwrap();
        assert_eq!(b.len(), 2);
        assert_eq!(b[1].properties, vec!["P3", "P4"]);
        assert_eq!(b[0].level, Level::Network);
        let again = parse_bindings(&b.iter().map(|m| m.to_string() + "\n").collect::<String>()).unwrap();
        assert_eq!(again, b);
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert_eq!(
            parse_bindings("\nmonitor M level sideways at x checks P").unwrap_err(),
            BindingError::Syntax { line: 2, message: "unknown level `sideways`".into() }
        );
        assert!(matches!(parse_bindings("watch M level data at x checks P"), Err(BindingError::Syntax { line: 1, .. })));
        assert!(matches!(
            parse_bindings("monitor M level data at x checks P\nmonitor M level data at x checks Q"),
            Err(BindingError::DuplicateMonitor { line: 2, .. })
        ));
    }
}
