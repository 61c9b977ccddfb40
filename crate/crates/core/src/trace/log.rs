//! Trace log and plot CSV formats.
//!
//! Log layout:
//!
//! ```text
//! #trace v1 step=1/100 window=512
//! #stream <id> <signal|event> <sort> <level> <source> [unit]
//! tick,stream_id,kind,value
//! 0,v_ego,signal,20
//! ```

use std::fmt::Write as _;

use super::{Level, Sample, Sort, StreamDecl, StreamKind, Trace, TraceError};
use crate::time::StepSize;

const MAGIC: &str = "#trace v1";
const COLUMNS: &str = "tick,stream_id,kind,value";

pub fn export_log(trace: &Trace) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC} step={} window={}", trace.step(), trace.window_length());
    for d in trace.declarations() {
        let _ = write!(out, "#stream {} {} {} {} {}", d.id, d.kind, d.sort, d.level, d.source);
        if !d.unit.is_empty() {
            let _ = write!(out, " {}", d.unit);
        }
        out.push('\n');
    }
    out.push_str(COLUMNS);
    out.push('\n');
    for s in trace.samples() {
        let kind = trace.decl(&s.stream).map(|d| d.kind).unwrap_or(StreamKind::Signal);
        let _ = writeln!(out, "{},{},{},{}", s.tick, s.stream, kind, s.value);
    }
    out
}

pub fn import_log(text: &str) -> Result<Trace, TraceError> {
    let err = |line: usize, message: String| TraceError::Parse { line, message };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (n, header) = lines.next().ok_or_else(|| err(1, "empty log".into()))?;
    let rest = header.strip_prefix(MAGIC).ok_or_else(|| err(n, "missing `#trace v1` header".into()))?;
    let mut step = None;
    let mut window = None;
    for field in rest.split_whitespace() {
        match field.split_once('=') {
            Some(("step", v)) => step = Some(v.parse::<StepSize>().map_err(|e| err(n, e.to_string()))?),
            Some(("window", v)) => window = Some(v.parse::<u64>().map_err(|e| err(n, e.to_string()))?),
            _ => return Err(err(n, format!("unexpected header field `{field}`"))),
        }
    }
    let step = step.ok_or_else(|| err(n, "header lacks step=".into()))?;
    let mut trace = Trace::new(step);
    if let Some(m) = window {
        trace = trace.with_window_length(m);
    }

    let mut saw_columns = false;
    for (n, line) in lines {
        if line.is_empty() {
            continue;
        }
        if !saw_columns {
            if let Some(rest) = line.strip_prefix("#stream ") {
                let parts: Vec<&str> = rest.splitn(6, ' ').collect();
                if parts.len() < 5 {
                    return Err(err(n, "stream declaration needs id, kind, sort, level, source".into()));
                }
                let decl = StreamDecl {
                    id: parts[0].to_string(),
                    kind: parts[1].parse().map_err(|e: String| err(n, e))?,
                    sort: parts[2].parse::<Sort>().map_err(|e| err(n, e))?,
                    level: parts[3].parse::<Level>().map_err(|e| err(n, e))?,
                    source: parts[4].to_string(),
                    unit: parts.get(5).map(|u| u.to_string()).unwrap_or_default(),
                };
                trace.declare(decl)?;
                continue;
            }
            if line == COLUMNS {
                saw_columns = true;
                continue;
            }
            return Err(err(n, format!("expected declaration or column header, got `{line}`")));
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(err(n, format!("expected 4 fields, got {}", fields.len())));
        }
        let tick: u64 = fields[0].parse().map_err(|_| err(n, format!("bad tick `{}`", fields[0])))?;
        let decl = trace.decl(fields[1]).ok_or_else(|| TraceError::UnknownStream(fields[1].to_string()))?;
        let kind: StreamKind = fields[2].parse().map_err(|e: String| err(n, e))?;
        if kind != decl.kind {
            return Err(err(n, format!("`{}` is declared as {}", decl.id, decl.kind)));
        }
        let value = decl
            .sort
            .parse_value(fields[3])
            .ok_or_else(|| err(n, format!("`{}` is not a valid {} value", fields[3], decl.sort)))?;
        trace.append(Sample::new(fields[1], tick, value))?;
    }
    if !saw_columns {
        return Err(err(text.lines().count(), "missing column header".into()));
    }
    Ok(trace)
}

/// Dense plot grid: one row per tick, one column per signal, then `0/1` event columns.
pub fn export_csv(trace: &Trace) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let signals: Vec<&StreamDecl> = trace.declarations().iter().filter(|d| d.kind == StreamKind::Signal).collect();
    let events: Vec<&StreamDecl> = trace.declarations().iter().filter(|d| d.kind == StreamKind::Event).collect();

    let mut header = vec!["tick".to_string(), "time".to_string()];
    header.extend(signals.iter().map(|d| d.id.clone()));
    header.extend(events.iter().map(|d| d.id.clone()));
    w.write_record(&header).expect("in-memory csv");

    if let Some(end) = trace.end_tick() {
        let handles: Vec<_> = signals.iter().chain(&events).map(|d| trace.handle(&d.id).expect("declared")).collect();
        for tick in 0..=end {
            let mut row = vec![tick.to_string(), format!("{}", trace.step().as_f64() * tick as f64)];
            for (i, h) in handles.iter().enumerate() {
                let v = trace.value_at_handle(*h, tick);
                row.push(if i < signals.len() {
                    v.map(|v| v.to_string()).unwrap_or_default()
                } else if v.is_some() {
                    "1".into()
                } else {
                    "0".into()
                });
            }
            w.write_record(&row).expect("in-memory csv");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf8 csv")
}
