//! Brute-force reference evaluator.
//!
//! Every verdict is recomputed from scratch by reading the trace directly,
//! with backward scans instead of incremental state. It is quadratic and only
//! meant to cross-check [`super::eval`].

use super::ast::{Formula, Status, Trigger, Verdict};
use super::bind::bind;
use super::eval::EvalError;
use crate::trace::{StreamKind, Trace};

struct Oracle<'t> {
    trace: &'t Trace,
    end: u64,
}

impl Oracle<'_> {
    fn is_event(&self, id: &str) -> bool {
        self.trace.decl(id).map(|d| d.kind) == Some(StreamKind::Event)
    }

    fn value(&self, id: &str, t: u64) -> Option<crate::trace::Value> {
        self.trace.value_at(id, t).expect("bound stream")
    }

    fn at(&self, f: &Formula, t: u64) -> Verdict {
        let simple = |status| Verdict { at: t, decided: t, status };
        match f {
            Formula::HoldsAt(p) => simple(match self.value(p.stream(), t) {
                None => Status::Inapplicable,
                Some(_) if self.is_event(p.stream()) => Status::Satisfied,
                Some(v) => {
                    if p.test(&v) {
                        Status::Satisfied
                    } else {
                        Status::Violated
                    }
                }
            }),
            Formula::Happens { pred, trigger } => {
                let now = self.value(pred.stream(), t);
                if self.is_event(pred.stream()) {
                    return simple(if now.is_some() { Status::Satisfied } else { Status::Violated });
                }
                let Some(now) = now else { return simple(Status::Inapplicable) };
                if !pred.test(&now) {
                    return simple(Status::Violated);
                }
                if *trigger == Trigger::Level || t == 0 {
                    return simple(Status::Satisfied);
                }
                let before = self.value(pred.stream(), t - 1).map(|v| pred.test(&v));
                simple(if before == Some(true) { Status::Violated } else { Status::Satisfied })
            }
            Formula::InterArrival { stream, bound } => {
                let occurred = self.value(stream, t).is_some();
                let previous = (0..t).rev().find(|&k| self.value(stream, k).is_some());
                let exceeded = previous.is_some_and(|k| self.trace.step().wall(t - k) > *bound);
                simple(match (previous, occurred, exceeded) {
                    (_, _, true) => Status::Violated,
                    (None, false, _) => Status::Inapplicable,
                    (_, true, false) => Status::Satisfied,
                    (Some(_), false, false) => Status::Inapplicable,
                })
            }
            Formula::Trend { stream, direction, window, slack } => {
                if t < *window {
                    return simple(Status::Inapplicable);
                }
                let now = self.value(stream, t).and_then(|v| v.as_number());
                let past = self.value(stream, t - window).and_then(|v| v.as_number());
                simple(match (now, past) {
                    (Some(now), Some(past)) if direction.violated(now, past, *slack) => Status::Violated,
                    (Some(_), Some(_)) => Status::Satisfied,
                    _ => Status::Inapplicable,
                })
            }
            Formula::Implies { antecedent, consequent, latency } => {
                let a = self.at(antecedent, t);
                if a.status != Status::Satisfied {
                    return Verdict { at: t, decided: a.decided, status: Status::Inapplicable };
                }
                let mut decided = a.decided;
                for u in t..=(t + latency).min(self.end) {
                    let c = self.at(consequent, u);
                    decided = decided.max(c.decided);
                    if c.status == Status::Satisfied {
                        return Verdict { at: t, decided, status: Status::Satisfied };
                    }
                }
                if t + latency > self.end {
                    Verdict { at: t, decided: self.end, status: Status::Inapplicable }
                } else {
                    Verdict { at: t, decided, status: Status::Violated }
                }
            }
            Formula::And(items) => {
                let vs: Vec<Verdict> = items.iter().map(|f| self.at(f, t)).collect();
                let decided = vs.iter().map(|v| v.decided).max().unwrap_or(t);
                let status = if vs.iter().any(|v| v.status == Status::Violated) {
                    Status::Violated
                } else if vs.iter().all(|v| v.status == Status::Inapplicable) {
                    Status::Inapplicable
                } else {
                    Status::Satisfied
                };
                Verdict { at: t, decided, status }
            }
        }
    }
}

/// Verdict for every tick of the trace, computed independently per tick.
pub fn evaluate_oracle(formula: &Formula, trace: &Trace) -> Result<Vec<Verdict>, EvalError> {
    let bound = bind(formula, trace.declarations())?;
    let Some(end) = trace.end_tick() else { return Ok(Vec::new()) };
    let oracle = Oracle { trace, end };
    Ok((0..=end).map(|t| oracle.at(&bound, t)).collect())
}
