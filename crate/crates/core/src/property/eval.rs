//! Incremental, tick-by-tick evaluator.
//!
//! Each formula node keeps only the state it needs to produce the verdict for
//! the next tick: the previous predicate value for edge triggers, the last
//! occurrence for inter-arrival gaps, a ring of `w + 1` values for trends and
//! buffers of child verdicts for implications and conjunctions. Verdicts leave
//! every node in `at` order; an implication holds back verdicts whose
//! obligation window is still open.

use std::collections::VecDeque;

use num_rational::Ratio;
use thiserror::Error;

use super::ast::{Direction, Formula, Predicate, Status, Trigger, Verdict};
use super::bind::{bind, BindError};
use crate::time::Seconds;
use crate::trace::{StreamHandle, StreamKind, Trace, Value};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("ticks must be evaluated in order: expected {expected}, got {got}")]
    OutOfOrderEvaluation { expected: u64, got: u64 },
    #[error(transparent)]
    Bind(#[from] BindError),
}

#[derive(Debug, Clone)]
enum Node {
    Holds {
        stream: StreamHandle,
        pred: Predicate,
        event: bool,
    },
    Happens {
        stream: StreamHandle,
        pred: Predicate,
        event: bool,
        level: bool,
        /// Predicate truth at the previous tick; `None` when that sample was absent.
        prev: Option<bool>,
    },
    InterArrival {
        stream: StreamHandle,
        bound: Seconds,
        step: Seconds,
        last: Option<u64>,
    },
    Trend {
        stream: StreamHandle,
        direction: Direction,
        window: u64,
        slack: f64,
        history: VecDeque<Option<f64>>,
    },
    Implies {
        antecedent: Box<Node>,
        consequent: Box<Node>,
        latency: u64,
        pending: VecDeque<Verdict>,
        window: VecDeque<Verdict>,
    },
    And {
        items: Vec<Node>,
        queues: Vec<VecDeque<Verdict>>,
    },
}

fn verdict(at: u64, status: Status) -> Verdict {
    Verdict { at, decided: at, status }
}

impl Node {
    fn build(formula: &Formula, trace: &Trace) -> Result<Node, EvalError> {
        let handle = |id: &str| trace.handle(id).map_err(|_| EvalError::Bind(BindError::UnknownStream(id.to_string())));
        let is_event = |id: &str| trace.decl(id).is_some_and(|d| d.kind == StreamKind::Event);
        Ok(match formula {
            Formula::HoldsAt(pred) => {
                Node::Holds { stream: handle(pred.stream())?, pred: pred.clone(), event: is_event(pred.stream()) }
            }
            Formula::Happens { pred, trigger } => Node::Happens {
                stream: handle(pred.stream())?,
                pred: pred.clone(),
                event: is_event(pred.stream()),
                level: *trigger == Trigger::Level,
                prev: None,
            },
            Formula::InterArrival { stream, bound } => Node::InterArrival {
                stream: handle(stream)?,
                bound: *bound,
                step: trace.step().seconds(),
                last: None,
            },
            Formula::Trend { stream, direction, window, slack } => Node::Trend {
                stream: handle(stream)?,
                direction: *direction,
                window: *window,
                slack: *slack,
                history: VecDeque::with_capacity(*window as usize + 1),
            },
            Formula::Implies { antecedent, consequent, latency } => Node::Implies {
                antecedent: Box::new(Node::build(antecedent, trace)?),
                consequent: Box::new(Node::build(consequent, trace)?),
                latency: *latency,
                pending: VecDeque::new(),
                window: VecDeque::new(),
            },
            Formula::And(items) => Node::And {
                items: items.iter().map(|f| Node::build(f, trace)).collect::<Result<_, _>>()?,
                queues: vec![VecDeque::new(); items.len()],
            },
        })
    }

    fn step(&mut self, trace: &Trace, t: u64, out: &mut Vec<Verdict>) {
        match self {
            Node::Holds { stream, pred, event } => {
                let status = match trace.value_at_handle(*stream, t) {
                    None => Status::Inapplicable,
                    Some(_) if *event => Status::Satisfied,
                    Some(v) if pred.test(&v) => Status::Satisfied,
                    Some(_) => Status::Violated,
                };
                out.push(verdict(t, status));
            }
            Node::Happens { stream, pred, event, level, prev } => {
                let now = trace.value_at_handle(*stream, t).map(|v| pred.test(&v));
                let status = if *event {
                    if now.is_some() {
                        Status::Satisfied
                    } else {
                        Status::Violated
                    }
                } else {
                    match now {
                        None => Status::Inapplicable,
                        Some(false) => Status::Violated,
                        Some(true) if *level || *prev != Some(true) => Status::Satisfied,
                        Some(true) => Status::Violated,
                    }
                };
                *prev = now;
                out.push(verdict(t, status));
            }
            Node::InterArrival { stream, bound, step, last } => {
                let occurred = trace.value_at_handle(*stream, t).is_some();
                let too_long = |since: u64| Ratio::from_integer((t - since) as i64) * *step > *bound;
                let status = match (*last, occurred) {
                    (None, true) => Status::Satisfied,
                    (None, false) => Status::Inapplicable,
                    (Some(prev), true) => {
                        if too_long(prev) {
                            Status::Violated
                        } else {
                            Status::Satisfied
                        }
                    }
                    (Some(prev), false) => {
                        if too_long(prev) {
                            Status::Violated
                        } else {
                            Status::Inapplicable
                        }
                    }
                };
                if occurred {
                    *last = Some(t);
                }
                out.push(verdict(t, status));
            }
            Node::Trend { stream, direction, window, slack, history } => {
                history.push_back(trace.value_at_handle(*stream, t).and_then(|v: Value| v.as_number()));
                if history.len() as u64 > *window + 1 {
                    history.pop_front();
                }
                let status = if t < *window {
                    Status::Inapplicable
                } else {
                    match (history.front().copied().flatten(), history.back().copied().flatten()) {
                        (Some(past), Some(now)) => {
                            if direction.violated(now, past, *slack) {
                                Status::Violated
                            } else {
                                Status::Satisfied
                            }
                        }
                        _ => Status::Inapplicable,
                    }
                };
                out.push(verdict(t, status));
            }
            Node::Implies { antecedent, consequent, latency, pending, window } => {
                let mut buf = Vec::new();
                antecedent.step(trace, t, &mut buf);
                pending.extend(buf.drain(..));
                consequent.step(trace, t, &mut buf);
                window.extend(buf);
                resolve_implications(pending, window, *latency, out);
            }
            Node::And { items, queues } => {
                if items.is_empty() {
                    out.push(verdict(t, Status::Inapplicable));
                    return;
                }
                let mut buf = Vec::new();
                for (item, queue) in items.iter_mut().zip(queues.iter_mut()) {
                    item.step(trace, t, &mut buf);
                    queue.extend(buf.drain(..));
                }
                combine_conjuncts(queues, out);
            }
        }
    }

    /// Flushes everything still held back once `end` is the final tick.
    fn finish(&mut self, end: u64, out: &mut Vec<Verdict>) {
        match self {
            Node::Implies { antecedent, consequent, latency, pending, window } => {
                let mut buf = Vec::new();
                antecedent.finish(end, &mut buf);
                pending.extend(buf.drain(..));
                consequent.finish(end, &mut buf);
                window.extend(buf);
                resolve_implications(pending, window, *latency, out);
                for a in pending.drain(..) {
                    let decided = if a.status == Status::Satisfied { end } else { a.decided };
                    out.push(Verdict { at: a.at, decided, status: Status::Inapplicable });
                }
                window.clear();
            }
            Node::And { items, queues } => {
                let mut buf = Vec::new();
                for (item, queue) in items.iter_mut().zip(queues.iter_mut()) {
                    item.finish(end, &mut buf);
                    queue.extend(buf.drain(..));
                }
                combine_conjuncts(queues, out);
            }
            _ => {}
        }
    }
}

fn resolve_implications(pending: &mut VecDeque<Verdict>, window: &mut VecDeque<Verdict>, latency: u64, out: &mut Vec<Verdict>) {
    while let Some(&a) = pending.front() {
        if a.status != Status::Satisfied {
            out.push(Verdict { at: a.at, decided: a.decided, status: Status::Inapplicable });
            pending.pop_front();
            continue;
        }
        while window.front().is_some_and(|c| c.at < a.at) {
            window.pop_front();
        }
        let deadline = a.at + latency;
        let mut decided = a.decided;
        let mut outcome = None;
        for c in window.iter().take_while(|c| c.at <= deadline) {
            decided = decided.max(c.decided);
            if c.status == Status::Satisfied {
                outcome = Some(Status::Satisfied);
                break;
            }
            if c.at == deadline {
                outcome = Some(Status::Violated);
            }
        }
        match outcome {
            Some(status) => {
                out.push(Verdict { at: a.at, decided, status });
                pending.pop_front();
            }
            None => break,
        }
    }
}

fn combine_conjuncts(queues: &mut [VecDeque<Verdict>], out: &mut Vec<Verdict>) {
    while !queues.is_empty() && queues.iter().all(|q| !q.is_empty()) {
        let fronts: Vec<Verdict> = queues.iter_mut().map(|q| q.pop_front().expect("non-empty")).collect();
        let at = fronts[0].at;
        debug_assert!(fronts.iter().all(|v| v.at == at));
        let decided = fronts.iter().map(|v| v.decided).max().unwrap_or(at);
        let status = if fronts.iter().any(|v| v.status == Status::Violated) {
            Status::Violated
        } else if fronts.iter().all(|v| v.status == Status::Inapplicable) {
            Status::Inapplicable
        } else {
            Status::Satisfied
        };
        out.push(Verdict { at, decided, status });
    }
}

/// Online evaluator for one formula over one trace.
#[derive(Debug, Clone)]
pub struct Evaluator {
    root: Node,
    next: u64,
    finished: bool,
}

impl Evaluator {
    /// Binds `formula` against the trace declarations and prepares empty state.
    pub fn new(formula: &Formula, trace: &Trace) -> Result<Self, EvalError> {
        let bound = bind(formula, trace.declarations())?;
        Ok(Evaluator { root: Node::build(&bound, trace)?, next: 0, finished: false })
    }

    /// Next tick the evaluator expects.
    pub fn next_tick(&self) -> u64 {
        self.next
    }

    /// Consumes tick `t` and returns every verdict that became final.
    pub fn step(&mut self, trace: &Trace, t: u64) -> Result<Vec<Verdict>, EvalError> {
        if t != self.next || self.finished {
            return Err(EvalError::OutOfOrderEvaluation { expected: self.next, got: t });
        }
        let mut out = Vec::new();
        self.root.step(trace, t, &mut out);
        self.next += 1;
        Ok(out)
    }

    /// Declares the last stepped tick to be the end of the trace.
    pub fn finish(&mut self) -> Vec<Verdict> {
        let mut out = Vec::new();
        if self.next > 0 && !self.finished {
            self.root.finish(self.next - 1, &mut out);
        }
        self.finished = true;
        out
    }
}

/// Runs the streaming evaluator over every tick of `trace`.
pub fn evaluate(formula: &Formula, trace: &Trace) -> Result<Vec<Verdict>, EvalError> {
    let mut ev = Evaluator::new(formula, trace)?;
    let mut out = Vec::new();
    if let Some(end) = trace.end_tick() {
        for t in 0..=end {
            out.extend(ev.step(trace, t)?);
        }
    }
    out.extend(ev.finish());
    Ok(out)
}
