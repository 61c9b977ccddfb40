use std::collections::BTreeSet;
use std::fmt;

use crate::time::Seconds;
use crate::trace::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Gt,
    Le,
    Ge,
}

impl CmpOp {
    pub fn apply(self, lhs: f64, rhs: f64) -> bool {
        match self {
            CmpOp::Eq => lhs == rhs,
            CmpOp::Ne => lhs != rhs,
            CmpOp::Lt => lhs < rhs,
            CmpOp::Gt => lhs > rhs,
            CmpOp::Le => lhs <= rhs,
            CmpOp::Ge => lhs >= rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Gt => ">",
            CmpOp::Le => "<=",
            CmpOp::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Predicate {
    /// `stream op constant`; numeric constants are `Value::Real`, booleans `Value::Bool`.
    Compare { stream: String, op: CmpOp, constant: Value },
    /// `stream in {1,2,3}` over an enumerated signal.
    InSet { stream: String, values: BTreeSet<u8> },
    /// Bare stream name: an event occurrence, or `= true` on a boolean signal once bound.
    EventOccurs { stream: String },
}

impl Predicate {
    pub fn stream(&self) -> &str {
        match self {
            Predicate::Compare { stream, .. } | Predicate::InSet { stream, .. } | Predicate::EventOccurs { stream } => stream,
        }
    }

    /// Truth of the predicate on a present value.
    pub fn test(&self, value: &Value) -> bool {
        match self {
            Predicate::Compare { op, constant: Value::Bool(c), .. } => match (value, op) {
                (Value::Bool(b), CmpOp::Eq) => b == c,
                (Value::Bool(b), CmpOp::Ne) => b != c,
                _ => false,
            },
            Predicate::Compare { op, constant, .. } => match (value.as_number(), constant.as_number()) {
                (Some(l), Some(r)) => op.apply(l, r),
                _ => false,
            },
            Predicate::InSet { values, .. } => matches!(value, Value::Enum(v) if values.contains(v)),
            Predicate::EventOccurs { .. } => matches!(value, Value::Event | Value::Bool(true)),
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Predicate::Compare { stream, op, constant } => write!(f, "{stream} {} {constant}", op.symbol()),
            Predicate::InSet { stream, values } => {
                write!(f, "{stream} in {{")?;
                for (i, v) in values.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str("}")
            }
            Predicate::EventOccurs { stream } => f.write_str(stream),
        }
    }
}

/// How `Happens` fires on a signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trigger {
    /// Rising edge: predicate true now and not true on the previous tick.
    Edge,
    /// Every tick the predicate holds.
    Level,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Decreasing,
    Increasing,
    Constant,
}

impl Direction {
    pub fn keyword(self) -> &'static str {
        match self {
            Direction::Decreasing => "decreasing",
            Direction::Increasing => "increasing",
            Direction::Constant => "constant",
        }
    }

    /// Whether a change from `past` to `now` breaks the trend.
    ///
    /// `decreasing` requires `now < past + slack`, so with zero slack a flat
    /// signal violates.
    pub fn violated(self, now: f64, past: f64, slack: f64) -> bool {
        match self {
            Direction::Decreasing => !(now < past + slack),
            Direction::Increasing => !(now > past - slack),
            Direction::Constant => !((now - past).abs() <= slack),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Formula {
    Happens { pred: Predicate, trigger: Trigger },
    HoldsAt(Predicate),
    Implies { antecedent: Box<Formula>, consequent: Box<Formula>, latency: u64 },
    And(Vec<Formula>),
    /// Gap between consecutive occurrences must not exceed `bound`.
    InterArrival { stream: String, bound: Seconds },
    Trend { stream: String, direction: Direction, window: u64, slack: f64 },
}

impl Formula {
    pub fn implies(antecedent: Formula, consequent: Formula, latency: u64) -> Formula {
        Formula::Implies { antecedent: Box::new(antecedent), consequent: Box::new(consequent), latency }
    }

    /// Streams the formula reads, deduplicated and sorted.
    pub fn streams(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_streams(&mut out);
        out
    }

    fn collect_streams(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Happens { pred, .. } | Formula::HoldsAt(pred) => {
                out.insert(pred.stream().to_string());
            }
            Formula::Implies { antecedent, consequent, .. } => {
                antecedent.collect_streams(out);
                consequent.collect_streams(out);
            }
            Formula::And(items) => items.iter().for_each(|f| f.collect_streams(out)),
            Formula::InterArrival { stream, .. } | Formula::Trend { stream, .. } => {
                out.insert(stream.clone());
            }
        }
    }

    /// Ticks past `t` whose samples can still change the verdict at `t`.
    pub fn horizon(&self) -> u64 {
        match self {
            Formula::Implies { antecedent, consequent, latency } => antecedent.horizon().max(latency + consequent.horizon()),
            Formula::And(items) => items.iter().map(Formula::horizon).max().unwrap_or(0),
            _ => 0,
        }
    }

    fn fmt_operand(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Implies { .. } | Formula::And(_) => write!(f, "({self})"),
            _ => write!(f, "{self}"),
        }
    }
}

/// Prints an exact decimal such as `0.04`. Only denominators of the form 2^a 5^b are exact.
pub fn format_seconds(s: Seconds) -> String {
    let (mut n, d) = (*s.numer(), *s.denom());
    let negative = n < 0;
    n = n.abs();
    let mut scale = 1i64;
    let mut digits = 0usize;
    while (n * scale) % d != 0 && digits < 15 {
        scale *= 10;
        digits += 1;
    }
    let scaled = n * scale / d;
    let text = if digits == 0 {
        scaled.to_string()
    } else {
        let s = format!("{:0width$}", scaled, width = digits + 1);
        format!("{}.{}", &s[..s.len() - digits], &s[s.len() - digits..])
    };
    if negative {
        format!("-{text}")
    } else {
        text
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Happens { pred, trigger: Trigger::Edge } => write!(f, "Happens({pred})"),
            Formula::Happens { pred, trigger: Trigger::Level } => write!(f, "Happens({pred}, level)"),
            Formula::HoldsAt(pred) => write!(f, "HoldsAt({pred})"),
            Formula::Implies { antecedent, consequent, latency } => {
                antecedent.fmt_operand(f)?;
                f.write_str(" => ")?;
                if *latency > 0 {
                    write!(f, "within {latency} ")?;
                }
                consequent.fmt_operand(f)
            }
            Formula::And(items) => {
                if items.len() < 2 {
                    f.write_str("And(")?;
                    for item in items {
                        write!(f, "{item}")?;
                    }
                    return f.write_str(")");
                }
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" and ")?;
                    }
                    item.fmt_operand(f)?;
                }
                Ok(())
            }
            Formula::InterArrival { stream, bound } => write!(f, "InterArrival({stream}, {})", format_seconds(*bound)),
            Formula::Trend { stream, direction, window, slack } => {
                write!(f, "Trend({stream}, {}, {window}", direction.keyword())?;
                if *slack != 0.0 {
                    write!(f, ", {slack}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertySpec {
    pub id: String,
    /// Component the property is written for.
    pub placement: String,
    pub formula: Formula,
    /// Component constraint the property operationalizes.
    pub constraint_ref: String,
    pub description: String,
}

impl fmt::Display for PropertySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "property {} on {}: {}", self.id, self.placement, self.formula)?;
        if !self.description.is_empty() {
            write!(f, " -- {}", self.description)?;
        }
        write!(f, "\n    constraint {}", self.constraint_ref)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Status {
    Satisfied,
    Violated,
    Inapplicable,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Satisfied => "satisfied",
            Status::Violated => "violated",
            Status::Inapplicable => "inapplicable",
        })
    }
}

/// Verdict for the instant `at`, known from tick `decided` onwards.
///
/// `decided > at` only for implications whose consequent window extends past `at`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Verdict {
    pub at: u64,
    pub decided: u64,
    pub status: Status,
}
