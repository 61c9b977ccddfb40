//! Resolves stream references against declarations and checks sorts.

use thiserror::Error;

use super::ast::{CmpOp, Formula, Predicate};
use crate::trace::{Sort, StreamDecl, StreamKind, Value};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BindError {
    #[error("unknown stream `{0}`")]
    UnknownStream(String),
    #[error("`{stream}` has sort {found}, but {usage} needs {expected}")]
    SortMismatch { stream: String, usage: String, expected: String, found: String },
}

fn mismatch(decl: &StreamDecl, usage: &str, expected: &str) -> BindError {
    BindError::SortMismatch {
        stream: decl.id.clone(),
        usage: usage.to_string(),
        expected: expected.to_string(),
        found: decl.sort.to_string(),
    }
}

fn lookup<'d>(decls: &'d [StreamDecl], id: &str) -> Result<&'d StreamDecl, BindError> {
    decls.iter().find(|d| d.id == id).ok_or_else(|| BindError::UnknownStream(id.to_string()))
}

fn bind_predicate(pred: &Predicate, decls: &[StreamDecl]) -> Result<Predicate, BindError> {
    let decl = lookup(decls, pred.stream())?;
    match pred {
        Predicate::Compare { constant: Value::Bool(_), .. } => match decl.sort {
            Sort::Bool => Ok(pred.clone()),
            _ => Err(mismatch(decl, &format!("`{pred}`"), "bool")),
        },
        Predicate::Compare { .. } => match decl.sort {
            Sort::Real | Sort::Enum(_) => Ok(pred.clone()),
            _ => Err(mismatch(decl, &format!("`{pred}`"), "a numeric signal")),
        },
        Predicate::InSet { .. } => match decl.sort {
            Sort::Enum(_) => Ok(pred.clone()),
            _ => Err(mismatch(decl, &format!("`{pred}`"), "an enumeration")),
        },
        Predicate::EventOccurs { stream } => match decl.sort {
            Sort::Event => Ok(pred.clone()),
            Sort::Bool => Ok(Predicate::Compare { stream: stream.clone(), op: CmpOp::Eq, constant: Value::Bool(true) }),
            _ => Err(mismatch(decl, &format!("bare `{stream}`"), "an event or bool stream")),
        },
    }
}

/// Checks every stream reference and returns the formula with bare boolean
/// signal names rewritten to `= true`.
pub fn bind(formula: &Formula, decls: &[StreamDecl]) -> Result<Formula, BindError> {
    Ok(match formula {
        Formula::Happens { pred, trigger } => Formula::Happens { pred: bind_predicate(pred, decls)?, trigger: *trigger },
        Formula::HoldsAt(pred) => Formula::HoldsAt(bind_predicate(pred, decls)?),
        Formula::Implies { antecedent, consequent, latency } => {
            Formula::implies(bind(antecedent, decls)?, bind(consequent, decls)?, *latency)
        }
        Formula::And(items) => Formula::And(items.iter().map(|f| bind(f, decls)).collect::<Result<_, _>>()?),
        Formula::InterArrival { stream, .. } => {
            let decl = lookup(decls, stream)?;
            if decl.kind != StreamKind::Event {
                return Err(mismatch(decl, "InterArrival", "an event stream"));
            }
            formula.clone()
        }
        Formula::Trend { stream, .. } => {
            let decl = lookup(decls, stream)?;
            if decl.sort != Sort::Real {
                return Err(mismatch(decl, "Trend", "a real signal"));
            }
            formula.clone()
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::property::parser::parse_formula;
    use crate::trace::Level;

    fn decls() -> Vec<StreamDecl> {
        vec![
            StreamDecl::signal("AEBstatus", Sort::enumeration([0, 1, 2, 3]), "", "aeb", Level::Functional),
            StreamDecl::signal("ThrottleRelease", Sort::Bool, "", "speed", Level::Functional),
            StreamDecl::signal("v", Sort::Real, "m/s", "plant", Level::Data),
            StreamDecl::event("rx", "bus", Level::Network),
        ]
    }

    #[test]
    fn bare_bool_becomes_equality() {
        let f = bind(&parse_formula("HoldsAt(ThrottleRelease)").unwrap(), &decls()).unwrap();
        assert_eq!(f, parse_formula("HoldsAt(ThrottleRelease = true)").unwrap());
    }

    #[test]
    fn sort_errors() {
        let d = decls();
        let cases = [
            "HoldsAt(v = true)",
            "HoldsAt(v in {1})",
            "HoldsAt(v)",
            "HoldsAt(rx > 1)",
            "InterArrival(v, 0.04)",
            "Trend(AEBstatus, decreasing, 2)",
        ];
        for c in cases {
            assert!(matches!(bind(&parse_formula(c).unwrap(), &d), Err(BindError::SortMismatch { .. })), "{c}");
        }
        assert_eq!(
            bind(&parse_formula("HoldsAt(nope)").unwrap(), &d),
            Err(BindError::UnknownStream("nope".into()))
        );
        assert!(bind(&parse_formula("HoldsAt(AEBstatus != 0) and Happens(rx)").unwrap(), &d).is_ok());
    }
}
