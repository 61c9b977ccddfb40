use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

/// An observed value on a stream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    /// SI-unit scalar.
    Real(f64),
    /// Small enumerated value such as a braking stage.
    Enum(u8),
    Bool(bool),
    /// Occurrence-only mark on an event stream.
    Event,
}

impl Value {
    pub fn sort_tag(&self) -> &'static str {
        match self {
            Value::Real(_) => "real",
            Value::Enum(_) => "enum",
            Value::Bool(_) => "bool",
            Value::Event => "event",
        }
    }

    /// Numeric view used by comparisons; `None` for bools and event marks.
    pub fn as_number(&self) -> Option<f64> {
        match *self {
            Value::Real(v) => Some(v),
            Value::Enum(v) => Some(v as f64),
            _ => None,
        }
    }

    /// Bit-level equality, so `NaN == NaN` and `-0.0 != 0.0`.
    pub fn bit_eq(&self, other: &Value) -> bool {
        match (self, other) {
            (Value::Real(a), Value::Real(b)) => a.to_bits() == b.to_bits(),
            _ => self == other,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            // `{}` on f64 prints the shortest string that parses back to the same bits.
            Value::Real(v) => write!(f, "{v}"),
            Value::Enum(v) => write!(f, "{v}"),
            Value::Bool(v) => write!(f, "{v}"),
            Value::Event => f.write_str("*"),
        }
    }
}

/// Declared value sort of a stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sort {
    Real,
    Enum(BTreeSet<u8>),
    Bool,
    Event,
}

impl Sort {
    pub fn enumeration(values: impl IntoIterator<Item = u8>) -> Sort {
        Sort::Enum(values.into_iter().collect())
    }

    pub fn admits(&self, value: &Value) -> bool {
        match (self, value) {
            (Sort::Real, Value::Real(_)) => true,
            (Sort::Enum(domain), Value::Enum(v)) => domain.contains(v),
            (Sort::Bool, Value::Bool(_)) => true,
            (Sort::Event, Value::Event) => true,
            _ => false,
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Sort::Real => "real",
            Sort::Enum(_) => "enum",
            Sort::Bool => "bool",
            Sort::Event => "event",
        }
    }

    /// Parses a value literal of this sort, as written by `Display for Value`.
    pub fn parse_value(&self, text: &str) -> Option<Value> {
        match self {
            Sort::Real => f64::from_str(text).ok().map(Value::Real),
            Sort::Enum(domain) => text.parse::<u8>().ok().filter(|v| domain.contains(v)).map(Value::Enum),
            Sort::Bool => text.parse::<bool>().ok().map(Value::Bool),
            Sort::Event => (text == "*").then_some(Value::Event),
        }
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Enum(domain) => {
                f.write_str("enum{")?;
                for (i, v) in domain.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str("}")
            }
            other => f.write_str(other.tag()),
        }
    }
}

impl FromStr for Sort {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "real" => Ok(Sort::Real),
            "bool" => Ok(Sort::Bool),
            "event" => Ok(Sort::Event),
            _ => {
                let inner = s
                    .strip_prefix("enum{")
                    .and_then(|r| r.strip_suffix('}'))
                    .ok_or_else(|| format!("unknown sort `{s}`"))?;
                let mut domain = BTreeSet::new();
                for part in inner.split(',').filter(|p| !p.is_empty()) {
                    domain.insert(part.trim().parse::<u8>().map_err(|_| format!("bad enum value `{part}`"))?);
                }
                Ok(Sort::Enum(domain))
            }
        }
    }
}
