//! Recursive-descent parser for property files.
//!
//! ```text
//! file       = { property } ;
//! property   = "property" ident "on" ident ":" formula [ "--" text ] "constraint" ident ;
//! formula    = conj [ "=>" [ "within" int ] conj ] ;
//! conj       = unary { ( "and" | "&&" | "∧" ) unary } ;
//! unary      = "Happens" "(" pred [ "," "level" ] ")"
//!            | "HoldsAt" "(" pred ")"
//!            | "InterArrival" "(" ident "," const ")"
//!            | "Trend" "(" ident "," direction "," int [ "," const ] ")"
//!            | "And" "(" [ formula { "," formula } ] ")"
//!            | "(" formula ")" ;
//! pred       = ident [ cmp const | "in" "{" int { "," int } "}" ] ;
//! cmp        = "=" | "==" | "!=" | "≠" | "<" | ">" | "<=" | "≤" | ">=" | "≥" ;
//! const      = "true" | "false" | term { ( "+" | "-" ) term } ;
//! term       = number | "$" ident ;
//! direction  = "decreasing" | "increasing" | "constant" ;
//! ```
//!
//! `#` starts a line comment and `/* ... */` a block comment, so units can be
//! annotated next to constants. `$name` refers to a scenario parameter.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::Ratio;
use thiserror::Error;

use super::ast::{CmpOp, Direction, Formula, Predicate, PropertySpec, Trigger};
use crate::time::{parse_decimal, seconds_f64, Seconds};
use crate::trace::Value;

/// Named constants substituted for `$name` references.
pub type Params = BTreeMap<String, String>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("{line}:{column}: expected {expected}, found {found}")]
    Syntax { line: usize, column: usize, expected: String, found: String },
    #[error("{line}:{column}: {message}")]
    Invalid { line: usize, column: usize, message: String },
}

impl ParseError {
    pub fn position(&self) -> (usize, usize) {
        match self {
            ParseError::Syntax { line, column, .. } | ParseError::Invalid { line, column, .. } => (*line, *column),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(String),
    Param(String),
    Description(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Colon,
    Arrow,
    Plus,
    Minus,
    AndOp,
    Cmp(CmpOp),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Number(s) => format!("number `{s}`"),
            Tok::Param(s) => format!("`${s}`"),
            Tok::Description(_) => "description".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Arrow => "`=>`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::AndOp => "`and`".into(),
            Tok::Cmp(op) => format!("`{}`", op.symbol()),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let advance = |i: &mut usize, line: &mut usize, col: &mut usize, n: usize| {
        for _ in 0..n {
            if chars[*i] == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        let next = chars.get(i + 1).copied();
        let (l0, c0) = (line, col);
        let push = |out: &mut Vec<Spanned>, tok| out.push(Spanned { tok, line: l0, column: c0 });
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, 1);
        } else if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                advance(&mut i, &mut line, &mut col, 1);
            }
        } else if c == '/' && next == Some('*') {
            advance(&mut i, &mut line, &mut col, 2);
            loop {
                if i + 1 >= chars.len() {
                    return Err(ParseError::Syntax { line: l0, column: c0, expected: "`*/`".into(), found: "end of input".into() });
                }
                if chars[i] == '*' && chars[i + 1] == '/' {
                    advance(&mut i, &mut line, &mut col, 2);
                    break;
                }
                advance(&mut i, &mut line, &mut col, 1);
            }
        } else if c == '-' && next == Some('-') {
            advance(&mut i, &mut line, &mut col, 2);
            let start = i;
            while i < chars.len() && chars[i] != '\n' {
                advance(&mut i, &mut line, &mut col, 1);
            }
            let s: String = chars[start..i].iter().collect();
            push(&mut out, Tok::Description(s.trim().to_string()));
        } else if c.is_ascii_digit() || (c == '-' && next.is_some_and(|n| n.is_ascii_digit())) {
            let start = i;
            advance(&mut i, &mut line, &mut col, 1);
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                advance(&mut i, &mut line, &mut col, 1);
            }
            push(&mut out, Tok::Number(chars[start..i].iter().collect()));
        } else if c.is_alphabetic() || c == '_' || c == '$' {
            let start = if c == '$' { i + 1 } else { i };
            advance(&mut i, &mut line, &mut col, 1);
            while i < chars.len() {
                let ch = chars[i];
                let continues = ch.is_alphanumeric()
                    || ch == '_'
                    || ch == '.'
                    || (ch == '-' && chars.get(i + 1).is_some_and(|n| n.is_alphanumeric()));
                if !continues {
                    break;
                }
                advance(&mut i, &mut line, &mut col, 1);
            }
            let word: String = chars[start..i].iter().collect();
            if c == '$' {
                if word.is_empty() {
                    return Err(ParseError::Syntax { line: l0, column: c0, expected: "parameter name".into(), found: "`$`".into() });
                }
                push(&mut out, Tok::Param(word));
            } else if word == "and" {
                push(&mut out, Tok::AndOp);
            } else {
                push(&mut out, Tok::Ident(word));
            }
        } else {
            let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
            let (tok, n) = match (c, two.as_str()) {
                (_, "=>") => (Tok::Arrow, 2),
                (_, "==") => (Tok::Cmp(CmpOp::Eq), 2),
                (_, "!=") => (Tok::Cmp(CmpOp::Ne), 2),
                (_, "<=") => (Tok::Cmp(CmpOp::Le), 2),
                (_, ">=") => (Tok::Cmp(CmpOp::Ge), 2),
                (_, "&&") => (Tok::AndOp, 2),
                ('⇒', _) => (Tok::Arrow, 1),
                ('∧', _) => (Tok::AndOp, 1),
                ('≠', _) => (Tok::Cmp(CmpOp::Ne), 1),
                ('≤', _) => (Tok::Cmp(CmpOp::Le), 1),
                ('≥', _) => (Tok::Cmp(CmpOp::Ge), 1),
                ('=', _) => (Tok::Cmp(CmpOp::Eq), 1),
                ('<', _) => (Tok::Cmp(CmpOp::Lt), 1),
                ('>', _) => (Tok::Cmp(CmpOp::Gt), 1),
                ('(', _) => (Tok::LParen, 1),
                (')', _) => (Tok::RParen, 1),
                ('{', _) => (Tok::LBrace, 1),
                ('}', _) => (Tok::RBrace, 1),
                (',', _) => (Tok::Comma, 1),
                (':', _) => (Tok::Colon, 1),
                ('+', _) => (Tok::Plus, 1),
                ('-', _) => (Tok::Minus, 1),
                _ => {
                    return Err(ParseError::Syntax {
                        line: l0,
                        column: c0,
                        expected: "a token".into(),
                        found: format!("`{c}`"),
                    })
                }
            };
            advance(&mut i, &mut line, &mut col, n);
            push(&mut out, tok);
        }
    }
    out.push(Spanned { tok: Tok::Eof, line, column: col });
    Ok(out)
}

/// A resolved constant: the exact rational when every term is a decimal, plus its float value.
struct Constant {
    exact: Option<Seconds>,
    value: Value,
}

struct Parser<'p> {
    toks: Vec<Spanned>,
    i: usize,
    params: &'p Params,
}

impl<'p> Parser<'p> {
    fn new(text: &str, params: &'p Params) -> Result<Self, ParseError> {
        Ok(Parser { toks: lex(text)?, i: 0, params })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.i].tok
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn expected(&self, what: &str) -> ParseError {
        let t = &self.toks[self.i];
        ParseError::Syntax { line: t.line, column: t.column, expected: what.into(), found: t.tok.describe() }
    }

    fn invalid(&self, at: &Spanned, message: impl Into<String>) -> ParseError {
        ParseError::Invalid { line: at.line, column: at.column, message: message.into() }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.expected(what))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.expected(what)),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Ident(s) if s == kw => {
                self.bump();
                Ok(())
            }
            _ => Err(self.expected(&format!("`{kw}`"))),
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn integer(&mut self, what: &str) -> Result<u64, ParseError> {
        match self.peek().clone() {
            Tok::Number(n) => {
                let at = self.bump();
                n.parse::<u64>().map_err(|_| self.invalid(&at, format!("{what} must be a non-negative integer, got `{n}`")))
            }
            _ => Err(self.expected(what)),
        }
    }

    fn term(&mut self) -> Result<(Option<Seconds>, f64), ParseError> {
        let at = self.toks[self.i].clone();
        let text = match self.peek().clone() {
            Tok::Number(n) => n,
            Tok::Param(p) => self
                .params
                .get(&p)
                .cloned()
                .ok_or_else(|| self.invalid(&at, format!("unknown parameter `${p}`")))?,
            _ => return Err(self.expected("a number or `$parameter`")),
        };
        self.bump();
        let float = text.trim().parse::<f64>().map_err(|_| self.invalid(&at, format!("`{text}` is not a number")))?;
        Ok((parse_decimal(&text).ok(), float))
    }

    fn constant(&mut self) -> Result<Constant, ParseError> {
        if self.at_keyword("true") || self.at_keyword("false") {
            let b = self.at_keyword("true");
            self.bump();
            return Ok(Constant { exact: None, value: Value::Bool(b) });
        }
        let (mut exact, mut float) = self.term()?;
        let mut compound = false;
        loop {
            let sign = match self.peek() {
                Tok::Plus => 1,
                Tok::Minus => -1,
                _ => break,
            };
            self.bump();
            compound = true;
            let (e, f) = self.term()?;
            exact = match (exact, e) {
                (Some(a), Some(b)) => Some(a + b * Ratio::from_integer(sign)),
                _ => None,
            };
            float += sign as f64 * f;
        }
        if compound {
            if let Some(e) = exact {
                float = seconds_f64(e);
            }
        }
        Ok(Constant { exact, value: Value::Real(float) })
    }

    fn predicate(&mut self) -> Result<Predicate, ParseError> {
        let stream = self.ident("a stream name")?;
        match self.peek().clone() {
            Tok::Cmp(op) => {
                self.bump();
                let at = self.toks[self.i].clone();
                let c = self.constant()?;
                if matches!(c.value, Value::Bool(_)) && !matches!(op, CmpOp::Eq | CmpOp::Ne) {
                    return Err(self.invalid(&at, "booleans only support `=` and `!=`"));
                }
                Ok(Predicate::Compare { stream, op, constant: c.value })
            }
            Tok::Ident(kw) if kw == "in" => {
                self.bump();
                self.expect(Tok::LBrace, "`{`")?;
                let mut values = BTreeSet::new();
                loop {
                    let at = self.toks[self.i].clone();
                    let v = self.integer("an enumeration value")?;
                    values.insert(u8::try_from(v).map_err(|_| self.invalid(&at, "enumeration values must be below 256"))?);
                    match self.peek() {
                        Tok::Comma => {
                            self.bump();
                        }
                        Tok::RBrace => {
                            self.bump();
                            break;
                        }
                        _ => return Err(self.expected("`,` or `}`")),
                    }
                }
                Ok(Predicate::InSet { stream, values })
            }
            _ => Ok(Predicate::EventOccurs { stream }),
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.conj()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let latency = if self.at_keyword("within") {
                self.bump();
                self.integer("a latency in ticks")?
            } else {
                0
            };
            let rhs = self.conj()?;
            return Ok(Formula::implies(lhs, rhs, latency));
        }
        Ok(lhs)
    }

    fn conj(&mut self) -> Result<Formula, ParseError> {
        let first = self.unary()?;
        if *self.peek() != Tok::AndOp {
            return Ok(first);
        }
        let mut items = vec![first];
        while *self.peek() == Tok::AndOp {
            self.bump();
            items.push(self.unary()?);
        }
        Ok(Formula::And(items))
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::Ident(name) => {
                let at = self.bump();
                match name.as_str() {
                    "Happens" => {
                        self.expect(Tok::LParen, "`(`")?;
                        let pred = self.predicate()?;
                        let mut trigger = Trigger::Edge;
                        if *self.peek() == Tok::Comma {
                            self.bump();
                            self.keyword("level")?;
                            trigger = Trigger::Level;
                        }
                        self.expect(Tok::RParen, "`)`")?;
                        Ok(Formula::Happens { pred, trigger })
                    }
                    "HoldsAt" => {
                        self.expect(Tok::LParen, "`(`")?;
                        let pred = self.predicate()?;
                        self.expect(Tok::RParen, "`)`")?;
                        Ok(Formula::HoldsAt(pred))
                    }
                    "InterArrival" => {
                        self.expect(Tok::LParen, "`(`")?;
                        let stream = self.ident("an event stream name")?;
                        self.expect(Tok::Comma, "`,`")?;
                        let bound_at = self.toks[self.i].clone();
                        let c = self.constant()?;
                        self.expect(Tok::RParen, "`)`")?;
                        let bound = c.exact.ok_or_else(|| self.invalid(&bound_at, "bound must be a decimal number of seconds"))?;
                        if bound <= Ratio::from_integer(0) {
                            return Err(self.invalid(&bound_at, "bound must be positive"));
                        }
                        Ok(Formula::InterArrival { stream, bound })
                    }
                    "Trend" => {
                        self.expect(Tok::LParen, "`(`")?;
                        let stream = self.ident("a signal name")?;
                        self.expect(Tok::Comma, "`,`")?;
                        let dir_at = self.toks[self.i].clone();
                        let direction = match self.ident("a trend direction")?.as_str() {
                            "decreasing" => Direction::Decreasing,
                            "increasing" => Direction::Increasing,
                            "constant" => Direction::Constant,
                            other => return Err(self.invalid(&dir_at, format!("unknown trend direction `{other}`"))),
                        };
                        self.expect(Tok::Comma, "`,`")?;
                        let w_at = self.toks[self.i].clone();
                        let window = self.integer("a window in ticks")?;
                        if window == 0 {
                            return Err(self.invalid(&w_at, "trend window must be positive"));
                        }
                        let mut slack = 0.0;
                        if *self.peek() == Tok::Comma {
                            self.bump();
                            let s_at = self.toks[self.i].clone();
                            slack = match self.constant()?.value {
                                Value::Real(v) if v >= 0.0 => v,
                                _ => return Err(self.invalid(&s_at, "slack must be a non-negative number")),
                            };
                        }
                        self.expect(Tok::RParen, "`)`")?;
                        Ok(Formula::Trend { stream, direction, window, slack })
                    }
                    "And" => {
                        self.expect(Tok::LParen, "`(`")?;
                        let mut items = Vec::new();
                        if *self.peek() != Tok::RParen {
                            loop {
                                items.push(self.formula()?);
                                if *self.peek() == Tok::Comma {
                                    self.bump();
                                } else {
                                    break;
                                }
                            }
                        }
                        self.expect(Tok::RParen, "`)`")?;
                        Ok(Formula::And(items))
                    }
                    _ => Err(ParseError::Syntax {
                        line: at.line,
                        column: at.column,
                        expected: "Happens, HoldsAt, InterArrival, Trend, And or `(`".into(),
                        found: format!("`{name}`"),
                    }),
                }
            }
            _ => Err(self.expected("a formula")),
        }
    }

    fn property(&mut self) -> Result<PropertySpec, ParseError> {
        self.keyword("property")?;
        let id = self.ident("a property id")?;
        self.keyword("on")?;
        let placement = self.ident("a placement")?;
        self.expect(Tok::Colon, "`:`")?;
        let formula = self.formula()?;
        let description = match self.peek().clone() {
            Tok::Description(d) => {
                self.bump();
                d
            }
            _ => String::new(),
        };
        self.keyword("constraint")?;
        let constraint_ref = self.ident("a constraint id")?;
        Ok(PropertySpec { id, placement, formula, constraint_ref, description })
    }

    fn end(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.expected("end of input"))
        }
    }
}

/// Parses a bare formula.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    parse_formula_with(text, &Params::new())
}

pub fn parse_formula_with(text: &str, params: &Params) -> Result<Formula, ParseError> {
    let mut p = Parser::new(text, params)?;
    let f = p.formula()?;
    p.end()?;
    Ok(f)
}

pub fn parse_predicate(text: &str, params: &Params) -> Result<Predicate, ParseError> {
    let mut p = Parser::new(text, params)?;
    let pred = p.predicate()?;
    p.end()?;
    Ok(pred)
}

/// Parses exactly one property block.
pub fn parse(text: &str) -> Result<PropertySpec, ParseError> {
    let params = Params::new();
    let mut p = Parser::new(text, &params)?;
    let spec = p.property()?;
    p.end()?;
    Ok(spec)
}

/// Parses a property file. Duplicate ids are rejected.
pub fn parse_properties(text: &str, params: &Params) -> Result<Vec<PropertySpec>, ParseError> {
    let mut p = Parser::new(text, params)?;
    let mut out: Vec<PropertySpec> = Vec::new();
    while *p.peek() != Tok::Eof {
        let at = p.toks[p.i].clone();
        let spec = p.property()?;
        if out.iter().any(|q| q.id == spec.id) {
            return Err(p.invalid(&at, format!("duplicate property id `{}`", spec.id)));
        }
        out.push(spec);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::property::ast::Direction;
    use proptest::prelude::*;

    #[test]
    fn throttle_release_property() {
        let f = parse_formula("Happens(AEBstatus in {1,2,3}) => HoldsAt(ThrottleRelease = true)").unwrap();
        let expected = Formula::implies(
            Formula::Happens {
                pred: Predicate::InSet { stream: "AEBstatus".into(), values: [1, 2, 3].into_iter().collect() },
                trigger: Trigger::Edge,
            },
            Formula::HoldsAt(Predicate::Compare { stream: "ThrottleRelease".into(), op: CmpOp::Eq, constant: Value::Bool(true) }),
            0,
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn inter_arrival_bound_is_exact() {
        let f = parse_formula("InterArrival(can_rx, 0.040)").unwrap();
        assert_eq!(f, Formula::InterArrival { stream: "can_rx".into(), bound: Ratio::new(1, 25) });
    }

    #[test]
    fn unclosed_paren_reports_position() {
        let e = parse_formula("Happens(").unwrap_err();
        match e {
            ParseError::Syntax { line, column, ref expected, .. } => {
                assert_eq!((line, column), (1, 9));
                assert_eq!(expected, "a stream name");
            }
            other => panic!("unexpected {other:?}"),
        }
        let e = parse_formula("Happens(x").unwrap_err();
        assert!(matches!(e, ParseError::Syntax { ref expected, .. } if expected == "`)`"));
    }

    #[test]
    fn parameters_and_sums() {
        let params: Params = [("T_safe".to_string(), "0.040".to_string()), ("period".to_string(), "0.01".to_string())].into();
        let f = parse_formula_with("InterArrival(rx, $T_safe + $period)", &params).unwrap();
        assert_eq!(f, Formula::InterArrival { stream: "rx".into(), bound: Ratio::new(1, 20) });
        let e = parse_formula_with("InterArrival(rx, $nope)", &params).unwrap_err();
        assert!(matches!(e, ParseError::Invalid { .. }));
    }

    #[test]
    fn latency_level_trend_and_units() {
        let f = parse_formula(
            "HoldsAt(ttc_lt_stopping = true) => within 5 Trend(v /* m/s */, decreasing, 1)",
        )
        .unwrap();
        match f {
            Formula::Implies { latency, consequent, .. } => {
                assert_eq!(latency, 5);
                assert_eq!(*consequent, Formula::Trend { stream: "v".into(), direction: Direction::Decreasing, window: 1, slack: 0.0 });
            }
            _ => panic!(),
        }
        let f = parse_formula("Happens(x > -1.5, level) ∧ HoldsAt(y ≠ 0) && HoldsAt(z)").unwrap();
        assert!(matches!(f, Formula::And(ref v) if v.len() == 3));
    }

    #[test]
    fn property_blocks() {
        let text = "# shipped\nproperty P3 on aeb_controller: Happens(Deceleration > 1.0 /* m/s^2 */) => HoldsAt(AEBstatus != 0) -- status follows braking\n  constraint SC-component-3\n";
        let props = parse_properties(text, &Params::new()).unwrap();
        assert_eq!(props.len(), 1);
        assert_eq!(props[0].id, "P3");
        assert_eq!(props[0].placement, "aeb_controller");
        assert_eq!(props[0].constraint_ref, "SC-component-3");
        assert_eq!(props[0].description, "status follows braking");
        let again = parse(&props[0].to_string()).unwrap();
        assert_eq!(again, props[0]);
        let dup = format!("{text}{text}");
        assert!(parse_properties(&dup, &Params::new()).is_err());
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(parse_formula("Trend(v, sideways, 3)").is_err());
        assert!(parse_formula("Trend(v, decreasing, 0)").is_err());
        assert!(parse_formula("InterArrival(x, 0)").is_err());
        assert!(parse_formula("HoldsAt(x < true)").is_err());
        assert!(parse_formula("Bogus(x)").is_err());
        assert!(parse_formula("HoldsAt(x) HoldsAt(y)").is_err());
        assert!(parse_formula("HoldsAt(x) /* open").is_err());
    }

    fn arb_pred() -> impl Strategy<Value = Predicate> {
        let stream = prop::sample::select(vec!["a", "b_c", "SC-x"]).prop_map(String::from);
        prop_oneof![
            (stream.clone(), prop::sample::select(vec![CmpOp::Eq, CmpOp::Ne, CmpOp::Lt, CmpOp::Gt, CmpOp::Le, CmpOp::Ge]), -1000i32..1000)
                .prop_map(|(stream, op, c)| Predicate::Compare { stream, op, constant: Value::Real(c as f64 / 8.0) }),
            (stream.clone(), any::<bool>()).prop_map(|(stream, b)| Predicate::Compare { stream, op: CmpOp::Eq, constant: Value::Bool(b) }),
            (stream.clone(), prop::collection::btree_set(0u8..5, 1..4)).prop_map(|(stream, values)| Predicate::InSet { stream, values }),
            stream.prop_map(|stream| Predicate::EventOccurs { stream }),
        ]
    }

    fn arb_formula() -> impl Strategy<Value = Formula> {
        let leaf = prop_oneof![
            (arb_pred(), any::<bool>()).prop_map(|(pred, edge)| Formula::Happens { pred, trigger: if edge { Trigger::Edge } else { Trigger::Level } }),
            arb_pred().prop_map(Formula::HoldsAt),
            (1i64..200).prop_map(|n| Formula::InterArrival { stream: "ev".into(), bound: Ratio::new(n, 100) }),
            (prop::sample::select(vec![Direction::Decreasing, Direction::Increasing, Direction::Constant]), 1u64..9, 0u32..4)
                .prop_map(|(direction, window, s)| Formula::Trend { stream: "v".into(), direction, window, slack: s as f64 * 0.25 }),
        ];
        leaf.prop_recursive(3, 12, 3, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone(), 0u64..5).prop_map(|(a, c, l)| Formula::implies(a, c, l)),
                prop::collection::vec(inner, 0..4).prop_map(Formula::And),
            ]
        })
    }

    proptest! {
        #[test]
        fn display_parse_round_trip(f in arb_formula()) {
            let text = f.to_string();
            let back = parse_formula(&text).map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
            prop_assert_eq!(back, f);
        }
    }
}
