//! Nested key-value block syntax shared by STPA models, scenarios, campaigns
//! and run manifests.
//!
//! ```text
//! # comment
//! hazard H-1 {
//!     description = "Unsafe headway distance with the MIO"
//!     losses = [L-1, L-2, L-3]
//!     context {
//!         variables = [throttle, AEBstatus]
//!     }
//! }
//! ```
//!
//! A bare word is any run of characters other than whitespace, `{}[],="#`.

use std::fmt;

use thiserror::Error;

use crate::time::{parse_decimal, Seconds};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{line}:{column}: {message}")]
pub struct BlockError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Word(String),
    Quoted(String),
}

impl Scalar {
    pub fn text(&self) -> &str {
        match self {
            Scalar::Word(s) | Scalar::Quoted(s) => s,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AttrValue {
    Scalar(Scalar),
    List(Vec<Scalar>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Attr {
    pub key: String,
    pub value: AttrValue,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub kind: String,
    pub label: Option<String>,
    pub attrs: Vec<Attr>,
    pub children: Vec<Block>,
    pub pos: Pos,
}

impl Block {
    fn error(&self, pos: Pos, message: impl Into<String>) -> BlockError {
        BlockError { line: pos.line, column: pos.column, message: message.into() }
    }

    pub fn fail(&self, message: impl Into<String>) -> BlockError {
        self.error(self.pos, message)
    }

    pub fn attr(&self, key: &str) -> Option<&Attr> {
        self.attrs.iter().find(|a| a.key == key)
    }

    pub fn label(&self) -> Result<&str, BlockError> {
        self.label.as_deref().ok_or_else(|| self.fail(format!("`{}` block needs an id", self.kind)))
    }

    /// Rejects attributes and child blocks outside the allowed sets.
    pub fn expect_keys(&self, attrs: &[&str], children: &[&str]) -> Result<(), BlockError> {
        let mut seen: Vec<&str> = Vec::new();
        for a in &self.attrs {
            if !attrs.contains(&a.key.as_str()) {
                return Err(self.error(a.pos, format!("unknown key `{}` in `{}` block", a.key, self.kind)));
            }
            if seen.contains(&a.key.as_str()) {
                return Err(self.error(a.pos, format!("duplicate key `{}`", a.key)));
            }
            seen.push(&a.key);
        }
        for c in &self.children {
            if !children.contains(&c.kind.as_str()) {
                return Err(self.error(c.pos, format!("unexpected `{}` block inside `{}`", c.kind, self.kind)));
            }
        }
        Ok(())
    }

    pub fn opt_str(&self, key: &str) -> Result<Option<&str>, BlockError> {
        match self.attr(key) {
            None => Ok(None),
            Some(Attr { value: AttrValue::Scalar(s), .. }) => Ok(Some(s.text())),
            Some(a) => Err(self.error(a.pos, format!("`{key}` expects a single value, not a list"))),
        }
    }

    pub fn str(&self, key: &str) -> Result<&str, BlockError> {
        self.opt_str(key)?.ok_or_else(|| self.fail(format!("`{}` block is missing `{key}`", self.kind)))
    }

    pub fn opt_list(&self, key: &str) -> Result<Option<Vec<&str>>, BlockError> {
        match self.attr(key) {
            None => Ok(None),
            Some(Attr { value: AttrValue::List(items), .. }) => Ok(Some(items.iter().map(Scalar::text).collect())),
            Some(Attr { value: AttrValue::Scalar(s), .. }) => Ok(Some(vec![s.text()])),
        }
    }

    pub fn list(&self, key: &str) -> Result<Vec<&str>, BlockError> {
        Ok(self.opt_list(key)?.unwrap_or_default())
    }

    pub fn opt_f64(&self, key: &str) -> Result<Option<f64>, BlockError> {
        self.opt_str(key)?
            .map(|s| s.parse::<f64>().map_err(|_| self.pos_of(key, format!("`{key}` must be a number, got `{s}`"))))
            .transpose()
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, BlockError> {
        Ok(self.opt_f64(key)?.unwrap_or(default))
    }

    pub fn opt_u64(&self, key: &str) -> Result<Option<u64>, BlockError> {
        self.opt_str(key)?
            .map(|s| s.parse::<u64>().map_err(|_| self.pos_of(key, format!("`{key}` must be a non-negative integer, got `{s}`"))))
            .transpose()
    }

    pub fn opt_seconds(&self, key: &str) -> Result<Option<Seconds>, BlockError> {
        self.opt_str(key)?
            .map(|s| parse_decimal(s).map_err(|e| self.pos_of(key, e.to_string())))
            .transpose()
    }

    pub fn opt_bool(&self, key: &str) -> Result<Option<bool>, BlockError> {
        self.opt_str(key)?
            .map(|s| s.parse::<bool>().map_err(|_| self.pos_of(key, format!("`{key}` must be true or false"))))
            .transpose()
    }

    pub fn pos_of(&self, key: &str, message: impl Into<String>) -> BlockError {
        let pos = self.attr(key).map(|a| a.pos).unwrap_or(self.pos);
        self.error(pos, message)
    }

    pub fn children<'a>(&'a self, kind: &'a str) -> impl Iterator<Item = &'a Block> + 'a {
        self.children.iter().filter(move |c| c.kind == kind)
    }

    pub fn child(&self, kind: &str) -> Option<&Block> {
        self.children.iter().find(|c| c.kind == kind)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Quoted(String),
    Open,
    Close,
    LBracket,
    RBracket,
    Comma,
    Eq,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn err(&self, message: impl Into<String>) -> BlockError {
        BlockError { line: self.line, column: self.column, message: message.into() }
    }

    fn tokens(mut self) -> Result<Vec<(Tok, Pos)>, BlockError> {
        let mut out = Vec::new();
        while let Some(&c) = self.chars.peek() {
            let pos = Pos { line: self.line, column: self.column };
            match c {
                c if c.is_whitespace() => {
                    self.bump();
                }
                '#' => {
                    while let Some(&c) = self.chars.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                '{' | '}' | '[' | ']' | ',' | '=' => {
                    self.bump();
                    let t = match c {
                        '{' => Tok::Open,
                        '}' => Tok::Close,
                        '[' => Tok::LBracket,
                        ']' => Tok::RBracket,
                        ',' => Tok::Comma,
                        _ => Tok::Eq,
                    };
                    out.push((t, pos));
                }
                '"' => {
                    self.bump();
                    let mut s = String::new();
                    loop {
                        match self.bump() {
                            None => return Err(BlockError { line: pos.line, column: pos.column, message: "unterminated string".into() }),
                            Some('"') => break,
                            Some('\\') => match self.bump() {
                                Some('n') => s.push('\n'),
                                Some(c) => s.push(c),
                                None => return Err(self.err("unterminated escape")),
                            },
                            Some(c) => s.push(c),
                        }
                    }
                    out.push((Tok::Quoted(s), pos));
                }
                _ => {
                    let mut s = String::new();
                    while let Some(&c) = self.chars.peek() {
                        if c.is_whitespace() || "{}[],=\"#".contains(c) {
                            break;
                        }
                        s.push(c);
                        self.bump();
                    }
                    out.push((Tok::Word(s), pos));
                }
            }
        }
        Ok(out)
    }
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    i: usize,
    end: Pos,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|t| &t.0)
    }

    fn pos(&self) -> Pos {
        self.toks.get(self.i).map(|t| t.1).unwrap_or(self.end)
    }

    fn err(&self, message: impl Into<String>) -> BlockError {
        let p = self.pos();
        BlockError { line: p.line, column: p.column, message: message.into() }
    }

    fn next(&mut self) -> Option<(Tok, Pos)> {
        let t = self.toks.get(self.i).cloned();
        self.i += 1;
        t
    }

    fn scalar(&mut self) -> Result<Scalar, BlockError> {
        match self.next() {
            Some((Tok::Word(w), _)) => Ok(Scalar::Word(w)),
            Some((Tok::Quoted(q), _)) => Ok(Scalar::Quoted(q)),
            _ => {
                self.i -= 1;
                Err(self.err("expected a value"))
            }
        }
    }

    /// Parses entries until `}` (nested) or end of input (top level).
    fn body(&mut self, nested: bool) -> Result<(Vec<Attr>, Vec<Block>), BlockError> {
        let mut attrs = Vec::new();
        let mut children = Vec::new();
        loop {
            match self.peek() {
                None if nested => return Err(self.err("missing `}`")),
                None => return Ok((attrs, children)),
                Some(Tok::Close) if nested => {
                    self.i += 1;
                    return Ok((attrs, children));
                }
                Some(Tok::Word(_)) => {}
                Some(_) => return Err(self.err("expected a key or block name")),
            }
            let (key, pos) = match self.next() {
                Some((Tok::Word(w), p)) => (w, p),
                _ => unreachable!(),
            };
            match self.peek() {
                Some(Tok::Eq) => {
                    self.i += 1;
                    let value = if self.peek() == Some(&Tok::LBracket) {
                        self.i += 1;
                        let mut items = Vec::new();
                        if self.peek() == Some(&Tok::RBracket) {
                            self.i += 1;
                        } else {
                            loop {
                                items.push(self.scalar()?);
                                match self.next() {
                                    Some((Tok::Comma, _)) => {
                                        if self.peek() == Some(&Tok::RBracket) {
                                            self.i += 1;
                                            break;
                                        }
                                    }
                                    Some((Tok::RBracket, _)) => break,
                                    _ => {
                                        self.i -= 1;
                                        return Err(self.err("expected `,` or `]`"));
                                    }
                                }
                            }
                        }
                        AttrValue::List(items)
                    } else {
                        AttrValue::Scalar(self.scalar()?)
                    };
                    attrs.push(Attr { key, value, pos });
                }
                _ => {
                    let label = match self.peek() {
                        Some(Tok::Word(_)) | Some(Tok::Quoted(_)) => Some(self.scalar()?.text().to_string()),
                        _ => None,
                    };
                    if self.peek() != Some(&Tok::Open) {
                        return Err(self.err(format!("expected `=` or `{{` after `{key}`")));
                    }
                    self.i += 1;
                    let (a, c) = self.body(true)?;
                    children.push(Block { kind: key, label, attrs: a, children: c, pos });
                }
            }
        }
    }
}

/// Parses a document into its top-level blocks. Top-level attributes are rejected.
pub fn parse_blocks(text: &str) -> Result<Vec<Block>, BlockError> {
    let lexer = Lexer { chars: text.chars().peekable(), line: 1, column: 1 };
    let toks = lexer.tokens()?;
    let end = Pos { line: text.lines().count().max(1), column: 1 };
    let mut p = Parser { toks, i: 0, end };
    let (attrs, blocks) = p.body(false)?;
    if let Some(a) = attrs.first() {
        return Err(BlockError { line: a.pos.line, column: a.pos.column, message: format!("`{}` must be inside a block", a.key) });
    }
    Ok(blocks)
}

/// Quotes a string for writing back into block syntax.
pub fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_blocks_and_lists() {
        let text = r#"
            # losses
            loss L-1 { description = "Loss of life" }
            hazard H-1 {
                losses = [L-1, L-2,]
                context {
                    variables = [throttle]
                }
            }
        "#;
        let blocks = parse_blocks(text).unwrap();
        assert_eq!(blocks.len(), 2);
        assert_eq!(blocks[0].label.as_deref(), Some("L-1"));
        assert_eq!(blocks[0].str("description").unwrap(), "Loss of life");
        assert_eq!(blocks[1].list("losses").unwrap(), vec!["L-1", "L-2"]);
        assert_eq!(blocks[1].child("context").unwrap().list("variables").unwrap(), vec!["throttle"]);
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_blocks("a {\n  b = \n}").unwrap_err();
        assert_eq!((e.line, e.column), (3, 1));
        let e = parse_blocks("a {").unwrap_err();
        assert!(e.message.contains("missing `}`"));
        let e = parse_blocks("x = 1").unwrap_err();
        assert!(e.message.contains("inside a block"));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let b = &parse_blocks("loss L-1 { descripton = x }").unwrap()[0];
        assert!(b.expect_keys(&["description"], &[]).is_err());
    }

    #[test]
    fn quote_round_trips() {
        let s = "say \"hi\"\\ now";
        let b = &parse_blocks(&format!("x {{ v = {} }}", quote(s))).unwrap()[0];
        assert_eq!(b.str("v").unwrap(), s);
    }
}
