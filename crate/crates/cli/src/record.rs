//! Structured text records.
//!
//! ```text
//! code: n2|T[...]
//! vertex {
//!   id: 0
//!   kind: root
//! }
//! codes [
//!   n1|T[L0 r:R4 L1 L2 L3]
//!   {
//!     t: 0.5
//!   }
//! ]
//! ```
//!
//! Scalars are plain strings; a key never contains `:`, so the first colon
//! of an entry line ends the key. Indentation is cosmetic.

use std::fmt;

use serde_json::{Map, Value as Json};
use skizze_core::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Scalar(String),
    Block(Record),
    List(Vec<Value>),
}

/// Ordered key/value entries; keys may repeat.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Record {
    pub entries: Vec<(String, Value)>,
}

impl Record {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn scalar(mut self, key: &str, value: impl ToString) -> Self {
        self.entries.push((key.into(), Value::Scalar(value.to_string())));
        self
    }

    pub fn block(mut self, key: &str, value: Record) -> Self {
        self.entries.push((key.into(), Value::Block(value)));
        self
    }

    pub fn list(mut self, key: &str, items: Vec<Value>) -> Self {
        self.entries.push((key.into(), Value::List(items)));
        self
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        match self.get(key)? {
            Value::Scalar(s) => Some(s),
            _ => None,
        }
    }

    /// JSON object; scalars become strings, repeated keys keep the last value.
    pub fn to_json(&self) -> Json {
        let mut m = Map::new();
        for (k, v) in &self.entries {
            m.insert(k.clone(), v.to_json());
        }
        Json::Object(m)
    }

    pub fn parse(text: &str) -> Result<Record> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty()).peekable();
        let r = parse_block(&mut lines, false)?;
        match lines.next() {
            Some(extra) => Err(Error::Parse(format!("unexpected {extra:?} after record"))),
            None => Ok(r),
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, depth: usize) -> fmt::Result {
        for (k, v) in &self.entries {
            let pad = "  ".repeat(depth);
            match v {
                Value::Scalar(s) => writeln!(f, "{pad}{k}: {s}")?,
                Value::Block(r) => {
                    writeln!(f, "{pad}{k} {{")?;
                    r.write(f, depth + 1)?;
                    writeln!(f, "{pad}}}")?;
                }
                Value::List(items) => {
                    writeln!(f, "{pad}{k} [")?;
                    write_items(f, items, depth + 1)?;
                    writeln!(f, "{pad}]")?;
                }
            }
        }
        Ok(())
    }
}

fn write_items(f: &mut fmt::Formatter<'_>, items: &[Value], depth: usize) -> fmt::Result {
    let pad = "  ".repeat(depth);
    for item in items {
        match item {
            Value::Scalar(s) => writeln!(f, "{pad}{s}")?,
            Value::Block(r) => {
                writeln!(f, "{pad}{{")?;
                r.write(f, depth + 1)?;
                writeln!(f, "{pad}}}")?;
            }
            Value::List(inner) => {
                writeln!(f, "{pad}[")?;
                write_items(f, inner, depth + 1)?;
                writeln!(f, "{pad}]")?;
            }
        }
    }
    Ok(())
}

impl fmt::Display for Record {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, 0)
    }
}

impl Value {
    pub fn to_json(&self) -> Json {
        match self {
            Value::Scalar(s) => Json::String(s.clone()),
            Value::Block(r) => r.to_json(),
            Value::List(items) => Json::Array(items.iter().map(Value::to_json).collect()),
        }
    }
}

impl From<Record> for Value {
    fn from(r: Record) -> Self {
        Value::Block(r)
    }
}

type Lines<'a, I> = std::iter::Peekable<I>;

fn parse_block<'a, I: Iterator<Item = &'a str>>(lines: &mut Lines<'a, I>, nested: bool) -> Result<Record> {
    let mut r = Record::new();
    while let Some(&line) = lines.peek() {
        if line == "}" {
            if !nested {
                return Err(Error::Parse("unbalanced '}'".into()));
            }
            lines.next();
            return Ok(r);
        }
        lines.next();
        if let Some(key) = line.strip_suffix(" {") {
            let inner = parse_block(lines, true)?;
            r.entries.push((key.to_owned(), Value::Block(inner)));
        } else if let Some(key) = line.strip_suffix(" [") {
            let items = parse_list(lines)?;
            r.entries.push((key.to_owned(), Value::List(items)));
        } else if let Some((key, value)) = line.split_once(':') {
            r.entries.push((key.to_owned(), Value::Scalar(value.trim_start().to_owned())));
        } else {
            return Err(Error::Parse(format!("expected 'key: value', got {line:?}")));
        }
    }
    if nested {
        return Err(Error::Parse("unterminated block".into()));
    }
    Ok(r)
}

fn parse_list<'a, I: Iterator<Item = &'a str>>(lines: &mut Lines<'a, I>) -> Result<Vec<Value>> {
    let mut items = Vec::new();
    while let Some(line) = lines.next() {
        match line {
            "]" => return Ok(items),
            "{" => items.push(Value::Block(parse_block(lines, true)?)),
            "[" => items.push(Value::List(parse_list(lines)?)),
            s => items.push(Value::Scalar(s.to_owned())),
        }
    }
    Err(Error::Parse("unterminated list".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let r = Record::new()
            .scalar("code", "n1|T[L0 r:R4 L1 L2 L3]")
            .scalar("empty", "")
            .block("inner", Record::new().scalar("a", 1).list("xs", vec![]))
            .list(
                "items",
                vec![
                    Value::Scalar("n2|x".into()),
                    Record::new().scalar("t", 0.5).into(),
                    Value::List(vec![Value::Scalar("deep".into())]),
                ],
            );
        let text = r.to_string();
        assert_eq!(Record::parse(&text).unwrap(), r);
    }

    #[test]
    fn rejects_unbalanced() {
        assert!(Record::parse("a {\nb: 1\n").is_err());
        assert!(Record::parse("}\n").is_err());
        assert!(Record::parse("xs [\n1\n").is_err());
        assert!(Record::parse("no colon here").is_err());
    }
}
