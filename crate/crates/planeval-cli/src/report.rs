//! Report records and their three renderings.

use std::fmt::Write as _;

use clap::ValueEnum;
use serde_json::{Map, Value};

use planeval::exactnum::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    /// `key=value` lines.
    Machine,
    JsonLines,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Val {
    One(String),
    List(Vec<String>),
    /// Multi-line text (expansions, graphs).
    Block(String),
}

pub type Record = Vec<(String, Val)>;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    records: Vec<Record>,
}

impl Report {
    pub fn new() -> Report {
        Report::default()
    }

    pub fn field(&mut self, key: &str, v: impl ToString) -> &mut Self {
        self.records.push(vec![(key.into(), Val::One(v.to_string()))]);
        self
    }

    pub fn list<T: ToString>(&mut self, key: &str, vs: impl IntoIterator<Item = T>) -> &mut Self {
        let items = vs.into_iter().map(|v| v.to_string()).collect();
        self.records.push(vec![(key.into(), Val::List(items))]);
        self
    }

    pub fn block(&mut self, key: &str, text: &str) -> &mut Self {
        self.records.push(vec![(key.into(), Val::Block(text.trim_end().to_string()))]);
        self
    }

    /// An exact real plus its 12-digit `approx` companion when irrational.
    pub fn real(&mut self, key: &str, x: &Real) -> &mut Self {
        self.record(real_fields(key, x))
    }

    pub fn record(&mut self, r: Record) -> &mut Self {
        self.records.push(r);
        self
    }

    pub fn render(&self, fmt: Format) -> String {
        let mut out = String::new();
        for r in &self.records {
            match fmt {
                Format::Human => human(&mut out, r),
                Format::Machine => {
                    let parts: Vec<String> = r.iter().map(|(k, v)| format!("{k}={}", machine(v))).collect();
                    out.push_str(&parts.join(" "));
                    out.push('\n');
                }
                Format::JsonLines => {
                    let mut m = Map::new();
                    for (k, v) in r {
                        let j = match v {
                            Val::One(s) | Val::Block(s) => Value::String(s.clone()),
                            Val::List(xs) => Value::Array(xs.iter().cloned().map(Value::String).collect()),
                        };
                        m.insert(k.clone(), j);
                    }
                    out.push_str(&Value::Object(m).to_string());
                    out.push('\n');
                }
            }
        }
        out
    }
}

pub fn one(key: &str, v: impl ToString) -> (String, Val) {
    (key.into(), Val::One(v.to_string()))
}

pub fn real_fields(key: &str, x: &Real) -> Record {
    let mut r = vec![one(key, x)];
    if !x.is_rational() {
        r.push(one("approx", x.approx(12)));
    }
    r
}

fn human(out: &mut String, r: &Record) {
    if let [(k, Val::Block(text))] = r.as_slice() {
        let _ = writeln!(out, "{k}:");
        for line in text.lines() {
            let _ = writeln!(out, "  {line}");
        }
        return;
    }
    let parts: Vec<String> = r
        .iter()
        .map(|(k, v)| match v {
            Val::One(s) | Val::Block(s) => format!("{k}: {s}"),
            Val::List(xs) => format!("{k}: {}", xs.join(", ")),
        })
        .collect();
    let _ = writeln!(out, "{}", parts.join(", "));
}

fn machine(v: &Val) -> String {
    let raw = match v {
        Val::One(s) => s.clone(),
        Val::List(xs) => xs.join(","),
        Val::Block(s) => s.lines().collect::<Vec<_>>().join(";"),
    };
    if raw.is_empty() || raw.contains(|c: char| c.is_whitespace() || c == '=' || c == '"') {
        format!("{raw:?}")
    } else {
        raw
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_renderings() {
        let mut r = Report::new();
        r.list("maxcontact", [2, 3, 6]).record(vec![one("value", 6), one("normalized", 3)]);
        assert_eq!(r.render(Format::Human), "maxcontact: 2, 3, 6\nvalue: 6, normalized: 3\n");
        assert_eq!(r.render(Format::Machine), "maxcontact=2,3,6\nvalue=6 normalized=3\n");
        assert_eq!(
            r.render(Format::JsonLines),
            "{\"maxcontact\":[\"2\",\"3\",\"6\"]}\n{\"value\":\"6\",\"normalized\":\"3\"}\n"
        );
    }

    #[test]
    fn quoting_and_approx() {
        let mut r = Report::new();
        r.field("poly", "v^2 - u^3");
        r.real("ratio", &Real::sqrt_rat(&planeval::exactnum::rint(2)).unwrap());
        assert_eq!(r.render(Format::Machine), "poly=\"v^2 - u^3\"\nratio=sqrt(2) approx=1.414213562373\n");
    }
}
