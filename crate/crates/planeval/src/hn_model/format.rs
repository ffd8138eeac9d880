//! Text format:
//!
//! ```text
//! field: Q
//! free h=1 coeffs k=1: 0
//! power h=2
//! terminal: divisorial
//! ```

use crate::error::{Error, Result};
use crate::exactnum::{parse_rat, ContFrac};

use super::{Coeff, Field, HNExpansion, HNRow, Terminal};

pub fn write_hn(hn: &HNExpansion) -> String {
    let mut out = format!("field: {}\n", hn.field.text());
    for row in &hn.rows {
        match row {
            HNRow::Free { k, h, coeffs } => {
                let cs: Vec<String> = coeffs.iter().map(|c| c.to_string()).collect();
                out.push_str(&format!("free h={h} coeffs k={k}: {}\n", cs.join(", ")));
            }
            HNRow::Power { h } => out.push_str(&format!("power h={h}\n")),
        }
    }
    let term = match &hn.terminal {
        Terminal::Divisorial => "divisorial".to_string(),
        Terminal::Irrational { tail } => format!("irrational cf={tail}"),
        Terminal::Curve => "curve".to_string(),
    };
    out.push_str(&format!("terminal: {term}\n"));
    out
}

fn parse_field(s: &str, line: usize, col: usize) -> Result<Field> {
    let s = s.trim();
    if s == "Q" {
        return Ok(Field::Q);
    }
    if let Some(p) = s.strip_prefix("Fp:") {
        let p: u64 = p
            .trim()
            .parse()
            .map_err(|_| Error::parse(line, col, format!("bad prime {p:?}")))?;
        return Ok(Field::Fp(p));
    }
    Err(Error::parse(line, col, format!("unknown field {s:?}")))
}

fn kv(tok: &str, key: &str, line: usize, col: usize) -> Result<u32> {
    tok.strip_prefix(key)
        .and_then(|v| v.strip_prefix('='))
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| Error::parse(line, col, format!("expected {key}=<n>, found {tok:?}")))
}

fn parse_coeff(field: Field, text: &str, line: usize, col: usize) -> Result<Coeff> {
    let r = parse_rat(text).map_err(|_| Error::parse(line, col, format!("bad coefficient {text:?}")))?;
    match field {
        Field::Fp(p) if !r.is_integer() || r.numer() < &0.into() || r.numer() >= &p.into() => Err(
            Error::parse(line, col, format!("coefficient {text:?} is not a residue in [0, {p})")),
        ),
        _ => field
            .rat(&r)
            .map_err(|e| Error::parse(line, col, e.to_string())),
    }
}

/// Parses the text format; blank lines and `#` comments are skipped, anything
/// after the terminal line is an error.
pub fn parse_hn(text: &str) -> Result<HNExpansion> {
    let mut field: Option<Field> = None;
    let mut rows = Vec::new();
    let mut terminal: Option<Terminal> = None;
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let col = raw.len() - raw.trim_start().len() + 1;
        if terminal.is_some() {
            return Err(Error::parse(line, col, "trailing content after terminal line"));
        }
        if let Some(rest) = t.strip_prefix("field:") {
            if field.is_some() || !rows.is_empty() {
                return Err(Error::parse(line, col, "field must be declared once, first"));
            }
            field = Some(parse_field(rest, line, col + 6)?);
            continue;
        }
        let f = field.ok_or_else(|| Error::parse(line, col, "missing `field:` header"))?;
        if let Some(rest) = t.strip_prefix("terminal:") {
            let rest = rest.trim();
            terminal = Some(if rest == "divisorial" {
                Terminal::Divisorial
            } else if rest == "curve" {
                Terminal::Curve
            } else if let Some(cf) = rest.strip_prefix("irrational") {
                let cf = cf.trim();
                let cf = cf
                    .strip_prefix("cf=")
                    .ok_or_else(|| Error::parse(line, col, "expected `irrational cf=[..]`"))?;
                Terminal::Irrational {
                    tail: ContFrac::parse(cf)
                        .map_err(|e| Error::parse(line, col, e.to_string()))?,
                }
            } else {
                return Err(Error::parse(line, col + 9, format!("unknown terminal {rest:?}")));
            });
            continue;
        }
        if let Some(rest) = t.strip_prefix("power") {
            let toks: Vec<&str> = rest.split_whitespace().collect();
            if toks.len() != 1 {
                return Err(Error::parse(line, col, "expected `power h=<n>`"));
            }
            rows.push(HNRow::Power {
                h: kv(toks[0], "h", line, col + 6)?,
            });
            continue;
        }
        if let Some(rest) = t.strip_prefix("free") {
            let (head, tail) = rest
                .split_once(':')
                .ok_or_else(|| Error::parse(line, col, "expected `free h=<n> coeffs k=<k>: ...`"))?;
            let toks: Vec<&str> = head.split_whitespace().collect();
            if toks.len() != 3 || toks[1] != "coeffs" {
                return Err(Error::parse(line, col, "expected `free h=<n> coeffs k=<k>: ...`"));
            }
            let h = kv(toks[0], "h", line, col + 5)?;
            let k = kv(toks[2], "k", line, col + 5)?;
            let ccol = col + 5 + head.len();
            let coeffs = tail
                .split(',')
                .map(|c| parse_coeff(f, c.trim(), line, ccol))
                .collect::<Result<Vec<_>>>()?;
            rows.push(HNRow::Free { k, h, coeffs });
            continue;
        }
        return Err(Error::parse(line, col, format!("unrecognized line {t:?}")));
    }
    let field = field.ok_or_else(|| Error::parse(1, 1, "missing `field:` header"))?;
    let terminal = terminal.ok_or_else(|| Error::parse(text.lines().count().max(1), 1, "missing `terminal:` line"))?;
    Ok(HNExpansion::new(field, rows, terminal))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hn_model::build::w1;

    #[test]
    fn round_trip() {
        let text = "field: Q\nfree h=1 coeffs k=1: 0\npower h=2\nterminal: divisorial\n";
        let hn = parse_hn(text).unwrap();
        assert_eq!(hn, w1(0));
        assert_eq!(write_hn(&hn), text);
        let irr = "field: Fp:2147483647\nfree h=2 coeffs k=1: 5, 0\nfree h=3 coeffs k=2: 1, 7\nterminal: irrational cf=[1;(2)]\n";
        assert_eq!(write_hn(&parse_hn(irr).unwrap()), irr);
        let q = "field: Q\nfree h=3 coeffs k=1: -1/2, 0, 3\nterminal: curve\n";
        assert_eq!(write_hn(&parse_hn(q).unwrap()), q);
    }

    #[test]
    fn rejects_garbage() {
        let text = "field: Q\nfree h=1 coeffs k=1: 0\nterminal: divisorial\npower h=2\n";
        assert!(matches!(parse_hn(text), Err(Error::Parse { line: 4, .. })));
        assert!(parse_hn("field: Q\nfree h=1 coeffs k=1: x\nterminal: divisorial\n").is_err());
        assert!(parse_hn("free h=1 coeffs k=1: 0\n").is_err());
        assert!(parse_hn("field: Q\npower h=2 extra\nterminal: divisorial\n").is_err());
    }
}
