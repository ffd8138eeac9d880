//! Values of polynomials along a valuation.
//!
//! Two independent routes: substituting the parametrization
//! ([`value_substitution`]) and summing multiplicities of strict transforms
//! at the blown-up points ([`value_proximity`]).

use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exactnum::{parse_rat, ContFrac, Rat, Real, ValElem};
use crate::hn_model::{parametrize_trunc, value_trunc, Coeff, Field, HNExpansion, HNRow, Terminal};
use crate::invariants;
use crate::poly::Poly2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chart {
    /// Coordinates `(u, v)` at the center.
    Local,
    /// Affine coordinates `(x, y)` of the plane.
    Affine,
}

impl Chart {
    pub fn names(self) -> (&'static str, &'static str) {
        match self {
            Chart::Local => ("u", "v"),
            Chart::Affine => ("x", "y"),
        }
    }
}

/// Polynomial with `X` the first chart variable and `Y` the second.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BivarPoly {
    pub poly: Poly2,
    pub chart: Chart,
}

impl BivarPoly {
    pub fn new(poly: Poly2, chart: Chart) -> BivarPoly {
        BivarPoly { poly, chart }
    }

    pub fn local(poly: Poly2) -> BivarPoly {
        BivarPoly::new(poly, Chart::Local)
    }

    pub fn field(&self) -> Field {
        self.poly.field()
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn degree(&self) -> u32 {
        self.poly.degree().unwrap_or(0)
    }

    pub fn mul(&self, other: &BivarPoly) -> BivarPoly {
        BivarPoly::new(self.poly.mul(&other.poly), self.chart)
    }

    pub fn add(&self, other: &BivarPoly) -> BivarPoly {
        BivarPoly::new(self.poly.add(&other.poly), self.chart)
    }

    /// Accepts either an expression such as `v^2 - u^3` or a block
    ///
    /// ```text
    /// terms:
    /// 0 2 1
    /// 3 0 -1
    /// ```
    ///
    /// listing `i j coeff` for `coeff * X^i Y^j`.
    pub fn parse(text: &str, field: Field, chart: Chart) -> Result<BivarPoly> {
        let body = text.trim_start();
        let poly = if body.starts_with("terms:") {
            parse_terms(text, field)?
        } else {
            ExprParser::new(text, field, chart.names()).run()?
        };
        Ok(BivarPoly::new(poly, chart))
    }
}

impl fmt::Display for BivarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (x, y) = self.chart.names();
        f.write_str(&self.poly.render(x, y))
    }
}

fn coeff_from_text(field: Field, s: &str, line: usize, col: usize) -> Result<Coeff> {
    let r = parse_rat(s).map_err(|_| Error::parse(line, col, format!("bad coefficient {s:?}")))?;
    field.rat(&r).map_err(|e| Error::parse(line, col, e.to_string()))
}

fn parse_terms(text: &str, field: Field) -> Result<Poly2> {
    let mut p = Poly2::zero(field);
    let mut header = false;
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        if !header {
            let rest = t.strip_prefix("terms:").expect("checked by caller");
            header = true;
            if rest.trim().is_empty() {
                continue;
            }
            return Err(Error::parse(line, 7, "terms go on the following lines"));
        }
        let toks: Vec<&str> = t.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(Error::parse(line, 1, "expected `i j coeff`"));
        }
        let exp = |s: &str, col| {
            s.parse::<u32>()
                .map_err(|_| Error::parse(line, col, format!("bad exponent {s:?}")))
        };
        let i = exp(toks[0], 1)?;
        let j = exp(toks[1], 1)?;
        p.add_term(i, j, coeff_from_text(field, toks[2], line, 1)?);
    }
    Ok(p)
}

struct ExprParser<'a> {
    src: Vec<char>,
    pos: usize,
    field: Field,
    names: (&'a str, &'a str),
}

impl<'a> ExprParser<'a> {
    fn new(text: &str, field: Field, names: (&'a str, &'a str)) -> ExprParser<'a> {
        ExprParser {
            src: text.chars().collect(),
            pos: 0,
            field,
            names,
        }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        let before: String = self.src[..self.pos.min(self.src.len())].iter().collect();
        let line = before.matches('\n').count() + 1;
        let col = before.rsplit('\n').next().map_or(0, |s| s.chars().count()) + 1;
        Error::parse(line, col, msg)
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn run(mut self) -> Result<Poly2> {
        if self.peek().is_none() {
            return Err(self.err("empty polynomial"));
        }
        let p = self.expr()?;
        if let Some(c) = self.peek() {
            return Err(self.err(format!("unexpected {c:?}")));
        }
        Ok(p)
    }

    fn expr(&mut self) -> Result<Poly2> {
        let mut acc = self.term()?;
        while let Some(c) = self.peek() {
            match c {
                '+' => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                '-' => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Poly2> {
        let mut acc = self.unary()?;
        while let Some(c) = self.peek() {
            match c {
                '*' => {
                    self.pos += 1;
                    acc = acc.mul(&self.unary()?);
                }
                '/' => {
                    self.pos += 1;
                    let d = self.unary()?;
                    let c = match (d.len(), d.coeff(0, 0)) {
                        (1, Some(c)) => c.clone(),
                        _ => return Err(self.err("can only divide by a nonzero constant")),
                    };
                    let inv = c.inv().ok_or_else(|| self.err("division by zero"))?;
                    acc = acc.scale(&inv);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Poly2> {
        match self.peek() {
            Some('-') => {
                self.pos += 1;
                Ok(self.unary()?.neg())
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Poly2> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let e: String = self.src[start..self.pos].iter().collect();
            let e: u32 = e.parse().map_err(|_| self.err("expected a nonnegative exponent"))?;
            return Ok(base.pow_trunc(e, None));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Poly2> {
        let c = self.peek().ok_or_else(|| self.err("unexpected end of input"))?;
        if c == '(' {
            self.pos += 1;
            let p = self.expr()?;
            if self.peek() != Some(')') {
                return Err(self.err("expected ')'"));
            }
            self.pos += 1;
            return Ok(p);
        }
        if c.is_ascii_digit() {
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let s: String = self.src[start..self.pos].iter().collect();
            let (line, col) = match self.err("") {
                Error::Parse { line, col, .. } => (line, col),
                _ => (1, 1),
            };
            return Ok(Poly2::constant(coeff_from_text(self.field, &s, line, col)?));
        }
        if c.is_ascii_alphabetic() {
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                self.pos += 1;
            }
            let s: String = self.src[start..self.pos].iter().collect();
            if s == self.names.0 {
                return Ok(Poly2::x(self.field));
            }
            if s == self.names.1 {
                return Ok(Poly2::y(self.field));
            }
            self.pos = start;
            return Err(self.err(format!(
                "unknown variable {s:?}; expected {} or {}",
                self.names.0, self.names.1
            )));
        }
        Err(self.err(format!("unexpected {c:?}")))
    }
}

fn require_local(hn: &HNExpansion, f: &BivarPoly) -> Result<()> {
    if f.chart != Chart::Local {
        return Err(Error::validation("convert affine polynomials to the local chart first"));
    }
    if f.field() != hn.field {
        return Err(Error::validation(format!(
            "polynomial over {} but expansion over {}",
            f.field().text(),
            hn.field.text()
        )));
    }
    if f.is_zero() {
        return Err(Error::domain("the value of the zero polynomial is undefined"));
    }
    Ok(())
}

/// `nu(f)` by substitution. Divisorial values are integers in units with
/// `nu(w_L) = 1`; irrational ones are `p + q*gamma` in units with `nu(w_{s_g+1}) = 1`.
pub fn value_substitution(hn: &HNExpansion, f: &BivarPoly) -> Result<ValElem> {
    require_local(hn, f)?;
    if hn.terminal == Terminal::Curve {
        return Err(Error::Capability(
            "curve expansions are anchors only; evaluate along a divisorial or irrational expansion".into(),
        ));
    }
    let total = invariants::value_sequence(hn)?.iter().sum::<i64>() as u64;
    // divisorial values never exceed deg(f) * sum m_i
    let safe = (hn.terminal == Terminal::Divisorial).then_some(f.degree() as u64 * total + 1);
    let mut bound = (total + 1).min(safe.unwrap_or(u64::MAX));
    loop {
        // terms of value below the bound are exact, so an order at most the
        // bound is the true one
        let cap = value_trunc(hn, bound);
        let par = parametrize_trunc(hn, Some(cap))?;
        let img = f.poly.compose(&par.u, &par.v, Some(cap));
        if let Some(o) = par.order(&img) {
            if o.real() <= Real::int(bound as i64) {
                return Ok(o);
            }
        }
        debug_assert!(safe.is_none_or(|s| bound < s), "cap {bound} too small");
        if safe.is_some_and(|s| bound >= s) || bound > MAX_BOUND {
            return Err(Error::Capability(format!("no term of value below {bound}")));
        }
        bound = (bound * 2).min(safe.unwrap_or(u64::MAX));
    }
}

/// Give up doubling the value bound past this.
const MAX_BOUND: u64 = 1 << 40;

/// Rescales a substitution value to the units of
/// [`invariants::InvariantBundle`] (irrational values are divided by `gamma`).
pub fn invariant_units(hn: &HNExpansion, v: &ValElem) -> Result<Real> {
    match &v.gamma {
        Some(g) => Ok(v.real().try_div(g)?),
        None if matches!(hn.terminal, Terminal::Irrational { .. }) => {
            Ok(v.real().try_div(&hn.gamma().expect("irrational"))?)
        }
        None => Ok(v.real()),
    }
}

fn shift_down(p: &Poly2, e: u32) -> Poly2 {
    Poly2::from_terms(
        p.field(),
        p.terms().map(|(&(i, j), c)| ((i - e, j), c.clone())),
    )
}

/// Multiplicities of the strict transforms of `f` at `p_1, ..., p_s`.
pub fn multiplicities(hn: &HNExpansion, f: &BivarPoly) -> Result<Vec<u32>> {
    require_local(hn, f)?;
    if hn.terminal != Terminal::Divisorial {
        return Err(Error::Capability("the multiplicity walk needs a divisorial expansion".into()));
    }
    let field = hn.field;
    let x = Poly2::x(field);
    let xy = x.mul(&Poly2::y(field));
    let mut out = Vec::new();
    let mut g = f.poly.clone();
    let mut done = false;
    for row in &hn.rows {
        for l in 1..=row.h() {
            let m = if done { 0 } else { g.order().expect("nonzero") };
            out.push(m);
            if m == 0 {
                done = true;
                continue;
            }
            let a = row.coeff_at(l, field);
            let ny = xy.add(&x.scale(&a));
            g = shift_down(&g.compose(&x, &ny, None), m);
        }
        g = g.swap_xy();
    }
    Ok(out)
}

/// `sum_i m_i * mult_{p_i}(f)` for divisorial expansions.
pub fn value_proximity(hn: &HNExpansion, f: &BivarPoly) -> Result<i64> {
    let mult = multiplicities(hn, f)?;
    let m = invariants::value_sequence(hn)?;
    Ok(m.iter().zip(&mult).map(|(&a, &b)| a * b as i64).sum())
}

/// `nu(f) / nu(m)`, independent of the unit.
pub fn value_normalized(hn: &HNExpansion, f: &BivarPoly) -> Result<Real> {
    let vf = value_substitution(hn, f)?;
    let u = BivarPoly::local(Poly2::x(hn.field));
    let vu = value_substitution(hn, &u)?;
    Ok(vf.real().try_div(&vu.real())?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LimitOpts {
    /// Consecutive truncations that must agree (or bracket within `tol`).
    pub window: usize,
    pub tol: Rat,
    pub max_terms: usize,
}

impl Default for LimitOpts {
    fn default() -> Self {
        LimitOpts {
            window: 3,
            tol: Rat::new(1.into(), 1_000_000_000u64.into()),
            max_terms: 30,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LimitInterval {
    pub lo: Rat,
    pub hi: Rat,
    /// Normalized values of the truncations, in order.
    pub values: Vec<Rat>,
}

impl LimitInterval {
    pub fn contains(&self, x: &Real) -> bool {
        Real::Rat(self.lo.clone()) <= *x && *x <= Real::Rat(self.hi.clone())
    }
}

/// Divisorial truncation with `gamma` replaced by the finite continued
/// fraction `q`. `None` when `q` does not end a chain (last quotient 1).
pub fn divisorial_truncation(hn: &HNExpansion, q: &[u64]) -> Option<HNExpansion> {
    let sg = hn.shape().last;
    let mut q = q.to_vec();
    if q.len() > 1 && *q.last()? == 1 {
        q.pop();
        *q.last_mut()? += 1;
    }
    if *q.last()? < 2 {
        return None;
    }
    let mut rows = hn.rows[..=sg].to_vec();
    rows.extend(q.iter().map(|&h| HNRow::Power { h: h as u32 }));
    let d = HNExpansion::new(hn.field, rows, Terminal::Divisorial);
    d.check().ok()?;
    Some(d)
}

/// Brackets `nu^N(f)` by divisorial truncations along the convergents of `gamma`.
pub fn value_irrational_by_limit(hn: &HNExpansion, f: &BivarPoly, opts: &LimitOpts) -> Result<LimitInterval> {
    require_local(hn, f)?;
    let cf: ContFrac = hn
        .shape()
        .gamma_cf
        .ok_or_else(|| Error::validation("limit mode needs an irrational expansion"))?;
    let window = opts.window.max(1);
    let mut values: Vec<Rat> = Vec::new();
    for n in 0..opts.max_terms {
        let q: Vec<u64> = (0..=n).map(|i| cf.quotient(i).expect("infinite")).collect();
        let Some(d) = divisorial_truncation(hn, &q) else {
            continue;
        };
        let v = value_normalized(&d, f)?;
        values.push(v.as_rat().expect("divisorial values are rational").clone());
        if values.len() >= window {
            let last = &values[values.len() - window..];
            let lo = last.iter().min().expect("nonempty");
            let hi = last.iter().max().expect("nonempty");
            if hi - lo <= opts.tol {
                break;
            }
        }
    }
    let take = window.min(values.len());
    let last = &values[values.len() - take..];
    Ok(LimitInterval {
        lo: last.iter().min().cloned().unwrap_or_else(Rat::zero),
        hi: last.iter().max().cloned().unwrap_or_else(Rat::zero),
        values,
    })
}

/// `g(u, v) = g~(x, y) / x^d` with `u = y/x`, `v = 1/x`.
pub fn chart_convert(f: &BivarPoly, d: u32) -> Result<BivarPoly> {
    if f.chart != Chart::Affine {
        return Err(Error::validation("expected an affine polynomial"));
    }
    if f.degree() > d {
        return Err(Error::domain(format!("degree {} exceeds d = {d}", f.degree())));
    }
    let terms = f.poly.terms().map(|(&(i, j), c)| ((j, d - i - j), c.clone()));
    Ok(BivarPoly::new(Poly2::from_terms(f.field(), terms), Chart::Local))
}

/// Inverse of [`chart_convert`]: `g~(x, y) = x^d g(y/x, 1/x)`.
pub fn chart_convert_inverse(g: &BivarPoly, d: u32) -> Result<BivarPoly> {
    if g.chart != Chart::Local {
        return Err(Error::validation("expected a local polynomial"));
    }
    if g.degree() > d {
        return Err(Error::domain(format!("degree {} exceeds d = {d}", g.degree())));
    }
    let terms = g.poly.terms().map(|(&(a, b), c)| ((d - a - b, a), c.clone()));
    Ok(BivarPoly::new(Poly2::from_terms(g.field(), terms), Chart::Affine))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    use crate::hn_model::build::*;
    use crate::hn_model::DEFAULT_PRIME;

    fn p(s: &str) -> BivarPoly {
        BivarPoly::parse(s, Field::Q, Chart::Local).unwrap()
    }

    #[test]
    fn parser() {
        assert_eq!(p("v^2 - u^3").to_string(), "-u^3 + v^2");
        assert_eq!(p("(u+v)^2 - 2*u*v").to_string(), "u^2 + v^2");
        assert_eq!(p("1/2*u").to_string(), "1/2*u");
        let t = BivarPoly::parse("terms:\n0 2 1\n3 0 -1\n", Field::Q, Chart::Local).unwrap();
        assert_eq!(t, p("v^2-u^3"));
        assert!(BivarPoly::parse("u + w", Field::Q, Chart::Local).is_err());
        assert!(BivarPoly::parse("u / v", Field::Q, Chart::Local).is_err());
        let fp = BivarPoly::parse("-1", Field::Fp(7), Chart::Local).unwrap();
        assert_eq!(fp.poly.coeff(0, 0), Some(&Field::Fp(7).int(6)));
    }

    #[test]
    fn substitution_examples() {
        assert_eq!(value_substitution(&w1(0), &p("v^2 - u^3")).unwrap(), ValElem::int(6));
        assert_eq!(value_substitution(&m_adic(), &p("u + v")).unwrap(), ValElem::int(1));
        assert_eq!(value_substitution(&w1(4), &p("v")).unwrap(), ValElem::int(2));
        assert!(matches!(
            value_substitution(&w1(0), &p("0")),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn proximity_examples() {
        assert_eq!(multiplicities(&w1(0), &p("v^2 - u^3")).unwrap(), vec![2, 1, 1]);
        assert_eq!(value_proximity(&w1(0), &p("v^2 - u^3")).unwrap(), 6);
        assert_eq!(value_proximity(&m_adic(), &p("u + v")).unwrap(), 1);
        let w3 = w3([0, 5, 0, 0]);
        assert_eq!(multiplicities(&w3, &p("v")).unwrap(), vec![1, 1, 0, 0]);
        assert_eq!(value_proximity(&w3, &p("v")).unwrap(), 2);
    }

    #[test]
    fn normalized_examples() {
        assert_eq!(value_normalized(&w1(0), &p("v^2 - u^3")).unwrap(), Real::int(3));
        assert_eq!(value_normalized(&m_adic(), &p("u - 3*v")).unwrap(), Real::int(1));
        assert_eq!(value_normalized(&w3([0, 5, 0, 0]), &p("v")).unwrap(), Real::int(2));
    }

    #[test]
    fn oracles_agree_on_fp() {
        let f = Field::Fp(DEFAULT_PRIME);
        let hn = divisorial(vec![free0(&[0, 3]), free(2, &[1, 2]), power(2)]).map_field(f);
        let g = BivarPoly::parse("v^2 - u^3 + 5*u*v^2", f, Chart::Local).unwrap();
        assert_eq!(
            value_substitution(&hn, &g).unwrap(),
            ValElem::int(value_proximity(&hn, &g).unwrap())
        );
    }

    #[test]
    fn irrational_limits() {
        let mut hn = w1(0);
        hn.terminal = Terminal::Irrational {
            tail: ContFrac::parse("[1;(2)]").unwrap(),
        };
        let v = p("v");
        let exact = value_normalized(&hn, &v).unwrap();
        let iv = value_irrational_by_limit(&hn, &v, &LimitOpts::default()).unwrap();
        assert!(iv.contains(&exact), "{exact} not in [{}, {}]", iv.lo, iv.hi);
        let iu = value_irrational_by_limit(&hn, &p("u"), &LimitOpts::default()).unwrap();
        assert_eq!((iu.lo.clone(), iu.hi.clone()), (Rat::one(), Rat::one()));
        let ic = value_irrational_by_limit(&hn, &p("7"), &LimitOpts::default()).unwrap();
        assert!(ic.lo.is_zero() && ic.hi.is_zero());
    }

    #[test]
    fn charts() {
        let a = |s| BivarPoly::parse(s, Field::Q, Chart::Affine).unwrap();
        assert_eq!(chart_convert(&a("y"), 1).unwrap(), p("u"));
        assert_eq!(chart_convert(&a("1"), 1).unwrap(), p("v"));
        assert_eq!(chart_convert(&a("x"), 1).unwrap(), p("1"));
        assert!(matches!(chart_convert(&a("x^2"), 1), Err(Error::Domain(_))));
        let f = a("x^2 - 3*x*y + y^3 + 1");
        assert_eq!(chart_convert_inverse(&chart_convert(&f, 4).unwrap(), 4).unwrap(), f);
    }
}
