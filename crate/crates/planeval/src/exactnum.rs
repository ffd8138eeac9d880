//! Exact rationals, real quadratic irrationals, continued fractions and
//! elements of the value group `Z + Z*gamma`.
//!
//! Nothing in here touches floating point. Comparisons of `a + b*sqrt(d)`
//! go through sign-by-squaring.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Rat = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumError {
    #[error("malformed continued fraction: {0}")]
    MalformedCf(String),
    #[error("value {0} is below 1")]
    BelowOne(String),
    #[error("cannot mix sqrt({0}) and sqrt({1}) in one expression")]
    RadicandMismatch(BigInt, BigInt),
    #[error("value-group elements use different gamma")]
    GammaMismatch,
    #[error("division by zero")]
    DivByZero,
    #[error("partial quotient too large: {0}")]
    Overflow(String),
    #[error("cannot parse {what} from {text:?}")]
    Parse { what: &'static str, text: String },
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rint(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Largest integer <= x.
pub fn rat_floor(x: &Rat) -> BigInt {
    x.numer().div_floor(x.denom())
}

pub fn rat_ceil(x: &Rat) -> BigInt {
    -((-x.numer()).div_floor(x.denom()))
}

/// Splits `n > 0` as `s^2 * r` with `r` squarefree, returning `(s, r)`.
///
/// Plain trial division. Radicands here come from discriminants and
/// numerator-denominator products of desk-sized rationals, so this is fine.
pub fn squarefree_split(n: &BigInt) -> (BigInt, BigInt) {
    assert!(n.is_positive(), "squarefree_split needs a positive integer");
    let mut rest = n.clone();
    let mut s = BigInt::one();
    let mut r = BigInt::one();
    let mut p = BigInt::from(2u32);
    while &p * &p <= rest {
        let mut e = 0u32;
        while (&rest % &p).is_zero() {
            rest /= &p;
            e += 1;
        }
        for _ in 0..e / 2 {
            s *= &p;
        }
        if e % 2 == 1 {
            r *= &p;
        }
        p += if p == BigInt::from(2u32) { 1u32 } else { 2u32 };
    }
    r *= rest;
    (s, r)
}

/// `a + b*sqrt(d)` with `b != 0` and `d > 1` squarefree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadIrr {
    a: Rat,
    b: Rat,
    d: BigInt,
}

impl QuadIrr {
    /// Canonicalizes; collapses to a rational when the radical vanishes.
    #[allow(clippy::new_ret_no_self)]
    pub fn new(a: Rat, b: Rat, d: BigInt) -> Real {
        if b.is_zero() {
            return Real::Rat(a);
        }
        assert!(d.is_positive(), "radicand must be positive");
        let (s, r) = squarefree_split(&d);
        let b = b * Rat::from_integer(s);
        if r.is_one() {
            Real::Rat(a + b)
        } else {
            Real::Quad(QuadIrr { a, b, d: r })
        }
    }

    pub fn a(&self) -> &Rat {
        &self.a
    }

    pub fn b(&self) -> &Rat {
        &self.b
    }

    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn conj(&self) -> QuadIrr {
        QuadIrr {
            a: self.a.clone(),
            b: -self.b.clone(),
            d: self.d.clone(),
        }
    }

    pub fn norm(&self) -> Rat {
        &self.a * &self.a - &self.b * &self.b * Rat::from_integer(self.d.clone())
    }
}

/// Sign of `a + b*sqrt(d)` for `d >= 0`.
pub fn sign_ab(a: &Rat, b: &Rat, d: &BigInt) -> Ordering {
    let sa = a.cmp(&Rat::zero());
    let sb = b.cmp(&Rat::zero());
    match (sa, sb) {
        (Ordering::Equal, _) => sb,
        (_, Ordering::Equal) => sa,
        (x, y) if x == y => x,
        _ => {
            let a2 = a * a;
            let b2d = b * b * Rat::from_integer(d.clone());
            // |a| vs |b|*sqrt(d) decides; the larger magnitude carries its sign
            match a2.cmp(&b2d) {
                Ordering::Greater => sa,
                Ordering::Less => sb,
                Ordering::Equal => Ordering::Equal,
            }
        }
    }
}

/// Sign of `alpha + beta*sqrt(d) + gamma*sqrt(f)`.
fn sign_two_radicals(alpha: &Rat, beta: &Rat, d: &BigInt, gamma: &Rat, f: &BigInt) -> Ordering {
    let zero = Rat::zero();
    let sp = match (beta.cmp(&zero), gamma.cmp(&zero)) {
        (Ordering::Equal, sg) => sg,
        (sb, Ordering::Equal) => sb,
        (sb, sg) if sb == sg => sb,
        (sb, _) => {
            let l = beta * beta * Rat::from_integer(d.clone());
            let r = gamma * gamma * Rat::from_integer(f.clone());
            match l.cmp(&r) {
                Ordering::Greater => sb,
                Ordering::Less => sb.reverse(),
                Ordering::Equal => Ordering::Equal,
            }
        }
    };
    let sa = alpha.cmp(&zero);
    if sp == Ordering::Equal {
        return sa;
    }
    if sa == Ordering::Equal || sa == sp {
        return sp;
    }
    // alpha^2 - P^2 = alpha^2 - beta^2 d - gamma^2 f - 2 beta gamma sqrt(df)
    let c0 = alpha * alpha
        - beta * beta * Rat::from_integer(d.clone())
        - gamma * gamma * Rat::from_integer(f.clone());
    let c1 = -(beta * gamma * rint(2));
    let df = d * f;
    let (s, r) = squarefree_split(&df);
    let c1 = c1 * Rat::from_integer(s);
    match sign_ab(&c0, &c1, &r) {
        Ordering::Greater => sa,
        Ordering::Less => sp,
        Ordering::Equal => Ordering::Equal,
    }
}

/// A rational or a real quadratic irrational.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Real {
    Rat(Rat),
    Quad(QuadIrr),
}

impl Real {
    pub fn int(n: i64) -> Real {
        Real::Rat(rint(n))
    }

    pub fn zero() -> Real {
        Real::int(0)
    }

    pub fn one() -> Real {
        Real::int(1)
    }

    pub fn sqrt_rat(x: &Rat) -> Result<Real, NumError> {
        if x.is_negative() {
            return Err(NumError::Parse {
                what: "square root of a non-negative rational",
                text: x.to_string(),
            });
        }
        if x.is_zero() {
            return Ok(Real::zero());
        }
        // sqrt(p/q) = sqrt(pq)/q
        let pq = x.numer() * x.denom();
        Ok(QuadIrr::new(
            Rat::zero(),
            Rat::new(BigInt::one(), x.denom().clone()),
            pq,
        ))
    }

    fn parts(&self) -> (Rat, Rat, Option<BigInt>) {
        match self {
            Real::Rat(r) => (r.clone(), Rat::zero(), None),
            Real::Quad(q) => (q.a.clone(), q.b.clone(), Some(q.d.clone())),
        }
    }

    pub fn radicand(&self) -> Option<&BigInt> {
        match self {
            Real::Rat(_) => None,
            Real::Quad(q) => Some(&q.d),
        }
    }

    pub fn as_rat(&self) -> Option<&Rat> {
        match self {
            Real::Rat(r) => Some(r),
            Real::Quad(_) => None,
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Real::Rat(_))
    }

    pub fn signum(&self) -> Ordering {
        match self {
            Real::Rat(r) => r.cmp(&Rat::zero()),
            Real::Quad(q) => sign_ab(&q.a, &q.b, &q.d),
        }
    }

    fn common(&self, other: &Real) -> Result<Option<BigInt>, NumError> {
        match (self.radicand(), other.radicand()) {
            (Some(x), Some(y)) if x != y => Err(NumError::RadicandMismatch(x.clone(), y.clone())),
            (Some(x), _) | (_, Some(x)) => Ok(Some(x.clone())),
            _ => Ok(None),
        }
    }

    fn build(a: Rat, b: Rat, d: Option<BigInt>) -> Real {
        match d {
            None => Real::Rat(a),
            Some(d) => QuadIrr::new(a, b, d),
        }
    }

    pub fn try_add(&self, other: &Real) -> Result<Real, NumError> {
        let d = self.common(other)?;
        let (a1, b1, _) = self.parts();
        let (a2, b2, _) = other.parts();
        Ok(Real::build(a1 + a2, b1 + b2, d))
    }

    pub fn try_sub(&self, other: &Real) -> Result<Real, NumError> {
        self.try_add(&-other.clone())
    }

    pub fn try_mul(&self, other: &Real) -> Result<Real, NumError> {
        let d = self.common(other)?;
        let (a1, b1, _) = self.parts();
        let (a2, b2, _) = other.parts();
        let dd = d.clone().map(Rat::from_integer).unwrap_or_else(Rat::zero);
        let a = &a1 * &a2 + &b1 * &b2 * dd;
        let b = a1 * b2 + b1 * a2;
        Ok(Real::build(a, b, d))
    }

    pub fn recip(&self) -> Result<Real, NumError> {
        match self {
            Real::Rat(r) => {
                if r.is_zero() {
                    Err(NumError::DivByZero)
                } else {
                    Ok(Real::Rat(r.recip()))
                }
            }
            Real::Quad(q) => {
                // norm is nonzero: sqrt(d) is irrational
                let n = q.norm();
                Ok(QuadIrr::new(&q.a / &n, -(&q.b / &n), q.d.clone()))
            }
        }
    }

    pub fn try_div(&self, other: &Real) -> Result<Real, NumError> {
        self.try_mul(&other.recip()?)
    }

    pub fn scale(&self, k: &Rat) -> Real {
        let (a, b, d) = self.parts();
        Real::build(a * k, b * k, d)
    }

    pub fn add_rat(&self, k: &Rat) -> Real {
        let (a, b, d) = self.parts();
        Real::build(a + k, b, d)
    }

    /// Largest integer not exceeding the value.
    pub fn floor(&self) -> BigInt {
        match self {
            Real::Rat(r) => rat_floor(r),
            Real::Quad(q) => {
                let b2d = &q.b * &q.b * Rat::from_integer(q.d.clone());
                let s = rat_floor(&b2d).sqrt();
                let est = if q.b.is_positive() {
                    rat_floor(&q.a) + &s
                } else {
                    rat_floor(&q.a) - &s - BigInt::one()
                };
                // the true floor sits within a couple of units of est
                let mut c = est - BigInt::from(2);
                loop {
                    let next = &c + BigInt::one();
                    let diff = self.add_rat(&-Rat::from_integer(next.clone()));
                    if diff.signum() == Ordering::Less {
                        return c;
                    }
                    c = next;
                }
            }
        }
    }

    pub fn ceil(&self) -> BigInt {
        -(-self.clone()).floor()
    }

    /// Decimal rendering truncated toward zero, `digits` places.
    pub fn approx(&self, digits: u32) -> String {
        let scale = BigInt::from(10u32).pow(digits);
        let neg = self.signum() == Ordering::Less;
        let mag = if neg { -self.clone() } else { self.clone() };
        let scaled = mag.scale(&Rat::from_integer(scale.clone())).floor();
        let (ip, fp) = scaled.div_rem(&scale);
        let frac = format!("{:0>width$}", fp.to_string(), width = digits as usize);
        let sign = if neg { "-" } else { "" };
        format!("{sign}{ip}.{frac}")
    }

    pub fn parse(text: &str) -> Result<Real, NumError> {
        let mut p = ExprParser {
            chars: text.chars().filter(|c| !c.is_whitespace()).collect(),
            pos: 0,
            src: text,
        };
        let v = p.expr()?;
        if p.pos != p.chars.len() {
            return Err(p.fail());
        }
        Ok(v)
    }
}

impl Ord for Real {
    fn cmp(&self, other: &Real) -> Ordering {
        match (self.radicand(), other.radicand()) {
            (Some(x), Some(y)) if x != y => {
                let (a1, b1, d1) = self.parts();
                let (a2, b2, d2) = other.parts();
                sign_two_radicals(&(a1 - a2), &b1, &d1.unwrap(), &-b2, &d2.unwrap())
            }
            _ => self.try_sub(other).expect("shared radicand").signum(),
        }
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Real) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        match self {
            Real::Rat(r) => Real::Rat(-r),
            Real::Quad(q) => Real::Quad(QuadIrr {
                a: -q.a,
                b: -q.b,
                d: q.d,
            }),
        }
    }
}

macro_rules! real_binop {
    ($tr:ident, $m:ident, $f:ident) => {
        impl $tr for Real {
            type Output = Real;
            /// # Panics
            /// When the operands carry different radicands.
            fn $m(self, rhs: Real) -> Real {
                self.$f(&rhs).expect("quadratic arithmetic")
            }
        }
        impl<'a> $tr<&'a Real> for &'a Real {
            type Output = Real;
            fn $m(self, rhs: &'a Real) -> Real {
                self.$f(rhs).expect("quadratic arithmetic")
            }
        }
    };
}

real_binop!(Add, add, try_add);
real_binop!(Sub, sub, try_sub);
real_binop!(Mul, mul, try_mul);
real_binop!(Div, div, try_div);

impl From<Rat> for Real {
    fn from(r: Rat) -> Real {
        Real::Rat(r)
    }
}

impl From<i64> for Real {
    fn from(n: i64) -> Real {
        Real::int(n)
    }
}

fn fmt_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for QuadIrr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let babs = self.b.abs();
        let rad = if babs.is_one() {
            format!("sqrt({})", self.d)
        } else {
            format!("{}*sqrt({})", fmt_rat(&babs), self.d)
        };
        if self.a.is_zero() {
            if self.b.is_negative() {
                write!(f, "-{rad}")
            } else {
                write!(f, "{rad}")
            }
        } else {
            let op = if self.b.is_negative() { '-' } else { '+' };
            write!(f, "{} {} {}", fmt_rat(&self.a), op, rad)
        }
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Real::Rat(r) => f.write_str(&fmt_rat(r)),
            Real::Quad(q) => q.fmt(f),
        }
    }
}

/// Renders a rational as `p` or `p/q`.
pub fn rat_text(r: &Rat) -> String {
    fmt_rat(r)
}

pub fn parse_rat(text: &str) -> Result<Rat, NumError> {
    let t = text.trim();
    let err = || NumError::Parse {
        what: "rational",
        text: text.to_string(),
    };
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| err())?;
    let d: BigInt = d.parse().map_err(|_| err())?;
    if d.is_zero() {
        return Err(NumError::DivByZero);
    }
    Ok(Rat::new(n, d))
}

struct ExprParser<'a> {
    chars: Vec<char>,
    pos: usize,
    src: &'a str,
}

impl ExprParser<'_> {
    fn fail(&self) -> NumError {
        NumError::Parse {
            what: "real number",
            text: self.src.to_string(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Real, NumError> {
        let mut v = self.term()?;
        while let Some(c) = self.peek() {
            if c == '+' || c == '-' {
                self.pos += 1;
                let t = self.term()?;
                v = if c == '+' { v.try_add(&t)? } else { v.try_sub(&t)? };
            } else {
                break;
            }
        }
        Ok(v)
    }

    fn term(&mut self) -> Result<Real, NumError> {
        let mut v = self.unary()?;
        while let Some(c) = self.peek() {
            if c == '*' || c == '/' {
                self.pos += 1;
                let t = self.unary()?;
                v = if c == '*' { v.try_mul(&t)? } else { v.try_div(&t)? };
            } else {
                break;
            }
        }
        Ok(v)
    }

    fn unary(&mut self) -> Result<Real, NumError> {
        if self.peek() == Some('-') {
            self.pos += 1;
            return Ok(-self.unary()?);
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Real, NumError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.fail());
                }
                self.pos += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
                let s: String = self.chars[start..self.pos].iter().collect();
                let n: BigInt = s.parse().map_err(|_| self.fail())?;
                Ok(Real::Rat(Rat::from_integer(n)))
            }
            Some('s') => {
                let word: String = self.chars[self.pos..].iter().take(5).collect();
                if word != "sqrt(" {
                    return Err(self.fail());
                }
                self.pos += 5;
                let inner = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.fail());
                }
                self.pos += 1;
                match inner {
                    Real::Rat(r) => Real::sqrt_rat(&r).map_err(|_| self.fail()),
                    Real::Quad(_) => Err(self.fail()),
                }
            }
            _ => Err(self.fail()),
        }
    }
}

/// Simple continued fraction `[a0; a1, ..., (p1, ..., pk)]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ContFrac {
    pub preperiod: Vec<u64>,
    pub period: Option<Vec<u64>>,
}

impl ContFrac {
    pub fn finite(q: Vec<u64>) -> ContFrac {
        ContFrac {
            preperiod: q,
            period: None,
        }
    }

    pub fn periodic(pre: Vec<u64>, period: Vec<u64>) -> ContFrac {
        ContFrac {
            preperiod: pre,
            period: Some(period),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.period.is_none()
    }

    pub fn check(&self) -> Result<(), NumError> {
        if let Some(p) = &self.period {
            if p.is_empty() {
                return Err(NumError::MalformedCf("empty period".into()));
            }
            if p.contains(&0) {
                return Err(NumError::MalformedCf("period contains 0".into()));
            }
        } else if self.preperiod.is_empty() {
            return Err(NumError::MalformedCf("no partial quotients".into()));
        }
        if self.preperiod.iter().skip(1).any(|&a| a == 0) {
            return Err(NumError::MalformedCf("zero partial quotient".into()));
        }
        if self.preperiod.first() == Some(&0) {
            return Err(NumError::MalformedCf("leading quotient must be at least 1".into()));
        }
        Ok(())
    }

    /// Shortest period, then shortest preperiod.
    pub fn canonical(&self) -> ContFrac {
        let Some(p) = &self.period else {
            return self.clone();
        };
        let n = p.len();
        let d = (1..=n)
            .find(|&d| n % d == 0 && (0..n).all(|i| p[i] == p[i % d]))
            .unwrap_or(n);
        let mut period = p[..d].to_vec();
        let mut pre = self.preperiod.clone();
        while pre.last().is_some() && pre.last() == period.last() {
            pre.pop();
            period.rotate_right(1);
        }
        ContFrac::periodic(pre, period)
    }

    /// Partial quotient at position `i` (unrolling the period).
    pub fn quotient(&self, i: usize) -> Option<u64> {
        if i < self.preperiod.len() {
            return Some(self.preperiod[i]);
        }
        let p = self.period.as_ref()?;
        Some(p[(i - self.preperiod.len()) % p.len()])
    }

    /// Drops the leading quotient, returning the continued fraction of the
    /// remainder `1/(x - a0)`.
    pub fn tail(&self) -> Option<ContFrac> {
        if self.preperiod.len() > 1 || (self.preperiod.len() == 1 && self.period.is_some()) {
            return Some(ContFrac {
                preperiod: self.preperiod[1..].to_vec(),
                period: self.period.clone(),
            });
        }
        if self.preperiod.is_empty() {
            let p = self.period.as_ref()?;
            return Some(ContFrac {
                preperiod: p[1..].to_vec(),
                period: Some(p.clone()),
            });
        }
        None
    }

    /// Prepends partial quotients.
    pub fn prepend(&self, front: &[u64]) -> ContFrac {
        let mut pre = front.to_vec();
        pre.extend_from_slice(&self.preperiod);
        ContFrac {
            preperiod: pre,
            period: self.period.clone(),
        }
    }

    /// First `n` convergents `p_i/q_i`.
    pub fn convergents(&self, n: usize) -> Vec<Rat> {
        let (mut p0, mut q0) = (BigInt::one(), BigInt::zero());
        let (mut p1, mut q1) = (BigInt::zero(), BigInt::one());
        let mut out = Vec::new();
        for i in 0..n {
            let Some(a) = self.quotient(i) else { break };
            let a = BigInt::from(a);
            let p = &a * &p0 + &p1;
            let q = &a * &q0 + &q1;
            out.push(Rat::new(p.clone(), q.clone()));
            p1 = std::mem::replace(&mut p0, p);
            q1 = std::mem::replace(&mut q0, q);
        }
        out
    }

    pub fn parse(text: &str) -> Result<ContFrac, NumError> {
        let err = || NumError::Parse {
            what: "continued fraction",
            text: text.to_string(),
        };
        let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let inner = t
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(err)?;
        let (head, period) = match inner.find('(') {
            Some(i) => {
                let per = inner[i..]
                    .strip_prefix('(')
                    .and_then(|s| s.strip_suffix(')'))
                    .ok_or_else(err)?;
                (&inner[..i], Some(per))
            }
            None => (inner, None),
        };
        let head = head.trim_end_matches([',', ';']);
        let mut pre = Vec::new();
        if !head.is_empty() {
            let (a0, rest) = match head.split_once(';') {
                Some((a, r)) => (a, Some(r)),
                None => (head, None),
            };
            pre.push(a0.parse::<u64>().map_err(|_| err())?);
            if let Some(rest) = rest {
                for x in rest.split(',').filter(|x| !x.is_empty()) {
                    pre.push(x.parse::<u64>().map_err(|_| err())?);
                }
            }
        }
        let period = match period {
            Some(p) => Some(
                p.split(',')
                    .map(|x| x.parse::<u64>().map_err(|_| err()))
                    .collect::<Result<Vec<_>, _>>()?,
            ),
            None => None,
        };
        let cf = ContFrac {
            preperiod: pre,
            period,
        };
        cf.check()?;
        Ok(cf)
    }
}

impl fmt::Display for ContFrac {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[u64]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        f.write_str("[")?;
        if let Some((a0, rest)) = self.preperiod.split_first() {
            write!(f, "{a0}")?;
            if !rest.is_empty() || self.period.is_some() {
                f.write_str(";")?;
            }
            f.write_str(&join(rest))?;
            if !rest.is_empty() && self.period.is_some() {
                f.write_str(",")?;
            }
        }
        if let Some(p) = &self.period {
            write!(f, "({})", join(p))?;
        }
        f.write_str("]")
    }
}

/// Möbius map `x -> (p x + p') / (q x + q')` for a block of quotients.
fn block_matrix(qs: &[u64]) -> [BigInt; 4] {
    let mut m = [BigInt::one(), BigInt::zero(), BigInt::zero(), BigInt::one()];
    for &a in qs {
        let a = BigInt::from(a);
        // m * [[a, 1], [1, 0]]
        let n = [
            &m[0] * &a + &m[1],
            m[0].clone(),
            &m[2] * &a + &m[3],
            m[2].clone(),
        ];
        m = n;
    }
    m
}

fn apply_block(m: &[BigInt; 4], y: &Real) -> Real {
    let num = y.scale(&Rat::from_integer(m[0].clone())).add_rat(&Rat::from_integer(m[1].clone()));
    let den = y.scale(&Rat::from_integer(m[2].clone())).add_rat(&Rat::from_integer(m[3].clone()));
    num.try_div(&den).expect("denominator of a convergent map is positive")
}

/// Exact value of a continued fraction.
pub fn cf_eval(cf: &ContFrac) -> Result<Real, NumError> {
    cf.check()?;
    match &cf.period {
        None => {
            let mut it = cf.preperiod.iter().rev();
            let mut x = Rat::from_integer(BigInt::from(*it.next().expect("checked nonempty")));
            for &a in it {
                x = Rat::from_integer(BigInt::from(a)) + x.recip();
            }
            Ok(Real::Rat(x))
        }
        Some(per) => {
            // y = (P y + P') / (Q y + Q')  =>  Q y^2 + (Q' - P) y - P' = 0
            let m = block_matrix(per);
            let qa = Rat::from_integer(m[2].clone());
            let qb = Rat::from_integer(&m[3] - &m[0]);
            let qc = Rat::from_integer(-m[1].clone());
            let disc = &qb * &qb - rint(4) * &qa * &qc;
            let two_a = rint(2) * &qa;
            let root = Real::sqrt_rat(&disc)?
                .scale(&two_a.recip())
                .add_rat(&(-qb / &two_a));
            let pre = block_matrix(&cf.preperiod);
            Ok(apply_block(&pre, &root))
        }
    }
}

/// Continued fraction of a rational `x >= 1`, ending in a quotient `>= 2`
/// whenever it has more than one term.
pub fn cf_of_rat(x: &Rat) -> Result<ContFrac, NumError> {
    if x < &rint(1) {
        return Err(NumError::BelowOne(fmt_rat(x)));
    }
    let mut n = x.numer().clone();
    let mut d = x.denom().clone();
    let mut q = Vec::new();
    while !d.is_zero() {
        let (a, r) = n.div_rem(&d);
        q.push(a.to_u64().ok_or_else(|| NumError::Overflow(a.to_string()))?);
        n = d;
        d = r;
    }
    Ok(ContFrac::finite(q))
}

/// Continued fraction of any `x >= 1` (periodic for quadratic irrationals).
pub fn cf_of_real(x: &Real) -> Result<ContFrac, NumError> {
    match x {
        Real::Rat(r) => cf_of_rat(r),
        Real::Quad(_) => {
            if x < &Real::one() {
                return Err(NumError::BelowOne(x.to_string()));
            }
            let mut seen: HashMap<Real, usize> = HashMap::new();
            let mut qs = Vec::new();
            let mut cur = x.clone();
            loop {
                if let Some(&start) = seen.get(&cur) {
                    let period = qs[start..].to_vec();
                    qs.truncate(start);
                    return Ok(ContFrac::periodic(qs, period));
                }
                seen.insert(cur.clone(), qs.len());
                let a = cur.floor();
                qs.push(a.to_u64().ok_or_else(|| NumError::Overflow(a.to_string()))?);
                cur = cur.add_rat(&-Rat::from_integer(a)).recip()?;
            }
        }
    }
}

/// Element `p + q*gamma` of the value group.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ValElem {
    pub p: i64,
    pub q: i64,
    pub gamma: Option<Real>,
}

impl ValElem {
    pub fn int(p: i64) -> ValElem {
        ValElem {
            p,
            q: 0,
            gamma: None,
        }
    }

    pub fn new(p: i64, q: i64, gamma: Option<Real>) -> ValElem {
        ValElem { p, q, gamma }
    }

    pub fn real(&self) -> Real {
        match &self.gamma {
            Some(g) if self.q != 0 => g.scale(&rint(self.q)).add_rat(&rint(self.p)),
            _ => Real::int(self.p),
        }
    }

    fn compatible(&self, other: &ValElem) -> Result<Option<Real>, NumError> {
        match (&self.gamma, &other.gamma) {
            (Some(a), Some(b)) if a != b => {
                if self.q == 0 && other.q == 0 {
                    Ok(None)
                } else {
                    Err(NumError::GammaMismatch)
                }
            }
            (Some(a), _) | (_, Some(a)) => Ok(Some(a.clone())),
            (None, None) => Ok(None),
        }
    }

    pub fn checked_add(&self, other: &ValElem) -> Result<ValElem, NumError> {
        let g = self.compatible(other)?;
        if g.is_none() && (self.q != 0 || other.q != 0) {
            return Err(NumError::GammaMismatch);
        }
        Ok(ValElem {
            p: self.p + other.p,
            q: self.q + other.q,
            gamma: g,
        })
    }

    pub fn times(&self, k: i64) -> ValElem {
        ValElem {
            p: self.p * k,
            q: self.q * k,
            gamma: self.gamma.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.p == 0 && self.q == 0
    }
}

/// Exact comparison of value-group elements.
pub fn valelem_cmp(x: &ValElem, y: &ValElem) -> Result<Ordering, NumError> {
    let g = x.compatible(y)?;
    let dq = x.q - y.q;
    let dp = x.p - y.p;
    if dq == 0 {
        return Ok(dp.cmp(&0));
    }
    let g = match g {
        Some(g) => g,
        None => return Err(NumError::GammaMismatch),
    };
    Ok(g.scale(&rint(dq)).add_rat(&rint(dp)).signum())
}

impl fmt::Display for ValElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q == 0 {
            return write!(f, "{}", self.p);
        }
        match (self.p, self.q) {
            (0, 1) => write!(f, "gamma"),
            (0, q) => write!(f, "{q}*gamma"),
            (p, 1) => write!(f, "{p}+gamma"),
            (p, q) if q < 0 => write!(f, "{p}{q}*gamma"),
            (p, q) => write!(f, "{p}+{q}*gamma"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Real {
        Real::parse(s).unwrap()
    }

    #[test]
    fn canonical_forms() {
        let c = |s: &str| ContFrac::parse(s).unwrap().canonical().to_string();
        assert_eq!(c("[3;2,(1,1)]"), "[3;2,(1)]");
        assert_eq!(c("[1;2,(2)]"), "[1;(2)]");
        assert_eq!(c("[1;2,1,(2,1)]"), "[(1,2)]");
        assert_eq!(c("[2;3]"), "[2;3]");
    }

    #[test]
    fn eval_examples() {
        assert_eq!(cf_eval(&ContFrac::parse("[1;2]").unwrap()).unwrap(), r("3/2"));
        assert_eq!(
            cf_eval(&ContFrac::parse("[1;(1)]").unwrap()).unwrap(),
            r("(1+sqrt(5))/2")
        );
        assert_eq!(cf_eval(&ContFrac::parse("[2;3,4]").unwrap()).unwrap(), r("30/13"));
        assert_eq!(cf_eval(&ContFrac::parse("[1;(2)]").unwrap()).unwrap(), r("sqrt(2)"));
        assert_eq!(cf_eval(&ContFrac::parse("[(1)]").unwrap()).unwrap(), r("(1+sqrt(5))/2"));
    }

    #[test]
    fn zero_in_period_rejected() {
        let cf = ContFrac::periodic(vec![1], vec![0, 2]);
        assert!(matches!(cf_eval(&cf), Err(NumError::MalformedCf(_))));
    }

    #[test]
    fn of_rat_examples() {
        assert_eq!(cf_of_rat(&rat(3, 2)).unwrap().preperiod, vec![1, 2]);
        assert_eq!(cf_of_rat(&rint(4)).unwrap().preperiod, vec![4]);
        assert_eq!(cf_of_rat(&rat(30, 13)).unwrap().preperiod, vec![2, 3, 4]);
        assert!(cf_of_rat(&rat(1, 2)).is_err());
    }

    #[test]
    fn valelem_examples() {
        let phi = r("(1+sqrt(5))/2");
        let a = ValElem::new(0, 2, Some(phi.clone()));
        let b = ValElem::new(3, 0, Some(phi.clone()));
        assert_eq!(valelem_cmp(&a, &b).unwrap(), Ordering::Greater);
        assert_eq!(
            valelem_cmp(&ValElem::int(3), &ValElem::int(2)).unwrap(),
            Ordering::Greater
        );
        let c = ValElem::new(1, 1, Some(phi.clone()));
        assert_eq!(valelem_cmp(&c, &c.clone()).unwrap(), Ordering::Equal);
        let other = ValElem::new(0, 1, Some(r("sqrt(2)")));
        assert_eq!(valelem_cmp(&a, &other), Err(NumError::GammaMismatch));
    }

    #[test]
    fn periodic_cf_of_quadratic() {
        let cf = cf_of_real(&r("2 + sqrt(2)/2")).unwrap();
        assert_eq!(cf.to_string(), "[2;1,(2)]");
        let cf = cf_of_real(&r("sqrt(7)")).unwrap();
        assert_eq!(cf.to_string(), "[2;(1,1,1,4)]");
    }

    #[test]
    fn render_and_floor() {
        assert_eq!(r("(1+sqrt(5))/2").to_string(), "1/2 + 1/2*sqrt(5)");
        assert_eq!(r("-sqrt(8)").to_string(), "-2*sqrt(2)");
        assert_eq!(r("sqrt(2)").approx(12), "1.414213562373");
        assert_eq!(r("-sqrt(2)").approx(3), "-1.414");
        assert_eq!(r("-sqrt(2)").floor(), BigInt::from(-2));
        assert_eq!(r("100*sqrt(1111)/3333").approx(6), "1.000050");
    }

    #[test]
    fn mixed_radicand_order() {
        assert!(r("1+sqrt(2)") < r("sqrt(6)"));
        assert!(r("2-sqrt(2)") < r("sqrt(3)-1"));
        assert!(r("sqrt(2)") < r("sqrt(3)"));
        assert!(r("1+sqrt(2)") > r("sqrt(5)"));
    }

    #[test]
    fn tail_of_purely_periodic() {
        let cf = ContFrac::parse("[(1,2)]").unwrap();
        let t = cf.tail().unwrap();
        assert_eq!(t.quotient(0), Some(2));
        assert_eq!(t.quotient(1), Some(1));
        assert_eq!(t.quotient(2), Some(2));
    }
}
