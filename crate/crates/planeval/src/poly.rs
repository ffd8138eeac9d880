//! Sparse bivariate polynomials with exact coefficients.

use std::collections::BTreeMap;
use std::fmt;

use crate::hn_model::{Coeff, Field};

/// Drops every term with `wx*i + wy*j >= cap`. Nonnegative weights make
/// truncated products exact below the cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Trunc {
    pub wx: u64,
    pub wy: u64,
    pub cap: u64,
}

impl Trunc {
    /// Cap on the X-exponent alone.
    pub fn x(cap: u32) -> Trunc {
        Trunc { wx: 1, wy: 0, cap: cap as u64 }
    }

    pub fn keeps(&self, i: u32, j: u32) -> bool {
        self.wx * u64::from(i) + self.wy * u64::from(j) < self.cap
    }

    pub fn doubled(&self) -> Trunc {
        Trunc { cap: self.cap.saturating_mul(2), ..*self }
    }
}

fn keeps(t: Option<Trunc>, i: u32, j: u32) -> bool {
    t.is_none_or(|t| t.keeps(i, j))
}

/// `sum c_{ij} X^i Y^j`; zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly2 {
    field: Field,
    terms: BTreeMap<(u32, u32), Coeff>,
}

impl Poly2 {
    pub fn zero(field: Field) -> Poly2 {
        Poly2 {
            field,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: Coeff) -> Poly2 {
        Poly2::monomial(c, 0, 0)
    }

    pub fn monomial(c: Coeff, i: u32, j: u32) -> Poly2 {
        let mut p = Poly2::zero(c.field());
        p.add_term(i, j, c);
        p
    }

    pub fn x(field: Field) -> Poly2 {
        Poly2::monomial(field.one(), 1, 0)
    }

    pub fn y(field: Field) -> Poly2 {
        Poly2::monomial(field.one(), 0, 1)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &Coeff)> {
        self.terms.iter()
    }

    pub fn coeff(&self, i: u32, j: u32) -> Option<&Coeff> {
        self.terms.get(&(i, j))
    }

    pub fn add_term(&mut self, i: u32, j: u32, c: Coeff) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&(i, j)) {
            Some(old) => {
                let s = &*old + &c;
                if s.is_zero() {
                    self.terms.remove(&(i, j));
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert((i, j), c);
            }
        }
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|(i, j)| i + j).max()
    }

    /// Order at the origin (lowest total degree).
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(|(i, j)| i + j).min()
    }

    pub fn add(&self, other: &Poly2) -> Poly2 {
        let mut r = self.clone();
        for (&(i, j), c) in &other.terms {
            r.add_term(i, j, c.clone());
        }
        r
    }

    pub fn neg(&self) -> Poly2 {
        Poly2 {
            field: self.field,
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Poly2) -> Poly2 {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Coeff) -> Poly2 {
        let mut r = Poly2::zero(self.field);
        for (&(i, j), a) in &self.terms {
            r.add_term(i, j, a * c);
        }
        r
    }

    pub fn mul(&self, other: &Poly2) -> Poly2 {
        self.mul_trunc(other, None)
    }

    /// Product dropping the terms `cap` rejects.
    pub fn mul_trunc(&self, other: &Poly2, cap: Option<Trunc>) -> Poly2 {
        let mut r = Poly2::zero(self.field);
        for (&(i1, j1), a) in &self.terms {
            if !keeps(cap, i1, j1) {
                continue;
            }
            for (&(i2, j2), b) in &other.terms {
                if keeps(cap, i1 + i2, j1 + j2) {
                    r.add_term(i1 + i2, j1 + j2, a * b);
                }
            }
        }
        r
    }

    pub fn truncate(&self, cap: Trunc) -> Poly2 {
        Poly2 {
            field: self.field,
            terms: self
                .terms
                .iter()
                .filter(|((i, j), _)| cap.keeps(*i, *j))
                .map(|(k, c)| (*k, c.clone()))
                .collect(),
        }
    }

    pub fn pow_trunc(&self, e: u32, cap: Option<Trunc>) -> Poly2 {
        let mut r = Poly2::constant(self.field.one());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul_trunc(&base, cap);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_trunc(&base, cap);
            }
        }
        r
    }

    /// Exchanges the roles of X and Y.
    pub fn swap_xy(&self) -> Poly2 {
        Poly2 {
            field: self.field,
            terms: self.terms.iter().map(|(&(i, j), c)| ((j, i), c.clone())).collect(),
        }
    }

    /// Evaluates `self(p, q)` by powers of the arguments.
    pub fn compose(&self, p: &Poly2, q: &Poly2, cap: Option<Trunc>) -> Poly2 {
        let max_i = self.terms.keys().map(|k| k.0).max().unwrap_or(0);
        let max_j = self.terms.keys().map(|k| k.1).max().unwrap_or(0);
        let mut pp = vec![Poly2::constant(self.field.one())];
        for k in 0..max_i {
            pp.push(pp[k as usize].mul_trunc(p, cap));
        }
        let mut qq = vec![Poly2::constant(self.field.one())];
        for k in 0..max_j {
            qq.push(qq[k as usize].mul_trunc(q, cap));
        }
        let mut r = Poly2::zero(self.field);
        for (&(i, j), c) in &self.terms {
            let t = pp[i as usize].mul_trunc(&qq[j as usize], cap).scale(c);
            r = r.add(&t);
        }
        r
    }

    pub fn map_field(&self, f: impl Fn(&Coeff) -> Coeff, field: Field) -> Poly2 {
        let mut r = Poly2::zero(field);
        for (&(i, j), c) in &self.terms {
            r.add_term(i, j, f(c));
        }
        r
    }

    pub fn from_terms(field: Field, terms: impl IntoIterator<Item = ((u32, u32), Coeff)>) -> Poly2 {
        let mut r = Poly2::zero(field);
        for ((i, j), c) in terms {
            r.add_term(i, j, c);
        }
        r
    }

    /// Renders with the given variable names, highest total degree first.
    pub fn render(&self, xn: &str, yn: &str) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut keys: Vec<_> = self.terms.keys().copied().collect();
        keys.sort_by(|a, b| (b.0 + b.1).cmp(&(a.0 + a.1)).then(b.cmp(a)));
        let mut out = String::new();
        for (n, (i, j)) in keys.into_iter().enumerate() {
            let c = &self.terms[&(i, j)];
            let neg = c.is_negative();
            let mag = if neg { -c } else { c.clone() };
            if n == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut factors = Vec::new();
            if !mag.is_one() || (i == 0 && j == 0) {
                factors.push(mag.to_string());
            }
            for (name, e) in [(xn, i), (yn, j)] {
                match e {
                    0 => {}
                    1 => factors.push(name.to_string()),
                    e => factors.push(format!("{name}^{e}")),
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }
}

impl fmt::Display for Poly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("X", "Y"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_render() {
        let f = Field::Q;
        let x = Poly2::x(f);
        let y = Poly2::y(f);
        let p = y.mul(&y).sub(&x.pow_trunc(3, None));
        assert_eq!(p.render("u", "v"), "-u^3 + v^2");
        assert_eq!(p.order(), Some(2));
        assert_eq!(p.degree(), Some(3));
        let c = p.compose(&x.mul(&x), &x.pow_trunc(3, None), None);
        assert!(c.is_zero());
        assert_eq!(p.mul_trunc(&x, Some(Trunc::x(3))).len(), 1);
    }
}
