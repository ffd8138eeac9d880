//! Vanishing sequences by exact elimination, `mu_d`, and unibranch `h^0`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::evaluation::invariant_units;
use crate::exactnum::{rat_floor, valelem_cmp, Rat, Real, ValElem};
use crate::hn_model::{parametrize_trunc, value_trunc, Coeff, Field, HNExpansion, ParamEq, Terminal};
use crate::invariants;
use crate::minimality;
use crate::poly::Poly2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VanishingSequence {
    pub d: u32,
    /// Ascending; one entry per monomial of degree at most `d`.
    pub values: Vec<ValElem>,
}

impl VanishingSequence {
    pub fn max(&self) -> &ValElem {
        self.values.last().expect("at least the constants")
    }
}

type Row = BTreeMap<usize, Coeff>;

/// Row echelon builder; a row's pivot is its smallest column.
struct Echelon {
    field: Field,
    pivots: BTreeMap<usize, Row>,
}

impl Echelon {
    fn new(field: Field) -> Echelon {
        Echelon {
            field,
            pivots: BTreeMap::new(),
        }
    }

    fn normalize(&self, row: &mut Row) {
        match self.field {
            Field::Q => primitive(row),
            Field::Fp(_) => {
                let inv = row.values().next().expect("nonzero").inv().expect("field");
                for c in row.values_mut() {
                    *c = &*c * &inv;
                }
            }
        }
    }

    /// Reduces and stores `row`; returns its pivot, or `None` if dependent.
    fn insert(&mut self, mut row: Row) -> Option<usize> {
        loop {
            let (&key, lead) = row.iter().next()?;
            let Some(p) = self.pivots.get(&key) else {
                self.normalize(&mut row);
                self.pivots.insert(key, row);
                return Some(key);
            };
            let plead = &p[&key];
            // fraction-free: row <- plead*row - lead*p
            let (sr, sp) = (plead.clone(), lead.clone());
            let mut next = Row::new();
            for (&c, x) in &row {
                let v = &sr * x;
                if !v.is_zero() {
                    next.insert(c, v);
                }
            }
            for (&c, y) in p {
                let t = &sp * y;
                let v = match next.get(&c) {
                    Some(x) => x - &t,
                    None => -&t,
                };
                if v.is_zero() {
                    next.remove(&c);
                } else {
                    next.insert(c, v);
                }
            }
            if !next.is_empty() {
                self.normalize(&mut next);
            }
            row = next;
        }
    }
}

/// Scales a rational row to coprime integers with a positive lead.
fn primitive(row: &mut Row) {
    let mut l = BigInt::one();
    for c in row.values() {
        l = l.lcm(c.as_rat().expect("Q").denom());
    }
    let mut g = BigInt::zero();
    for c in row.values() {
        let n = c.as_rat().expect("Q").numer() * (&l / c.as_rat().expect("Q").denom());
        g = g.gcd(&n);
    }
    let lead_neg = row.values().next().is_some_and(|c| c.is_negative());
    let mut f = Rat::new(l, g);
    if lead_neg {
        f = -f;
    }
    if f.is_one() {
        return;
    }
    for c in row.values_mut() {
        *c = Coeff::Q(c.as_rat().expect("Q") * &f);
    }
}

fn monomial_images(par: &ParamEq, d: u32) -> Vec<Poly2> {
    let cap = par.cap;
    let mut upow = vec![Poly2::constant(par.u.field().one())];
    let mut vpow = upow.clone();
    for e in 0..d as usize {
        upow.push(upow[e].mul_trunc(&par.u, cap));
        vpow.push(vpow[e].mul_trunc(&par.v, cap));
    }
    let mut out = Vec::new();
    for tot in 0..=d as usize {
        for i in 0..=tot {
            out.push(upow[i].mul_trunc(&vpow[tot - i], cap));
        }
    }
    out
}

/// Values of a basis of polynomials of degree `<= d` adapted to the
/// valuation filtration, by row reduction of the monomial images.
pub fn vanishing_sequence(hn: &HNExpansion, d: u32) -> Result<VanishingSequence> {
    if hn.terminal == Terminal::Curve {
        return Err(Error::Capability("vanishing sequences need a valuation, not a curve".into()));
    }
    let total = invariants::value_sequence(hn)?.iter().sum::<i64>() as u64;
    // divisorial values of degree-d polynomials never exceed d * sum m_i
    let safe = (hn.terminal == Terminal::Divisorial).then_some(d as u64 * total + 1);
    let mut bound = (total + 1).min(safe.unwrap_or(u64::MAX));
    loop {
        if let Some(mut values) = reduce(hn, d, bound)? {
            values.sort_by(|a, b| valelem_cmp(a, b).expect("shared gamma"));
            return Ok(VanishingSequence { d, values });
        }
        if safe.is_some_and(|s| bound >= s) || bound > MAX_BOUND {
            return Err(Error::Capability(
                "monomial images became dependent; truncation too small".into(),
            ));
        }
        bound = (bound * 2).min(safe.unwrap_or(u64::MAX));
    }
}

const MAX_BOUND: u64 = 1 << 40;

/// Pivot values of the reduced monomial images, `None` unless every pivot
/// is exact at this bound.
fn reduce(hn: &HNExpansion, d: u32, bound: u64) -> Result<Option<Vec<ValElem>>> {
    let par = parametrize_trunc(hn, Some(value_trunc(hn, bound)))?;
    let limit = Real::int(bound as i64);
    let images = monomial_images(&par, d);
    let keys: BTreeSet<(u32, u32)> = images.iter().flat_map(|p| p.terms().map(|(k, _)| *k)).collect();
    let mut keys: Vec<(u32, u32)> = keys.into_iter().collect();
    // divisorial order is lexicographic (t first, then z), already the BTreeSet order
    if par.gamma().is_some() {
        keys.sort_by(|a, b| par.cmp_monomials(*a, *b));
    }
    let index: BTreeMap<(u32, u32), usize> = keys.iter().enumerate().map(|(n, k)| (*k, n)).collect();
    let mut ech = Echelon::new(hn.field);
    let mut values = Vec::with_capacity(images.len());
    for img in &images {
        let row: Row = img.terms().map(|(k, c)| (index[k], c.clone())).collect();
        let Some(piv) = ech.insert(row) else {
            return Ok(None);
        };
        let (i, j) = keys[piv];
        let v = par.monomial_value(i, j);
        if v.real() > limit {
            return Ok(None);
        }
        values.push(v);
    }
    Ok(Some(values))
}

pub fn mu_d(hn: &HNExpansion, d: u32) -> Result<ValElem> {
    Ok(vanishing_sequence(hn, d)?.max().clone())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpperRule {
    /// `mu_hat <= beta_1` when `beta_1^2 >= beta_last`.
    Beta1,
    /// `mu_hat <= beta_0 * min(A)`.
    MinA(i64),
}

/// Bracket for `mu_hat` in the units of the maximal contact values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MuHatReport {
    pub per_degree: Vec<(u32, Real)>,
    pub lower: Real,
    pub lower_at: u32,
    /// Holds for very general members of the graph's family only.
    pub upper: Option<(Real, UpperRule)>,
    pub exact: Option<Real>,
}

fn upper_bound(b: &invariants::InvariantBundle) -> Option<(Real, UpperRule)> {
    if b.class != crate::hn_model::ValuationClass::Divisorial || b.is_m_adic() || b.maxcontact.len() < 2 {
        return None;
    }
    let b0 = b.beta0();
    let b1 = b.maxcontact[1].as_rat()?.clone();
    let last = b.last_mcv().as_rat()?.clone();
    if &b1 * &b1 < last {
        return None;
    }
    let top: i64 = rat_floor(&(&b1 / Rat::from_integer(b0.into()))).try_into().ok()?;
    let min_a = (1..=top).find(|&a| Rat::from_integer((a * a * b0 * b0).into()) >= last);
    Some(match min_a {
        Some(a) => (Real::int(b0 * a), UpperRule::MinA(a)),
        None => (Real::Rat(b1), UpperRule::Beta1),
    })
}

pub fn mu_hat_report(hn: &HNExpansion, d_max: u32) -> Result<MuHatReport> {
    if d_max == 0 {
        return Err(Error::domain("d_max must be at least 1"));
    }
    let bundle = invariants::compute(hn)?;
    let mut per_degree = Vec::new();
    for d in 1..=d_max {
        let m = invariant_units(hn, &mu_d(hn, d)?)?;
        per_degree.push((d, m));
    }
    let (mut lower, mut lower_at) = (Real::zero(), 1);
    for (d, m) in &per_degree {
        let q = m.scale(&Rat::new(1.into(), (*d).into()));
        if q > lower {
            lower = q;
            lower_at = *d;
        }
    }
    let exact = if bundle.is_m_adic() {
        Some(Real::one())
    } else if hn.terminal == Terminal::Divisorial {
        minimality::npi_test(hn)?.map(|w| minimality::mu_hat_npi(&w))
    } else {
        None
    };
    Ok(MuHatReport {
        per_degree,
        lower,
        lower_at,
        upper: upper_bound(&bundle),
        exact,
    })
}

/// `(d+1)(d+2)/2 - sum r_p (r_p + 1)/2`, unclamped.
pub fn expected_dim(d: u32, r: &[u32]) -> i64 {
    let d = d as i64;
    (d + 1) * (d + 2) / 2 - r.iter().map(|&x| x as i64 * (x as i64 + 1) / 2).sum::<i64>()
}

/// `dim {f : deg f <= d, nu(f) >= alpha}` (with zero).
pub fn h0_unibranch(hn: &HNExpansion, d: u32, alpha: &ValElem) -> Result<usize> {
    let seq = vanishing_sequence(hn, d)?;
    let mut n = 0;
    for v in &seq.values {
        if valelem_cmp(v, alpha)? != Ordering::Less {
            n += 1;
        }
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::ContFrac;
    use crate::hn_model::build::*;
    use crate::hn_model::DEFAULT_PRIME;

    fn ints(v: &VanishingSequence) -> Vec<i64> {
        v.values.iter().map(|x| x.p).collect()
    }

    #[test]
    fn sequences() {
        assert_eq!(ints(&vanishing_sequence(&m_adic(), 2).unwrap()), vec![0, 1, 1, 2, 2, 2]);
        assert_eq!(ints(&vanishing_sequence(&w1(7), 1).unwrap()), vec![0, 2, 3]);
        assert_eq!(ints(&vanishing_sequence(&w3([0, 5, 0, 0]), 1).unwrap()), vec![0, 1, 2]);
        let fp = w1(7).map_field(Field::Fp(DEFAULT_PRIME));
        assert_eq!(ints(&vanishing_sequence(&fp, 1).unwrap()), vec![0, 2, 3]);
    }

    #[test]
    fn mu_examples() {
        assert_eq!(mu_d(&w3([0, 5, 0, 0]), 3).unwrap(), ValElem::int(6));
        for d in 1..=4 {
            assert_eq!(mu_d(&m_adic(), d).unwrap(), ValElem::int(d as i64));
        }
        assert_eq!(mu_d(&w1(7), 2).unwrap(), ValElem::int(6));
    }

    #[test]
    fn mu_hat_examples() {
        let r = mu_hat_report(&w3([0, 5, 0, 0]), 3).unwrap();
        assert_eq!(r.exact, Some(Real::int(2)));
        assert_eq!((r.lower.clone(), r.lower_at), (Real::int(2), 1));
        let r = mu_hat_report(&w1(7), 2).unwrap();
        assert_eq!((r.lower.clone(), r.lower_at), (Real::int(3), 1));
        assert_eq!(r.upper, Some((Real::int(3), UpperRule::Beta1)));
        assert_eq!(r.exact, None);
        assert_eq!(mu_hat_report(&m_adic(), 1).unwrap().exact, Some(Real::one()));
    }

    #[test]
    fn h0_examples() {
        assert_eq!(expected_dim(2, &[2, 1, 1]), 1);
        assert_eq!(expected_dim(1, &[1, 1]), 1);
        assert_eq!(expected_dim(1, &[2]), 0);
        assert_eq!(h0_unibranch(&w1(7), 1, &ValElem::int(4)).unwrap(), 0);
        assert_eq!(h0_unibranch(&w1(7), 1, &ValElem::int(3)).unwrap(), 1);
        assert_eq!(h0_unibranch(&w3([1, 2, 3, 4]), 3, &ValElem::int(0)).unwrap(), 10);
    }

    #[test]
    fn irrational_sequence() {
        let mut hn = w1(0);
        hn.terminal = crate::hn_model::Terminal::Irrational {
            tail: ContFrac::parse("[1;(2)]").unwrap(),
        };
        let s = vanishing_sequence(&hn, 2).unwrap();
        assert_eq!(s.values.len(), 6);
        // u = X, v = X*Y: values 0, g, 1+g, 2g, 1+2g, 2+2g
        let q: Vec<(i64, i64)> = s.values.iter().map(|v| (v.p, v.q)).collect();
        assert_eq!(q, vec![(0, 0), (0, 1), (1, 1), (0, 2), (1, 2), (2, 2)]);
    }
}
