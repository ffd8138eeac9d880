use std::cmp::Ordering;

use crate::error::{Error, Result};
use num_traits::ToPrimitive;

use crate::exactnum::{valelem_cmp, Rat, Real, ValElem};
use crate::poly::{Poly2, Trunc};

use super::{HNExpansion, HNRow, Terminal};

/// How monomials `X^i Y^j` of a parametrization are weighted.
///
/// Divisorial: `X = t = w_L`, `Y = z = w_{L+1}`, weight `i`.
/// Irrational: `X = w_{s_g} = t^gamma`, `Y = w_{s_g+1} = t`, weight `j + i*gamma`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Weight {
    Divisorial,
    Irrational { gamma: Real },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamEq {
    pub u: Poly2,
    pub v: Poly2,
    pub weight: Weight,
    /// Truncation applied while building; terms it keeps are exact.
    pub cap: Option<Trunc>,
}

impl ParamEq {
    pub fn monomial_value(&self, i: u32, j: u32) -> ValElem {
        match &self.weight {
            Weight::Divisorial => ValElem::int(i as i64),
            Weight::Irrational { gamma } => ValElem::new(j as i64, i as i64, Some(gamma.clone())),
        }
    }

    pub fn cmp_monomials(&self, a: (u32, u32), b: (u32, u32)) -> Ordering {
        match &self.weight {
            Weight::Divisorial => a.cmp(&b),
            Weight::Irrational { .. } => {
                valelem_cmp(&self.monomial_value(a.0, a.1), &self.monomial_value(b.0, b.1))
                    .expect("shared gamma")
            }
        }
    }

    /// Least weight over the support, `None` for the zero series.
    pub fn order(&self, p: &Poly2) -> Option<ValElem> {
        let mut best: Option<(u32, u32)> = None;
        for (&k, _) in p.terms() {
            best = match best {
                None => Some(k),
                Some(b) if self.cmp_monomials(k, b) == Ordering::Less => Some(k),
                b => b,
            };
        }
        best.map(|(i, j)| self.monomial_value(i, j))
    }

    pub fn gamma(&self) -> Option<&Real> {
        match &self.weight {
            Weight::Irrational { gamma } => Some(gamma),
            Weight::Divisorial => None,
        }
    }
}

pub fn parametrize(hn: &HNExpansion) -> Result<ParamEq> {
    parametrize_trunc(hn, None)
}

/// Denominator of the rational lower bound of `gamma` used for weighted caps.
const GAMMA_DEN: u64 = 64;

/// Truncation keeping every term of value below `bound` (units of
/// [`ParamEq::monomial_value`]). Irrational weights use a lower bound of
/// `gamma`, so a term is kept whenever its exact value is below `bound`.
pub fn value_trunc(hn: &HNExpansion, bound: u64) -> Trunc {
    match hn.gamma() {
        Some(g) if matches!(hn.terminal, Terminal::Irrational { .. }) => {
            let wx = g
                .scale(&Rat::from_integer(GAMMA_DEN.into()))
                .floor()
                .to_u64()
                .expect("gamma is positive and small");
            Trunc {
                wx,
                wy: GAMMA_DEN,
                cap: bound.saturating_mul(GAMMA_DEN),
            }
        }
        _ => Trunc::x(u32::try_from(bound).unwrap_or(u32::MAX)),
    }
}

/// Backward substitution through the rows, dropping the terms `cap` rejects.
pub fn parametrize_trunc(hn: &HNExpansion, cap: Option<Trunc>) -> Result<ParamEq> {
    let weight = match hn.terminal {
        Terminal::Divisorial => Weight::Divisorial,
        Terminal::Irrational { .. } => Weight::Irrational {
            gamma: hn.gamma().expect("irrational tail"),
        },
        Terminal::Curve => {
            return Err(Error::Capability(
                "curve expansions have no finite parametrization; use them as vdelta anchors".into(),
            ))
        }
    };
    let f = hn.field;
    let last = hn.shape().last;
    let mut cur = Poly2::x(f);
    let mut nxt = Poly2::y(f);
    for i in (0..=last).rev() {
        let row = &hn.rows[i];
        let h = row.h();
        let mut prev = cur.pow_trunc(h, cap).mul_trunc(&nxt, cap);
        if let HNRow::Free { k, .. } = row {
            let mut pw = cur.pow_trunc(*k, cap);
            for l in *k..=h {
                let c = row.coeff_at(l, f);
                if !c.is_zero() {
                    prev = prev.add(&pw.scale(&c));
                }
                if l < h {
                    pw = pw.mul_trunc(&cur, cap);
                }
            }
        }
        nxt = cur;
        cur = prev;
    }
    // after row 0: cur = w_{-1} = v, nxt = w_0 = u
    Ok(ParamEq {
        u: nxt,
        v: cur,
        weight,
        cap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::ContFrac;
    use crate::hn_model::build::*;

    #[test]
    fn w1_parametrization() {
        let p = parametrize(&w1(0)).unwrap();
        assert_eq!(p.u.render("t", "z"), "t^2*z");
        assert_eq!(p.v.render("t", "z"), "t^3*z");
        let p = parametrize(&w1(5)).unwrap();
        assert_eq!(p.v.render("t", "z"), "t^3*z + 5*t^2*z");
        assert_eq!(p.order(&p.v), Some(ValElem::int(2)));
    }

    #[test]
    fn m_adic_parametrization() {
        let p = parametrize(&m_adic()).unwrap();
        assert_eq!(p.u.render("t", "z"), "t");
        assert_eq!(p.v.render("t", "z"), "t*z");
    }

    #[test]
    fn irrational_parametrization() {
        let mut hn = w1(0);
        hn.terminal = Terminal::Irrational {
            tail: ContFrac::parse("[1;(2)]").unwrap(),
        };
        let p = parametrize(&hn).unwrap();
        // folded: only row 0 remains, v = u w_1 with u = X, w_1 = Y
        assert_eq!(p.u.render("X", "Y"), "X");
        assert_eq!(p.v.render("X", "Y"), "X*Y");
        let ou = p.order(&p.u).unwrap();
        assert_eq!((ou.p, ou.q), (0, 1));
    }

    #[test]
    fn curve_is_unsupported() {
        let hn = HNExpansion::new(crate::hn_model::Field::Q, vec![free0(&[0])], Terminal::Curve);
        assert!(matches!(parametrize(&hn), Err(Error::Capability(_))));
    }
}
