//! Sequence of values, Puiseux exponents, characteristic sequence, maximal
//! contact values and volumes.
//!
//! Divisorial data uses the valuation itself. Irrational data is scaled so
//! that `e_g = nu(w_{s_g}) = 1`; then `beta_bar_{g+1} = N + 1/gamma` is a
//! quadratic irrational and everything before it is an integer.
//!
//! The m-adic valuation is the special case `g = -1` with `beta_bar = (1)`.

use std::collections::BTreeSet;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::exactnum::{cf_eval, rat, rint, ContFrac, Real};
use crate::hn_model::{HNExpansion, ValuationClass};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantBundle {
    pub class: ValuationClass,
    pub g: i32,
    pub m: Vec<i64>,
    /// `beta'_0 = 1, ..., beta'_{g+1}`; a divisorial `beta'_{g+1} = 1` is left out.
    pub puiseux: Vec<Real>,
    pub charseq: Vec<Real>,
    pub maxcontact: Vec<Real>,
    pub eseq: Vec<i64>,
    pub nseq: Vec<i64>,
    pub vol_inv: Real,
    pub vol_inv_normalized: Real,
}

impl InvariantBundle {
    /// Maximal contact values as integers (divisorial valuations).
    pub fn maxcontact_int(&self) -> Option<Vec<i64>> {
        self.maxcontact
            .iter()
            .map(|x| {
                x.as_rat()
                    .filter(|r| r.is_integer())
                    .and_then(|r| num_traits::ToPrimitive::to_i64(r.numer()))
            })
            .collect()
    }

    pub fn beta0(&self) -> i64 {
        self.eseq[0]
    }

    pub fn last_mcv(&self) -> &Real {
        self.maxcontact.last().expect("nonempty")
    }

    pub fn is_m_adic(&self) -> bool {
        self.g < 0
    }
}

fn unsupported(hn: &HNExpansion) -> Result<()> {
    if hn.classify() == ValuationClass::Curve {
        return Err(Error::Capability(
            "unsupported class for invariants: curve expansions are anchors only; use vdelta".into(),
        ));
    }
    Ok(())
}

/// `{m_i}`: each `nu(w_i)` repeated `h_i` times. Irrational expansions give
/// the prefix through row `s_g`.
pub fn value_sequence(hn: &HNExpansion) -> Result<Vec<i64>> {
    unsupported(hn)?;
    let r = hn.row_values();
    Ok(r.iter()
        .enumerate()
        .flat_map(|(i, &x)| std::iter::repeat_n(x, hn.rows[i].h() as usize))
        .collect())
}

fn block_cf(hn: &HNExpansion, s: &[usize], k: &[u32], j: usize) -> ContFrac {
    let first = hn.rows[s[j]].h() - k[j] + 1;
    let mut q = vec![first as u64];
    for i in s[j] + 1..s[j + 1] {
        q.push(hn.rows[i].h() as u64);
    }
    q.push(k[j + 1] as u64);
    ContFrac::finite(q)
}

pub fn puiseux_exponents(hn: &HNExpansion) -> Result<Vec<Real>> {
    Ok(compute(hn)?.puiseux)
}

/// `(charseq, maxcontact, eseq, nseq)`.
pub type CharData = (Vec<Real>, Vec<Real>, Vec<i64>, Vec<i64>);

pub fn char_and_maxcontact(hn: &HNExpansion) -> Result<CharData> {
    let b = compute(hn)?;
    Ok((b.charseq, b.maxcontact, b.eseq, b.nseq))
}

pub fn compute(hn: &HNExpansion) -> Result<InvariantBundle> {
    unsupported(hn)?;
    hn.check()?;
    let class = hn.classify();
    if hn.is_m_adic() {
        let one = Real::one();
        return Ok(InvariantBundle {
            class,
            g: -1,
            m: vec![1],
            puiseux: vec![one.clone()],
            charseq: vec![one.clone()],
            maxcontact: vec![one.clone()],
            eseq: vec![1],
            nseq: vec![1],
            vol_inv: one.clone(),
            vol_inv_normalized: one,
        });
    }
    let sh = hn.shape();
    let r = hn.row_values();
    let g = sh.g as usize;
    let inv_gamma = match &sh.gamma_cf {
        Some(cf) => Some(cf_eval(cf)?.recip()?),
        None => None,
    };
    let e: Vec<i64> = sh.s.iter().map(|&i| r[i]).collect();
    let mut n = vec![1i64];
    for j in 1..=g {
        n.push(e[j - 1] / e[j]);
    }
    let next_value = |j: usize| -> Real {
        let i = sh.s[j] + 1;
        if i < r.len() {
            Real::int(r[i])
        } else {
            inv_gamma.clone().unwrap_or_else(Real::zero)
        }
    };
    let mut mc = vec![Real::int(e[0])];
    let mut cs = vec![Real::int(e[0])];
    for j in 0..=g {
        let h = hn.rows[sh.s[j]].h() as i64;
        let step = next_value(j).add_rat(&rint((h - sh.k[j] as i64) * e[j]));
        mc.push(mc[j].scale(&rint(n[j])) + step.clone());
        cs.push(&cs[j] + &step);
    }
    let mut puiseux = vec![Real::one()];
    for j in 0..g {
        puiseux.push(cf_eval(&block_cf(hn, &sh.s, &sh.k, j))?);
    }
    let c = hn.rows[sh.s[g]].h() as i64 - sh.k[g] as i64 + 1;
    match &inv_gamma {
        Some(ig) => puiseux.push(ig.add_rat(&rint(c))),
        None if c != 1 => puiseux.push(Real::int(c)),
        None => {}
    }
    let vol_inv = mc.last().expect("nonempty").clone();
    let vol_inv_normalized = vol_inv.scale(&rat(1, e[0] * e[0]));
    Ok(InvariantBundle {
        class,
        g: g as i32,
        m: value_sequence(hn)?,
        puiseux,
        charseq: cs,
        maxcontact: mc,
        eseq: e,
        nseq: n,
        vol_inv,
        vol_inv_normalized,
    })
}

/// `beta'_{j+1} = (beta_bar_{j+1} - n_j beta_bar_j)/e_j + 1` for `0 <= j <= g`.
pub fn eq_delta_check(b: &InvariantBundle) -> bool {
    if b.g < 0 {
        return true;
    }
    let g = b.g as usize;
    if b.maxcontact.len() != g + 2 || b.eseq.len() != g + 1 || b.nseq.len() != g + 1 {
        return false;
    }
    (0..=g).all(|j| {
        let lhs = b.puiseux.get(j + 1).cloned().unwrap_or_else(Real::one);
        let rhs = (&b.maxcontact[j + 1] - &b.maxcontact[j].scale(&rint(b.nseq[j])))
            .scale(&rat(1, b.eseq[j]))
            .add_rat(&rint(1));
        lhs == rhs
    })
}

/// `(vol_inv, vol_inv / beta_bar_0^2)`.
pub fn volumes(b: &InvariantBundle) -> (Real, Real) {
    (b.vol_inv.clone(), b.vol_inv_normalized.clone())
}

pub fn semigroup_generators(b: &InvariantBundle) -> Result<BTreeSet<i64>> {
    if b.class != ValuationClass::Divisorial {
        return Err(Error::domain("semigroup generators need a divisorial valuation"));
    }
    Ok(b.maxcontact_int().expect("integral").into_iter().collect())
}

/// Structural consistency: gcd chain, `n_j`, growth of `beta_bar` and, for
/// divisorial data, Noether's identity. Returns the failed checks.
pub fn consistency_report(b: &InvariantBundle) -> Vec<String> {
    let mut bad = Vec::new();
    if b.g < 0 {
        return bad;
    }
    let g = b.g as usize;
    let ints: Vec<i64> = b.maxcontact[..=g]
        .iter()
        .map(|x| {
            num_traits::ToPrimitive::to_i64(x.as_rat().expect("integral").numer()).expect("small")
        })
        .collect();
    let mut gcd = 0i64;
    for (j, x) in ints.iter().enumerate() {
        gcd = gcd.gcd(x);
        if gcd != b.eseq[j] {
            bad.push(format!("e_{j} = {} but gcd = {gcd}", b.eseq[j]));
        }
        if j > 0 && b.nseq[j] * b.eseq[j] != b.eseq[j - 1] {
            bad.push(format!("n_{j} e_{j} != e_{}", j - 1));
        }
    }
    // a satellite defining divisor closes with beta_bar_{g+1} = n_g beta_bar_g
    let satellite_end = b.class == ValuationClass::Divisorial && b.puiseux.len() == g + 1;
    for j in 0..=g {
        let prev = b.maxcontact[j].scale(&rint(b.nseq[j]));
        let ok = if j == g && satellite_end {
            b.maxcontact[j + 1] == prev
        } else {
            b.maxcontact[j + 1] > prev
        };
        if !ok {
            bad.push(format!("beta_bar_{} against n_{j} beta_bar_{j}", j + 1));
        }
    }
    if b.class == ValuationClass::Divisorial {
        let sq: i64 = b.m.iter().map(|x| x * x).sum();
        if *b.last_mcv() != Real::int(sq) {
            bad.push(format!("Noether: beta_bar_last = {} but sum m^2 = {sq}", b.last_mcv()));
        }
        if *b.eseq.last().expect("nonempty") != 1 {
            bad.push("e_g != 1".into());
        }
    }
    if !eq_delta_check(b) {
        bad.push("Puiseux/maximal-contact relation fails".into());
    }
    bad
}
