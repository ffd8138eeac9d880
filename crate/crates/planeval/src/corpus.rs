//! Deterministic random expansions and polynomials for test suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::evaluation::BivarPoly;
use crate::exactnum::ContFrac;
use crate::hn_model::{sample_coeff, Field, HNExpansion, HNRow, Terminal};
use crate::poly::Poly2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassMix {
    Divisorial,
    Irrational,
    /// Roughly two divisorial cases for each irrational one.
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusSpec {
    pub count: usize,
    pub max_rows: usize,
    pub max_h: u32,
    pub class: ClassMix,
    pub field: Field,
    pub seed: u64,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec {
            count: 100,
            max_rows: 4,
            max_h: 3,
            class: ClassMix::Mixed,
            field: Field::Q,
            seed: 7,
        }
    }
}

fn free_row(rng: &mut ChaCha8Rng, field: Field, k: u32, h: u32, first: bool) -> HNRow {
    let coeffs = (k..=h).map(|l| sample_coeff(rng, field, !first && l == k)).collect();
    HNRow::Free { k, h, coeffs }
}

fn random_tail(rng: &mut ChaCha8Rng) -> ContFrac {
    let pre = (0..rng.random_range(0..=2)).map(|_| rng.random_range(1..=3)).collect();
    let period = (0..rng.random_range(1..=2)).map(|_| rng.random_range(1..=3)).collect();
    ContFrac::periodic(pre, period)
}

/// One valid expansion; the last stored row is free for irrational cases.
pub fn random_hn(rng: &mut ChaCha8Rng, spec: &CorpusSpec, irrational: bool) -> HNExpansion {
    let f = spec.field;
    let max_h = spec.max_h.max(1);
    loop {
        let n = rng.random_range(1..=spec.max_rows.max(1));
        let h0 = rng.random_range(1..=max_h);
        let mut rows = vec![free_row(rng, f, 1, h0, true)];
        for i in 1..n {
            let last = i + 1 == n;
            let want_free = if last { irrational || rng.random_bool(0.5) } else { rng.random_bool(0.5) };
            if want_free {
                let k = rng.random_range(2..=max_h.max(2));
                let lo = if last && !irrational { k + 1 } else { k };
                let h = rng.random_range(lo..=lo + max_h - 1);
                rows.push(free_row(rng, f, k, h, false));
            } else {
                let lo = if last { 2 } else { 1 };
                rows.push(HNRow::Power {
                    h: rng.random_range(lo..=max_h.max(lo)),
                });
            }
        }
        let terminal = if irrational {
            Terminal::Irrational { tail: random_tail(rng) }
        } else {
            Terminal::Divisorial
        };
        let hn = HNExpansion::new(f, rows, terminal);
        if hn.check().is_ok() {
            return hn;
        }
    }
}

pub fn generate(spec: &CorpusSpec) -> Vec<HNExpansion> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    (0..spec.count)
        .map(|_| {
            let irrational = match spec.class {
                ClassMix::Divisorial => false,
                ClassMix::Irrational => true,
                ClassMix::Mixed => rng.random_range(0..3) == 0,
            };
            random_hn(&mut rng, spec, irrational)
        })
        .collect()
}

/// Nonzero local polynomial of degree at most `max_deg` with up to `terms` terms.
pub fn random_poly(rng: &mut ChaCha8Rng, field: Field, max_deg: u32, terms: usize) -> BivarPoly {
    loop {
        let mut p = Poly2::zero(field);
        for _ in 0..terms.max(1) {
            let tot = rng.random_range(0..=max_deg);
            let i = rng.random_range(0..=tot);
            p.add_term(i, tot - i, sample_coeff(rng, field, true));
        }
        if !p.is_zero() {
            return BivarPoly::local(p);
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hn_model::write_hn;

    #[test]
    fn deterministic() {
        let spec = CorpusSpec::default();
        let a: Vec<String> = generate(&spec).iter().map(write_hn).collect();
        let b: Vec<String> = generate(&spec).iter().map(write_hn).collect();
        assert_eq!(a, b);
        assert!(generate(&spec).iter().all(|h| h.check().is_ok()));
    }

    #[test]
    fn class_and_row_limits() {
        let irr = CorpusSpec { class: ClassMix::Irrational, ..CorpusSpec::default() };
        assert!(generate(&irr)
            .iter()
            .all(|h| matches!(&h.terminal, Terminal::Irrational { tail } if tail.period.is_some())));
        let one = CorpusSpec { max_rows: 1, class: ClassMix::Divisorial, ..CorpusSpec::default() };
        assert!(generate(&one).iter().all(|h| h.rows.len() == 1));
    }
}
