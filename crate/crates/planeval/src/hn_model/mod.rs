//! Hamburger-Noether expansions: rows, validation, classification,
//! parametrization and coefficient sampling.
//!
//! Row `i` relates three consecutive variables. With `w_{-1} = v` and
//! `w_0 = u`:
//!
//! ```text
//! free   w_{i-1} = a_k w_i^k + ... + a_h w_i^h + w_i^h w_{i+1}
//! power  w_{i-1} = w_i^h w_{i+1}
//! ```
//!
//! Row 0 is always free with `k = 1`.

mod coeff;
mod format;
mod param;
mod sample;

pub use coeff::{is_prime, Coeff, Field, DEFAULT_PRIME};
pub use format::{parse_hn, write_hn};
pub use param::{parametrize, parametrize_trunc, value_trunc, ParamEq, Weight};
pub use sample::{sample_coeff, sample_very_general};

use std::fmt;

use crate::error::{Error, Result};
use crate::exactnum::{cf_eval, ContFrac, Real};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HNRow {
    /// Coefficients `a_k, ..., a_h` (so `h - k + 1` of them).
    Free { k: u32, h: u32, coeffs: Vec<Coeff> },
    Power { h: u32 },
}

impl HNRow {
    pub fn h(&self) -> u32 {
        match self {
            HNRow::Free { h, .. } | HNRow::Power { h } => *h,
        }
    }

    pub fn is_free(&self) -> bool {
        matches!(self, HNRow::Free { .. })
    }

    /// Coefficient multiplying `w_i^l`, zero below `k` and in power rows.
    pub fn coeff_at(&self, l: u32, field: Field) -> Coeff {
        match self {
            HNRow::Free { k, coeffs, .. } if l >= *k => coeffs
                .get((l - k) as usize)
                .cloned()
                .unwrap_or_else(|| field.zero()),
            _ => field.zero(),
        }
    }

    pub fn free(k: u32, coeffs: Vec<Coeff>) -> HNRow {
        let h = k + coeffs.len() as u32 - 1;
        HNRow::Free { k, h, coeffs }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Terminal {
    Divisorial,
    /// Partial quotients `h_{s_g+1}, h_{s_g+2}, ...` following any stored
    /// power rows after the last free row.
    Irrational { tail: ContFrac },
    /// The last free row is infinite; stored coefficients are a truncation.
    Curve,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ValuationClass {
    Divisorial,
    Irrational,
    Curve,
}

impl fmt::Display for ValuationClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ValuationClass::Divisorial => "divisorial",
            ValuationClass::Irrational => "irrational",
            ValuationClass::Curve => "curve",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HNExpansion {
    pub field: Field,
    pub rows: Vec<HNRow>,
    pub terminal: Terminal,
}

/// One violated rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub row: Option<usize>,
    pub rule: &'static str,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.row {
            Some(r) => write!(f, "row {r}: {} ({})", self.message, self.rule),
            None => write!(f, "{} ({})", self.message, self.rule),
        }
    }
}

/// Derived structural data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shape {
    pub class: ValuationClass,
    /// Indices `s_0 = 0, s_1, ..., s_g`. A power row closing a divisorial
    /// expansion is counted as `s_g` with `k_g = h`.
    pub s: Vec<usize>,
    pub k: Vec<u32>,
    /// `-1` for the m-adic valuation.
    pub g: i32,
    /// Last row taking part in the backward recursion.
    pub last: usize,
    /// Irrational only: `[h_{s_g+1}; h_{s_g+2}, ...]`.
    pub gamma_cf: Option<ContFrac>,
}

impl HNExpansion {
    pub fn new(field: Field, rows: Vec<HNRow>, terminal: Terminal) -> HNExpansion {
        HNExpansion {
            field,
            rows,
            terminal,
        }
    }

    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let mut diag = |row: Option<usize>, rule: &'static str, message: String| {
            out.push(Diagnostic { row, rule, message })
        };
        if let Err(e) = self.field.check() {
            diag(None, "field", e.to_string());
        }
        if self.rows.is_empty() {
            diag(None, "nonempty", "expansion has no rows".into());
            return out;
        }
        for (i, row) in self.rows.iter().enumerate() {
            match row {
                HNRow::Power { h } => {
                    if i == 0 {
                        diag(
                            Some(0),
                            "first-row-free",
                            "first row must express v through u; if u is given through v, swap u and v so that nu(u) <= nu(v)".into(),
                        );
                    }
                    if *h == 0 {
                        diag(Some(i), "positive-h", "h must be at least 1".into());
                    }
                }
                HNRow::Free { k, h, coeffs } => {
                    if i == 0 && *k != 1 {
                        diag(
                            Some(0),
                            "first-row-k",
                            format!("first row must start at a_01, got k={k}"),
                        );
                    }
                    if i > 0 && *k < 2 {
                        diag(Some(i), "k-at-least-2", format!("free row needs k >= 2, got {k}"));
                    }
                    if h < k || *h == 0 {
                        diag(Some(i), "h-at-least-k", format!("need h >= k, got h={h}, k={k}"));
                        continue;
                    }
                    if coeffs.len() as u32 != h - k + 1 {
                        diag(
                            Some(i),
                            "coefficient-count",
                            format!("expected {} coefficients, found {}", h - k + 1, coeffs.len()),
                        );
                        continue;
                    }
                    if coeffs.iter().any(|c| c.field() != self.field) {
                        diag(Some(i), "field", "coefficient outside the declared field".into());
                    }
                    if i > 0 && coeffs[0].is_zero() {
                        diag(
                            Some(i),
                            "nonzero-leading",
                            "zero leading coefficient a_{s_j k_j} on a free row".into(),
                        );
                    }
                }
            }
        }
        let last = self.rows.len() - 1;
        match &self.terminal {
            Terminal::Divisorial => match &self.rows[last] {
                HNRow::Power { h } if *h < 2 && last > 0 => diag(
                    Some(last),
                    "terminal-power",
                    "a closing power row needs h >= 2".into(),
                ),
                HNRow::Free { k, h, .. } if last > 0 && h == k => diag(
                    Some(last),
                    "terminal-free",
                    "a closing free row with h = k is a power row; write it as `power`".into(),
                ),
                _ => {}
            },
            Terminal::Irrational { tail } => {
                if let Err(e) = tail.check() {
                    diag(None, "tail", e.to_string());
                } else if tail.period.is_none() {
                    diag(
                        None,
                        "tail-periodic",
                        "irrational tail must be eventually periodic".into(),
                    );
                }
            }
            Terminal::Curve => {
                if !self.rows[last].is_free() {
                    diag(
                        Some(last),
                        "curve-last-free",
                        "a curve expansion ends with its infinite free row".into(),
                    );
                }
            }
        }
        out
    }

    pub fn check(&self) -> Result<()> {
        let d = self.validate();
        if d.is_empty() {
            Ok(())
        } else {
            Err(Error::validation(
                d.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; "),
            ))
        }
    }

    pub fn classify(&self) -> ValuationClass {
        match self.terminal {
            Terminal::Divisorial => ValuationClass::Divisorial,
            Terminal::Irrational { .. } => ValuationClass::Irrational,
            Terminal::Curve => ValuationClass::Curve,
        }
    }

    pub fn is_m_adic(&self) -> bool {
        self.terminal == Terminal::Divisorial
            && self.rows.len() == 1
            && self.rows[0].h() == 1
    }

    fn free_indices(&self) -> Vec<usize> {
        (0..self.rows.len()).filter(|&i| self.rows[i].is_free()).collect()
    }

    pub fn shape(&self) -> Shape {
        let class = self.classify();
        let mut s = self.free_indices();
        let mut k: Vec<u32> = s
            .iter()
            .map(|&i| match &self.rows[i] {
                HNRow::Free { k, .. } => *k,
                HNRow::Power { .. } => unreachable!(),
            })
            .collect();
        let mut gamma_cf = None;
        let last = match &self.terminal {
            Terminal::Divisorial => {
                let l = self.rows.len() - 1;
                if let HNRow::Power { h } = self.rows[l] {
                    s.push(l);
                    k.push(h);
                }
                l
            }
            Terminal::Irrational { tail } => {
                let sg = *s.last().expect("row 0 is free");
                let stored: Vec<u64> = self.rows[sg + 1..].iter().map(|r| r.h() as u64).collect();
                gamma_cf = Some(tail.prepend(&stored));
                sg
            }
            Terminal::Curve => *s.last().expect("row 0 is free"),
        };
        let g = if self.is_m_adic() { -1 } else { s.len() as i32 - 1 };
        Shape {
            class,
            s,
            k,
            g,
            last,
            gamma_cf,
        }
    }

    /// `gamma = [h_{s_g+1}; h_{s_g+2}, ...]` for irrational expansions.
    pub fn gamma(&self) -> Option<Real> {
        self.shape()
            .gamma_cf
            .map(|cf| cf_eval(&cf).expect("validated tail"))
    }

    /// `nu(w_0), ..., nu(w_last)`; divisorial expansions use
    /// `nu(w_L) = 1, nu(w_{L+1}) = 0`, the other classes use `nu(w_{s_g}) = 1`.
    pub fn row_values(&self) -> Vec<i64> {
        let sh = self.shape();
        let last = sh.last;
        let mut r = vec![0i64; last + 2];
        r[last] = 1;
        r[last + 1] = 0;
        for i in (1..=last).rev() {
            r[i - 1] = match &self.rows[i] {
                HNRow::Power { h } => *h as i64 * r[i] + r[i + 1],
                HNRow::Free { k, .. } => *k as i64 * r[i],
            };
        }
        r.truncate(last + 1);
        r
    }

    /// Points blown up in rows `0..=last`, each tagged with its row.
    pub fn point_rows(&self) -> Vec<usize> {
        let last = self.shape().last;
        (0..=last)
            .flat_map(|i| std::iter::repeat_n(i, self.rows[i].h() as usize))
            .collect()
    }

    /// Total number of stored blow-ups (all rows).
    pub fn stored_points(&self) -> u64 {
        self.rows.iter().map(|r| r.h() as u64).sum()
    }

    /// Index `j` of the first nonzero `a_{0j}`, if any.
    pub fn first_row_contact(&self) -> Option<u32> {
        match &self.rows[0] {
            HNRow::Free { coeffs, .. } => coeffs
                .iter()
                .position(|c| !c.is_zero())
                .map(|p| p as u32 + 1),
            HNRow::Power { .. } => None,
        }
    }

    /// Same structure, coefficients replaced: zero everywhere except a 1 in
    /// leading slots that must be nonzero.
    pub fn structural(&self) -> HNExpansion {
        let f = self.field;
        let rows = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| match r {
                HNRow::Free { k, h, .. } => HNRow::Free {
                    k: *k,
                    h: *h,
                    coeffs: (*k..=*h)
                        .map(|l| if i > 0 && l == *k { f.one() } else { f.zero() })
                        .collect(),
                },
                p => p.clone(),
            })
            .collect();
        HNExpansion::new(f, rows, self.terminal.clone())
    }

    /// Equal up to coefficients.
    pub fn same_structure(&self, other: &HNExpansion) -> bool {
        self.structural_key() == other.structural_key()
    }

    fn structural_key(&self) -> (Vec<(bool, u32, u32)>, Terminal) {
        let rows = self
            .rows
            .iter()
            .map(|r| match r {
                HNRow::Free { k, h, .. } => (true, *k, *h),
                HNRow::Power { h } => (false, 0, *h),
            })
            .collect();
        let terminal = match &self.terminal {
            Terminal::Irrational { tail } => Terminal::Irrational { tail: tail.canonical() },
            t => t.clone(),
        };
        (rows, terminal)
    }

    /// Reduces rational coefficients into `field` (identity for `Q`).
    pub fn map_field(&self, field: Field) -> HNExpansion {
        let rows = self
            .rows
            .iter()
            .map(|r| match r {
                HNRow::Free { k, h, coeffs } => HNRow::Free {
                    k: *k,
                    h: *h,
                    coeffs: coeffs
                        .iter()
                        .map(|c| match c.as_rat() {
                            Some(q) => field.rat(q).expect("denominator invertible"),
                            None => c.clone(),
                        })
                        .collect(),
                },
                p => p.clone(),
            })
            .collect();
        HNExpansion::new(field, rows, self.terminal.clone())
    }

    /// Number of coefficient slots that can vary: `h_0` plus `h - k + 1`
    /// for every later free row.
    pub fn coefficient_slots(&self) -> u64 {
        self.rows
            .iter()
            .map(|r| match r {
                HNRow::Free { k, h, .. } => (h - k + 1) as u64,
                HNRow::Power { .. } => 0,
            })
            .sum()
    }
}

impl fmt::Display for HNExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&write_hn(self))
    }
}

/// Convenience constructors used by tests and examples.
pub mod build {
    use super::*;

    pub fn q_ints(v: &[i64]) -> Vec<Coeff> {
        v.iter().map(|&x| Field::Q.int(x)).collect()
    }

    pub fn free0(coeffs: &[i64]) -> HNRow {
        HNRow::free(1, q_ints(coeffs))
    }

    pub fn free(k: u32, coeffs: &[i64]) -> HNRow {
        HNRow::free(k, q_ints(coeffs))
    }

    pub fn power(h: u32) -> HNRow {
        HNRow::Power { h }
    }

    pub fn divisorial(rows: Vec<HNRow>) -> HNExpansion {
        HNExpansion::new(Field::Q, rows, Terminal::Divisorial)
    }

    /// `v = a u + u w_1`, `u = w_1^2 w_2`.
    pub fn w1(a01: i64) -> HNExpansion {
        divisorial(vec![free0(&[a01]), power(2)])
    }

    pub fn m_adic() -> HNExpansion {
        divisorial(vec![free0(&[0])])
    }

    /// Four free points on a smooth branch.
    pub fn w3(coeffs: [i64; 4]) -> HNExpansion {
        divisorial(vec![free0(&coeffs)])
    }
}
