//! Non-positivity at infinity, minimal families, P-sufficiency, the
//! one-parameter families through a curve, and the quasi-monomial experiment.

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::batch::{self, Exec};
use crate::dual_graph::{graph_from_hn, DualGraph};
use crate::error::{Error, Result};
use crate::evaluation::{value_normalized, value_substitution, BivarPoly};
use crate::exactnum::{cf_of_real, rat, rat_ceil, rint, Rat, Real, ValElem};
use crate::hn_model::{Field, HNExpansion, HNRow, Terminal, ValuationClass};
use crate::invariants::{self, InvariantBundle};
use crate::poly::Poly2;

fn as_i64(r: &Real) -> i64 {
    r.as_rat()
        .and_then(|q| q.to_integer().to_i64())
        .expect("integral value")
}

fn nu_uv(hn: &HNExpansion) -> Result<(ValElem, ValElem)> {
    let u = BivarPoly::local(Poly2::x(hn.field));
    let v = BivarPoly::local(Poly2::y(hn.field));
    Ok((value_substitution(hn, &u)?, value_substitution(hn, &v)?))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NPIWitness {
    pub hn: HNExpansion,
    pub nu_u: ValElem,
    pub nu_v: ValElem,
    pub last_mcv: i64,
    /// `nu(v)^2 - beta_bar_last`.
    pub slack: i64,
}

/// Witness for `nu(v) > nu(u)` and `nu(v)^2 >= beta_bar_last`. The m-adic
/// valuation gets a witness with `nu(u) = nu(v) = 1` by convention.
pub fn npi_test(hn: &HNExpansion) -> Result<Option<NPIWitness>> {
    if hn.terminal != Terminal::Divisorial {
        return Err(Error::domain("the NPI test needs a divisorial valuation"));
    }
    let b = invariants::compute(hn)?;
    let last = as_i64(b.last_mcv());
    let (nu_u, nu_v) = nu_uv(hn)?;
    let ok = b.is_m_adic() || (nu_v.p > nu_u.p && nu_v.p * nu_v.p >= last);
    Ok(ok.then(|| NPIWitness {
        hn: hn.clone(),
        slack: nu_v.p * nu_v.p - last,
        nu_u,
        nu_v,
        last_mcv: last,
    }))
}

pub fn mu_hat_npi(w: &NPIWitness) -> Real {
    Real::int(w.nu_v.p)
}

/// `n` more free points after the last one.
pub fn enlarge_hn(hn: &HNExpansion, n: u32) -> HNExpansion {
    if n == 0 {
        return hn.clone();
    }
    let f = hn.field;
    let mut rows = hn.rows.clone();
    let single = rows.len() == 1;
    let last = rows.last_mut().expect("nonempty");
    *last = match last.clone() {
        HNRow::Power { h } if !single => {
            let mut coeffs = vec![f.zero(); n as usize + 1];
            coeffs[0] = f.one();
            HNRow::Free { k: h, h: h + n, coeffs }
        }
        HNRow::Free { k, h, mut coeffs } => {
            // the trailing slot was unused; a nonzero entry moves the new
            // points off every branch that followed the old ones
            let tail = coeffs.last_mut().expect("h >= 1");
            if tail.is_zero() {
                *tail = f.one();
            }
            coeffs.extend(std::iter::repeat_n(f.zero(), n as usize));
            HNRow::Free { k, h: h + n, coeffs }
        }
        p => p,
    };
    HNExpansion::new(f, rows, hn.terminal.clone())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enlarged {
    pub hn: HNExpansion,
    pub graph: DualGraph,
}

/// Appends `slack` free points; the result has `beta_bar_last = nu(v)^2`.
pub fn enlarge_to_minimal(w: &NPIWitness) -> Result<Enlarged> {
    let slack = u32::try_from(w.slack).map_err(|_| Error::validation("negative slack"))?;
    let hn = enlarge_hn(&w.hn, slack);
    let b = invariants::compute(&hn)?;
    let (_, nu_v) = nu_uv(&hn)?;
    if nu_v != w.nu_v || as_i64(b.last_mcv()) != w.nu_v.p * w.nu_v.p {
        return Err(Error::validation("enlarged valuation lost the witness equality"));
    }
    Ok(Enlarged {
        graph: graph_from_hn(&hn)?,
        hn,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Iota {
    MinusInfinity,
    Value(Real),
}

impl Iota {
    /// `k >= 0` and `k >= iota`.
    pub fn admits(&self, k: i64) -> bool {
        k >= 0
            && match self {
                Iota::MinusInfinity => true,
                Iota::Value(x) => Real::int(k) >= *x,
            }
    }
}

fn beta_rats(b: &InvariantBundle) -> Result<(Rat, Rat, Rat)> {
    if b.class != ValuationClass::Divisorial || b.is_m_adic() {
        return Err(Error::domain("needs a divisorial valuation other than the m-adic one"));
    }
    let r = |x: &Real| x.as_rat().expect("divisorial").clone();
    Ok((r(&b.maxcontact[0]), r(&b.maxcontact[1]), r(b.last_mcv())))
}

pub fn iota(b: &InvariantBundle) -> Result<Iota> {
    let (b0, b1, last) = beta_rats(b)?;
    let four = rint(4);
    let disc = &b0 * &b0 - &four * &b0 * &b1 + &four * &last;
    if disc.is_negative() {
        return Ok(Iota::MinusInfinity);
    }
    let root = Real::sqrt_rat(&disc)?;
    let two_b0 = &b0 * rint(2);
    Ok(Iota::Value(
        root.add_rat(&(&b0 - rint(2) * &b1)).scale(&(Rat::one() / two_b0)),
    ))
}

/// `B_{omega,k}`: admissible integers in ascending order, then the endpoint
/// `beta_1/beta_0 + k`.
pub fn family_b(b: &InvariantBundle, k: i64) -> Result<Vec<Rat>> {
    let io = iota(b)?;
    if !io.admits(k) {
        let shown = match &io {
            Iota::Value(x) => x.to_string(),
            Iota::MinusInfinity => "-inf".into(),
        };
        return Err(Error::domain(format!("k = {k} is below max(0, iota) with iota = {shown}")));
    }
    let (b0, b1, last) = beta_rats(b)?;
    let lo_sq = &last / (&b0 * &b0) + rint(k);
    let hi = &b1 / &b0 + rint(k);
    let mut out = Vec::new();
    let mut a = Rat::one();
    while a < hi {
        if &a * &a >= lo_sq {
            out.push(a.clone());
        }
        a += Rat::one();
    }
    out.push(hi);
    Ok(out)
}

/// `Gamma_{omega,k}` as an expansion shape: `k` free points in front.
pub fn gamma_k_hn(omega: &HNExpansion, k: u32) -> Result<HNExpansion> {
    let b = invariants::compute(omega)?;
    if b.is_m_adic() {
        return Err(Error::domain("omega must not be the m-adic valuation"));
    }
    let mut s = omega.structural();
    if let HNRow::Free { h, coeffs, .. } = &mut s.rows[0] {
        *h += k;
        coeffs.extend(std::iter::repeat_n(s.field.zero(), k as usize));
    }
    let nb = invariants::compute(&s)?;
    let b0sq = b.beta0() * b.beta0();
    for i in 0..b.maxcontact.len() {
        let want = if i == 0 {
            b.maxcontact[0].clone()
        } else {
            b.maxcontact[i].add_rat(&rat(k as i64 * b0sq, b.eseq[i - 1]))
        };
        if nb.maxcontact.get(i) != Some(&want) {
            return Err(Error::validation(format!(
                "shifted maximal contact value {i} disagrees with the closed form"
            )));
        }
    }
    Ok(s)
}

pub fn build_gamma_k(g: &DualGraph, k: u32) -> Result<DualGraph> {
    graph_from_hn(&gamma_k_hn(&g.hn_structure()?, k)?)
}

/// Number of free points appended in `Gamma^a_{omega,k}`.
pub fn appended_count(b: &InvariantBundle, k: u32, a: &Rat) -> Result<u32> {
    let (b0, _, last) = beta_rats(b)?;
    let n = (a * a - rint(k as i64)) * &b0 * &b0 - last;
    if !n.is_integer() || n.is_negative() {
        return Err(Error::validation(format!("appended count {n} is not a nonnegative integer")));
    }
    n.to_integer()
        .to_u32()
        .ok_or_else(|| Error::Capability("appended count too large".into()))
}

pub fn gamma_k_a_hn(omega: &HNExpansion, k: u32, a: &Rat) -> Result<HNExpansion> {
    let b = invariants::compute(omega)?;
    if !family_b(&b, k as i64)?.contains(a) {
        return Err(Error::domain(format!("a = {a} is not in B_(omega,{k})")));
    }
    let n = appended_count(&b, k, a)?;
    Ok(enlarge_hn(&gamma_k_hn(omega, k)?, n))
}

pub fn build_gamma_k_a(g: &DualGraph, k: u32, a: &Rat) -> Result<DualGraph> {
    graph_from_hn(&gamma_k_a_hn(&g.hn_structure()?, k, a)?)
}

/// Zero first-row coefficients except `a_{0j} = 1`; later rows structural.
pub fn line_placement(structure: &HNExpansion, j: Option<u32>) -> HNExpansion {
    let mut s = structure.structural();
    if let (Some(j), HNRow::Free { coeffs, .. }) = (j, &mut s.rows[0]) {
        coeffs[j as usize - 1] = s.field.one();
    }
    s
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub omega: HNExpansion,
    pub k: u32,
    pub a: Rat,
    pub appended: u32,
    pub placement: HNExpansion,
    /// `Some(j)`: the line passes through the first `j` free points only.
    pub line_points: Option<u32>,
    pub nu_u: i64,
    pub nu_v: i64,
    pub last_mcv: i64,
    pub mu_hat_normalized: Rat,
    pub vol_inv_normalized: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejection {
    pub reason: String,
    /// `(nu(v), nu(v)^2)` for each tried line placement.
    pub tried: Vec<(i64, i64)>,
    pub last_mcv: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certification {
    Certified(Box<Certificate>),
    Rejected(Rejection),
}

/// Candidate `omega` shapes obtained by removing `k` leading free points and
/// `n` trailing free points.
fn strip(s: &HNExpansion, k: u32, n: u32) -> Option<HNExpansion> {
    let mut rows = s.structural().rows;
    let len = rows.len();
    let last_i = len - 1;
    if let HNRow::Free { h, coeffs, .. } = &mut rows[0] {
        if *h <= k {
            return None;
        }
        *h -= k;
        coeffs.truncate(*h as usize);
    }
    if n > 0 {
        let row = rows[last_i].clone();
        rows[last_i] = match row {
            HNRow::Free { k: kg, h, mut coeffs } if last_i > 0 && h >= kg + n => {
                if h == kg + n {
                    HNRow::Power { h: kg }
                } else {
                    coeffs.truncate((h - n - kg + 1) as usize);
                    HNRow::Free { k: kg, h: h - n, coeffs }
                }
            }
            HNRow::Free { k: 1, h, mut coeffs } if last_i == 0 && h > n => {
                coeffs.truncate((h - n) as usize);
                HNRow::Free { k: 1, h: h - n, coeffs }
            }
            _ => return None,
        };
    }
    let hn = HNExpansion::new(s.field, rows, Terminal::Divisorial);
    hn.check().ok()?;
    Some(hn)
}

/// Looks for a line placement with `nu(v)^2 = beta_bar_last` and a
/// decomposition of `g` as `Gamma^a_{omega,k}`.
pub fn certify_minimal_family(g: &DualGraph) -> Result<Certification> {
    if g.tail.is_some() {
        return Err(Error::domain("certification needs a divisorial graph"));
    }
    let s = g.hn_structure()?;
    let b = invariants::compute(&s)?;
    let last = as_i64(b.last_mcv());
    let reject = |reason: String, tried| Certification::Rejected(Rejection { reason, tried, last_mcv: last });
    if b.is_m_adic() {
        return Ok(reject("the m-adic graph is not of the form Gamma^a_(omega,k)".into(), vec![]));
    }
    let b0 = b.beta0();
    let h0 = s.rows[0].h();
    let mut tried = Vec::new();
    let mut found = None;
    for j in (2..=h0).map(Some).chain([None]) {
        let p = line_placement(&s, j);
        let (nu_u, nu_v) = nu_uv(&p)?;
        tried.push((nu_v.p, nu_v.p * nu_v.p));
        if nu_v.p > nu_u.p && nu_v.p * nu_v.p == last {
            found = Some((j, p, nu_u.p, nu_v.p));
            break;
        }
    }
    let Some((line_points, placement, nu_u, nu_v)) = found else {
        let listed: Vec<String> = tried.iter().map(|(v, sq)| format!("nu(v)={v}: {sq}")).collect();
        return Ok(reject(
            format!(
                "no line placement gives nu(v)^2 = beta_bar_last = {last} ({})",
                listed.join(", ")
            ),
            tried,
        ));
    };
    let a = rat(nu_v, b0);
    let tail_max = match s.rows.last().expect("nonempty") {
        HNRow::Free { k, h, .. } if s.rows.len() > 1 => h - k,
        HNRow::Free { h, .. } => h.saturating_sub(1),
        HNRow::Power { .. } => 0,
    };
    for k in (0..h0).rev() {
        for n in (0..=tail_max).rev() {
            let Some(omega) = strip(&s, k, n) else { continue };
            let bo = invariants::compute(&omega)?;
            if bo.is_m_adic() || !iota(&bo)?.admits(k as i64) {
                continue;
            }
            if !family_b(&bo, k as i64)?.contains(&a) {
                continue;
            }
            let Ok(rebuilt) = gamma_k_a_hn(&omega, k, &a) else { continue };
            let rg = graph_from_hn(&rebuilt)?;
            if rg.n != g.n || rg.edges != g.edges {
                continue;
            }
            let mu = a.clone();
            let vol = rat(last, b0 * b0);
            debug_assert_eq!(&mu * &mu, vol);
            return Ok(Certification::Certified(Box::new(Certificate {
                appended: appended_count(&bo, k, &a)?,
                omega,
                k,
                a,
                placement,
                line_points,
                nu_u,
                nu_v,
                last_mcv: last,
                mu_hat_normalized: mu,
                vol_inv_normalized: vol,
            })));
        }
    }
    Ok(reject(
        format!("nu(v) = {nu_v} matches, but no decomposition as Gamma^a_(omega,k) rebuilds the graph"),
        tried,
    ))
}

/// True iff the satellite-divisor witness has positive slack.
pub fn satellite_nonminimality_check(w: &NPIWitness) -> Result<bool> {
    let satellite = w.hn.rows.len() > 1 && matches!(w.hn.rows.last(), Some(HNRow::Power { .. }));
    if !satellite {
        return Err(Error::domain("the valuation is not defined by a satellite divisor"));
    }
    Ok(w.slack > 0)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GMatrix {
    pub g: Vec<Vec<i64>>,
}

impl GMatrix {
    pub fn size(&self) -> usize {
        self.g.len()
    }
}

/// `g_ij = 9 sum_k m_ik m_jk - (sum_k m_ik)(sum_k m_jk)`; short rows are
/// padded with zeros.
pub fn g_matrix(rows: &[Vec<i64>]) -> GMatrix {
    let n = rows.iter().map(Vec::len).max().unwrap_or(0);
    let at = |r: &Vec<i64>, k: usize| r.get(k).copied().unwrap_or(0);
    let sums: Vec<i64> = rows.iter().map(|r| r.iter().sum()).collect();
    let g = (0..rows.len())
        .map(|i| {
            (0..rows.len())
                .map(|j| {
                    let dot: i64 = (0..n).map(|k| at(&rows[i], k) * at(&rows[j], k)).sum();
                    9 * dot - sums[i] * sums[j]
                })
                .collect()
        })
        .collect();
    GMatrix { g }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PMode {
    /// `x G x^t > 0` on the nonnegative orthant minus the origin.
    Strict,
    /// `x G x^t >= 0`.
    Almost,
}

/// Largest size decided without the enumeration fallback.
pub const EXACT_COPOSITIVE_MAX: usize = 4;

fn solve(mut a: Vec<Vec<Rat>>, mut b: Vec<Rat>) -> Option<Vec<Rat>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, p);
        b.swap(c, p);
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = &a[r][c] / &a[c][c];
                let pivot = a[c].clone();
                for (x, p) in a[r][c..].iter_mut().zip(&pivot[c..]) {
                    *x -= &f * p;
                }
                let t = &f * &b[c];
                b[r] -= t;
            }
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

/// Minimum of `x G x^t` over the standard simplex, by enumerating supports
/// of critical points.
pub fn simplex_minimum(g: &GMatrix) -> Rat {
    let s = g.size();
    let mut best: Option<Rat> = None;
    for mask in 1u32..(1 << s) {
        let idx: Vec<usize> = (0..s).filter(|&i| mask >> i & 1 == 1).collect();
        let n = idx.len();
        // [G_SS -1; 1^t 0] [x; lambda] = [0; 1]
        let mut a = vec![vec![Rat::zero(); n + 1]; n + 1];
        for (r, &i) in idx.iter().enumerate() {
            for (c, &j) in idx.iter().enumerate() {
                a[r][c] = rint(g.g[i][j]);
            }
            a[r][n] = -Rat::one();
            a[n][r] = Rat::one();
        }
        let mut b = vec![Rat::zero(); n + 1];
        b[n] = Rat::one();
        let Some(x) = solve(a, b) else { continue };
        if x[..n].iter().any(|v| v.is_negative()) {
            continue;
        }
        let val = x[n].clone();
        if best.as_ref().is_none_or(|b| val < *b) {
            best = Some(val);
        }
    }
    best.expect("vertices are always critical")
}

pub fn p_sufficiency(g: &GMatrix, mode: PMode, allow_fallback: bool) -> Result<bool> {
    let s = g.size();
    let pass = |x: &Rat| match mode {
        PMode::Strict => x.is_positive(),
        PMode::Almost => !x.is_negative(),
    };
    match s {
        0 => Err(Error::domain("empty matrix")),
        1 => Ok(pass(&rint(g.g[0][0]))),
        2 => {
            let (a, b, c) = (g.g[0][0], g.g[0][1], g.g[1][1]);
            Ok(match mode {
                PMode::Strict => a > 0 && c > 0 && (b >= 0 || b * b < a * c),
                PMode::Almost => a >= 0 && c >= 0 && (b >= 0 || b * b <= a * c),
            })
        }
        _ if s <= EXACT_COPOSITIVE_MAX || allow_fallback => Ok(pass(&simplex_minimum(g))),
        _ => Err(Error::Capability(format!(
            "copositivity of a {s}x{s} matrix needs the enumeration fallback"
        ))),
    }
}

/// Shared data of the family of valuations through a curve `delta`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VDeltaParams {
    pub delta: HNExpansion,
    pub a: Rat,
    pub b: Rat,
    pub interval_lo: Rat,
    pub beta0: i64,
}

impl VDeltaParams {
    pub fn new(delta: &HNExpansion) -> Result<VDeltaParams> {
        if delta.terminal != Terminal::Curve {
            return Err(Error::validation("the anchor must be a curve expansion"));
        }
        delta.check()?;
        let sh = delta.shape();
        let r = delta.row_values();
        let g = sh.s.len() - 1;
        let e: Vec<i64> = sh.s.iter().map(|&i| r[i]).collect();
        let mut beta = vec![r[0]];
        for j in 0..g {
            let n = if j == 0 { 1 } else { e[j - 1] / e[j] };
            let h = delta.rows[sh.s[j]].h() as i64;
            beta.push(n * beta[j] + (h - sh.k[j] as i64) * e[j] + r[sh.s[j] + 1]);
        }
        let b0 = beta[0];
        let b = if g == 0 {
            Rat::one()
        } else {
            rat(e[g - 1] * beta[g], b0 * b0)
        };
        Ok(VDeltaParams {
            delta: delta.clone(),
            a: rat(1, b0 * b0),
            interval_lo: b.clone(),
            b,
            beta0: b0,
        })
    }

    /// The curve `v = 0`.
    pub fn smooth() -> VDeltaParams {
        let f = Field::Q;
        let delta = HNExpansion::new(
            f,
            vec![HNRow::Free { k: 1, h: 1, coeffs: vec![f.zero()] }],
            Terminal::Curve,
        );
        VDeltaParams::new(&delta).expect("smooth branch")
    }

    /// `beta'_{g+1} = (t - B)/A + 1`.
    pub fn exponent(&self, t: &Real) -> Result<Real> {
        if *t < Real::Rat(self.b.clone()) {
            return Err(Error::domain(format!("t = {t} is below the interval start {}", self.b)));
        }
        Ok(t.add_rat(&-self.b.clone()).scale(&(Rat::one() / &self.a)).add_rat(&Rat::one()))
    }
}

/// The member of the family with normalized inverse volume `t`.
pub fn vdelta(params: &VDeltaParams, t: &Real) -> Result<HNExpansion> {
    let bp = params.exponent(t)?;
    let cf = cf_of_real(&bp)?;
    let delta = &params.delta;
    let f = delta.field;
    let sh = delta.shape();
    let sg = *sh.s.last().expect("row 0 is free");
    let kg = *sh.k.last().expect("row 0 is free");
    let g = sh.s.len() - 1;
    let a0 = cf.quotient(0).expect("nonempty") as u32;
    let h = a0 + kg - 1;
    let free = HNRow::Free {
        k: kg,
        h,
        coeffs: (kg..=h).map(|l| delta.rows[sg].coeff_at(l, f)).collect(),
    };
    let mut rows: Vec<HNRow> = delta.rows[..sg].to_vec();
    let terminal = if cf.is_finite() {
        let q = &cf.preperiod;
        if q.len() == 1 {
            rows.push(if g >= 1 && a0 == 1 { HNRow::Power { h: kg } } else { free });
        } else {
            rows.push(free);
            rows.extend(q[1..].iter().map(|&c| HNRow::Power { h: c as u32 }));
        }
        Terminal::Divisorial
    } else {
        rows.push(free);
        Terminal::Irrational {
            tail: cf.tail().expect("infinite"),
        }
    };
    let hn = HNExpansion::new(f, rows, terminal);
    hn.check()?;
    Ok(hn)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LipschitzReport {
    pub table: Vec<(Rat, Rat)>,
    pub max_quotient: Rat,
}

pub fn lipschitz_probe(params: &VDeltaParams, f: &BivarPoly, samples: &[Rat]) -> Result<LipschitzReport> {
    lipschitz_probe_with(Exec::default(), params, f, samples)
}

pub fn lipschitz_probe_with(
    exec: Exec,
    params: &VDeltaParams,
    f: &BivarPoly,
    samples: &[Rat],
) -> Result<LipschitzReport> {
    let values = batch::try_map(exec, samples, |t| {
        let hn = vdelta(params, &Real::Rat(t.clone()))?;
        let v = value_normalized(&hn, f)?;
        Ok(v.as_rat().expect("divisorial").clone())
    })?;
    let table: Vec<(Rat, Rat)> = samples.iter().cloned().zip(values).collect();
    let mut max_quotient = Rat::zero();
    for i in 0..table.len() {
        for j in i + 1..table.len() {
            let dt = (&table[i].0 - &table[j].0).abs();
            if dt.is_zero() {
                return Err(Error::domain("samples must be pairwise distinct"));
            }
            let q = (&table[i].1 - &table[j].1).abs() / dt;
            if q > max_quotient {
                max_quotient = q;
            }
        }
    }
    Ok(LipschitzReport { table, max_quotient })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AsymptoticRow {
    pub t: Rat,
    /// Free points the line passes through: `ceil(sqrt t)`.
    pub line_points: u32,
    pub beta0: i64,
    pub nu_v: i64,
    pub last_mcv: i64,
    /// `ceil(sqrt t) / sqrt t`.
    pub ratio: Real,
}

pub fn asymptotic_row(t: &Rat) -> Result<AsymptoticRow> {
    if *t < rint(2) {
        return Err(Error::domain(format!("t = {t} must be at least 2")));
    }
    let theta = vdelta(&VDeltaParams::smooth(), &Real::Rat(t.clone()))?;
    let root = Real::sqrt_rat(t)?;
    let j = root.ceil().to_u32().ok_or_else(|| Error::Capability("t too large".into()))?;
    let h0 = theta.rows[0].h();
    assert!(j <= h0, "the first row holds floor(t) >= ceil(sqrt t) free points");
    let placed = line_placement(&theta, Some(j));
    let w = npi_test(&placed)?.ok_or_else(|| Error::validation(format!("line placement for t = {t} is not NPI")))?;
    let q = t.denom().to_i64().expect("small");
    if w.nu_v.p != j as i64 * q {
        return Err(Error::validation("line did not pass through the expected points"));
    }
    Ok(AsymptoticRow {
        t: t.clone(),
        line_points: j,
        beta0: q,
        nu_v: w.nu_v.p,
        last_mcv: w.last_mcv,
        ratio: Real::int(j as i64).try_div(&root)?,
    })
}

pub fn asymptotic_experiment(ts: &[Rat]) -> Result<Vec<AsymptoticRow>> {
    asymptotic_experiment_with(Exec::default(), ts)
}

pub fn asymptotic_experiment_with(exec: Exec, ts: &[Rat]) -> Result<Vec<AsymptoticRow>> {
    batch::try_map(exec, ts, asymptotic_row)
}

/// `ceil(sqrt t)` without square roots.
pub fn ceil_sqrt(t: &Rat) -> u64 {
    let mut j = rat_ceil(t).to_u64().map(|c| (c as f64).sqrt() as u64).unwrap_or(1).max(1);
    while rint(j as i64 * j as i64) < *t {
        j += 1;
    }
    while j > 1 && rint((j - 1) as i64 * (j - 1) as i64) >= *t {
        j -= 1;
    }
    j
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dual_graph::graph_from_exponents;
    use crate::hn_model::build::*;

    fn r(s: &str) -> Real {
        Real::parse(s).unwrap()
    }

    fn q(n: i64, d: i64) -> Rat {
        rat(n, d)
    }

    #[test]
    fn npi_examples() {
        let w = npi_test(&w3([0, 5, 0, 0])).unwrap().unwrap();
        assert_eq!((w.nu_v.p, w.slack), (2, 0));
        assert!(npi_test(&w1(4)).unwrap().is_none());
        let w = npi_test(&w1(0)).unwrap().unwrap();
        assert_eq!((w.nu_v.p, w.slack), (3, 3));
        assert_eq!(mu_hat_npi(&w), Real::int(3));
        assert_eq!(mu_hat_npi(&npi_test(&m_adic()).unwrap().unwrap()), Real::one());
        assert!(satellite_nonminimality_check(&w).unwrap());
        let line = npi_test(&w3([0, 5, 0, 0])).unwrap().unwrap();
        assert!(satellite_nonminimality_check(&line).is_err());
    }

    #[test]
    fn enlarge_examples() {
        let e = enlarge_to_minimal(&npi_test(&w1(0)).unwrap().unwrap()).unwrap();
        assert_eq!(invariants::value_sequence(&e.hn).unwrap(), vec![2, 1, 1, 1, 1, 1]);
        assert_eq!(e.graph.n, 6);
        let e = enlarge_to_minimal(&npi_test(&w3([0, 5, 0, 0])).unwrap().unwrap()).unwrap();
        assert_eq!(e.hn, w3([0, 5, 0, 0]));
    }

    #[test]
    fn iota_and_b() {
        let bw1 = invariants::compute(&w1(0)).unwrap();
        let bw3 = invariants::compute(&w3([0; 4])).unwrap();
        assert_eq!(iota(&bw1).unwrap(), Iota::Value(r("-1/2")));
        assert_eq!(iota(&bw3).unwrap(), Iota::Value(r("-3")));
        assert_eq!(family_b(&bw1, 1).unwrap(), vec![q(2, 1), q(5, 2)]);
        assert_eq!(family_b(&bw1, 0).unwrap(), vec![q(3, 2)]);
        assert_eq!(family_b(&bw3, 0).unwrap(), vec![q(2, 1), q(3, 1), q(4, 1)]);
        assert!(family_b(&bw1, -1).is_err());
    }

    #[test]
    fn gamma_families() {
        let g = gamma_k_hn(&w1(0), 1).unwrap();
        let b = invariants::compute(&g).unwrap();
        assert_eq!(b.maxcontact_int().unwrap(), vec![2, 5, 10]);
        assert_eq!(graph_from_hn(&g).unwrap().n, 4);
        let b = invariants::compute(&gamma_k_hn(&w3([0; 4]), 2).unwrap()).unwrap();
        assert_eq!(b.maxcontact_int().unwrap(), vec![1, 6]);
        let flag = gamma_k_a_hn(&w1(0), 1, &q(2, 1)).unwrap();
        assert_eq!(invariants::value_sequence(&flag).unwrap(), vec![2, 2, 1, 1, 1, 1, 1, 1, 1, 1]);
        let half = gamma_k_a_hn(&w1(0), 1, &q(5, 2)).unwrap();
        let b = invariants::compute(&half).unwrap();
        assert_eq!(b.last_mcv(), &Real::int(25));
        assert_eq!(gamma_k_a_hn(&w3([0; 4]), 0, &q(2, 1)).unwrap(), w3([0; 4]));
        assert!(matches!(gamma_k_a_hn(&w1(0), 1, &q(3, 1)), Err(Error::Domain(_))));
    }

    #[test]
    fn certification() {
        let flag = graph_from_hn(&gamma_k_a_hn(&w1(0), 1, &q(2, 1)).unwrap()).unwrap();
        let Certification::Certified(c) = certify_minimal_family(&flag).unwrap() else {
            panic!("flagship rejected");
        };
        assert_eq!((c.k, c.a.clone(), c.appended), (1, q(2, 1), 6));
        assert_eq!(c.omega, w1(0).structural());
        assert_eq!(c.mu_hat_normalized, q(2, 1));
        let nine = graph_from_exponents(&[r("1"), r("9")]).unwrap();
        let Certification::Certified(c) = certify_minimal_family(&nine).unwrap() else {
            panic!("nine free points rejected");
        };
        assert_eq!((c.k, c.mu_hat_normalized.clone()), (7, q(3, 1)));
        let Certification::Rejected(rj) = certify_minimal_family(&graph_from_hn(&w1(0)).unwrap()).unwrap()
        else {
            panic!("W1 certified");
        };
        assert_eq!(rj.tried, vec![(3, 9)]);
        assert!(rj.reason.contains("= 6"));
    }

    #[test]
    fn g_matrix_and_copositivity() {
        let g = g_matrix(&[vec![2, 1, 1]]);
        assert_eq!(g.g, vec![vec![38]]);
        assert!(p_sufficiency(&g, PMode::Strict, false).unwrap());
        let nine = g_matrix(&[vec![1; 9]]);
        assert_eq!(nine.g, vec![vec![0]]);
        assert!(!p_sufficiency(&nine, PMode::Strict, false).unwrap());
        assert!(p_sufficiency(&nine, PMode::Almost, false).unwrap());
        let ten = g_matrix(&[vec![1; 10]]);
        assert_eq!(ten.g, vec![vec![-10]]);
        assert!(!p_sufficiency(&ten, PMode::Almost, false).unwrap());
        let m = GMatrix { g: vec![vec![4, -2], vec![-2, 1]] };
        assert!(p_sufficiency(&m, PMode::Almost, false).unwrap());
        assert!(!p_sufficiency(&m, PMode::Strict, false).unwrap());
        let big = GMatrix { g: (0..5).map(|i| (0..5).map(|j| i64::from(i == j)).collect()).collect() };
        assert!(matches!(p_sufficiency(&big, PMode::Strict, false), Err(Error::Capability(_))));
        assert!(p_sufficiency(&big, PMode::Strict, true).unwrap());
        assert_eq!(simplex_minimum(&big), q(1, 5));
    }

    #[test]
    fn vdelta_smooth() {
        let p = VDeltaParams::smooth();
        assert_eq!((p.a.clone(), p.b.clone()), (q(1, 1), q(1, 1)));
        assert_eq!(vdelta(&p, &r("3/2")).unwrap(), w1(0));
        assert_eq!(vdelta(&p, &r("4")).unwrap(), w3([0; 4]));
        let irr = vdelta(&p, &r("(3 + sqrt(5))/2")).unwrap();
        assert!(matches!(irr.terminal, Terminal::Irrational { .. }));
        assert_eq!(invariants::compute(&irr).unwrap().vol_inv_normalized, r("(3 + sqrt(5))/2"));
        assert!(matches!(vdelta(&p, &r("1/2")), Err(Error::Domain(_))));
    }

    #[test]
    fn vdelta_cusp() {
        let f = Field::Q;
        let cusp = HNExpansion::new(
            f,
            vec![free0(&[0]), HNRow::Free { k: 2, h: 2, coeffs: vec![f.one()] }],
            Terminal::Curve,
        );
        let p = VDeltaParams::new(&cusp).unwrap();
        assert_eq!((p.a.clone(), p.b.clone()), (q(1, 4), q(3, 2)));
        for t in ["3/2", "2", "7/4", "13/5", "9"] {
            let hn = vdelta(&p, &r(t)).unwrap();
            assert_eq!(invariants::compute(&hn).unwrap().vol_inv_normalized, r(t), "t = {t}");
        }
    }

    #[test]
    fn lipschitz_examples() {
        let p = VDeltaParams::smooth();
        let f = BivarPoly::parse("v^2 - u^3", Field::Q, crate::evaluation::Chart::Local).unwrap();
        let samples = vec![q(1, 1), q(3, 2), q(2, 1), q(3, 1)];
        let rep = lipschitz_probe(&p, &f, &samples).unwrap();
        let vals: Vec<Rat> = rep.table.iter().map(|x| x.1.clone()).collect();
        assert_eq!(vals, vec![q(2, 1), q(3, 1), q(3, 1), q(3, 1)]);
        assert_eq!(rep.max_quotient, q(2, 1));
        let v = BivarPoly::parse("v", Field::Q, crate::evaluation::Chart::Local).unwrap();
        assert_eq!(lipschitz_probe(&p, &v, &samples).unwrap().max_quotient, q(1, 1));
    }

    #[test]
    fn asymptotic_examples() {
        let rows = asymptotic_experiment(&[q(2, 1), q(4, 1), q(9999, 1), q(5, 2)]).unwrap();
        assert_eq!(rows[0].ratio, r("sqrt(2)"));
        assert_eq!(rows[1].ratio, Real::one());
        assert_eq!(rows[2].ratio, r("100*sqrt(1111)/3333"));
        assert!(rows[3].ratio >= Real::one());
        assert_eq!(ceil_sqrt(&q(9999, 1)), 100);
        assert_eq!(ceil_sqrt(&q(4, 1)), 2);
    }
}
