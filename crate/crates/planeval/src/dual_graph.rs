//! Dual graphs and proximity data of the chain of blown-up points.
//!
//! Vertices carry creation-order labels `1..=n`. An irrational valuation
//! keeps only its finite part plus the continued fraction of the satellite
//! tail.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::exactnum::{cf_of_real, rat_floor, ContFrac, Real};
use crate::hn_model::{Field, HNExpansion, HNRow, Terminal, ValuationClass};
use crate::invariants;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualGraph {
    pub n: usize,
    /// Unordered edges stored as `(min, max)`.
    pub edges: BTreeSet<(usize, usize)>,
    pub arrow: Option<usize>,
    pub tail: Option<ContFrac>,
}

/// Proximity data: `prox[i]` lists the earlier points `p_{i+1}` is proximate to
/// (1-based labels, ascending).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration {
    pub prox: Vec<Vec<usize>>,
}

impl Configuration {
    pub fn len(&self) -> usize {
        self.prox.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prox.is_empty()
    }

    /// Satellite points are proximate to two points.
    pub fn is_satellite(&self, i: usize) -> bool {
        self.prox[i - 1].len() == 2
    }

    pub fn parent(&self, i: usize) -> Option<usize> {
        if i > 1 {
            Some(i - 1)
        } else {
            None
        }
    }

    /// Points proximate to `p_i`.
    pub fn proximate_to(&self, i: usize) -> Vec<usize> {
        (1..=self.len())
            .filter(|&j| self.prox[j - 1].contains(&i))
            .collect()
    }

    /// Values of the divisorial valuation of the last point, from the
    /// proximity equalities `m_i = sum_{j -> i} m_j`.
    pub fn values(&self) -> Vec<i64> {
        self.prefix_values(self.len())
    }

    /// Same for the valuation of `E_s` with only `p_1..p_s` blown up.
    pub fn prefix_values(&self, s: usize) -> Vec<i64> {
        let mut m = vec![0i64; s];
        if s == 0 {
            return m;
        }
        m[s - 1] = 1;
        for j in (1..s).rev() {
            m[j - 1] = (j + 1..=s)
                .filter(|&k| self.prox[k - 1].contains(&j))
                .map(|k| m[k - 1])
                .sum();
        }
        m
    }

    pub fn to_graph(&self) -> DualGraph {
        let mut edges = BTreeSet::new();
        for (idx, p) in self.prox.iter().enumerate() {
            let n = idx + 1;
            if p.len() == 2 {
                edges.remove(&(p[0].min(p[1]), p[0].max(p[1])));
            }
            for &j in p {
                edges.insert((j.min(n), j.max(n)));
            }
        }
        DualGraph {
            n: self.len(),
            edges,
            arrow: None,
            tail: None,
        }
    }
}

/// Walks the blow-ups of rows `0..=last`, tracking which exceptional
/// divisors pass through the next center. Depends only on the row shapes.
pub fn configuration_from_hn(hn: &HNExpansion) -> Configuration {
    let last = hn.shape().last;
    let mut small: Option<usize> = None;
    let mut big: Option<usize> = None;
    let mut prox = Vec::new();
    for row in &hn.rows[..=last] {
        for l in 1..=row.h() {
            let n = prox.len() + 1;
            let mut p: Vec<usize> = [small, big].into_iter().flatten().collect();
            p.sort_unstable();
            prox.push(p);
            // the big axis survives only when the next center sits on it
            let translated = matches!(row, HNRow::Free { k, .. } if l >= *k);
            small = Some(n);
            if translated {
                big = None;
            }
        }
        std::mem::swap(&mut small, &mut big);
    }
    Configuration { prox }
}

pub fn graph_from_hn(hn: &HNExpansion) -> Result<DualGraph> {
    let mut g = configuration_from_hn(hn).to_graph();
    match hn.classify() {
        ValuationClass::Divisorial => g.arrow = Some(g.n),
        ValuationClass::Irrational => g.tail = hn.shape().gamma_cf.map(|c| c.canonical()),
        ValuationClass::Curve => {
            return Err(Error::Capability("curve expansions have no finite dual graph".into()))
        }
    }
    Ok(g)
}

impl DualGraph {
    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    fn check_tree(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::validation("graph has no vertices"));
        }
        for &(a, b) in &self.edges {
            if a == 0 || b > self.n || a >= b {
                return Err(Error::validation(format!("bad edge {a}-{b}")));
            }
        }
        if self.edges.len() != self.n - 1 {
            return Err(Error::validation("graph is not a tree"));
        }
        let mut seen = vec![false; self.n + 1];
        let mut stack = vec![1usize];
        seen[1] = true;
        while let Some(v) = stack.pop() {
            for w in self.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        if seen[1..].iter().any(|s| !s) {
            return Err(Error::validation("graph is not connected"));
        }
        for v in 1..=self.n {
            if self.degree(v) > 3 {
                return Err(Error::validation(format!(
                    "vertex {v} has degree {}; dual graphs of valuations have degree at most 3",
                    self.degree(v)
                )));
            }
        }
        if let Some(a) = self.arrow {
            if a != self.n {
                return Err(Error::validation("the arrow must sit on the last created vertex"));
            }
            if self.tail.is_some() {
                return Err(Error::validation("a graph has either an arrow or a tail"));
            }
        }
        if let Some(t) = &self.tail {
            t.check()?;
            if t.period.is_none() {
                return Err(Error::validation("tail must be eventually periodic"));
            }
        }
        Ok(())
    }

    /// Recovers proximities by removing vertices newest first.
    pub fn configuration(&self) -> Result<Configuration> {
        self.check_tree()?;
        let mut edges = self.edges.clone();
        let mut prox = vec![Vec::new(); self.n];
        for v in (2..=self.n).rev() {
            let nb: Vec<usize> = edges
                .iter()
                .filter_map(|&(a, b)| if b == v { Some(a) } else if a == v { Some(b) } else { None })
                .collect();
            if nb.iter().any(|&w| w > v) || !nb.contains(&(v - 1)) || nb.is_empty() || nb.len() > 2 {
                return Err(Error::validation(format!(
                    "vertex {v} does not come from blowing up a point on E_{}",
                    v - 1
                )));
            }
            for &w in &nb {
                edges.remove(&(w.min(v), w.max(v)));
            }
            if nb.len() == 2 {
                edges.insert((nb[0].min(nb[1]), nb[0].max(nb[1])));
            }
            let mut p = nb;
            p.sort_unstable();
            prox[v - 1] = p;
        }
        let conf = Configuration { prox };
        if conf.to_graph().edges != self.edges {
            return Err(Error::validation("graph is not realizable by point blow-ups"));
        }
        Ok(conf)
    }

    /// The expansion shape (coefficients zero except forced leading ones).
    pub fn hn_structure(&self) -> Result<HNExpansion> {
        let conf = self.configuration()?;
        let m = conf.values();
        let mut runs: Vec<(i64, u32)> = Vec::new();
        for &x in &m {
            match runs.last_mut() {
                Some((v, h)) if *v == x => *h += 1,
                _ => runs.push((x, 1)),
            }
        }
        let f = Field::Q;
        let value = |i: usize| if i < runs.len() { runs[i].0 } else { 0 };
        let mut rows = Vec::new();
        for (i, &(_, h)) in runs.iter().enumerate() {
            if i == 0 {
                rows.push(HNRow::Free {
                    k: 1,
                    h,
                    coeffs: vec![f.zero(); h as usize],
                });
                continue;
            }
            let (prev, cur) = (value(i - 1), value(i));
            if prev == h as i64 * cur + value(i + 1) {
                rows.push(HNRow::Power { h });
            } else if prev % cur == 0 && prev / cur >= 2 && prev / cur <= h as i64 {
                let k = (prev / cur) as u32;
                let mut coeffs = vec![f.zero(); (h - k + 1) as usize];
                coeffs[0] = f.one();
                rows.push(HNRow::Free { k, h, coeffs });
            } else {
                return Err(Error::validation("value sequence does not match any row shape"));
            }
        }
        let terminal = match &self.tail {
            Some(t) => {
                if let Some(HNRow::Power { h }) = rows.last().cloned() {
                    if rows.len() > 1 {
                        let mut coeffs = vec![f.zero(); 1];
                        coeffs[0] = f.one();
                        *rows.last_mut().expect("nonempty") = HNRow::Free { k: h, h, coeffs };
                    }
                }
                Terminal::Irrational { tail: t.canonical() }
            }
            None => Terminal::Divisorial,
        };
        let hn = HNExpansion::new(f, rows, terminal);
        hn.check()?;
        let back = graph_from_hn(&hn)?;
        if back.edges != self.edges {
            return Err(Error::validation("graph is not the dual graph of a valuation"));
        }
        Ok(hn)
    }

    pub fn class(&self) -> ValuationClass {
        if self.tail.is_some() {
            ValuationClass::Irrational
        } else {
            ValuationClass::Divisorial
        }
    }

    /// `E_i^2 = -1 - #{points proximate to p_i}`.
    pub fn self_intersections(&self) -> Result<Vec<i64>> {
        let conf = self.configuration()?;
        Ok((1..=self.n)
            .map(|i| -1 - conf.proximate_to(i).len() as i64)
            .collect())
    }

    pub fn star_vertices(&self) -> Vec<usize> {
        (1..=self.n).filter(|&v| self.degree(v) == 3).collect()
    }

    pub fn dead_ends(&self) -> Vec<usize> {
        (1..=self.n).filter(|&v| self.degree(v) == 1).collect()
    }
}

pub fn exponents_from_graph(g: &DualGraph) -> Result<Vec<Real>> {
    invariants::puiseux_exponents(&g.hn_structure()?)
}

pub fn configuration_from_graph(g: &DualGraph) -> Result<Configuration> {
    g.configuration()
}

/// Expansion shape with the given Puiseux exponents (see
/// [`invariants::InvariantBundle::puiseux`] for the list convention).
pub fn hn_structure_from_exponents(puiseux: &[Real]) -> Result<HNExpansion> {
    let bad = |m: &str| Error::validation(format!("malformed exponent list: {m}"));
    if puiseux.first() != Some(&Real::one()) {
        return Err(bad("must start with 1"));
    }
    let f = Field::Q;
    let free_row = |k: u32, h: u32, first: bool| {
        let mut coeffs = vec![f.zero(); (h - k + 1) as usize];
        if !first {
            coeffs[0] = f.one();
        }
        HNRow::Free { k, h, coeffs }
    };
    if puiseux.len() == 1 {
        return Ok(HNExpansion::new(f, vec![free_row(1, 1, true)], Terminal::Divisorial));
    }
    let mut rows = Vec::new();
    let mut k = 1u32;
    let n = puiseux.len() - 1;
    for (j, x) in puiseux[1..].iter().enumerate() {
        let is_last = j + 1 == n;
        if x <= &Real::one() {
            return Err(bad("exponents after the first exceed 1"));
        }
        match x {
            Real::Quad(_) => {
                if !is_last {
                    return Err(bad("only the last exponent may be irrational"));
                }
                let cf = cf_of_real(x)?;
                let c0 = cf.quotient(0).expect("nonempty") as u32;
                rows.push(free_row(k, c0 + k - 1, rows.is_empty()));
                let tail = cf.tail().expect("irrational");
                return Ok(HNExpansion::new(f, rows, Terminal::Irrational { tail }));
            }
            Real::Rat(r) if r.is_integer() => {
                if !is_last {
                    return Err(bad("an integer exponent can only close the list"));
                }
                let c = rat_floor(r);
                let c: u32 = c.try_into().map_err(|_| bad("exponent too large"))?;
                rows.push(free_row(k, c + k - 1, rows.is_empty()));
            }
            Real::Rat(r) => {
                let cf = crate::exactnum::cf_of_rat(r)?;
                let q = &cf.preperiod;
                rows.push(free_row(k, q[0] as u32 + k - 1, rows.is_empty()));
                for &c in &q[1..q.len() - 1] {
                    rows.push(HNRow::Power { h: c as u32 });
                }
                k = *q.last().expect("two terms at least") as u32;
                if is_last {
                    rows.push(HNRow::Power { h: k });
                }
            }
        }
    }
    let hn = HNExpansion::new(f, rows, Terminal::Divisorial);
    hn.check()?;
    Ok(hn)
}

pub fn graph_from_exponents(puiseux: &[Real]) -> Result<DualGraph> {
    graph_from_hn(&hn_structure_from_exponents(puiseux)?)
}

/// `b(Gamma)`: dimension of the coefficient space of valuations with this graph.
pub fn coefficient_space_dim(g: &DualGraph) -> Result<u64> {
    Ok(g.hn_structure()?.coefficient_slots())
}

pub fn export_dot(g: &DualGraph) -> String {
    let mut s = String::from("graph dual {\n");
    for v in 1..=g.n {
        if g.arrow == Some(v) {
            let _ = writeln!(s, "  {v} [label=\"{v}\", shape=doublecircle];");
        } else {
            let _ = writeln!(s, "  {v} [label=\"{v}\"];");
        }
    }
    for &(a, b) in &g.edges {
        let _ = writeln!(s, "  {a} -- {b};");
    }
    if let Some(t) = &g.tail {
        let _ = writeln!(s, "  tail [label=\"tail {t}\", shape=box];");
        let _ = writeln!(s, "  {} -- tail [style=dashed];", g.n);
    }
    s.push_str("}\n");
    s
}

pub fn write_graph(g: &DualGraph) -> String {
    let edges: Vec<String> = g.edges.iter().map(|(a, b)| format!("{a}-{b}")).collect();
    let mut s = format!("s={}\nedges: {}\n", g.n, edges.join(", "));
    if let Some(a) = g.arrow {
        let _ = writeln!(s, "arrow={a}");
    }
    if let Some(t) = &g.tail {
        let _ = writeln!(s, "tail={t}");
    }
    s
}

pub fn parse_graph(text: &str) -> Result<DualGraph> {
    let mut n = None;
    let mut edges = BTreeSet::new();
    let mut arrow = None;
    let mut tail = None;
    let mut keys: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let (key, val) = if let Some(v) = t.strip_prefix("edges:") {
            ("edges", v)
        } else if let Some((k, v)) = t.split_once('=') {
            (k.trim(), v)
        } else {
            return Err(Error::parse(line, 1, format!("unrecognized line {t:?}")));
        };
        if keys.insert(key, line).is_some() {
            return Err(Error::parse(line, 1, format!("duplicate key {key}")));
        }
        let num = |v: &str| {
            v.trim()
                .parse::<usize>()
                .map_err(|_| Error::parse(line, key.len() + 2, format!("bad number {v:?}")))
        };
        match key {
            "s" => n = Some(num(val)?),
            "arrow" => arrow = Some(num(val)?),
            "tail" => {
                tail = Some(ContFrac::parse(val).map_err(|e| Error::parse(line, 6, e.to_string()))?)
            }
            "edges" => {
                for e in val.split(',').map(str::trim).filter(|e| !e.is_empty()) {
                    let (a, b) = e
                        .split_once('-')
                        .ok_or_else(|| Error::parse(line, 8, format!("bad edge {e:?}")))?;
                    let (a, b) = (num(a)?, num(b)?);
                    edges.insert((a.min(b), a.max(b)));
                }
            }
            _ => return Err(Error::parse(line, 1, format!("unknown key {key:?}"))),
        }
    }
    let n = n.ok_or_else(|| Error::parse(1, 1, "missing s=<n>"))?;
    Ok(DualGraph {
        n,
        edges,
        arrow,
        tail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hn_model::build::*;

    fn r(s: &str) -> Real {
        Real::parse(s).unwrap()
    }

    #[test]
    fn w1_graph_and_back() {
        let g = graph_from_exponents(&[r("1"), r("3/2")]).unwrap();
        assert_eq!(g.n, 3);
        assert_eq!(g.edges, [(1, 3), (2, 3)].into_iter().collect());
        assert_eq!(g.arrow, Some(3));
        assert_eq!(exponents_from_graph(&g).unwrap(), vec![r("1"), r("3/2")]);
        assert_eq!(graph_from_hn(&w1(7)).unwrap(), g);
        let c = configuration_from_graph(&g).unwrap();
        assert_eq!(c.prox, vec![vec![], vec![1], vec![1, 2]]);
        assert!(c.is_satellite(3) && !c.is_satellite(2));
        assert_eq!(coefficient_space_dim(&g).unwrap(), 1);
        assert_eq!(g.self_intersections().unwrap(), vec![-3, -2, -1]);
    }

    #[test]
    fn chain_of_four() {
        let g = graph_from_exponents(&[r("1"), r("4")]).unwrap();
        assert_eq!(g.edges, [(1, 2), (2, 3), (3, 4)].into_iter().collect());
        assert_eq!(g.arrow, Some(4));
        assert_eq!(exponents_from_graph(&g).unwrap(), vec![r("1"), r("4")]);
        assert_eq!(coefficient_space_dim(&g).unwrap(), 4);
        let c = g.configuration().unwrap();
        assert!((1..=4).all(|i| !c.is_satellite(i) || i == 1));
    }

    #[test]
    fn irrational_marker() {
        let g = graph_from_exponents(&[r("1"), r("3/2")]).unwrap();
        let irr = graph_from_exponents(&[r("1"), r("1 + 1/(2 + sqrt(2)/2)")]).unwrap();
        assert_eq!(irr.n, 1);
        assert!(irr.tail.is_some());
        assert!(export_dot(&irr).contains("tail [label=\"tail [2;1,(2)]\""));
        let irr2 = graph_from_exponents(&[r("1"), r("3/2"), r("2 + sqrt(2)")]).unwrap();
        assert_eq!(irr2.n, 5);
        assert_eq!(irr2.edges.len(), 4);
        assert_eq!(exponents_from_graph(&irr2).unwrap(), vec![r("1"), r("3/2"), r("2 + sqrt(2)")]);
        assert_ne!(g, irr2);
    }

    #[test]
    fn degree_four_rejected() {
        let g = DualGraph {
            n: 5,
            edges: [(1, 2), (1, 3), (1, 4), (1, 5)].into_iter().collect(),
            arrow: Some(5),
            tail: None,
        };
        assert!(matches!(exponents_from_graph(&g), Err(Error::Validation(_))));
    }

    #[test]
    fn single_vertex_and_dot() {
        let g = graph_from_hn(&m_adic()).unwrap();
        assert_eq!(g.n, 1);
        assert_eq!(g.configuration().unwrap().prox, vec![Vec::<usize>::new()]);
        assert_eq!(
            export_dot(&g),
            "graph dual {\n  1 [label=\"1\", shape=doublecircle];\n}\n"
        );
        assert_eq!(exponents_from_graph(&g).unwrap(), vec![r("1")]);
    }

    #[test]
    fn free_tail_slots() {
        let hn = divisorial(vec![free0(&[0]), free(2, &[1, 0])]);
        let g = graph_from_hn(&hn).unwrap();
        assert_eq!(coefficient_space_dim(&g).unwrap(), 3);
        assert_eq!(g.hn_structure().unwrap().rows, hn.structural().rows);
    }

    #[test]
    fn file_round_trip() {
        let g = graph_from_exponents(&[r("1"), r("3/2")]).unwrap();
        let text = write_graph(&g);
        assert_eq!(text, "s=3\nedges: 1-3, 2-3\narrow=3\n");
        assert_eq!(parse_graph(&text).unwrap(), g);
        assert!(parse_graph("s=3\nedges: 1-3\nbogus\n").is_err());
    }
}
