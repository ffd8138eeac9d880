use std::fs;

use planeval::corpus::{generate, CorpusSpec};
use planeval::dual_graph::{export_dot, write_graph, DualGraph};
use planeval::evaluation::{
    chart_convert, invariant_units, value_irrational_by_limit, value_normalized, value_proximity,
    value_substitution, BivarPoly, Chart, LimitOpts,
};
use planeval::exactnum::{rat, rat_text, Rat, Real};
use planeval::hn_model::{sample_very_general, write_hn, HNExpansion, ValuationClass};
use planeval::invariants::{self, consistency_report, eq_delta_check, semigroup_generators};
use planeval::linear_systems::{mu_hat_report, vanishing_sequence, UpperRule};
use planeval::minimality::{
    appended_count, asymptotic_experiment, build_gamma_k_a, certify_minimal_family, enlarge_to_minimal,
    family_b, g_matrix, iota, lipschitz_probe, npi_test, p_sufficiency, satellite_nonminimality_check,
    simplex_minimum, vdelta, Certification, Iota, PMode, VDeltaParams, EXACT_COPOSITIVE_MAX,
};
use planeval::Error;

use crate::input::{load_graph, load_hn, load_int_rows, load_rat_list, rat_arg, CliError, CliResult};
use crate::report::{one, real_fields, Report};
use crate::{ChartArg, Cmd, CorpusArgs, EvalArgs, MuArgs};

pub fn run(cmd: &Cmd) -> CliResult<Report> {
    match cmd {
        Cmd::Invariants { path } => cmd_invariants(&load_hn(path)?),
        Cmd::Eval(a) => cmd_eval(a),
        Cmd::Mu(a) => cmd_mu(a),
        Cmd::Npi { path } => cmd_npi(&load_hn(path)?),
        Cmd::Certify { path } => cmd_certify(&load_graph(path)?),
        Cmd::Family { omega, k, a } => cmd_family(&load_graph(omega)?, *k, a),
        Cmd::Vdelta { delta, t } => {
            let params = delta_params(delta.as_deref())?;
            cmd_vdelta(&params, t)
        }
        Cmd::Asymptotic { t_list } => cmd_asymptotic(&load_rat_list(t_list)?),
        Cmd::Lipschitz { delta, poly, samples } => {
            let params = delta_params(delta.as_deref())?;
            cmd_lipschitz(&params, poly, samples)
        }
        Cmd::Psuff { matrix, allow_fallback } => cmd_psuff(&load_int_rows(matrix)?, *allow_fallback),
        Cmd::Corpus(a) => cmd_corpus(a),
        Cmd::Graph { path, dot } => {
            let g = load_graph(path)?;
            let mut r = Report::new();
            if *dot {
                r.block("dot", &export_dot(&g));
            } else {
                r.block("graph", &write_graph(&g));
            }
            Ok(r)
        }
    }
}

fn delta_params(path: Option<&std::path::Path>) -> CliResult<VDeltaParams> {
    Ok(match path {
        Some(p) => VDeltaParams::new(&load_hn(p)?)?,
        None => VDeltaParams::smooth(),
    })
}

fn graph_fields(r: &mut Report, g: &DualGraph) {
    r.field("vertices", g.n);
    r.list("edges", g.edges.iter().map(|(a, b)| format!("{a}-{b}")));
    if let Some(a) = g.arrow {
        r.field("arrow", a);
    }
    if let Some(t) = &g.tail {
        r.field("tail", t);
    }
}

pub fn cmd_invariants(hn: &HNExpansion) -> CliResult<Report> {
    if hn.classify() == ValuationClass::Curve {
        return Err(Error::validation(
            "unsupported class for invariants: curve expansions are anchors only; use vdelta",
        )
        .into());
    }
    let b = invariants::compute(hn)?;
    let mut r = Report::new();
    r.field("class", b.class).field("g", b.g);
    r.list("m", &b.m);
    r.list("puiseux", &b.puiseux);
    r.list("charseq", &b.charseq);
    r.list("maxcontact", &b.maxcontact);
    r.list("e", &b.eseq);
    r.list("n", &b.nseq);
    r.real("vol_inv", &b.vol_inv);
    r.real("vol_inv_normalized", &b.vol_inv_normalized);
    if b.class == ValuationClass::Divisorial {
        r.list("semigroup", semigroup_generators(&b)?);
    }
    r.field("eq_delta", if eq_delta_check(&b) { "ok" } else { "failed" });
    let bad = consistency_report(&b);
    if bad.is_empty() {
        r.field("consistency", "ok");
    } else {
        r.list("consistency_failures", bad);
    }
    Ok(r)
}

fn cmd_eval(a: &EvalArgs) -> CliResult<Report> {
    let hn = load_hn(&a.path)?;
    let f = match a.chart {
        ChartArg::Local => BivarPoly::parse(&a.poly, hn.field, Chart::Local)?,
        ChartArg::Affine => {
            let g = BivarPoly::parse(&a.poly, hn.field, Chart::Affine)?;
            let d = a.degree.unwrap_or_else(|| g.degree());
            chart_convert(&g, d)?
        }
    };
    let v = value_substitution(&hn, &f)?;
    let vn = value_normalized(&hn, &f)?;
    let mut r = Report::new();
    let mut line = vec![one("value", &v)];
    line.extend(real_fields("normalized", &vn));
    r.record(line);
    if let Some(g) = hn.gamma() {
        r.real("gamma", &g);
    }
    if a.both_methods {
        let p = value_proximity(&hn, &f)?;
        if v.p != p || v.q != 0 {
            return Err(Error::validation(format!("oracles disagree: substitution {v}, proximity {p}")).into());
        }
        r.record(vec![one("substitution", &v), one("proximity", p), one("agree", "yes")]);
    }
    if a.limit {
        let iv = value_irrational_by_limit(&hn, &f, &LimitOpts::default())?;
        r.record(vec![
            one("limit_lo", rat_text(&iv.lo)),
            one("limit_hi", rat_text(&iv.hi)),
            one("truncations", iv.values.len()),
            one("contains_exact", if iv.contains(&vn) { "yes" } else { "no" }),
        ]);
    }
    Ok(r)
}

fn cmd_mu(a: &MuArgs) -> CliResult<Report> {
    let mut hn = load_hn(&a.path)?;
    let field = a.field.unwrap_or(hn.field);
    if let Some(seed) = a.seed {
        hn = sample_very_general(&hn.structural(), field, seed);
    } else if field != hn.field {
        hn = hn.map_field(field);
    }
    let rep = mu_hat_report(&hn, a.degree_max)?;
    let mut r = Report::new();
    r.field("field", field.text());
    for (d, m) in &rep.per_degree {
        let mut row = vec![one("d", d), one("mu_d", m)];
        row.extend(real_fields("ratio", &m.scale(&rat(1, *d as i64))));
        r.record(row);
        if a.emit_sequence {
            let seq = vanishing_sequence(&hn, *d)?;
            let vals: Vec<Real> = seq
                .values
                .iter()
                .map(|v| invariant_units(&hn, v))
                .collect::<Result<_, _>>()?;
            r.list(&format!("sequence_{d}"), vals);
        }
    }
    let mut low = real_fields("lower", &rep.lower);
    low.push(one("lower_at", rep.lower_at));
    r.record(low);
    match &rep.upper {
        Some((u, rule)) => {
            let mut row = real_fields("upper", u);
            match rule {
                UpperRule::Beta1 => row.push(one("rule", "beta1")),
                UpperRule::MinA(a) => {
                    row.push(one("rule", "beta0*minA"));
                    row.push(one("min_a", a));
                }
            }
            row.push(one("scope", "very-general"));
            r.record(row);
        }
        None => {
            r.field("upper", "none");
        }
    }
    match &rep.exact {
        Some(x) => r.real("exact", x),
        None => r.field("exact", "unknown"),
    };
    Ok(r)
}

fn cmd_npi(hn: &HNExpansion) -> CliResult<Report> {
    let mut r = Report::new();
    let Some(w) = npi_test(hn)? else {
        r.field("npi", "fails");
        return Ok(r);
    };
    r.field("npi", "passes");
    r.record(vec![
        one("nu_u", &w.nu_u),
        one("nu_v", &w.nu_v),
        one("last_mcv", w.last_mcv),
        one("slack", w.slack),
    ]);
    r.field("mu_hat", &w.nu_v);
    if hn.is_m_adic() {
        return Ok(r);
    }
    if let Ok(sat) = satellite_nonminimality_check(&w) {
        r.field("satellite_nonminimal", if sat { "yes" } else { "no" });
    }
    let e = enlarge_to_minimal(&w)?;
    r.field("minimal_points", e.graph.n);
    r.block("minimal_graph", &write_graph(&e.graph));
    Ok(r)
}

fn cmd_certify(g: &DualGraph) -> CliResult<Report> {
    let mut r = Report::new();
    match certify_minimal_family(g)? {
        Certification::Certified(c) => {
            r.field("status", "certified");
            r.record(vec![one("k", c.k), one("a", rat_text(&c.a)), one("appended", c.appended)]);
            r.field(
                "line_points",
                c.line_points.map_or_else(|| "all".to_string(), |j| j.to_string()),
            );
            r.record(vec![one("nu_u", c.nu_u), one("nu_v", c.nu_v), one("last_mcv", c.last_mcv)]);
            r.field("mu_hat_normalized", rat_text(&c.mu_hat_normalized));
            r.field("vol_inv_normalized", rat_text(&c.vol_inv_normalized));
            r.block("omega", &write_hn(&c.omega));
            r.block("placement", &write_hn(&c.placement));
        }
        Certification::Rejected(rej) => {
            r.field("status", "rejected");
            r.field("reason", &rej.reason);
            r.field("last_mcv", rej.last_mcv);
            r.list("tried", rej.tried.iter().map(|(v, sq)| format!("{v}:{sq}")));
        }
    }
    Ok(r)
}

fn iota_text(i: &Iota) -> String {
    match i {
        Iota::MinusInfinity => "-inf".into(),
        Iota::Value(x) => x.to_string(),
    }
}

fn cmd_family(omega: &DualGraph, k: u32, a: &str) -> CliResult<Report> {
    let a = rat_arg(a)?;
    let b = invariants::compute(&omega.hn_structure()?)?;
    let mut r = Report::new();
    r.field("iota", iota_text(&iota(&b)?));
    r.list("B", family_b(&b, k as i64)?.iter().map(rat_text));
    let g = build_gamma_k_a(omega, k, &a)?;
    r.field("appended", appended_count(&b, k, &a)?);
    graph_fields(&mut r, &g);
    Ok(r)
}

fn cmd_vdelta(params: &VDeltaParams, t: &str) -> CliResult<Report> {
    let t = Real::parse(t).map_err(Error::from)?;
    let hn = vdelta(params, &t)?;
    let b = invariants::compute(&hn)?;
    let mut r = Report::new();
    r.record(vec![one("A", rat_text(&params.a)), one("B", rat_text(&params.b))]);
    r.real("t", &t);
    r.real("exponent", &params.exponent(&t)?);
    r.real("vol_inv_normalized", &b.vol_inv_normalized);
    r.block("expansion", &write_hn(&hn));
    Ok(r)
}

fn cmd_asymptotic(ts: &[Rat]) -> CliResult<Report> {
    let mut r = Report::new();
    for row in asymptotic_experiment(ts)? {
        let mut rec = vec![
            one("t", rat_text(&row.t)),
            one("line_points", row.line_points),
            one("beta0", row.beta0),
            one("nu_v", row.nu_v),
            one("last_mcv", row.last_mcv),
        ];
        rec.extend(real_fields("ratio", &row.ratio));
        r.record(rec);
    }
    Ok(r)
}

fn cmd_lipschitz(params: &VDeltaParams, poly: &str, samples: &str) -> CliResult<Report> {
    let f = BivarPoly::parse(poly, params.delta.field, Chart::Local)?;
    let samples = samples
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(rat_arg)
        .collect::<Result<Vec<_>, _>>()?;
    let rep = lipschitz_probe(params, &f, &samples)?;
    let mut r = Report::new();
    for (t, v) in &rep.table {
        r.record(vec![one("t", rat_text(t)), one("value", rat_text(v))]);
    }
    r.field("max_quotient", rat_text(&rep.max_quotient));
    Ok(r)
}

fn cmd_psuff(rows: &[Vec<i64>], allow_fallback: bool) -> CliResult<Report> {
    if rows.is_empty() {
        return Err(Error::domain("the matrix file has no rows").into());
    }
    let g = g_matrix(rows);
    let strict = p_sufficiency(&g, PMode::Strict, allow_fallback)?;
    let almost = p_sufficiency(&g, PMode::Almost, allow_fallback)?;
    let mut r = Report::new();
    for (i, row) in g.g.iter().enumerate() {
        r.list(&format!("G{}", i + 1), row);
    }
    if g.size() <= EXACT_COPOSITIVE_MAX || allow_fallback {
        r.field("simplex_min", rat_text(&simplex_minimum(&g)));
    }
    r.field("p_sufficient", if strict { "yes" } else { "no" });
    r.field("almost_p_sufficient", if almost { "yes" } else { "no" });
    Ok(r)
}

fn cmd_corpus(a: &CorpusArgs) -> CliResult<Report> {
    let spec = CorpusSpec {
        count: a.count,
        max_rows: a.max_rows,
        max_h: a.max_h,
        class: a.class.into(),
        field: a.field,
        seed: a.seed,
    };
    let write = |p: &std::path::Path, text: &str| {
        fs::write(p, text).map_err(|source| CliError::Write {
            path: p.to_path_buf(),
            source,
        })
    };
    fs::create_dir_all(&a.out).map_err(|source| CliError::Write {
        path: a.out.clone(),
        source,
    })?;
    let cases = generate(&spec);
    let width = cases.len().saturating_sub(1).to_string().len().max(4);
    for (i, hn) in cases.iter().enumerate() {
        write(&a.out.join(format!("case_{i:0width$}.hn")), &write_hn(hn))?;
    }
    let mut r = Report::new();
    r.record(vec![one("written", cases.len()), one("seed", a.seed)]);
    r.field("out", a.out.display());
    Ok(r)
}
