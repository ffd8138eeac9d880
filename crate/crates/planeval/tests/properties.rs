use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use planeval::corpus::{random_hn, random_poly, rng, CorpusSpec};
use planeval::dual_graph::{configuration_from_hn, graph_from_hn};
use planeval::evaluation::{
    invariant_units, value_irrational_by_limit, value_normalized, value_substitution, BivarPoly, LimitOpts,
};
use planeval::exactnum::{cf_eval, cf_of_rat, cf_of_real, rat, rint, valelem_cmp, ContFrac, QuadIrr, Rat, Real, ValElem};
use planeval::hn_model::{parametrize_trunc, sample_very_general, Field, HNExpansion, HNRow, Terminal, DEFAULT_PRIME};
use planeval::invariants::{self, value_sequence};
use planeval::linear_systems::{h0_unibranch, mu_d, vanishing_sequence};
use planeval::minimality::{
    appended_count, asymptotic_row, enlarge_to_minimal, family_b, g_matrix, gamma_k_hn, iota, line_placement,
    npi_test, p_sufficiency, Iota, simplex_minimum, vdelta, GMatrix, PMode, VDeltaParams,
};
use planeval::poly::{Poly2, Trunc};

fn hn_for(seed: u64, irrational: bool, field: Field) -> HNExpansion {
    let spec = CorpusSpec { max_rows: 3, max_h: 3, field, ..CorpusSpec::default() };
    random_hn(&mut rng(seed), &spec, irrational)
}

fn field_of(fp: bool) -> Field {
    if fp {
        Field::Fp(DEFAULT_PRIME)
    } else {
        Field::Q
    }
}

fn to_f64(x: &Real) -> f64 {
    x.approx(15).parse().unwrap()
}

fn cf_quotients() -> impl Strategy<Value = Vec<u64>> {
    (1u64..6, prop::collection::vec(1u64..6, 0..5), 2u64..6).prop_map(|(a0, mid, last)| {
        let mut q = vec![a0];
        q.extend(mid);
        q.push(last);
        q
    })
}

fn quad() -> impl Strategy<Value = Real> {
    (-20i64..20, 1i64..5, -9i64..9, 1i64..5, prop::sample::select(vec![2i64, 3, 5, 6, 7, 10]))
        .prop_map(|(a, ad, b, bd, d)| QuadIrr::new(rat(a, ad), rat(b, bd), BigInt::from(d)))
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(64) })]

    #[test]
    fn cf_rat_round_trip(q in cf_quotients()) {
        let cf = ContFrac::finite(q);
        let x = cf_eval(&cf).unwrap();
        prop_assert_eq!(cf_of_rat(x.as_rat().unwrap()).unwrap(), cf);
    }

    #[test]
    fn rat_cf_round_trip(n in 1i64..500, d in 1i64..60) {
        let x = rat(n + d, d);
        prop_assert_eq!(cf_eval(&cf_of_rat(&x).unwrap()).unwrap(), Real::Rat(x));
    }

    #[test]
    fn canonical_cf_keeps_value(
        pre in prop::collection::vec(1u64..4, 1..4),
        period in prop::collection::vec(1u64..4, 1..3),
        reps in 1usize..3,
    ) {
        let long: Vec<u64> = period.iter().cycle().take(period.len() * reps).copied().collect();
        let cf = ContFrac::periodic(pre, long);
        let c = cf.canonical();
        prop_assert_eq!(cf_eval(&c).unwrap(), cf_eval(&cf).unwrap());
        prop_assert_eq!(c.canonical(), c.clone());
        prop_assert_eq!(cf_of_real(&cf_eval(&c).unwrap()).unwrap(), c);
    }

    #[test]
    fn quadratic_order_matches_floats(x in quad(), y in quad()) {
        let (fx, fy) = (to_f64(&x), to_f64(&y));
        if (fx - fy).abs() > 1e-9 {
            prop_assert_eq!(x.cmp(&y), fx.partial_cmp(&fy).unwrap());
        }
        if x.radicand() == y.radicand() || x.is_rational() || y.is_rational() {
            let s = x.try_add(&y).unwrap();
            prop_assert!((to_f64(&s) - (fx + fy)).abs() < 1e-9);
            let p = x.try_mul(&y).unwrap();
            prop_assert!((to_f64(&p) - fx * fy).abs() < 1e-8);
        }
    }

    #[test]
    fn value_order_respects_addition(
        x in (-30i64..30, -5i64..5), y in (-30i64..30, -5i64..5), z in (-30i64..30, -5i64..5),
        d in prop::sample::select(vec![2i64, 3, 5]),
    ) {
        let g = Some(Real::sqrt_rat(&rint(d)).unwrap());
        let v = |(p, q): (i64, i64)| ValElem::new(p, q, g.clone());
        let (x, y, z) = (v(x), v(y), v(z));
        let o = valelem_cmp(&x, &y).unwrap();
        prop_assert_eq!(o, x.real().cmp(&y.real()));
        let xz = x.checked_add(&z).unwrap();
        let yz = y.checked_add(&z).unwrap();
        prop_assert_eq!(valelem_cmp(&xz, &yz).unwrap(), o);
    }

    #[test]
    fn classify_ignores_coefficients(seed in any::<u64>(), irr in any::<bool>(), s2 in any::<u64>()) {
        let hn = hn_for(seed, irr, Field::Q);
        let other = sample_very_general(&hn.structural(), Field::Q, s2);
        prop_assert_eq!(other.classify(), hn.classify());
        prop_assert!(other.same_structure(&hn));
    }

    #[test]
    fn nu_u_is_beta0(seed in any::<u64>(), irr in any::<bool>()) {
        let hn = hn_for(seed, irr, Field::Q);
        let b = invariants::compute(&hn).unwrap();
        let u = BivarPoly::local(Poly2::x(Field::Q));
        let v = value_substitution(&hn, &u).unwrap();
        prop_assert_eq!(invariant_units(&hn, &v).unwrap(), b.maxcontact[0].clone());
    }

    #[test]
    fn maximal_ideal_is_normalized(seed in any::<u64>(), irr in any::<bool>()) {
        let hn = hn_for(seed, irr, Field::Q);
        let u = value_normalized(&hn, &BivarPoly::local(Poly2::x(Field::Q))).unwrap();
        let v = value_normalized(&hn, &BivarPoly::local(Poly2::y(Field::Q))).unwrap();
        prop_assert_eq!(u.min(v), Real::one());
    }

    #[test]
    fn noether_and_gcd_chain(seed in any::<u64>()) {
        let hn = hn_for(seed, false, Field::Q);
        let b = invariants::compute(&hn).unwrap();
        let sq: i64 = b.m.iter().map(|m| m * m).sum();
        prop_assert_eq!(b.last_mcv().clone(), Real::int(sq));
        let mcv = b.maxcontact_int().unwrap();
        let mut e = 0i64;
        for (j, &x) in mcv.iter().enumerate().take(b.eseq.len()) {
            e = num_integer::gcd(e, x);
            prop_assert_eq!(b.eseq[j], e);
        }
        prop_assert_eq!(*b.eseq.last().unwrap(), 1);
    }

    #[test]
    fn graph_size_and_proximity_equalities(seed in any::<u64>()) {
        let hn = hn_for(seed, false, Field::Q);
        let m = value_sequence(&hn).unwrap();
        let g = graph_from_hn(&hn).unwrap();
        prop_assert_eq!(g.n, m.len());
        let conf = configuration_from_hn(&hn);
        for i in 1..m.len() {
            let prox = conf.proximate_to(i);
            if !prox.is_empty() {
                prop_assert_eq!(m[i - 1], prox.iter().map(|&j| m[j - 1]).sum::<i64>());
            }
        }
    }

    #[test]
    fn valuation_axioms(seed in any::<u64>(), irr in any::<bool>(), fp in any::<bool>()) {
        let field = field_of(fp);
        let hn = hn_for(seed, irr, field);
        let mut r = rng(seed.wrapping_add(1));
        let f = random_poly(&mut r, field, 3, 3);
        let g = random_poly(&mut r, field, 3, 3);
        let vf = value_substitution(&hn, &f).unwrap();
        let vg = value_substitution(&hn, &g).unwrap();
        let vfg = value_substitution(&hn, &f.mul(&g)).unwrap();
        prop_assert_eq!(valelem_cmp(&vfg, &vf.checked_add(&vg).unwrap()).unwrap(), Ordering::Equal);
        let s = f.add(&g);
        if !s.is_zero() {
            let vs = value_substitution(&hn, &s).unwrap();
            let lo = if valelem_cmp(&vf, &vg).unwrap() == Ordering::Greater { &vg } else { &vf };
            let o = valelem_cmp(&vs, lo).unwrap();
            prop_assert_ne!(o, Ordering::Less);
            if valelem_cmp(&vf, &vg).unwrap() != Ordering::Equal {
                prop_assert_eq!(o, Ordering::Equal);
            }
        }
    }

    #[test]
    fn limit_interval_contains_exact(seed in any::<u64>()) {
        let hn = hn_for(seed, true, Field::Q);
        let f = random_poly(&mut rng(seed ^ 17), Field::Q, 3, 3);
        let exact = value_normalized(&hn, &f).unwrap();
        let iv = value_irrational_by_limit(&hn, &f, &LimitOpts::default()).unwrap();
        prop_assert!(iv.contains(&exact), "{} not in [{}, {}]", exact, iv.lo, iv.hi);
    }

    #[test]
    fn npi_enlargement_reaches_equality(seed in any::<u64>()) {
        let hn = hn_for(seed, false, Field::Q);
        if let Some(w) = npi_test(&line_placement(&hn, None)).unwrap() {
            if !hn.is_m_adic() {
                let e = enlarge_to_minimal(&w).unwrap();
                let b = invariants::compute(&e.hn).unwrap();
                prop_assert_eq!(b.last_mcv().clone(), Real::int(w.nu_v.p * w.nu_v.p));
                let root = Real::sqrt_rat(&(b.vol_inv_normalized.as_rat().unwrap().clone())).unwrap();
                let mu = Real::Rat(rat(w.nu_v.p, b.beta0()));
                prop_assert_eq!(root, mu);
            }
        }
    }

    #[test]
    fn appended_counts_are_nonnegative(seed in any::<u64>(), dk in 0i64..3) {
        let omega = hn_for(seed, false, Field::Q);
        let b = invariants::compute(&omega).unwrap();
        prop_assume!(!b.is_m_adic());
        let start = match iota(&b).unwrap() {
            Iota::MinusInfinity => 0,
            Iota::Value(x) => x.ceil().try_into().unwrap_or(0i64).max(0),
        };
        let k = start + dk;
        for a in family_b(&b, k).unwrap() {
            prop_assert!(appended_count(&b, k as u32, &a).is_ok(), "k = {}, a = {}", k, a);
        }
    }

    #[test]
    fn shifted_maximal_contact_matches_recount(seed in any::<u64>(), k in 0u32..4) {
        let omega = hn_for(seed, false, Field::Q);
        prop_assume!(!omega.is_m_adic());
        let g = gamma_k_hn(&omega, k).unwrap();
        let b = invariants::compute(&g).unwrap();
        let sq: i64 = value_sequence(&g).unwrap().iter().map(|m| m * m).sum();
        prop_assert_eq!(b.last_mcv().clone(), Real::int(sq));
    }

    #[test]
    fn unibranch_diagonal_and_scalar_sign(row in prop::collection::vec(0i64..6, 1..8), x in -50i64..50) {
        let s: i64 = row.iter().sum();
        let sq: i64 = row.iter().map(|m| m * m).sum();
        prop_assert_eq!(g_matrix(&[row]).g[0][0], 9 * sq - s * s);
        let one = GMatrix { g: vec![vec![x]] };
        prop_assert_eq!(p_sufficiency(&one, PMode::Strict, false).unwrap(), x > 0);
        prop_assert_eq!(p_sufficiency(&one, PMode::Almost, false).unwrap(), x >= 0);
    }

    #[test]
    fn copositivity_against_grid(entries in prop::collection::vec(-9i64..10, 6)) {
        let e = &entries;
        let g = GMatrix { g: vec![vec![e[0], e[1], e[2]], vec![e[1], e[3], e[4]], vec![e[2], e[4], e[5]]] };
        let min = simplex_minimum(&g);
        let n = 24i64;
        let mut grid: Option<Rat> = None;
        for i in 0..=n {
            for j in 0..=n - i {
                let x = [rat(i, n), rat(j, n), rat(n - i - j, n)];
                let mut q = Rat::zero();
                for (a, xa) in x.iter().enumerate() {
                    for (b, xb) in x.iter().enumerate() {
                        q += xa * xb * rint(g.g[a][b]);
                    }
                }
                grid = Some(grid.map_or(q.clone(), |m: Rat| m.min(q)));
            }
        }
        let grid = grid.unwrap();
        prop_assert!(min <= grid);
        prop_assert!(&grid - &min <= rat(9 * 3 * 4, n));
        let strict = p_sufficiency(&g, PMode::Strict, false).unwrap();
        prop_assert_eq!(strict, min.is_positive());
        let sub = GMatrix { g: vec![vec![e[0], e[1]], vec![e[1], e[3]]] };
        prop_assert_eq!(p_sufficiency(&sub, PMode::Almost, false).unwrap(), !simplex_minimum(&sub).is_negative());
    }

    #[test]
    fn vdelta_inverts_volume(n in 1i64..200, d in 1i64..12, cusp in any::<bool>()) {
        let params = if cusp { cusp_params() } else { VDeltaParams::smooth() };
        let t = &params.interval_lo + rat(n, d);
        let hn = vdelta(&params, &Real::Rat(t.clone())).unwrap();
        let b = invariants::compute(&hn).unwrap();
        prop_assert_eq!(&b.vol_inv_normalized, &Real::Rat(t.clone()));
        let bp = params.exponent(&Real::Rat(t.clone())).unwrap();
        let back = bp.add_rat(&-Rat::one()).scale(&params.a).add_rat(&params.b);
        prop_assert_eq!(back, Real::Rat(t));
    }

    #[test]
    fn vdelta_quadratic_t(a in 2i64..30, d in prop::sample::select(vec![2i64, 3, 5, 7])) {
        let t = Real::sqrt_rat(&rint(d)).unwrap().add_rat(&rint(a));
        let hn = vdelta(&VDeltaParams::smooth(), &t).unwrap();
        prop_assert_eq!(invariants::compute(&hn).unwrap().vol_inv_normalized, t);
    }

    #[test]
    fn asymptotic_ratio_bounds(n in 2i64..400, d in 1i64..4) {
        let row = asymptotic_row(&rat(n * d + 1, d)).unwrap();
        let top = Real::sqrt_rat(&rint(2)).unwrap();
        prop_assert!(row.ratio >= Real::one() && row.ratio <= top);
    }
}

// exact elimination at the safe cap is the slow path
proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(16) })]

    #[test]
    fn raising_the_cap_keeps_the_value(seed in any::<u64>(), extra in 1u32..20) {
        let hn = hn_for(seed, false, Field::Q);
        let f = random_poly(&mut rng(seed ^ 9), Field::Q, 4, 4);
        let want = value_substitution(&hn, &f).unwrap();
        let total: i64 = value_sequence(&hn).unwrap().iter().sum();
        let cap = f.degree() * total as u32 + 1 + extra;
        let cap = Some(Trunc::x(cap));
        let par = parametrize_trunc(&hn, cap).unwrap();
        let img = f.poly.compose(&par.u, &par.v, cap);
        let got = img.terms().map(|(&(i, _), _)| i).min().unwrap();
        prop_assert_eq!(ValElem::int(got as i64), want);
    }

    #[test]
    fn vanishing_sequence_consistency(seed in any::<u64>()) {
        let hn = hn_for(seed, false, Field::Q);
        let mut mu = vec![ValElem::int(0)];
        for d in 1..=3u32 {
            let seq = vanishing_sequence(&hn, d).unwrap();
            prop_assert_eq!(seq.values.len() as u32, (d + 1) * (d + 2) / 2);
            let m = mu_d(&hn, d).unwrap();
            prop_assert_eq!(seq.max(), &m);
            prop_assert!(h0_unibranch(&hn, d, &m).unwrap() >= 1);
            prop_assert_eq!(h0_unibranch(&hn, d, &ValElem::int(m.p + 1)).unwrap(), 0);
            prop_assert_eq!(h0_unibranch(&hn, d, &ValElem::int(0)).unwrap() as u32, (d + 1) * (d + 2) / 2);
            mu.push(m);
        }
        for a in 1..=3usize {
            for b in 1..=3 - a {
                prop_assert!(mu[a + b].p >= mu[a].p + mu[b].p);
            }
        }
    }
}

fn cusp_params() -> VDeltaParams {
    let f = Field::Q;
    let cusp = HNExpansion::new(
        f,
        vec![
            HNRow::Free { k: 1, h: 1, coeffs: vec![f.zero()] },
            HNRow::Free { k: 2, h: 2, coeffs: vec![f.one()] },
        ],
        Terminal::Curve,
    );
    VDeltaParams::new(&cusp).unwrap()
}
