use planeval::corpus::{generate, random_poly, rng, ClassMix, CorpusSpec};
use planeval::evaluation::{value_proximity, value_substitution};
use planeval::exactnum::ValElem;
use planeval::hn_model::{Field, DEFAULT_PRIME};
use planeval::linear_systems::mu_d;
use planeval::minimality::{line_placement, npi_test};

fn pairs(field: Field, seed: u64, n: usize) {
    let spec = CorpusSpec { count: n, max_rows: 3, max_h: 3, class: ClassMix::Divisorial, field, seed };
    let mut r = rng(seed ^ 0x5eed);
    for hn in generate(&spec) {
        let f = random_poly(&mut r, field, 6, 4);
        let a = value_substitution(&hn, &f).unwrap();
        let b = value_proximity(&hn, &f).unwrap();
        assert_eq!(a, ValElem::int(b), "{hn}\nf = {f}");
    }
}

#[test]
fn substitution_matches_proximity_over_q() {
    pairs(Field::Q, 3, 100);
}

#[test]
fn substitution_matches_proximity_over_fp() {
    pairs(Field::Fp(DEFAULT_PRIME), 4, 100);
}

#[test]
fn npi_linear_growth() {
    let spec = CorpusSpec { count: 40, max_rows: 3, max_h: 3, class: ClassMix::Divisorial, ..CorpusSpec::default() };
    let mut seen = 0;
    for hn in generate(&spec) {
        let p = line_placement(&hn, None);
        let Some(w) = npi_test(&p).unwrap() else { continue };
        seen += 1;
        for d in 1..=4 {
            assert_eq!(mu_d(&p, d).unwrap(), ValElem::int(d as i64 * w.nu_v.p), "{p}");
        }
    }
    assert!(seen > 5);
}
