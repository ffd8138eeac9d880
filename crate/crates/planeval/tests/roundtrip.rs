use planeval::corpus::{generate, ClassMix, CorpusSpec};
use planeval::dual_graph::{
    exponents_from_graph, graph_from_exponents, graph_from_hn, hn_structure_from_exponents, parse_graph,
    write_graph,
};
use planeval::hn_model::{parse_hn, write_hn};
use planeval::invariants::{compute, consistency_report};

#[test]
fn corpus_round_trips() {
    let spec = CorpusSpec { count: 300, max_rows: 5, max_h: 4, class: ClassMix::Mixed, ..CorpusSpec::default() };
    for hn in generate(&spec) {
        let text = write_hn(&hn);
        assert_eq!(parse_hn(&text).unwrap(), hn);
        let g = graph_from_hn(&hn).unwrap();
        assert_eq!(parse_graph(&write_graph(&g)).unwrap(), g);
        let s = g.hn_structure().unwrap_or_else(|e| panic!("{e}\n{text}"));
        assert!(s.same_structure(&hn), "{text}\n{s}");
        let p = exponents_from_graph(&g).unwrap();
        assert_eq!(p, compute(&hn).unwrap().puiseux);
        assert_eq!(graph_from_exponents(&p).unwrap(), g, "{text}");
        assert!(hn_structure_from_exponents(&p).unwrap().same_structure(&hn));
        let b = compute(&hn).unwrap();
        assert!(consistency_report(&b).is_empty(), "{text}: {:?}", consistency_report(&b));
    }
}
