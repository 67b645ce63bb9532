//! Seeded generation of well-typed, beta-normal terms and related pairs.

use linmetric::corpus::{Corpus, PairKind};
use linmetric::registry::SymbolRegistry;

fn main() {
    let reg = SymbolRegistry::standard();
    let mut corpus = Corpus::new(42, &reg);
    for _ in 0..4 {
        let s = corpus.normal_term();
        println!("{} |- {} : {}", s.env, s.term, s.ty);
    }
    let s = corpus.closed_observable();
    println!("closed: {} : {}", s.term, s.ty);
    for kind in [PairKind::Perturbed, PairKind::SwappedSymbol, PairKind::WithRedex] {
        let p = corpus.pair(kind);
        println!("{kind:?}: {}  vs  {}", p.m, p.n);
    }
}
