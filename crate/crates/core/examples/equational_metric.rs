//! Upper bounds on the equational metric come with checkable derivations.

use linmetric::equational::{check_qderivation, equ_upper_bound, QDerivation};
use linmetric::registry::SymbolRegistry;
use linmetric::syntax::{parse_context_term, parse_env, parse_term, Env, Type};
use linmetric::typing::Context;

fn main() {
    let reg = SymbolRegistry::standard();
    let env = parse_env("k:R -o I").unwrap();
    let (m, n) = (parse_term("k 2.0", &reg).unwrap(), parse_term("k 3.0", &reg).unwrap());
    let (r, cert) = equ_upper_bound(&env, &Type::I, &m, &n, &reg).unwrap();
    let cert = cert.expect("same skeleton");
    println!(
        "{m} ~_{r} {n}, certificate of {} rules, checks to {}",
        cert.size(),
        check_qderivation(&cert, &reg).unwrap()
    );

    // The same fact by hand: the axiom |2 - 3| <= 1 under the context k [-].
    let ctx = Context::new(parse_context_term("k [-]", &reg).unwrap()).unwrap();
    let by_hand = QDerivation::ctx(ctx, &env, &Type::I, QDerivation::const_axiom(2.0, 3.0));
    println!("by hand: {}", check_qderivation(&by_hand, &reg).unwrap());

    let id = parse_term(r"\x:R. x", &reg).unwrap();
    let s = parse_term(r"\x:R. sin(x)", &reg).unwrap();
    let (r, cert) = equ_upper_bound(&Env::empty(), &Type::lolli(Type::R, Type::R), &id, &s, &reg).unwrap();
    println!("{id} vs {s}: {r}, certificate: {}", cert.is_some());
}
