//! The denotational engine: exact where the codomain or the terms allow,
//! otherwise a probe-battery lower bound and a certified upper bound.

use linmetric::den::{den_distance, interp_den, ProbeBattery, SemValue};
use linmetric::registry::SymbolRegistry;
use linmetric::syntax::{parse_env, parse_term, parse_type, Env, Type};

fn main() {
    let reg = SymbolRegistry::standard();
    let p = |s: &str| parse_term(s, &reg).unwrap();
    let battery = ProbeBattery::new(1, &reg);

    let f = interp_den(&parse_env("x:R").unwrap(), &p("add(x, 1.0)"), &reg).unwrap();
    println!("[[x:R |- add(x, 1.0)]](2.5) = {:?}", f.call(&[SemValue::Real(2.5)]).unwrap());

    let env = parse_env("k:R -o I").unwrap();
    println!("k 2 vs k 3 at I: {}", den_distance(&env, &Type::I, &p("k 2.0"), &p("k 3.0"), &battery, &reg).unwrap());

    let ty = parse_type("(R -o R) -o R").unwrap();
    let (l0, l1) = (p(r"\k:R -o R. c(k 0.0)"), p(r"\k:R -o R. c(k 1.0)"));
    println!("L_0 vs L_1: {}", den_distance(&Env::empty(), &ty, &l0, &l1, &battery, &reg).unwrap());
    let (q0, q1) = (p(r"\k:R -o R. k 0.0"), p(r"\k:R -o R. k 1.0"));
    let d = den_distance(&Env::empty(), &ty, &q0, &q1, &battery, &reg).unwrap();
    println!("{q0} vs {q1}: {d}, witness {:?}", d.lo_witness);
}
