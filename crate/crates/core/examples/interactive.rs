//! The interactive engine: wires, int-terms and the distance built from them.

use linmetric::den::{ProbeBattery, SemValue};
use linmetric::int::{decompose, int_distance, interp_int, TraceLog};
use linmetric::registry::SymbolRegistry;
use linmetric::syntax::{parse_env, parse_term, parse_type, Env, Type};

fn main() {
    let reg = SymbolRegistry::standard();
    let p = |s: &str| parse_term(s, &reg).unwrap();
    let battery = ProbeBattery::new(1, &reg);

    let env = parse_env("k:R -o I").unwrap();
    let k2 = interp_int(&env, &p("k 2.0"), &reg).unwrap();
    let out = k2.call(&[SemValue::Real(-4.0)], &mut TraceLog::default()).unwrap();
    println!("k 2 has wires {}; on input -4 it emits {out:?}", k2.signature);
    println!(
        "k 2 vs k 3: {}",
        int_distance(&env, &Type::I, &p("k 2.0"), &p("k 3.0"), &battery, &reg).unwrap().interval
    );

    let ty = parse_type("(R -o R) -o R").unwrap();
    for (m, n) in
        [(r"\k:R -o R. c(k 0.0)", r"\k:R -o R. c(k 1.0)"), (r"\k:R -o R. add(k 0.0, 1.0)", r"\k:R -o R. k 1.0")]
    {
        let d = decompose(&Env::empty(), &p(m), &reg).unwrap();
        let dist = int_distance(&Env::empty(), &ty, &p(m), &p(n), &battery, &reg).unwrap();
        println!("{m}: {}\n  vs {n}: {}", d.listing(), dist.interval);
    }

    let redex = p(r"(\f:R -o R. \k:R -o R. k (f 1.0)) (\x:R. x)");
    let d = int_distance(&Env::empty(), &ty, &redex, &p(r"\k:R -o R. k 1.0"), &battery, &reg).unwrap();
    println!("a redex against its normal form: {} (normalized: {})", d.interval, d.normalized);
}
