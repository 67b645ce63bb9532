//! The metric logical relation: exact at observable types, refutation-only
//! at arrow types.

use linmetric::metric::ExtReal;
use linmetric::metrics::{log_distance_observable, log_relate};
use linmetric::registry::SymbolRegistry;
use linmetric::syntax::{parse_term, parse_type};

fn main() {
    let reg = SymbolRegistry::standard();
    let p = |s: &str| parse_term(s, &reg).unwrap();
    let rr = parse_type("R (x) R").unwrap();
    println!("d_log(0*0, 1*1) = {}", log_distance_observable(&p("0.0 * 0.0"), &p("1.0 * 1.0"), &rr, &reg).unwrap());

    let arrow = parse_type("R -o R").unwrap();
    let (f, g) = (p(r"\x:R. add(x, 0.5)"), p(r"\x:R. x"));
    for r in [0.25, 0.5, 1.0] {
        let v = log_relate(&f, &g, &arrow, ExtReal::finite(r), 2, &reg).unwrap();
        println!("{f} ~_{r} {g}: {}", serde_json::to_string(&v).unwrap());
    }
}
