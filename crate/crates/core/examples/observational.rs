//! Lower bounds on the observational distance, with replayable witnesses.

use linmetric::metrics::obs_lower_bound;
use linmetric::registry::SymbolRegistry;
use linmetric::syntax::{parse_env, parse_term, parse_type, Env};

fn main() {
    let reg = SymbolRegistry::standard();
    let p = |s: &str| parse_term(s, &reg).unwrap();

    let ty = parse_type("R (x) R (x) ((R (x) R -o R) -o R)").unwrap();
    let (m0, m1) =
        (p(r"0.0 * 0.0 * (\k:R (x) R -o R. k (0.0 * 0.0))"), p(r"1.0 * 1.0 * (\k:R (x) R -o R. k (0.0 * 0.0))"));
    let (d, w) = obs_lower_bound(&Env::empty(), &ty, &m0, &m1, 64, &reg).unwrap();
    println!("M_0 vs M_1: >= {d} via {} (replays: {})", w.context, w.replay(&m0, &m1, &reg));

    let env = parse_env("k:R -o R").unwrap();
    let (q0, q1) = (p("k 0.0"), p("k 1.0"));
    let (d, w) = obs_lower_bound(&env, &parse_type("R").unwrap(), &q0, &q1, 64, &reg).unwrap();
    println!("k 0 vs k 1: >= {d} via {}", w.context);
    println!("{}", serde_json::to_string_pretty(&w).unwrap());
}
