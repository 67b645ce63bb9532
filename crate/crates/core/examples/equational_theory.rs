//! The (unquantified) equational theory: beta, eta, let conversions and the
//! symbol axiom on literals.

use linmetric::dynamics::{eq_canonical, eq_decide};
use linmetric::registry::SymbolRegistry;
use linmetric::syntax::{parse_env, parse_term, Env};

fn main() {
    let reg = SymbolRegistry::standard();
    let cases = [
        ("", r"(\x:R. add(x, 1.0)) 2.0", "3.0"),
        ("k:R -o R", r"\x:R. k x", "k"),
        ("p:R (x) R", "let a (x) b = p in a * b", "p"),
        ("", "let * = * in 4.0", "4.0"),
        ("", r"\x:R. x", r"\x:R. sin(x)"),
    ];
    for (env, m, n) in cases {
        let env = if env.is_empty() { Env::empty() } else { parse_env(env).unwrap() };
        let (m, n) = (parse_term(m, &reg).unwrap(), parse_term(n, &reg).unwrap());
        let same = eq_decide(&env, &m, &n, &reg).unwrap();
        println!("{m}  {}  {n}    (canonical: {})", if same { "=" } else { "?" }, eq_canonical(&m, &reg));
    }
}
