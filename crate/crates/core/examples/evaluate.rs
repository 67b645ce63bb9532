//! Big-step evaluation and beta normalization.

use linmetric::dynamics::{beta_normalize, eval_counted};
use linmetric::registry::SymbolRegistry;
use linmetric::syntax::parse_term;

fn main() {
    let reg = SymbolRegistry::standard();
    // A query-answering function applied to a client: M_a F.
    let t = parse_term(r"(\k:R -o R. k 1.5) (\x:R. sin(x))", &reg).unwrap();
    let (v, steps) = eval_counted(&t, &reg).unwrap();
    println!("{t}\n  evaluates to {v} in {steps} steps");

    let pairs = parse_term(r"let a (x) b = 1.0 * 2.0 in add(a, b)", &reg).unwrap();
    println!("{pairs}\n  evaluates to {}", eval_counted(&pairs, &reg).unwrap().0);

    let open = parse_term(r"\k:R -o R. (\z:R. k z) 2.0", &reg).unwrap();
    println!("{open}\n  normalizes to {}", beta_normalize(&open));
}
