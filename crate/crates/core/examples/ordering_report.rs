//! All engines side by side, as the JSON report the command line prints.

use linmetric::registry::SymbolRegistry;
use linmetric::report::{ordering_report, Budget};
use linmetric::syntax::{parse_env, parse_term, Type};

fn main() {
    let reg = SymbolRegistry::standard();
    let env = parse_env("k:R -o I").unwrap();
    let (m, n) = (parse_term("k 2.0", &reg).unwrap(), parse_term("k 3.0", &reg).unwrap());
    let report = ordering_report(&env, &Type::I, &m, &n, Budget::default(), &reg).unwrap();
    println!("{}", report.to_json());
}
