//! Int-term listings and DOT string diagrams for the two-function example.
//! Pipe the output through `dot -Tsvg` to draw it.

use linmetric::int::{decompose, export_diagram};
use linmetric::registry::SymbolRegistry;
use linmetric::syntax::{parse_env, parse_term};

fn main() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/terms/symbols.json");
    let reg = SymbolRegistry::load(path.as_ref()).unwrap();
    let env = parse_env("x:R -o R, y:R -o R, z:R -o R").unwrap();
    for src in ["f(x (y 0.0), z 2.0)", "g(x (z 1.0), y 3.0)"] {
        let t = parse_term(src, &reg).unwrap();
        let d = decompose(&env, &t, &reg).unwrap();
        println!("// {src}: {}  (reads inputs {:?})", d.listing(), d.partition);
        println!("{}", export_diagram(&env, &t, &reg).unwrap());
    }
}
