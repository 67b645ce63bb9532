//! Parse and typecheck terms, including the errors linearity produces.

use linmetric::registry::SymbolRegistry;
use linmetric::syntax::{parse_env, parse_term, Env};
use linmetric::typing::{derive, typecheck};

fn main() {
    let reg = SymbolRegistry::standard();
    let ma = parse_term(r"1.5 * 1.5 * (\k:R (x) R -o R. k (0.0 * 0.0))", &reg).unwrap();
    println!("{ma}\n  : {}", typecheck(&Env::empty(), &ma, &reg).unwrap());

    let env = parse_env("k:R -o I, x:R").unwrap();
    let t = parse_term("let * = k 2.0 in add(x, 1.0)", &reg).unwrap();
    let d = derive(&env, &t, &reg).unwrap();
    println!("{env} |- {t} : {} (rule {}, merges sound: {})", d.ty, d.rule, d.merges_are_sound());

    for bad in [r"\x:R. add(x, x)", r"\x:R. 1.0", "k 2.0"] {
        let t = parse_term(bad, &reg).unwrap();
        println!("{bad}: {}", typecheck(&Env::empty(), &t, &reg).unwrap_err());
    }
    println!("unknown symbol: {}", parse_term("h(1.0)", &reg).unwrap_err());
}
