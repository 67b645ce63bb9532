//! Symbol registries: the standard set, JSON files, and the
//! non-expansiveness check every registered function must pass.

use linmetric::registry::{Builtin, SymbolRegistry};

fn main() {
    let std = SymbolRegistry::standard();
    println!("standard: {}", std.iter().map(|s| format!("{}/{}", s.name, s.arity)).collect::<Vec<_>>().join(", "));

    let custom = SymbolRegistry::standard().with("half", 1, Builtin::Scale(0.5)).unwrap();
    println!("half(3) = {}", custom.get("half").unwrap().eval(&[3.0]));

    let json = r#"{"symbols":[{"name":"double","arity":1,"builtin":"scale_le1","value":2.0}]}"#;
    println!("rejected: {}", SymbolRegistry::from_json(json).unwrap_err());

    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/terms/symbols.json");
    println!("{}", SymbolRegistry::load(path.as_ref()).unwrap().to_json());
}
