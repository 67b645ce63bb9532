//! The corpus-wide suites: chain consistency, admissibility, trace laws,
//! wire extensionality and observable collapse.

use linmetric::registry::SymbolRegistry;
use linmetric::report::{
    admissibility_suite, collapse_suite, decompose_suite, ordering_suite, trace_suite, Budget, Engine,
};

fn main() {
    let reg = SymbolRegistry::standard();
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let budget = Budget { seed, ..Budget::default() };
    let mut reports = vec![
        ordering_suite(seed, 100, budget, &reg),
        trace_suite(seed, 100, &reg),
        decompose_suite(seed, 100, 20, &reg),
        collapse_suite(seed, 100, budget, &reg),
    ];
    for engine in [Engine::Den, Engine::Int, Engine::Equ] {
        reports.extend(admissibility_suite(engine, seed, 20, budget, &reg));
    }
    for r in &reports {
        println!("{r}");
        for f in r.failures.iter().take(3) {
            println!("  {f}");
        }
    }
}
