//! Acceptance criteria, one line each. Runs without the libtest harness so
//! the lines are always printed; exits non-zero if any criterion fails.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use linmetric::den::{den_distance, ProbeBattery};
use linmetric::equational::{check_qderivation, equ_upper_bound};
use linmetric::int::{decompose, export_diagram, int_distance};
use linmetric::metric::ExtReal;
use linmetric::metrics::{log_distance_observable, obs_lower_bound};
use linmetric::registry::SymbolRegistry;
use linmetric::report::{
    admissibility_suite, collapse_suite, decompose_suite, ordering_suite, trace_suite, Budget, Engine,
};
use linmetric::syntax::{parse_env, parse_term, parse_type, Env, Term};
use linmetric::typing::typecheck;

const SEED: u64 = 2024;

fn terms_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/terms")
}

fn registry() -> SymbolRegistry {
    SymbolRegistry::load(&terms_dir().join("symbols.json")).expect("example registry loads")
}

fn term(name: &str, reg: &SymbolRegistry) -> Term {
    let text = std::fs::read_to_string(terms_dir().join(name)).expect("term file");
    parse_term(&text, reg).expect("term parses")
}

fn exact(lo: ExtReal, hi: ExtReal, v: f64) -> bool {
    lo == ExtReal::finite(v) && hi == ExtReal::finite(v)
}

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn query_pair() -> Outcome {
    let reg = registry();
    let env = parse_env("k:R -o I").unwrap();
    let (m, n) = (term("k2.lin", &reg), term("k3.lin", &reg));
    let ty = typecheck(&env, &m, &reg).map_err(|e| e.to_string())?;
    let battery = ProbeBattery::new(SEED, &reg);
    let den = den_distance(&env, &ty, &m, &n, &battery, &reg).map_err(|e| e.to_string())?;
    let int = int_distance(&env, &ty, &m, &n, &battery, &reg).map_err(|e| e.to_string())?.interval;
    ensure(exact(den.lo, den.hi, 0.0), || format!("den {den}"))?;
    ensure(exact(int.lo, int.hi, 1.0), || format!("int {int}"))?;
    ensure(den.hi < int.lo, || "no strict separation".into())?;
    Ok(format!("den {den}, int {int}"))
}

fn tensor_prefix_pair() -> Outcome {
    let reg = registry();
    let (m, n) = (term("M0.lin", &reg), term("M1.lin", &reg));
    let ty = typecheck(&Env::empty(), &m, &reg).map_err(|e| e.to_string())?;
    let rr = parse_type("R (x) R").unwrap();
    let log = log_distance_observable(
        &parse_term("0.0 * 0.0", &reg).unwrap(),
        &parse_term("1.0 * 1.0", &reg).unwrap(),
        &rr,
        &reg,
    )
    .map_err(|e| e.to_string())?;
    ensure(log == ExtReal::finite(2.0), || format!("log on the prefix {log}"))?;
    let (obs, w) = obs_lower_bound(&Env::empty(), &ty, &m, &n, 64, &reg).map_err(|e| e.to_string())?;
    ensure(obs.as_f64() >= 2.0, || format!("obs {obs}"))?;
    ensure(w.context.to_string() == "[-]" && w.replay(&m, &n, &reg), || format!("witness {}", w.context))?;
    let (equ, cert) = equ_upper_bound(&Env::empty(), &ty, &m, &n, &reg).map_err(|e| e.to_string())?;
    let cert = cert.ok_or("no certificate")?;
    let checked = check_qderivation(&cert, &reg).map_err(|e| e.to_string())?;
    ensure(equ == ExtReal::finite(2.0) && checked == equ, || format!("equ {equ}, checked {checked}"))?;
    Ok(format!("log 2, obs {obs} via [-], equ {equ} (certificate of {} rules)", cert.size()))
}

fn constant_function_pair() -> Outcome {
    let reg = registry();
    let (m, n) = (term("L0.lin", &reg), term("L1.lin", &reg));
    let ty = typecheck(&Env::empty(), &m, &reg).map_err(|e| e.to_string())?;
    let battery = ProbeBattery::with_probes(SEED, 1000, &reg);
    let int = int_distance(&Env::empty(), &ty, &m, &n, &battery, &reg).map_err(|e| e.to_string())?.interval;
    ensure(exact(int.lo, int.hi, 1.0), || format!("int {int}"))?;
    let den = den_distance(&Env::empty(), &ty, &m, &n, &battery, &reg).map_err(|e| e.to_string())?;
    ensure(den.lo == ExtReal::ZERO, || format!("den {den}"))?;
    Ok(format!("int {int}, den {den} over {} probes", battery.values(&parse_type("R -o R").unwrap()).len()))
}

fn wire_example() -> Outcome {
    let reg = registry();
    let env = parse_env("x:R -o R, y:R -o R, z:R -o R").unwrap();
    let mut got = Vec::new();
    for (file, want) in [("exampleM", ["y", "f(x,z)", "0", "2"]), ("exampleN", ["z", "g(x,y)", "3", "1"])] {
        let t = term(&format!("{file}.lin"), &reg);
        let mut h = decompose(&env, &t, &reg).map_err(|e| e.to_string())?.rendered();
        let listing = h.join("  ");
        h.sort();
        let mut want: Vec<String> = want.iter().map(|s| s.to_string()).collect();
        want.sort();
        ensure(h == want, || format!("{file}: {h:?}"))?;
        let dot = export_diagram(&env, &t, &reg).map_err(|e| e.to_string())?;
        let golden = std::fs::read_to_string(terms_dir().join(format!("{file}.dot"))).map_err(|e| e.to_string())?;
        ensure(dot == golden, || format!("{file}: DOT differs from the golden file"))?;
        got.push(listing);
    }
    Ok(got.join(" | "))
}

fn suite_line(r: &linmetric::report::SuiteReport) -> Outcome {
    if r.ok() {
        Ok(r.to_string())
    } else {
        Err(format!("{r}; first failure: {}", r.failures[0]))
    }
}

fn extensionality() -> Outcome {
    suite_line(&decompose_suite(SEED, 200, 50, &SymbolRegistry::standard()))
}

fn observable_collapse() -> Outcome {
    suite_line(&collapse_suite(SEED, 300, Budget::default(), &SymbolRegistry::standard()))
}

fn ordering_chain() -> Outcome {
    suite_line(&ordering_suite(SEED, 200, Budget { seed: SEED, ..Budget::default() }, &SymbolRegistry::standard()))
}

fn trace_laws() -> Outcome {
    suite_line(&trace_suite(SEED, 100, &SymbolRegistry::standard()))
}

fn admissibility() -> Outcome {
    let reg = SymbolRegistry::standard();
    let budget = Budget { seed: SEED, ..Budget::default() };
    let mut lines = Vec::new();
    for engine in [Engine::Den, Engine::Int, Engine::Equ] {
        for r in admissibility_suite(engine, SEED, 50, budget, &reg) {
            lines.push(suite_line(&r)?);
        }
    }
    Ok(lines.join(", "))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("k 2 vs k 3: den = [0,0], int = [1,1]", Duration::from_secs(1), query_pair),
        ("M_0 vs M_1: log 2, obs >= 2 via [-], equ 2 certified", Duration::from_secs(1), tensor_prefix_pair),
        ("L_0 vs L_1: int = [1,1], den.lo = 0 over 1000 probes", Duration::from_secs(5), constant_function_pair),
        ("wire example int-terms and golden DOT", Duration::from_secs(1), wire_example),
        ("decomposition extensionality on 200 terms", Duration::from_secs(60), extensionality),
        ("observable collapse on 300 closed terms", Duration::from_secs(60), observable_collapse),
        ("ordering chain on 200 pairs", Duration::from_secs(120), ordering_chain),
        ("trace laws on 100 wire functions", Duration::from_secs(10), trace_laws),
        ("admissibility (A1)-(A4) for den, int, equ", Duration::from_secs(30), admissibility),
    ];
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let took = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) if took <= limit => (true, d),
            Ok(d) => (false, format!("{d}; too slow, limit {limit:?}")),
            Err(e) => (false, e),
        };
        failed += usize::from(!ok);
        println!("{} {}. {name} [{:.2?}] {detail}", if ok { "PASS" } else { "FAIL" }, i + 1, took);
    }
    println!("{} of 9 criteria passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
