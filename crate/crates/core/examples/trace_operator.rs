//! The trace on wire functions: least fixed points over flat domains.

use linmetric::den::SemValue;
use linmetric::int::{trace, TraceLog, WireFunction, WireSignature};
use linmetric::polarity::WireKind::{self, R};

fn main() {
    // Yanking: feeding back one side of a swap gives the identity.
    let yank = trace(&WireFunction::symmetry(vec![R], vec![R]), 1).unwrap();
    let mut log = TraceLog::default();
    println!("tr(swap)(4.5) = {:?}", yank.call(&[SemValue::Real(4.5)], &mut log).unwrap());

    // f(x, z) = (z + 1, x): the loop settles after two rounds.
    let sig = WireSignature { inputs: vec![R, R], outputs: vec![R, R] };
    let f = WireFunction::new(sig, |xs, _| {
        let y = match &xs[1] {
            SemValue::Real(z) => SemValue::Real(z + 1.0),
            other => other.clone(),
        };
        Ok(vec![y, xs[0].clone()])
    });
    let t = trace(&f, 1).unwrap();
    println!("tr(f)(2) = {:?}", t.call(&[SemValue::Real(2.0)], &mut log).unwrap());
    println!(
        "{} traces, at most {} iterations, within width + 1: {}",
        log.traces,
        log.max_iterations,
        log.within_bound()
    );

    let unit: Vec<WireKind> = vec![WireKind::I];
    let id = WireFunction::identity(unit);
    println!("identity on a unit wire: {:?}", id.call(&[SemValue::Unit], &mut log).unwrap());
}
