use proptest::prelude::*;

use linmetric::corpus::Corpus;
use linmetric::den::{den_distance, ground_l1, ProbeBattery};
use linmetric::dynamics::{alpha_eq, eq_decide, eval};
use linmetric::equational::{check_qderivation, equ_upper_bound};
use linmetric::int::int_distance;
use linmetric::metric::ExtReal;
use linmetric::registry::SymbolRegistry;
use linmetric::report::{ordering_report, Budget};
use linmetric::syntax::{parse_term, Env};
use linmetric::typing::typecheck;

fn reg() -> SymbolRegistry {
    SymbolRegistry::standard()
}

fn small_budget() -> Budget {
    Budget { seed: 7, contexts: 16, probes: 16 }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn printing_round_trips(seed in any::<u64>()) {
        let r = reg();
        let s = Corpus::new(seed, &r).normal_term();
        let back = parse_term(&s.term.to_string(), &r).unwrap();
        prop_assert!(alpha_eq(&back, &s.term), "{} reparsed as {}", s.term, back);
    }

    #[test]
    fn evaluation_preserves_types(seed in any::<u64>()) {
        let r = reg();
        let s = Corpus::new(seed, &r).closed_observable();
        let v = eval(&s.term, &r).unwrap();
        prop_assert!(v.is_value());
        prop_assert_eq!(typecheck(&Env::empty(), &v, &r).unwrap(), s.ty);
    }

    #[test]
    fn exact_distances_are_pseudo_metrics(seed in any::<u64>()) {
        let r = reg();
        let mut c = Corpus::new(seed, &r);
        let s = c.closed_observable();
        let (a, b, z) = (s.term.clone(), c.perturb(&s.term), c.perturb(&s.term));
        let battery = ProbeBattery::with_probes(seed, 8, &r);
        let e = Env::empty();
        let den = |m, n| den_distance(&e, &s.ty, m, n, &battery, &r).unwrap();
        let int = |m, n| int_distance(&e, &s.ty, m, n, &battery, &r).unwrap().interval;
        for d in [&den as &dyn Fn(_, _) -> _, &int] {
            let (ab, ba, bz, az) = (d(&a, &b), d(&b, &a), d(&b, &z), d(&a, &z));
            prop_assert!(ab.is_exact() && ab.lo == ba.lo);
            prop_assert_eq!(d(&a, &a).hi, ExtReal::ZERO);
            prop_assert!(az.lo.approx_le(ab.lo + bz.lo));
        }
        let ground = ground_l1(&eval(&a, &r).unwrap(), &eval(&b, &r).unwrap(), &s.ty).unwrap();
        prop_assert_eq!(den(&a, &b).lo, ground);
    }

    #[test]
    fn a_term_is_at_distance_zero_from_itself(seed in any::<u64>()) {
        let r = reg();
        let s = Corpus::new(seed, &r).normal_term();
        prop_assert!(eq_decide(&s.env, &s.term, &s.term, &r).unwrap());
        let rep = ordering_report(&s.env, &s.ty, &s.term, &s.term, small_budget(), &r).unwrap();
        let m = &rep.metrics;
        prop_assert_eq!(m.obs.as_ref().unwrap().lo, ExtReal::ZERO);
        prop_assert_eq!(m.den.unwrap().hi, ExtReal::ZERO);
        prop_assert_eq!(m.int.unwrap().hi, ExtReal::ZERO);
        prop_assert_eq!(m.equ.as_ref().unwrap().hi, ExtReal::ZERO);
    }

    #[test]
    fn witnesses_replay_and_bounds_sandwich(seed in any::<u64>()) {
        let r = reg();
        let p = Corpus::new(seed, &r).pairs(4).pop().unwrap();
        let rep = ordering_report(&p.env, &p.ty, &p.m, &p.n, small_budget(), &r).unwrap();
        prop_assert_eq!(rep.chain_ok, Some(true), "{:?}", rep.violations);
        let obs = rep.metrics.obs.as_ref().unwrap();
        prop_assert!(obs.witness.replay(&p.m, &p.n, &r));
        let (hi, cert) = equ_upper_bound(&p.env, &p.ty, &p.m, &p.n, &r).unwrap();
        if let Some(d) = cert {
            prop_assert_eq!(check_qderivation(&d, &r).unwrap(), hi);
        }
        prop_assert!(obs.lo.approx_le(hi));
    }

    #[test]
    fn reports_are_deterministic(seed in any::<u64>()) {
        let r = reg();
        let p = Corpus::new(seed, &r).pairs(2).pop().unwrap();
        let once = ordering_report(&p.env, &p.ty, &p.m, &p.n, small_budget(), &r).unwrap().to_json();
        let twice = ordering_report(&p.env, &p.ty, &p.m, &p.n, small_budget(), &r).unwrap().to_json();
        prop_assert_eq!(once, twice);
    }
}

/// Without any symbols, contexts can still read the real prefix of M_0 and
/// M_1 but cannot combine the two arguments of the function they hold, so
/// the search never exceeds the prefix distance. This is only evidence: a
/// failed search does not prove that no separating context exists.
#[test]
fn empty_signature_sees_only_the_prefix() {
    let r = SymbolRegistry::empty();
    let ty = linmetric::syntax::parse_type("R (x) R (x) ((R (x) R -o R) -o R)").unwrap();
    let m0 = parse_term(r"0.0 * 0.0 * (\k:R (x) R -o R. k (0.0 * 0.0))", &r).unwrap();
    let m1 = parse_term(r"1.0 * 1.0 * (\k:R (x) R -o R. k (0.0 * 0.0))", &r).unwrap();
    let (d, w) = linmetric::metrics::obs_lower_bound(&Env::empty(), &ty, &m0, &m1, 256, &r).unwrap();
    assert_eq!(d, ExtReal::finite(2.0));
    assert!(w.replay(&m0, &m1, &r));
}
