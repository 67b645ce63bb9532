//! Syntactic metrics: the metric logical relation and observational lower
//! bounds found by enumerating contexts.

use std::collections::BTreeSet;

use serde::ser::Serializer;
use serde::Serialize;
use thiserror::Error;

use crate::corpus::TermBuilder;
use crate::den::{ground_l1, DenError};
use crate::dynamics::{eval, EvalError};
use crate::int::IntError;
use crate::metric::{ExtReal, EPSILON};
use crate::registry::SymbolRegistry;
use crate::syntax::{Env, Term, Type};
use crate::typing::{typecheck, Context, TypeError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Den(#[from] DenError),
    #[error(transparent)]
    Int(#[from] IntError),
    #[error("type {0} is not observable (built from R, I and (x) only)")]
    NotObservable(Type),
}

const REAL_CANDIDATES: [f64; 5] = [0.0, 1.0, -1.0, 10.0, 0.5];

/// Up to `k` closed terms of `ty`, deterministic; the simplest comes first.
pub fn closed_candidates(ty: &Type, k: usize, reg: &SymbolRegistry) -> Vec<Term> {
    if *ty == Type::R {
        return REAL_CANDIDATES.iter().take(k).map(|&a| Term::Const(a)).collect();
    }
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for seed in 0..(4 * k as u64) {
        if out.len() >= k {
            break;
        }
        let mut b = TermBuilder::new(reg, seed, seed == 0);
        if let Some(t) = b.closed(ty) {
            if seen.insert(t.to_string()) {
                out.push(t);
            }
        }
    }
    out
}

fn check_closed(t: &Term, ty: &Type, reg: &SymbolRegistry) -> Result<(), MetricError> {
    let found = typecheck(&Env::empty(), t, reg)?;
    if &found != ty {
        return Err(TypeError::Mismatch { place: format!("`{t}`"), expected: ty.to_string(), found }.into());
    }
    Ok(())
}

/// `d_log` at an observable type: the L1 distance of the values.
pub fn log_distance_observable(m: &Term, n: &Term, ty: &Type, reg: &SymbolRegistry) -> Result<ExtReal, MetricError> {
    if !ty.is_observable() {
        return Err(MetricError::NotObservable(ty.clone()));
    }
    check_closed(m, ty, reg)?;
    check_closed(n, ty, reg)?;
    Ok(ground_l1(&eval(m, reg)?, &eval(n, reg)?, ty)?)
}

/// Outcome of testing `V ≃_r U : τ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum LogVerdict {
    Holds,
    /// The relation is refuted by applying both sides to these argument
    /// pairs, which forces a distance of at least `gap`.
    Fails {
        #[serde(serialize_with = "pairs_as_strings")]
        args: Vec<(Term, Term)>,
        gap: ExtReal,
    },
    /// Not refuted by any probe, but the type has arrows.
    Unknown,
}

fn pairs_as_strings<S: Serializer>(v: &[(Term, Term)], s: S) -> Result<S::Ok, S::Error> {
    let strs: Vec<(String, String)> = v.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
    strs.serialize(s)
}

/// Tests the metric logical relation at budget `r`, probing arrows `depth`
/// levels deep. Exact at observable types; at arrow types only a failure is
/// definitive.
pub fn log_relate(
    v: &Term,
    u: &Term,
    ty: &Type,
    r: ExtReal,
    depth: usize,
    reg: &SymbolRegistry,
) -> Result<LogVerdict, MetricError> {
    check_closed(v, ty, reg)?;
    check_closed(u, ty, reg)?;
    let (gap, args) = log_lower(v, u, ty, depth, reg)?;
    Ok(if !gap.approx_le(r) {
        LogVerdict::Fails { args, gap }
    } else if ty.is_observable() {
        LogVerdict::Holds
    } else {
        LogVerdict::Unknown
    })
}

/// Lower bound on the least `r` with `V ≃_r U`. Arguments related at
/// distance `s` may be fed to functions, which costs `s`.
fn log_lower(
    v: &Term,
    u: &Term,
    ty: &Type,
    depth: usize,
    reg: &SymbolRegistry,
) -> Result<(ExtReal, Vec<(Term, Term)>), MetricError> {
    if ty.is_observable() {
        return Ok((ground_l1(&eval(v, reg)?, &eval(u, reg)?, ty)?, vec![]));
    }
    match ty {
        Type::Tensor(a, b) => {
            let (Term::Pair(v1, v2), Term::Pair(u1, u2)) = (eval(v, reg)?, eval(u, reg)?) else {
                return Err(EvalError::Stuck(format!("{v} is not a pair")).into());
            };
            let (d1, mut args) = log_lower(&v1, &u1, a, depth, reg)?;
            let (d2, more) = log_lower(&v2, &u2, b, depth, reg)?;
            args.extend(more);
            Ok((d1 + d2, args))
        }
        Type::Lolli(a, b) => {
            if depth == 0 {
                return Ok((ExtReal::ZERO, vec![]));
            }
            let cands = closed_candidates(a, 4, reg);
            let mut pairs: Vec<(Term, Term, ExtReal)> =
                cands.iter().map(|w| (w.clone(), w.clone(), ExtReal::ZERO)).collect();
            if a.is_observable() {
                for (i, w) in cands.iter().enumerate() {
                    for w2 in &cands[i + 1..] {
                        let s = ground_l1(&eval(w, reg)?, &eval(w2, reg)?, a)?;
                        pairs.push((w.clone(), w2.clone(), s));
                    }
                }
            }
            let mut best = (ExtReal::ZERO, vec![]);
            for (w, w2, s) in pairs {
                let (d, sub) =
                    log_lower(&Term::app(v.clone(), w.clone()), &Term::app(u.clone(), w2.clone()), b, depth - 1, reg)?;
                let d = d.saturating_sub(s);
                if d > best.0 {
                    let mut args = vec![(w, w2)];
                    args.extend(sub);
                    best = (d, args);
                }
            }
            Ok(best)
        }
        _ => unreachable!("observable types are handled above"),
    }
}

fn as_display<T: std::fmt::Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

fn opt_pair_as_strings<S: Serializer>(v: &Option<(Term, Term)>, s: S) -> Result<S::Ok, S::Error> {
    v.as_ref().map(|(a, b)| (a.to_string(), b.to_string())).serialize(s)
}

/// A context `C : (Γ, τ) → (∅, R^n ⊗ σ)` together with what it observed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObsWitness {
    #[serde(serialize_with = "as_display")]
    pub context: Context,
    pub n: usize,
    #[serde(serialize_with = "as_display")]
    pub sigma: Type,
    /// Values of `C[M]` and `C[N]`; absent for the empty observation.
    #[serde(serialize_with = "opt_pair_as_strings")]
    pub results: Option<(Term, Term)>,
    pub value: ExtReal,
}

impl ObsWitness {
    fn empty(ty: &Type) -> ObsWitness {
        ObsWitness { context: Context::trivial(), n: 0, sigma: ty.clone(), results: None, value: ExtReal::ZERO }
    }

    /// Re-evaluates the context on both terms and compares with the record.
    pub fn replay(&self, m: &Term, n: &Term, reg: &SymbolRegistry) -> bool {
        let Some((vm, vn)) = &self.results else {
            return self.value == ExtReal::ZERO;
        };
        match observe_pair(&self.context, self.n, m, n, reg) {
            Some((d, a, b)) => &a == vm && &b == vn && d == self.value,
            None => false,
        }
    }
}

/// `τ = R^{⊗n} ⊗ σ` with the longest real prefix.
pub fn tensor_prefix(ty: &Type) -> Option<(usize, Type)> {
    fn reals(t: &Type) -> Option<usize> {
        match t {
            Type::R => Some(1),
            Type::Tensor(a, b) if **b == Type::R => reals(a).map(|k| k + 1),
            _ => None,
        }
    }
    match ty {
        Type::Tensor(a, s) => reals(a).map(|n| (n, (**s).clone())),
        _ => None,
    }
}

fn split_reals(v: &Term, n: usize) -> Option<Vec<f64>> {
    match (n, v) {
        (1, Term::Const(a)) => Some(vec![*a]),
        (_, Term::Pair(p, a)) if n > 1 => {
            let mut out = split_reals(p, n - 1)?;
            out.push(split_reals(a, 1)?[0]);
            Some(out)
        }
        _ => None,
    }
}

/// Evaluates `C[M]` and `C[N]` and sums the gaps of the `n` leading reals.
fn observe_pair(ctx: &Context, n: usize, m: &Term, nn: &Term, reg: &SymbolRegistry) -> Option<(ExtReal, Term, Term)> {
    let a = eval(&ctx.plug(m), reg).ok()?;
    let b = eval(&ctx.plug(nn), reg).ok()?;
    let (Term::Pair(pa, _), Term::Pair(pb, _)) = (&a, &b) else { return None };
    let (xs, ys) = (split_reals(pa, n)?, split_reals(pb, n)?);
    let d = xs.iter().zip(&ys).map(|(x, y)| (x - y).abs()).sum();
    Some((ExtReal::finite(d), a, b))
}

/// Mixed-radix digits of an enumeration index.
struct Digits(u64);

impl Digits {
    fn next(&mut self, radix: usize) -> usize {
        let d = (self.0 % radix as u64) as usize;
        self.0 /= radix as u64;
        d
    }
}

enum Bind {
    Star(Term),
    Pair(String, String, Term),
}

struct Observer<'a> {
    reg: &'a SymbolRegistry,
    digits: Digits,
    binds: Vec<Bind>,
    reals: Vec<Term>,
    residue: Vec<(Term, Type)>,
    fresh: usize,
}

impl Observer<'_> {
    fn fresh(&mut self) -> String {
        self.fresh += 1;
        format!("o{}", self.fresh)
    }

    /// Takes `e : ty` apart: reals are observed, units consumed, pairs split,
    /// functions applied to a candidate argument or passed through.
    fn observe(&mut self, e: Term, ty: &Type) {
        match ty {
            Type::R => self.reals.push(e),
            Type::I => self.binds.push(Bind::Star(e)),
            Type::Tensor(a, b) => {
                let (x, y) = (self.fresh(), self.fresh());
                self.binds.push(Bind::Pair(x.clone(), y.clone(), e));
                self.observe(Term::var(&x), a);
                self.observe(Term::var(&y), b);
            }
            Type::Lolli(a, b) => {
                let cands = closed_candidates(a, 3, self.reg);
                let d = self.digits.next(cands.len() + 1);
                match cands.get(d) {
                    Some(w) => self.observe(Term::app(e, w.clone()), b),
                    None => self.residue.push((e, ty.clone())),
                }
            }
        }
    }

    fn finish(self) -> Option<(Context, usize, Type)> {
        let n = self.reals.len();
        if n == 0 {
            return None;
        }
        let (res_terms, res_types): (Vec<Term>, Vec<Type>) = self.residue.into_iter().unzip();
        let sigma = if res_types.is_empty() { Type::I } else { Type::tensor_n(res_types) };
        let mut body = Term::pair(Term::pair_n(self.reals), Term::pair_n(res_terms));
        for b in self.binds.into_iter().rev() {
            body = match b {
                Bind::Star(e) => Term::let_star(e, body),
                Bind::Pair(x, y, e) => Term::let_pair(&x, &y, e, body),
            };
        }
        Some((Context::new(body)?, n, sigma))
    }
}

/// Contexts for `(Γ, τ)`, smallest first: the trivial one when `τ` already
/// has the shape `R^n ⊗ σ`, then closings by candidate values followed by
/// observations.
pub fn enumerate_contexts(env: &Env, ty: &Type, budget: usize, reg: &SymbolRegistry) -> Vec<(Context, usize, Type)> {
    let closing: Vec<Vec<Term>> = env.types().map(|t| closed_candidates(t, 3, reg)).collect();
    if closing.iter().any(Vec::is_empty) {
        return Vec::new();
    }
    let mut hole = Term::hole();
    for (x, t) in env.0.iter().rev() {
        hole = Term::lam(x, t.clone(), hole);
    }
    let mut seen = BTreeSet::new();
    let mut found = Vec::new();
    for index in 0..(8 * budget as u64).max(8) {
        let mut digits = Digits(index);
        let mut closed = hole.clone();
        for vals in &closing {
            closed = Term::app(closed, vals[digits.next(vals.len())].clone());
        }
        let mut obs = Observer { reg, digits, binds: vec![], reals: vec![], residue: vec![], fresh: 0 };
        obs.observe(closed, ty);
        if let Some(c) = obs.finish() {
            if seen.insert(c.0.to_string()) {
                found.push(c);
            }
        }
    }
    found.sort_by_cached_key(|c| (c.0.term.size(), c.0.to_string()));
    found.truncate(budget);
    if env.is_empty() {
        if let Some((n, sigma)) = tensor_prefix(ty) {
            found.insert(0, (Context::trivial(), n, sigma));
        }
    }
    found
}

/// Lower bound on `d_obs(M, N)`: the best observation among at most
/// `budget` contexts, with its witness.
pub fn obs_lower_bound(
    env: &Env,
    ty: &Type,
    m: &Term,
    n: &Term,
    budget: usize,
    reg: &SymbolRegistry,
) -> Result<(ExtReal, ObsWitness), MetricError> {
    for (side, t) in [("the left term", m), ("the right term", n)] {
        let found = typecheck(env, t, reg)?;
        if &found != ty {
            return Err(TypeError::Mismatch { place: side.into(), expected: ty.to_string(), found }.into());
        }
    }
    let mut best = ObsWitness::empty(ty);
    for (ctx, k, sigma) in enumerate_contexts(env, ty, budget, reg) {
        if let Some((d, a, b)) = observe_pair(&ctx, k, m, n, reg) {
            if best.results.is_none() || d.as_f64() > best.value.as_f64() + EPSILON {
                best = ObsWitness { context: ctx, n: k, sigma, results: Some((a, b)), value: d };
            }
        }
    }
    Ok((best.value, best))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_env, parse_term, parse_type};

    fn reg() -> SymbolRegistry {
        SymbolRegistry::standard()
    }

    fn p(s: &str) -> Term {
        parse_term(s, &reg()).unwrap()
    }

    #[test]
    fn relation_at_ground_types() {
        let r = reg();
        assert_eq!(log_relate(&p("0.0"), &p("1.0"), &Type::R, ExtReal::finite(1.0), 2, &r).unwrap(), LogVerdict::Holds);
        let rr = parse_type("R (x) R").unwrap();
        let v = log_relate(&p("0.0 * 1.0"), &p("1.0 * 3.0"), &rr, ExtReal::finite(2.9), 2, &r).unwrap();
        assert!(matches!(v, LogVerdict::Fails { .. }));
        assert_eq!(log_relate(&p("*"), &p("*"), &Type::I, ExtReal::ZERO, 2, &r).unwrap(), LogVerdict::Holds);
    }

    #[test]
    fn relation_at_arrows_is_refutable_only() {
        let r = reg();
        let rr = Type::lolli(Type::R, Type::R);
        let (f, g) = (p("\\x:R. add(x, 1.0)"), p("\\x:R. x"));
        assert_eq!(log_relate(&f, &g, &rr, ExtReal::finite(1.0), 2, &r).unwrap(), LogVerdict::Unknown);
        assert!(matches!(log_relate(&f, &g, &rr, ExtReal::finite(0.5), 2, &r).unwrap(), LogVerdict::Fails { .. }));
    }

    #[test]
    fn observable_log_distance() {
        let r = reg();
        let rr = parse_type("R (x) R").unwrap();
        assert_eq!(log_distance_observable(&p("0.0 * 0.0"), &p("1.0 * 1.0"), &rr, &r).unwrap(), ExtReal::finite(2.0));
        assert!(matches!(
            log_distance_observable(&p("\\x:R. x"), &p("\\x:R. x"), &Type::lolli(Type::R, Type::R), &r),
            Err(MetricError::NotObservable(_))
        ));
    }

    #[test]
    fn closing_with_identity_separates_queries() {
        let r = reg();
        let env = parse_env("k:R -o R").unwrap();
        let (d, w) = obs_lower_bound(&env, &Type::R, &p("k 0.0"), &p("k 1.0"), 32, &r).unwrap();
        assert_eq!(d, ExtReal::finite(1.0));
        assert!(w.replay(&p("k 0.0"), &p("k 1.0"), &r));
    }

    #[test]
    fn identical_terms_are_at_zero() {
        let r = reg();
        let t = p("\\k:R -o R. k 2.0");
        let ty = parse_type("(R -o R) -o R").unwrap();
        assert_eq!(obs_lower_bound(&Env::empty(), &ty, &t, &t, 32, &r).unwrap().0, ExtReal::ZERO);
    }

    #[test]
    fn real_prefixes() {
        assert_eq!(
            tensor_prefix(&parse_type("R (x) R (x) (R -o R)").unwrap()),
            Some((2, parse_type("R -o R").unwrap()))
        );
        assert_eq!(tensor_prefix(&Type::R), None);
    }
}
