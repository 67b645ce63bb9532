//! Substitution, big-step evaluation, β-normalization and the equational
//! canonicalizer.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::registry::SymbolRegistry;
use crate::syntax::{Env, Term};
use crate::typing::{typecheck, TypeError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("free variable `{0}` during evaluation")]
    FreeVariable(String),
    #[error("symbol `{0}` is not registered")]
    UnknownSymbol(String),
    #[error("evaluation is stuck at `{0}` (the term is ill-typed)")]
    Stuck(String),
    #[error("symbol `{0}` produced a non-finite value")]
    NonFinite(String),
}

pub fn free_vars(t: &Term) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    collect_free(t, &mut Vec::new(), &mut out);
    out
}

fn collect_free(t: &Term, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
    match t {
        Term::Var(x) => {
            if !bound.contains(x) {
                out.insert(x.clone());
            }
        }
        Term::Const(_) | Term::Star => {}
        Term::FnApp(_, args) => args.iter().for_each(|a| collect_free(a, bound, out)),
        Term::App(a, b) | Term::Pair(a, b) | Term::LetStar(a, b) => {
            collect_free(a, bound, out);
            collect_free(b, bound, out);
        }
        Term::Lam(x, _, b) => {
            bound.push(x.clone());
            collect_free(b, bound, out);
            bound.pop();
        }
        Term::LetPair(x, y, a, b) => {
            collect_free(a, bound, out);
            bound.push(x.clone());
            bound.push(y.clone());
            collect_free(b, bound, out);
            bound.truncate(bound.len() - 2);
        }
    }
}

/// Free variables in order of first occurrence.
pub fn free_vars_ordered(t: &Term) -> Vec<String> {
    let mut out = Vec::new();
    fn go(t: &Term, bound: &mut Vec<String>, out: &mut Vec<String>) {
        match t {
            Term::Var(x) => {
                if !bound.contains(x) && !out.contains(x) {
                    out.push(x.clone());
                }
            }
            Term::Const(_) | Term::Star => {}
            Term::FnApp(_, args) => args.iter().for_each(|a| go(a, bound, out)),
            Term::App(a, b) | Term::Pair(a, b) | Term::LetStar(a, b) => {
                go(a, bound, out);
                go(b, bound, out);
            }
            Term::Lam(x, _, b) => {
                bound.push(x.clone());
                go(b, bound, out);
                bound.pop();
            }
            Term::LetPair(x, y, a, b) => {
                go(a, bound, out);
                bound.push(x.clone());
                bound.push(y.clone());
                go(b, bound, out);
                bound.truncate(bound.len() - 2);
            }
        }
    }
    go(t, &mut Vec::new(), &mut out);
    out
}

/// All names occurring in `t`, free or bound.
pub fn all_names(t: &Term) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    t.visit(&mut |s| match s {
        Term::Var(x) | Term::Lam(x, _, _) => {
            out.insert(x.clone());
        }
        Term::LetPair(x, y, _, _) => {
            out.insert(x.clone());
            out.insert(y.clone());
        }
        _ => {}
    });
    out
}

/// `base` itself if unused, else `base_1`, `base_2`, ...
pub fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    let stem = base.split('_').next().filter(|s| !s.is_empty()).unwrap_or("v");
    if !avoid.contains(base) {
        return base.to_string();
    }
    (1..).map(|i| format!("{stem}_{i}")).find(|c| !avoid.contains(c)).expect("infinite supply")
}

/// Capture-avoiding `t[v/x]`.
pub fn substitute(t: &Term, x: &str, v: &Term) -> Term {
    subst_many(t, &[(x.to_string(), v.clone())])
}

/// Simultaneous capture-avoiding substitution.
pub fn subst_many(t: &Term, map: &[(String, Term)]) -> Term {
    if map.is_empty() {
        return t.clone();
    }
    let mut danger = BTreeSet::new();
    for (_, v) in map {
        danger.extend(free_vars(v));
    }
    subst_rec(t, map, &danger)
}

fn subst_rec(t: &Term, map: &[(String, Term)], danger: &BTreeSet<String>) -> Term {
    let go = |s: &Term| Box::new(subst_rec(s, map, danger));
    match t {
        Term::Var(x) => map.iter().find(|(y, _)| y == x).map(|(_, v)| v.clone()).unwrap_or_else(|| t.clone()),
        Term::Const(_) | Term::Star => t.clone(),
        Term::FnApp(f, args) => Term::FnApp(f.clone(), args.iter().map(|a| subst_rec(a, map, danger)).collect()),
        Term::App(a, b) => Term::App(go(a), go(b)),
        Term::Pair(a, b) => Term::Pair(go(a), go(b)),
        Term::LetStar(a, b) => Term::LetStar(go(a), go(b)),
        Term::Lam(x, ty, body) => {
            let (binders, body) = rebind(std::slice::from_ref(x), body, map, danger);
            Term::Lam(binders[0].clone(), ty.clone(), Box::new(body))
        }
        Term::LetPair(x, y, a, body) => {
            let a = subst_rec(a, map, danger);
            let (binders, body) = rebind(&[x.clone(), y.clone()], body, map, danger);
            Term::LetPair(binders[0].clone(), binders[1].clone(), Box::new(a), Box::new(body))
        }
    }
}

/// Pushes a substitution under binders, renaming those that would capture.
fn rebind(binders: &[String], body: &Term, map: &[(String, Term)], danger: &BTreeSet<String>) -> (Vec<String>, Term) {
    let inner: Vec<(String, Term)> = map.iter().filter(|(y, _)| !binders.contains(y)).cloned().collect();
    if inner.is_empty() {
        return (binders.to_vec(), body.clone());
    }
    let mut avoid = danger.clone();
    avoid.extend(all_names(body));
    for (y, _) in &inner {
        avoid.insert(y.clone());
    }
    let mut renamed = Vec::new();
    let mut new_binders = Vec::new();
    for b in binders {
        if danger.contains(b) {
            let nb = fresh_name(b, &avoid);
            avoid.insert(nb.clone());
            renamed.push((b.clone(), Term::Var(nb.clone())));
            new_binders.push(nb);
        } else {
            new_binders.push(b.clone());
        }
    }
    let body = if renamed.is_empty() { body.clone() } else { subst_many(body, &renamed) };
    (new_binders, subst_rec(&body, &inner, danger))
}

/// α-equivalence.
pub fn alpha_eq(a: &Term, b: &Term) -> bool {
    fn go(a: &Term, b: &Term, env: &mut Vec<(String, String)>) -> bool {
        match (a, b) {
            (Term::Var(x), Term::Var(y)) => {
                let bx = env.iter().rev().find(|(l, _)| l == x);
                let by = env.iter().rev().find(|(_, r)| r == y);
                match (bx, by) {
                    (None, None) => x == y,
                    (Some((_, r)), Some((l, _))) => r == y && l == x,
                    _ => false,
                }
            }
            (Term::Const(p), Term::Const(q)) => p.to_bits() == q.to_bits() || p == q,
            (Term::Star, Term::Star) => true,
            (Term::FnApp(f, xs), Term::FnApp(g, ys)) => {
                f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(p, q)| go(p, q, env))
            }
            (Term::App(a1, a2), Term::App(b1, b2))
            | (Term::Pair(a1, a2), Term::Pair(b1, b2))
            | (Term::LetStar(a1, a2), Term::LetStar(b1, b2)) => go(a1, b1, env) && go(a2, b2, env),
            (Term::Lam(x, s, m), Term::Lam(y, t, n)) => {
                if s != t {
                    return false;
                }
                env.push((x.clone(), y.clone()));
                let r = go(m, n, env);
                env.pop();
                r
            }
            (Term::LetPair(x1, y1, m1, n1), Term::LetPair(x2, y2, m2, n2)) => {
                if !go(m1, m2, env) {
                    return false;
                }
                env.push((x1.clone(), x2.clone()));
                env.push((y1.clone(), y2.clone()));
                let r = go(n1, n2, env);
                env.truncate(env.len() - 2);
                r
            }
            _ => false,
        }
    }
    go(a, b, &mut Vec::new())
}

fn apply_symbol(f: &str, args: &[f64], reg: &SymbolRegistry) -> Result<f64, EvalError> {
    let sym = reg.get(f).ok_or_else(|| EvalError::UnknownSymbol(f.to_string()))?;
    let v = sym.eval(args);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EvalError::NonFinite(f.to_string()))
    }
}

/// Big-step evaluation of a closed term to a value.
pub fn eval(t: &Term, reg: &SymbolRegistry) -> Result<Term, EvalError> {
    eval_counted(t, reg).map(|(v, _)| v)
}

/// Evaluation that also reports the number of β and let steps taken.
pub fn eval_counted(t: &Term, reg: &SymbolRegistry) -> Result<(Term, usize), EvalError> {
    let mut steps = 0;
    let v = eval_rec(t, reg, &mut steps)?;
    Ok((v, steps))
}

fn eval_rec(t: &Term, reg: &SymbolRegistry, steps: &mut usize) -> Result<Term, EvalError> {
    match t {
        Term::Var(x) => Err(EvalError::FreeVariable(x.clone())),
        Term::Const(_) | Term::Star | Term::Lam(..) => Ok(t.clone()),
        Term::FnApp(f, args) => {
            let mut xs = Vec::with_capacity(args.len());
            for a in args {
                match eval_rec(a, reg, steps)? {
                    Term::Const(x) => xs.push(x),
                    other => return Err(EvalError::Stuck(other.to_string())),
                }
            }
            Ok(Term::Const(apply_symbol(f, &xs, reg)?))
        }
        Term::App(m, n) => {
            let f = eval_rec(m, reg, steps)?;
            let v = eval_rec(n, reg, steps)?;
            match f {
                Term::Lam(x, _, body) => {
                    *steps += 1;
                    eval_rec(&substitute(&body, &x, &v), reg, steps)
                }
                other => Err(EvalError::Stuck(other.to_string())),
            }
        }
        Term::Pair(m, n) => Ok(Term::pair(eval_rec(m, reg, steps)?, eval_rec(n, reg, steps)?)),
        Term::LetStar(m, n) => match eval_rec(m, reg, steps)? {
            Term::Star => {
                *steps += 1;
                eval_rec(n, reg, steps)
            }
            other => Err(EvalError::Stuck(other.to_string())),
        },
        Term::LetPair(x, y, m, n) => match eval_rec(m, reg, steps)? {
            Term::Pair(a, b) => {
                *steps += 1;
                eval_rec(&subst_many(n, &[(x.clone(), *a), (y.clone(), *b)]), reg, steps)
            }
            other => Err(EvalError::Stuck(other.to_string())),
        },
    }
}

pub fn is_beta_normal(t: &Term) -> bool {
    let mut ok = true;
    t.visit(&mut |s| match s {
        Term::App(f, _) if matches!(**f, Term::Lam(..)) => ok = false,
        Term::LetStar(m, _) if matches!(**m, Term::Star) => ok = false,
        Term::LetPair(_, _, m, _) if matches!(**m, Term::Pair(..)) => ok = false,
        _ => {}
    });
    ok
}

/// β-normal form, contracting β and let redexes.
pub fn beta_normalize(t: &Term) -> Term {
    beta_normalize_counted(t).0
}

/// β-normal form and the number of contractions performed.
pub fn beta_normalize_counted(t: &Term) -> (Term, usize) {
    let mut steps = 0;
    let n = norm(t, &mut steps);
    (n, steps)
}

fn norm(t: &Term, steps: &mut usize) -> Term {
    match t {
        Term::Var(_) | Term::Const(_) | Term::Star => t.clone(),
        Term::FnApp(f, args) => Term::FnApp(f.clone(), args.iter().map(|a| norm(a, steps)).collect()),
        Term::Lam(x, ty, b) => Term::Lam(x.clone(), ty.clone(), Box::new(norm(b, steps))),
        Term::Pair(a, b) => Term::pair(norm(a, steps), norm(b, steps)),
        Term::App(m, n) => {
            let m = norm(m, steps);
            let n = norm(n, steps);
            match m {
                Term::Lam(x, _, body) => {
                    *steps += 1;
                    norm(&substitute(&body, &x, &n), steps)
                }
                m => Term::app(m, n),
            }
        }
        Term::LetStar(m, n) => match norm(m, steps) {
            Term::Star => {
                *steps += 1;
                norm(n, steps)
            }
            m => Term::let_star(m, norm(n, steps)),
        },
        Term::LetPair(x, y, m, n) => match norm(m, steps) {
            Term::Pair(a, b) => {
                *steps += 1;
                norm(&subst_many(n, &[(x.clone(), *a), (y.clone(), *b)]), steps)
            }
            m => Term::LetPair(x.clone(), y.clone(), Box::new(m), Box::new(norm(n, steps))),
        },
    }
}

const CANONICAL_PASSES: usize = 200;

/// Canonical representative modulo β, let-β, the symbol axiom on literal
/// arguments, η for `⊸`, `I`, `⊗`, and the let-commuting conversions (lets
/// are pushed inwards).
pub fn eq_canonical(t: &Term, reg: &SymbolRegistry) -> Term {
    let mut cur = t.clone();
    for _ in 0..CANONICAL_PASSES {
        let next = canon_pass(&beta_normalize(&cur), reg);
        if next == cur {
            return cur;
        }
        cur = next;
    }
    cur
}

fn canon_pass(t: &Term, reg: &SymbolRegistry) -> Term {
    let go = |s: &Term| canon_pass(s, reg);
    let t = match t {
        Term::Var(_) | Term::Const(_) | Term::Star => t.clone(),
        Term::FnApp(f, args) => Term::FnApp(f.clone(), args.iter().map(go).collect()),
        Term::App(a, b) => Term::app(go(a), go(b)),
        Term::Pair(a, b) => Term::pair(go(a), go(b)),
        Term::Lam(x, ty, b) => Term::lam(x, ty.clone(), go(b)),
        Term::LetStar(a, b) => Term::let_star(go(a), go(b)),
        Term::LetPair(x, y, a, b) => Term::let_pair(x, y, go(a), go(b)),
    };
    rewrite_root(t, reg)
}

fn rewrite_root(t: Term, reg: &SymbolRegistry) -> Term {
    match t {
        Term::FnApp(f, args) => {
            let lits: Option<Vec<f64>> =
                args.iter().map(|a| if let Term::Const(x) = a { Some(*x) } else { None }).collect();
            match lits.and_then(|xs| reg.get(&f).map(|s| s.eval(&xs))) {
                Some(v) if v.is_finite() => Term::Const(v),
                _ => Term::FnApp(f, args),
            }
        }
        // η for ⊸
        Term::Lam(x, ty, body) => match *body {
            Term::App(m, arg) if matches!(&*arg, Term::Var(y) if *y == x) && !free_vars(&m).contains(&x) => *m,
            body => Term::Lam(x, ty, Box::new(body)),
        },
        // η for I, then commute inwards
        Term::LetStar(m, n) => match *n {
            Term::Star => *m,
            n => push_let_star(*m, n),
        },
        // η for ⊗, then commute inwards
        Term::LetPair(x, y, m, n) => match *n {
            Term::Pair(ref a, ref b) if matches!((&**a, &**b), (Term::Var(p), Term::Var(q)) if *p == x && *q == y) => {
                *m
            }
            n => push_let_pair(x, y, *m, n),
        },
        other => other,
    }
}

/// `let * = m in C[n] ~> C[let * = m in n]` with the hole in the leftmost child.
fn push_let_star(m: Term, n: Term) -> Term {
    let fm = free_vars(&m);
    match n {
        Term::App(a, b) => Term::App(Box::new(Term::let_star(m, *a)), b),
        Term::Pair(a, b) => Term::Pair(Box::new(Term::let_star(m, *a)), b),
        Term::FnApp(f, mut args) => {
            let first = args.remove(0);
            args.insert(0, Term::let_star(m, first));
            Term::FnApp(f, args)
        }
        Term::LetStar(a, b) => Term::LetStar(Box::new(Term::let_star(m, *a)), b),
        Term::LetPair(x, y, a, b) => Term::LetPair(x, y, Box::new(Term::let_star(m, *a)), b),
        Term::Lam(x, ty, b) if !fm.contains(&x) => Term::Lam(x, ty, Box::new(Term::let_star(m, *b))),
        n => Term::let_star(m, n),
    }
}

/// `let x (x) y = m in C[n] ~> C[let x (x) y = m in n]` into the unique child
/// that mentions both `x` and `y`.
fn push_let_pair(x: String, y: String, m: Term, n: Term) -> Term {
    let fm = free_vars(&m);
    let has_both = |s: &Term| {
        let fv = free_vars(s);
        fv.contains(&x) && fv.contains(&y)
    };
    let wrap = |s: Term| Term::LetPair(x.clone(), y.clone(), Box::new(m.clone()), Box::new(s));
    match n {
        Term::App(a, b) if has_both(&a) => Term::App(Box::new(wrap(*a)), b),
        Term::App(a, b) if has_both(&b) => Term::App(a, Box::new(wrap(*b))),
        Term::Pair(a, b) if has_both(&a) => Term::Pair(Box::new(wrap(*a)), b),
        Term::Pair(a, b) if has_both(&b) => Term::Pair(a, Box::new(wrap(*b))),
        Term::FnApp(f, args) if args.iter().any(has_both) => {
            let i = args.iter().position(has_both).expect("checked");
            let mut args = args;
            let ai = args.remove(i);
            args.insert(i, wrap(ai));
            Term::FnApp(f, args)
        }
        Term::LetStar(a, b) if has_both(&a) => Term::LetStar(Box::new(wrap(*a)), b),
        Term::LetStar(a, b) if has_both(&b) => Term::LetStar(a, Box::new(wrap(*b))),
        Term::LetPair(u, v, a, b) if has_both(&a) => Term::LetPair(u, v, Box::new(wrap(*a)), b),
        Term::LetPair(u, v, a, b)
            if has_both(&b)
                && !fm.contains(&u)
                && !fm.contains(&v)
                && ![&u, &v].contains(&&x)
                && ![&u, &v].contains(&&y) =>
        {
            Term::LetPair(u, v, a, Box::new(wrap(*b)))
        }
        Term::Lam(z, ty, b) if !fm.contains(&z) && z != x && z != y => Term::Lam(z, ty, Box::new(wrap(*b))),
        n => wrap(n),
    }
}

/// Sound (possibly incomplete) test of `Γ ⊢ M = N : τ`: both sides reach the
/// same canonical form up to α.
pub fn eq_decide(env: &Env, m: &Term, n: &Term, reg: &SymbolRegistry) -> Result<bool, TypeError> {
    let tm = typecheck(env, m, reg)?;
    let tn = typecheck(env, n, reg)?;
    if tm != tn {
        return Err(TypeError::Mismatch { place: "the right-hand term".into(), expected: tm.to_string(), found: tn });
    }
    Ok(alpha_eq(&eq_canonical(m, reg), &eq_canonical(n, reg)))
}

/// Renames every binder to a distinct name not clashing with free variables.
pub fn uniquify_binders(t: &Term) -> Term {
    struct Renamer {
        avoid: BTreeSet<String>,
        seen: HashMap<String, usize>,
        scope: Vec<(String, String)>,
    }
    impl Renamer {
        fn binder(&mut self, x: &str) -> String {
            let c = self.seen.entry(x.to_string()).or_insert(0);
            *c += 1;
            if *c == 1 {
                return x.to_string();
            }
            let nx = fresh_name(x, &self.avoid);
            self.avoid.insert(nx.clone());
            nx
        }

        fn go(&mut self, t: &Term) -> Term {
            match t {
                Term::Var(x) => Term::Var(
                    self.scope.iter().rev().find(|(o, _)| o == x).map(|(_, n)| n.clone()).unwrap_or_else(|| x.clone()),
                ),
                Term::Const(_) | Term::Star => t.clone(),
                Term::FnApp(f, args) => Term::FnApp(f.clone(), args.iter().map(|a| self.go(a)).collect()),
                Term::App(a, b) => Term::app(self.go(a), self.go(b)),
                Term::Pair(a, b) => Term::pair(self.go(a), self.go(b)),
                Term::LetStar(a, b) => Term::let_star(self.go(a), self.go(b)),
                Term::Lam(x, ty, b) => {
                    let nx = self.binder(x);
                    self.scope.push((x.clone(), nx.clone()));
                    let b = self.go(b);
                    self.scope.pop();
                    Term::Lam(nx, ty.clone(), Box::new(b))
                }
                Term::LetPair(x, y, a, b) => {
                    let a = self.go(a);
                    let nx = self.binder(x);
                    let ny = self.binder(y);
                    self.scope.push((x.clone(), nx.clone()));
                    self.scope.push((y.clone(), ny.clone()));
                    let b = self.go(b);
                    self.scope.truncate(self.scope.len() - 2);
                    Term::LetPair(nx, ny, Box::new(a), Box::new(b))
                }
            }
        }
    }
    let seen = free_vars(t).into_iter().map(|x| (x, 1)).collect();
    Renamer { avoid: all_names(t), seen, scope: Vec::new() }.go(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_env, parse_term};

    fn reg() -> SymbolRegistry {
        SymbolRegistry::standard()
    }

    fn p(s: &str) -> Term {
        parse_term(s, &reg()).unwrap()
    }

    #[test]
    fn substitution_examples() {
        assert_eq!(substitute(&p("x"), "x", &p("5.0")), p("5.0"));
        assert_eq!(substitute(&p("\\y:R. add(x, y)"), "x", &p("2.0")), p("\\y:R. add(2.0, y)"));
        assert_eq!(substitute(&p("x * *"), "x", &p("1.0")), p("1.0 * *"));
    }

    #[test]
    fn substitution_avoids_capture() {
        let t = substitute(&p("\\y:R. add(x, y)"), "x", &p("y"));
        assert!(alpha_eq(&t, &p("\\z:R. add(y, z)")));
    }

    #[test]
    fn evaluation_examples() {
        let r = reg();
        assert_eq!(eval(&p("sin(0.0)"), &r).unwrap(), Term::Const(0.0));
        assert_eq!(eval(&p("let x (x) y = 1.0 * 2.0 in y * x"), &r).unwrap(), p("2.0 * 1.0"));
        let ma_f = p("(\\k:R -o R. k 3.0) (\\x:R. sin(x))");
        assert_eq!(eval(&ma_f, &r).unwrap(), Term::Const(3f64.sin()));
    }

    #[test]
    fn normalization_examples() {
        assert_eq!(beta_normalize(&p("(\\x:R. x) 5.0")), p("5.0"));
        assert_eq!(beta_normalize(&p("\\k:R -o R. (\\z:R. k z) 2.0")), p("\\k:R -o R. k 2.0"));
        assert_eq!(beta_normalize(&p("(\\k:R -o R. k 3.0) (\\x:R. sin(x))")), p("sin(3.0)"));
        assert!(is_beta_normal(&p("\\k:R -o R. k 2.0")));
        assert!(!is_beta_normal(&p("let * = * in 1.0")));
    }

    #[test]
    fn canonical_forms() {
        let r = reg();
        assert!(alpha_eq(&eq_canonical(&p("\\x:R. (\\y:R. y) x"), &r), &p("\\x:R. x")));
        assert_eq!(eq_canonical(&p("add(2.0, 3.0)"), &r), p("5.0"));
        assert_eq!(eq_canonical(&p("let * = * in 4.0"), &r), p("4.0"));
        assert_eq!(eq_canonical(&p("\\f:R -o R. \\x:R. f x"), &r), p("\\f:R -o R. f"));
    }

    #[test]
    fn let_commuting_conversions_agree() {
        let r = reg();
        let env = parse_env("u:I, k:R -o R").unwrap();
        assert!(eq_decide(&env, &p("let * = u in k 1.0"), &p("(let * = u in k) 1.0"), &r).unwrap());
        let env = parse_env("p:R (x) R").unwrap();
        assert!(eq_decide(&env, &p("let a (x) b = p in a * b"), &p("p"), &r).unwrap());
        assert!(eq_decide(
            &env,
            &p("let a (x) b = p in 1.0 * add(a, b)"),
            &p("1.0 * (let a (x) b = p in add(a, b))"),
            &r
        )
        .unwrap());
    }

    #[test]
    fn decide_distinguishes_constants() {
        let r = reg();
        let e = Env::empty();
        assert!(eq_decide(&e, &p("0.0"), &p("0.0"), &r).unwrap());
        assert!(!eq_decide(&e, &p("0.0"), &p("1.0"), &r).unwrap());
        assert!(eq_decide(&e, &p("1.0"), &p("sin(1.0)"), &r).is_ok());
        assert!(eq_decide(&e, &p("1.0"), &p("*"), &r).is_err());
    }

    #[test]
    fn uniquify_removes_shadowing() {
        let t = uniquify_binders(&p("\\x:R. x * (\\x:R. x)"));
        assert!(alpha_eq(&t, &p("\\x:R. x * (\\y:R. y)")));
        assert_ne!(t, p("\\x:R. x * (\\x:R. x)"));
    }
}
