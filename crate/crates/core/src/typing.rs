//! Linear typechecking, derivations, and one-hole contexts.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::registry::SymbolRegistry;
use crate::syntax::{Env, Term, Type, HOLE};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TypeError {
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("variable `{0}` is used more than once")]
    UsedTwice(String),
    #[error("variable `{0}` is never used")]
    Unused(String),
    #[error("variable `{0}` appears twice in the environment")]
    DuplicateInEnv(String),
    #[error("expected {expected} in {place}, found {found}")]
    Mismatch { place: String, expected: String, found: Type },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("symbol `{name}` expects {expected} arguments, got {found}")]
    Arity { name: String, expected: usize, found: usize },
    #[error("the hole `[-]` may only occur in a context")]
    StrayHole,
}

/// One node of a typing derivation: the rule, the environment it was checked
/// in (by name, in order), the result type, and the premises.
#[derive(Debug, Clone, PartialEq)]
pub struct Derivation {
    pub rule: &'static str,
    pub env: Vec<String>,
    pub ty: Type,
    pub premises: Vec<Derivation>,
}

impl Derivation {
    /// Every multi-premise node splits its environment into an interleaving of
    /// the premises' environments (binders introduced by the rule excluded).
    pub fn merges_are_sound(&self) -> bool {
        let local_ok = match self.rule {
            "lam" => {
                let body = &self.premises[0].env;
                body.len() == self.env.len() + 1 && body[..self.env.len()] == self.env[..]
            }
            "let_pair" => {
                let m = &self.premises[0].env;
                let body = &self.premises[1].env;
                let delta = &body[..body.len().saturating_sub(2)];
                body.len() >= 2 && is_merge(&self.env, &[m.as_slice(), delta])
            }
            "var" | "const" | "star" | "hole" => true,
            _ => {
                let parts: Vec<&[String]> = self.premises.iter().map(|p| p.env.as_slice()).collect();
                is_merge(&self.env, &parts)
            }
        };
        local_ok && self.premises.iter().all(Derivation::merges_are_sound)
    }
}

/// `whole` is an interleaving of `parts` that preserves each part's order.
pub fn is_merge(whole: &[String], parts: &[&[String]]) -> bool {
    let total: usize = parts.iter().map(|p| p.len()).sum();
    if total != whole.len() {
        return false;
    }
    let mut cursors = vec![0usize; parts.len()];
    for x in whole {
        // names are distinct, so at most one part can accept x
        match parts.iter().enumerate().find(|(i, p)| p.get(cursors[*i]) == Some(x)) {
            Some((i, _)) => cursors[i] += 1,
            None => return false,
        }
    }
    true
}

/// The typing judgement is checked against a scope where shadowing is
/// allowed; each binding occurrence gets a unique id.
struct Checker<'a> {
    reg: &'a SymbolRegistry,
    scope: Vec<Binding>,
    next_id: usize,
    hole: Option<(Env, Type)>,
}

#[derive(Clone)]
struct Binding {
    name: String,
    ty: Type,
    id: usize,
}

struct Judged {
    ty: Type,
    used: BTreeSet<usize>,
    deriv: Derivation,
}

impl<'a> Checker<'a> {
    fn bind(&mut self, name: &str, ty: Type) -> usize {
        let id = self.next_id;
        self.next_id += 1;
        self.scope.push(Binding { name: name.to_string(), ty, id });
        id
    }

    fn env_names(&self, used: &BTreeSet<usize>) -> Vec<String> {
        self.scope.iter().filter(|b| used.contains(&b.id)).map(|b| b.name.clone()).collect()
    }

    fn disjoint(&self, a: &BTreeSet<usize>, b: &BTreeSet<usize>) -> Result<(), TypeError> {
        match a.intersection(b).next() {
            None => Ok(()),
            Some(id) => Err(TypeError::UsedTwice(self.name_of(*id))),
        }
    }

    fn name_of(&self, id: usize) -> String {
        self.scope.iter().find(|b| b.id == id).map(|b| b.name.clone()).unwrap_or_default()
    }

    fn node(&self, rule: &'static str, ty: Type, used: BTreeSet<usize>, premises: Vec<Derivation>) -> Judged {
        let env = self.env_names(&used);
        Judged { deriv: Derivation { rule, env, ty: ty.clone(), premises }, ty, used }
    }

    fn check(&mut self, term: &Term) -> Result<Judged, TypeError> {
        match term {
            Term::Var(x) if x == HOLE => {
                let (env, ty) = self.hole.clone().ok_or(TypeError::StrayHole)?;
                let mut used = BTreeSet::new();
                for (y, t) in env.iter() {
                    let b =
                        self.scope.iter().rev().find(|b| &b.name == y).ok_or_else(|| TypeError::Unbound(y.clone()))?;
                    if &b.ty != t {
                        return Err(TypeError::Mismatch {
                            place: format!("the hole's variable `{y}`"),
                            expected: t.to_string(),
                            found: b.ty.clone(),
                        });
                    }
                    if !used.insert(b.id) {
                        return Err(TypeError::UsedTwice(y.clone()));
                    }
                }
                Ok(self.node("hole", ty, used, vec![]))
            }
            Term::Var(x) => {
                let b = self.scope.iter().rev().find(|b| &b.name == x).ok_or_else(|| TypeError::Unbound(x.clone()))?;
                let (ty, id) = (b.ty.clone(), b.id);
                Ok(self.node("var", ty, BTreeSet::from([id]), vec![]))
            }
            Term::Const(_) => Ok(self.node("const", Type::R, BTreeSet::new(), vec![])),
            Term::Star => Ok(self.node("star", Type::I, BTreeSet::new(), vec![])),
            Term::FnApp(f, args) => {
                let arity = self.reg.arity(f).ok_or_else(|| TypeError::UnknownSymbol(f.clone()))?;
                if arity != args.len() {
                    return Err(TypeError::Arity { name: f.clone(), expected: arity, found: args.len() });
                }
                let mut used = BTreeSet::new();
                let mut premises = Vec::new();
                for (i, a) in args.iter().enumerate() {
                    let j = self.check(a)?;
                    if j.ty != Type::R {
                        return Err(TypeError::Mismatch {
                            place: format!("argument {} of `{f}`", i + 1),
                            expected: "R".into(),
                            found: j.ty,
                        });
                    }
                    self.disjoint(&used, &j.used)?;
                    used.extend(j.used);
                    premises.push(j.deriv);
                }
                Ok(self.node("fn_app", Type::R, used, premises))
            }
            Term::App(m, n) => {
                let jm = self.check(m)?;
                let jn = self.check(n)?;
                let Type::Lolli(dom, cod) = &jm.ty else {
                    return Err(TypeError::Mismatch {
                        place: "function position".into(),
                        expected: "a function type".into(),
                        found: jm.ty,
                    });
                };
                if **dom != jn.ty {
                    return Err(TypeError::Mismatch {
                        place: "argument".into(),
                        expected: dom.to_string(),
                        found: jn.ty,
                    });
                }
                self.disjoint(&jm.used, &jn.used)?;
                let cod = (**cod).clone();
                let used = jm.used.union(&jn.used).copied().collect();
                Ok(self.node("app", cod, used, vec![jm.deriv, jn.deriv]))
            }
            Term::Lam(x, ty, body) => {
                let id = self.bind(x, ty.clone());
                let jb = self.check(body);
                self.scope.pop();
                let mut jb = jb?;
                if !jb.used.remove(&id) {
                    return Err(TypeError::Unused(x.clone()));
                }
                let fty = Type::lolli(ty.clone(), jb.ty.clone());
                Ok(self.node("lam", fty, jb.used, vec![jb.deriv]))
            }
            Term::Pair(m, n) => {
                let jm = self.check(m)?;
                let jn = self.check(n)?;
                self.disjoint(&jm.used, &jn.used)?;
                let used = jm.used.union(&jn.used).copied().collect();
                Ok(self.node("pair", Type::tensor(jm.ty, jn.ty), used, vec![jm.deriv, jn.deriv]))
            }
            Term::LetStar(m, n) => {
                let jm = self.check(m)?;
                if jm.ty != Type::I {
                    return Err(TypeError::Mismatch {
                        place: "`let *` binding".into(),
                        expected: "I".into(),
                        found: jm.ty,
                    });
                }
                let jn = self.check(n)?;
                self.disjoint(&jm.used, &jn.used)?;
                let used = jm.used.union(&jn.used).copied().collect();
                Ok(self.node("let_star", jn.ty, used, vec![jm.deriv, jn.deriv]))
            }
            Term::LetPair(x, y, m, n) => {
                let jm = self.check(m)?;
                let Type::Tensor(a, b) = &jm.ty else {
                    return Err(TypeError::Mismatch {
                        place: "`let (x)` binding".into(),
                        expected: "a tensor type".into(),
                        found: jm.ty,
                    });
                };
                let (a, b) = ((**a).clone(), (**b).clone());
                let ix = self.bind(x, a);
                let iy = self.bind(y, b);
                let jn = self.check(n);
                self.scope.pop();
                self.scope.pop();
                let mut jn = jn?;
                if !jn.used.remove(&ix) {
                    return Err(TypeError::Unused(x.clone()));
                }
                if !jn.used.remove(&iy) {
                    return Err(TypeError::Unused(y.clone()));
                }
                self.disjoint(&jm.used, &jn.used)?;
                let used = jm.used.union(&jn.used).copied().collect();
                // the body premise is checked in Δ followed by x, y
                let mut body = jn.deriv;
                body.env = self.env_names(&jn.used);
                body.env.push(x.clone());
                body.env.push(y.clone());
                Ok(self.node("let_pair", jn.ty, used, vec![jm.deriv, body]))
            }
        }
    }

    fn run(reg: &'a SymbolRegistry, env: &Env, term: &Term, hole: Option<(Env, Type)>) -> Result<Judged, TypeError> {
        if let Some(dup) = env.iter().map(|(x, _)| x).find(|x| env.iter().filter(|(y, _)| y == *x).count() > 1) {
            return Err(TypeError::DuplicateInEnv(dup.clone()));
        }
        let mut ck = Checker { reg, scope: Vec::new(), next_id: 0, hole };
        for (x, t) in env.iter() {
            ck.bind(x, t.clone());
        }
        let j = ck.check(term)?;
        for b in &ck.scope {
            if !j.used.contains(&b.id) {
                return Err(TypeError::Unused(b.name.clone()));
            }
        }
        Ok(j)
    }
}

/// `Γ ⊢ M : τ`, with every variable of Γ used exactly once.
pub fn typecheck(env: &Env, term: &Term, reg: &SymbolRegistry) -> Result<Type, TypeError> {
    Checker::run(reg, env, term, None).map(|j| j.ty)
}

/// Like [`typecheck`] but returns the (unique) derivation.
pub fn derive(env: &Env, term: &Term, reg: &SymbolRegistry) -> Result<Derivation, TypeError> {
    Checker::run(reg, env, term, None).map(|j| j.deriv)
}

/// A term with exactly one occurrence of the hole `[-]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Context {
    pub term: Term,
}

impl Context {
    pub fn new(term: Term) -> Option<Context> {
        (hole_count(&term) == 1).then_some(Context { term })
    }

    pub fn trivial() -> Context {
        Context { term: Term::hole() }
    }

    /// Replaces the hole by `m`. Plugging may capture free variables of `m`,
    /// which is the point of contexts.
    pub fn plug(&self, m: &Term) -> Term {
        plug_term(&self.term, m)
    }
}

impl std::fmt::Display for Context {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.term.fmt(f)
    }
}

fn hole_count(t: &Term) -> usize {
    let mut n = 0;
    t.visit(&mut |s| {
        if matches!(s, Term::Var(x) if x == HOLE) {
            n += 1;
        }
    });
    n
}

fn plug_term(t: &Term, m: &Term) -> Term {
    let go = |s: &Term| Box::new(plug_term(s, m));
    match t {
        Term::Var(x) if x == HOLE => m.clone(),
        Term::Var(_) | Term::Const(_) | Term::Star => t.clone(),
        Term::FnApp(f, args) => Term::FnApp(f.clone(), args.iter().map(|a| plug_term(a, m)).collect()),
        Term::App(a, b) => Term::App(go(a), go(b)),
        Term::Lam(x, ty, b) => Term::Lam(x.clone(), ty.clone(), go(b)),
        Term::Pair(a, b) => Term::Pair(go(a), go(b)),
        Term::LetStar(a, b) => Term::LetStar(go(a), go(b)),
        Term::LetPair(x, y, a, b) => Term::LetPair(x.clone(), y.clone(), go(a), go(b)),
    }
}

/// `C[-] : (Γ, τ) → (Δ, σ)`: typechecks `C` in Δ at σ, treating the hole as
/// an opaque leaf of type τ that consumes exactly the variables of Γ.
pub fn check_context(ctx: &Context, src: (&Env, &Type), dst: (&Env, &Type), reg: &SymbolRegistry) -> bool {
    if hole_count(&ctx.term) != 1 || src.0.has_duplicates() {
        return false;
    }
    match Checker::run(reg, dst.0, &ctx.term, Some((src.0.clone(), src.1.clone()))) {
        Ok(j) => &j.ty == dst.1,
        Err(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_context_term, parse_env, parse_term, parse_type};

    fn reg() -> SymbolRegistry {
        SymbolRegistry::standard()
    }

    fn ty_of(env: &str, src: &str) -> Result<Type, TypeError> {
        typecheck(&parse_env(env).unwrap(), &parse_term(src, &reg()).unwrap(), &reg())
    }

    #[test]
    fn higher_order_query() {
        assert_eq!(ty_of("", "\\k:R -o R. k 0.0").unwrap(), parse_type("(R -o R) -o R").unwrap());
    }

    #[test]
    fn duplication_and_discarding_are_rejected() {
        assert_eq!(ty_of("x:R", "x * x"), Err(TypeError::UsedTwice("x".into())));
        assert_eq!(ty_of("x:R, y:R", "x"), Err(TypeError::Unused("y".into())));
        assert_eq!(ty_of("", "\\x:R. 1.0"), Err(TypeError::Unused("x".into())));
        assert_eq!(ty_of("", "y"), Err(TypeError::Unbound("y".into())));
    }

    #[test]
    fn tensor_of_constants_and_a_function() {
        let t = ty_of("", "1.0 * 1.0 * (\\k:R (x) R -o R. k (0.0 * 0.0))").unwrap();
        assert_eq!(t.to_string(), "R (x) R (x) ((R (x) R -o R) -o R)");
    }

    #[test]
    fn mismatches_are_reported() {
        assert!(matches!(ty_of("x:I", "sin(x)"), Err(TypeError::Mismatch { .. })));
        assert!(matches!(ty_of("", "1.0 2.0"), Err(TypeError::Mismatch { .. })));
        assert!(matches!(ty_of("p:R", "let a (x) b = p in a * b"), Err(TypeError::Mismatch { .. })));
    }

    #[test]
    fn shadowing_is_scoped() {
        assert_eq!(ty_of("y:R", "y * (\\y:R. y)").unwrap().to_string(), "R (x) (R -o R)");
    }

    #[test]
    fn derivations_record_merges() {
        let env = parse_env("a:R, k:R -o R, b:R").unwrap();
        let t = parse_term("add(k a, b)", &reg()).unwrap();
        let d = derive(&env, &t, &reg()).unwrap();
        assert!(d.merges_are_sound());
        assert_eq!(d.env, vec!["a", "k", "b"]);
        assert_eq!(d.premises[0].env, vec!["a", "k"]);
        assert_eq!(d.premises[1].env, vec!["b"]);
    }

    #[test]
    fn merge_check_rejects_reordering() {
        let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        assert!(is_merge(&s(&["a", "b", "c"]), &[&s(&["a", "c"]), &s(&["b"])]));
        assert!(!is_merge(&s(&["a", "b", "c"]), &[&s(&["c", "a"]), &s(&["b"])]));
    }

    #[test]
    fn contexts() {
        let r = reg();
        let e = Env::empty();
        let ctx = |s: &str| Context::new(parse_context_term(s, &r).unwrap()).unwrap();
        assert!(check_context(&Context::trivial(), (&e, &Type::R), (&e, &Type::R), &r));
        assert!(check_context(&ctx("add([-], 1.0)"), (&e, &Type::R), (&e, &Type::R), &r));
        let x2 = Env::new(vec![("x".into(), Type::R), ("x".into(), Type::R)]);
        let lam = ctx("\\x:R. [-]");
        let rr = Type::lolli(Type::R, Type::R);
        assert!(!check_context(&lam, (&x2, &Type::R), (&e, &rr), &r));
        assert!(check_context(&lam, (&Env::single("x", Type::R), &Type::R), (&e, &rr), &r));
        assert_eq!(lam.plug(&Term::var("x")), parse_term("\\x:R. x", &r).unwrap());
    }
}
