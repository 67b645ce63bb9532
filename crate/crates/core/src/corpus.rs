//! Seeded generation of well-typed linear terms.
//!
//! [`TermBuilder`] turns a list of linear resources into a term of a goal
//! type: functions are introduced by λ, `I` and `⊗` resources are eliminated
//! by `let`, function resources are applied to arguments built from the
//! available reals, and the remaining reals are combined with binary symbols.
//! The result is β-normal by construction.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::is_beta_normal;
use crate::registry::SymbolRegistry;
use crate::syntax::{Env, Term, Type};
use crate::typing::typecheck;

/// Literals drawn by the generator; multiples of 1/4 keep float arithmetic exact.
pub fn nice_constant(rng: &mut impl Rng) -> f64 {
    f64::from(rng.gen_range(-40i32..=40)) / 4.0
}

/// Whether a term of this type can consume real resources.
fn absorbs_reals(ty: &Type) -> bool {
    match ty {
        Type::R => true,
        Type::I => false,
        Type::Tensor(a, b) => absorbs_reals(a) || absorbs_reals(b),
        Type::Lolli(_, b) => absorbs_reals(b),
    }
}

pub struct TermBuilder<'a> {
    reg: &'a SymbolRegistry,
    rng: ChaCha8Rng,
    fresh: usize,
    /// Avoid optional decorations: no extra symbols or constants, reals are
    /// passed on in order, and the first binary symbol combines them.
    pub plain: bool,
    binary: Vec<String>,
    unary: Vec<String>,
}

impl<'a> TermBuilder<'a> {
    pub fn new(reg: &'a SymbolRegistry, seed: u64, plain: bool) -> TermBuilder<'a> {
        let mut binary: Vec<String> = reg.iter().filter(|s| s.arity == 2).map(|s| s.name.clone()).collect();
        // `add` first so that plain terms read naturally
        binary.sort_by_key(|n| (n != "add", n.clone()));
        let unary = reg.iter().filter(|s| s.arity == 1).map(|s| s.name.clone()).collect();
        TermBuilder { reg, rng: ChaCha8Rng::seed_from_u64(seed), fresh: 0, plain, binary, unary }
    }

    pub fn registry(&self) -> &SymbolRegistry {
        self.reg
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    fn fresh(&mut self, stem: &str) -> String {
        self.fresh += 1;
        format!("{stem}{}", self.fresh)
    }

    /// A closed term of type `goal`.
    pub fn closed(&mut self, goal: &Type) -> Option<Term> {
        self.build(Vec::new(), goal)
    }

    /// A term of type `goal` using each resource exactly once.
    pub fn build(&mut self, mut res: Vec<(Term, Type)>, goal: &Type) -> Option<Term> {
        if let Type::Lolli(a, b) = goal {
            let y = self.fresh("y");
            res.push((Term::var(&y), (**a).clone()));
            return Some(Term::lam(&y, (**a).clone(), self.build(res, b)?));
        }
        let pick = res
            .iter()
            .position(|(_, t)| matches!(t, Type::I | Type::Tensor(..)))
            .or_else(|| res.iter().position(|(_, t)| matches!(t, Type::Lolli(..))));
        let Some(i) = pick else {
            let reals = res.into_iter().map(|(t, _)| t).collect();
            return self.spend_reals(reals, goal);
        };
        let (t, ty) = res.remove(i);
        match ty {
            Type::I => Some(Term::let_star(t, self.build(res, goal)?)),
            Type::Tensor(a, b) => {
                let (x, y) = (self.fresh("p"), self.fresh("q"));
                res.push((Term::var(&x), *a));
                res.push((Term::var(&y), *b));
                Some(Term::let_pair(&x, &y, t, self.build(res, goal)?))
            }
            Type::Lolli(a, b) => {
                let mut arg_res = Vec::new();
                if absorbs_reals(&a) {
                    let mut keep = Vec::new();
                    for r in res.drain(..) {
                        let take = r.1 == Type::R && (self.plain || self.rng.gen_bool(0.5));
                        if take {
                            arg_res.push(r);
                        } else {
                            keep.push(r);
                        }
                    }
                    res = keep;
                }
                let arg = self.build(arg_res, &a)?;
                res.push((Term::app(t, arg), *b));
                self.build(res, goal)
            }
            Type::R => unreachable!("reals are not picked"),
        }
    }

    fn spend_reals(&mut self, mut reals: Vec<Term>, goal: &Type) -> Option<Term> {
        match goal {
            Type::R => self.combine(reals),
            Type::I => reals.is_empty().then_some(Term::Star),
            Type::Tensor(a, b) => {
                let (ra, rb) = (absorbs_reals(a), absorbs_reals(b));
                let cut = match (ra, rb) {
                    (true, false) => reals.len(),
                    (false, true) => 0,
                    (false, false) if reals.is_empty() => 0,
                    (false, false) => return None,
                    (true, true) if self.plain => reals.len(),
                    (true, true) => self.rng.gen_range(0..=reals.len()),
                };
                let right = reals.split_off(cut);
                Some(Term::pair(self.spend_reals(reals, a)?, self.spend_reals(right, b)?))
            }
            Type::Lolli(..) => {
                let res = reals.into_iter().map(|t| (t, Type::R)).collect();
                self.build(res, goal)
            }
        }
    }

    fn combine(&mut self, mut reals: Vec<Term>) -> Option<Term> {
        if reals.is_empty() {
            return Some(Term::Const(if self.plain { 0.0 } else { nice_constant(&mut self.rng) }));
        }
        if reals.len() > 1 && self.binary.is_empty() {
            return None;
        }
        if !self.plain {
            reals.shuffle(&mut self.rng);
        }
        let mut acc = reals.remove(0);
        for r in reals {
            let f = self.pick_binary();
            acc = Term::fn_app(&f, vec![acc, r]);
        }
        if !self.plain {
            if !self.binary.is_empty() && self.rng.gen_bool(0.2) {
                let f = self.pick_binary();
                let c = Term::Const(nice_constant(&mut self.rng));
                acc = Term::fn_app(&f, vec![acc, c]);
            }
            if !self.unary.is_empty() && self.rng.gen_bool(0.2) {
                let f = self.unary.choose(&mut self.rng).expect("non-empty").clone();
                acc = Term::fn_app(&f, vec![acc]);
            }
        }
        Some(acc)
    }

    fn pick_binary(&mut self) -> String {
        if self.plain {
            self.binary[0].clone()
        } else {
            self.binary.choose(&mut self.rng).expect("non-empty").clone()
        }
    }
}

/// Types of free variables: first order.
pub fn env_types() -> Vec<Type> {
    let (r, i) = (Type::R, Type::I);
    vec![
        r.clone(),
        r.clone(),
        i.clone(),
        Type::tensor(r.clone(), r.clone()),
        Type::lolli(r.clone(), r.clone()),
        Type::lolli(r.clone(), r.clone()),
        Type::lolli(r.clone(), i.clone()),
        Type::lolli(Type::tensor(r.clone(), r.clone()), r.clone()),
        Type::lolli(r.clone(), Type::tensor(r.clone(), r.clone())),
        Type::lolli(i, r),
    ]
}

/// Result types: up to second order.
pub fn goal_types() -> Vec<Type> {
    let (r, i) = (Type::R, Type::I);
    let rr = Type::lolli(r.clone(), r.clone());
    vec![
        r.clone(),
        r.clone(),
        i.clone(),
        Type::tensor(r.clone(), r.clone()),
        Type::tensor(r.clone(), i.clone()),
        rr.clone(),
        Type::lolli(Type::tensor(r.clone(), r.clone()), r.clone()),
        Type::lolli(rr.clone(), r.clone()),
        Type::tensor(r.clone(), rr.clone()),
        Type::lolli(r.clone(), Type::tensor(r.clone(), r.clone())),
        Type::lolli(Type::lolli(Type::tensor(r.clone(), r.clone()), r.clone()), r.clone()),
        Type::lolli(Type::lolli(r.clone(), i), r),
    ]
}

pub fn observable_goal_types() -> Vec<Type> {
    let r = Type::R;
    vec![
        r.clone(),
        Type::I,
        Type::tensor(r.clone(), r.clone()),
        Type::tensor(Type::tensor(r.clone(), r.clone()), r.clone()),
        Type::tensor(r.clone(), Type::I),
    ]
}

/// A typed term.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub env: Env,
    pub ty: Type,
    pub term: Term,
}

/// How the two sides of a generated pair relate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairKind {
    /// Same term with some literals moved.
    Perturbed,
    /// One symbol replaced by another of the same arity.
    SwappedSymbol,
    /// Two independently generated terms.
    Independent,
    /// A perturbed pair in which one side carries a β-redex.
    WithRedex,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TermPair {
    pub env: Env,
    pub ty: Type,
    pub m: Term,
    pub n: Term,
    pub kind: PairKind,
}

/// Deterministic stream of random samples.
pub struct Corpus<'a> {
    builder: TermBuilder<'a>,
    pub max_size: usize,
    pub max_env: usize,
}

impl<'a> Corpus<'a> {
    pub fn new(seed: u64, reg: &'a SymbolRegistry) -> Corpus<'a> {
        Corpus { builder: TermBuilder::new(reg, seed, false), max_size: 25, max_env: 3 }
    }

    fn rng(&mut self) -> &mut ChaCha8Rng {
        self.builder.rng()
    }

    fn random_env(&mut self) -> Env {
        let types = env_types();
        let max_env = self.max_env;
        let k = self.rng().gen_range(0..=max_env);
        Env::new((0..k).map(|i| (format!("x{i}"), types.choose(self.rng()).expect("non-empty").clone())).collect())
    }

    /// Builds a term for `(env, goal)`, retrying a few times.
    pub fn term_for(&mut self, env: &Env, goal: &Type) -> Option<Term> {
        for _ in 0..20 {
            let res = env.iter().map(|(x, t)| (Term::var(x), t.clone())).collect();
            if let Some(t) = self.builder.build(res, goal) {
                if t.size() <= self.max_size {
                    return Some(t);
                }
            }
        }
        None
    }

    fn sample_from(&mut self, goals: &[Type]) -> Sample {
        loop {
            let env = self.random_env();
            let ty = goals.choose(self.rng()).expect("non-empty").clone();
            if let Some(term) = self.term_for(&env, &ty) {
                debug_assert_eq!(typecheck(&env, &term, self.builder.registry()).as_ref(), Ok(&ty));
                debug_assert!(is_beta_normal(&term));
                return Sample { env, ty, term };
            }
        }
    }

    /// A β-normal term with first-order free variables and a result type of
    /// order at most two.
    pub fn normal_term(&mut self) -> Sample {
        self.sample_from(&goal_types())
    }

    /// A closed term of observable type, usually containing β-redexes: an
    /// open term applied to closed arguments for its free variables.
    pub fn closed_observable(&mut self) -> Sample {
        loop {
            let s = self.sample_from(&observable_goal_types());
            if let Some(closed) = self.close(&s.env, s.term) {
                return Sample { env: Env::empty(), ty: s.ty, term: closed };
            }
        }
    }

    /// `(λx1..xk. M) V1 .. Vk`.
    pub fn close(&mut self, env: &Env, term: Term) -> Option<Term> {
        let mut lam = term;
        for (x, t) in env.0.iter().rev() {
            lam = Term::lam(x, t.clone(), lam);
        }
        let mut out = lam;
        for (_, t) in env.iter() {
            out = Term::app(out, self.closed_of(t)?);
        }
        Some(out)
    }

    /// A closed term of type `ty`, if the registry allows one.
    pub fn closed_of(&mut self, ty: &Type) -> Option<Term> {
        (0..20).filter_map(|_| self.builder.closed(ty)).find(|v| v.size() <= self.max_size)
    }

    pub fn pair(&mut self, kind: PairKind) -> TermPair {
        let s = self.normal_term();
        let (env, ty, m) = (s.env, s.ty, s.term);
        let n = match kind {
            PairKind::Perturbed | PairKind::WithRedex => self.perturb(&m),
            PairKind::SwappedSymbol => self.swap_symbol(&m).unwrap_or_else(|| self.perturb(&m)),
            PairKind::Independent => self.term_for(&env, &ty).unwrap_or_else(|| m.clone()),
        };
        let (m, n) = if kind == PairKind::WithRedex {
            if self.rng().gen_bool(0.5) {
                (introduce_redex(&m), n)
            } else {
                (m, introduce_redex(&n))
            }
        } else {
            (m, n)
        };
        TermPair { env, ty, m, n, kind }
    }

    /// Pairs cycling through every kind.
    pub fn pairs(&mut self, count: usize) -> Vec<TermPair> {
        const KINDS: [PairKind; 4] =
            [PairKind::Perturbed, PairKind::SwappedSymbol, PairKind::Independent, PairKind::WithRedex];
        (0..count).map(|i| self.pair(KINDS[i % KINDS.len()])).collect()
    }

    /// Moves one or two literals; leaves the term unchanged if it has none.
    pub fn perturb(&mut self, t: &Term) -> Term {
        let k = t.literals().len();
        if k == 0 {
            return t.clone();
        }
        let mut out = t.clone();
        let moves = if k > 1 && self.rng().gen_bool(0.3) { 2 } else { 1 };
        for _ in 0..moves {
            let idx = self.rng().gen_range(0..k);
            let c = nice_constant(self.rng());
            out = replace_literal(&out, idx, &Term::Const(c));
        }
        out
    }

    fn swap_symbol(&mut self, t: &Term) -> Option<Term> {
        let mut sites = Vec::new();
        t.visit(&mut |s| {
            if let Term::FnApp(f, args) = s {
                sites.push((f.clone(), args.len()));
            }
        });
        if sites.is_empty() {
            return None;
        }
        let idx = self.rng().gen_range(0..sites.len());
        let (f, arity) = sites[idx].clone();
        let others: Vec<String> = self
            .builder
            .registry()
            .iter()
            .filter(|s| s.arity == arity && s.name != f)
            .map(|s| s.name.clone())
            .collect();
        let g = others.choose(self.rng())?.clone();
        let mut counter = 0;
        Some(rename_symbol_at(t, idx, &g, &mut counter))
    }
}

/// Replaces the `idx`-th literal (pre-order) by `with`.
pub fn replace_literal(t: &Term, idx: usize, with: &Term) -> Term {
    fn go(t: &Term, idx: usize, with: &Term, seen: &mut usize) -> Term {
        let mut rec = |s: &Term| go(s, idx, with, seen);
        match t {
            Term::Const(_) => {
                let here = *seen == idx;
                *seen += 1;
                if here {
                    with.clone()
                } else {
                    t.clone()
                }
            }
            Term::Var(_) | Term::Star => t.clone(),
            Term::FnApp(f, args) => Term::FnApp(f.clone(), args.iter().map(&mut rec).collect()),
            Term::App(a, b) => {
                let a = rec(a);
                Term::app(a, rec(b))
            }
            Term::Pair(a, b) => {
                let a = rec(a);
                Term::pair(a, rec(b))
            }
            Term::LetStar(a, b) => {
                let a = rec(a);
                Term::let_star(a, rec(b))
            }
            Term::LetPair(x, y, a, b) => {
                let a = rec(a);
                Term::let_pair(x, y, a, rec(b))
            }
            Term::Lam(x, ty, b) => Term::lam(x, ty.clone(), rec(b)),
        }
    }
    go(t, idx, with, &mut 0)
}

fn rename_symbol_at(t: &Term, idx: usize, g: &str, seen: &mut usize) -> Term {
    if let Term::FnApp(f, args) = t {
        let name = if *seen == idx { g.to_string() } else { f.clone() };
        *seen += 1;
        return Term::FnApp(name, args.iter().map(|a| rename_symbol_at(a, idx, g, seen)).collect());
    }
    let mut rec = |s: &Term| rename_symbol_at(s, idx, g, seen);
    match t {
        Term::FnApp(..) => unreachable!(),
        Term::Var(_) | Term::Const(_) | Term::Star => t.clone(),
        Term::App(a, b) => {
            let a = rec(a);
            Term::app(a, rec(b))
        }
        Term::Pair(a, b) => {
            let a = rec(a);
            Term::pair(a, rec(b))
        }
        Term::LetStar(a, b) => {
            let a = rec(a);
            Term::let_star(a, rec(b))
        }
        Term::LetPair(x, y, a, b) => {
            let a = rec(a);
            Term::let_pair(x, y, a, rec(b))
        }
        Term::Lam(x, ty, b) => Term::lam(x, ty.clone(), rec(b)),
    }
}

/// Abstracts the first literal: `C[a]` becomes `(λz:R. C[z]) a`. Terms
/// without literals are returned unchanged.
pub fn introduce_redex(t: &Term) -> Term {
    let lits = t.literals();
    let Some(&a) = lits.first() else { return t.clone() };
    let z = crate::dynamics::fresh_name("z", &crate::dynamics::all_names(t));
    Term::app(Term::lam(&z, Type::R, replace_literal(t, 0, &Term::var(&z))), Term::Const(a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{beta_normalize, eval};

    #[test]
    fn normal_terms_typecheck_and_are_normal() {
        let reg = SymbolRegistry::standard();
        let mut c = Corpus::new(1, &reg);
        for _ in 0..200 {
            let s = c.normal_term();
            assert_eq!(typecheck(&s.env, &s.term, &reg), Ok(s.ty.clone()), "{}", s.term);
            assert!(is_beta_normal(&s.term), "{}", s.term);
            assert!(s.term.size() <= 25);
            assert!(s.ty.order() <= 2);
        }
    }

    #[test]
    fn closed_observables_evaluate() {
        let reg = SymbolRegistry::standard();
        let mut c = Corpus::new(2, &reg);
        for _ in 0..100 {
            let s = c.closed_observable();
            assert_eq!(typecheck(&Env::empty(), &s.term, &reg), Ok(s.ty.clone()), "{}", s.term);
            eval(&s.term, &reg).unwrap();
        }
    }

    #[test]
    fn pairs_share_their_typing() {
        let reg = SymbolRegistry::standard();
        let mut c = Corpus::new(3, &reg);
        for p in c.pairs(80) {
            assert_eq!(typecheck(&p.env, &p.m, &reg), Ok(p.ty.clone()), "{}", p.m);
            assert_eq!(typecheck(&p.env, &p.n, &reg), Ok(p.ty.clone()), "{}", p.n);
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let reg = SymbolRegistry::standard();
        let a: Vec<Term> = (0..20).scan(Corpus::new(9, &reg), |c, _| Some(c.normal_term().term)).collect();
        let b: Vec<Term> = (0..20).scan(Corpus::new(9, &reg), |c, _| Some(c.normal_term().term)).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn redex_introduction_is_undone_by_normalization() {
        let reg = SymbolRegistry::standard();
        let t = crate::syntax::parse_term("\\k:R -o R. k 2.0", &reg).unwrap();
        let r = introduce_redex(&t);
        assert!(!is_beta_normal(&r));
        assert_eq!(beta_normalize(&r), t);
    }

    #[test]
    fn plain_builder_gives_identity() {
        let reg = SymbolRegistry::standard();
        let mut b = TermBuilder::new(&reg, 0, true);
        let id = b.closed(&Type::lolli(Type::R, Type::R)).unwrap();
        assert_eq!(id.to_string(), "\\y1:R. y1");
    }
}
