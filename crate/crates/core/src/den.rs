//! The metric-cpo model: terms denote non-expansive maps over ℝ⊥, the
//! one-point space, products and closures. Distances at function types are
//! suprema, approximated from below with a deterministic probe battery.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::dynamics::{eval, EvalError};
use crate::metric::{DistInterval, Evidence, ExtReal};
use crate::registry::SymbolRegistry;
use crate::syntax::{Env, Term, Type};
use crate::typing::{typecheck, TypeError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DenError {
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("terms have different types: {0} and {1}")]
    TypeMismatch(Type, Type),
    #[error("environment point has {found} values, expected {expected}")]
    EnvArity { expected: usize, found: usize },
    #[error("value does not have the expected shape: {0}")]
    Shape(String),
    #[error("the probe battery has no values of type {0}")]
    EmptyBattery(Type),
}

type NativeFn = dyn Fn(&SemValue) -> Result<SemValue, DenError> + Send + Sync;

#[derive(Clone)]
pub enum Closure {
    /// A λ-abstraction together with the values of its free variables.
    Lambda { env: Arc<Vec<(String, SemValue)>>, param: String, body: Arc<Term> },
    /// A map built by the probe battery.
    Native { label: String, f: Arc<NativeFn> },
}

/// An element of the interpretation of a type.
#[derive(Clone)]
pub enum SemValue {
    Bottom,
    Real(f64),
    Unit,
    Pair(Box<SemValue>, Box<SemValue>),
    Closure(Closure),
}

impl fmt::Debug for SemValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SemValue::Bottom => f.write_str("⊥"),
            SemValue::Real(x) => write!(f, "{x:?}"),
            SemValue::Unit => f.write_str("*"),
            SemValue::Pair(a, b) => write!(f, "({a:?}, {b:?})"),
            SemValue::Closure(Closure::Lambda { param, body, .. }) => write!(f, "<\\{param}. {body}>"),
            SemValue::Closure(Closure::Native { label, .. }) => write!(f, "<{label}>"),
        }
    }
}

/// Structural equality on the first-order part; closures are never equal.
impl PartialEq for SemValue {
    fn eq(&self, other: &SemValue) -> bool {
        match (self, other) {
            (SemValue::Bottom, SemValue::Bottom) | (SemValue::Unit, SemValue::Unit) => true,
            (SemValue::Real(a), SemValue::Real(b)) => a == b,
            (SemValue::Pair(a1, a2), SemValue::Pair(b1, b2)) => a1 == b1 && a2 == b2,
            _ => false,
        }
    }
}

impl SemValue {
    pub fn native(
        label: impl Into<String>,
        f: impl Fn(&SemValue) -> Result<SemValue, DenError> + Send + Sync + 'static,
    ) -> SemValue {
        SemValue::Closure(Closure::Native { label: label.into(), f: Arc::new(f) })
    }

    pub fn pair(a: SemValue, b: SemValue) -> SemValue {
        SemValue::Pair(Box::new(a), Box::new(b))
    }

    pub fn is_bottom(&self) -> bool {
        matches!(self, SemValue::Bottom)
    }

    /// Function application; strict in a ⊥ function.
    pub fn apply(&self, arg: &SemValue, reg: &SymbolRegistry) -> Result<SemValue, DenError> {
        match self {
            SemValue::Bottom => Ok(SemValue::Bottom),
            SemValue::Closure(Closure::Lambda { env, param, body }) => {
                let mut scope = (**env).clone();
                scope.push((param.clone(), arg.clone()));
                sem_eval(body, &mut scope, reg)
            }
            SemValue::Closure(Closure::Native { f, .. }) => f(arg),
            other => Err(DenError::Shape(format!("applied a non-function {other:?}"))),
        }
    }

    /// The denotation of a closed value of observable type.
    pub fn from_value(v: &Term) -> Result<SemValue, DenError> {
        match v {
            Term::Const(a) => Ok(SemValue::Real(*a)),
            Term::Star => Ok(SemValue::Unit),
            Term::Pair(a, b) => Ok(SemValue::pair(SemValue::from_value(a)?, SemValue::from_value(b)?)),
            other => Err(DenError::Shape(format!("`{other}` is not an observable value"))),
        }
    }
}

fn sem_eval(t: &Term, scope: &mut Vec<(String, SemValue)>, reg: &SymbolRegistry) -> Result<SemValue, DenError> {
    match t {
        Term::Var(x) => scope
            .iter()
            .rev()
            .find(|(y, _)| y == x)
            .map(|(_, v)| v.clone())
            .ok_or_else(|| DenError::Eval(EvalError::FreeVariable(x.clone()))),
        Term::Const(a) => Ok(SemValue::Real(*a)),
        Term::Star => Ok(SemValue::Unit),
        Term::FnApp(f, args) => {
            let sym = reg.get(f).ok_or_else(|| EvalError::UnknownSymbol(f.clone()))?;
            let mut xs = Vec::with_capacity(args.len());
            let mut bottom = false;
            for a in args {
                match sem_eval(a, scope, reg)? {
                    SemValue::Real(x) => xs.push(x),
                    SemValue::Bottom => bottom = true,
                    other => return Err(DenError::Shape(format!("symbol argument {other:?}"))),
                }
            }
            if bottom {
                return Ok(SemValue::Bottom);
            }
            let v = sym.eval(&xs);
            if !v.is_finite() {
                return Err(EvalError::NonFinite(f.clone()).into());
            }
            Ok(SemValue::Real(v))
        }
        Term::App(m, n) => {
            let f = sem_eval(m, scope, reg)?;
            let a = sem_eval(n, scope, reg)?;
            f.apply(&a, reg)
        }
        Term::Lam(x, _, body) => {
            let fv = crate::dynamics::free_vars(t);
            let captured: Vec<(String, SemValue)> =
                fv.iter().filter_map(|y| scope.iter().rev().find(|(z, _)| z == y).cloned()).collect();
            Ok(SemValue::Closure(Closure::Lambda {
                env: Arc::new(captured),
                param: x.clone(),
                body: Arc::new((**body).clone()),
            }))
        }
        Term::Pair(m, n) => Ok(SemValue::pair(sem_eval(m, scope, reg)?, sem_eval(n, scope, reg)?)),
        Term::LetStar(m, n) => match sem_eval(m, scope, reg)? {
            SemValue::Unit => sem_eval(n, scope, reg),
            SemValue::Bottom => Ok(SemValue::Bottom),
            other => Err(DenError::Shape(format!("let * on {other:?}"))),
        },
        Term::LetPair(x, y, m, n) => match sem_eval(m, scope, reg)? {
            SemValue::Pair(a, b) => {
                scope.push((x.clone(), *a));
                scope.push((y.clone(), *b));
                let r = sem_eval(n, scope, reg);
                scope.truncate(scope.len() - 2);
                r
            }
            SemValue::Bottom => Ok(SemValue::Bottom),
            other => Err(DenError::Shape(format!("let (x) on {other:?}"))),
        },
    }
}

/// `⟦Γ ⊢ M : τ⟧` as a callable map from environment points.
#[derive(Clone)]
pub struct DenFn {
    env: Env,
    term: Arc<Term>,
    reg: Arc<SymbolRegistry>,
    pub ty: Type,
}

impl DenFn {
    pub fn call(&self, point: &[SemValue]) -> Result<SemValue, DenError> {
        if point.len() != self.env.len() {
            return Err(DenError::EnvArity { expected: self.env.len(), found: point.len() });
        }
        let mut scope: Vec<(String, SemValue)> =
            self.env.names().map(String::from).zip(point.iter().cloned()).collect();
        sem_eval(&self.term, &mut scope, &self.reg)
    }
}

pub fn interp_den(env: &Env, term: &Term, reg: &SymbolRegistry) -> Result<DenFn, DenError> {
    let ty = typecheck(env, term, reg)?;
    Ok(DenFn { env: env.clone(), term: Arc::new(term.clone()), reg: Arc::new(reg.clone()), ty })
}

/// Exact L1 distance between closed values of an observable type.
pub fn ground_l1(v: &Term, u: &Term, ty: &Type) -> Result<ExtReal, DenError> {
    sem_l1(&SemValue::from_value(v)?, &SemValue::from_value(u)?, ty)
}

/// L1 distance on observable semantic values; `d(a, ⊥) = ∞`.
pub fn sem_l1(a: &SemValue, b: &SemValue, ty: &Type) -> Result<ExtReal, DenError> {
    match (ty, a, b) {
        (_, SemValue::Bottom, SemValue::Bottom) => Ok(ExtReal::ZERO),
        (_, SemValue::Bottom, _) | (_, _, SemValue::Bottom) => Ok(ExtReal::Infinity),
        (Type::R, SemValue::Real(x), SemValue::Real(y)) => Ok(ExtReal::finite((x - y).abs())),
        (Type::I, SemValue::Unit, SemValue::Unit) => Ok(ExtReal::ZERO),
        (Type::Tensor(s, t), SemValue::Pair(a1, a2), SemValue::Pair(b1, b2)) => {
            Ok(sem_l1(a1, b1, s)? + sem_l1(a2, b2, t)?)
        }
        _ => Err(DenError::Shape(format!("{a:?} and {b:?} at type {ty}"))),
    }
}

/// Every element of `⟦τ⟧` is the same element.
pub fn is_one_point(ty: &Type) -> bool {
    match ty {
        Type::R => false,
        Type::I => true,
        Type::Tensor(a, b) => is_one_point(a) && is_one_point(b),
        Type::Lolli(_, b) => is_one_point(b),
    }
}

/// A real-to-real non-expansive map used to build battery functions.
#[derive(Clone)]
struct UnaryMap {
    label: String,
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

/// Deterministic finite samples of every type's interpretation.
#[derive(Clone)]
pub struct ProbeBattery {
    pub seed: u64,
    /// How many arrows deep function results are probed.
    pub depth: usize,
    /// Maximum number of function values generated per arrow type.
    pub probes: usize,
    /// Maximum number of environment points.
    pub env_points: usize,
    reals: Vec<f64>,
    maps: Vec<UnaryMap>,
    reg: Arc<SymbolRegistry>,
}

impl fmt::Debug for ProbeBattery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProbeBattery")
            .field("seed", &self.seed)
            .field("depth", &self.depth)
            .field("probes", &self.probes)
            .field("env_points", &self.env_points)
            .field("reals", &self.reals.len())
            .finish()
    }
}

pub const REAL_GRID: [f64; 7] = [-10.0, -1.0, -0.5, 0.0, 0.5, 1.0, 10.0];

impl ProbeBattery {
    /// Grid reals plus 25 seeded draws in [-100, 100]; depth 2; 64 probes.
    pub fn new(seed: u64, reg: &SymbolRegistry) -> ProbeBattery {
        ProbeBattery::with_probes(seed, 64, reg)
    }

    pub fn with_probes(seed: u64, probes: usize, reg: &SymbolRegistry) -> ProbeBattery {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut reals = REAL_GRID.to_vec();
        reals.extend((0..25).map(|_| (rng.gen_range(-100.0..100.0f64) * 1000.0).round() / 1000.0));
        let maps = unary_pool(&reals, reg, probes);
        ProbeBattery { seed, depth: 2, probes, env_points: 32, reals, maps, reg: Arc::new(reg.clone()) }
    }

    pub fn reals(&self) -> &[f64] {
        &self.reals
    }

    pub fn registry(&self) -> &SymbolRegistry {
        &self.reg
    }

    /// Sample values of `ty`, deterministic in the battery parameters.
    pub fn values(&self, ty: &Type) -> Vec<SemValue> {
        match ty {
            Type::R => self.reals.iter().map(|&x| SemValue::Real(x)).collect(),
            Type::I => vec![SemValue::Unit],
            Type::Tensor(a, b) => {
                let (va, vb) = (self.values(a), self.values(b));
                let n = va.len().max(vb.len()).min(self.probes.max(1));
                (0..n).map(|i| SemValue::pair(va[i % va.len()].clone(), vb[(i * 7 + 3) % vb.len()].clone())).collect()
            }
            Type::Lolli(a, b) => self.functions(a, b),
        }
    }

    fn functions(&self, a: &Type, b: &Type) -> Vec<SemValue> {
        let mut out = Vec::new();
        let n_consts = if self.probes >= 16 { 8 } else { self.probes / 4 };
        let budget = self.probes.saturating_sub(n_consts);
        for g in self.maps.iter().take(budget) {
            let (g, a, b, reg) = (g.clone(), a.clone(), b.clone(), self.reg.clone());
            let battery = self.clone_light();
            let label = format!("inject . {} . readout", g.label);
            out.push(SemValue::native(label, move |arg| {
                Ok(match battery.readout(arg, &a, &reg)? {
                    Some(x) => battery.inject((g.f)(x), &b),
                    None => SemValue::Bottom,
                })
            }));
        }
        for &c in self.reals.iter().take(n_consts) {
            let battery = self.clone_light();
            let b = b.clone();
            out.push(SemValue::native(format!("const {c}"), move |_| Ok(battery.inject(c, &b))));
        }
        out.truncate(self.probes.max(1));
        out
    }

    /// A copy without the map pool, for use inside generated closures.
    fn clone_light(&self) -> ProbeBattery {
        ProbeBattery { maps: Vec::new(), ..self.clone() }
    }

    /// Non-expansive map `⟦τ⟧ → ℝ⊥`: sums real components; functions are read
    /// at the injection of 0. `None` stands for ⊥.
    fn readout(&self, v: &SemValue, ty: &Type, reg: &SymbolRegistry) -> Result<Option<f64>, DenError> {
        Ok(match (ty, v) {
            (_, SemValue::Bottom) => None,
            (Type::R, SemValue::Real(x)) => Some(*x),
            (Type::I, _) => Some(0.0),
            (Type::Tensor(s, t), SemValue::Pair(a, b)) => match (self.readout(a, s, reg)?, self.readout(b, t, reg)?) {
                (Some(x), Some(y)) => Some(x + y),
                _ => None,
            },
            (Type::Lolli(s, t), f) => {
                let r = f.apply(&self.inject(0.0, s), reg)?;
                self.readout(&r, t, reg)?
            }
            (ty, v) => return Err(DenError::Shape(format!("readout of {v:?} at {ty}"))),
        })
    }

    /// Non-expansive map `ℝ → ⟦τ⟧`: the real goes to the leftmost real slot.
    fn inject(&self, x: f64, ty: &Type) -> SemValue {
        match ty {
            Type::R => SemValue::Real(x),
            Type::I => SemValue::Unit,
            Type::Tensor(s, t) => SemValue::pair(self.inject(x, s), self.inject(0.0, t)),
            Type::Lolli(s, t) => {
                let (s, t, me, reg) = ((**s).clone(), (**t).clone(), self.clone_light(), self.reg.clone());
                SemValue::native(format!("shift {x}"), move |arg| {
                    Ok(match me.readout(arg, &s, &reg)? {
                        Some(y) => me.inject(x + y, &t),
                        None => SemValue::Bottom,
                    })
                })
            }
        }
    }

    /// Environment points: componentwise battery values, staggered per variable.
    pub fn env_points(&self, env: &Env) -> Vec<Vec<SemValue>> {
        if env.is_empty() {
            return vec![vec![]];
        }
        let per_var: Vec<Vec<SemValue>> = env.types().map(|t| self.values(t)).collect();
        let n = per_var.iter().map(Vec::len).max().unwrap_or(1).min(self.env_points.max(1));
        (0..n)
            .map(|j| per_var.iter().enumerate().map(|(i, vs)| vs[(j * (2 * i + 1) + i) % vs.len()].clone()).collect())
            .collect()
    }
}

/// Identity, negation, halving, shifts, registry symbols with the other
/// arguments fixed, and pairwise compositions of those.
fn unary_pool(reals: &[f64], reg: &SymbolRegistry, want: usize) -> Vec<UnaryMap> {
    let m = |label: String, f: Arc<dyn Fn(f64) -> f64 + Send + Sync>| UnaryMap { label, f };
    let mut base = vec![
        m("id".into(), Arc::new(|x| x)),
        m("neg".into(), Arc::new(|x| -x)),
        m("half".into(), Arc::new(|x| 0.5 * x)),
    ];
    for sym in reg.iter() {
        let s = sym.clone();
        if sym.arity == 1 {
            base.push(m(sym.name.clone(), Arc::new(move |x| s.eval(&[x]))));
        } else {
            for t in [0.0, 1.0, -1.0] {
                let s = s.clone();
                base.push(m(
                    format!("{}(_, {t})", sym.name),
                    Arc::new(move |x| {
                        let mut args = vec![t; s.arity];
                        args[0] = x;
                        s.eval(&args)
                    }),
                ));
            }
        }
    }
    for &t in reals {
        if t != 0.0 {
            base.push(m(format!("shift {t}"), Arc::new(move |x| x + t)));
        }
    }
    let mut pool = base.clone();
    'outer: for g in &base {
        for h in &base {
            if pool.len() >= want {
                break 'outer;
            }
            let (gf, hf) = (g.f.clone(), h.f.clone());
            pool.push(m(format!("{} . {}", g.label, h.label), Arc::new(move |x| gf(hf(x)))));
        }
    }
    pool
}

/// Distance at `ty` between two semantic values, probing function arguments
/// from the battery up to `depth` arrows. Returns the argument indices used.
fn probe_distance(
    ty: &Type,
    f: &SemValue,
    g: &SemValue,
    depth: usize,
    battery: &ProbeBattery,
    reg: &SymbolRegistry,
) -> Result<(ExtReal, Vec<usize>), DenError> {
    match ty {
        _ if ty.is_observable() => Ok((sem_l1(f, g, ty)?, vec![])),
        Type::Tensor(s, t) => {
            let (SemValue::Pair(f1, f2), SemValue::Pair(g1, g2)) = (f, g) else {
                return if f.is_bottom() && g.is_bottom() {
                    Ok((ExtReal::ZERO, vec![]))
                } else {
                    Ok((ExtReal::Infinity, vec![]))
                };
            };
            let (d1, mut a1) = probe_distance(s, f1, g1, depth, battery, reg)?;
            let (d2, a2) = probe_distance(t, f2, g2, depth, battery, reg)?;
            a1.extend(a2);
            Ok((d1 + d2, a1))
        }
        Type::Lolli(s, t) => {
            if depth == 0 {
                return Ok((ExtReal::ZERO, vec![]));
            }
            let mut best = (ExtReal::ZERO, vec![]);
            for (i, arg) in battery.values(s).iter().enumerate() {
                let (d, sub) = probe_distance(t, &f.apply(arg, reg)?, &g.apply(arg, reg)?, depth - 1, battery, reg)?;
                if d > best.0 || (i == 0 && best.1.is_empty()) {
                    let mut args = vec![i];
                    args.extend(sub);
                    best = (d, args);
                }
                if !d.is_finite() {
                    break;
                }
            }
            Ok(best)
        }
        _ => unreachable!("observable types are handled above"),
    }
}

/// Sound enclosure of `d_den(M, N)` at `Γ ⊢ τ`.
pub fn den_distance(
    env: &Env,
    ty: &Type,
    m: &Term,
    n: &Term,
    battery: &ProbeBattery,
    reg: &SymbolRegistry,
) -> Result<DistInterval, DenError> {
    let tm = typecheck(env, m, reg)?;
    let tn = typecheck(env, n, reg)?;
    if &tm != ty || &tn != ty {
        return Err(DenError::TypeMismatch(tm, tn));
    }
    if is_one_point(ty) {
        return Ok(DistInterval::exact(ExtReal::ZERO, Evidence::rule("one_point_codomain")));
    }
    if env.is_empty() && ty.is_observable() {
        let d = ground_l1(&eval(m, reg)?, &eval(n, reg)?, ty)?;
        return Ok(DistInterval::exact(d, Evidence::rule("closed_observable")));
    }
    let (lo, witness) = den_lower(env, ty, m, n, battery, reg)?;
    let (hi, cert) = match crate::equational::equ_upper_bound(env, ty, m, n, reg) {
        Ok((r, Some(_))) => (r, Some(Evidence::Certificate { r })),
        _ => (ExtReal::Infinity, None),
    };
    Ok(DistInterval { lo, hi, lo_witness: Some(witness), hi_certificate: cert }.snap())
}

/// Battery lower bound alone, with the witnessing probe.
pub fn den_lower(
    env: &Env,
    ty: &Type,
    m: &Term,
    n: &Term,
    battery: &ProbeBattery,
    reg: &SymbolRegistry,
) -> Result<(ExtReal, Evidence), DenError> {
    let fm = interp_den(env, m, reg)?;
    let fnn = interp_den(env, n, reg)?;
    let points = battery.env_points(env);
    if points.is_empty() {
        return Err(DenError::EmptyBattery(ty.clone()));
    }
    let mut best = (ExtReal::ZERO, Evidence::Probe { env: 0, args: vec![] });
    for (i, p) in points.iter().enumerate() {
        let (d, args) = probe_distance(ty, &fm.call(p)?, &fnn.call(p)?, battery.depth, battery, reg)?;
        if d > best.0 || i == 0 {
            best = (d.max(best.0), Evidence::Probe { env: i, args });
        }
        if !d.is_finite() {
            break;
        }
    }
    Ok(best)
}

/// Recomputes the distance observed at a stored probe.
pub fn replay_probe(
    env: &Env,
    ty: &Type,
    m: &Term,
    n: &Term,
    battery: &ProbeBattery,
    reg: &SymbolRegistry,
    witness: &Evidence,
) -> Result<ExtReal, DenError> {
    let Evidence::Probe { env: e, args } = witness else {
        return Err(DenError::Shape("not a probe witness".into()));
    };
    let points = battery.env_points(env);
    let p = points.get(*e).ok_or_else(|| DenError::EmptyBattery(ty.clone()))?;
    let (a, b) = (interp_den(env, m, reg)?.call(p)?, interp_den(env, n, reg)?.call(p)?);
    let mut args = args.iter().copied();
    replay_at(ty, &a, &b, &mut args, battery, reg)
}

fn replay_at(
    ty: &Type,
    f: &SemValue,
    g: &SemValue,
    args: &mut impl Iterator<Item = usize>,
    battery: &ProbeBattery,
    reg: &SymbolRegistry,
) -> Result<ExtReal, DenError> {
    match ty {
        _ if ty.is_observable() => sem_l1(f, g, ty),
        Type::Tensor(s, t) => match (f, g) {
            (SemValue::Pair(f1, f2), SemValue::Pair(g1, g2)) => {
                Ok(replay_at(s, f1, g1, args, battery, reg)? + replay_at(t, f2, g2, args, battery, reg)?)
            }
            _ => Ok(if f.is_bottom() && g.is_bottom() { ExtReal::ZERO } else { ExtReal::Infinity }),
        },
        Type::Lolli(s, t) => match args.next() {
            None => Ok(ExtReal::ZERO),
            Some(i) => {
                let vals = battery.values(s);
                let arg = vals.get(i).ok_or_else(|| DenError::EmptyBattery((**s).clone()))?;
                replay_at(t, &f.apply(arg, reg)?, &g.apply(arg, reg)?, args, battery, reg)
            }
        },
        _ => unreachable!("observable types are handled above"),
    }
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
    fn interpretation_examples() {
        let r = reg();
        assert_eq!(interp_den(&Env::empty(), &p("3.0"), &r).unwrap().call(&[]).unwrap(), SemValue::Real(3.0));
        let f = interp_den(&Env::single("x", Type::R), &p("sin(x)"), &r).unwrap();
        assert_eq!(f.call(&[SemValue::Real(0.0)]).unwrap(), SemValue::Real(0.0));
        assert_eq!(f.call(&[SemValue::Bottom]).unwrap(), SemValue::Bottom);
        let redex = interp_den(&Env::empty(), &p("(\\x:R. x) 5.0"), &r).unwrap().call(&[]).unwrap();
        assert_eq!(redex, SemValue::Real(5.0));
    }

    #[test]
    fn ground_distances() {
        let t = crate::syntax::parse_type("R (x) R").unwrap();
        assert_eq!(ground_l1(&p("0.0 * 1.0"), &p("1.0 * 3.0"), &t).unwrap(), ExtReal::finite(3.0));
        assert_eq!(ground_l1(&p("*"), &p("*"), &Type::I).unwrap(), ExtReal::ZERO);
        assert_eq!(ground_l1(&p("2.0"), &p("3.0"), &Type::R).unwrap(), ExtReal::finite(1.0));
    }

    #[test]
    fn battery_is_deterministic_and_sized() {
        let r = reg();
        let a = ProbeBattery::with_probes(3, 1000, &r);
        let b = ProbeBattery::with_probes(3, 1000, &r);
        assert_eq!(a.reals(), b.reals());
        let rr = Type::lolli(Type::R, Type::R);
        assert_eq!(a.values(&rr).len(), 1000);
        let fa = &a.values(&rr)[123];
        let fb = &b.values(&rr)[123];
        assert_eq!(fa.apply(&SemValue::Real(2.5), &r).unwrap(), fb.apply(&SemValue::Real(2.5), &r).unwrap());
    }

    #[test]
    fn battery_functions_are_non_expansive() {
        let r = reg();
        let b = ProbeBattery::new(11, &r);
        let rr = Type::lolli(Type::R, Type::R);
        for f in b.values(&rr) {
            for (x, y) in [(0.0, 1.0), (-3.0, 2.5), (10.0, 10.25)] {
                let (SemValue::Real(fx), SemValue::Real(fy)) =
                    (f.apply(&SemValue::Real(x), &r).unwrap(), f.apply(&SemValue::Real(y), &r).unwrap())
                else {
                    panic!("battery function returned a non-real");
                };
                assert!((fx - fy).abs() <= (x - y).abs() + 1e-9, "{f:?}");
            }
        }
    }

    #[test]
    fn one_point_codomain_is_exactly_zero() {
        let r = reg();
        let env = parse_env("k:R -o I").unwrap();
        let d = den_distance(&env, &Type::I, &p("k 2.0"), &p("k 3.0"), &ProbeBattery::new(0, &r), &r).unwrap();
        assert_eq!((d.lo, d.hi), (ExtReal::ZERO, ExtReal::ZERO));
    }

    #[test]
    fn constants_are_exact() {
        let r = reg();
        let d = den_distance(&Env::empty(), &Type::R, &p("0.0"), &p("1.0"), &ProbeBattery::new(0, &r), &r).unwrap();
        assert_eq!((d.lo, d.hi), (ExtReal::finite(1.0), ExtReal::finite(1.0)));
    }

    #[test]
    fn probe_witness_replays() {
        let r = reg();
        let env = parse_env("k:R -o R").unwrap();
        let b = ProbeBattery::new(5, &r);
        let (m, n) = (p("k 0.0"), p("k 1.0"));
        let (lo, w) = den_lower(&env, &Type::R, &m, &n, &b, &r).unwrap();
        assert_eq!(lo, ExtReal::finite(1.0));
        assert_eq!(replay_probe(&env, &Type::R, &m, &n, &b, &r, &w).unwrap(), lo);
    }
}
