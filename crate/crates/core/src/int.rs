//! The interactive model: terms become string diagrams whose wires follow the
//! polarity of their types. A judgment `Γ ⊢ M : σ` has input wires
//! `Γ⁺ ++ σ⁻` and output wires `σ⁺ ++ Γ⁻`, each variable's atoms grouped in
//! environment order. Application and pattern matching compose through a
//! trace, computed as a least fixed point over flat wire domains.

use std::fmt;
use std::ops::Range;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::den::{ProbeBattery, SemValue};
use crate::dynamics::{beta_normalize, free_vars, is_beta_normal, uniquify_binders};
use crate::metric::{DistInterval, Evidence, ExtReal, EPSILON};
use crate::polarity::{minus_atoms, plus_atoms, WireKind};
use crate::registry::SymbolRegistry;
use crate::syntax::{Env, Term, Type};
use crate::typing::{typecheck, TypeError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TraceError {
    #[error("feedback wire {wire} changed from {from} to {to}: the step function is not monotone")]
    NonMonotone { wire: usize, from: String, to: String },
    #[error("trace over {width} wires did not converge within {bound} iterations")]
    NotConverged { width: usize, bound: usize },
    #[error("wire function expects {expected} inputs, got {found}")]
    Arity { expected: usize, found: usize },
    #[error("cannot trace: {0}")]
    Signature(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("symbol `{0}` produced a non-finite value")]
    NonFinite(String),
    #[error("wire carries {0}, expected a real")]
    NotReal(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntError {
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error("wire decomposition needs a β-normal term")]
    NotBetaNormal,
    #[error("the wiring of this term has a feedback cycle")]
    Cyclic,
    #[error("terms have different types: {0} and {1}")]
    TypeMismatch(Type, Type),
}

/// Input and output wires, each tagged with what it carries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WireSignature {
    pub inputs: Vec<WireKind>,
    pub outputs: Vec<WireKind>,
}

impl WireSignature {
    /// Number of input wires.
    pub fn m(&self) -> usize {
        self.inputs.len()
    }

    /// Number of output wires.
    pub fn n(&self) -> usize {
        self.outputs.len()
    }
}

impl fmt::Display for WireSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |ks: &[WireKind]| ks.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(" ");
        write!(f, "[{}] -> [{}]", list(&self.inputs), list(&self.outputs))
    }
}

/// Wires of `Γ ⊢ − : σ`.
pub fn wire_signature(env: &Env, ty: &Type) -> WireSignature {
    let mut inputs: Vec<WireKind> = env.types().flat_map(plus_atoms).collect();
    inputs.extend(minus_atoms(ty));
    let mut outputs = plus_atoms(ty);
    outputs.extend(env.types().flat_map(minus_atoms));
    WireSignature { inputs, outputs }
}

/// Statistics over every trace evaluated during one or more calls.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct TraceLog {
    pub traces: usize,
    pub total_iterations: usize,
    pub max_iterations: usize,
    /// Largest `iterations - (width + 1)` seen; never positive on success.
    pub worst_slack: i64,
}

impl TraceLog {
    pub fn within_bound(&self) -> bool {
        self.worst_slack <= 0
    }

    fn record(&mut self, iterations: usize, width: usize) {
        let slack = iterations as i64 - (width as i64 + 1);
        if self.traces == 0 || slack > self.worst_slack {
            self.worst_slack = slack;
        }
        self.traces += 1;
        self.total_iterations += iterations;
        self.max_iterations = self.max_iterations.max(iterations);
    }
}

type StepFn = dyn Fn(&[SemValue], &mut TraceLog) -> Result<Vec<SemValue>, TraceError> + Send + Sync;

/// A morphism of the interactive model, executable on flat wire values.
#[derive(Clone)]
pub struct WireFunction {
    pub signature: WireSignature,
    /// Total number of feedback wires inside the diagram.
    pub feedback_width: usize,
    step: Arc<StepFn>,
}

impl fmt::Debug for WireFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WireFunction({}, feedback {})", self.signature, self.feedback_width)
    }
}

impl WireFunction {
    pub fn new(
        signature: WireSignature,
        step: impl Fn(&[SemValue], &mut TraceLog) -> Result<Vec<SemValue>, TraceError> + Send + Sync + 'static,
    ) -> WireFunction {
        WireFunction { signature, feedback_width: 0, step: Arc::new(step) }
    }

    pub fn call(&self, inputs: &[SemValue], log: &mut TraceLog) -> Result<Vec<SemValue>, TraceError> {
        if inputs.len() != self.signature.m() {
            return Err(TraceError::Arity { expected: self.signature.m(), found: inputs.len() });
        }
        (self.step)(inputs, log)
    }

    /// Swaps the two halves of `a ++ b`.
    pub fn symmetry(a: Vec<WireKind>, b: Vec<WireKind>) -> WireFunction {
        let split = a.len();
        let sig = WireSignature { inputs: [a.clone(), b.clone()].concat(), outputs: [b, a].concat() };
        WireFunction::new(sig, move |xs, _| Ok([&xs[split..], &xs[..split]].concat()))
    }

    pub fn identity(kinds: Vec<WireKind>) -> WireFunction {
        let sig = WireSignature { inputs: kinds.clone(), outputs: kinds };
        WireFunction::new(sig, |xs, _| Ok(xs.to_vec()))
    }
}

/// `tr(f)(x)`: the first component of `f(x, z)` at the least `z` with
/// `f(x, z) = (y, z)`. The last `z_width` inputs and outputs are fed back.
pub fn trace(f: &WireFunction, z_width: usize) -> Result<WireFunction, TraceError> {
    let sig = &f.signature;
    if z_width > sig.m() || z_width > sig.n() {
        return Err(TraceError::Signature(format!("{z_width} feedback wires on {sig}")));
    }
    let (m, n) = (sig.m() - z_width, sig.n() - z_width);
    if sig.inputs[m..] != sig.outputs[n..] {
        return Err(TraceError::Signature(format!("feedback wire kinds differ in {sig}")));
    }
    let signature = WireSignature { inputs: sig.inputs[..m].to_vec(), outputs: sig.outputs[..n].to_vec() };
    let body = f.clone();
    let mut out =
        WireFunction::new(signature, move |xs, log| kleene(xs, z_width, n, log, |args, log| body.call(args, log)));
    out.feedback_width = f.feedback_width + z_width;
    Ok(out)
}

fn kleene(
    xs: &[SemValue],
    z_width: usize,
    n: usize,
    log: &mut TraceLog,
    mut body: impl FnMut(&[SemValue], &mut TraceLog) -> Result<Vec<SemValue>, TraceError>,
) -> Result<Vec<SemValue>, TraceError> {
    let mut args: Vec<SemValue> = xs.to_vec();
    args.extend(std::iter::repeat_n(SemValue::Bottom, z_width));
    let bound = z_width + 1;
    for iteration in 1..=bound {
        let mut out = body(&args, log)?;
        let z_old = &args[xs.len()..];
        let z_new = &out[n..];
        for (i, (a, b)) in z_old.iter().zip(z_new).enumerate() {
            if !a.is_bottom() && a != b {
                return Err(TraceError::NonMonotone { wire: i, from: format!("{a:?}"), to: format!("{b:?}") });
            }
        }
        if z_old == z_new {
            log.record(iteration, z_width);
            out.truncate(n);
            return Ok(out);
        }
        let z_new = out.split_off(n);
        args.truncate(xs.len());
        args.extend(z_new);
    }
    Err(TraceError::NotConverged { width: z_width, bound })
}

/// Where a part of a [`Circuit::Net`] reads a wire from.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Src {
    In(usize),
    /// Output `w` of an earlier part `p`.
    Part(usize, usize),
}

/// The diagram of a term, shared by the numeric and the symbolic readings.
#[derive(Debug, Clone)]
enum Circuit {
    Wires(usize),
    Const(f64),
    Star,
    Symbol(String, usize),
    Net { parts: Vec<(Circuit, Vec<Src>)>, outputs: Vec<Src> },
    Trace { body: Box<Circuit>, z: usize, n: usize },
}

impl Circuit {
    fn feedback_width(&self) -> usize {
        match self {
            Circuit::Net { parts, .. } => parts.iter().map(|(c, _)| c.feedback_width()).sum(),
            Circuit::Trace { body, z, .. } => z + body.feedback_width(),
            _ => 0,
        }
    }

    fn run(&self, xs: &[SemValue], reg: &SymbolRegistry, log: &mut TraceLog) -> Result<Vec<SemValue>, TraceError> {
        match self {
            Circuit::Wires(w) => {
                debug_assert_eq!(*w, xs.len());
                Ok(xs.to_vec())
            }
            Circuit::Const(a) => Ok(vec![SemValue::Real(*a)]),
            Circuit::Star => Ok(vec![SemValue::Unit]),
            Circuit::Symbol(f, k) => {
                debug_assert_eq!(*k, xs.len());
                let sym = reg.get(f).ok_or_else(|| TraceError::UnknownSymbol(f.clone()))?;
                let mut args = Vec::with_capacity(xs.len());
                for x in xs {
                    match x {
                        SemValue::Real(a) => args.push(*a),
                        SemValue::Bottom => return Ok(vec![SemValue::Bottom]),
                        other => return Err(TraceError::NotReal(format!("{other:?}"))),
                    }
                }
                let v = sym.eval(&args);
                if !v.is_finite() {
                    return Err(TraceError::NonFinite(f.clone()));
                }
                Ok(vec![SemValue::Real(v)])
            }
            Circuit::Net { parts, outputs } => {
                let mut results: Vec<Vec<SemValue>> = Vec::with_capacity(parts.len());
                let fetch = |s: &Src, results: &Vec<Vec<SemValue>>| match *s {
                    Src::In(i) => xs[i].clone(),
                    Src::Part(p, w) => results[p][w].clone(),
                };
                for (c, srcs) in parts {
                    let args: Vec<SemValue> = srcs.iter().map(|s| fetch(s, &results)).collect();
                    let out = c.run(&args, reg, log)?;
                    results.push(out);
                }
                Ok(outputs.iter().map(|s| fetch(s, &results)).collect())
            }
            Circuit::Trace { body, z, n } => kleene(xs, *z, *n, log, |args, log| body.run(args, reg, log)),
        }
    }

    /// Output int-terms given int-terms on the inputs. Feedback wires are
    /// resolved by substitution; a loop is reported as [`IntError::Cyclic`].
    fn symbolic(&self, xs: Vec<IntTerm>, holes: &mut usize) -> Result<Vec<IntTerm>, IntError> {
        match self {
            Circuit::Wires(_) => Ok(xs),
            Circuit::Const(a) => Ok(vec![IntTerm::Const(*a)]),
            Circuit::Star => Ok(vec![IntTerm::Star]),
            Circuit::Symbol(f, _) => Ok(vec![IntTerm::FnApp(f.clone(), xs)]),
            Circuit::Net { parts, outputs } => {
                let mut results: Vec<Vec<IntTerm>> = Vec::with_capacity(parts.len());
                let fetch = |s: &Src, results: &Vec<Vec<IntTerm>>| match *s {
                    Src::In(i) => xs[i].clone(),
                    Src::Part(p, w) => results[p][w].clone(),
                };
                for (c, srcs) in parts {
                    let args = srcs.iter().map(|s| fetch(s, &results)).collect();
                    let out = c.symbolic(args, holes)?;
                    results.push(out);
                }
                Ok(outputs.iter().map(|s| fetch(s, &results)).collect())
            }
            Circuit::Trace { body, z, n } => {
                let base = HOLE_BASE + *holes;
                *holes += z;
                let mut args = xs;
                args.extend((0..*z).map(|j| IntTerm::Var(base + j)));
                let mut out = body.symbolic(args, holes)?;
                let feedback = out.split_off(*n);
                out.iter().map(|t| resolve(t, base, &feedback, 0)).collect()
            }
        }
    }
}

const HOLE_BASE: usize = 1 << 40;

fn resolve(t: &IntTerm, base: usize, feedback: &[IntTerm], depth: usize) -> Result<IntTerm, IntError> {
    match t {
        IntTerm::Var(h) if (base..base + feedback.len()).contains(h) => {
            if depth > feedback.len() {
                return Err(IntError::Cyclic);
            }
            resolve(&feedback[h - base], base, feedback, depth + 1)
        }
        IntTerm::FnApp(f, args) => Ok(IntTerm::FnApp(
            f.clone(),
            args.iter().map(|a| resolve(a, base, feedback, depth)).collect::<Result<_, _>>()?,
        )),
        _ => Ok(t.clone()),
    }
}

/// Wire positions of `Γ ⊢ − : σ`, by variable.
struct Layout {
    plus: Vec<(String, Range<usize>)>,
    minus: Vec<(String, Range<usize>)>,
    sig_in: Range<usize>,
    sig_out: Range<usize>,
}

impl Layout {
    fn new(env: &Env, ty: &Type) -> Layout {
        let mut plus = Vec::new();
        let mut at = 0;
        for (x, t) in env.iter() {
            let k = plus_atoms(t).len();
            plus.push((x.clone(), at..at + k));
            at += k;
        }
        let sig_in = at..at + minus_atoms(ty).len();
        let sig_out = 0..plus_atoms(ty).len();
        let mut minus = Vec::new();
        let mut at = sig_out.end;
        for (x, t) in env.iter() {
            let k = minus_atoms(t).len();
            minus.push((x.clone(), at..at + k));
            at += k;
        }
        Layout { plus, minus, sig_in, sig_out }
    }

    fn plus_of(&self, x: &str) -> Range<usize> {
        self.plus.iter().find(|(y, _)| y == x).map(|(_, r)| r.clone()).expect("variable in layout")
    }

    fn minus_of(&self, x: &str) -> Range<usize> {
        self.minus.iter().find(|(y, _)| y == x).map(|(_, r)| r.clone()).expect("variable in layout")
    }
}

fn ins(r: Range<usize>) -> impl Iterator<Item = Src> {
    r.map(Src::In)
}

fn part(p: usize, r: Range<usize>) -> impl Iterator<Item = Src> {
    r.map(move |w| Src::Part(p, w))
}

/// Sources, in parent order, of the negative wires of every variable of `env`,
/// drawn from the parts that use them.
fn env_minus(env: &Env, users: &[(usize, &Env, &Layout)]) -> Vec<Src> {
    let mut out = Vec::new();
    for x in env.names() {
        let (p, _, l) = users.iter().find(|(_, e, _)| e.get(x).is_some()).expect("every variable is used");
        out.extend(part(*p, l.minus_of(x)));
    }
    out
}

fn plus_inputs(child_env: &Env, parent: &Layout) -> Vec<Src> {
    child_env.names().flat_map(|x| ins(parent.plus_of(x))).collect()
}

/// Compiles a linear term whose free variables are exactly `env`, in order.
fn compile(t: &Term, env: &Env) -> (Type, Circuit) {
    let sub = |m: &Term| {
        let fv = free_vars(m);
        env.restrict(|x| fv.contains(x))
    };
    match t {
        Term::Var(x) => {
            let ty = env.get(x).expect("typechecked").clone();
            let w = plus_atoms(&ty).len() + minus_atoms(&ty).len();
            (ty, Circuit::Wires(w))
        }
        Term::Const(a) => (Type::R, Circuit::Const(*a)),
        Term::Star => (Type::I, Circuit::Star),
        Term::FnApp(f, args) => {
            let l = Layout::new(env, &Type::R);
            let mut parts = Vec::new();
            let mut envs = Vec::new();
            for a in args {
                let ea = sub(a);
                let (_, c) = compile(a, &ea);
                parts.push((c, plus_inputs(&ea, &l)));
                envs.push(ea);
            }
            let k = args.len();
            parts.push((Circuit::Symbol(f.clone(), k), (0..k).map(|p| Src::Part(p, 0)).collect()));
            let layouts: Vec<Layout> = envs.iter().map(|e| Layout::new(e, &Type::R)).collect();
            let users: Vec<(usize, &Env, &Layout)> =
                envs.iter().zip(&layouts).enumerate().map(|(i, (e, l))| (i, e, l)).collect();
            let mut outputs = vec![Src::Part(k, 0)];
            outputs.extend(env_minus(env, &users));
            (Type::R, Circuit::Net { parts, outputs })
        }
        Term::Lam(x, tau, body) => {
            let eb = env.extended(&[(x.clone(), tau.clone())]);
            let (sigma, cb) = compile(body, &eb);
            let ty = Type::lolli(tau.clone(), sigma.clone());
            let lb = Layout::new(&eb, &sigma);
            let n_in = Layout::new(env, &ty).sig_in.end;
            let mut outputs: Vec<Src> = part(0, lb.minus_of(x)).collect();
            outputs.extend(part(0, lb.sig_out.clone()));
            for y in env.names() {
                outputs.extend(part(0, lb.minus_of(y)));
            }
            (ty, Circuit::Net { parts: vec![(cb, ins(0..n_in).collect())], outputs })
        }
        Term::App(m, n) => {
            let (em, en) = (sub(m), sub(n));
            let (tm, cm) = compile(m, &em);
            let (_, cn) = compile(n, &en);
            let Type::Lolli(tau, sigma) = tm.clone() else { panic!("typechecked application") };
            let (tau, sigma) = (*tau, *sigma);
            let l = Layout::new(env, &sigma);
            let (lm, ln) = (Layout::new(&em, &tm), Layout::new(&en, &tau));
            let (zp, zm) = (plus_atoms(&tau).len(), minus_atoms(&tau).len());
            let nx = l.sig_in.end;
            let mut m_in = plus_inputs(&em, &l);
            m_in.extend(ins(nx..nx + zp));
            m_in.extend(ins(l.sig_in.clone()));
            let mut n_in = plus_inputs(&en, &l);
            n_in.extend(ins(nx + zp..nx + zp + zm));
            let mut outputs: Vec<Src> = part(0, zm..zm + l.sig_out.len()).collect();
            outputs.extend(env_minus(env, &[(0, &em, &lm), (1, &en, &ln)]));
            let n = outputs.len();
            outputs.extend(part(1, 0..zp));
            outputs.extend(part(0, 0..zm));
            let net = Circuit::Net { parts: vec![(cm, m_in), (cn, n_in)], outputs };
            (sigma, Circuit::Trace { body: Box::new(net), z: zp + zm, n })
        }
        Term::Pair(m, n) => {
            let (em, en) = (sub(m), sub(n));
            let (s1, cm) = compile(m, &em);
            let (s2, cn) = compile(n, &en);
            let ty = Type::tensor(s1.clone(), s2.clone());
            let l = Layout::new(env, &ty);
            let (lm, ln) = (Layout::new(&em, &s1), Layout::new(&en, &s2));
            let k1 = minus_atoms(&s1).len();
            let mut m_in = plus_inputs(&em, &l);
            m_in.extend(ins(l.sig_in.start..l.sig_in.start + k1));
            let mut n_in = plus_inputs(&en, &l);
            n_in.extend(ins(l.sig_in.start + k1..l.sig_in.end));
            let mut outputs: Vec<Src> = part(0, lm.sig_out.clone()).collect();
            outputs.extend(part(1, ln.sig_out.clone()));
            outputs.extend(env_minus(env, &[(0, &em, &lm), (1, &en, &ln)]));
            (ty, Circuit::Net { parts: vec![(cm, m_in), (cn, n_in)], outputs })
        }
        Term::LetStar(m, n) => {
            let (em, en) = (sub(m), sub(n));
            let (_, cm) = compile(m, &em);
            let (sigma, cn) = compile(n, &en);
            let l = Layout::new(env, &sigma);
            let (lm, ln) = (Layout::new(&em, &Type::I), Layout::new(&en, &sigma));
            let m_in = plus_inputs(&em, &l);
            let mut n_in = plus_inputs(&en, &l);
            n_in.extend(ins(l.sig_in.clone()));
            let mut outputs: Vec<Src> = part(1, ln.sig_out.clone()).collect();
            outputs.extend(env_minus(env, &[(0, &em, &lm), (1, &en, &ln)]));
            (sigma, Circuit::Net { parts: vec![(cm, m_in), (cn, n_in)], outputs })
        }
        Term::LetPair(x, y, m, n) => {
            let em = sub(m);
            let (tm, cm) = compile(m, &em);
            let Type::Tensor(t1, t2) = tm.clone() else { panic!("typechecked pattern match") };
            let en_outer = sub(n);
            let en = en_outer.extended(&[(x.clone(), (*t1).clone()), (y.clone(), (*t2).clone())]);
            let (sigma, cn) = compile(n, &en);
            let l = Layout::new(env, &sigma);
            let (lm, ln) = (Layout::new(&em, &tm), Layout::new(&en, &sigma));
            let zp = plus_atoms(&tm).len();
            let zm = minus_atoms(&tm).len();
            let nx = l.sig_in.end;
            let mut m_in = plus_inputs(&em, &l);
            m_in.extend(ins(nx + zp..nx + zp + zm));
            let mut n_in = plus_inputs(&en_outer, &l);
            n_in.extend(ins(nx..nx + zp));
            n_in.extend(ins(l.sig_in.clone()));
            let mut outputs: Vec<Src> = part(1, ln.sig_out.clone()).collect();
            outputs.extend(env_minus(env, &[(0, &em, &lm), (1, &en_outer, &ln)]));
            let n_out = outputs.len();
            outputs.extend(part(0, 0..zp));
            outputs.extend(part(1, ln.minus_of(x)));
            outputs.extend(part(1, ln.minus_of(y)));
            let net = Circuit::Net { parts: vec![(cm, m_in), (cn, n_in)], outputs };
            (sigma, Circuit::Trace { body: Box::new(net), z: zp + zm, n: n_out })
        }
    }
}

fn compile_checked(env: &Env, term: &Term, reg: &SymbolRegistry) -> Result<(Type, Circuit), IntError> {
    let ty = typecheck(env, term, reg)?;
    let (t2, c) = compile(&uniquify_binders(term), env);
    debug_assert_eq!(ty, t2);
    Ok((ty, c))
}

/// `⟦Γ ⊢ M : σ⟧` in the interactive model.
pub fn interp_int(env: &Env, term: &Term, reg: &SymbolRegistry) -> Result<WireFunction, IntError> {
    let (ty, circuit) = compile_checked(env, term, reg)?;
    let signature = wire_signature(env, &ty);
    let feedback_width = circuit.feedback_width();
    let reg = Arc::new(reg.clone());
    let circuit = Arc::new(circuit);
    let mut wf = WireFunction::new(signature, move |xs, log| circuit.run(xs, &reg, log));
    wf.feedback_width = feedback_width;
    Ok(wf)
}

/// A first-order linear term labelling an output wire. Variables are input
/// wire indices.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum IntTerm {
    Var(usize),
    Const(f64),
    Star,
    FnApp(String, Vec<IntTerm>),
}

impl IntTerm {
    /// Input wires read by this term, left to right.
    pub fn vars(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<usize>) {
        match self {
            IntTerm::Var(i) => out.push(*i),
            IntTerm::FnApp(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
            IntTerm::Const(_) | IntTerm::Star => {}
        }
    }

    pub fn is_closed(&self) -> bool {
        self.vars().is_empty()
    }

    /// Strict evaluation on concrete wire values.
    pub fn eval(&self, inputs: &[SemValue], reg: &SymbolRegistry) -> Result<SemValue, TraceError> {
        match self {
            IntTerm::Var(i) => {
                inputs.get(*i).cloned().ok_or(TraceError::Arity { expected: i + 1, found: inputs.len() })
            }
            IntTerm::Const(a) => Ok(SemValue::Real(*a)),
            IntTerm::Star => Ok(SemValue::Unit),
            IntTerm::FnApp(f, args) => {
                let sym = reg.get(f).ok_or_else(|| TraceError::UnknownSymbol(f.clone()))?;
                let mut xs = Vec::with_capacity(args.len());
                for a in args {
                    match a.eval(inputs, reg)? {
                        SemValue::Real(x) => xs.push(x),
                        SemValue::Bottom => return Ok(SemValue::Bottom),
                        other => return Err(TraceError::NotReal(format!("{other:?}"))),
                    }
                }
                Ok(SemValue::Real(sym.eval(&xs)))
            }
        }
    }

    /// Applies symbols whose arguments are all literals.
    pub fn fold(&self, reg: &SymbolRegistry) -> IntTerm {
        match self {
            IntTerm::FnApp(f, args) => {
                let args: Vec<IntTerm> = args.iter().map(|a| a.fold(reg)).collect();
                let lits: Option<Vec<f64>> =
                    args.iter().map(|a| if let IntTerm::Const(x) = a { Some(*x) } else { None }).collect();
                match (lits, reg.get(f)) {
                    (Some(xs), Some(sym)) if sym.eval(&xs).is_finite() => IntTerm::Const(sym.eval(&xs)),
                    _ => IntTerm::FnApp(f.clone(), args),
                }
            }
            _ => self.clone(),
        }
    }

    /// Pairs of differing literals, if the two terms agree apart from them.
    pub fn literal_gaps(&self, other: &IntTerm) -> Option<Vec<(f64, f64)>> {
        let mut out = Vec::new();
        fn go(a: &IntTerm, b: &IntTerm, out: &mut Vec<(f64, f64)>) -> bool {
            match (a, b) {
                (IntTerm::Var(i), IntTerm::Var(j)) => i == j,
                (IntTerm::Star, IntTerm::Star) => true,
                (IntTerm::Const(x), IntTerm::Const(y)) => {
                    if x != y {
                        out.push((*x, *y));
                    }
                    true
                }
                (IntTerm::FnApp(f, xs), IntTerm::FnApp(g, ys)) => {
                    f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| go(x, y, out))
                }
                _ => false,
            }
        }
        go(self, other, &mut out).then_some(out)
    }

    /// Renders with the given input wire names.
    pub fn render(&self, names: &[String]) -> String {
        match self {
            IntTerm::Var(i) => names.get(*i).cloned().unwrap_or_else(|| format!("_{}", i + 1)),
            IntTerm::Const(a) => format!("{a}"),
            IntTerm::Star => "*".into(),
            IntTerm::FnApp(f, args) => {
                format!("{f}({})", args.iter().map(|a| a.render(names)).collect::<Vec<_>>().join(","))
            }
        }
    }

    /// Closed bounds on every value this term can take, if known.
    fn range(&self, reg: &SymbolRegistry) -> Option<(f64, f64)> {
        match self {
            IntTerm::Const(a) => Some((*a, *a)),
            IntTerm::FnApp(f, _) => reg.get(f).and_then(|s| s.builtin.range()),
            _ => None,
        }
    }
}

/// The int-terms of a β-normal term, one per output wire.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decomposition {
    pub signature: WireSignature,
    pub terms: Vec<IntTerm>,
    /// For every output wire, the input wires its term reads.
    pub partition: Vec<Vec<usize>>,
    /// Display names of the input wires.
    pub input_names: Vec<String>,
}

impl Decomposition {
    pub fn rendered(&self) -> Vec<String> {
        self.terms.iter().map(|t| t.render(&self.input_names)).collect()
    }

    /// `H1=...  H2=...`.
    pub fn listing(&self) -> String {
        self.rendered().iter().enumerate().map(|(j, h)| format!("H{}={h}", j + 1)).collect::<Vec<_>>().join("  ")
    }

    /// Every input wire is read at most once across all terms.
    pub fn is_linear(&self) -> bool {
        let mut seen = vec![false; self.signature.m()];
        for i in self.partition.iter().flatten() {
            if *i >= seen.len() || seen[*i] {
                return false;
            }
            seen[*i] = true;
        }
        true
    }

    /// The tensor of the int-term denotations at one input tuple.
    pub fn eval(&self, inputs: &[SemValue], reg: &SymbolRegistry) -> Result<Vec<SemValue>, TraceError> {
        self.terms.iter().map(|t| t.eval(inputs, reg)).collect()
    }
}

/// Names for the input wires: a variable's name, suffixed `.k` when it has
/// several positive atoms; `_k` for the wires of the result type.
pub fn input_names(env: &Env, ty: &Type) -> Vec<String> {
    let mut names = Vec::new();
    for (x, t) in env.iter() {
        let k = plus_atoms(t).len();
        if k == 1 {
            names.push(x.clone());
        } else {
            names.extend((1..=k).map(|i| format!("{x}.{i}")));
        }
    }
    names.extend((1..=minus_atoms(ty).len()).map(|i| format!("_{i}")));
    names
}

pub fn decompose(env: &Env, term: &Term, reg: &SymbolRegistry) -> Result<Decomposition, IntError> {
    if !is_beta_normal(term) {
        return Err(IntError::NotBetaNormal);
    }
    let (ty, circuit) = compile_checked(env, term, reg)?;
    let signature = wire_signature(env, &ty);
    let inputs = (0..signature.m()).map(IntTerm::Var).collect();
    let mut holes = 0;
    let terms = circuit.symbolic(inputs, &mut holes)?;
    if terms.iter().flat_map(IntTerm::vars).any(|i| i >= HOLE_BASE) {
        return Err(IntError::Cyclic);
    }
    let partition = terms.iter().map(IntTerm::vars).collect();
    Ok(Decomposition { signature, terms, partition, input_names: input_names(env, &ty) })
}

/// `d_int` as an interval, with the flag telling whether the terms had to be
/// normalized first (then the interval encloses the distance of the normal
/// forms, which is below that of the originals).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntDistance {
    pub interval: DistInterval,
    pub normalized: bool,
}

/// Sum over output wires of the first-order distance between paired int-terms.
/// The supremum ranges over total (non-⊥) inputs.
pub fn int_distance(
    env: &Env,
    ty: &Type,
    m: &Term,
    n: &Term,
    battery: &ProbeBattery,
    reg: &SymbolRegistry,
) -> Result<IntDistance, IntError> {
    let tm = typecheck(env, m, reg)?;
    let tn = typecheck(env, n, reg)?;
    if &tm != ty || &tn != ty {
        return Err(IntError::TypeMismatch(tm, tn));
    }
    let normalized = !(is_beta_normal(m) && is_beta_normal(n));
    let dm = decompose(env, &beta_normalize(m), reg)?;
    let dn = decompose(env, &beta_normalize(n), reg)?;
    let kinds = &dm.signature.outputs;
    let mut lo = ExtReal::ZERO;
    let mut hi = ExtReal::ZERO;
    let mut witnesses = Vec::new();
    for (j, (hm, hn)) in dm.terms.iter().zip(&dn.terms).enumerate() {
        let w = wire_distance(hm, hn, kinds[j], &dm.signature.inputs, battery.reals(), reg);
        lo = lo + w.lo;
        hi = hi + w.hi;
        witnesses.push(w.at);
    }
    let mut interval =
        DistInterval { lo, hi, lo_witness: Some(Evidence::Wires { inputs: witnesses }), hi_certificate: None };
    if interval.hi.is_finite() {
        interval.hi_certificate = Some(Evidence::rule("wire_sum"));
    }
    if let Ok((r, Some(_))) = crate::equational::equ_upper_bound(env, ty, m, n, reg) {
        if r < interval.hi {
            interval.hi = r;
            interval.hi_certificate = Some(Evidence::Certificate { r });
        }
    }
    Ok(IntDistance { interval: interval.snap(), normalized })
}

struct WireGap {
    lo: ExtReal,
    hi: ExtReal,
    at: Vec<f64>,
}

fn wire_distance(
    a: &IntTerm,
    b: &IntTerm,
    kind: WireKind,
    inputs: &[WireKind],
    reals: &[f64],
    reg: &SymbolRegistry,
) -> WireGap {
    let zeros = vec![0.0; inputs.len()];
    let exact = |d: ExtReal, at: Vec<f64>| WireGap { lo: d, hi: d, at };
    let (a, b) = (a.fold(reg), b.fold(reg));
    if kind == WireKind::I || a == b {
        return exact(ExtReal::ZERO, zeros);
    }
    if let (IntTerm::Const(x), IntTerm::Const(y)) = (&a, &b) {
        return exact(ExtReal::finite((x - y).abs()), zeros);
    }
    let (lo, at) = sample_gap(&a, &b, inputs, reals, reg);
    let hi = if let Some(gaps) = a.literal_gaps(&b) {
        ExtReal::finite(gaps.iter().map(|(x, y)| (x - y).abs()).sum())
    } else if let (Some((a0, a1)), Some((b0, b1))) = (a.range(reg), b.range(reg)) {
        ExtReal::finite((a1 - b0).abs().max((b1 - a0).abs()))
    } else {
        ExtReal::Infinity
    };
    WireGap { lo: lo.min(hi), hi, at }
}

fn gap_at(a: &IntTerm, b: &IntTerm, x: &[f64], kinds: &[WireKind], reg: &SymbolRegistry) -> f64 {
    let vals: Vec<SemValue> =
        x.iter().zip(kinds).map(|(v, k)| if *k == WireKind::I { SemValue::Unit } else { SemValue::Real(*v) }).collect();
    match (a.eval(&vals, reg), b.eval(&vals, reg)) {
        (Ok(SemValue::Real(p)), Ok(SemValue::Real(q))) => (p - q).abs(),
        _ => 0.0,
    }
}

/// Staggered grid points, then coordinate ascent from the best one.
fn sample_gap(
    a: &IntTerm,
    b: &IntTerm,
    kinds: &[WireKind],
    reals: &[f64],
    reg: &SymbolRegistry,
) -> (ExtReal, Vec<f64>) {
    let m = kinds.len();
    let mut best = vec![0.0; m];
    let mut best_gap = gap_at(a, b, &best, kinds, reg);
    for s in 0..reals.len() {
        let x: Vec<f64> = (0..m).map(|i| reals[(s * (2 * i + 1) + 3 * i) % reals.len()]).collect();
        let g = gap_at(a, b, &x, kinds, reg);
        if g > best_gap + EPSILON {
            best_gap = g;
            best = x;
        }
    }
    let mut used: Vec<usize> = a.vars();
    used.extend(b.vars());
    used.sort_unstable();
    used.dedup();
    for _ in 0..2 {
        for &i in &used {
            for &r in reals.iter().chain([1e3, -1e3].iter()) {
                let mut x = best.clone();
                x[i] = r;
                let g = gap_at(a, b, &x, kinds, reg);
                if g > best_gap + EPSILON {
                    best_gap = g;
                    best = x;
                }
            }
        }
    }
    (ExtReal::finite(best_gap), best)
}

/// Graphviz rendering of the string diagram of the β-normal form: one box per
/// constant or symbol, one edge per wire. Output edges carry their int-terms
/// when the input was already β-normal.
pub fn export_diagram(env: &Env, term: &Term, reg: &SymbolRegistry) -> Result<String, IntError> {
    let labelled = is_beta_normal(term);
    let d = decompose(env, &beta_normalize(term), reg)?;
    let mut out = String::from("digraph G {\n  rankdir=LR;\n  node [fontname=\"Helvetica\"];\n");
    out.push_str("  { rank=source;");
    for (i, name) in d.input_names.iter().enumerate() {
        out.push_str(&format!(" in{i} [label=\"{name}\", shape=plaintext];"));
    }
    out.push_str(" }\n  { rank=sink;");
    for j in 0..d.signature.n() {
        out.push_str(&format!(" out{j} [label=\"H{}\", shape=plaintext];", j + 1));
    }
    out.push_str(" }\n");
    let mut dot = Dot { boxes: 0, wires: 0, body: String::new(), kinds: &d.signature.inputs };
    for (j, t) in d.terms.iter().enumerate() {
        let src = dot.node(t);
        let kind = d.signature.outputs[j];
        let head = if labelled { format!(", headlabel=\"{}\"", t.render(&d.input_names)) } else { String::new() };
        let w = dot.wire();
        dot.body.push_str(&format!("  {src} -> out{j} [id=\"{w}\", label=\"{kind}\"{head}];\n"));
    }
    out.push_str(&dot.body);
    out.push_str("}\n");
    Ok(out)
}

struct Dot<'a> {
    boxes: usize,
    wires: usize,
    body: String,
    kinds: &'a [WireKind],
}

impl Dot<'_> {
    fn wire(&mut self) -> String {
        self.wires += 1;
        format!("w{}", self.wires - 1)
    }

    fn new_box(&mut self, label: &str) -> String {
        let b = format!("b{}", self.boxes);
        self.boxes += 1;
        self.body.push_str(&format!("  {b} [label=\"{label}\", shape=box];\n"));
        b
    }

    fn node(&mut self, t: &IntTerm) -> String {
        match t {
            IntTerm::Var(i) => format!("in{i}"),
            IntTerm::Const(a) => self.new_box(&format!("{a}")),
            IntTerm::Star => self.new_box("*"),
            IntTerm::FnApp(f, args) => {
                let srcs: Vec<(String, String)> = args
                    .iter()
                    .map(|a| {
                        let kind = match a {
                            IntTerm::Var(i) => self.kinds[*i],
                            IntTerm::Star => WireKind::I,
                            _ => WireKind::R,
                        };
                        (self.node(a), kind.to_string())
                    })
                    .collect();
                let b = self.new_box(f);
                for (s, kind) in srcs {
                    let w = self.wire();
                    self.body.push_str(&format!("  {s} -> {b} [id=\"{w}\", label=\"{kind}\"];\n"));
                }
                b
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_env, parse_term};

    fn reg() -> SymbolRegistry {
        SymbolRegistry::standard().with("f", 2, crate::registry::Builtin::Add).unwrap()
    }

    fn p(s: &str) -> Term {
        parse_term(s, &reg()).unwrap()
    }

    fn reals(xs: &[f64]) -> Vec<SemValue> {
        xs.iter().map(|&x| SemValue::Real(x)).collect()
    }

    #[test]
    fn signatures_follow_polarity() {
        let rr = Type::lolli(Type::R, Type::R);
        let env = Env::new(vec![("x".into(), rr.clone()), ("y".into(), rr.clone()), ("z".into(), rr)]);
        let s = wire_signature(&env, &Type::R);
        assert_eq!((s.m(), s.n()), (3, 4));
        let s = wire_signature(&parse_env("k:R -o I").unwrap(), &Type::I);
        assert_eq!((s.m(), s.n()), (1, 2));
        assert_eq!(wire_signature(&Env::empty(), &Type::R).n(), 1);
    }

    #[test]
    fn constant_and_query_wires() {
        let r = reg();
        let mut log = TraceLog::default();
        let three = interp_int(&Env::empty(), &p("3.0"), &r).unwrap();
        assert_eq!(three.call(&[], &mut log).unwrap(), reals(&[3.0]));
        let k2 = interp_int(&parse_env("k:R -o I").unwrap(), &p("k 2.0"), &r).unwrap();
        assert_eq!(k2.call(&[SemValue::Unit], &mut log).unwrap(), vec![SemValue::Unit, SemValue::Real(2.0)]);
        assert!(log.within_bound());
    }

    #[test]
    fn yanking_gives_identity() {
        let sym = WireFunction::symmetry(vec![WireKind::R], vec![WireKind::R]);
        let t = trace(&sym, 1).unwrap();
        let mut log = TraceLog::default();
        assert_eq!(t.call(&reals(&[7.0]), &mut log).unwrap(), reals(&[7.0]));
        let id = WireFunction::identity(vec![WireKind::R]);
        assert_eq!(trace(&id, 0).unwrap().call(&reals(&[4.0]), &mut log).unwrap(), reals(&[4.0]));
    }

    #[test]
    fn non_monotone_step_is_rejected() {
        let sig = WireSignature { inputs: vec![WireKind::R], outputs: vec![WireKind::R] };
        let flip = WireFunction::new(sig, |xs, _| {
            Ok(vec![match xs[0] {
                SemValue::Real(x) => SemValue::Real(x + 1.0),
                _ => SemValue::Real(0.0),
            }])
        });
        let err = trace(&flip, 1).unwrap().call(&[], &mut TraceLog::default()).unwrap_err();
        assert!(matches!(err, TraceError::NonMonotone { .. }));
    }

    #[test]
    fn composition_through_the_trace() {
        let r = reg();
        // (λk. k 1.0) (λx. f(x, 2.0)) evaluates to 3 through the interactive model
        let t = p("(\\k:R -o R. k 1.0) (\\x:R. f(x, 2.0))");
        let out = interp_int(&Env::empty(), &t, &r).unwrap().call(&[], &mut TraceLog::default()).unwrap();
        assert_eq!(out, reals(&[3.0]));
    }

    #[test]
    fn decomposition_of_the_wire_example() {
        let r = reg();
        let env = parse_env("x:R -o R, y:R -o R, z:R -o R").unwrap();
        let d = decompose(&env, &p("f(x (y 0.0), z 2.0)"), &r).unwrap();
        assert_eq!(d.rendered(), vec!["f(x,z)", "y", "0", "2"]);
        assert!(d.is_linear());
        let k = decompose(&parse_env("k:R -o I").unwrap(), &p("k 2.0"), &r).unwrap();
        assert_eq!(k.listing(), "H1=k  H2=2");
    }

    #[test]
    fn decomposition_needs_normal_form() {
        let r = reg();
        assert_eq!(decompose(&Env::empty(), &p("(\\x:R. x) 1.0"), &r), Err(IntError::NotBetaNormal));
    }

    #[test]
    fn query_distance_is_one() {
        let r = reg();
        let env = parse_env("k:R -o I").unwrap();
        let d = int_distance(&env, &Type::I, &p("k 2.0"), &p("k 3.0"), &ProbeBattery::new(0, &r), &r).unwrap();
        assert_eq!((d.interval.lo, d.interval.hi), (ExtReal::finite(1.0), ExtReal::finite(1.0)));
        assert!(!d.normalized);
    }

    #[test]
    fn diagram_of_a_constant() {
        let dot = export_diagram(&Env::empty(), &p("3.0"), &reg()).unwrap();
        assert!(dot.contains("b0 [label=\"3\", shape=box]"));
        assert!(dot.contains("b0 -> out0 [id=\"w0\", label=\"R\", headlabel=\"3\"]"));
    }
}
