//! Cross-engine reports and the corpus-wide property suites.
//!
//! Every engine returns an interval (or a one-sided bound), so the metrics
//! are compared through interval consistency: `obs ≤ den.hi`,
//! `den.lo ≤ int.hi`, `int.lo ≤ equ` and `obs ≤ equ`.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::corpus::{introduce_redex, nice_constant, replace_literal, Corpus, TermPair};
use crate::den::{den_distance, ground_l1, interp_den, ProbeBattery, SemValue};
use crate::dynamics::{eq_decide, eval};
use crate::equational::{check_qderivation, equ_upper_bound, QDerivation};
use crate::int::{decompose, int_distance, interp_int, trace, TraceLog, WireFunction, WireSignature};
use crate::metric::{DistInterval, ExtReal};
use crate::metrics::{log_distance_observable, obs_lower_bound, MetricError, ObsWitness};
use crate::polarity::WireKind;
use crate::registry::SymbolRegistry;
use crate::syntax::{Env, Term, Type};
use crate::typing::{check_context, Context};

/// Search effort shared by the engines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub seed: u64,
    /// Contexts tried by the observational search.
    pub contexts: usize,
    /// Function probes in the denotational battery.
    pub probes: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { seed: 0, contexts: 64, probes: 64 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Metric {
    Obs,
    Den,
    Int,
    Equ,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairInfo {
    pub gamma: String,
    #[serde(rename = "type")]
    pub ty: String,
    #[serde(rename = "M")]
    pub m: String,
    #[serde(rename = "N")]
    pub n: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ObsEntry {
    pub lo: ExtReal,
    pub witness: ObsWitness,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DenEntry {
    pub lo: ExtReal,
    pub hi: ExtReal,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct IntEntry {
    pub lo: ExtReal,
    pub hi: ExtReal,
    pub normalized: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct EquEntry {
    pub hi: ExtReal,
    pub certificate: Option<QDerivation>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Metrics {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub obs: Option<ObsEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub den: Option<DenEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub int: Option<IntEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equ: Option<EquEntry>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub pair: PairInfo,
    pub metrics: Metrics,
    /// Present when every engine ran.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chain_ok: Option<bool>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<String>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// Checks every link of the chain between the engines that ran.
    fn check_chain(&mut self) {
        let m = &self.metrics;
        let mut v = Vec::new();
        let mut le = |name: &str, a: ExtReal, b: ExtReal| {
            if !a.approx_le(b) {
                v.push(format!("{name}: {a} > {b}"));
            }
        };
        if let Some(d) = &m.den {
            le("den.lo <= den.hi", d.lo, d.hi);
        }
        if let Some(i) = &m.int {
            le("int.lo <= int.hi", i.lo, i.hi);
        }
        if let (Some(o), Some(d)) = (&m.obs, &m.den) {
            le("obs <= den.hi", o.lo, d.hi);
        }
        if let (Some(d), Some(i)) = (&m.den, &m.int) {
            le("den.lo <= int.hi", d.lo, i.hi);
        }
        if let (Some(i), Some(e)) = (&m.int, &m.equ) {
            le("int.lo <= equ", i.lo, e.hi);
        }
        if let (Some(o), Some(e)) = (&m.obs, &m.equ) {
            le("obs <= equ", o.lo, e.hi);
        }
        let all = m.obs.is_some() && m.den.is_some() && m.int.is_some() && m.equ.is_some();
        self.chain_ok = all.then_some(v.is_empty());
        self.violations = v;
    }
}

fn obs_entry(
    env: &Env,
    ty: &Type,
    m: &Term,
    n: &Term,
    b: Budget,
    reg: &SymbolRegistry,
) -> Result<ObsEntry, MetricError> {
    let (lo, witness) = obs_lower_bound(env, ty, m, n, b.contexts, reg)?;
    Ok(ObsEntry { lo, witness })
}

fn den_entry(
    env: &Env,
    ty: &Type,
    m: &Term,
    n: &Term,
    b: Budget,
    reg: &SymbolRegistry,
) -> Result<DenEntry, MetricError> {
    let battery = ProbeBattery::with_probes(b.seed, b.probes, reg);
    let d = den_distance(env, ty, m, n, &battery, reg)?;
    Ok(DenEntry { lo: d.lo, hi: d.hi })
}

fn int_entry(
    env: &Env,
    ty: &Type,
    m: &Term,
    n: &Term,
    b: Budget,
    reg: &SymbolRegistry,
) -> Result<IntEntry, MetricError> {
    let battery = ProbeBattery::with_probes(b.seed, b.probes, reg);
    let d = int_distance(env, ty, m, n, &battery, reg)?;
    Ok(IntEntry { lo: d.interval.lo, hi: d.interval.hi, normalized: d.normalized })
}

fn equ_entry(env: &Env, ty: &Type, m: &Term, n: &Term, reg: &SymbolRegistry) -> Result<EquEntry, MetricError> {
    let (hi, certificate) = equ_upper_bound(env, ty, m, n, reg)?;
    Ok(EquEntry { hi, certificate })
}

/// Runs the selected engines (in parallel) and checks the chain between them.
pub fn metric_report(
    env: &Env,
    ty: &Type,
    m: &Term,
    n: &Term,
    which: &[Metric],
    budget: Budget,
    reg: &SymbolRegistry,
) -> Result<Report, MetricError> {
    let wants = |k: Metric| which.contains(&k);
    let ((obs, den), (int, equ)) = rayon::join(
        || {
            rayon::join(
                || wants(Metric::Obs).then(|| obs_entry(env, ty, m, n, budget, reg)).transpose(),
                || wants(Metric::Den).then(|| den_entry(env, ty, m, n, budget, reg)).transpose(),
            )
        },
        || {
            rayon::join(
                || wants(Metric::Int).then(|| int_entry(env, ty, m, n, budget, reg)).transpose(),
                || wants(Metric::Equ).then(|| equ_entry(env, ty, m, n, reg)).transpose(),
            )
        },
    );
    let mut report = Report {
        pair: PairInfo { gamma: env.to_string(), ty: ty.to_string(), m: m.to_string(), n: n.to_string() },
        metrics: Metrics { obs: obs?, den: den?, int: int?, equ: equ? },
        chain_ok: None,
        violations: Vec::new(),
    };
    report.check_chain();
    Ok(report)
}

/// All four engines and the full chain.
pub fn ordering_report(
    env: &Env,
    ty: &Type,
    m: &Term,
    n: &Term,
    budget: Budget,
    reg: &SymbolRegistry,
) -> Result<Report, MetricError> {
    metric_report(env, ty, m, n, &[Metric::Obs, Metric::Den, Metric::Int, Metric::Equ], budget, reg)
}

/// Outcome of one property over a batch of instances.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub passed: usize,
    pub total: usize,
    /// One line per failing instance, enough to replay it.
    pub failures: Vec<String>,
}

impl SuiteReport {
    fn from_outcomes(name: impl Into<String>, outcomes: Vec<Result<(), String>>) -> SuiteReport {
        let total = outcomes.len();
        let failures: Vec<String> = outcomes.into_iter().filter_map(Result::err).collect();
        SuiteReport { name: name.into(), passed: total - failures.len(), total, failures }
    }

    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}/{}", self.name, self.passed, self.total)
    }
}

fn describe(p: &TermPair) -> String {
    format!("{} |- {} vs {} : {}", p.env, p.m, p.n, p.ty)
}

/// The chain on `count` generated pairs.
pub fn ordering_suite(seed: u64, count: usize, budget: Budget, reg: &SymbolRegistry) -> SuiteReport {
    let pairs = Corpus::new(seed, reg).pairs(count);
    let outcomes = pairs
        .par_iter()
        .map(|p| match ordering_report(&p.env, &p.ty, &p.m, &p.n, budget, reg) {
            Ok(r) if r.chain_ok == Some(true) => Ok(()),
            Ok(r) => Err(format!("{}: {}", describe(p), r.violations.join("; "))),
            Err(e) => Err(format!("{}: {e}", describe(p))),
        })
        .collect();
    SuiteReport::from_outcomes("chain_ok", outcomes)
}

fn values_close(a: &[SemValue], b: &[SemValue], tol: f64) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|(x, y)| match (x, y) {
            (SemValue::Real(x), SemValue::Real(y)) => (x - y).abs() <= tol,
            (SemValue::Unit, SemValue::Unit) | (SemValue::Bottom, SemValue::Bottom) => true,
            _ => false,
        })
}

fn random_inputs(kinds: &[WireKind], rng: &mut ChaCha8Rng) -> Vec<SemValue> {
    kinds
        .iter()
        .map(|k| match k {
            WireKind::R => SemValue::Real(rng.gen_range(-10.0..10.0)),
            WireKind::I => SemValue::Unit,
        })
        .collect()
}

/// `interp_int` against the tensor of the int-term denotations, on `points`
/// random input tuples for each of `count` β-normal terms.
pub fn decompose_suite(seed: u64, count: usize, points: usize, reg: &SymbolRegistry) -> SuiteReport {
    let mut corpus = Corpus::new(seed, reg);
    let samples: Vec<_> = (0..count).map(|_| corpus.normal_term()).collect();
    let outcomes = samples
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let tag = format!("{} |- {} : {}", s.env, s.term, s.ty);
            let f = interp_int(&s.env, &s.term, reg).map_err(|e| format!("{tag}: {e}"))?;
            let d = decompose(&s.env, &s.term, reg).map_err(|e| format!("{tag}: {e}"))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (i as u64).wrapping_mul(0x9e37_79b9));
            for _ in 0..points {
                let xs = random_inputs(&f.signature.inputs, &mut rng);
                let a = f.call(&xs, &mut TraceLog::default()).map_err(|e| format!("{tag}: {e}"))?;
                let b = d.eval(&xs, reg).map_err(|e| format!("{tag}: {e}"))?;
                if !values_close(&a, &b, 1e-9) {
                    return Err(format!("{tag}: at {xs:?} the diagram gives {a:?}, the int-terms {b:?}"));
                }
            }
            Ok(())
        })
        .collect();
    SuiteReport::from_outcomes("decompose_extensional", outcomes)
}

/// Feeds back `pairs` (input position, output position) of `h`; the
/// result has signature `A ⊗ Z → B ⊗ Z` with `Z` in pair order.
fn with_feedback(h: &WireFunction, pairs: &[(usize, usize)]) -> WireFunction {
    let sig = &h.signature;
    let is_in = |i: usize| pairs.iter().position(|p| p.0 == i);
    let is_out = |j: usize| pairs.iter().any(|p| p.1 == j);
    let z: Vec<WireKind> = pairs.iter().map(|&(i, _)| sig.inputs[i]).collect();
    let a: Vec<WireKind> = (0..sig.m()).filter(|&i| is_in(i).is_none()).map(|i| sig.inputs[i]).collect();
    let b: Vec<WireKind> = (0..sig.n()).filter(|&j| !is_out(j)).map(|j| sig.outputs[j]).collect();
    let signature = WireSignature { inputs: [a.clone(), z.clone()].concat(), outputs: [b, z].concat() };
    let (h, pairs) = (h.clone(), pairs.to_vec());
    let a_len = a.len();
    WireFunction::new(signature, move |xs, log| {
        let mut next = 0;
        let hx: Vec<SemValue> = (0..h.signature.m())
            .map(|i| match pairs.iter().position(|p| p.0 == i) {
                Some(k) => xs[a_len + k].clone(),
                None => {
                    next += 1;
                    xs[next - 1].clone()
                }
            })
            .collect();
        let ys = h.call(&hx, log)?;
        let mut out: Vec<SemValue> =
            (0..ys.len()).filter(|j| !pairs.iter().any(|p| p.1 == *j)).map(|j| ys[j].clone()).collect();
        out.extend(pairs.iter().map(|p| ys[p.1].clone()));
        Ok(out)
    })
}

/// Adds `shift` to the real wires among the first `width` and leaves the rest.
fn shift_map(
    kinds: Vec<WireKind>,
    width: usize,
    shift: f64,
) -> impl Fn(&[SemValue]) -> Vec<SemValue> + Send + Sync + Clone {
    move |xs: &[SemValue]| {
        xs.iter()
            .enumerate()
            .map(|(i, x)| match (i < width, kinds.get(i), x) {
                (true, Some(WireKind::R), SemValue::Real(v)) => SemValue::Real(v + shift),
                _ => x.clone(),
            })
            .collect()
    }
}

fn pre(f: &WireFunction, g: impl Fn(&[SemValue]) -> Vec<SemValue> + Send + Sync + 'static) -> WireFunction {
    let f2 = f.clone();
    WireFunction::new(f.signature.clone(), move |xs, log| f2.call(&g(xs), log))
}

fn post(f: &WireFunction, g: impl Fn(&[SemValue]) -> Vec<SemValue> + Send + Sync + 'static) -> WireFunction {
    let f2 = f.clone();
    WireFunction::new(f.signature.clone(), move |xs, log| Ok(g(&f2.call(xs, log)?)))
}

fn trace_laws(h: &WireFunction, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let sig = &h.signature;
    let mut outs: Vec<usize> = (0..sig.n()).collect();
    outs.shuffle(rng);
    let mut pairs = Vec::new();
    let mut used = vec![false; sig.n()];
    for i in 0..sig.m() {
        if rng.gen_bool(0.6) {
            if let Some(&j) = outs.iter().find(|&&j| !used[j] && sig.outputs[j] == sig.inputs[i]) {
                used[j] = true;
                pairs.push((i, j));
            }
        }
    }
    let k = pairs.len();
    let f = with_feedback(h, &pairs);
    let a_kinds = f.signature.inputs[..f.signature.m() - k].to_vec();
    let b_kinds = f.signature.outputs[..f.signature.n() - k].to_vec();
    let err = |e: crate::int::TraceError| e.to_string();
    let tr = trace(&f, k).map_err(err)?;
    let shift = nice_constant(rng);
    let g_in = shift_map(a_kinds.clone(), a_kinds.len(), shift);
    let g_out = shift_map(b_kinds.clone(), b_kinds.len(), -shift);
    let tr_pre = trace(&pre(&f, g_in.clone()), k).map_err(err)?;
    let tr_post = trace(&post(&f, g_out.clone()), k).map_err(err)?;
    let yank = trace(&WireFunction::symmetry(a_kinds.clone(), a_kinds.clone()), a_kinds.len()).map_err(err)?;
    let vanish = trace(&tr, 0).map_err(err)?;
    let mut log = TraceLog::default();
    for _ in 0..3 {
        let x = random_inputs(&a_kinds, rng);
        let base = tr.call(&x, &mut log).map_err(err)?;
        let checks = [
            (
                "naturality in the input",
                tr_pre.call(&x, &mut log).map_err(err)?,
                tr.call(&g_in(&x), &mut log).map_err(err)?,
            ),
            ("naturality in the output", tr_post.call(&x, &mut log).map_err(err)?, g_out(&base)),
            ("yanking", yank.call(&x, &mut log).map_err(err)?, x.clone()),
            ("vanishing", vanish.call(&x, &mut log).map_err(err)?, base.clone()),
        ];
        for (law, l, r) in checks {
            if !values_close(&l, &r, 1e-9) {
                return Err(format!("{law} at {x:?}: {l:?} vs {r:?}"));
            }
        }
    }
    if !log.within_bound() {
        return Err(format!("a fixpoint took {} iterations beyond its width + 1", log.worst_slack));
    }
    Ok(())
}

/// Yanking, naturality and vanishing for traces of `count` random wire
/// functions, each the interpretation of a generated term with random wires
/// fed back; every fixpoint must converge within `width + 1` iterations.
pub fn trace_suite(seed: u64, count: usize, reg: &SymbolRegistry) -> SuiteReport {
    let mut corpus = Corpus::new(seed, reg);
    let samples: Vec<_> = (0..count).map(|_| corpus.normal_term()).collect();
    let outcomes = samples
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let tag = format!("{} |- {} : {}", s.env, s.term, s.ty);
            let h = interp_int(&s.env, &s.term, reg).map_err(|e| format!("{tag}: {e}"))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
            trace_laws(&h, &mut rng).map_err(|e| format!("{tag}: {e}"))
        })
        .collect();
    SuiteReport::from_outcomes("trace_laws", outcomes)
}

fn value_wires(v: &Term, out: &mut Vec<SemValue>) {
    match v {
        Term::Const(a) => out.push(SemValue::Real(*a)),
        Term::Star => out.push(SemValue::Unit),
        Term::Pair(a, b) => {
            value_wires(a, out);
            value_wires(b, out);
        }
        _ => {}
    }
}

fn collapse_one(m: &Term, n: &Term, ty: &Type, budget: Budget, reg: &SymbolRegistry) -> Result<(), String> {
    let empty = Env::empty();
    let s = |e: &dyn fmt::Display| e.to_string();
    let v = eval(m, reg).map_err(|e| s(&e))?;
    let den_v = interp_den(&empty, m, reg).and_then(|f| f.call(&[])).map_err(|e| s(&e))?;
    if den_v != SemValue::from_value(&v).map_err(|e| s(&e))? {
        return Err(format!("denotation {den_v:?} differs from the value {v}"));
    }
    let mut wires = Vec::new();
    value_wires(&v, &mut wires);
    let int_v =
        interp_int(&empty, m, reg).map_err(|e| s(&e))?.call(&[], &mut TraceLog::default()).map_err(|e| s(&e))?;
    if int_v != wires {
        return Err(format!("wires {int_v:?} differ from the value {v}"));
    }
    let d = ground_l1(&v, &eval(n, reg).map_err(|e| s(&e))?, ty).map_err(|e| s(&e))?;
    let report = ordering_report(&empty, ty, m, n, budget, reg).map_err(|e| s(&e))?;
    let log = log_distance_observable(m, n, ty, reg).map_err(|e| s(&e))?;
    let mx = &report.metrics;
    let (den, int) = (mx.den.expect("ran"), mx.int.expect("ran"));
    let obs = &mx.obs.as_ref().expect("ran").lo;
    let equ = mx.equ.as_ref().expect("ran").hi;
    let exact = [("log", log, log), ("den", den.lo, den.hi), ("int", int.lo, int.hi)];
    for (name, lo, hi) in exact {
        if lo != d || hi != d {
            return Err(format!("{name} gives [{lo}, {hi}], the values are at {d}"));
        }
    }
    if *obs != d {
        return Err(format!("obs gives {obs}, the values are at {d}"));
    }
    if !d.approx_le(equ) {
        return Err(format!("equ gives {equ} below {d}"));
    }
    Ok(())
}

/// Closed terms of observable type: evaluation, both interpretations and the
/// engines agree with the L1 distance of the values.
pub fn collapse_suite(seed: u64, count: usize, budget: Budget, reg: &SymbolRegistry) -> SuiteReport {
    let mut corpus = Corpus::new(seed, reg);
    let pairs: Vec<(Term, Term, Type)> = (0..count)
        .map(|_| {
            let s = corpus.closed_observable();
            let n = corpus.perturb(&s.term);
            (s.term, n, s.ty)
        })
        .collect();
    let outcomes = pairs
        .par_iter()
        .map(|(m, n, ty)| collapse_one(m, n, ty, budget, reg).map_err(|e| format!("{m} vs {n} : {ty}: {e}")))
        .collect();
    SuiteReport::from_outcomes("observable_collapse", outcomes)
}

/// The engines checked by the admissibility suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Den,
    Int,
    Equ,
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Den => "den",
            Engine::Int => "int",
            Engine::Equ => "equ",
        })
    }
}

fn engine_interval(
    engine: Engine,
    env: &Env,
    ty: &Type,
    m: &Term,
    n: &Term,
    budget: Budget,
    reg: &SymbolRegistry,
) -> Result<DistInterval, String> {
    let battery = || ProbeBattery::with_probes(budget.seed, budget.probes, reg);
    match engine {
        Engine::Den => den_distance(env, ty, m, n, &battery(), reg).map_err(|e| e.to_string()),
        Engine::Int => int_distance(env, ty, m, n, &battery(), reg).map(|d| d.interval).map_err(|e| e.to_string()),
        Engine::Equ => {
            let (hi, _) = equ_upper_bound(env, ty, m, n, reg).map_err(|e| e.to_string())?;
            Ok(DistInterval::new(ExtReal::ZERO, hi))
        }
    }
}

/// Contexts `(Γ, τ) → (Δ, ρ)` used to sample non-expansiveness.
fn sample_contexts(env: &Env, ty: &Type, reg: &SymbolRegistry) -> Vec<(Context, Env, Type)> {
    let h = Term::hole;
    let mut out = vec![
        (Term::pair(h(), Term::Const(2.0)), env.clone(), Type::tensor(ty.clone(), Type::R)),
        (Term::let_star(Term::Star, h()), env.clone(), ty.clone()),
    ];
    match ty {
        Type::R => {
            out.push((Term::fn_app("add", vec![h(), Term::Const(1.5)]), env.clone(), Type::R));
            out.push((Term::fn_app("sin", vec![h()]), env.clone(), Type::R));
        }
        Type::Lolli(a, b) if **a == Type::R => out.push((Term::app(h(), Term::Const(1.0)), env.clone(), (**b).clone())),
        _ => {}
    }
    if let Some((x, t)) = env.0.last() {
        let rest = Env::new(env.0[..env.len() - 1].to_vec());
        out.push((Term::lam(x, t.clone(), h()), rest, Type::lolli(t.clone(), ty.clone())));
    }
    out.into_iter()
        .filter_map(|(t, e, r)| Context::new(t).map(|c| (c, e, r)))
        .filter(|(c, e, r)| check_context(c, (env, ty), (e, r), reg))
        .collect()
}

fn a1(engine: Engine, p: &TermPair, budget: Budget, reg: &SymbolRegistry) -> Result<(), String> {
    let outer = engine_interval(engine, &p.env, &p.ty, &p.m, &p.n, budget, reg)?;
    let cert = if engine == Engine::Equ {
        equ_upper_bound(&p.env, &p.ty, &p.m, &p.n, reg).map_err(|e| e.to_string())?.1
    } else {
        None
    };
    for (c, e, r) in sample_contexts(&p.env, &p.ty, reg) {
        let (cm, cn) = (c.plug(&p.m), c.plug(&p.n));
        match engine {
            Engine::Equ => {
                if let Some(d) = &cert {
                    let wrapped = QDerivation::ctx(c.clone(), &e, &r, d.clone());
                    let got = check_qderivation(&wrapped, reg).map_err(|e| format!("context {c}: {e}"))?;
                    if !got.approx_le(outer.hi) {
                        return Err(format!("context {c}: certificate grew to {got}"));
                    }
                }
            }
            _ => {
                let inner = engine_interval(engine, &e, &r, &cm, &cn, budget, reg)?;
                if !inner.lo.approx_le(outer.hi) {
                    return Err(format!("context {c}: lo {} exceeds {}", inner.lo, outer.hi));
                }
            }
        }
    }
    Ok(())
}

fn a2(engine: Engine, a: f64, b: f64, budget: Budget, reg: &SymbolRegistry) -> Result<(), String> {
    let d = engine_interval(engine, &Env::empty(), &Type::R, &Term::Const(a), &Term::Const(b), budget, reg)?;
    let want = ExtReal::finite((a - b).abs());
    let exact = match engine {
        Engine::Equ => d.hi == want,
        _ => d.lo == want && d.hi == want,
    };
    if exact {
        Ok(())
    } else {
        Err(format!("{a} vs {b}: {d}, want {want}"))
    }
}

fn a3(
    engine: Engine,
    m: &Term,
    n: &Term,
    ty: &Type,
    gap: f64,
    budget: Budget,
    reg: &SymbolRegistry,
) -> Result<(), String> {
    let d = engine_interval(engine, &Env::empty(), ty, m, n, budget, reg)?;
    let bound = if engine == Engine::Equ { d.hi } else { d.lo };
    if ExtReal::finite(gap).approx_le(bound) {
        Ok(())
    } else {
        Err(format!("{m} vs {n}: {d} below {gap}"))
    }
}

fn a4(
    engine: Engine,
    env: &Env,
    ty: &Type,
    m: &Term,
    n: &Term,
    budget: Budget,
    reg: &SymbolRegistry,
) -> Result<(), String> {
    if !eq_decide(env, m, n, reg).map_err(|e| e.to_string())? {
        return Err(format!("{m} and {n} are not provably equal"));
    }
    let d = engine_interval(engine, env, ty, m, n, budget, reg)?;
    if d.lo == ExtReal::ZERO && d.hi.approx_le(ExtReal::ZERO) {
        Ok(())
    } else {
        Err(format!("{m} vs {n}: {d}"))
    }
}

/// A term provably equal to `m`, by one of four rewrites chosen by `i`.
fn equal_variant(i: usize, ty: &Type, m: &Term) -> Term {
    let avoid = crate::dynamics::all_names(m);
    match i % 4 {
        0 => introduce_redex(m),
        1 => match ty {
            Type::Lolli(a, _) => {
                let z = crate::dynamics::fresh_name("z", &avoid);
                Term::lam(&z, (**a).clone(), Term::app(m.clone(), Term::var(&z)))
            }
            _ => Term::let_star(Term::Star, m.clone()),
        },
        2 => Term::let_star(Term::Star, m.clone()),
        _ => match m.literals().first() {
            Some(&c) => replace_literal(m, 0, &Term::fn_app("add", vec![Term::Const(c - 3.0), Term::Const(3.0)])),
            None => introduce_redex(m),
        },
    }
}

/// (A1) through (A4) for one engine, `count` instances each.
pub fn admissibility_suite(
    engine: Engine,
    seed: u64,
    count: usize,
    budget: Budget,
    reg: &SymbolRegistry,
) -> Vec<SuiteReport> {
    let mut corpus = Corpus::new(seed, reg);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let pairs = corpus.pairs(count);
    let r1 =
        pairs.par_iter().map(|p| a1(engine, p, budget, reg).map_err(|e| format!("{}: {e}", describe(p)))).collect();

    let consts: Vec<(f64, f64)> = (0..count).map(|_| (nice_constant(&mut rng), nice_constant(&mut rng))).collect();
    let r2 = consts.par_iter().map(|&(a, b)| a2(engine, a, b, budget, reg)).collect();

    let goals = crate::corpus::goal_types();
    let prefixes: Vec<(Term, Term, Type, f64)> = (0..count)
        .map(|_| {
            let k = rng.gen_range(1..=3);
            let sigma = goals.choose(&mut rng).expect("non-empty").clone();
            let (v, u) = loop {
                if let (Some(v), Some(u)) = (corpus.closed_of(&sigma), corpus.closed_of(&sigma)) {
                    break (v, u);
                }
            };
            let xs: Vec<f64> = (0..k).map(|_| nice_constant(&mut rng)).collect();
            let ys: Vec<f64> = (0..k).map(|_| nice_constant(&mut rng)).collect();
            let gap = xs.iter().zip(&ys).map(|(a, b)| (a - b).abs()).sum();
            let m = Term::pair(Term::pair_n(xs.into_iter().map(Term::Const)), v);
            let n = Term::pair(Term::pair_n(ys.into_iter().map(Term::Const)), u);
            let ty = Type::tensor(Type::tensor_n(vec![Type::R; k]), sigma);
            (m, n, ty, gap)
        })
        .collect();
    let r3 = prefixes.par_iter().map(|(m, n, ty, gap)| a3(engine, m, n, ty, *gap, budget, reg)).collect();

    let equal: Vec<(Env, Type, Term, Term)> = (0..count)
        .map(|i| {
            let s = corpus.normal_term();
            let n = equal_variant(i, &s.ty, &s.term);
            (s.env, s.ty, s.term, n)
        })
        .collect();
    let r4 = equal
        .par_iter()
        .map(|(env, ty, m, n)| a4(engine, env, ty, m, n, budget, reg).map_err(|e| format!("{env} |- {e}")))
        .collect();

    [("A1", r1), ("A2", r2), ("A3", r3), ("A4", r4)]
        .into_iter()
        .map(|(name, r)| SuiteReport::from_outcomes(format!("{engine} {name}"), r))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_env, parse_term, parse_type};

    fn reg() -> SymbolRegistry {
        SymbolRegistry::standard()
    }

    #[test]
    fn constants_agree_everywhere() {
        let r = reg();
        let rep = ordering_report(&Env::empty(), &Type::R, &Term::Const(2.0), &Term::Const(3.0), Budget::default(), &r)
            .unwrap();
        assert_eq!(rep.chain_ok, Some(true));
        let m = &rep.metrics;
        assert_eq!(m.obs.as_ref().unwrap().lo, ExtReal::finite(1.0));
        assert_eq!(m.den.unwrap().lo, ExtReal::finite(1.0));
        assert_eq!(m.int.unwrap().hi, ExtReal::finite(1.0));
        assert_eq!(m.equ.as_ref().unwrap().hi, ExtReal::finite(1.0));
    }

    #[test]
    fn queries_to_a_unit_function() {
        let r = reg();
        let env = parse_env("k:R -o I").unwrap();
        let (m, n) = (parse_term("k 2.0", &r).unwrap(), parse_term("k 3.0", &r).unwrap());
        let rep = ordering_report(&env, &Type::I, &m, &n, Budget::default(), &r).unwrap();
        assert_eq!(rep.chain_ok, Some(true));
        let den = rep.metrics.den.unwrap();
        let int = rep.metrics.int.unwrap();
        assert_eq!((den.lo, den.hi), (ExtReal::ZERO, ExtReal::ZERO));
        assert_eq!((int.lo, int.hi), (ExtReal::finite(1.0), ExtReal::finite(1.0)));
    }

    #[test]
    fn json_uses_the_documented_keys() {
        let r = reg();
        let t = parse_term("\\x:R. x", &r).unwrap();
        let ty = parse_type("R -o R").unwrap();
        let rep = ordering_report(&Env::empty(), &ty, &t, &t, Budget::default(), &r).unwrap();
        let v: serde_json::Value = serde_json::from_str(&rep.to_json()).unwrap();
        for key in ["gamma", "type", "M", "N"] {
            assert!(v["pair"].get(key).is_some(), "{key}");
        }
        assert_eq!(v["metrics"]["int"]["normalized"], false);
        assert_eq!(v["chain_ok"], true);
    }

    #[test]
    fn small_suites_pass() {
        let r = reg();
        for rep in [trace_suite(1, 10, &r), decompose_suite(1, 10, 5, &r), ordering_suite(1, 8, Budget::default(), &r)]
        {
            assert!(rep.ok(), "{rep}: {:?}", rep.failures);
        }
    }
}
