//! Quantitative equational reasoning: derivations of `Γ ⊢ M ≈_r N : τ`, an
//! independent checker, and a synthesizer giving upper bounds on `d_equ`.

use std::fmt;

use serde::ser::Serializer;
use serde::Serialize;
use thiserror::Error;

use crate::corpus::replace_literal;
use crate::dynamics::{eq_canonical, eq_decide};
use crate::metric::ExtReal;
use crate::registry::SymbolRegistry;
use crate::syntax::{Env, Term, Type};
use crate::typing::{check_context, typecheck, Context, TypeError};

fn as_display<T: fmt::Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum QRule {
    /// `Γ ⊢ M = N` in the equational theory, decided by canonical forms.
    Eq0,
    Sym {
        sub: Box<QDerivation>,
    },
    Trans {
        left: Box<QDerivation>,
        right: Box<QDerivation>,
    },
    /// `ā ≈_r b̄` with `|a − b| ≤ r`.
    ConstAxiom {
        a: f64,
        b: f64,
    },
    /// From `hole_env ⊢ M ≈_r N : hole_ty` conclude `C[M] ≈_r C[N]`.
    Ctx {
        #[serde(serialize_with = "as_display")]
        context: Context,
        #[serde(serialize_with = "as_display")]
        hole_env: Env,
        #[serde(serialize_with = "as_display")]
        hole_ty: Type,
        sub: Box<QDerivation>,
    },
}

/// A node of a derivation: its conclusion and the rule that yields it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QDerivation {
    #[serde(serialize_with = "as_display")]
    pub env: Env,
    #[serde(serialize_with = "as_display")]
    pub ty: Type,
    #[serde(serialize_with = "as_display")]
    pub lhs: Term,
    #[serde(serialize_with = "as_display")]
    pub rhs: Term,
    pub r: ExtReal,
    #[serde(flatten)]
    pub rule: QRule,
}

impl QDerivation {
    pub fn eq0(env: &Env, ty: &Type, lhs: Term, rhs: Term) -> QDerivation {
        QDerivation { env: env.clone(), ty: ty.clone(), lhs, rhs, r: ExtReal::ZERO, rule: QRule::Eq0 }
    }

    pub fn const_axiom(a: f64, b: f64) -> QDerivation {
        QDerivation {
            env: Env::empty(),
            ty: Type::R,
            lhs: Term::Const(a),
            rhs: Term::Const(b),
            r: ExtReal::finite((a - b).abs()),
            rule: QRule::ConstAxiom { a, b },
        }
    }

    pub fn sym(sub: QDerivation) -> QDerivation {
        QDerivation {
            env: sub.env.clone(),
            ty: sub.ty.clone(),
            lhs: sub.rhs.clone(),
            rhs: sub.lhs.clone(),
            r: sub.r,
            rule: QRule::Sym { sub: Box::new(sub) },
        }
    }

    pub fn trans(left: QDerivation, right: QDerivation) -> QDerivation {
        QDerivation {
            env: left.env.clone(),
            ty: left.ty.clone(),
            lhs: left.lhs.clone(),
            rhs: right.rhs.clone(),
            r: left.r + right.r,
            rule: QRule::Trans { left: Box::new(left), right: Box::new(right) },
        }
    }

    /// Wraps `sub` in `context`, whose result lives at `(env, ty)`.
    pub fn ctx(context: Context, env: &Env, ty: &Type, sub: QDerivation) -> QDerivation {
        QDerivation {
            env: env.clone(),
            ty: ty.clone(),
            lhs: context.plug(&sub.lhs),
            rhs: context.plug(&sub.rhs),
            r: sub.r,
            rule: QRule::Ctx { context, hole_env: sub.env.clone(), hole_ty: sub.ty.clone(), sub: Box::new(sub) },
        }
    }

    /// Number of rule applications.
    pub fn size(&self) -> usize {
        1 + match &self.rule {
            QRule::Eq0 | QRule::ConstAxiom { .. } => 0,
            QRule::Sym { sub } | QRule::Ctx { sub, .. } => sub.size(),
            QRule::Trans { left, right } => left.size() + right.size(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("derivation rejected at {path}: {reason}")]
pub struct QCheckError {
    pub path: String,
    pub reason: String,
}

/// Validates every node and returns the root distance.
pub fn check_qderivation(d: &QDerivation, reg: &SymbolRegistry) -> Result<ExtReal, QCheckError> {
    check_at(d, "root", reg)
}

fn check_at(d: &QDerivation, path: &str, reg: &SymbolRegistry) -> Result<ExtReal, QCheckError> {
    let fail = |reason: String| Err(QCheckError { path: path.to_string(), reason });
    for (side, t) in [("left", &d.lhs), ("right", &d.rhs)] {
        match typecheck(&d.env, t, reg) {
            Ok(ty) if ty == d.ty => {}
            Ok(ty) => return fail(format!("{side} side has type {ty}, expected {}", d.ty)),
            Err(e) => return fail(format!("{side} side does not typecheck: {e}")),
        }
    }
    match &d.rule {
        QRule::Eq0 => {
            if d.r != ExtReal::ZERO {
                return fail(format!("an equation has distance 0, not {}", d.r));
            }
            if !eq_decide(&d.env, &d.lhs, &d.rhs, reg).unwrap_or(false) {
                return fail("the two sides are not provably equal".into());
            }
            Ok(ExtReal::ZERO)
        }
        QRule::ConstAxiom { a, b } => {
            if d.lhs != Term::Const(*a) || d.rhs != Term::Const(*b) || d.ty != Type::R {
                return fail("the axiom relates two real literals".into());
            }
            if !ExtReal::finite((a - b).abs()).approx_le(d.r) {
                return fail(format!("|{a} - {b}| exceeds {}", d.r));
            }
            Ok(d.r)
        }
        QRule::Sym { sub } => {
            let r = check_at(sub, &format!("{path}/sym"), reg)?;
            if sub.lhs != d.rhs || sub.rhs != d.lhs || sub.env != d.env || sub.ty != d.ty {
                return fail("symmetry must swap the sides of its premise".into());
            }
            agree(r, d.r, path)
        }
        QRule::Trans { left, right } => {
            let r1 = check_at(left, &format!("{path}/trans.0"), reg)?;
            let r2 = check_at(right, &format!("{path}/trans.1"), reg)?;
            if left.rhs != right.lhs {
                return fail(format!("middle terms differ: {} and {}", left.rhs, right.lhs));
            }
            if left.lhs != d.lhs || right.rhs != d.rhs || left.env != d.env || right.env != d.env {
                return fail("transitivity must chain its premises".into());
            }
            agree(r1 + r2, d.r, path)
        }
        QRule::Ctx { context, hole_env, hole_ty, sub } => {
            let r = check_at(sub, &format!("{path}/ctx"), reg)?;
            if &sub.env != hole_env || &sub.ty != hole_ty {
                return fail("the premise does not live at the hole's typing".into());
            }
            if !check_context(context, (hole_env, hole_ty), (&d.env, &d.ty), reg) {
                return fail(format!(
                    "`{context}` is not a context from ({hole_env}, {hole_ty}) to ({}, {})",
                    d.env, d.ty
                ));
            }
            if context.plug(&sub.lhs) != d.lhs || context.plug(&sub.rhs) != d.rhs {
                return fail("the conclusion is not the premise plugged into the context".into());
            }
            agree(r, d.r, path)
        }
    }
}

fn agree(computed: ExtReal, claimed: ExtReal, path: &str) -> Result<ExtReal, QCheckError> {
    if computed.approx_eq(claimed) {
        Ok(claimed)
    } else {
        Err(QCheckError {
            path: path.to_string(),
            reason: format!("claims {claimed} but its premises give {computed}"),
        })
    }
}

/// Literal pairs at aligned positions when the two terms agree up to α
/// apart from them; `None` if their shapes differ anywhere else.
pub fn literal_alignment(a: &Term, b: &Term) -> Option<Vec<(f64, f64)>> {
    fn go(a: &Term, b: &Term, scope: &mut Vec<(String, String)>, out: &mut Vec<(f64, f64)>) -> bool {
        match (a, b) {
            (Term::Var(x), Term::Var(y)) => match scope.iter().rev().find(|(p, q)| p == x || q == y) {
                Some((p, q)) => p == x && q == y,
                None => x == y,
            },
            (Term::Const(x), Term::Const(y)) => {
                out.push((*x, *y));
                true
            }
            (Term::Star, Term::Star) => true,
            (Term::FnApp(f, xs), Term::FnApp(g, ys)) => {
                f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| go(x, y, scope, out))
            }
            (Term::App(a1, a2), Term::App(b1, b2))
            | (Term::Pair(a1, a2), Term::Pair(b1, b2))
            | (Term::LetStar(a1, a2), Term::LetStar(b1, b2)) => go(a1, b1, scope, out) && go(a2, b2, scope, out),
            (Term::Lam(x, s, a1), Term::Lam(y, t, b1)) => {
                if s != t {
                    return false;
                }
                scope.push((x.clone(), y.clone()));
                let ok = go(a1, b1, scope, out);
                scope.pop();
                ok
            }
            (Term::LetPair(x1, y1, a1, a2), Term::LetPair(x2, y2, b1, b2)) => {
                if !go(a1, b1, scope, out) {
                    return false;
                }
                scope.push((x1.clone(), x2.clone()));
                scope.push((y1.clone(), y2.clone()));
                let ok = go(a2, b2, scope, out);
                scope.truncate(scope.len() - 2);
                ok
            }
            _ => false,
        }
    }
    let mut out = Vec::new();
    go(a, b, &mut Vec::new(), &mut out).then_some(out)
}

/// Upper bound on `d_equ(M, N)`: canonicalize both sides; if they agree up
/// to literals, replace the differing literals one at a time. Every finite
/// answer comes with a derivation that [`check_qderivation`] accepts.
pub fn equ_upper_bound(
    env: &Env,
    ty: &Type,
    m: &Term,
    n: &Term,
    reg: &SymbolRegistry,
) -> Result<(ExtReal, Option<QDerivation>), TypeError> {
    for (side, t) in [("the left term", m), ("the right term", n)] {
        let found = typecheck(env, t, reg)?;
        if &found != ty {
            return Err(TypeError::Mismatch { place: side.into(), expected: ty.to_string(), found });
        }
    }
    let (cm, cn) = (eq_canonical(m, reg), eq_canonical(n, reg));
    let Some(lits) = literal_alignment(&cm, &cn) else {
        return Ok((ExtReal::Infinity, None));
    };
    let mut chain = QDerivation::eq0(env, ty, m.clone(), cm.clone());
    let mut current = cm;
    for (idx, (a, b)) in lits.into_iter().enumerate() {
        if a == b {
            continue;
        }
        let hole = Context::new(replace_literal(&current, idx, &Term::hole())).expect("one literal replaced");
        let step = QDerivation::ctx(hole, env, ty, QDerivation::const_axiom(a, b));
        current = step.rhs.clone();
        chain = QDerivation::trans(chain, step);
    }
    let last = QDerivation::eq0(env, ty, current, n.clone());
    let chain = QDerivation::trans(chain, last);
    debug_assert!(check_qderivation(&chain, reg).is_ok(), "{:?}", check_qderivation(&chain, reg));
    Ok((chain.r, Some(chain)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_context_term, parse_env, parse_term};

    fn reg() -> SymbolRegistry {
        SymbolRegistry::standard()
    }

    fn p(s: &str) -> Term {
        parse_term(s, &reg()).unwrap()
    }

    #[test]
    fn query_certificate() {
        let r = reg();
        let env = parse_env("k:R -o I").unwrap();
        let ctx = Context::new(parse_context_term("k [-]", &r).unwrap()).unwrap();
        let d = QDerivation::ctx(ctx, &env, &Type::I, QDerivation::const_axiom(2.0, 3.0));
        assert_eq!(check_qderivation(&d, &r), Ok(ExtReal::finite(1.0)));
        let (bound, cert) = equ_upper_bound(&env, &Type::I, &p("k 2.0"), &p("k 3.0"), &r).unwrap();
        assert_eq!(bound, ExtReal::finite(1.0));
        assert_eq!(check_qderivation(&cert.unwrap(), &r), Ok(ExtReal::finite(1.0)));
    }

    #[test]
    fn equal_terms_get_zero() {
        let r = reg();
        let d = QDerivation::eq0(&Env::empty(), &Type::R, p("(\\x:R. x) 1.0"), p("1.0"));
        assert_eq!(check_qderivation(&d, &r), Ok(ExtReal::ZERO));
    }

    #[test]
    fn transitivity_adds() {
        let r = reg();
        let d = QDerivation::trans(QDerivation::const_axiom(0.0, 1.0), QDerivation::const_axiom(1.0, 1.5));
        assert_eq!(check_qderivation(&d, &r), Ok(ExtReal::finite(1.5)));
    }

    #[test]
    fn bad_derivations_are_rejected_with_a_path() {
        let r = reg();
        let mut d = QDerivation::trans(QDerivation::const_axiom(0.0, 1.0), QDerivation::const_axiom(1.0, 3.0));
        if let QRule::Trans { right, .. } = &mut d.rule {
            right.r = ExtReal::finite(1.0);
        }
        let err = check_qderivation(&d, &r).unwrap_err();
        assert_eq!(err.path, "root/trans.1");
        let wrong = QDerivation::eq0(&Env::empty(), &Type::R, p("0.0"), p("1.0"));
        assert!(check_qderivation(&wrong, &r).is_err());
    }

    #[test]
    fn different_skeletons_abstain() {
        let r = reg();
        let rr = Type::lolli(Type::R, Type::R);
        let (bound, cert) = equ_upper_bound(&Env::empty(), &rr, &p("\\x:R. x"), &p("\\x:R. sin(x)"), &r).unwrap();
        assert_eq!(bound, ExtReal::Infinity);
        assert!(cert.is_none());
    }

    #[test]
    fn alignment_respects_binders() {
        assert_eq!(literal_alignment(&p("\\x:R. add(x, 1.0)"), &p("\\y:R. add(y, 2.0)")), Some(vec![(1.0, 2.0)]));
        assert_eq!(literal_alignment(&p("\\x:R. \\y:R. add(x, y)"), &p("\\x:R. \\y:R. add(y, x)")), None);
    }
}
