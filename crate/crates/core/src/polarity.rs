//! Positive and negative atom occurrences of types and environments.
//!
//! Both `R` and `I` count as one positive atom; arrows swap the polarity of
//! their domain.

use std::ops::Add;

use serde::Serialize;

use crate::syntax::{Env, Type};

/// What an atomic wire carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum WireKind {
    R,
    I,
}

impl std::fmt::Display for WireKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            WireKind::R => "R",
            WireKind::I => "I",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Polarity {
    pub plus: usize,
    pub minus: usize,
}

impl Add for Polarity {
    type Output = Polarity;

    fn add(self, rhs: Polarity) -> Polarity {
        Polarity { plus: self.plus + rhs.plus, minus: self.minus + rhs.minus }
    }
}

/// Positive atoms of `ty`, left to right.
pub fn plus_atoms(ty: &Type) -> Vec<WireKind> {
    let mut out = Vec::new();
    collect(ty, true, &mut out);
    out
}

/// Negative atoms of `ty`, left to right.
pub fn minus_atoms(ty: &Type) -> Vec<WireKind> {
    let mut out = Vec::new();
    collect(ty, false, &mut out);
    out
}

fn collect(ty: &Type, positive: bool, out: &mut Vec<WireKind>) {
    match ty {
        Type::R if positive => out.push(WireKind::R),
        Type::I if positive => out.push(WireKind::I),
        Type::R | Type::I => {}
        Type::Tensor(a, b) => {
            collect(a, positive, out);
            collect(b, positive, out);
        }
        Type::Lolli(a, b) => {
            collect(a, !positive, out);
            collect(b, positive, out);
        }
    }
}

pub fn type_polarity(ty: &Type) -> Polarity {
    Polarity { plus: plus_atoms(ty).len(), minus: minus_atoms(ty).len() }
}

/// Componentwise sum over a list of types.
pub fn polarity(types: &[Type]) -> Polarity {
    types.iter().map(type_polarity).fold(Polarity::default(), Add::add)
}

pub fn env_polarity(env: &Env) -> Polarity {
    env.types().map(type_polarity).fold(Polarity::default(), Add::add)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_type;

    fn p(s: &str) -> Type {
        parse_type(s).unwrap()
    }

    #[test]
    fn binary_function_has_two_negative_atoms() {
        assert_eq!(polarity(&[p("R (x) R -o R")]), Polarity { plus: 1, minus: 2 });
    }

    #[test]
    fn empty_list_is_zero() {
        assert_eq!(polarity(&[]), Polarity::default());
    }

    #[test]
    fn three_unary_functions() {
        let rr = p("R -o R");
        assert_eq!(polarity(&[rr.clone(), rr.clone(), rr]), Polarity { plus: 3, minus: 3 });
    }

    #[test]
    fn unit_counts_like_a_real() {
        assert_eq!(plus_atoms(&p("R -o I")), vec![WireKind::I]);
        assert_eq!(minus_atoms(&p("R -o I")), vec![WireKind::R]);
        assert_eq!(type_polarity(&p("(R -o R) -o R")), Polarity { plus: 2, minus: 1 });
    }
}
