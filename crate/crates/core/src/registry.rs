//! The set of non-expansive real functions available to `f(M1, ..., Mk)`.

use std::collections::BTreeMap;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metric::EPSILON;

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("cannot read symbol file: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed symbol file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("symbol `{0}` declared twice")]
    Duplicate(String),
    #[error("symbol `{name}`: {reason}")]
    Invalid { name: String, reason: String },
    #[error("symbol `{name}` is not non-expansive: |f(x) - f(y)| = {gap} > {input_gap} at x = {x:?}, y = {y:?}")]
    Expansive { name: String, x: Vec<f64>, y: Vec<f64>, gap: f64, input_gap: f64 },
}

/// Evaluator kinds. Only these are accepted from configuration files.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Builtin {
    /// Sum of all arguments.
    Add,
    Sin,
    Cos,
    /// Ignores its arguments.
    Const(f64),
    /// `factor * x`, with `|factor| <= 1`.
    Scale(f64),
    Min,
    Max,
}

impl Builtin {
    fn eval(self, args: &[f64]) -> f64 {
        match self {
            Builtin::Add => args.iter().sum(),
            Builtin::Sin => args[0].sin(),
            Builtin::Cos => args[0].cos(),
            Builtin::Const(c) => c,
            Builtin::Scale(k) => k * args[0],
            Builtin::Min => args.iter().copied().fold(f64::INFINITY, f64::min),
            Builtin::Max => args.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// Closed bounds on the output, when the function is bounded.
    pub fn range(self) -> Option<(f64, f64)> {
        match self {
            Builtin::Sin | Builtin::Cos => Some((-1.0, 1.0)),
            Builtin::Const(c) => Some((c, c)),
            _ => None,
        }
    }

    /// Monotone (non-decreasing or non-increasing) in each argument separately.
    pub fn is_monotone(self) -> bool {
        !matches!(self, Builtin::Sin | Builtin::Cos)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
    pub builtin: Builtin,
}

impl Symbol {
    pub fn eval(&self, args: &[f64]) -> f64 {
        debug_assert_eq!(args.len(), self.arity);
        self.builtin.eval(args)
    }
}

/// Registry of function symbols, frozen after construction.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SymbolRegistry {
    symbols: BTreeMap<String, Symbol>,
}

#[derive(Debug, Serialize, Deserialize)]
struct SymbolFile {
    symbols: Vec<SymbolEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
struct SymbolEntry {
    name: String,
    arity: usize,
    builtin: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    value: Option<f64>,
}

impl SymbolRegistry {
    pub fn empty() -> Self {
        Self::default()
    }

    /// `add`, `sin`, `cos`, `min`, `max` and the constant function `c` (value 7).
    pub fn standard() -> Self {
        let mut reg = Self::empty();
        for (name, arity, builtin) in [
            ("add", 2, Builtin::Add),
            ("sin", 1, Builtin::Sin),
            ("cos", 1, Builtin::Cos),
            ("min", 2, Builtin::Min),
            ("max", 2, Builtin::Max),
            ("c", 1, Builtin::Const(7.0)),
        ] {
            reg.insert(name, arity, builtin).expect("standard symbols are valid");
        }
        reg
    }

    pub fn with(mut self, name: &str, arity: usize, builtin: Builtin) -> Result<Self, RegistryError> {
        self.insert(name, arity, builtin)?;
        Ok(self)
    }

    fn insert(&mut self, name: &str, arity: usize, builtin: Builtin) -> Result<(), RegistryError> {
        let invalid = |reason: &str| RegistryError::Invalid { name: name.to_string(), reason: reason.to_string() };
        if arity == 0 {
            return Err(invalid("arity must be positive"));
        }
        if !is_identifier(name) || name == "let" || name == "in" {
            return Err(invalid("name is not an identifier"));
        }
        match builtin {
            Builtin::Sin | Builtin::Cos | Builtin::Scale(_) if arity != 1 => {
                return Err(invalid("this builtin takes exactly one argument"))
            }
            Builtin::Scale(k) if k.is_nan() || k.abs() > 1.0 => {
                return Err(invalid("scale factor must satisfy |k| <= 1"))
            }
            Builtin::Const(c) if !c.is_finite() => return Err(invalid("constant must be finite")),
            _ => {}
        }
        if self.symbols.contains_key(name) {
            return Err(RegistryError::Duplicate(name.to_string()));
        }
        self.symbols.insert(name.to_string(), Symbol { name: name.to_string(), arity, builtin });
        Ok(())
    }

    /// Parses the JSON configuration format
    /// `{"symbols":[{"name":"sin","arity":1,"builtin":"sin"}, ...]}`.
    pub fn from_json(text: &str) -> Result<Self, RegistryError> {
        let file: SymbolFile = serde_json::from_str(text)?;
        let mut reg = Self::empty();
        for entry in file.symbols {
            let builtin = match (entry.builtin.as_str(), entry.value) {
                ("add", _) => Builtin::Add,
                ("sin", _) => Builtin::Sin,
                ("cos", _) => Builtin::Cos,
                ("min", _) => Builtin::Min,
                ("max", _) => Builtin::Max,
                ("const", Some(v)) => Builtin::Const(v),
                ("scale_le1", Some(v)) => Builtin::Scale(v),
                ("const" | "scale_le1", None) => {
                    return Err(RegistryError::Invalid {
                        name: entry.name,
                        reason: format!("builtin `{}` needs a `value`", entry.builtin),
                    })
                }
                (other, _) => {
                    return Err(RegistryError::Invalid {
                        name: entry.name.clone(),
                        reason: format!("unknown builtin `{other}`"),
                    })
                }
            };
            reg.insert(&entry.name, entry.arity, builtin)?;
        }
        reg.validate_non_expansive(0x5eed, 1000)?;
        Ok(reg)
    }

    pub fn load(path: &Path) -> Result<Self, RegistryError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        let symbols = self
            .symbols
            .values()
            .map(|s| {
                let (builtin, value) = match s.builtin {
                    Builtin::Add => ("add", None),
                    Builtin::Sin => ("sin", None),
                    Builtin::Cos => ("cos", None),
                    Builtin::Min => ("min", None),
                    Builtin::Max => ("max", None),
                    Builtin::Const(v) => ("const", Some(v)),
                    Builtin::Scale(v) => ("scale_le1", Some(v)),
                };
                SymbolEntry { name: s.name.clone(), arity: s.arity, builtin: builtin.to_string(), value }
            })
            .collect();
        serde_json::to_string(&SymbolFile { symbols }).expect("registry serializes")
    }

    pub fn get(&self, name: &str) -> Option<&Symbol> {
        self.symbols.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.symbols.contains_key(name)
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.get(name).map(|s| s.arity)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Symbol> {
        self.symbols.values()
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Checks `|f(x) - f(y)| <= Σ|xi - yi|` on `samples` seeded pairs per symbol.
    pub fn validate_non_expansive(&self, seed: u64, samples: usize) -> Result<(), RegistryError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for sym in self.symbols.values() {
            for i in 0..samples {
                // alternate wide and local draws so both regimes are covered
                let spread = if i % 2 == 0 { 100.0 } else { 1.0 };
                let x: Vec<f64> = (0..sym.arity).map(|_| rng.gen_range(-100.0..100.0)).collect();
                let y: Vec<f64> = x.iter().map(|xi| xi + rng.gen_range(-spread..spread)).collect();
                let gap = (sym.eval(&x) - sym.eval(&y)).abs();
                let input_gap: f64 = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).sum();
                if gap > input_gap + EPSILON {
                    return Err(RegistryError::Expansive { name: sym.name.clone(), x, y, gap, input_gap });
                }
            }
        }
        Ok(())
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_documented_config() {
        let reg = SymbolRegistry::from_json(
            r#"{"symbols":[{"name":"sin","arity":1,"builtin":"sin"},{"name":"c","arity":1,"builtin":"const","value":7.0}]}"#,
        )
        .unwrap();
        assert_eq!(reg.arity("sin"), Some(1));
        assert_eq!(reg.get("c").unwrap().eval(&[123.0]), 7.0);
    }

    #[test]
    fn rejects_unknown_builtins_and_bad_scales() {
        let err = SymbolRegistry::from_json(r#"{"symbols":[{"name":"e","arity":1,"builtin":"exp"}]}"#);
        assert!(matches!(err, Err(RegistryError::Invalid { .. })));
        let err =
            SymbolRegistry::from_json(r#"{"symbols":[{"name":"s","arity":1,"builtin":"scale_le1","value":2.0}]}"#);
        assert!(matches!(err, Err(RegistryError::Invalid { .. })));
    }

    #[test]
    fn rejects_duplicates_and_zero_arity() {
        let dup = r#"{"symbols":[{"name":"a","arity":2,"builtin":"add"},{"name":"a","arity":2,"builtin":"max"}]}"#;
        assert!(matches!(SymbolRegistry::from_json(dup), Err(RegistryError::Duplicate(_))));
        let zero = r#"{"symbols":[{"name":"a","arity":0,"builtin":"add"}]}"#;
        assert!(SymbolRegistry::from_json(zero).is_err());
    }

    #[test]
    fn standard_symbols_are_non_expansive() {
        SymbolRegistry::standard().validate_non_expansive(7, 1000).unwrap();
    }

    #[test]
    fn json_round_trip() {
        let reg = SymbolRegistry::standard().with("s", 1, Builtin::Scale(-0.5)).unwrap();
        assert_eq!(SymbolRegistry::from_json(&reg.to_json()).unwrap(), reg);
    }
}
