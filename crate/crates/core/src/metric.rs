//! Extended non-negative reals and interval enclosures of metric values.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use serde::ser::Serializer;
use serde::Serialize;

/// Tolerance used for every metric comparison in the crate.
pub const EPSILON: f64 = 1e-9;

/// A distance in `[0, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    Infinity,
}

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal::Finite(0.0);

    /// Builds a finite distance; negative zero and tiny negative rounding noise clamp to 0.
    pub fn finite(x: f64) -> ExtReal {
        assert!(!x.is_nan(), "distance must not be NaN");
        if x.is_infinite() {
            return ExtReal::Infinity;
        }
        ExtReal::Finite(if x <= 0.0 { 0.0 } else { x })
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn as_f64(self) -> f64 {
        match self {
            ExtReal::Finite(x) => x,
            ExtReal::Infinity => f64::INFINITY,
        }
    }

    /// `self ≤ other` up to [`EPSILON`].
    pub fn approx_le(self, other: ExtReal) -> bool {
        match (self, other) {
            (_, ExtReal::Infinity) => true,
            (ExtReal::Infinity, ExtReal::Finite(_)) => false,
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a <= b + EPSILON,
        }
    }

    pub fn approx_eq(self, other: ExtReal) -> bool {
        self.approx_le(other) && other.approx_le(self)
    }

    pub fn max(self, other: ExtReal) -> ExtReal {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn min(self, other: ExtReal) -> ExtReal {
        if self <= other {
            self
        } else {
            other
        }
    }

    /// Truncated subtraction `max(self - other, 0)`; `∞ - ∞` is taken as 0.
    pub fn saturating_sub(self, other: ExtReal) -> ExtReal {
        match (self, other) {
            (ExtReal::Infinity, ExtReal::Finite(_)) => ExtReal::Infinity,
            (_, ExtReal::Infinity) => ExtReal::ZERO,
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::finite(a - b),
        }
    }

    pub fn sum<I: IntoIterator<Item = ExtReal>>(items: I) -> ExtReal {
        items.into_iter().fold(ExtReal::ZERO, |acc, x| acc + x)
    }
}

impl Default for ExtReal {
    fn default() -> Self {
        ExtReal::ZERO
    }
}

impl From<f64> for ExtReal {
    fn from(x: f64) -> Self {
        ExtReal::finite(x)
    }
}

impl Add for ExtReal {
    type Output = ExtReal;

    fn add(self, rhs: ExtReal) -> ExtReal {
        match (self, rhs) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::finite(a + b),
            _ => ExtReal::Infinity,
        }
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Eq for ExtReal {}

impl Ord for ExtReal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtReal::Infinity, ExtReal::Infinity) => Ordering::Equal,
            (ExtReal::Infinity, _) => Ordering::Greater,
            (_, ExtReal::Infinity) => Ordering::Less,
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a.total_cmp(b),
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(x) => write!(f, "{x}"),
            ExtReal::Infinity => f.write_str("inf"),
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtReal::Finite(x) => serializer.serialize_f64(*x),
            ExtReal::Infinity => serializer.serialize_str("inf"),
        }
    }
}

/// Why a bound in a [`DistInterval`] holds.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Evidence {
    /// Closed-form reason, e.g. a one-point codomain or an exact evaluation.
    Rule { name: String },
    /// Indices into a deterministic probe battery: the environment point and
    /// the argument chosen at every arrow, in depth-first order.
    Probe { env: usize, args: Vec<usize> },
    /// For every output wire, the concrete input tuple at which its gap was
    /// observed (unit wires are written as 0).
    Wires { inputs: Vec<Vec<f64>> },
    /// An equational certificate of the given size was checked.
    Certificate { r: ExtReal },
}

impl Evidence {
    pub fn rule(name: impl Into<String>) -> Evidence {
        Evidence::Rule { name: name.into() }
    }
}

/// Sound enclosure `[lo, hi]` of a metric value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistInterval {
    pub lo: ExtReal,
    pub hi: ExtReal,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lo_witness: Option<Evidence>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hi_certificate: Option<Evidence>,
}

impl DistInterval {
    pub fn new(lo: ExtReal, hi: ExtReal) -> DistInterval {
        debug_assert!(lo.approx_le(hi), "interval [{lo}, {hi}] is empty");
        DistInterval { lo, hi, lo_witness: None, hi_certificate: None }
    }

    pub fn exact(value: ExtReal, why: Evidence) -> DistInterval {
        DistInterval { lo: value, hi: value, lo_witness: Some(why.clone()), hi_certificate: Some(why) }
    }

    pub fn unknown() -> DistInterval {
        DistInterval::new(ExtReal::ZERO, ExtReal::Infinity)
    }

    pub fn with_lo_witness(mut self, w: Evidence) -> Self {
        self.lo_witness = Some(w);
        self
    }

    pub fn with_hi_certificate(mut self, c: Evidence) -> Self {
        self.hi_certificate = Some(c);
        self
    }

    /// Pulls a lower bound that overshoots the upper one by no more than
    /// float rounding back onto it.
    pub fn snap(mut self) -> Self {
        if self.lo > self.hi && self.lo.approx_le(self.hi) {
            self.lo = self.hi;
        }
        self
    }

    pub fn is_exact(&self) -> bool {
        self.hi.approx_le(self.lo)
    }

    pub fn contains(&self, x: ExtReal) -> bool {
        self.lo.approx_le(x) && x.approx_le(self.hi)
    }

    /// Interval sum, used when adding independent wire distances.
    pub fn plus(&self, other: &DistInterval) -> DistInterval {
        DistInterval::new(self.lo + other.lo, self.hi + other.hi)
    }
}

impl fmt::Display for DistInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinity_absorbs_addition() {
        assert_eq!(ExtReal::Infinity + ExtReal::finite(3.0), ExtReal::Infinity);
        assert_eq!(ExtReal::finite(1.5) + ExtReal::finite(2.0), ExtReal::finite(3.5));
    }

    #[test]
    fn total_order_puts_infinity_last() {
        let mut xs = vec![ExtReal::Infinity, ExtReal::finite(2.0), ExtReal::ZERO];
        xs.sort();
        assert_eq!(xs, vec![ExtReal::ZERO, ExtReal::finite(2.0), ExtReal::Infinity]);
    }

    #[test]
    fn approx_comparisons_use_epsilon() {
        assert!(ExtReal::finite(1.0 + 1e-12).approx_le(ExtReal::finite(1.0)));
        assert!(!ExtReal::finite(1.1).approx_le(ExtReal::finite(1.0)));
        assert!(!ExtReal::Infinity.approx_le(ExtReal::finite(1e300)));
    }

    #[test]
    fn serializes_infinity_as_string() {
        let s = serde_json::to_string(&vec![ExtReal::finite(1.0), ExtReal::Infinity]).unwrap();
        assert_eq!(s, "[1.0,\"inf\"]");
    }

    #[test]
    fn saturating_sub_clamps() {
        assert_eq!(ExtReal::finite(1.0).saturating_sub(ExtReal::finite(3.0)), ExtReal::ZERO);
        assert_eq!(ExtReal::Infinity.saturating_sub(ExtReal::finite(3.0)), ExtReal::Infinity);
    }
}
