//! Extended real numbers `ℝ ∪ {+∞, −∞}`.
//!
//! Divergences are legitimately infinite for some inputs, so every quantity
//! that may diverge is carried as an [`ExtReal`]. Adding opposite infinities
//! is reported as [`Error::Indeterminate`] instead of producing NaN.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Largest argument for which `exp` stays finite in `f64`.
pub const EXP_OVERFLOW: f64 = 709.782_712_893_384;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    NegInf,
    Finite(f64),
    PosInf,
}

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal::Finite(0.0);

    /// Maps `±inf` to the matching infinity. Returns `None` for NaN.
    pub fn from_f64(x: f64) -> Option<ExtReal> {
        if x.is_nan() {
            None
        } else if x == f64::INFINITY {
            Some(ExtReal::PosInf)
        } else if x == f64::NEG_INFINITY {
            Some(ExtReal::NegInf)
        } else {
            Some(ExtReal::Finite(x))
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(x) => Some(x),
            _ => None,
        }
    }

    /// Lossy conversion to `f64`, infinities included.
    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::NegInf => f64::NEG_INFINITY,
            ExtReal::Finite(x) => x,
            ExtReal::PosInf => f64::INFINITY,
        }
    }

    pub fn checked_add(self, other: ExtReal) -> Result<ExtReal> {
        use ExtReal::*;
        match (self, other) {
            (PosInf, NegInf) | (NegInf, PosInf) => Err(Error::Indeterminate),
            (PosInf, _) | (_, PosInf) => Ok(PosInf),
            (NegInf, _) | (_, NegInf) => Ok(NegInf),
            (Finite(a), Finite(b)) => Ok(ExtReal::from_f64(a + b).unwrap_or(PosInf)),
        }
    }

    /// Multiplication by a finite scalar. `0 · ∞` is indeterminate.
    pub fn scale(self, c: f64) -> Result<ExtReal> {
        match self {
            ExtReal::Finite(x) => ExtReal::from_f64(c * x).ok_or(Error::Indeterminate),
            inf if c > 0.0 => Ok(inf),
            inf if c < 0.0 => Ok(-inf),
            _ => Err(Error::Indeterminate),
        }
    }

    /// `exp` with overflow mapped to `+∞` and `exp(−∞) = 0`.
    pub fn exp(self) -> ExtReal {
        match self {
            ExtReal::NegInf => ExtReal::ZERO,
            ExtReal::PosInf => ExtReal::PosInf,
            ExtReal::Finite(x) if x > EXP_OVERFLOW => ExtReal::PosInf,
            ExtReal::Finite(x) => ExtReal::Finite(x.exp()),
        }
    }

    /// `exp(x) − 1`, accurate near zero.
    pub fn exp_m1(self) -> ExtReal {
        match self {
            ExtReal::NegInf => ExtReal::Finite(-1.0),
            ExtReal::PosInf => ExtReal::PosInf,
            ExtReal::Finite(x) if x > EXP_OVERFLOW => ExtReal::PosInf,
            ExtReal::Finite(x) => ExtReal::Finite(x.exp_m1()),
        }
    }
}

impl std::ops::Neg for ExtReal {
    type Output = ExtReal;

    fn neg(self) -> ExtReal {
        match self {
            ExtReal::NegInf => ExtReal::PosInf,
            ExtReal::Finite(x) => ExtReal::Finite(-x),
            ExtReal::PosInf => ExtReal::NegInf,
        }
    }
}

impl From<f64> for ExtReal {
    /// Panics on NaN; use [`ExtReal::from_f64`] for untrusted values.
    fn from(x: f64) -> Self {
        ExtReal::from_f64(x).expect("NaN is not an extended real")
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.to_f64().partial_cmp(&other.to_f64())
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::NegInf => f.write_str("-inf"),
            ExtReal::PosInf => f.write_str("inf"),
            ExtReal::Finite(x) => f.write_str(&format_f64(*x)),
        }
    }
}

/// Shortest decimal string that parses back to exactly `x`.
///
/// Plain notation in `[1e-5, 1e16)`, scientific notation outside it. Always
/// uses `.` as decimal separator.
pub fn format_f64(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let a = x.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}
