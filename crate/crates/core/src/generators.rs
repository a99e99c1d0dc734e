//! Convex generators `φ: (0, ∞) → ℝ` with `φ(1) = 0`.
//!
//! A generator carries, besides its values on `(0, ∞)`, the boundary data the
//! distance formulas need when a density vanishes:
//!
//! | quantity | meaning |
//! |---|---|
//! | `at_zero` | `φ(0) = lim_{t↓0} φ(t)` |
//! | `rderiv_at_zero` | `φ′₊(0)` |
//! | `adjoint_at_zero` | `φ*(0) = lim_{t→∞} φ(t)/t` |
//! | `adjoint_rderiv_at_zero` | `φ*′₊(0) = lim_{s→∞} φ(s) − s·φ′₊(s)` |
//!
//! The adjoint is `φ*(t) = t·φ(1/t)`. Built-ins:
//!
//! | name | `φ(t)` |
//! |---|---|
//! | `kl` | `t ln t` |
//! | `rkl` | `−ln t` |
//! | `tv` | `|t − 1|` |
//! | `pearson` | `(t − 1)²` |
//! | `lecam` | `(t − 1)²/(t + 1)` |
//! | `power:α` | `(t^α − 1)/(α(α − 1))`, `α ∉ {0, 1}` |

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::extreal::ExtReal;

/// Power indices closer than this to 0 or 1 are routed to the logarithmic
/// limit generators.
pub const ALPHA_ROUTING_EPS: f64 = 1e-9;

/// A convex function on `(0, ∞)` normalized by `φ(1) = 0`.
///
/// `eval`, `rderiv` and `lderiv` are only called with `t > 0`; the values at
/// the boundary go through the `*_at_zero` methods.
pub trait ConvexFunction: Send + Sync {
    fn eval(&self, t: f64) -> f64;

    /// Right-hand derivative `φ′₊(t)`.
    fn rderiv(&self, t: f64) -> f64;

    /// Left-hand derivative `φ′₋(t)`. Equal to `rderiv` away from kinks.
    fn lderiv(&self, t: f64) -> f64 {
        self.rderiv(t)
    }

    fn at_zero(&self) -> ExtReal;
    fn rderiv_at_zero(&self) -> ExtReal;
    fn adjoint_at_zero(&self) -> ExtReal;
    fn adjoint_rderiv_at_zero(&self) -> ExtReal;
    fn label(&self) -> String;
}

/// Shared, immutable handle to a convex generator.
#[derive(Clone)]
pub struct Generator(Arc<dyn ConvexFunction>);

impl Generator {
    /// `φ_α(t) = (t^α − 1)/(α(α − 1))`.
    pub fn power(alpha: f64) -> Result<Generator> {
        if !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!("power index {alpha}")));
        }
        if alpha == 0.0 || alpha == 1.0 {
            return Err(Error::ReservedPowerIndex { alpha });
        }
        Ok(Generator(Arc::new(Power { alpha })))
    }

    /// Power generator for all real `α`, with `α ≈ 1` mapped to [`Generator::kl`]
    /// and `α ≈ 0` to [`Generator::reverse_kl`].
    pub fn power_or_limit(alpha: f64) -> Result<Generator> {
        if (alpha - 1.0).abs() < ALPHA_ROUTING_EPS {
            Ok(Generator::kl())
        } else if alpha.abs() < ALPHA_ROUTING_EPS {
            Ok(Generator::reverse_kl())
        } else {
            Generator::power(alpha)
        }
    }

    pub fn kl() -> Generator {
        Generator(Arc::new(Kl))
    }

    pub fn reverse_kl() -> Generator {
        Generator(Arc::new(ReverseKl))
    }

    pub fn total_variation() -> Generator {
        Generator(Arc::new(TotalVariation))
    }

    pub fn pearson() -> Generator {
        Generator(Arc::new(Pearson))
    }

    pub fn lecam() -> Generator {
        Generator(Arc::new(LeCam))
    }

    /// All built-in generators, with a few representative power indices.
    pub fn builtins() -> Vec<Generator> {
        let mut out = vec![
            Generator::kl(),
            Generator::reverse_kl(),
            Generator::total_variation(),
            Generator::pearson(),
            Generator::lecam(),
        ];
        for alpha in [-1.0, 0.5, 2.0, 3.0] {
            out.push(Generator::power(alpha).expect("valid power index"));
        }
        out
    }

    /// Wraps a user-supplied function after sampled checks of normalization
    /// and convexity (see [`check_convexity`]).
    pub fn custom<F: ConvexFunction + 'static>(f: F) -> Result<Generator> {
        let g = Generator(Arc::new(f));
        check_convexity(&g)?;
        Ok(g)
    }

    /// `φ*(t) = t·φ(1/t)` with the boundary data swapped accordingly.
    pub fn adjoint(&self) -> Generator {
        Generator(Arc::new(Adjoint(self.clone())))
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.0.eval(t)
    }

    pub fn rderiv(&self, t: f64) -> f64 {
        self.0.rderiv(t)
    }

    pub fn lderiv(&self, t: f64) -> f64 {
        self.0.lderiv(t)
    }

    pub fn at_zero(&self) -> ExtReal {
        self.0.at_zero()
    }

    pub fn rderiv_at_zero(&self) -> ExtReal {
        self.0.rderiv_at_zero()
    }

    pub fn adjoint_at_zero(&self) -> ExtReal {
        self.0.adjoint_at_zero()
    }

    pub fn adjoint_rderiv_at_zero(&self) -> ExtReal {
        self.0.adjoint_rderiv_at_zero()
    }

    pub fn label(&self) -> String {
        self.0.label()
    }

    /// `φ(t)` for `t ≥ 0`, using the boundary value at `t = 0`.
    pub fn eval_ext(&self, t: f64) -> ExtReal {
        if t == 0.0 {
            self.at_zero()
        } else {
            ExtReal::Finite(self.eval(t))
        }
    }

    /// `φ′₊(t)` for `t ≥ 0`.
    pub fn rderiv_ext(&self, t: f64) -> ExtReal {
        if t == 0.0 {
            self.rderiv_at_zero()
        } else {
            ExtReal::Finite(self.rderiv(t))
        }
    }
}

impl fmt::Debug for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Generator").field(&self.label()).finish()
    }
}

impl FromStr for Generator {
    type Err = Error;

    /// Parses `kl | rkl | tv | pearson | lecam | power:<alpha>`.
    fn from_str(s: &str) -> Result<Generator> {
        match s.trim() {
            "kl" => Ok(Generator::kl()),
            "rkl" => Ok(Generator::reverse_kl()),
            "tv" => Ok(Generator::total_variation()),
            "pearson" => Ok(Generator::pearson()),
            "lecam" => Ok(Generator::lecam()),
            other => {
                let alpha = other
                    .strip_prefix("power:")
                    .ok_or_else(|| Error::Parse(format!("unknown generator `{other}`")))?;
                let alpha: f64 = alpha
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad power index `{alpha}`")))?;
                Generator::power(alpha)
            }
        }
    }
}

/// Sampled validation of a generator on a log-spaced grid of `(0, ∞)`:
/// `φ(1) = 0`, three-point convexity with slack `1e-12·(1 + |φ(a)| + |φ(c)|)`,
/// and monotone right derivative.
pub fn check_convexity(g: &Generator) -> Result<()> {
    if g.eval(1.0) != 0.0 {
        return Err(Error::InvalidGenerator(format!(
            "{}: phi(1) = {} != 0",
            g.label(),
            g.eval(1.0)
        )));
    }
    let grid: Vec<f64> = (0..=240).map(|k| 10f64.powf(-6.0 + k as f64 * 0.05)).collect();
    for w in grid.windows(3) {
        let (a, b, c) = (w[0], w[1], w[2]);
        let (fa, fb, fc) = (g.eval(a), g.eval(b), g.eval(c));
        let chord = ((c - b) * fa + (b - a) * fc) / (c - a);
        if fb > chord + 1e-12 * (1.0 + fa.abs() + fc.abs()) {
            return Err(Error::InvalidGenerator(format!(
                "{}: not convex near t = {b}",
                g.label()
            )));
        }
        if g.rderiv(b) < g.rderiv(a) - 1e-12 * (1.0 + g.rderiv(a).abs()) {
            return Err(Error::InvalidGenerator(format!(
                "{}: right derivative decreases near t = {b}",
                g.label()
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy)]
struct Power {
    alpha: f64,
}

impl ConvexFunction for Power {
    fn eval(&self, t: f64) -> f64 {
        let a = self.alpha;
        (t.powf(a) - 1.0) / (a * (a - 1.0))
    }

    fn rderiv(&self, t: f64) -> f64 {
        let a = self.alpha;
        t.powf(a - 1.0) / (a - 1.0)
    }

    fn at_zero(&self) -> ExtReal {
        let a = self.alpha;
        if a > 0.0 {
            ExtReal::Finite(-1.0 / (a * (a - 1.0)))
        } else {
            ExtReal::PosInf
        }
    }

    fn rderiv_at_zero(&self) -> ExtReal {
        if self.alpha > 1.0 {
            ExtReal::ZERO
        } else {
            ExtReal::NegInf
        }
    }

    fn adjoint_at_zero(&self) -> ExtReal {
        if self.alpha < 1.0 {
            ExtReal::ZERO
        } else {
            ExtReal::PosInf
        }
    }

    fn adjoint_rderiv_at_zero(&self) -> ExtReal {
        // φ(s) − sφ′(s) = −s^α/α − 1/(α(α−1))
        let a = self.alpha;
        if a < 0.0 {
            ExtReal::Finite(-1.0 / (a * (a - 1.0)))
        } else {
            ExtReal::NegInf
        }
    }

    fn label(&self) -> String {
        format!("power:{}", self.alpha)
    }
}

#[derive(Debug, Clone, Copy)]
struct Kl;

impl ConvexFunction for Kl {
    fn eval(&self, t: f64) -> f64 {
        t * t.ln()
    }

    fn rderiv(&self, t: f64) -> f64 {
        t.ln() + 1.0
    }

    fn at_zero(&self) -> ExtReal {
        ExtReal::ZERO
    }

    fn rderiv_at_zero(&self) -> ExtReal {
        ExtReal::NegInf
    }

    fn adjoint_at_zero(&self) -> ExtReal {
        ExtReal::PosInf
    }

    fn adjoint_rderiv_at_zero(&self) -> ExtReal {
        ExtReal::NegInf
    }

    fn label(&self) -> String {
        "kl".into()
    }
}

#[derive(Debug, Clone, Copy)]
struct ReverseKl;

impl ConvexFunction for ReverseKl {
    fn eval(&self, t: f64) -> f64 {
        -t.ln()
    }

    fn rderiv(&self, t: f64) -> f64 {
        -1.0 / t
    }

    fn at_zero(&self) -> ExtReal {
        ExtReal::PosInf
    }

    fn rderiv_at_zero(&self) -> ExtReal {
        ExtReal::NegInf
    }

    fn adjoint_at_zero(&self) -> ExtReal {
        ExtReal::ZERO
    }

    fn adjoint_rderiv_at_zero(&self) -> ExtReal {
        ExtReal::NegInf
    }

    fn label(&self) -> String {
        "rkl".into()
    }
}

#[derive(Debug, Clone, Copy)]
struct TotalVariation;

impl ConvexFunction for TotalVariation {
    fn eval(&self, t: f64) -> f64 {
        (t - 1.0).abs()
    }

    fn rderiv(&self, t: f64) -> f64 {
        if t < 1.0 {
            -1.0
        } else {
            1.0
        }
    }

    fn lderiv(&self, t: f64) -> f64 {
        if t <= 1.0 {
            -1.0
        } else {
            1.0
        }
    }

    fn at_zero(&self) -> ExtReal {
        ExtReal::Finite(1.0)
    }

    fn rderiv_at_zero(&self) -> ExtReal {
        ExtReal::Finite(-1.0)
    }

    fn adjoint_at_zero(&self) -> ExtReal {
        ExtReal::Finite(1.0)
    }

    fn adjoint_rderiv_at_zero(&self) -> ExtReal {
        ExtReal::Finite(-1.0)
    }

    fn label(&self) -> String {
        "tv".into()
    }
}

#[derive(Debug, Clone, Copy)]
struct Pearson;

impl ConvexFunction for Pearson {
    fn eval(&self, t: f64) -> f64 {
        (t - 1.0) * (t - 1.0)
    }

    fn rderiv(&self, t: f64) -> f64 {
        2.0 * (t - 1.0)
    }

    fn at_zero(&self) -> ExtReal {
        ExtReal::Finite(1.0)
    }

    fn rderiv_at_zero(&self) -> ExtReal {
        ExtReal::Finite(-2.0)
    }

    fn adjoint_at_zero(&self) -> ExtReal {
        ExtReal::PosInf
    }

    fn adjoint_rderiv_at_zero(&self) -> ExtReal {
        ExtReal::NegInf
    }

    fn label(&self) -> String {
        "pearson".into()
    }
}

#[derive(Debug, Clone, Copy)]
struct LeCam;

impl ConvexFunction for LeCam {
    fn eval(&self, t: f64) -> f64 {
        (t - 1.0) * (t - 1.0) / (t + 1.0)
    }

    fn rderiv(&self, t: f64) -> f64 {
        (t - 1.0) * (t + 3.0) / ((t + 1.0) * (t + 1.0))
    }

    fn at_zero(&self) -> ExtReal {
        ExtReal::Finite(1.0)
    }

    fn rderiv_at_zero(&self) -> ExtReal {
        ExtReal::Finite(-3.0)
    }

    fn adjoint_at_zero(&self) -> ExtReal {
        ExtReal::Finite(1.0)
    }

    fn adjoint_rderiv_at_zero(&self) -> ExtReal {
        ExtReal::Finite(-3.0)
    }

    fn label(&self) -> String {
        "lecam".into()
    }
}

struct Adjoint(Generator);

impl ConvexFunction for Adjoint {
    fn eval(&self, t: f64) -> f64 {
        t * self.0.eval(1.0 / t)
    }

    // d/dt [t φ(1/t)] = φ(1/t) − φ′(1/t)/t; moving right in t moves left in 1/t.
    fn rderiv(&self, t: f64) -> f64 {
        let s = 1.0 / t;
        self.0.eval(s) - self.0.lderiv(s) * s
    }

    fn lderiv(&self, t: f64) -> f64 {
        let s = 1.0 / t;
        self.0.eval(s) - self.0.rderiv(s) * s
    }

    fn at_zero(&self) -> ExtReal {
        self.0.adjoint_at_zero()
    }

    fn rderiv_at_zero(&self) -> ExtReal {
        self.0.adjoint_rderiv_at_zero()
    }

    fn adjoint_at_zero(&self) -> ExtReal {
        self.0.at_zero()
    }

    fn adjoint_rderiv_at_zero(&self) -> ExtReal {
        self.0.rderiv_at_zero()
    }

    fn label(&self) -> String {
        format!("adjoint({})", self.0.label())
    }
}
