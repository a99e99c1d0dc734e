//! Exact `D_φ(P, M)` and `B_φ(P, Q | M)` for finite discrete measures.
//!
//! # Zero masses
//!
//! Measures may have zero masses where the distance keeps a well-defined
//! extended-real limit:
//!
//! * `d_phi`: `p = 0 < m` contributes `m·φ(0)`, `m = 0 < p` contributes
//!   `p·φ*(0)`, and `p = m = 0` contributes nothing.
//! * `b_phi`: with `m > 0`, `p = 0` uses `φ(0)` and `q = 0` uses `φ′₊(0)`;
//!   when `φ′₊(0) = −∞` the tangent at `q/m → 0` diverges to `−∞` and the
//!   term is `+∞`. A vanishing scale mass is only accepted where `p` and `q`
//!   vanish too.
//!
//! All terms are accumulated with compensated summation.

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::generators::Generator;
use crate::sum::{compensated_sum, ExtSum};

/// Tolerance on `|total − 1|` for a measure to count as a probability.
pub const PROBABILITY_TOL: f64 = 1e-12;

/// Finite nonnegative measure on a support `{0, …, d − 1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    masses: Vec<f64>,
    total: f64,
    labels: Option<Vec<String>>,
}

#[derive(Deserialize)]
struct MeasureFile {
    #[serde(default)]
    support: Option<Vec<serde_json::Value>>,
    mass: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(masses: Vec<f64>) -> Result<Self> {
        if masses.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        if let Some((index, &value)) = masses
            .iter()
            .enumerate()
            .find(|(_, m)| !m.is_finite() || **m < 0.0)
        {
            return Err(Error::InvalidMass { index, value });
        }
        let total = compensated_sum(masses.iter().copied());
        if total <= 0.0 {
            return Err(Error::ZeroTotal { total });
        }
        Ok(DiscreteMeasure {
            masses,
            total,
            labels: None,
        })
    }

    /// A measure with total mass one (within [`PROBABILITY_TOL`]). Inputs
    /// farther off are rejected rather than renormalized.
    pub fn probability(masses: Vec<f64>) -> Result<Self> {
        let m = DiscreteMeasure::new(masses)?;
        m.ensure_probability()?;
        Ok(m)
    }

    /// Counting measure with unit mass on each of `d` points.
    pub fn uniform(d: usize) -> Result<Self> {
        DiscreteMeasure::new(vec![1.0; d])
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.masses.len() {
            return Err(Error::SupportMismatch {
                left: labels.len(),
                right: self.masses.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// Parses `{"support": [<labels, optional>], "mass": [<nonnegative decimals>]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: MeasureFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let m = DiscreteMeasure::new(file.mass)?;
        match file.support {
            None => Ok(m),
            Some(labels) => m.with_labels(
                labels
                    .into_iter()
                    .map(|v| match v {
                        serde_json::Value::String(s) => s,
                        other => other.to_string(),
                    })
                    .collect(),
            ),
        }
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn is_probability(&self) -> bool {
        (self.total - 1.0).abs() <= PROBABILITY_TOL
    }

    pub fn ensure_probability(&self) -> Result<()> {
        if self.is_probability() {
            Ok(())
        } else {
            Err(Error::NotNormalized { total: self.total })
        }
    }

    /// Multiplies every mass by `t > 0`.
    pub fn scaled(&self, t: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidParameter(format!("scale factor {t}")));
        }
        let mut out = DiscreteMeasure::new(self.masses.iter().map(|m| m * t).collect())?;
        out.labels = self.labels.clone();
        Ok(out)
    }

    fn check_same_support(&self, other: &DiscreteMeasure) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::SupportMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        if let (Some(a), Some(b)) = (&self.labels, &other.labels) {
            if a != b {
                return Err(Error::Parse("support labels differ".into()));
            }
        }
        Ok(())
    }
}

/// Pointwise integrand `m·φ(p/m)` of the φ-divergence, extended to zeros.
pub fn divergence_term(g: &Generator, p: f64, m: f64) -> Result<ExtReal> {
    if m > 0.0 {
        if p > 0.0 {
            Ok(ExtReal::Finite(m * g.eval(p / m)))
        } else {
            g.at_zero().scale(m)
        }
    } else if p > 0.0 {
        g.adjoint_at_zero().scale(p)
    } else {
        Ok(ExtReal::ZERO)
    }
}

/// Pointwise integrand `m·φ(p/m) − m·φ(q/m) − φ′₊(q/m)·(p − q)` of the scaled
/// Bregman distance, for `m > 0`.
pub fn bregman_term(g: &Generator, p: f64, q: f64, m: f64) -> Result<ExtReal> {
    debug_assert!(m > 0.0);
    if p == q {
        return Ok(ExtReal::ZERO);
    }
    if q > 0.0 {
        let s = q / m;
        let tangent = m * g.eval(s) + g.rderiv(s) * (p - q);
        if p > 0.0 {
            Ok(ExtReal::Finite(m * g.eval(p / m) - tangent))
        } else {
            g.at_zero()
                .scale(m)?
                .checked_add(ExtReal::Finite(-tangent))
        }
    } else {
        // q = 0 < p: tangent at the origin.
        match (g.at_zero(), g.rderiv_at_zero()) {
            (ExtReal::Finite(f0), ExtReal::Finite(d0)) => {
                Ok(ExtReal::Finite(m * g.eval(p / m) - m * f0 - d0 * p))
            }
            (_, ExtReal::NegInf) => Ok(ExtReal::PosInf),
            _ => Err(Error::NotEquivalent { index: 0 }),
        }
    }
}

/// `D_φ(P, M) = Σ m_i φ(p_i/m_i)`.
pub fn d_phi(g: &Generator, p: &DiscreteMeasure, m: &DiscreteMeasure) -> Result<ExtReal> {
    p.check_same_support(m)?;
    let mut acc = ExtSum::new();
    for (&pi, &mi) in p.masses.iter().zip(&m.masses) {
        acc.add(divergence_term(g, pi, mi)?);
    }
    acc.value()
}

/// Scaled Bregman distance `B_φ(P, Q | M)` of probability measures.
pub fn b_phi(
    g: &Generator,
    p: &DiscreteMeasure,
    q: &DiscreteMeasure,
    m: &DiscreteMeasure,
) -> Result<ExtReal> {
    p.ensure_probability()?;
    q.ensure_probability()?;
    scaled_bregman(g, p, q, m)
}

/// The separable scaled Bregman sum for arbitrary finite measures `p, q, m`.
pub fn scaled_bregman(
    g: &Generator,
    p: &DiscreteMeasure,
    q: &DiscreteMeasure,
    m: &DiscreteMeasure,
) -> Result<ExtReal> {
    p.check_same_support(q)?;
    p.check_same_support(m)?;
    let mut acc = ExtSum::new();
    for (i, ((&pi, &qi), &mi)) in p.masses.iter().zip(&q.masses).zip(&m.masses).enumerate() {
        if mi > 0.0 {
            let term = bregman_term(g, pi, qi, mi).map_err(|e| match e {
                Error::NotEquivalent { .. } => Error::NotEquivalent { index: i },
                other => other,
            })?;
            acc.add(term);
        } else if pi > 0.0 || qi > 0.0 {
            return Err(Error::NotEquivalent { index: i });
        }
    }
    acc.value()
}

/// `βP + (1 − β)Q`.
pub fn mixture(p: &DiscreteMeasure, q: &DiscreteMeasure, beta: f64) -> Result<DiscreteMeasure> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::InvalidMixtureWeight { beta });
    }
    p.check_same_support(q)?;
    let masses = p
        .masses
        .iter()
        .zip(&q.masses)
        .map(|(pi, qi)| beta * pi + (1.0 - beta) * qi)
        .collect();
    let mut out = DiscreteMeasure::new(masses)?;
    out.labels = p.labels.clone();
    Ok(out)
}

/// Surjective assignment of source indices `0..d` onto target classes `0..k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeMap {
    assignment: Vec<usize>,
    targets: usize,
}

impl MergeMap {
    pub fn new(assignment: Vec<usize>) -> Result<Self> {
        let targets = match assignment.iter().max() {
            Some(&m) => m + 1,
            None => return Err(Error::InvalidMergeMap("empty assignment".into())),
        };
        let mut hit = vec![false; targets];
        for &j in &assignment {
            hit[j] = true;
        }
        if let Some(j) = hit.iter().position(|h| !h) {
            return Err(Error::InvalidMergeMap(format!("target class {j} has no preimage")));
        }
        Ok(MergeMap {
            assignment,
            targets,
        })
    }

    pub fn identity(d: usize) -> Result<Self> {
        MergeMap::new((0..d).collect())
    }

    /// Sends every index to a single class.
    pub fn collapse(d: usize) -> Result<Self> {
        MergeMap::new(vec![0; d])
    }

    pub fn source_len(&self) -> usize {
        self.assignment.len()
    }

    pub fn target_len(&self) -> usize {
        self.targets
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    fn check_source(&self, p: &DiscreteMeasure) -> Result<()> {
        if p.len() != self.assignment.len() {
            return Err(Error::SupportMismatch {
                left: self.assignment.len(),
                right: p.len(),
            });
        }
        Ok(())
    }

    /// Pushes `p` forward: target mass `j` is the sum over the class of `j`.
    pub fn merge(&self, p: &DiscreteMeasure) -> Result<DiscreteMeasure> {
        self.check_source(p)?;
        let mut classes = vec![Vec::new(); self.targets];
        for (&j, &pi) in self.assignment.iter().zip(&p.masses) {
            classes[j].push(pi);
        }
        DiscreteMeasure::new(classes.into_iter().map(compensated_sum).collect())
    }

    /// True iff `p/m` and `q/m` are constant on every merge class (relative
    /// tolerance `1e-12`), the discrete form of the factorization criterion.
    pub fn is_sufficient(
        &self,
        p: &DiscreteMeasure,
        q: &DiscreteMeasure,
        m: &DiscreteMeasure,
    ) -> Result<bool> {
        self.check_source(p)?;
        p.check_same_support(q)?;
        p.check_same_support(m)?;
        let mut representative: Vec<Option<usize>> = vec![None; self.targets];
        for (i, &j) in self.assignment.iter().enumerate() {
            match representative[j] {
                None => representative[j] = Some(i),
                Some(r) => {
                    if !proportional(p.masses[i], m.masses[i], p.masses[r], m.masses[r])
                        || !proportional(q.masses[i], m.masses[i], q.masses[r], m.masses[r])
                    {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }
}

// a/b == c/d via cross products.
fn proportional(a: f64, b: f64, c: f64, d: f64) -> bool {
    let lhs = a * d;
    let rhs = c * b;
    (lhs - rhs).abs() <= 1e-12 * lhs.abs().max(rhs.abs())
}

/// Lower bound `M(𝒳)·φ(1/M(𝒳)) ≤ D_φ(P, M)` for probability `P`.
pub fn lemma1_lower_bound(g: &Generator, m: &DiscreteMeasure) -> ExtReal {
    let total = m.total();
    ExtReal::Finite(total * g.eval(1.0 / total))
}
