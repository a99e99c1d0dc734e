//! Closed-form power divergences and scaled Bregman distances inside an
//! exponential family `p_θ(x) = exp{x·θ − b(θ)}`.
//!
//! Everything is expressed through the cumulant `b` via
//!
//! ```text
//! ρ_α(θ₁, θ₂)     = b(αθ₁ + (1−α)θ₂) − αb(θ₁) − (1−α)b(θ₂)
//! σ_α(θ₀, θ₁, θ₂) = b(θ₁ + (1−α)(θ₀ − θ₂)) − αb(θ₁) − (1−α)[b(θ₁) − b(θ₂) + b(θ₀)]
//! D_α(θ₁, θ₂)     = (e^{ρ_α(θ₁,θ₂)} − 1) / (α(α−1))
//! B_α(θ₁, θ₂|θ₀)  = e^{ρ_α(θ₁,θ₀)}/(α(α−1)) + e^{ρ_α(θ₂,θ₀)}/α + e^{σ_α(θ₀,θ₁,θ₂)}/(1−α)
//! ```
//!
//! together with the limits at `α ∈ {0, 1}`. The three coefficients of `B_α`
//! sum to zero, so it is evaluated as a sum of `expm1` terms.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::generators::ALPHA_ROUTING_EPS;

/// Position of a natural parameter relative to `Θ = {θ : b(θ) < ∞}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainClass {
    Interior,
    /// In `Θ` but not in its interior.
    Boundary,
    Outside,
}

impl DomainClass {
    pub fn in_domain(self) -> bool {
        self != DomainClass::Outside
    }
}

/// Cumulant function of an exponential family.
///
/// `value` is only called for parameters that `classify` places inside `Θ`.
pub trait Cumulant: Send + Sync {
    fn dim(&self) -> usize;
    fn value(&self, theta: &[f64]) -> f64;
    fn classify(&self, theta: &[f64]) -> DomainClass;

    /// Analytic gradient, if available. Central differences are used otherwise.
    fn gradient(&self, _theta: &[f64]) -> Option<Vec<f64>> {
        None
    }

    fn name(&self) -> String;
}

/// Natural parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub struct NaturalParam(pub Vec<f64>);

impl NaturalParam {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<f64> for NaturalParam {
    fn from(x: f64) -> Self {
        NaturalParam(vec![x])
    }
}

impl From<Vec<f64>> for NaturalParam {
    fn from(v: Vec<f64>) -> Self {
        NaturalParam(v)
    }
}

impl From<&[f64]> for NaturalParam {
    fn from(v: &[f64]) -> Self {
        NaturalParam(v.to_vec())
    }
}

impl<const N: usize> From<[f64; N]> for NaturalParam {
    fn from(v: [f64; N]) -> Self {
        NaturalParam(v.to_vec())
    }
}

/// An exponential family, identified by its cumulant function.
#[derive(Clone)]
pub struct ExpFamily {
    cumulant: Arc<dyn Cumulant>,
}

impl fmt::Debug for ExpFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("ExpFamily").field(&self.cumulant.name()).finish()
    }
}

fn lincomb(a: f64, x: &[f64], b: f64, y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(xi, yi)| a * xi + b * yi).collect()
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn alpha_is_zero(alpha: f64) -> bool {
    alpha.abs() < ALPHA_ROUTING_EPS
}

fn alpha_is_one(alpha: f64) -> bool {
    (alpha - 1.0).abs() < ALPHA_ROUTING_EPS
}

impl ExpFamily {
    pub fn new<C: Cumulant + 'static>(cumulant: C) -> Self {
        ExpFamily {
            cumulant: Arc::new(cumulant),
        }
    }

    pub fn dim(&self) -> usize {
        self.cumulant.dim()
    }

    pub fn name(&self) -> String {
        self.cumulant.name()
    }

    fn check_dim(&self, theta: &NaturalParam) -> Result<()> {
        if theta.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: theta.len(),
            });
        }
        Ok(())
    }

    pub fn in_domain(&self, theta: &NaturalParam) -> Result<DomainClass> {
        self.check_dim(theta)?;
        Ok(self.cumulant.classify(theta.as_slice()))
    }

    pub fn in_interior(&self, theta: &NaturalParam) -> Result<bool> {
        Ok(self.in_domain(theta)? == DomainClass::Interior)
    }

    /// `b(θ)`, `+∞` outside `Θ`.
    pub fn cumulant(&self, theta: &NaturalParam) -> Result<ExtReal> {
        self.check_dim(theta)?;
        Ok(self.cumulant_raw(theta.as_slice()))
    }

    fn cumulant_raw(&self, theta: &[f64]) -> ExtReal {
        if self.cumulant.classify(theta).in_domain() {
            ExtReal::from_f64(self.cumulant.value(theta)).unwrap_or(ExtReal::PosInf)
        } else {
            ExtReal::PosInf
        }
    }

    fn finite_cumulant(&self, theta: &[f64], what: &str) -> Result<f64> {
        match self.cumulant_raw(theta) {
            ExtReal::Finite(v) => Ok(v),
            _ => Err(Error::OutsideDomain(format!("{what} = {theta:?} for {}", self.name()))),
        }
    }

    fn require_domain(&self, theta: &NaturalParam, what: &str) -> Result<f64> {
        self.check_dim(theta)?;
        self.finite_cumulant(theta.as_slice(), what)
    }

    fn require_interior(&self, theta: &NaturalParam, what: &str) -> Result<()> {
        self.check_dim(theta)?;
        match self.cumulant.classify(theta.as_slice()) {
            DomainClass::Interior => Ok(()),
            DomainClass::Boundary => Err(Error::NotInterior(format!(
                "{what} = {:?} lies on the boundary for {}",
                theta.0,
                self.name()
            ))),
            DomainClass::Outside => Err(Error::OutsideDomain(format!(
                "{what} = {:?} for {}",
                theta.0,
                self.name()
            ))),
        }
    }

    /// `∇b(θ)` at an interior point.
    pub fn grad_cumulant(&self, theta: &NaturalParam) -> Result<Vec<f64>> {
        self.require_interior(theta, "theta")?;
        let th = theta.as_slice();
        if let Some(g) = self.cumulant.gradient(th) {
            return Ok(g);
        }
        Ok(self.finite_difference_gradient(th))
    }

    /// Central differences with step `max(1e-6, 1e-8·|θ_k|)`.
    pub fn finite_difference_gradient(&self, theta: &[f64]) -> Vec<f64> {
        (0..theta.len())
            .map(|k| {
                let h = (1e-8 * theta[k].abs()).max(1e-6);
                let mut up = theta.to_vec();
                let mut dn = theta.to_vec();
                up[k] += h;
                dn[k] -= h;
                (self.cumulant.value(&up) - self.cumulant.value(&dn)) / (2.0 * h)
            })
            .collect()
    }

    /// Family with cumulant `b(θ) + c + v·θ`.
    pub fn shift(&self, c: f64, v: Vec<f64>) -> Result<ExpFamily> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: v.len(),
            });
        }
        Ok(ExpFamily::new(Shifted {
            inner: self.clone(),
            c,
            v,
        }))
    }

    /// `ρ_α(θ₁, θ₂)`; `+∞` when `αθ₁ + (1−α)θ₂ ∉ Θ`.
    pub fn rho_alpha(&self, alpha: f64, th1: &NaturalParam, th2: &NaturalParam) -> Result<ExtReal> {
        let b1 = self.require_domain(th1, "theta1")?;
        let b2 = self.require_domain(th2, "theta2")?;
        let mid = lincomb(alpha, th1.as_slice(), 1.0 - alpha, th2.as_slice());
        self.cumulant_raw(&mid)
            .checked_add(ExtReal::Finite(-alpha * b1 - (1.0 - alpha) * b2))
    }

    /// `σ_α(θ₀, θ₁, θ₂) = σ^I − σ^II`; `+∞` when `σ^I` is.
    pub fn sigma_alpha(
        &self,
        alpha: f64,
        th0: &NaturalParam,
        th1: &NaturalParam,
        th2: &NaturalParam,
    ) -> Result<ExtReal> {
        let b0 = self.require_domain(th0, "theta0")?;
        let b1 = self.require_domain(th1, "theta1")?;
        let b2 = self.require_domain(th2, "theta2")?;
        let shifted = lincomb(1.0, th0.as_slice(), -1.0, th2.as_slice());
        let point = lincomb(1.0, th1.as_slice(), 1.0 - alpha, &shifted);
        let sigma_two = alpha * b1 + (1.0 - alpha) * (b1 - b2 + b0);
        self.cumulant_raw(&point)
            .checked_add(ExtReal::Finite(-sigma_two))
    }

    /// Rényi-type divergence `ρ_α/(α(α−1))`.
    pub fn renyi_alpha(&self, alpha: f64, th1: &NaturalParam, th2: &NaturalParam) -> Result<ExtReal> {
        if alpha_is_zero(alpha) || alpha_is_one(alpha) {
            return Err(Error::InvalidParameter(format!(
                "renyi_alpha needs alpha outside {{0, 1}}, got {alpha}"
            )));
        }
        self.rho_alpha(alpha, th1, th2)?.scale(1.0 / (alpha * (alpha - 1.0)))
    }

    /// Power divergence `D_α(P_θ₁, P_θ₂)`; routed to [`Self::d_zero`] /
    /// [`Self::d_one`] for `α` within `1e-9` of 0 or 1.
    pub fn d_alpha(&self, alpha: f64, th1: &NaturalParam, th2: &NaturalParam) -> Result<ExtReal> {
        if alpha_is_zero(alpha) {
            return self.d_zero(th1, th2);
        }
        if alpha_is_one(alpha) {
            return self.d_one(th1, th2);
        }
        let rho = self.rho_alpha(alpha, th1, th2)?;
        rho.exp_m1().scale(1.0 / (alpha * (alpha - 1.0)))
    }

    /// `D_0(θ₁, θ₂) = b(θ₁) − b(θ₂) − ∇b(θ₂)·(θ₁ − θ₂)`, the classical Bregman
    /// distance of the cumulant.
    pub fn d_zero(&self, th1: &NaturalParam, th2: &NaturalParam) -> Result<ExtReal> {
        self.require_interior(th2, "theta2")?;
        let b1 = self.require_domain(th1, "theta1")?;
        let b2 = self.require_domain(th2, "theta2")?;
        let grad = self.grad_cumulant(th2)?;
        let diff = lincomb(1.0, th1.as_slice(), -1.0, th2.as_slice());
        Ok(ExtReal::Finite(b1 - b2 - dot(&grad, &diff)))
    }

    /// `D_1(θ₁, θ₂) = D_0(θ₂, θ₁)`, the Kullback–Leibler divergence.
    pub fn d_one(&self, th1: &NaturalParam, th2: &NaturalParam) -> Result<ExtReal> {
        self.d_zero(th2, th1)
    }

    /// Scaled Bregman power distance `B_α(P_θ₁, P_θ₂ | P_θ₀)`.
    ///
    /// Returns [`Error::FormulaOutsideValidity`] when infinite terms of
    /// opposite sign meet or the closed form comes out as `−∞`.
    pub fn b_alpha(
        &self,
        alpha: f64,
        th1: &NaturalParam,
        th2: &NaturalParam,
        th0: &NaturalParam,
    ) -> Result<ExtReal> {
        if alpha_is_zero(alpha) {
            return self.b_zero(th1, th2, th0);
        }
        if alpha_is_one(alpha) {
            return self.b_one(th1, th2, th0);
        }
        let rho1 = self.rho_alpha(alpha, th1, th0)?;
        let rho2 = self.rho_alpha(alpha, th2, th0)?;
        let sigma = self.sigma_alpha(alpha, th0, th1, th2)?;
        let outside = |reason: &str| Error::FormulaOutsideValidity {
            alpha,
            reason: reason.to_string(),
        };
        let terms = [
            rho1.exp_m1().scale(1.0 / (alpha * (alpha - 1.0)))?,
            rho2.exp_m1().scale(1.0 / alpha)?,
            sigma.exp_m1().scale(1.0 / (1.0 - alpha))?,
        ];
        let mut acc = ExtReal::ZERO;
        for t in terms {
            acc = acc
                .checked_add(t)
                .map_err(|_| outside("infinite terms of opposite sign"))?;
        }
        if acc == ExtReal::NegInf {
            return Err(outside("closed form diverges to -inf"));
        }
        Ok(acc)
    }

    /// `B_0(θ₁, θ₂|θ₀) = b(θ₁) − b(θ₂) − ∇b(θ₀)·(θ₁ − θ₂) + e^{σ₀(θ₀,θ₁,θ₂)} − 1`.
    pub fn b_zero(&self, th1: &NaturalParam, th2: &NaturalParam, th0: &NaturalParam) -> Result<ExtReal> {
        self.require_interior(th0, "theta0")?;
        let b1 = self.require_domain(th1, "theta1")?;
        let b2 = self.require_domain(th2, "theta2")?;
        let grad = self.grad_cumulant(th0)?;
        let diff = lincomb(1.0, th1.as_slice(), -1.0, th2.as_slice());
        let sigma0 = self.sigma_alpha(0.0, th0, th1, th2)?;
        ExtReal::Finite(b1 - b2 - dot(&grad, &diff)).checked_add(sigma0.exp_m1())
    }

    /// `B_1(θ₁, θ₂|θ₀) = b(θ₂) − b(θ₁) − ∇b(θ₁)·(θ₂ − θ₁)`, independent of `θ₀`.
    pub fn b_one(&self, th1: &NaturalParam, th2: &NaturalParam, th0: &NaturalParam) -> Result<ExtReal> {
        self.require_domain(th0, "theta0")?;
        self.require_interior(th1, "theta1")?;
        self.d_one(th1, th2)
    }
}

struct Shifted {
    inner: ExpFamily,
    c: f64,
    v: Vec<f64>,
}

impl Cumulant for Shifted {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn value(&self, theta: &[f64]) -> f64 {
        self.inner.cumulant.value(theta) + self.c + dot(&self.v, theta)
    }

    fn classify(&self, theta: &[f64]) -> DomainClass {
        self.inner.cumulant.classify(theta)
    }

    fn gradient(&self, theta: &[f64]) -> Option<Vec<f64>> {
        let g = self
            .inner
            .cumulant
            .gradient(theta)
            .unwrap_or_else(|| self.inner.finite_difference_gradient(theta));
        Some(g.iter().zip(&self.v).map(|(a, b)| a + b).collect())
    }

    fn name(&self) -> String {
        format!("{} shifted by ({}, {:?})", self.inner.name(), self.c, self.v)
    }
}
