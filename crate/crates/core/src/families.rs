//! Concrete exponential families.
//!
//! Each family keeps one representative of its cumulant: additive constants
//! and linear terms are dropped where convenient, since every distance in
//! [`crate::expfam`] is invariant under `b ↦ b + c + v·θ`.
//!
//! Process families (Poisson, Wiener, geometric Brownian motion, Lévy) are
//! handled at the level of the marginal law at the horizon `t`, which is a
//! sufficient reduction of the path law.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expfam::{Cumulant, DomainClass, ExpFamily, NaturalParam};

/// `ln(1 + e^x)` without overflow.
pub fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

/// `e^x / (1 + e^x)` without overflow.
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn ln_factorial(k: u64) -> f64 {
    (1..=k).map(|i| (i as f64).ln()).sum()
}

fn ln_binomial(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    (0..k).map(|i| (((n - i) as f64) / ((i + 1) as f64)).ln()).sum()
}

fn finite_interior(x: f64) -> DomainClass {
    if x.is_finite() {
        DomainClass::Interior
    } else {
        DomainClass::Outside
    }
}

fn positive_interior(x: f64) -> DomainClass {
    if x > 0.0 && x.is_finite() {
        DomainClass::Interior
    } else {
        DomainClass::Outside
    }
}

fn require_positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {x}")))
    }
}

/// `Bin(n, p̃)` with `θ = ln(p̃/(1−p̃))` and `b(θ) = n·ln(1 + e^θ)` on `ℝ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Binomial {
    n: u64,
}

impl Binomial {
    pub fn new(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("binomial needs n >= 1".into()));
        }
        Ok(Binomial { n })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn theta_from_success(ptilde: f64) -> Result<f64> {
        if !(ptilde > 0.0 && ptilde < 1.0) {
            return Err(Error::OutsideDomain(format!(
                "success probability must lie in (0, 1), got {ptilde}"
            )));
        }
        Ok((ptilde / (1.0 - ptilde)).ln())
    }

    /// Masses `P_θ{x}` for `x = 0..=n`.
    pub fn pmf(&self, theta: f64) -> Vec<f64> {
        self.pmf_success(sigmoid(theta))
    }

    /// Masses of `Bin(n, p̃)` by the direct formula.
    pub fn pmf_success(&self, ptilde: f64) -> Vec<f64> {
        let n = self.n;
        (0..=n)
            .map(|x| {
                let ln_c = ln_binomial(n, x);
                let a = if x == 0 { 0.0 } else { x as f64 * ptilde.ln() };
                let b = if x == n { 0.0 } else { (n - x) as f64 * (1.0 - ptilde).ln() };
                (ln_c + a + b).exp()
            })
            .collect()
    }

    pub fn family(&self) -> ExpFamily {
        ExpFamily::new(*self)
    }
}

impl Cumulant for Binomial {
    fn dim(&self) -> usize {
        1
    }

    fn value(&self, theta: &[f64]) -> f64 {
        self.n as f64 * softplus(theta[0])
    }

    fn classify(&self, theta: &[f64]) -> DomainClass {
        finite_interior(theta[0])
    }

    fn gradient(&self, theta: &[f64]) -> Option<Vec<f64>> {
        Some(vec![self.n as f64 * sigmoid(theta[0])])
    }

    fn name(&self) -> String {
        format!("binomial:{}", self.n)
    }
}

/// Rayleigh law, in natural form on the negative half-line: density
/// `θe^{θy}` for `y < 0`, `b(θ) = −ln θ` on `(0, ∞)`.
///
/// The observation `x > 0` of the original law `θx·e^{−θx²/2}` maps to
/// `y = −x²/2`, a sufficient transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Rayleigh;

impl Rayleigh {
    pub fn natural_density(theta: f64, y: f64) -> f64 {
        if y < 0.0 {
            theta * (theta * y).exp()
        } else {
            0.0
        }
    }

    pub fn density(theta: f64, x: f64) -> f64 {
        if x > 0.0 {
            theta * x * (-theta * x * x / 2.0).exp()
        } else {
            0.0
        }
    }

    pub fn family(&self) -> ExpFamily {
        ExpFamily::new(*self)
    }
}

impl Cumulant for Rayleigh {
    fn dim(&self) -> usize {
        1
    }

    fn value(&self, theta: &[f64]) -> f64 {
        -theta[0].ln()
    }

    fn classify(&self, theta: &[f64]) -> DomainClass {
        positive_interior(theta[0])
    }

    fn gradient(&self, theta: &[f64]) -> Option<Vec<f64>> {
        Some(vec![-1.0 / theta[0]])
    }

    fn name(&self) -> String {
        "rayleigh".into()
    }
}

/// Poisson processes with intensity `e^θ` observed up to time `t`.
///
/// The count at `t` is `Poi(t·e^θ)`. The cumulant is taken as `b(θ) = t·e^θ`,
/// i.e. `e^ϑ` in `ϑ = θ + ln t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonProcess {
    t: f64,
}

/// Tail mass below which Poisson sums are truncated.
pub const POISSON_TAIL: f64 = 1e-15;

impl PoissonProcess {
    pub fn new(t: f64) -> Result<Self> {
        require_positive("horizon t", t)?;
        Ok(PoissonProcess { t })
    }

    pub fn horizon(&self) -> f64 {
        self.t
    }

    pub fn mean(&self, theta: f64) -> f64 {
        self.t * theta.exp()
    }

    /// `Poi(t·e^θ)` masses `0..=k`, where `k` is the first count past the
    /// mean with remaining tail below [`POISSON_TAIL`].
    pub fn pmf(&self, theta: f64) -> Vec<f64> {
        let tau = self.mean(theta);
        let mut masses = Vec::new();
        let mut cumulative = 0.0;
        for k in 0u64.. {
            let m = (k as f64 * tau.ln() - tau - ln_factorial(k)).exp();
            masses.push(m);
            cumulative += m;
            if k as f64 > tau && 1.0 - cumulative < POISSON_TAIL {
                break;
            }
        }
        masses
    }

    /// Masses over a fixed support `0..len`.
    pub fn pmf_on(&self, theta: f64, len: usize) -> Vec<f64> {
        let tau = self.mean(theta);
        let mut ln_fact = 0.0;
        (0..len)
            .map(|k| {
                if k > 0 {
                    ln_fact += (k as f64).ln();
                }
                (k as f64 * tau.ln() - tau - ln_fact).exp()
            })
            .collect()
    }

    pub fn family(&self) -> ExpFamily {
        ExpFamily::new(*self)
    }
}

impl Cumulant for PoissonProcess {
    fn dim(&self) -> usize {
        1
    }

    fn value(&self, theta: &[f64]) -> f64 {
        self.t * theta[0].exp()
    }

    fn classify(&self, theta: &[f64]) -> DomainClass {
        finite_interior(theta[0])
    }

    fn gradient(&self, theta: &[f64]) -> Option<Vec<f64>> {
        Some(vec![self.t * theta[0].exp()])
    }

    fn name(&self) -> String {
        format!("poisson-process:{}", self.t)
    }
}

/// Scaled Wiener processes `θ·W_s`, `0 ≤ s ≤ t`, `θ > 0`.
///
/// The position at `t` is `N(0, tθ²)`, with density `√(ϑ/π)·e^{−ϑx²}` for the
/// natural parameter `ϑ = 1/(2tθ²)`. The cumulant is `b(ϑ) = −½·ln ϑ` on
/// `(0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wiener {
    t: f64,
}

impl Wiener {
    pub fn new(t: f64) -> Result<Self> {
        require_positive("horizon t", t)?;
        Ok(Wiener { t })
    }

    pub fn horizon(&self) -> f64 {
        self.t
    }

    /// `ϑ = 1/(2tθ²)` for a scale `θ > 0`.
    pub fn natural_from_scale(&self, theta: f64) -> Result<f64> {
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(Error::OutsideDomain(format!("wiener scale must be positive, got {theta}")));
        }
        Ok(1.0 / (2.0 * self.t * theta * theta))
    }

    pub fn density(vartheta: f64, x: f64) -> f64 {
        (vartheta / std::f64::consts::PI).sqrt() * (-vartheta * x * x).exp()
    }

    pub fn family(&self) -> ExpFamily {
        ExpFamily::new(*self)
    }
}

impl Cumulant for Wiener {
    fn dim(&self) -> usize {
        1
    }

    fn value(&self, theta: &[f64]) -> f64 {
        -0.5 * theta[0].ln()
    }

    fn classify(&self, theta: &[f64]) -> DomainClass {
        positive_interior(theta[0])
    }

    fn gradient(&self, theta: &[f64]) -> Option<Vec<f64>> {
        Some(vec![-0.5 / theta[0]])
    }

    fn name(&self) -> String {
        format!("wiener:{}", self.t)
    }
}

/// Geometric Brownian motions `exp{σW_s + θs}` with drift `θ` and fixed
/// volatility `σ`.
///
/// `ln Y_t ~ N(θt, σ²t)`. The normal family `N(μ, v²)` is written in natural
/// coordinates `(ϑ, τ) = (μ/v², 1/(2v²))` for the statistic `(x, −x²)`, with
/// cumulant `b(ϑ, τ) = −½·ln τ + ϑ²/(4τ)` on `ℝ × (0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gbm {
    t: f64,
    sigma: f64,
}

impl Gbm {
    pub fn new(t: f64, sigma: f64) -> Result<Self> {
        require_positive("horizon t", t)?;
        require_positive("volatility sigma", sigma)?;
        Ok(Gbm { t, sigma })
    }

    pub fn horizon(&self) -> f64 {
        self.t
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// `(ϑ, τ) = (θ/σ², 1/(2σ²t))`.
    pub fn natural_from_drift(&self, theta: f64) -> NaturalParam {
        let s2 = self.sigma * self.sigma;
        NaturalParam(vec![theta / s2, 1.0 / (2.0 * s2 * self.t)])
    }

    /// `(ϑ, τ)` for `N(μ, v²)`.
    pub fn natural_from_normal(mu: f64, v2: f64) -> NaturalParam {
        NaturalParam(vec![mu / v2, 1.0 / (2.0 * v2)])
    }

    /// Density of `ln Y_t ~ N(θt, σ²t)`.
    pub fn log_return_density(&self, theta: f64, x: f64) -> f64 {
        normal_density(theta * self.t, self.sigma * self.sigma * self.t, x)
    }

    pub fn family(&self) -> ExpFamily {
        ExpFamily::new(*self)
    }
}

pub fn normal_density(mu: f64, v2: f64, x: f64) -> f64 {
    let z = x - mu;
    (-z * z / (2.0 * v2)).exp() / (2.0 * std::f64::consts::PI * v2).sqrt()
}

impl Cumulant for Gbm {
    fn dim(&self) -> usize {
        2
    }

    fn value(&self, theta: &[f64]) -> f64 {
        let (v, tau) = (theta[0], theta[1]);
        -0.5 * tau.ln() + v * v / (4.0 * tau)
    }

    fn classify(&self, theta: &[f64]) -> DomainClass {
        if theta[0].is_finite() && theta[1] > 0.0 && theta[1].is_finite() {
            DomainClass::Interior
        } else {
            DomainClass::Outside
        }
    }

    fn gradient(&self, theta: &[f64]) -> Option<Vec<f64>> {
        let (v, tau) = (theta[0], theta[1]);
        Some(vec![v / (2.0 * tau), -0.5 / tau - v * v / (4.0 * tau * tau)])
    }

    fn name(&self) -> String {
        format!("gbm:{},{}", self.t, self.sigma)
    }
}

/// The jump part `γ(θ)` of a Lévy cumulant.
pub trait JumpCumulant: Send + Sync + fmt::Debug {
    fn value(&self, theta: f64) -> f64;
    fn derivative(&self, theta: f64) -> f64;

    fn classify(&self, theta: f64) -> DomainClass {
        finite_interior(theta)
    }
}

/// `γ ≡ 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoJumps;

impl JumpCumulant for NoJumps {
    fn value(&self, _theta: f64) -> f64 {
        0.0
    }

    fn derivative(&self, _theta: f64) -> f64 {
        0.0
    }
}

/// Unit jumps at rate `λ`: `γ(θ) = λ(e^θ − 1)`.
#[derive(Debug, Clone, Copy)]
pub struct PoissonJumps {
    pub rate: f64,
}

impl JumpCumulant for PoissonJumps {
    fn value(&self, theta: f64) -> f64 {
        self.rate * theta.exp_m1()
    }

    fn derivative(&self, theta: f64) -> f64 {
        self.rate * theta.exp()
    }
}

/// Lévy processes observed to time `t`, with cumulant
/// `b_t(θ) = t(δθ + σ²θ²/2 + γ(θ))`.
#[derive(Debug, Clone)]
pub struct Levy {
    t: f64,
    delta: f64,
    sigma: f64,
    jumps: Arc<dyn JumpCumulant>,
}

impl Levy {
    pub fn new<J: JumpCumulant + 'static>(t: f64, delta: f64, sigma: f64, jumps: J) -> Result<Self> {
        require_positive("horizon t", t)?;
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("sigma must be nonnegative, got {sigma}")));
        }
        if !delta.is_finite() {
            return Err(Error::InvalidParameter(format!("delta must be finite, got {delta}")));
        }
        let g0 = jumps.value(0.0);
        if g0.abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("jump cumulant needs gamma(0) = 0, got {g0}")));
        }
        Ok(Levy {
            t,
            delta,
            sigma,
            jumps: Arc::new(jumps),
        })
    }

    pub fn family(&self) -> ExpFamily {
        ExpFamily::new(self.clone())
    }
}

impl Cumulant for Levy {
    fn dim(&self) -> usize {
        1
    }

    fn value(&self, theta: &[f64]) -> f64 {
        let th = theta[0];
        self.t * (self.delta * th + 0.5 * self.sigma * self.sigma * th * th + self.jumps.value(th))
    }

    fn classify(&self, theta: &[f64]) -> DomainClass {
        self.jumps.classify(theta[0])
    }

    fn gradient(&self, theta: &[f64]) -> Option<Vec<f64>> {
        let th = theta[0];
        Some(vec![
            self.t * (self.delta + self.sigma * self.sigma * th + self.jumps.derivative(th)),
        ])
    }

    fn name(&self) -> String {
        format!("levy:{},{},{},{:?}", self.t, self.delta, self.sigma, self.jumps)
    }
}

/// Family selector: `binomial:<n> | rayleigh | poisson-process:<t> |
/// wiener:<t> | gbm:<t>,<sigma>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FamilySpec {
    Binomial(Binomial),
    Rayleigh,
    PoissonProcess(PoissonProcess),
    Wiener(Wiener),
    Gbm(Gbm),
}

impl FamilySpec {
    pub fn family(&self) -> ExpFamily {
        match self {
            FamilySpec::Binomial(b) => b.family(),
            FamilySpec::Rayleigh => Rayleigh.family(),
            FamilySpec::PoissonProcess(p) => p.family(),
            FamilySpec::Wiener(w) => w.family(),
            FamilySpec::Gbm(g) => g.family(),
        }
    }

    /// Maps a model parameter to the natural parameter.
    ///
    /// binomial: success probability; rayleigh: `θ` itself; poisson-process:
    /// log-intensity `θ`; wiener: scale `θ > 0`; gbm: drift `θ`.
    pub fn natural_from_model(&self, model: &[f64]) -> Result<NaturalParam> {
        if model.len() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: model.len(),
            });
        }
        let x = model[0];
        Ok(match self {
            FamilySpec::Binomial(_) => Binomial::theta_from_success(x)?.into(),
            FamilySpec::Rayleigh | FamilySpec::PoissonProcess(_) => x.into(),
            FamilySpec::Wiener(w) => w.natural_from_scale(x)?.into(),
            FamilySpec::Gbm(g) => g.natural_from_drift(x),
        })
    }
}

fn parse_number<T: FromStr>(s: &str, what: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("invalid {what}: {s:?}")))
}

impl FromStr for FamilySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_family(s.trim()).map_err(|e| match e {
            Error::InvalidParameter(m) => Error::Parse(m),
            other => other,
        })
    }
}

fn parse_family(s: &str) -> Result<FamilySpec> {
    {
        let (name, args) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let need = |what: &str| {
            args.ok_or_else(|| Error::Parse(format!("family {name:?} needs {what}")))
        };
        let spec = match name {
            "binomial" => FamilySpec::Binomial(Binomial::new(parse_number(need("<n>")?, "n")?)?),
            "rayleigh" => {
                if args.is_some() {
                    return Err(Error::Parse("rayleigh takes no arguments".into()));
                }
                FamilySpec::Rayleigh
            }
            "poisson-process" => {
                FamilySpec::PoissonProcess(PoissonProcess::new(parse_number(need("<t>")?, "t")?)?)
            }
            "wiener" => FamilySpec::Wiener(Wiener::new(parse_number(need("<t>")?, "t")?)?),
            "gbm" => {
                let (t, sigma) = need("<t>,<sigma>")?
                    .split_once(',')
                    .ok_or_else(|| Error::Parse("gbm needs <t>,<sigma>".into()))?;
                FamilySpec::Gbm(Gbm::new(parse_number(t, "t")?, parse_number(sigma, "sigma")?)?)
            }
            other => return Err(Error::Parse(format!("unknown family {other:?}"))),
        };
        Ok(spec)
    }
}

pub fn binomial(n: u64) -> Result<ExpFamily> {
    Ok(Binomial::new(n)?.family())
}

pub fn rayleigh() -> ExpFamily {
    Rayleigh.family()
}

pub fn poisson_process(t: f64) -> Result<ExpFamily> {
    Ok(PoissonProcess::new(t)?.family())
}

pub fn wiener(t: f64) -> Result<ExpFamily> {
    Ok(Wiener::new(t)?.family())
}

pub fn gbm(t: f64, sigma: f64) -> Result<ExpFamily> {
    Ok(Gbm::new(t, sigma)?.family())
}

pub fn levy<J: JumpCumulant + 'static>(t: f64, delta: f64, sigma: f64, jumps: J) -> Result<ExpFamily> {
    Ok(Levy::new(t, delta, sigma, jumps)?.family())
}
