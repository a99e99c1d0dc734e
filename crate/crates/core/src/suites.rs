//! Self-checks runnable from the command line.
//!
//! Every suite draws its instances from a fixed ChaCha seed, so reports are
//! reproducible.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::discrete::{b_phi, d_phi, lemma1_lower_bound, DiscreteMeasure, MergeMap};
use crate::error::{Error, Result};
use crate::expfam::{ExpFamily, NaturalParam};
use crate::extreal::{format_f64, ExtReal};
use crate::families::{Binomial, Gbm, PoissonProcess, Rayleigh, Wiener};
use crate::generators::Generator;
use crate::oracle::{oracle_b_phi, oracle_d_phi, Domain, OracleOptions};

pub const DEFAULT_SEED: u64 = 0x5eed_b7e9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Identities,
    Oracle,
    Sufficiency,
    Counterexample,
    Limits,
    Shift,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Identities,
        Suite::Oracle,
        Suite::Sufficiency,
        Suite::Counterexample,
        Suite::Limits,
        Suite::Shift,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Identities => "identities",
            Suite::Oracle => "oracle",
            Suite::Sufficiency => "sufficiency",
            Suite::Counterexample => "counterexample",
            Suite::Limits => "limits",
            Suite::Shift => "shift",
        }
    }

    pub fn run(self, seed: u64) -> Result<Vec<PropertyOutcome>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match self {
            Suite::Identities => identities(&mut rng),
            Suite::Oracle => oracle(&mut rng),
            Suite::Sufficiency => sufficiency(&mut rng),
            Suite::Counterexample => counterexample(),
            Suite::Limits => limits(&mut rng),
            Suite::Shift => shift(&mut rng),
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown suite {s:?}")))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyOutcome {
    pub name: String,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub note: Option<String>,
}

impl PropertyOutcome {
    fn new(name: impl Into<String>, max_deviation: f64, tolerance: f64) -> Self {
        PropertyOutcome {
            name: name.into(),
            max_deviation,
            tolerance,
            passed: max_deviation <= tolerance,
            note: None,
        }
    }

    fn with_note(mut self, note: String) -> Self {
        self.note = Some(note);
        self
    }
}

impl fmt::Display for PropertyOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: max deviation {} (tolerance {})",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            format_f64(self.max_deviation),
            format_f64(self.tolerance)
        )?;
        if let Some(n) = &self.note {
            write!(f, "; {n}")?;
        }
        Ok(())
    }
}

/// Tracks the largest relative deviation `|a − b| / (1 + |b|)`.
#[derive(Default)]
struct Worst(f64);

impl Worst {
    fn record(&mut self, a: f64, b: f64) {
        let d = if a == b { 0.0 } else { (a - b).abs() / (1.0 + b.abs()) };
        self.0 = self.0.max(if d.is_nan() { f64::INFINITY } else { d });
    }
}

fn fin(x: ExtReal) -> f64 {
    x.to_f64()
}

fn random_probability<R: Rng>(rng: &mut R, d: usize) -> Result<DiscreteMeasure> {
    let raw: Vec<f64> = (0..d).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mut masses: Vec<f64> = raw.iter().map(|x| x / total).collect();
    let head: f64 = masses[..d - 1].iter().sum();
    masses[d - 1] = 1.0 - head;
    DiscreteMeasure::probability(masses)
}

fn random_positive<R: Rng>(rng: &mut R, d: usize) -> Result<DiscreteMeasure> {
    DiscreteMeasure::new((0..d).map(|_| rng.random_range(0.05..2.0)).collect())
}

fn identities<R: Rng>(rng: &mut R) -> Result<Vec<PropertyOutcome>> {
    let gens = Generator::builtins();
    let (mut scale, mut kl_scale, mut tv, mut rkl, mut skew, mut lemma, mut bounds, mut nonneg): (
        Worst,
        Worst,
        Worst,
        Worst,
        Worst,
        Worst,
        Worst,
        Worst,
    ) = Default::default();
    for _ in 0..100 {
        let d = rng.random_range(2..12);
        let p = random_probability(rng, d)?;
        let q = random_probability(rng, d)?;
        let m1 = random_positive(rng, d)?;
        let m2 = random_positive(rng, d)?;
        for g in &gens {
            scale.record(fin(b_phi(g, &p, &q, &q)?), fin(d_phi(g, &p, &q)?));
            skew.record(fin(d_phi(&g.adjoint(), &p, &q)?), fin(d_phi(g, &q, &p)?));
            let b = fin(b_phi(g, &p, &q, &m1)?);
            nonneg.record(b.min(0.0), 0.0);
            let lb = fin(lemma1_lower_bound(g, &m1));
            lemma.record(fin(d_phi(g, &p, &m1)?).max(lb), fin(d_phi(g, &p, &m1)?));
            let d = fin(d_phi(g, &p, &q)?);
            let upper = g.at_zero().checked_add(g.adjoint_at_zero())?.to_f64();
            bounds.record(d.max(0.0).min(upper), d);
        }
        let klg = Generator::kl();
        kl_scale.record(fin(b_phi(&klg, &p, &q, &m1)?), fin(b_phi(&klg, &p, &q, &m2)?));
        let l1: f64 = p.masses().iter().zip(q.masses()).map(|(a, b)| (a - b).abs()).sum();
        tv.record(fin(b_phi(&Generator::total_variation(), &p, &q, &q)?), l1);
        let chi2 = fin(d_phi(&Generator::pearson(), &p, &q)?);
        let kl = fin(d_phi(&klg, &p, &q)?);
        rkl.record(fin(b_phi(&Generator::reverse_kl(), &p, &q, &p)?), chi2 - kl);
    }
    Ok(vec![
        PropertyOutcome::new("scale identity B(P,Q|Q) = D(P,Q)", scale.0, 1e-10),
        PropertyOutcome::new("KL scale independence", kl_scale.0, 1e-10),
        PropertyOutcome::new("total variation reduction", tv.0, 1e-10),
        PropertyOutcome::new("reverse KL: B(P,Q|P) = chi2(P,Q) - KL(P,Q)", rkl.0, 1e-8),
        PropertyOutcome::new("adjoint skew symmetry", skew.0, 1e-10),
        PropertyOutcome::new("nonnegativity", nonneg.0, 1e-12),
        PropertyOutcome::new("lower divergence bound", lemma.0, 1e-12),
        PropertyOutcome::new("range bounds 0 <= D <= phi(0) + phi*(0)", bounds.0, 1e-12),
    ])
}

fn oracle<R: Rng>(rng: &mut R) -> Result<Vec<PropertyOutcome>> {
    let opts = OracleOptions::default();
    let mut out = Vec::new();

    let bin = Binomial::new(10)?;
    let fam = bin.family();
    let mut w = Worst::default();
    for _ in 0..50 {
        let alpha = loop {
            let a: f64 = rng.random_range(-1.0..2.0);
            if a.abs() > 1e-3 && (a - 1.0).abs() > 1e-3 {
                break a;
            }
        };
        let th: Vec<f64> = (0..3).map(|_| rng.random_range(-2.0..1.0)).collect();
        let (p, q, m) = (bin.pmf(th[1]), bin.pmf(th[2]), bin.pmf(th[0]));
        let g = Generator::power(alpha)?;
        let dp = |x: f64| p[x as usize];
        let dq = |x: f64| q[x as usize];
        let dm = |x: f64| m[x as usize];
        let dom = Domain::integers(11);
        let closed = fam.b_alpha(alpha, &th[1].into(), &th[2].into(), &th[0].into())?;
        w.record(closed.to_f64(), oracle_b_phi(&g, &dp, &dq, &dm, &dom, &opts)?.value.to_f64());
        let closed = fam.d_alpha(alpha, &th[1].into(), &th[2].into())?;
        w.record(closed.to_f64(), oracle_d_phi(&g, &dp, &dq, &dom, &opts)?.value.to_f64());
    }
    out.push(PropertyOutcome::new("binomial closed forms vs exact sums", w.0, 1e-10));

    let mut continuous = |name: &str, fam: ExpFamily, density: fn(f64, f64) -> f64, dom: Domain| -> Result<PropertyOutcome> {
        let mut w = Worst::default();
        let mut n = 0;
        while n < 10 {
            let alpha: f64 = rng.random_range(-0.5..1.5);
            if alpha.abs() < 0.05 || (alpha - 1.0).abs() < 0.05 {
                continue;
            }
            let t: Vec<f64> = (0..3).map(|_| rng.random_range(1.0..2.0)).collect();
            if !integrable(alpha, t[0], t[1], t[2]) {
                continue;
            }
            n += 1;
            let g = Generator::power(alpha)?;
            let (t0, t1, t2) = (t[0], t[1], t[2]);
            let p = move |x: f64| density(t1, x);
            let q = move |x: f64| density(t2, x);
            let m = move |x: f64| density(t0, x);
            let est = oracle_b_phi(&g, &p, &q, &m, &dom, &opts)?;
            let closed = fam.b_alpha(alpha, &t1.into(), &t2.into(), &t0.into())?;
            let v = est.value.to_f64();
            w.record(closed.to_f64(), v);
        }
        Ok(PropertyOutcome::new(format!("{name} closed form vs quadrature"), w.0, 1e-6))
    };
    out.push(continuous("rayleigh", Rayleigh.family(), Rayleigh::natural_density, Domain::negative_half_line())?);
    out.push(continuous("wiener", Wiener::new(1.0)?.family(), Wiener::density, Domain::real_line())?);

    let g = Gbm::new(1.5, 0.8)?;
    let fam = g.family();
    let mut w = Worst::default();
    for _ in 0..10 {
        let alpha: f64 = rng.random_range(0.05..0.95);
        let (a, b): (f64, f64) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let p = move |x: f64| g.log_return_density(a, x);
        let q = move |x: f64| g.log_return_density(b, x);
        let est = crate::oracle::oracle_rho(alpha, &p, &q, &Domain::real_line(), &opts)?;
        let closed = fam.rho_alpha(alpha, &g.natural_from_drift(a), &g.natural_from_drift(b))?;
        w.record(closed.to_f64(), est.value.to_f64());
    }
    out.push(PropertyOutcome::new("gbm rho from cumulant vs quadrature", w.0, 1e-6));
    Ok(out)
}

/// All exponents of the scaled Bregman integrand for the natural families on
/// a half-line stay inside `(0, ∞)` with some margin.
pub fn integrable(alpha: f64, t0: f64, t1: f64, t2: f64) -> bool {
    let margin = 0.3;
    alpha * t1 + (1.0 - alpha) * t0 > margin
        && alpha * t2 + (1.0 - alpha) * t0 > margin
        && t1 + (1.0 - alpha) * (t0 - t2) > margin
}

fn sufficiency<R: Rng>(rng: &mut R) -> Result<Vec<PropertyOutcome>> {
    let gens = Generator::builtins();
    let mut w = Worst::default();
    let mut detected = 0;
    for _ in 0..50 {
        let (p, q, m, t) = proportional_triple(rng)?;
        if t.is_sufficient(&p, &q, &m)? {
            detected += 1;
        }
        let (mp, mq, mm) = (t.merge(&p)?, t.merge(&q)?, t.merge(&m)?);
        for g in &gens {
            w.record(fin(b_phi(g, &mp, &mq, &mm)?), fin(b_phi(g, &p, &q, &m)?));
        }
    }
    Ok(vec![
        PropertyOutcome::new("sufficient merges preserve B", w.0, 1e-10),
        PropertyOutcome::new("sufficiency detected", (50 - detected) as f64, 0.0),
    ])
}

/// Builds `p, q, m` whose ratios are constant on the classes of a random
/// merge map: `x_i = g_x(T(i))·h_i`, normalized.
pub fn proportional_triple<R: Rng>(rng: &mut R) -> Result<(DiscreteMeasure, DiscreteMeasure, DiscreteMeasure, MergeMap)> {
    let k = rng.random_range(2..6);
    let d = k + rng.random_range(1..8);
    let mut assignment: Vec<usize> = (0..k).collect();
    assignment.extend((k..d).map(|_| rng.random_range(0..k)));
    let h: Vec<f64> = (0..d).map(|_| rng.random_range(0.1..1.0)).collect();
    let mut build = |normalize: bool| {
        let gx: Vec<f64> = (0..k).map(|_| rng.random_range(0.1..1.0)).collect();
        let raw: Vec<f64> = (0..d).map(|i| gx[assignment[i]] * h[i]).collect();
        let total: f64 = if normalize { raw.iter().sum() } else { 1.0 };
        raw.into_iter().map(|x| x / total).collect::<Vec<f64>>()
    };
    let p = build(true);
    let q = build(true);
    let m = build(false);
    Ok((
        DiscreteMeasure::probability(p)?,
        DiscreteMeasure::probability(q)?,
        DiscreteMeasure::new(m)?,
        MergeMap::new(assignment)?,
    ))
}

/// Values of the data-processing counterexample: `(unmerged, merged)`.
///
/// Both spaces carry the uniform counting scale, so these are plain squared
/// Euclidean distances. Pushing the scale forward instead would make the
/// merge sufficient and the two values equal.
pub fn counterexample_values() -> Result<(f64, f64)> {
    let g = Generator::pearson();
    let p = DiscreteMeasure::probability(vec![0.5, 0.25, 0.25])?;
    let q = DiscreteMeasure::probability(vec![1.0, 0.0, 0.0])?;
    let t = MergeMap::new(vec![0, 1, 1])?;
    let unmerged = fin(b_phi(&g, &p, &q, &DiscreteMeasure::new(vec![1.0; 3])?)?);
    let merged = fin(b_phi(&g, &t.merge(&p)?, &t.merge(&q)?, &DiscreteMeasure::new(vec![1.0; 2])?)?);
    Ok((unmerged, merged))
}

fn counterexample() -> Result<Vec<PropertyOutcome>> {
    let (unmerged, merged) = counterexample_values()?;
    let dev = (unmerged - 0.375).abs().max((merged - 0.5).abs());
    let mut o = PropertyOutcome::new("pearson, uniform scale: unmerged 0.375 < merged 0.5", dev, 1e-15)
        .with_note(format!("unmerged {} merged {}", format_f64(unmerged), format_f64(merged)));
    o.passed &= unmerged < merged;
    Ok(vec![o])
}

/// Least-squares slope of `ln|err|` against `ln h`.
pub fn convergence_order(steps: &[f64], errors: &[f64]) -> f64 {
    let xs: Vec<f64> = steps.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.abs().ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}

const LIMIT_STEPS: [f64; 4] = [1e-3, 3e-4, 1e-4, 3e-5];

fn limits<R: Rng>(rng: &mut R) -> Result<Vec<PropertyOutcome>> {
    let mut worst_zero = f64::INFINITY;
    let mut worst_one = f64::INFINITY;
    let cases: Vec<(ExpFamily, f64, f64)> = vec![
        (Binomial::new(10)?.family(), -2.0, 1.0),
        (Rayleigh.family(), 1.0, 2.0),
    ];
    for (fam, lo, hi) in cases {
        for _ in 0..5 {
            let th: Vec<NaturalParam> = (0..3).map(|_| rng.random_range(lo..hi).into()).collect();
            let (t1, t2, t0) = (&th[0], &th[1], &th[2]);
            let b0 = fam.b_zero(t1, t2, t0)?.to_f64();
            let b1 = fam.b_one(t1, t2, t0)?.to_f64();
            let e0: Vec<f64> = LIMIT_STEPS
                .iter()
                .map(|&h| Ok(fam.b_alpha(h, t1, t2, t0)?.to_f64() - b0))
                .collect::<Result<_>>()?;
            let e1: Vec<f64> = LIMIT_STEPS
                .iter()
                .map(|&h| Ok(fam.b_alpha(1.0 - h, t1, t2, t0)?.to_f64() - b1))
                .collect::<Result<_>>()?;
            worst_zero = worst_zero.min(convergence_order(&LIMIT_STEPS, &e0));
            worst_one = worst_one.min(convergence_order(&LIMIT_STEPS, &e1));
        }
    }
    let order = |name: &str, o: f64| {
        let mut r = PropertyOutcome::new(name, (0.9 - o).max(0.0), 0.0)
            .with_note(format!("minimum observed order {}", format_f64(o)));
        r.passed = o >= 0.9;
        r
    };
    Ok(vec![
        order("B_alpha -> B_0 at first order", worst_zero),
        order("B_alpha -> B_1 at first order", worst_one),
    ])
}

type Draw = Box<dyn Fn(&mut ChaCha8Rng) -> NaturalParam>;

fn shift(rng: &mut ChaCha8Rng) -> Result<Vec<PropertyOutcome>> {
    let gbm = Gbm::new(1.0, 0.7)?;
    let families: Vec<(&str, ExpFamily, Draw)> = vec![
        ("binomial", Binomial::new(10)?.family(), Box::new(|r: &mut ChaCha8Rng| NaturalParam::from(r.random_range(-2.0..1.0)))),
        ("rayleigh", Rayleigh.family(), Box::new(|r: &mut ChaCha8Rng| NaturalParam::from(r.random_range(0.5..3.0)))),
        ("poisson-process", PoissonProcess::new(2.0)?.family(), Box::new(|r: &mut ChaCha8Rng| NaturalParam::from(r.random_range(-1.0..1.0)))),
        ("wiener", Wiener::new(1.0)?.family(), Box::new(|r: &mut ChaCha8Rng| NaturalParam::from(r.random_range(0.5..3.0)))),
        ("gbm", gbm.family(), Box::new(move |r: &mut ChaCha8Rng| gbm.natural_from_drift(r.random_range(-1.0..1.0)))),
    ];
    let mut out = Vec::new();
    for (name, fam, draw) in families {
        let mut w = Worst::default();
        for _ in 0..20 {
            let c = rng.random_range(-5.0..5.0);
            let v: Vec<f64> = (0..fam.dim()).map(|_| rng.random_range(-5.0..5.0)).collect();
            let shifted = fam.shift(c, v)?;
            let (t1, t2, t0) = (draw(rng), draw(rng), draw(rng));
            for alpha in [-0.5, 0.0, 0.3, 0.7, 1.0, 1.5] {
                let (a, b) = (fam.d_alpha(alpha, &t1, &t2), shifted.d_alpha(alpha, &t1, &t2));
                w.record(a?.to_f64(), b?.to_f64());
                match (fam.b_alpha(alpha, &t1, &t2, &t0), shifted.b_alpha(alpha, &t1, &t2, &t0)) {
                    (Ok(a), Ok(b)) => w.record(a.to_f64(), b.to_f64()),
                    (Err(_), Err(_)) => {}
                    _ => w.record(0.0, f64::INFINITY),
                }
            }
        }
        out.push(PropertyOutcome::new(format!("{name} shift invariance"), w.0, 1e-12));
    }
    Ok(out)
}
