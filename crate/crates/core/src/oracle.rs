//! Reference values by brute force: exact weighted sums on counting
//! supports and adaptive Gauss–Kronrod quadrature on intervals.
//!
//! The integrands reuse [`divergence_term`] and [`bregman_term`], so zero and
//! infinity handling is identical to the discrete module. Nothing here knows
//! about cumulants.

use crate::discrete::{bregman_term, divergence_term};
use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::generators::Generator;
use crate::sum::{compensated_sum, ExtSum};

/// A density evaluated pointwise.
pub type Density<'a> = &'a (dyn Fn(f64) -> f64 + Sync);

/// Integration domain together with its dominating measure.
#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    /// Lebesgue measure on `(lo, hi)`; either end may be infinite.
    Interval { lo: f64, hi: f64 },
    /// Counting measure on `points`, each weighted by `weights[i]`.
    Counting { points: Vec<f64>, weights: Vec<f64> },
}

impl Domain {
    pub fn real_line() -> Self {
        Domain::Interval {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    pub fn negative_half_line() -> Self {
        Domain::Interval {
            lo: f64::NEG_INFINITY,
            hi: 0.0,
        }
    }

    /// Unit-weight counting measure on `0..n`.
    pub fn integers(n: usize) -> Self {
        Domain::Counting {
            points: (0..n).map(|i| i as f64).collect(),
            weights: vec![1.0; n],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Refinement budget in panels.
    pub max_panels: usize,
    /// Tails are cut where the integrand and all densities fall below this
    /// fraction of their peaks.
    pub truncation: f64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            abs_tol: 1e-9,
            rel_tol: 1e-9,
            max_panels: 4000,
            truncation: 1e-16,
        }
    }
}

/// Value with an error estimate. Counting domains report error 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: ExtReal,
    pub error: f64,
}

// Kronrod 15-point abscissae and weights, Gauss 7-point weights on the
// odd-indexed abscissae.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gk15<F: Fn(f64) -> Result<f64>>(f: &F, a: f64, b: f64) -> Result<Panel> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx)? + f(c + dx)?;
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    Ok(Panel {
        a,
        b,
        value: kronrod * h,
        error: ((kronrod - gauss) * h).abs(),
    })
}

/// Adaptive G7–K15 quadrature of `f` over `[a, b]` starting from the given
/// breakpoints. The panel with the largest error estimate is bisected until
/// the summed estimate meets `max(abs_tol, rel_tol·|value|)`.
pub fn integrate<F: Fn(f64) -> Result<f64>>(
    f: &F,
    breakpoints: &[f64],
    opts: &OracleOptions,
) -> Result<(f64, f64)> {
    let mut panels = Vec::with_capacity(breakpoints.len());
    for w in breakpoints.windows(2) {
        if w[1] > w[0] {
            panels.push(gk15(f, w[0], w[1])?);
        }
    }
    loop {
        let value = compensated_sum(panels.iter().map(|p| p.value));
        let error = compensated_sum(panels.iter().map(|p| p.error));
        if error <= opts.abs_tol.max(opts.rel_tol * value.abs()) {
            return Ok((value, error));
        }
        if panels.len() >= opts.max_panels {
            return Err(Error::OracleTolerance {
                achieved: error,
                requested: opts.abs_tol.max(opts.rel_tol * value.abs()),
            });
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, p)| if p.error > acc.1 { (i, p.error) } else { acc });
        let p = panels[worst];
        let mid = 0.5 * (p.a + p.b);
        if !(mid > p.a && mid < p.b) {
            return Err(Error::OracleTolerance {
                achieved: error,
                requested: opts.abs_tol.max(opts.rel_tol * value.abs()),
            });
        }
        panels[worst] = gk15(f, p.a, mid)?;
        panels.push(gk15(f, mid, p.b)?);
        // keep a fixed left-to-right summation order
        panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    }
}

/// Points `anchor ± 2^k` for `k = −30..=60`, strictly inside the interval.
fn probes(anchor: f64, lo: f64, hi: f64) -> Vec<f64> {
    let mut pts = vec![anchor];
    for k in -30..=60 {
        let s = 2f64.powi(k);
        pts.push(anchor + s);
        pts.push(anchor - s);
    }
    pts.retain(|x| *x > lo && *x < hi);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// Breakpoints covering the part of `(lo, hi)` that carries mass. Infinite
/// ends are cut beyond the last probe where `magnitude` exceeds
/// `threshold · peak`.
fn breakpoints<M: Fn(f64) -> f64>(lo: f64, hi: f64, magnitude: &M, threshold: f64) -> Vec<f64> {
    let anchor = match (lo.is_finite(), hi.is_finite()) {
        (true, true) => 0.5 * (lo + hi),
        (true, false) => lo,
        (false, true) => hi,
        (false, false) => 0.0,
    };
    let mut pts = probes(anchor, lo, hi);
    let mags: Vec<f64> = pts.iter().map(|x| magnitude(*x)).collect();
    let peak = mags.iter().cloned().fold(0.0, f64::max);
    let significant: Vec<usize> = (0..pts.len()).filter(|&i| mags[i] > threshold * peak).collect();
    let (first, last) = match (significant.first(), significant.last()) {
        (Some(&f), Some(&l)) => (f, l),
        _ => (0, pts.len().saturating_sub(1)),
    };
    let left = if lo.is_finite() {
        lo
    } else if first > 0 {
        pts[first - 1]
    } else {
        pts[0]
    };
    let right = if hi.is_finite() {
        hi
    } else if last + 1 < pts.len() {
        pts[last + 1]
    } else {
        pts[pts.len() - 1]
    };
    pts.retain(|x| *x > left && *x < right);
    let mut out = vec![left];
    out.extend(pts);
    out.push(right);
    out
}

fn finite_term(x: f64, t: ExtReal) -> Result<f64> {
    t.finite().ok_or(Error::OracleNonFinite { x })
}

fn reference<T, S>(
    domain: &Domain,
    opts: &OracleOptions,
    densities: &[Density<'_>],
    term: T,
    scalar_term: S,
) -> Result<Estimate>
where
    T: Fn(&[f64]) -> Result<ExtReal>,
    S: Fn(f64) -> Result<f64>,
{
    match domain {
        Domain::Counting { points, weights } => {
            if points.len() != weights.len() {
                return Err(Error::DimensionMismatch {
                    expected: points.len(),
                    found: weights.len(),
                });
            }
            let mut acc = ExtSum::new();
            for (x, w) in points.iter().zip(weights) {
                let vals: Vec<f64> = densities.iter().map(|d| d(*x) * w).collect();
                acc.add(term(&vals)?);
            }
            Ok(Estimate {
                value: acc.value()?,
                error: 0.0,
            })
        }
        Domain::Interval { lo, hi } => {
            if lo.is_nan() || hi.is_nan() || lo >= hi {
                return Err(Error::InvalidParameter(format!("empty interval ({lo}, {hi})")));
            }
            let magnitude = |x: f64| {
                let integrand = scalar_term(x).map(f64::abs).unwrap_or(0.0);
                densities.iter().map(|d| d(x)).fold(integrand, f64::max)
            };
            let bps = breakpoints(*lo, *hi, &magnitude, opts.truncation);
            let (value, error) = integrate(&scalar_term, &bps, opts)?;
            Ok(Estimate {
                value: ExtReal::from_f64(value).ok_or(Error::OracleNonFinite { x: f64::NAN })?,
                error,
            })
        }
    }
}

/// `∫ m·φ(p/m) dλ`.
pub fn oracle_d_phi(
    g: &Generator,
    p: Density<'_>,
    m: Density<'_>,
    domain: &Domain,
    opts: &OracleOptions,
) -> Result<Estimate> {
    let pointwise = |x: f64| finite_term(x, divergence_term(g, p(x), m(x))?);
    reference(
        domain,
        opts,
        &[p, m],
        |v| divergence_term(g, v[0], v[1]),
        pointwise,
    )
}

fn scaled_bregman_point(g: &Generator, p: f64, q: f64, m: f64) -> Result<ExtReal> {
    if m > 0.0 {
        bregman_term(g, p, q, m)
    } else if p == 0.0 && q == 0.0 {
        Ok(ExtReal::ZERO)
    } else {
        Err(Error::OracleNonFinite { x: m })
    }
}

/// `∫ m·[φ(p/m) − φ(q/m) − φ′₊(q/m)(p/m − q/m)] dλ`.
pub fn oracle_b_phi(
    g: &Generator,
    p: Density<'_>,
    q: Density<'_>,
    m: Density<'_>,
    domain: &Domain,
    opts: &OracleOptions,
) -> Result<Estimate> {
    let pointwise = |x: f64| {
        let t = scaled_bregman_point(g, p(x), q(x), m(x)).map_err(|_| Error::OracleNonFinite { x })?;
        finite_term(x, t)
    };
    reference(
        domain,
        opts,
        &[p, q, m],
        |v| scaled_bregman_point(g, v[0], v[1], v[2]),
        pointwise,
    )
}

/// `ln ∫ p₁^α p₂^{1−α} dλ`.
pub fn oracle_rho(
    alpha: f64,
    p1: Density<'_>,
    p2: Density<'_>,
    domain: &Domain,
    opts: &OracleOptions,
) -> Result<Estimate> {
    let affinity = |a: f64, b: f64| {
        if a == 0.0 && b == 0.0 {
            0.0
        } else {
            a.powf(alpha) * b.powf(1.0 - alpha)
        }
    };
    let pointwise = |x: f64| {
        let v = affinity(p1(x), p2(x));
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::OracleNonFinite { x })
        }
    };
    let est = reference(
        domain,
        opts,
        &[p1, p2],
        |v| Ok(ExtReal::from_f64(affinity(v[0], v[1])).unwrap_or(ExtReal::PosInf)),
        pointwise,
    )?;
    let integral = est.value.to_f64();
    Ok(Estimate {
        value: ExtReal::from_f64(integral.ln()).unwrap_or(ExtReal::PosInf),
        error: est.error / integral,
    })
}
