//! 3D discrimination grids: `B_α(P, Q | βP + (1−β)Q)` over a rectangle of
//! `(α, β)` values.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rayon::prelude::*;

use crate::discrete::{mixture, scaled_bregman, DiscreteMeasure};
use crate::error::{Error, Result};
use crate::extreal::{format_f64, ExtReal};
use crate::generators::Generator;

/// Inclusive, evenly spaced range `min:max:steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisRange {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl AxisRange {
    pub fn new(min: f64, max: f64, steps: usize) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && min < max) {
            return Err(Error::InvalidParameter(format!("range needs finite min < max, got {min}:{max}")));
        }
        if steps < 2 {
            return Err(Error::InvalidParameter(format!("range needs at least 2 steps, got {steps}")));
        }
        Ok(AxisRange { min, max, steps })
    }

    /// Grid points; the last one is exactly `max`.
    pub fn points(&self) -> Vec<f64> {
        let n = self.steps - 1;
        (0..=n)
            .map(|i| {
                if i == n {
                    self.max
                } else {
                    self.min + (self.max - self.min) * i as f64 / n as f64
                }
            })
            .collect()
    }
}

impl FromStr for AxisRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("expected <min>:<max>:<steps>, got {s:?}")));
        }
        let num = |x: &str| -> Result<f64> {
            x.trim().parse().map_err(|_| Error::Parse(format!("invalid number {x:?} in {s:?}")))
        };
        let steps = parts[2]
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("invalid step count {:?} in {s:?}", parts[2])))?;
        AxisRange::new(num(parts[0])?, num(parts[1])?, steps)
    }
}

impl fmt::Display for AxisRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", format_f64(self.min), format_f64(self.max), self.steps)
    }
}

/// Sweep over `α` (any reals) and `β ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub alpha: AxisRange,
    pub beta: AxisRange,
}

impl GridSpec {
    pub fn new(alpha: AxisRange, beta: AxisRange) -> Result<Self> {
        if beta.min < 0.0 || beta.max > 1.0 {
            return Err(Error::InvalidMixtureWeight {
                beta: if beta.min < 0.0 { beta.min } else { beta.max },
            });
        }
        Ok(GridSpec { alpha, beta })
    }

    /// The 50×50 sweep over `α ∈ [0.2, 2]`, `β ∈ [0, 1]`.
    pub fn default_sweep() -> Self {
        GridSpec {
            alpha: AxisRange { min: 0.2, max: 2.0, steps: 50 },
            beta: AxisRange { min: 0.0, max: 1.0, steps: 50 },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub alpha: f64,
    pub beta: f64,
    pub value: ExtReal,
}

/// Evaluates the grid row by row in parallel. Rows come back in `α` order and
/// each row in `β` order, regardless of scheduling.
///
/// `α` values within `1e-9` of 0 or 1 use the logarithmic generators.
pub fn discrimination_grid(p: &DiscreteMeasure, q: &DiscreteMeasure, spec: &GridSpec) -> Result<Vec<GridPoint>> {
    p.ensure_probability()?;
    q.ensure_probability()?;
    let betas = spec.beta.points();
    let scales = betas
        .iter()
        .map(|&b| mixture(p, q, b))
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<Result<Vec<GridPoint>>> = spec
        .alpha
        .points()
        .into_par_iter()
        .map(|alpha| -> Result<Vec<GridPoint>> {
            let g = Generator::power_or_limit(alpha)?;
            betas
                .iter()
                .zip(&scales)
                .map(|(&beta, m)| {
                    Ok(GridPoint {
                        alpha,
                        beta,
                        value: scaled_bregman(&g, p, q, m)?,
                    })
                })
                .collect()
        })
        .collect();
    let mut out = Vec::with_capacity(spec.alpha.steps * spec.beta.steps);
    for row in rows {
        out.extend(row?);
    }
    Ok(out)
}

/// Writes `alpha,beta,value` rows in shortest round-trip notation.
pub fn write_csv<W: Write>(mut w: W, points: &[GridPoint]) -> io::Result<()> {
    writeln!(w, "alpha,beta,value")?;
    for pt in points {
        writeln!(w, "{},{},{}", format_f64(pt.alpha), format_f64(pt.beta), pt.value)?;
    }
    w.flush()
}

/// Parses the output of [`write_csv`].
pub fn read_csv(text: &str) -> Result<Vec<GridPoint>> {
    let mut lines = text.lines();
    match lines.next() {
        Some("alpha,beta,value") => {}
        other => return Err(Error::Parse(format!("unexpected header {other:?}"))),
    }
    lines
        .filter(|l| !l.is_empty())
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 3 {
                return Err(Error::Parse(format!("bad row {line:?}")));
            }
            let num = |s: &str| -> Result<f64> {
                s.parse().map_err(|_| Error::Parse(format!("bad number {s:?}")))
            };
            let value = ExtReal::from_f64(num(f[2])?).ok_or_else(|| Error::Parse(format!("NaN in {line:?}")))?;
            Ok(GridPoint {
                alpha: num(f[0])?,
                beta: num(f[1])?,
                value,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bin(n: u64, p: f64) -> DiscreteMeasure {
        let pmf = crate::families::Binomial::new(n).unwrap().pmf_success(p);
        DiscreteMeasure::probability(pmf).unwrap()
    }

    #[test]
    fn range_parsing() {
        let r: AxisRange = "0.2:2:50".parse().unwrap();
        assert_eq!(r, AxisRange { min: 0.2, max: 2.0, steps: 50 });
        let pts = r.points();
        assert_eq!(pts.len(), 50);
        assert_eq!(pts[0], 0.2);
        assert_eq!(pts[49], 2.0);
        for bad in ["1:0:5", "0:1:1", "0:1", "a:1:3", "0:1:x"] {
            assert!(bad.parse::<AxisRange>().is_err(), "{bad}");
        }
    }

    #[test]
    fn beta_must_be_a_weight() {
        let a = AxisRange::new(0.0, 1.0, 3).unwrap();
        assert!(GridSpec::new(a, AxisRange::new(-0.5, 1.0, 3).unwrap()).is_err());
        assert!(GridSpec::new(a, AxisRange::new(0.0, 1.5, 3).unwrap()).is_err());
    }

    #[test]
    fn grid_order_and_limits() {
        let p = bin(10, 0.25);
        let q = bin(10, 0.2);
        let spec = GridSpec::new(AxisRange::new(0.0, 1.0, 3).unwrap(), AxisRange::new(0.0, 1.0, 2).unwrap()).unwrap();
        let pts = discrimination_grid(&p, &q, &spec).unwrap();
        let coords: Vec<(f64, f64)> = pts.iter().map(|g| (g.alpha, g.beta)).collect();
        assert_eq!(coords, vec![(0.0, 0.0), (0.0, 1.0), (0.5, 0.0), (0.5, 1.0), (1.0, 0.0), (1.0, 1.0)]);
        // α = 1 is KL, which does not depend on the scale
        let (a, b) = (pts[4].value.to_f64(), pts[5].value.to_f64());
        assert!((a - b).abs() < 1e-15);
        assert!(pts.iter().all(|g| g.value.to_f64() >= 0.0));
    }

    #[test]
    fn equal_laws_give_zero_grid() {
        let p = bin(10, 0.25);
        let pts = discrimination_grid(&p, &p, &GridSpec::default_sweep()).unwrap();
        assert!(pts.iter().all(|g| g.value == ExtReal::ZERO));
    }

    #[test]
    fn csv_round_trip() {
        let p = bin(6, 0.4);
        let q = bin(6, 0.35);
        let pts = discrimination_grid(&p, &q, &GridSpec::default_sweep()).unwrap();
        let mut buf = Vec::new();
        write_csv(&mut buf, &pts).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(read_csv(&text).unwrap(), pts);
        assert_eq!(text.lines().count(), 1 + 2500);
    }
}
