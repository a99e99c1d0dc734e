//! Compensated summation.
//!
//! Identities between distances are checked at `1e-12`, which naive
//! left-to-right summation does not reach for supports of size `~1e4`.

use crate::error::Result;
use crate::extreal::ExtReal;

/// Kahan–Babuška–Neumaier accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = NeumaierSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of `f64` values.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<NeumaierSum>().value()
}

/// Accumulates extended reals: infinities are tracked separately from the
/// compensated finite part.
#[derive(Debug, Clone, Default)]
pub struct ExtSum {
    finite: NeumaierSum,
    pos_inf: bool,
    neg_inf: bool,
}

impl ExtSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: ExtReal) {
        match x {
            ExtReal::Finite(v) => self.finite.add(v),
            ExtReal::PosInf => self.pos_inf = true,
            ExtReal::NegInf => self.neg_inf = true,
        }
    }

    pub fn value(&self) -> Result<ExtReal> {
        let finite = ExtReal::from_f64(self.finite.value()).unwrap_or(ExtReal::PosInf);
        let mut acc = finite;
        if self.pos_inf {
            acc = acc.checked_add(ExtReal::PosInf)?;
        }
        if self.neg_inf {
            acc = acc.checked_add(ExtReal::NegInf)?;
        }
        Ok(acc)
    }
}
