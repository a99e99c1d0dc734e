//! Inputs shared by the benchmarks.

use scaled_bregman::families::Binomial;
use scaled_bregman::DiscreteMeasure;

/// `Bin(n, p̃)` as a discrete probability measure.
pub fn binomial_measure(n: u64, ptilde: f64) -> DiscreteMeasure {
    let pmf = Binomial::new(n).expect("n >= 1").pmf_success(ptilde);
    DiscreteMeasure::probability(pmf).expect("binomial masses sum to one")
}

/// Deterministic strictly positive probability vector of length `d`.
pub fn wavy_measure(d: usize, phase: f64) -> DiscreteMeasure {
    let raw: Vec<f64> = (0..d).map(|i| 1.5 + (i as f64 * 0.37 + phase).sin()).collect();
    let total: f64 = raw.iter().sum();
    let mut masses: Vec<f64> = raw.iter().map(|x| x / total).collect();
    let head: f64 = masses[..d - 1].iter().sum();
    masses[d - 1] = 1.0 - head;
    DiscreteMeasure::probability(masses).expect("normalized")
}
