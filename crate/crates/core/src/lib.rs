//! φ-divergences and scaled Bregman distances.
//!
//! For finite discrete measures the distances are computed exactly:
//!
//! ```text
//! D_φ(P, M)     = Σ m_i φ(p_i/m_i)
//! B_φ(P, Q | M) = Σ m_i [φ(p_i/m_i) − φ(q_i/m_i) − φ′₊(q_i/m_i)(p_i/m_i − q_i/m_i)]
//! ```
//!
//! Inside an exponential family the power divergences `D_α` and the power
//! distances `B_α` have closed forms in terms of the cumulant, see
//! [`expfam`]. The [`oracle`] module recomputes the same quantities by
//! brute-force summation and quadrature.
//!
//! ```
//! use scaled_bregman::{b_phi, d_phi, DiscreteMeasure, Generator};
//!
//! let p = DiscreteMeasure::probability(vec![0.5, 0.5]).unwrap();
//! let q = DiscreteMeasure::probability(vec![0.25, 0.75]).unwrap();
//! let m = DiscreteMeasure::new(vec![0.3, 0.9]).unwrap();
//! let kl = Generator::kl();
//! let d = d_phi(&kl, &p, &q).unwrap().to_f64();
//! let b = b_phi(&kl, &p, &q, &m).unwrap().to_f64();
//! assert!((d - b).abs() < 1e-15);
//! ```

pub mod discrete;
pub mod error;
pub mod expfam;
pub mod extreal;
pub mod families;
pub mod generators;
pub mod grid;
pub mod oracle;
pub mod sum;
pub mod suites;

pub use discrete::{b_phi, d_phi, lemma1_lower_bound, mixture, scaled_bregman, DiscreteMeasure, MergeMap};
pub use error::{Error, Result};
pub use expfam::{Cumulant, DomainClass, ExpFamily, NaturalParam};
pub use extreal::{format_f64, ExtReal};
pub use families::FamilySpec;
pub use generators::{ConvexFunction, Generator};
pub use grid::{AxisRange, GridPoint, GridSpec};
