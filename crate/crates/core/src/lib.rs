//! Closed-form model of the discrete sinc quantum state and its Fejér
//! measurement distribution, together with estimators that recover the
//! encoded value `t` from measurement counts.
//!
//! The crate is organised bottom-up:
//!
//! - [`sinc`]: the state amplitudes, the outcome distribution `p_{N,t}` and a
//!   residual report for the algebraic identities the state satisfies.
//! - [`sampler`]: seeded shot generation, counting, round splitting and a
//!   readout-noise channel.
//! - [`estimators`]: maximum likelihood, ratio-based, coin approximation,
//!   interpolation-based and identity-based estimates of `t`.
//! - [`uncertainty`]: the ratio-to-decimal map `D_N`, delta-method and Beta
//!   credible intervals, and moment formulas for the ratio estimators.
//!
//! ```
//! use sincd::{FejerModel, estimators, sampler};
//!
//! let model = FejerModel::new(3, 6.3).unwrap();
//! let pmf = model.pmf();
//! let shots = sampler::sample_shots(&(&pmf).into(), 20_000, 7).unwrap();
//! let counts = shots.to_counts().unwrap();
//! let report = estimators::rbe(&counts.frequencies()).unwrap();
//! assert!((report.t_hat - 6.3).abs() < 0.05);
//! ```

#![forbid(unsafe_code)]

mod error;
mod numeric;

pub mod estimators;
pub mod sampler;
pub mod sinc;
pub mod uncertainty;

pub use error::{Error, Result};
pub use estimators::{AdjacentPair, EstimateReport, Frequencies, Method};
pub use sampler::{CountsHistogram, MeasurementDistribution, ShotRecord};
pub use sinc::{FejerModel, FejerPmf, IdentityReport, StateVector};
pub use uncertainty::{Interval, IntervalKind, MomentForm, MomentReport};
