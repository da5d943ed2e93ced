//! Electrically pumped quantum-well two-photon-emission pair source.
//!
//! The crate computes the second-order two-photon matrix element from a
//! reduced 14-band basis ([`band`]), the cavity density of states and device
//! geometry ([`cavity`]), the absolute pair rate and its spectrum ([`rate`]),
//! emission-event traces ([`events`]), and the Bell statistics of the emitted
//! energy-entangled pairs ([`entanglement`]).
//!
//! Internally everything is SI; see [`units`] for the conversion conventions.

// `!(x > 0.0)` style guards are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod band;
pub mod cavity;
pub mod entanglement;
pub mod error;
pub mod events;
pub mod quadrature;
pub mod rate;
pub mod units;

pub use band::{MaterialParams, PolarizationGeometry};
pub use cavity::{CavitySpec, DeviceGeometry};
pub use entanglement::{AnalyzerSetting, Arm, ChshSettings, TwoPhotonState};
pub use error::{Error, Result};
pub use events::{ArmTag, EventTrace};
pub use rate::{PairRateResult, RateInputs, SpectralCurve};
