//! Secrecy outage probability and ergodic secrecy rate of a threshold-selection
//! decode-and-forward relay link observed by a passive eavesdropper.

pub mod asymptotics;
pub mod closed_form;
pub mod error;
pub mod fading_model;
pub mod oracles;
pub mod rng;
pub mod scalar;
pub mod special_fn;
pub mod sweep;

pub use error::{Error, Result};
pub use fading_model::{CsiMode, LinkRates, LinkSnrDb, Scheme};
pub use scalar::Scalar;

pub type Params = fading_model::SystemParams<f64>;
pub type Params32 = fading_model::SystemParams<f32>;
pub type Rates = LinkRates<f64>;
