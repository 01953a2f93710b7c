//! Coverage probability of a typical vehicle on a Poisson-line road network,
//! served either directly by its nearest road-side unit (RSU) or through one
//! relaying vehicle.
//!
//! Roads form a motion-invariant Poisson line process; RSUs and transmitting
//! vehicles are independent Poisson processes along each road; links see
//! Rayleigh fading and power-law path loss. The analytic pipeline evaluates
//! the coverage expressions by adaptive quadrature; [`montecarlo`] estimates
//! every analytic quantity from sampled networks so the two can be compared.
//!
//! ```no_run
//! use plpcov::{ModelParams, QuadratureSpec, relay_coverage};
//!
//! let params = ModelParams::default();
//! let est = relay_coverage::relay_coverage(0.1, &params, &QuadratureSpec::default()).unwrap();
//! println!("one-hop relay coverage at r1 = 100 m: {:.4}", est.value);
//! ```

pub mod channel;
pub mod distributions;
pub mod error;
pub mod geometry;
pub mod laplace;
pub mod model;
pub mod montecarlo;
pub mod quadrature;
pub mod relay_coverage;
pub mod validation;

pub use distributions::ServingEvent;
pub use error::{Error, Result};
pub use geometry::{Line, NetworkRealization, Point2};
pub use laplace::{Conditioning, InterferenceComponent};
pub use model::{derive_scales, ModelParams, SinrScales};
pub use montecarlo::{Estimate, McConfig};
pub use quadrature::QuadratureSpec;
pub use relay_coverage::{CoverageEstimate, Method, RelayAnalyzer};
