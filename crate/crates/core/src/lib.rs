//! Dual-band (microwave + mm-wave) two-user multiple-access relay channel.
//!
//! The crate is split along the computation pipeline:
//!
//! * [`channel`]: geometry, fading and the microwave summary `(σ_R, σ_D, γ)`.
//! * [`regions`]: achievable rate regions, the jointly-near test and the sum-rate functionals.
//! * [`allocator`]: closed-form optimal mm-wave power allocation and its regime paths.
//! * [`oracle`]: numeric solvers and a KKT checker used to validate the closed forms.

pub mod allocator;
pub mod channel;
mod error;
pub mod oracle;
pub mod presets;
mod quadrature;
pub mod regions;

pub use error::{MarcError, Result};
