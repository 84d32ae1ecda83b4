//! Hierarchical Bayesian updating of planar-frame joint fixity with a
//! Dirichlet-process Gaussian-mixture prior.
//!
//! The numerical core is generic over [`Scalar`] (`f64` or `f32`); the
//! aliases below fix the precision for everyday use.

pub mod analysis;
pub mod frame;
pub mod linalg;
pub mod sampler;
pub mod scalar;
pub mod synth;

pub use scalar::Scalar;

pub type Frame = frame::FrameModel<f64>;
pub type Frame32 = frame::FrameModel<f32>;
pub type Fixity = frame::FixityVector<f64>;
pub type Observations = sampler::ObservationSet<f64>;
pub type State = sampler::ChainState<f64>;
pub type Trace = sampler::PosteriorTrace<f64>;
pub type Record = sampler::TraceRecord<f64>;
pub type Simulator64 = sampler::FrameSimulator<f64>;
