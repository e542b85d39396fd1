//! Riemannian almost product manifolds modelled on invariant frames of Lie
//! groups: classification tensors, the canonical connection and its curvature.

pub mod apclass;
pub mod curvature;
pub mod error;
pub mod frame;
pub mod natconn;
pub mod sample;
pub mod tensor;

pub use apclass::{classify, ClassLabel, ClassificationReport, DEFAULT_CLASS_TOL};
pub use error::{Error, Result};
pub use frame::{Connection, FrameManifold, StructureConstants};
pub use natconn::{canonical_connection, ConnectionPair, TorsionDecomposition};
pub use tensor::{Matrix, MetricPair, Tensor};
