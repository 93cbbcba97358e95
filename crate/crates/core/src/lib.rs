//! Visual dynamic complexity toolkit.
//!
//! A two-pathway angular velocity decoding model whose motion response is
//! used as a metric of how dynamically complex a visual scene is, together
//! with stimulus generators, a simulated arena with a camera-bearing robot,
//! profiling aggregates and a looming-detector case study.

pub mod arena;
pub mod avdm;
pub mod collision;
pub mod error;
pub mod frame;
pub mod metric;
pub mod profiler;
pub mod stimulus;

pub use error::{Error, Result};
pub use frame::{Frame, VideoSequence};
