pub mod anchors;
pub mod error;
pub mod estimators;
pub mod geometry;
pub mod metrics;
pub mod radio;
pub mod rng;
pub mod sim;
pub mod trajopt;

pub use error::{Error, Result};
pub use geometry::Vec3;
