//! Loss distributions, distortion functions, and the reinsurer's
//! distortion-based cost functional.

mod cost;
mod distortion;
mod loss;

pub use cost::CostFunctional;
pub use distortion::{Distortion, TabulatedDistortion};
pub use loss::{LossModel, LossShape, SurvivalFn};
