//! Optimal second-best reinsurance menus for a monopolistic reinsurer
//! facing VaR-minimizing insurers with hidden types.
//!
//! Types `(α, k)` are mapped to `(a, k)` with `a = VaR_α(X_k)`. Every
//! optimal menu has indirect utility `(a - τ*)_+`, so each solver reduces
//! to a scalar search over the kink `τ*` followed by a closed-form rule for
//! the contract and premium of each type.
//!
//! The numerical core is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases at the crate root fix `f64`.
//!
//! ```
//! use reinmenu::{solver::stop_loss, CostFunctional, SearchSettings, TypeDistribution, TypeLaw, Uniform};
//! use reinmenu::contract::MenuRule;
//!
//! let law = TypeLaw::DegenerateAlpha { k: Uniform::new(5000.0, 25000.0)?, alpha: (-3f64).exp() };
//! let dist = TypeDistribution::exponential(law)?;
//! let cost = CostFunctional::expected_value(0.1)?;
//! let menu = stop_loss::solve(&dist, &cost, SearchSettings::default())?;
//! let exact = 225000.0 / (5.0 - 1.1f64.ln());
//! assert!((menu.tau_star() - exact).abs() < 1e-6 * exact);
//! # Ok::<(), reinmenu::Error>(())
//! ```

// `!(x > 0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod contract;
pub mod error;
pub mod optimize;
pub mod quadrature;
pub mod risk_model;
pub mod scalar;
pub mod solver;
pub mod type_space;
pub mod verification;

pub use contract::{Contract, ContractClass, MenuEntry, MenuRule};
pub use error::{Error, Result};
pub use optimize::SearchSettings;
pub use risk_model::{CostFunctional, Distortion, LossModel, LossShape};
pub use scalar::Scalar;
pub use solver::Market;
pub use type_space::{
    FamilyConstants, LossFamily, QuadratureSettings, TransformedType, TypeAtom, TypeDistribution, TypeLaw, Uniform,
};
pub use verification::{GenericMenu, PiecewiseLinearConvexUtility};

/// Double-precision aliases.
pub mod f64 {
    pub type CostFunctional = crate::CostFunctional<f64>;
    pub type Distortion = crate::Distortion<f64>;
    pub type LossModel = crate::LossModel<f64>;
    pub type TypeDistribution = crate::TypeDistribution<f64>;
    pub type TypeLaw = crate::TypeLaw<f64>;
    pub type TransformedType = crate::TransformedType<f64>;
    pub type Market = crate::Market<f64>;
    pub type GenericMenu = crate::GenericMenu<f64>;
    pub type Utility = crate::PiecewiseLinearConvexUtility<f64>;
    pub type StopLossMenu = crate::solver::stop_loss::StopLossMenu<f64>;
    pub type QuotaShareMenu = crate::solver::quota_share::QuotaShareMenu<f64>;
    pub type ChangeLossMenu = crate::solver::change_loss::ChangeLossMenu<f64>;
}

/// Single-precision aliases.
pub mod f32 {
    pub type CostFunctional = crate::CostFunctional<f32>;
    pub type Distortion = crate::Distortion<f32>;
    pub type LossModel = crate::LossModel<f32>;
    pub type TypeDistribution = crate::TypeDistribution<f32>;
    pub type TypeLaw = crate::TypeLaw<f32>;
    pub type TransformedType = crate::TransformedType<f32>;
    pub type Market = crate::Market<f32>;
    pub type GenericMenu = crate::GenericMenu<f32>;
    pub type Utility = crate::PiecewiseLinearConvexUtility<f32>;
    pub type StopLossMenu = crate::solver::stop_loss::StopLossMenu<f32>;
    pub type QuotaShareMenu = crate::solver::quota_share::QuotaShareMenu<f32>;
    pub type ChangeLossMenu = crate::solver::change_loss::ChangeLossMenu<f32>;
}
