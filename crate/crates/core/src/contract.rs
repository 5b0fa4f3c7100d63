//! Reinsurance contracts and menu entries.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::risk_model::{CostFunctional, LossModel};
use crate::scalar::{pos, Scalar};
use crate::type_space::TransformedType;

/// Contract class a solver optimizes over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContractClass {
    StopLoss,
    QuotaShare,
    ChangeLoss,
}

impl ContractClass {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::StopLoss => "stop_loss",
            Self::QuotaShare => "quota_share",
            Self::ChangeLoss => "change_loss",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "stop_loss" => Some(Self::StopLoss),
            "quota_share" => Some(Self::QuotaShare),
            "change_loss" => Some(Self::ChangeLoss),
            _ => None,
        }
    }
}

impl fmt::Display for ContractClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Indemnity schedule `I(x) = λ (x - d)_+`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Contract<T> {
    /// No cover.
    Null,
    StopLoss {
        deductible: T,
    },
    QuotaShare {
        lambda: T,
    },
    ChangeLoss {
        lambda: T,
        deductible: T,
    },
}

impl<T: Scalar> Contract<T> {
    pub fn stop_loss(deductible: T) -> Result<Self> {
        check_deductible(deductible)?;
        Ok(Self::StopLoss { deductible })
    }

    pub fn quota_share(lambda: T) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(Self::QuotaShare { lambda })
    }

    pub fn change_loss(lambda: T, deductible: T) -> Result<Self> {
        check_lambda(lambda)?;
        check_deductible(deductible)?;
        Ok(Self::ChangeLoss { lambda, deductible })
    }

    /// Coinsurance rate and deductible: `I(x) = λ (x - d)_+`.
    pub fn parameters(&self) -> (T, T) {
        match *self {
            Self::Null => (T::zero(), T::infinity()),
            Self::StopLoss { deductible } => (T::one(), deductible),
            Self::QuotaShare { lambda } => (lambda, T::zero()),
            Self::ChangeLoss { lambda, deductible } => (lambda, deductible),
        }
    }

    /// True when the indemnity is identically zero.
    pub fn is_null(&self) -> bool {
        let (lambda, d) = self.parameters();
        lambda == T::zero() || d == T::infinity()
    }

    /// `I(x)`.
    pub fn indemnity(&self, x: T) -> T {
        let (lambda, d) = self.parameters();
        if lambda == T::zero() || d == T::infinity() {
            return T::zero();
        }
        lambda * pos(x - d)
    }

    /// Reduction of the agent's VaR at level `a`: `VaR(X) - VaR(X - I(X)) = I(a)`
    /// before premium.
    pub fn risk_reduction(&self, a: T) -> T {
        self.indemnity(a)
    }

    /// `H[I(X)] = λ H[(X - d)_+]`.
    pub fn cost(&self, cost: &CostFunctional<T>, loss: &LossModel<T>) -> Result<T> {
        let (lambda, d) = self.parameters();
        if lambda == T::zero() || d == T::infinity() {
            return Ok(T::zero());
        }
        Ok(lambda * cost.stop_loss_cost(loss, d)?)
    }
}

fn check_deductible<T: Scalar>(d: T) -> Result<()> {
    if d.is_nan() || d < T::zero() {
        return invalid(format!("deductible must lie in [0, inf], got {d}"));
    }
    Ok(())
}

fn check_lambda<T: Scalar>(lambda: T) -> Result<()> {
    if !(lambda >= T::zero() && lambda <= T::one()) {
        return invalid(format!("coinsurance rate must lie in [0, 1], got {lambda}"));
    }
    Ok(())
}

/// A contract with its premium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MenuEntry<T> {
    pub contract: Contract<T>,
    pub premium: T,
}

impl<T: Scalar> MenuEntry<T> {
    pub fn null() -> Self {
        Self {
            contract: Contract::Null,
            premium: T::zero(),
        }
    }

    /// `I(a) - P`: the agent's net VaR reduction.
    pub fn net_benefit(&self, a: T) -> T {
        self.contract.risk_reduction(a) - self.premium
    }
}

/// Menu given as a rule from transformed types to entries.
pub trait MenuRule<T: Scalar>: Sync {
    fn class(&self) -> ContractClass;

    /// Kink of the indirect utility `(a - τ*)_+`; `+inf` for the shut-down menu.
    fn tau_star(&self) -> T;

    /// Optimal profit `∫ (P - H[I(X)]) dQ`.
    fn objective_value(&self) -> T;

    fn entry(&self, t: TransformedType<T>) -> MenuEntry<T>;
}
