//! Quota-share menus: `J[φ_t]` and the bang-bang coinsurance rule.

use super::{maximize_kink, KinkOptimum, Market};
use crate::contract::{Contract, ContractClass, MenuEntry, MenuRule};
use crate::error::Result;
use crate::optimize::SearchSettings;
use crate::risk_model::{CostFunctional, LossModel};
use crate::scalar::{pos, Scalar};
use crate::type_space::{FamilyConstants, TransformedType, TypeDistribution};

/// `H[X]`, which splits types into those that can afford full cover
/// (`a ≥ H[X_k]`) and those that cannot.
pub fn full_cost<T: Scalar>(cost: &CostFunctional<T>, loss: &LossModel<T>) -> Result<T> {
    cost.full_cost(loss)
}

impl<T: Scalar> Market<T> {
    /// `J[φ_t] = ∫ {1_{t≤a}(a - H[X_k]) - (a - t)_+} dQ`, less the atoms at
    /// `a = t < H[X_k]`.
    pub fn quota_share_objective(&self, t: T) -> Result<T> {
        self.kink_objective(
            t,
            |k| {
                let h = self.full_cost(k);
                Ok((t - h, pos(t - h)))
            },
            &[],
        )
    }
}

/// `J[φ_t]` for the given market.
pub fn j_phi<T: Scalar>(t: T, dist: &TypeDistribution<T>, cost: &CostFunctional<T>) -> Result<T> {
    Market::new(dist, cost)?.quota_share_objective(t)
}

/// Optimal quota-share menu.
pub fn solve<T: Scalar>(
    dist: &TypeDistribution<T>,
    cost: &CostFunctional<T>,
    settings: SearchSettings,
) -> Result<QuotaShareMenu<T>> {
    let market = Market::new(dist, cost)?;
    let opt = maximize_kink(&market, |t| market.quota_share_objective(t), T::zero(), settings)?;
    Ok(QuotaShareMenu {
        optimum: opt,
        constants: market.constants(),
    })
}

/// Optimal quota-share menu: kink `τ*` plus the per-type rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuotaShareMenu<T> {
    optimum: KinkOptimum<T>,
    constants: FamilyConstants<T>,
}

impl<T: Scalar> QuotaShareMenu<T> {
    pub fn with_kink(market: &Market<T>, tau_star: T) -> Result<Self> {
        Ok(Self {
            optimum: KinkOptimum {
                tau_star,
                objective: market.quota_share_objective(tau_star)?,
            },
            constants: market.constants(),
        })
    }

    /// Coinsurance rate: 1 above the kink, and at the kink when `a ≥ H[X_k]`.
    pub fn lambda(&self, t: TransformedType<T>) -> T {
        let tau = self.optimum.tau_star;
        if t.a > tau || (t.a == tau && t.a >= self.constants.full_cost(t.k)) {
            T::one()
        } else {
            T::zero()
        }
    }
}

impl<T: Scalar> MenuRule<T> for QuotaShareMenu<T> {
    fn class(&self) -> ContractClass {
        ContractClass::QuotaShare
    }

    fn tau_star(&self) -> T {
        self.optimum.tau_star
    }

    fn objective_value(&self) -> T {
        self.optimum.objective
    }

    fn entry(&self, t: TransformedType<T>) -> MenuEntry<T> {
        if self.lambda(t) == T::zero() {
            return MenuEntry {
                contract: Contract::QuotaShare { lambda: T::zero() },
                premium: T::zero(),
            };
        }
        MenuEntry {
            contract: Contract::QuotaShare { lambda: T::one() },
            premium: self.optimum.tau_star,
        }
    }
}
