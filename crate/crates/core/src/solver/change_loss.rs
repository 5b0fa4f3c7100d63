//! Change-loss menus, available when `sup_k θ*_k ≤ L`.

use serde::Serialize;

use super::{maximize_kink, KinkOptimum, Market};
use crate::contract::{Contract, ContractClass, MenuEntry, MenuRule};
use crate::error::{Error, Result};
use crate::optimize::SearchSettings;
use crate::risk_model::CostFunctional;
use crate::scalar::{lit, pos, Scalar};
use crate::type_space::{FamilyConstants, TransformedType, TypeDistribution};

/// Relative slack in `sup θ* ≤ L`, so boundary cases built from the same
/// quantity do not fail on rounding.
const BOUNDARY_REL_TOL: f64 = 1e-12;

/// Outcome of checking `sup_k θ*_k ≤ L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AssumptionCheck {
    pub sup_theta_star: f64,
    pub lower_support: f64,
    pub holds: bool,
}

impl<T: Scalar> Market<T> {
    pub fn assumption_check(&self) -> AssumptionCheck {
        let sup = self.sup_theta_star();
        let lower = self.dist().lower_support();
        let slack = lower.abs() * lit(BOUNDARY_REL_TOL);
        AssumptionCheck {
            sup_theta_star: sup.to_f64().unwrap_or(f64::NAN),
            lower_support: lower.to_f64().unwrap_or(f64::NAN),
            holds: sup <= lower + slack,
        }
    }

    pub(crate) fn require_assumption(&self) -> Result<()> {
        let check = self.assumption_check();
        if check.holds {
            Ok(())
        } else {
            Err(Error::AssumptionViolated {
                sup_theta_star: check.sup_theta_star,
                lower_support: check.lower_support,
            })
        }
    }

    /// `∫ {1_{t≤a}(a - ξ_k) - (a - t)_+} dQ`, less the atoms at `a = t < ξ_k`.
    pub fn change_loss_objective(&self, t: T) -> Result<T> {
        self.require_assumption()?;
        self.kink_objective(
            t,
            |k| {
                let xi = self.xi(k);
                Ok((t - xi, pos(t - xi)))
            },
            &[],
        )
    }
}

/// `(sup_k θ*_k, L, sup ≤ L)`.
pub fn assumption_check<T: Scalar>(dist: &TypeDistribution<T>, cost: &CostFunctional<T>) -> Result<AssumptionCheck> {
    Ok(Market::new(dist, cost)?.assumption_check())
}

/// Change-loss objective at `φ_t`; errors when the assumption fails.
pub fn j_phi_cl<T: Scalar>(t: T, dist: &TypeDistribution<T>, cost: &CostFunctional<T>) -> Result<T> {
    Market::new(dist, cost)?.change_loss_objective(t)
}

/// Optimal change-loss menu; errors when the assumption fails.
pub fn solve<T: Scalar>(
    dist: &TypeDistribution<T>,
    cost: &CostFunctional<T>,
    settings: SearchSettings,
) -> Result<ChangeLossMenu<T>> {
    let market = Market::new(dist, cost)?;
    market.require_assumption()?;
    let opt = maximize_kink(
        &market,
        |t| market.change_loss_objective(t),
        dist.lower_support(),
        settings,
    )?;
    Ok(ChangeLossMenu {
        optimum: opt,
        constants: market.constants(),
    })
}

/// Optimal change-loss menu: kink `τ*` plus the per-type rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChangeLossMenu<T> {
    optimum: KinkOptimum<T>,
    constants: FamilyConstants<T>,
}

impl<T: Scalar> ChangeLossMenu<T> {
    pub fn with_kink(market: &Market<T>, tau_star: T) -> Result<Self> {
        Ok(Self {
            optimum: KinkOptimum {
                tau_star,
                objective: market.change_loss_objective(tau_star)?,
            },
            constants: market.constants(),
        })
    }

    fn served(&self, t: TransformedType<T>) -> bool {
        let tau = self.optimum.tau_star;
        let xi = self.constants.xi(t.k).unwrap_or(T::infinity());
        t.a > tau || (t.a == tau && t.a >= xi)
    }
}

impl<T: Scalar> MenuRule<T> for ChangeLossMenu<T> {
    fn class(&self) -> ContractClass {
        ContractClass::ChangeLoss
    }

    fn tau_star(&self) -> T {
        self.optimum.tau_star
    }

    fn objective_value(&self) -> T {
        self.optimum.objective
    }

    fn entry(&self, t: TransformedType<T>) -> MenuEntry<T> {
        if !self.served(t) {
            return MenuEntry {
                contract: Contract::ChangeLoss {
                    lambda: T::zero(),
                    deductible: T::infinity(),
                },
                premium: T::zero(),
            };
        }
        let d = self.constants.theta_star(t.k);
        MenuEntry {
            contract: Contract::ChangeLoss {
                lambda: T::one(),
                deductible: d,
            },
            premium: self.optimum.tau_star - d,
        }
    }
}
