//! Stop-loss menus: pointwise-optimal deductibles `d*(τ)`, the profit
//! density `Φ(τ)`, and the search over the kink.

use super::{maximize_kink, KinkOptimum, Market};
use crate::contract::{Contract, ContractClass, MenuEntry, MenuRule};
use crate::error::Result;
use crate::optimize::SearchSettings;
use crate::risk_model::{CostFunctional, LossModel};
use crate::scalar::{pos, Scalar};
use crate::type_space::{FamilyConstants, TransformedType, TypeDistribution};

/// `d*(τ)`: `θ* ∧ τ` above the kink, `θ*` at the kink when `τ ≥ ξ`, and
/// `+inf` (no cover) otherwise.
pub fn optimal_deductible<T: Scalar>(
    tau: T,
    t: TransformedType<T>,
    cost: &CostFunctional<T>,
    loss: &LossModel<T>,
) -> Result<T> {
    let theta = cost.theta_star(loss);
    let xi = if theta.is_finite() {
        cost.xi(loss)?
    } else {
        T::infinity()
    };
    Ok(deductible_rule(tau, t.a, theta, xi))
}

fn deductible_rule<T: Scalar>(tau: T, a: T, theta: T, xi: T) -> T {
    if a > tau {
        theta.min(tau)
    } else if a == tau && tau >= xi {
        theta
    } else {
        T::infinity()
    }
}

/// `Φ(τ) = (a - d*)_+ - H[(X - d*)_+] - (a - τ)_+`.
pub fn phi<T: Scalar>(tau: T, t: TransformedType<T>, cost: &CostFunctional<T>, loss: &LossModel<T>) -> Result<T> {
    let d = optimal_deductible(tau, t, cost, loss)?;
    if d == T::infinity() {
        return Ok(T::zero());
    }
    Ok(pos(t.a - d) - cost.stop_loss_cost(loss, d)? - pos(t.a - tau))
}

impl<T: Scalar> Market<T> {
    /// `∫ Φ(τ) dQ`.
    pub fn stop_loss_objective(&self, tau: T) -> Result<T> {
        let theta1 = self.constants().theta_star;
        let k_breaks: Vec<T> = if theta1 > T::zero() && theta1.is_finite() {
            vec![tau / theta1]
        } else {
            Vec::new()
        };
        self.kink_objective(
            tau,
            |k| {
                let theta = self.theta_star(k);
                let xi = self.xi(k);
                let above = if theta < tau {
                    tau - xi
                } else {
                    -self.stop_loss_cost(k, tau)?
                };
                let at = if tau >= xi { tau - xi } else { T::zero() };
                Ok((above, at))
            },
            &k_breaks,
        )
    }
}

/// `∫ Φ(τ) dQ` for the given market.
pub fn objective<T: Scalar>(tau: T, dist: &TypeDistribution<T>, cost: &CostFunctional<T>) -> Result<T> {
    Market::new(dist, cost)?.stop_loss_objective(tau)
}

/// Optimal stop-loss menu.
pub fn solve<T: Scalar>(
    dist: &TypeDistribution<T>,
    cost: &CostFunctional<T>,
    settings: SearchSettings,
) -> Result<StopLossMenu<T>> {
    let market = Market::new(dist, cost)?;
    let lower = dist.lower_support();
    let opt = maximize_kink(&market, |tau| market.stop_loss_objective(tau), lower, settings)?;
    debug_assert!(opt.tau_star >= lower);
    Ok(StopLossMenu {
        optimum: opt,
        constants: market.constants(),
    })
}

/// Optimal stop-loss menu: kink `τ*` plus the per-type rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopLossMenu<T> {
    optimum: KinkOptimum<T>,
    constants: FamilyConstants<T>,
}

impl<T: Scalar> StopLossMenu<T> {
    /// Menu with a given kink, e.g. read back from a file.
    pub fn with_kink(market: &Market<T>, tau_star: T) -> Result<Self> {
        Ok(Self {
            optimum: KinkOptimum {
                tau_star,
                objective: market.stop_loss_objective(tau_star)?,
            },
            constants: market.constants(),
        })
    }

    pub fn deductible(&self, t: TransformedType<T>) -> T {
        let xi = self.constants.xi(t.k).unwrap_or(T::infinity());
        deductible_rule(self.optimum.tau_star, t.a, self.constants.theta_star(t.k), xi)
    }
}

impl<T: Scalar> MenuRule<T> for StopLossMenu<T> {
    fn class(&self) -> ContractClass {
        ContractClass::StopLoss
    }

    fn tau_star(&self) -> T {
        self.optimum.tau_star
    }

    fn objective_value(&self) -> T {
        self.optimum.objective
    }

    fn entry(&self, t: TransformedType<T>) -> MenuEntry<T> {
        let d = self.deductible(t);
        if d == T::infinity() {
            return MenuEntry::null();
        }
        MenuEntry {
            contract: Contract::StopLoss { deductible: d },
            premium: self.optimum.tau_star - d,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::type_space::{TypeAtom, TypeLaw, Uniform};

    fn ev() -> CostFunctional<f64> {
        CostFunctional::expected_value(0.1).unwrap()
    }

    fn tt(a: f64, k: f64) -> TransformedType<f64> {
        TransformedType { a, k }
    }

    #[test]
    fn deductible_branches() {
        let cost = ev();
        let loss = LossModel::exponential(10000.0).unwrap();
        let theta = 10000.0 * 1.1f64.ln();
        let d = optimal_deductible(38861.6, tt(40000.0, 10000.0), &cost, &loss).unwrap();
        assert!((d - theta).abs() < 1e-9);
        assert_eq!(
            optimal_deductible(500.0, tt(40000.0, 10000.0), &cost, &loss).unwrap(),
            500.0
        );
        assert_eq!(
            optimal_deductible(50000.0, tt(40000.0, 10000.0), &cost, &loss).unwrap(),
            f64::INFINITY
        );
        // a = τ below ξ ≈ 10953.1
        assert_eq!(
            optimal_deductible(10000.0, tt(10000.0, 10000.0), &cost, &loss).unwrap(),
            f64::INFINITY
        );
        let d = optimal_deductible(12000.0, tt(12000.0, 10000.0), &cost, &loss).unwrap();
        assert!((d - theta).abs() < 1e-9);
    }

    #[test]
    fn phi_matches_closed_branches() {
        let cost = ev();
        let k = 10000.0;
        let loss = LossModel::exponential(k).unwrap();
        let v = phi(30000.0, tt(40000.0, k), &cost, &loss).unwrap();
        assert!((v - (30000.0 - k * (1.0 + 1.1f64.ln()))).abs() < 1e-9);
        let v = phi(500.0, tt(40000.0, k), &cost, &loss).unwrap();
        assert!((v + 1.1 * k * (-500.0 / k).exp()).abs() < 1e-9);
        assert_eq!(phi(50000.0, tt(40000.0, k), &cost, &loss).unwrap(), 0.0);
        assert_eq!(phi(f64::INFINITY, tt(40000.0, k), &cost, &loss).unwrap(), 0.0);
    }

    #[test]
    fn single_atom_extracts_surplus() {
        let atoms = vec![TypeAtom {
            alpha: (-4f64).exp(),
            k: 1000.0,
            weight: 1.0,
        }];
        let dist = TypeDistribution::exponential(TypeLaw::Discrete(atoms)).unwrap();
        let menu = solve(&dist, &ev(), SearchSettings::default()).unwrap();
        assert!((menu.tau_star() - 4000.0).abs() < 1e-9);
        let xi = 1000.0 * (1.0 + 1.1f64.ln());
        assert!((menu.objective_value() - (4000.0 - xi)).abs() < 1e-9);
    }

    #[test]
    fn unprofitable_market_shuts_down() {
        // every a is below ξ_k: no profitable kink
        let law = TypeLaw::DegenerateAlpha {
            k: Uniform::new(1.0, 2.0).unwrap(),
            alpha: 0.5,
        };
        let dist = TypeDistribution::exponential(law).unwrap();
        let menu = solve(
            &dist,
            &ev(),
            SearchSettings {
                grid_points: 101,
                refine_tol: 1e-6,
            },
        )
        .unwrap();
        assert_eq!(menu.tau_star(), f64::INFINITY);
        assert_eq!(menu.objective_value(), 0.0);
        assert_eq!(menu.entry(tt(1.0, 1.5)), MenuEntry::null());
    }
}
