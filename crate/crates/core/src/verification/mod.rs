//! Executable checks: menu audits, the call decomposition of objectives,
//! first-best mimicry, and Monte Carlo profit estimates.

mod menu;
mod utility;

pub use menu::{GenericMenu, MenuItem, Violation, ViolationReport, AUDIT_TOL};
pub use utility::PiecewiseLinearConvexUtility;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::contract::{Contract, ContractClass, MenuEntry, MenuRule};
use crate::error::{domain, Error, Result};
use crate::risk_model::CostFunctional;
use crate::scalar::{pos, Scalar};
use crate::solver::Market;
use crate::type_space::{TransformedType, TypeDistribution};

/// `(t_i, w_i)` with `v = Σ w_i φ_{t_i}`.
pub fn bl_decompose<T: Scalar>(v: &PiecewiseLinearConvexUtility<T>) -> Vec<(T, T)> {
    v.bl_decompose()
}

/// Class objective `J[v]` for a general indirect utility.
///
/// Quota-share: `∫ {λ(a)(a - H[X_k]) - v(a)} dQ` with `λ = v'_+` where
/// `a ≥ H[X_k]` and `v'_-` elsewhere. Change-loss: the same with `ξ_k` in
/// place of `H[X_k]`. Stop-loss: only `v ≡ 0` and `v = φ_t`, for which the
/// objective is the kink objective.
pub fn j_general<T: Scalar>(
    v: &PiecewiseLinearConvexUtility<T>,
    dist: &TypeDistribution<T>,
    cost: &CostFunctional<T>,
    class: ContractClass,
) -> Result<T> {
    let market = Market::new(dist, cost)?;
    j_general_in(v, &market, class)
}

/// [`j_general`] on a prepared market.
pub fn j_general_in<T: Scalar>(
    v: &PiecewiseLinearConvexUtility<T>,
    market: &Market<T>,
    class: ContractClass,
) -> Result<T> {
    let kinks = v.bl_decompose();
    if kinks.is_empty() {
        if class == ContractClass::ChangeLoss {
            market.require_assumption()?;
        }
        return Ok(T::zero());
    }
    let threshold = |k: T| -> T {
        match class {
            ContractClass::QuotaShare => market.full_cost(k),
            _ => market.xi(k),
        }
    };
    match class {
        ContractClass::StopLoss => {
            if let [(t, w)] = kinks[..] {
                if w == T::one() {
                    return market.stop_loss_objective(t);
                }
            }
            Err(Error::Unsupported(
                "stop-loss objective is only evaluated at call-shaped indirect utilities".into(),
            ))
        }
        ContractClass::ChangeLoss | ContractClass::QuotaShare => {
            if class == ContractClass::ChangeLoss {
                market.require_assumption()?;
            }
            let breaks = v.kink_locations();
            let value = market.dist().integrate_with(
                |k| {
                    let c = threshold(k);
                    move |a: T| {
                        let slope = if a >= c { v.right_slope(a) } else { v.left_slope(a) };
                        slope * (a - c) - v.eval(a)
                    }
                },
                &breaks,
                &[],
            );
            Ok(value)
        }
    }
}

/// Class objective at `φ_t`.
pub fn j_phi_class<T: Scalar>(t: T, market: &Market<T>, class: ContractClass) -> Result<T> {
    match class {
        ContractClass::StopLoss => market.stop_loss_objective(t),
        ContractClass::QuotaShare => market.quota_share_objective(t),
        ContractClass::ChangeLoss => market.change_loss_objective(t),
    }
}

/// First-best stop-loss contract for a known type: the deductible `θ*_k`
/// when `a ≥ ξ_k`, otherwise no cover; the premium extracts the full
/// benefit `I(a)`.
pub fn first_best_entry<T: Scalar>(t: TransformedType<T>, market: &Market<T>) -> MenuEntry<T> {
    let xi = market.xi(t.k);
    if t.a >= xi {
        let d = market.theta_star(t.k);
        MenuEntry {
            contract: Contract::StopLoss { deductible: d },
            premium: pos(t.a - d),
        }
    } else {
        MenuEntry::null()
    }
}

/// Extra benefit a type at `a` obtains from another type's first-best
/// entry, over its own first-best entry (which yields zero).
pub fn mimic_gain<T: Scalar>(a: T, mimicked: &MenuEntry<T>) -> T {
    mimicked.net_benefit(a)
}

/// Outcome of a high-risk type mimicking a lower one under first-best pricing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FirstBestReport {
    pub contract_class: ContractClass,
    pub high: (f64, f64),
    pub low: (f64, f64),
    pub high_deductible: f64,
    pub low_deductible: f64,
    pub high_premium: f64,
    pub low_premium: f64,
    /// `I(a) - P` of each type on its own first-best entry.
    pub high_risk_reduction: f64,
    pub low_risk_reduction: f64,
    pub mimic_gain: f64,
    /// Profit from the high type when it takes the low type's entry.
    pub mimicked_profit: f64,
    pub first_best_profit: f64,
    pub profit_chain_holds: bool,
}

/// First-best failure: `high` (larger `a`) mimics `low`.
pub fn first_best_demo<T: Scalar>(
    high: TransformedType<T>,
    low: TransformedType<T>,
    dist: &TypeDistribution<T>,
    cost: &CostFunctional<T>,
) -> Result<FirstBestReport> {
    if !(low.a < high.a) {
        return domain(format!("mimicked type must have smaller a: {} >= {}", low.a, high.a));
    }
    let market = Market::new(dist, cost)?;
    let own = first_best_entry(high, &market);
    let other = first_best_entry(low, &market);
    let contract_cost = |e: &MenuEntry<T>, k: T| -> Result<T> {
        let (lambda, d) = e.contract.parameters();
        Ok(lambda * market.stop_loss_cost(k, d)?)
    };
    let mimicked_profit = other.premium - contract_cost(&other, high.k)?;
    let first_best_profit = own.premium - contract_cost(&own, high.k)?;
    let f = |x: T| x.to_f64().unwrap_or(f64::NAN);
    let deductible = |e: &MenuEntry<T>| f(e.contract.parameters().1);
    Ok(FirstBestReport {
        contract_class: ContractClass::StopLoss,
        high: (f(high.a), f(high.k)),
        low: (f(low.a), f(low.k)),
        high_deductible: deductible(&own),
        low_deductible: deductible(&other),
        high_premium: f(own.premium),
        low_premium: f(other.premium),
        high_risk_reduction: f(own.net_benefit(high.a)),
        low_risk_reduction: f(other.net_benefit(low.a)),
        mimic_gain: f(mimic_gain(high.a, &other)),
        mimicked_profit: f(mimicked_profit),
        first_best_profit: f(first_best_profit),
        profit_chain_holds: mimicked_profit <= first_best_profit,
    })
}

/// Monte Carlo estimate of the reinsurer's expected profit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub n: usize,
}

/// Samples `n` types; each takes the entry with the largest `I(a) - P` among
/// its own rule entry and `alternatives` (ties keep the own entry), and the
/// profit `P - H[I(X_k)]` is averaged. Deterministic given `seed`.
pub fn monte_carlo_profit<T, R>(
    rule: &R,
    alternatives: &GenericMenu<T>,
    dist: &TypeDistribution<T>,
    cost: &CostFunctional<T>,
    n: usize,
    seed: u64,
) -> Result<MonteCarloEstimate>
where
    T: Scalar,
    R: MenuRule<T> + ?Sized,
{
    if n == 0 {
        return domain("Monte Carlo needs at least one sample");
    }
    let market = Market::new(dist, cost)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = 0.0f64;
    let mut sum_sq = 0.0f64;
    for _ in 0..n {
        let t = dist.sample(&mut rng);
        let mut chosen = rule.entry(t);
        let mut best = chosen.net_benefit(t.a);
        for it in &alternatives.items {
            let b = it.entry.net_benefit(t.a);
            if b > best {
                best = b;
                chosen = it.entry;
            }
        }
        let (lambda, d) = chosen.contract.parameters();
        let h = if chosen.contract.is_null() {
            T::zero()
        } else {
            lambda * market.stop_loss_cost(t.k, d)?
        };
        let profit = (chosen.premium - h).to_f64().unwrap_or(f64::NAN);
        sum += profit;
        sum_sq += profit * profit;
    }
    let nf = n as f64;
    let mean = sum / nf;
    let var = if n > 1 {
        ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(MonteCarloEstimate {
        estimate: mean,
        std_error: (var / nf).sqrt(),
        n,
    })
}
