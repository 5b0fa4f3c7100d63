//! Menu solvers for the three contract classes.
//!
//! Each optimal indirect utility has the form `(a - τ)_+`, so every solver
//! reduces to a scalar search over the kink `τ`. For fixed `τ` the profit
//! integrand depends on `a` only through the sign of `a - τ`, which is what
//! [`Market::kink_objective`] integrates.

pub mod change_loss;
pub mod quota_share;
pub mod stop_loss;

use crate::error::{Error, Result};
use crate::optimize::{grid_golden_max, SearchSettings};
use crate::risk_model::CostFunctional;
use crate::scalar::Scalar;
use crate::type_space::{FamilyConstants, TypeDistribution};

/// Type distribution and cost functional with the per-family constants
/// precomputed.
#[derive(Debug, Clone)]
pub struct Market<T> {
    dist: TypeDistribution<T>,
    cost: CostFunctional<T>,
    constants: FamilyConstants<T>,
}

impl<T: Scalar> Market<T> {
    pub fn new(dist: &TypeDistribution<T>, cost: &CostFunctional<T>) -> Result<Self> {
        let constants = dist.family().constants(cost)?;
        Ok(Self {
            dist: dist.clone(),
            cost: cost.clone(),
            constants,
        })
    }

    pub fn dist(&self) -> &TypeDistribution<T> {
        &self.dist
    }

    pub fn cost(&self) -> &CostFunctional<T> {
        &self.cost
    }

    pub fn constants(&self) -> FamilyConstants<T> {
        self.constants
    }

    pub fn theta_star(&self, k: T) -> T {
        self.constants.theta_star(k)
    }

    /// `ξ_k`, or `+inf` when `θ*_k` is infinite.
    pub fn xi(&self, k: T) -> T {
        self.constants.xi(k).unwrap_or(T::infinity())
    }

    pub fn full_cost(&self, k: T) -> T {
        self.constants.full_cost(k)
    }

    /// `H[(X_k - d)_+] = k H[(X_1 - d/k)_+]`.
    pub fn stop_loss_cost(&self, k: T, d: T) -> Result<T> {
        if d == T::infinity() {
            return Ok(T::zero());
        }
        Ok(k * self.cost.stop_loss_cost(self.dist.family().base(), d / k)?)
    }

    /// `sup_k θ*_k` over the support.
    pub fn sup_theta_star(&self) -> T {
        let (_, k_hi) = self.dist.k_bounds();
        self.theta_star(k_hi)
    }

    /// `∫ g dQ` where `g(a, k)` is `above(k)` for `a > τ`, `at(k)` for
    /// `a = τ`, and zero below. `parts(k)` returns `(above, at)`.
    pub fn kink_objective<P>(&self, tau: T, parts: P, k_breaks: &[T]) -> Result<T>
    where
        P: Fn(T) -> Result<(T, T)>,
    {
        if tau == T::infinity() {
            return Ok(T::zero());
        }
        if !(tau >= T::zero()) {
            return Err(Error::Domain(format!("kink must be nonnegative, got {tau}")));
        }
        let value = self.dist.integrate_with(
            |k| {
                let (above, at) = parts(k).unwrap_or((T::nan(), T::nan()));
                move |a: T| {
                    if a > tau {
                        above
                    } else if a == tau {
                        at
                    } else {
                        T::zero()
                    }
                }
            },
            &[tau],
            k_breaks,
        );
        if value.is_nan() {
            // surface the first failing per-type evaluation
            let (k_lo, _) = self.dist.k_bounds();
            parts(k_lo)?;
            return Err(Error::Divergence(format!(
                "profit integrand is not finite at tau = {tau}"
            )));
        }
        Ok(value)
    }

    /// Atom `a`-values, where discrete objectives jump.
    fn candidates(&self) -> Vec<T> {
        self.dist.atom_types().into_iter().map(|t| t.a).collect()
    }
}

/// Optimal kink and its objective value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KinkOptimum<T> {
    pub tau_star: T,
    pub objective: T,
}

/// Maximizes `objective` over `[lo, upper support] ∪ {+inf}`. A best finite
/// value that is not positive loses to the shut-down value 0 at `+inf`.
fn maximize_kink<T, F>(market: &Market<T>, objective: F, lo: T, settings: SearchSettings) -> Result<KinkOptimum<T>>
where
    T: Scalar,
    F: Fn(T) -> Result<T> + Sync,
{
    let hi = market.dist().upper_support().max(lo);
    objective(lo)?;
    let f = |tau: T| objective(tau).unwrap_or(T::nan());
    let best = grid_golden_max(&f, lo, hi, &market.candidates(), settings);
    if best.value > T::zero() {
        Ok(KinkOptimum {
            tau_star: best.arg,
            objective: best.value,
        })
    } else {
        Ok(KinkOptimum {
            tau_star: T::infinity(),
            objective: T::zero(),
        })
    }
}

/// Sampled `(τ, J(τ))` pairs on an equally spaced grid.
pub fn curve<T, F>(objective: F, t_lo: T, t_hi: T, n: usize) -> Result<Vec<(T, T)>>
where
    T: Scalar,
    F: Fn(T) -> Result<T> + Sync,
{
    if !(t_lo < t_hi) || n < 2 {
        return Err(Error::Domain(format!(
            "curve needs t_lo < t_hi and at least two points, got [{t_lo}, {t_hi}] with n = {n}"
        )));
    }
    use rayon::prelude::*;
    let ts = crate::optimize::linspace(t_lo, t_hi, n);
    ts.par_iter().map(|&t| objective(t).map(|j| (t, j))).collect()
}
