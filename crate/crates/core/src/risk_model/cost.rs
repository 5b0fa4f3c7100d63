use super::{Distortion, LossModel};
use crate::error::{invalid, Error, Result};
use crate::quadrature::adaptive_simpson;
use crate::scalar::{lit, Scalar};

const TAIL_SIMPSON_TOL: f64 = 1e-12;
/// Relative size of a doubling block below which the tail is considered done.
const TAIL_NEGLIGIBLE: f64 = 1e-16;
/// Survival level beyond which block ratios are used to detect divergence.
const DEEP_TAIL: f64 = 1e-6;
const DIVERGENCE_RATIO: f64 = 0.999;
const DIVERGENCE_RUN: usize = 10;
const THETA_STAR_ABS_TOL: f64 = 1e-10;

/// `H[Y] = (1 + θ) ∫_0^∞ h(F̄_Y(y)) dy` with safety loading `θ > 0` and a
/// concave distortion `h`.
#[derive(Debug, Clone, PartialEq)]
pub struct CostFunctional<T> {
    loading: T,
    distortion: Distortion<T>,
}

impl<T: Scalar> CostFunctional<T> {
    pub fn new(loading: T, distortion: Distortion<T>) -> Result<Self> {
        if !(loading > T::zero()) || !loading.is_finite() {
            return invalid(format!("loading must be positive and finite, got {loading}"));
        }
        distortion.validate()?;
        Ok(Self { loading, distortion })
    }

    /// Expected-value principle `H[Y] = (1 + θ) E[Y]`.
    pub fn expected_value(loading: T) -> Result<Self> {
        Self::new(loading, Distortion::Identity)
    }

    pub fn loading(&self) -> T {
        self.loading
    }

    pub fn distortion(&self) -> &Distortion<T> {
        &self.distortion
    }

    /// `H` applied to the constant 1.
    pub fn unit_cost(&self) -> T {
        T::one() + self.loading
    }

    /// `h(F̄(y))`.
    pub fn distorted_survival(&self, loss: &LossModel<T>, y: T) -> T {
        self.distortion.eval(loss.survival(y))
    }

    /// `H[(X - d)_+] = (1 + θ) ∫_d^∞ h(F̄(y)) dy`; zero for `d = +inf`.
    pub fn stop_loss_cost(&self, loss: &LossModel<T>, d: T) -> Result<T> {
        check_deductible(d)?;
        if d == T::infinity() || loss.atom_at_zero() == T::one() {
            return Ok(T::zero());
        }
        if let Some(v) = self.closed_form_stop_loss(loss, d) {
            return Ok(v);
        }
        self.stop_loss_cost_numeric(loss, d)
    }

    /// Same as [`stop_loss_cost`](Self::stop_loss_cost) but always by
    /// quadrature, bypassing closed forms.
    pub fn stop_loss_cost_numeric(&self, loss: &LossModel<T>, d: T) -> Result<T> {
        check_deductible(d)?;
        if d == T::infinity() || loss.atom_at_zero() == T::one() {
            return Ok(T::zero());
        }
        Ok(self.unit_cost() * self.tail_integral(loss, d)?)
    }

    /// `H[X]`.
    pub fn full_cost(&self, loss: &LossModel<T>) -> Result<T> {
        self.stop_loss_cost(loss, T::zero())
    }

    fn closed_form_stop_loss(&self, loss: &LossModel<T>, d: T) -> Option<T> {
        if !loss.is_exponential() {
            return None;
        }
        let c = self.distortion.power_exponent()?;
        let k = loss.scale();
        // ∫_d^∞ ((1-p0) e^{-y/k})^c dy = (1-p0)^c (k/c) e^{-c d/k}
        let mass = loss.positive_mass().powf(c);
        Some(self.unit_cost() * mass * k / c * (-c * d / k).exp())
    }

    /// `∫_d^∞ h(F̄(y)) dy` over doubling blocks.
    fn tail_integral(&self, loss: &LossModel<T>, d: T) -> Result<T> {
        let g = |y: T| self.distorted_survival(loss, y);
        let upper = loss.support_upper();
        if d >= upper {
            return Ok(T::zero());
        }
        let two = lit::<T>(2.0);
        let deep: T = lit(DEEP_TAIL);
        let mut lo = d;
        let mut width = loss.scale();
        let mut total = T::zero();
        let mut prev: Option<T> = None;
        let mut flat_run = 0usize;
        for _ in 0..4096 {
            let hi = (lo + width).min(upper);
            if !hi.is_finite() {
                break;
            }
            let block = adaptive_simpson(g, lo, hi, TAIL_SIMPSON_TOL, T::zero());
            total = total + block;
            if hi >= upper || g(hi) == T::zero() {
                return Ok(total);
            }
            if block <= total.abs() * lit(TAIL_NEGLIGIBLE) {
                return Ok(total);
            }
            if loss.survival(hi) <= deep * loss.positive_mass() {
                match prev {
                    Some(p) if block >= p * lit(DIVERGENCE_RATIO) => flat_run += 1,
                    _ => flat_run = 0,
                }
                if flat_run >= DIVERGENCE_RUN {
                    break;
                }
            }
            prev = Some(block);
            lo = hi;
            width = width * two;
        }
        Err(Error::Divergence(format!(
            "∫ h(F̄(y)) dy from {d} does not converge for this loss/distortion pair"
        )))
    }

    /// Optimal unconstrained deductible `θ* = (h∘F̄)^{-1}(1/(1+θ))`, the
    /// maximizer of `d ↦ -d - H[(X-d)_+]`. Returns `+inf` when `h∘F̄`
    /// stays above `1/(1+θ)` on the whole support. On flat stretches the
    /// smallest root is returned.
    pub fn theta_star(&self, loss: &LossModel<T>) -> T {
        let target = T::one() / self.unit_cost();
        if loss.is_exponential() {
            if let Some(c) = self.distortion.power_exponent() {
                // ((1-p0) e^{-d/k})^c = 1/(1+θ)
                let d = loss.scale() * (loss.positive_mass().ln() + self.unit_cost().ln() / c);
                return d.max(T::zero());
            }
        }
        let g = |y: T| self.distorted_survival(loss, y);
        if g(T::zero()) <= target {
            return T::zero();
        }
        let upper = loss.support_upper();
        let mut lo = T::zero();
        let mut hi = if upper.is_finite() { upper } else { loss.scale() };
        while g(hi) > target {
            if hi >= upper || !hi.is_finite() {
                return T::infinity();
            }
            lo = hi;
            hi = (hi * lit(2.0)).min(upper);
        }
        let tol: T = lit(THETA_STAR_ABS_TOL);
        for _ in 0..400 {
            if hi - lo <= tol {
                break;
            }
            let mid = (lo + hi) / lit(2.0);
            if !(mid > lo && mid < hi) {
                break;
            }
            if g(mid) > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (lo + hi) / lit(2.0)
    }

    /// `ξ = θ* + H[(X - θ*)_+] = -max_d B(d)`.
    pub fn xi(&self, loss: &LossModel<T>) -> Result<T> {
        let ts = self.theta_star(loss);
        if ts == T::infinity() {
            return Err(Error::Unsupported("xi is undefined when theta* = +inf".into()));
        }
        Ok(ts + self.stop_loss_cost(loss, ts)?)
    }

    /// `B(d) = -d - H[(X - d)_+]`, concave in `d`.
    pub fn b_curve(&self, loss: &LossModel<T>, d: T) -> Result<T> {
        Ok(-d - self.stop_loss_cost(loss, d)?)
    }
}

fn check_deductible<T: Scalar>(d: T) -> Result<()> {
    if d.is_nan() || d < T::zero() {
        return Err(Error::Domain(format!("deductible must be nonnegative, got {d}")));
    }
    Ok(())
}
