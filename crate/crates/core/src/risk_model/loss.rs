use std::fmt;
use std::sync::Arc;

use crate::error::{domain, invalid, Result};
use crate::scalar::{lit, Scalar};

/// Survival or density function of a unit-scale continuous loss.
pub type SurvivalFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// Shape of the continuous part of a loss, at unit scale.
#[derive(Clone)]
pub enum LossShape<T> {
    /// `S(y) = exp(-y)`.
    Exponential,
    /// User-supplied survival `S` with `S(0) = 1` and density `s = -S'`,
    /// supported on `[0, upper]` (`upper` may be `+inf`).
    Generic {
        name: String,
        survival: SurvivalFn<T>,
        density: SurvivalFn<T>,
        upper: T,
    },
}

impl<T: fmt::Debug> fmt::Debug for LossShape<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Exponential => write!(f, "Exponential"),
            Self::Generic { name, upper, .. } => write!(f, "Generic({name}, upper={upper:?})"),
        }
    }
}

/// Nonnegative loss `X = scale * Y` where `Y` is zero with probability
/// `atom_at_zero` and otherwise follows `shape`.
///
/// The survival function is `F̄(y) = (1 - p0) S(y / scale)` for `y >= 0`.
#[derive(Debug, Clone)]
pub struct LossModel<T> {
    shape: LossShape<T>,
    scale: T,
    atom_at_zero: T,
}

impl<T: Scalar> LossModel<T> {
    /// Exponential loss with the given mean.
    pub fn exponential(mean: T) -> Result<Self> {
        Self::new(LossShape::Exponential, mean, T::zero())
    }

    /// Lomax (Pareto II) loss: `S(y) = (1 + y)^-shape` at unit scale.
    pub fn lomax(shape: T, scale: T) -> Result<Self> {
        if !(shape > T::zero()) || !shape.is_finite() {
            return invalid(format!("lomax shape must be positive, got {shape}"));
        }
        let survival: SurvivalFn<T> = Arc::new(move |y: T| (T::one() + y.max(T::zero())).powf(-shape));
        let density: SurvivalFn<T> =
            Arc::new(move |y: T| shape * (T::one() + y.max(T::zero())).powf(-shape - T::one()));
        let shape_kind = LossShape::Generic {
            name: format!("lomax({shape})"),
            survival,
            density,
            upper: T::infinity(),
        };
        Self::new(shape_kind, scale, T::zero())
    }

    /// Uniform loss on `[0, upper]`.
    pub fn uniform(upper: T) -> Result<Self> {
        let survival: SurvivalFn<T> = Arc::new(|y: T| (T::one() - y).max(T::zero()).min(T::one()));
        let density: SurvivalFn<T> = Arc::new(|y: T| {
            if y >= T::zero() && y <= T::one() {
                T::one()
            } else {
                T::zero()
            }
        });
        let shape = LossShape::Generic {
            name: "uniform".into(),
            survival,
            density,
            upper: T::one(),
        };
        Self::new(shape, upper, T::zero())
    }

    /// Degenerate loss `X ≡ 0`.
    pub fn zero() -> Self {
        Self {
            shape: LossShape::Exponential,
            scale: T::one(),
            atom_at_zero: T::one(),
        }
    }

    pub fn new(shape: LossShape<T>, scale: T, atom_at_zero: T) -> Result<Self> {
        if !(scale > T::zero()) || !scale.is_finite() {
            return invalid(format!("loss scale must be positive and finite, got {scale}"));
        }
        if !(atom_at_zero >= T::zero() && atom_at_zero <= T::one()) {
            return invalid(format!("point mass at zero must be a probability, got {atom_at_zero}"));
        }
        if let LossShape::Generic { upper, .. } = &shape {
            if !(*upper > T::zero()) {
                return invalid("generic loss support bound must be positive");
            }
        }
        Ok(Self {
            shape,
            scale,
            atom_at_zero,
        })
    }

    /// Same shape and point mass, scale multiplied by `factor`.
    pub fn rescaled(&self, factor: T) -> Result<Self> {
        Self::new(self.shape.clone(), self.scale * factor, self.atom_at_zero)
    }

    pub fn with_atom_at_zero(self, p0: T) -> Result<Self> {
        Self::new(self.shape, self.scale, p0)
    }

    pub fn shape(&self) -> &LossShape<T> {
        &self.shape
    }

    pub fn scale(&self) -> T {
        self.scale
    }

    pub fn atom_at_zero(&self) -> T {
        self.atom_at_zero
    }

    /// `1 - F(0) = P(X > 0)`.
    pub fn positive_mass(&self) -> T {
        T::one() - self.atom_at_zero
    }

    pub fn is_exponential(&self) -> bool {
        matches!(self.shape, LossShape::Exponential)
    }

    /// Right end of the support (possibly `+inf`).
    pub fn support_upper(&self) -> T {
        match &self.shape {
            LossShape::Exponential => T::infinity(),
            LossShape::Generic { upper, .. } => *upper * self.scale,
        }
    }

    fn unit_survival(&self, y: T) -> T {
        match &self.shape {
            LossShape::Exponential => (-y).exp(),
            LossShape::Generic { survival, .. } => survival(y),
        }
    }

    fn unit_density(&self, y: T) -> T {
        match &self.shape {
            LossShape::Exponential => {
                if y < T::zero() {
                    T::zero()
                } else {
                    (-y).exp()
                }
            }
            LossShape::Generic { density, .. } => density(y),
        }
    }

    /// `F̄(y) = P(X > y)`.
    pub fn survival(&self, y: T) -> T {
        if y < T::zero() {
            return T::one();
        }
        if self.atom_at_zero == T::one() {
            return T::zero();
        }
        self.positive_mass() * self.unit_survival(y / self.scale)
    }

    /// Density of the continuous part at `y > 0`.
    pub fn density(&self, y: T) -> T {
        if y < T::zero() {
            return T::zero();
        }
        self.positive_mass() * self.unit_density(y / self.scale) / self.scale
    }

    /// `VaR_alpha(X) = F̄^{-1}(alpha)`, for `alpha` in `(0, 1 - F(0))`.
    pub fn var(&self, alpha: T) -> Result<T> {
        let mass = self.positive_mass();
        if !(alpha > T::zero() && alpha < mass) {
            return domain(format!("VaR level {alpha} outside (0, {mass})"));
        }
        let u = alpha / mass;
        let y = match &self.shape {
            LossShape::Exponential => -u.ln(),
            LossShape::Generic { upper, .. } => invert_survival(|y| self.unit_survival(y), u, *upper),
        };
        Ok(self.scale * y)
    }
}

/// Smallest `y` with `S(y) <= u`, for nonincreasing `S` on `[0, upper]`.
fn invert_survival<T: Scalar>(s: impl Fn(T) -> T, u: T, upper: T) -> T {
    let mut lo = T::zero();
    let mut hi = if upper.is_finite() { upper } else { T::one() };
    while s(hi) > u && hi.is_finite() {
        lo = hi;
        hi = hi * lit(2.0);
    }
    if !hi.is_finite() {
        return hi;
    }
    for _ in 0..200 {
        let mid = (lo + hi) / lit(2.0);
        if !(mid > lo && mid < hi) {
            break;
        }
        if s(mid) > u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo + hi) / lit(2.0)
}
