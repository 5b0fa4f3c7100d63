use crate::error::{invalid, Result};
use crate::scalar::{count, lit, usable_tol, Scalar};

/// Grid used to audit concavity and monotonicity of a distortion.
const AUDIT_POINTS: usize = 1000;
const AUDIT_TOL: f64 = 1e-12;

/// Concave distortion `h: [0,1] -> [0,1]` with `h(0) = 0`, `h(1) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub enum Distortion<T> {
    /// `h(x) = x`.
    Identity,
    /// `h(x) = x^c`, `c` in `(0, 1]`.
    Power { exponent: T },
    /// Proportional-hazard transform `h(x) = x^c`, `c` in `(0, 1]`.
    /// Numerically identical to [`Distortion::Power`]; kept as its own
    /// variant so configs can name the actuarial convention.
    ProportionalHazard { exponent: T },
    /// Piecewise-linear interpolation through tabulated points.
    Tabulated(TabulatedDistortion<T>),
}

impl<T: Scalar> Distortion<T> {
    pub fn power(exponent: T) -> Result<Self> {
        check_exponent(exponent)?;
        Ok(Self::Power { exponent })
    }

    pub fn proportional_hazard(exponent: T) -> Result<Self> {
        check_exponent(exponent)?;
        Ok(Self::ProportionalHazard { exponent })
    }

    pub fn tabulated(xs: Vec<T>, ys: Vec<T>) -> Result<Self> {
        Ok(Self::Tabulated(TabulatedDistortion::new(xs, ys)?))
    }

    /// `h(x)`; arguments are clamped to `[0, 1]`.
    pub fn eval(&self, x: T) -> T {
        let x = x.max(T::zero()).min(T::one());
        match self {
            Self::Identity => x,
            Self::Power { exponent } | Self::ProportionalHazard { exponent } => {
                if x == T::zero() {
                    T::zero()
                } else {
                    x.powf(*exponent)
                }
            }
            Self::Tabulated(t) => t.eval(x),
        }
    }

    /// Exponent `c` when `h(x) = x^c` (identity has `c = 1`).
    pub fn power_exponent(&self) -> Option<T> {
        match self {
            Self::Identity => Some(T::one()),
            Self::Power { exponent } | Self::ProportionalHazard { exponent } => Some(*exponent),
            Self::Tabulated(_) => None,
        }
    }

    /// Checks `h(0)=0`, `h(1)=1`, monotonicity and midpoint concavity on a
    /// 1000-point grid.
    pub fn validate(&self) -> Result<()> {
        if let Self::Power { exponent } | Self::ProportionalHazard { exponent } = self {
            check_exponent(*exponent)?;
        }
        let tol: T = usable_tol(AUDIT_TOL);
        if self.eval(T::zero()).abs() > tol || (self.eval(T::one()) - T::one()).abs() > tol {
            return invalid("distortion must satisfy h(0)=0 and h(1)=1");
        }
        let n = AUDIT_POINTS;
        let vals: Vec<T> = (0..=n).map(|i| self.eval(count::<T>(i) / count(n))).collect();
        for w in vals.windows(3) {
            if w[1] < w[0] - tol {
                return invalid("distortion must be nondecreasing");
            }
            if w[1] < (w[0] + w[2]) / lit(2.0) - tol {
                return invalid("distortion must be concave");
            }
        }
        Ok(())
    }
}

fn check_exponent<T: Scalar>(c: T) -> Result<()> {
    if !(c > T::zero() && c <= T::one()) {
        return invalid(format!("distortion exponent must lie in (0, 1], got {c}"));
    }
    Ok(())
}

/// Tabulated distortion; linear between knots.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedDistortion<T> {
    xs: Vec<T>,
    ys: Vec<T>,
}

impl<T: Scalar> TabulatedDistortion<T> {
    /// Knots must start at `(0, 0)`, end at `(1, 1)`, have strictly increasing
    /// abscissae, nondecreasing values, and nonincreasing slopes.
    pub fn new(xs: Vec<T>, ys: Vec<T>) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return invalid("tabulated distortion needs matching x/y lists with at least two knots");
        }
        let tol: T = usable_tol(AUDIT_TOL);
        let last = xs.len() - 1;
        if xs[0] != T::zero() || xs[last] != T::one() {
            return invalid("tabulated distortion must span x in [0, 1]");
        }
        if ys[0].abs() > tol || (ys[last] - T::one()).abs() > tol {
            return invalid("tabulated distortion must satisfy h(0)=0 and h(1)=1");
        }
        let mut prev_slope = T::infinity();
        for i in 0..last {
            let dx = xs[i + 1] - xs[i];
            if !(dx > T::zero()) {
                return invalid("tabulated distortion abscissae must be strictly increasing");
            }
            let slope = (ys[i + 1] - ys[i]) / dx;
            if slope < -tol {
                return invalid("tabulated distortion must be nondecreasing");
            }
            if slope > prev_slope + tol {
                return invalid("tabulated distortion must be concave");
            }
            prev_slope = slope;
        }
        Ok(Self { xs, ys })
    }

    pub fn eval(&self, x: T) -> T {
        let i = self.xs.partition_point(|&k| k <= x);
        if i == 0 {
            return self.ys[0];
        }
        if i >= self.xs.len() {
            return self.ys[self.ys.len() - 1];
        }
        let (x0, x1) = (self.xs[i - 1], self.xs[i]);
        let (y0, y1) = (self.ys[i - 1], self.ys[i]);
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    pub fn knots(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.xs.iter().copied().zip(self.ys.iter().copied())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_and_values() {
        let h = Distortion::<f64>::power(0.5).unwrap();
        assert_eq!(h.eval(0.0), 0.0);
        assert_eq!(h.eval(1.0), 1.0);
        assert!((h.eval(0.25) - 0.5).abs() < 1e-15);
        assert_eq!(Distortion::<f64>::Identity.eval(0.3), 0.3);
    }

    #[test]
    fn exponent_domain_enforced() {
        assert!(Distortion::<f64>::power(0.0).is_err());
        assert!(Distortion::<f64>::power(1.5).is_err());
        assert!(Distortion::<f64>::proportional_hazard(1.0).is_ok());
    }

    #[test]
    fn builtin_variants_pass_audit() {
        for h in [
            Distortion::<f64>::Identity,
            Distortion::power(0.3).unwrap(),
            Distortion::proportional_hazard(0.9).unwrap(),
        ] {
            h.validate().unwrap();
        }
    }

    #[test]
    fn tabulated_interpolates() {
        let h = Distortion::<f64>::tabulated(vec![0.0, 0.5, 1.0], vec![0.0, 0.8, 1.0]).unwrap();
        assert!((h.eval(0.25) - 0.4).abs() < 1e-15);
        assert!((h.eval(0.75) - 0.9).abs() < 1e-15);
        h.validate().unwrap();
    }

    #[test]
    fn tabulated_rejects_convex() {
        let err = Distortion::tabulated(vec![0.0, 0.5, 1.0], vec![0.0, 0.2, 1.0]).unwrap_err();
        assert!(err.to_string().contains("concave"));
    }

    #[test]
    fn tabulated_rejects_bad_endpoints() {
        assert!(Distortion::tabulated(vec![0.0, 1.0], vec![0.1, 1.0]).is_err());
        assert!(Distortion::tabulated(vec![0.0, 0.9], vec![0.0, 1.0]).is_err());
        assert!(Distortion::tabulated(vec![0.0, 0.5, 0.5, 1.0], vec![0.0, 0.5, 0.6, 1.0]).is_err());
    }

    #[test]
    fn tabulated_rejects_decreasing() {
        assert!(Distortion::tabulated(vec![0.0, 0.5, 1.0], vec![0.0, 1.2, 1.0]).is_err());
    }
}
