use rand::Rng;

use crate::error::{invalid, Result};
use crate::scalar::{lit, pos, Scalar};

/// Tolerance on the total slope when checking 1-Lipschitz continuity.
const SLOPE_TOL: f64 = 1e-12;

/// Increasing, convex, 1-Lipschitz, piecewise-linear `v` with `v(0) = 0`,
/// stored by its call decomposition `v(a) = Σ w_i (a - t_i)_+`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinearConvexUtility<T> {
    kinks: Vec<(T, T)>,
}

impl<T: Scalar> PiecewiseLinearConvexUtility<T> {
    /// From kink locations and slope increments. Kinks are sorted and
    /// repeated locations merged; zero increments are dropped.
    pub fn new(kinks: Vec<(T, T)>) -> Result<Self> {
        let mut total = T::zero();
        for &(t, w) in &kinks {
            if !(t >= T::zero() && t.is_finite()) {
                return invalid(format!("kink location must be finite and nonnegative, got {t}"));
            }
            if !(w >= T::zero() && w.is_finite()) {
                return invalid(format!("slope increment must be nonnegative, got {w}"));
            }
            total = total + w;
        }
        if total > T::one() + lit(SLOPE_TOL) {
            return invalid(format!("total slope {total} exceeds 1"));
        }
        let mut sorted = kinks;
        sorted.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite kinks"));
        let mut merged: Vec<(T, T)> = Vec::with_capacity(sorted.len());
        for (t, w) in sorted {
            if w == T::zero() {
                continue;
            }
            match merged.last_mut() {
                Some(last) if last.0 == t => last.1 = last.1 + w,
                _ => merged.push((t, w)),
            }
        }
        Ok(Self { kinks: merged })
    }

    /// From breakpoints `p_0 < p_1 < …` and the slope to the right of each;
    /// `v` is zero left of `p_0`. Slopes must be nondecreasing in `[0, 1]`.
    pub fn from_slopes(points: &[T], slopes: &[T]) -> Result<Self> {
        if points.len() != slopes.len() {
            return invalid("points and slopes must have equal length");
        }
        let mut prev_p = T::neg_infinity();
        let mut prev_s = T::zero();
        let mut kinks = Vec::with_capacity(points.len());
        for (&p, &s) in points.iter().zip(slopes) {
            if !(p > prev_p) {
                return invalid("breakpoints must be strictly increasing");
            }
            if !(s >= prev_s) || s > T::one() {
                return invalid("slopes must be nondecreasing and at most 1");
            }
            kinks.push((p, s - prev_s));
            prev_p = p;
            prev_s = s;
        }
        Self::new(kinks)
    }

    /// `φ_t(a) = (a - t)_+`.
    pub fn call(t: T) -> Result<Self> {
        Self::new(vec![(t, T::one())])
    }

    pub fn zero() -> Self {
        Self { kinks: Vec::new() }
    }

    /// `(t_i, w_i)` with `v(a) = Σ w_i (a - t_i)_+`, sorted by `t_i`.
    pub fn bl_decompose(&self) -> Vec<(T, T)> {
        self.kinks.clone()
    }

    pub fn kink_locations(&self) -> Vec<T> {
        self.kinks.iter().map(|&(t, _)| t).collect()
    }

    pub fn eval(&self, a: T) -> T {
        self.kinks.iter().fold(T::zero(), |acc, &(t, w)| acc + w * pos(a - t))
    }

    /// `v'_+(a) = Σ_{t_i ≤ a} w_i`.
    pub fn right_slope(&self, a: T) -> T {
        self.kinks
            .iter()
            .filter(|&&(t, _)| t <= a)
            .fold(T::zero(), |acc, &(_, w)| acc + w)
    }

    /// `v'_-(a) = Σ_{t_i < a} w_i`.
    pub fn left_slope(&self, a: T) -> T {
        self.kinks
            .iter()
            .filter(|&&(t, _)| t < a)
            .fold(T::zero(), |acc, &(_, w)| acc + w)
    }

    /// `τ_v = sup{a : v(a) = 0}`.
    pub fn zero_level(&self) -> T {
        self.kinks.first().map_or(T::infinity(), |&(t, _)| t)
    }

    /// Random `v` with up to `max_kinks` kinks uniform on `[lo, hi]` and
    /// Dirichlet increments scaled by a uniform total slope in `(0, 1]`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, lo: T, hi: T, max_kinks: usize) -> Self {
        let n = rng.gen_range(1..=max_kinks.max(1));
        let raw: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
        let sum: f64 = raw.iter().sum();
        let total = 1.0 - rng.gen::<f64>();
        let kinks = raw
            .into_iter()
            .map(|g| {
                let t = lo + (hi - lo) * lit(rng.gen::<f64>());
                (t, lit::<T>(total * g / sum))
            })
            .collect();
        Self::new(kinks).expect("generated utility is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decompositions() {
        let v = PiecewiseLinearConvexUtility::call(5.0).unwrap();
        assert_eq!(v.bl_decompose(), vec![(5.0, 1.0)]);
        let id = PiecewiseLinearConvexUtility::from_slopes(&[0.0], &[1.0]).unwrap();
        assert_eq!(id.bl_decompose(), vec![(0.0, 1.0)]);
        let v = PiecewiseLinearConvexUtility::<f64>::from_slopes(&[10.0, 20.0], &[0.3, 0.5]).unwrap();
        let d = v.bl_decompose();
        assert_eq!(d[0], (10.0, 0.3));
        assert!((d[1].0 - 20.0).abs() < 1e-15 && (d[1].1 - 0.2).abs() < 1e-15);
    }

    #[test]
    fn slopes_at_kinks() {
        let v = PiecewiseLinearConvexUtility::<f64>::new(vec![(10.0, 0.3), (20.0, 0.2)]).unwrap();
        assert_eq!(v.right_slope(10.0), 0.3);
        assert_eq!(v.left_slope(10.0), 0.0);
        assert!((v.eval(30.0) - (0.3 * 20.0 + 0.2 * 10.0)).abs() < 1e-12);
        assert_eq!(v.zero_level(), 10.0);
    }

    #[test]
    fn rejects_non_members() {
        assert!(PiecewiseLinearConvexUtility::new(vec![(1.0, 0.7), (2.0, 0.7)]).is_err());
        assert!(PiecewiseLinearConvexUtility::new(vec![(1.0, -0.1)]).is_err());
        assert!(PiecewiseLinearConvexUtility::from_slopes(&[1.0, 2.0], &[0.5, 0.4]).is_err());
        assert!(PiecewiseLinearConvexUtility::<f64>::new(vec![(-1.0, 0.5)]).is_err());
    }

    #[test]
    fn merges_repeated_kinks() {
        let v = PiecewiseLinearConvexUtility::new(vec![(3.0, 0.25), (1.0, 0.0), (3.0, 0.25)]).unwrap();
        assert_eq!(v.bl_decompose(), vec![(3.0, 0.5)]);
    }
}
