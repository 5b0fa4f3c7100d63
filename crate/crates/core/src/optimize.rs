//! Scalar maximization: dense grid localization followed by golden-section
//! refinement inside the bracket around the best grid point.

use rayon::prelude::*;

use crate::scalar::{count, lit, usable_tol, Scalar};

/// Grid and refinement hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchSettings {
    /// Number of equally spaced grid points (including both ends).
    pub grid_points: usize,
    /// Relative width at which golden-section refinement stops.
    pub refine_tol: f64,
}

impl Default for SearchSettings {
    fn default() -> Self {
        Self {
            grid_points: 10_001,
            refine_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum<T> {
    pub arg: T,
    pub value: T,
}

/// Evaluates `f` on `points`, preserving order. Evaluation may run on the
/// rayon pool; the result does not depend on the number of threads.
pub fn evaluate_all<T, F>(f: &F, points: &[T]) -> Vec<T>
where
    T: Scalar,
    F: Fn(T) -> T + Sync,
{
    points.par_iter().map(|&x| f(x)).collect()
}

/// Equally spaced grid on `[lo, hi]`.
pub fn linspace<T: Scalar>(lo: T, hi: T, n: usize) -> Vec<T> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / count(n - 1);
            (0..n)
                .map(|i| if i + 1 == n { hi } else { lo + step * count(i) })
                .collect()
        }
    }
}

/// Maximizes `f` over `[lo, hi]`.
///
/// `extra` lists additional candidate points (e.g. atoms where `f` jumps);
/// they are compared against the grid but never refined. Ties go to the
/// smallest argument.
pub fn grid_golden_max<T, F>(f: &F, lo: T, hi: T, extra: &[T], settings: SearchSettings) -> Maximum<T>
where
    T: Scalar,
    F: Fn(T) -> T + Sync,
{
    let n = settings.grid_points.max(2);
    let (lo, hi) = if hi < lo { (lo, lo) } else { (lo, hi) };
    let grid = linspace(lo, hi, n);
    let values = evaluate_all(f, &grid);

    let mut best_idx = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best_idx] {
            best_idx = i;
        }
    }
    let mut best = Maximum {
        arg: grid[best_idx],
        value: values[best_idx],
    };

    if hi > lo {
        let step = (hi - lo) / count(n - 1);
        let a = (best.arg - step).max(lo);
        let b = (best.arg + step).min(hi);
        let refined = golden_section_max(f, a, b, settings.refine_tol);
        if refined.value > best.value {
            best = refined;
        }
    }

    let mut extras: Vec<T> = extra
        .iter()
        .copied()
        .filter(|x| x.is_finite() && *x >= lo && *x <= hi)
        .collect();
    extras.sort_by(|a, b| a.partial_cmp(b).expect("finite candidates"));
    extras.dedup();
    let extra_values = evaluate_all(f, &extras);
    for (x, v) in extras.into_iter().zip(extra_values) {
        if v > best.value || (v == best.value && x < best.arg) {
            best = Maximum { arg: x, value: v };
        }
    }
    best
}

/// Golden-section search for a maximum of `f` on `[a, b]`; stops once the
/// bracket is narrower than `rel_tol * max(|x|, 1)`.
pub fn golden_section_max<T, F>(f: &F, mut a: T, mut b: T, rel_tol: f64) -> Maximum<T>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    let inv_phi: T = lit(0.618_033_988_749_894_9);
    let tol = usable_tol::<T>(rel_tol);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..400 {
        let scale = ((a + b) / lit(2.0)).abs().max(T::one());
        if b - a <= tol * scale {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = (a + b) / lit(2.0);
    let fx = f(x);
    let mut best = Maximum { arg: x, value: fx };
    for (p, v) in [(c, fc), (d, fd)] {
        if v > best.value {
            best = Maximum { arg: p, value: v };
        }
    }
    best
}
