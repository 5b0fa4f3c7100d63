//! Deterministic one-dimensional quadrature: adaptive Simpson and
//! fixed-node Gauss–Legendre.

use crate::scalar::{lit, usable_tol, Scalar};

const MAX_DEPTH: u32 = 48;
const MIN_DEPTH: u32 = 3;

/// Adaptive Simpson with Richardson correction.
///
/// `rel_tol` is relative to the coarse whole-interval estimate of `∫|f|`
/// (with `abs_floor` as a lower bound for the absolute target).
/// Endpoint values are taken as one-sided limits by nudging the two outer
/// evaluation points inward by a few ulps, so integrands with a jump exactly
/// at `lo` or `hi` are integrated as their interior restriction.
pub fn adaptive_simpson<T, F>(f: F, lo: T, hi: T, rel_tol: f64, abs_floor: T) -> T
where
    T: Scalar,
    F: Fn(T) -> T,
{
    if !(hi > lo) {
        return T::zero();
    }
    let two = lit::<T>(2.0);
    let nudge = T::epsilon() * lit(8.0) * lo.abs().max(hi.abs()).max(T::one());
    let width = hi - lo;
    let (elo, ehi) = if width > nudge * lit(4.0) {
        (lo + nudge, hi - nudge)
    } else {
        (lo, hi)
    };
    let mid = (lo + hi) / two;
    let (fa, fm, fb) = (f(elo), f(mid), f(ehi));
    let whole = simpson_rule(lo, hi, fa, fm, fb);
    let tol = usable_tol::<T>(rel_tol);
    let magnitude = simpson_rule(lo, hi, fa.abs(), fm.abs(), fb.abs()).max(whole.abs());
    let eps = (magnitude * tol).max(abs_floor).max(T::min_positive_value());
    recurse(&f, lo, hi, fa, fm, fb, whole, eps, 0)
}

#[inline]
fn simpson_rule<T: Scalar>(a: T, b: T, fa: T, fm: T, fb: T) -> T {
    (b - a) / lit(6.0) * (fa + lit::<T>(4.0) * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<T, F>(f: &F, a: T, b: T, fa: T, fm: T, fb: T, whole: T, eps: T, depth: u32) -> T
where
    T: Scalar,
    F: Fn(T) -> T,
{
    let two = lit::<T>(2.0);
    let m = (a + b) / two;
    let lm = (a + m) / two;
    let rm = (m + b) / two;
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson_rule(a, m, fa, flm, fm);
    let right = simpson_rule(m, b, fm, frm, fb);
    let delta = left + right - whole;
    let converged = depth >= MIN_DEPTH && delta.abs() <= lit::<T>(15.0) * eps;
    if converged || depth >= MAX_DEPTH || !(m > a && b > m) {
        return left + right + delta / lit(15.0);
    }
    recurse(f, a, m, fa, flm, fm, left, eps / two, depth + 1)
        + recurse(f, m, b, fm, frm, fb, right, eps / two, depth + 1)
}

/// Gauss–Legendre rule on `[-1, 1]`, computed once and reused.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Scalar> GaussLegendre<T> {
    /// Builds the `n`-point rule by Newton iteration on the Legendre
    /// recurrence (in `f64`, then converted).
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre needs at least one node");
        let mut nodes = vec![0.0f64; n];
        let mut weights = vec![0.0f64; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self {
            nodes: nodes.into_iter().map(lit).collect(),
            weights: weights.into_iter().map(lit).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped onto `[lo, hi]`, ordered by node.
    pub fn mapped(&self, lo: T, hi: T) -> impl Iterator<Item = (T, T)> + '_ {
        let half = (hi - lo) / lit(2.0);
        let centre = (hi + lo) / lit(2.0);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (centre + half * x, half * w))
    }

    /// `∫_lo^hi f`.
    pub fn integrate<F: Fn(T) -> T>(&self, f: F, lo: T, hi: T) -> T {
        self.mapped(lo, hi)
            .map(|(x, w)| w * f(x))
            .fold(T::zero(), |acc, v| acc + v)
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Splits `[lo, hi]` at the given interior points (sorted, deduplicated).
pub fn panels<T: Scalar>(lo: T, hi: T, cuts: impl IntoIterator<Item = T>) -> Vec<(T, T)> {
    let mut pts: Vec<T> = cuts
        .into_iter()
        .filter(|c| c.is_finite() && *c > lo && *c < hi)
        .collect();
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite cut points"));
    pts.dedup();
    let mut out = Vec::with_capacity(pts.len() + 1);
    let mut prev = lo;
    for p in pts {
        out.push((prev, p));
        prev = p;
    }
    out.push((prev, hi));
    out
}
