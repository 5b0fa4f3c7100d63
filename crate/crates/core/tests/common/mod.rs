#![allow(dead_code)]

use reinmenu::{CostFunctional, TypeDistribution, TypeLaw, Uniform};

pub const K_LO: f64 = 5000.0;
pub const K_HI: f64 = 25000.0;

pub fn ev_cost() -> CostFunctional<f64> {
    CostFunctional::expected_value(0.1).unwrap()
}

/// `k ~ U(5000, 25000)`, `α ~ U(e⁻³, e⁻²)`, exponential losses with mean `k`.
pub fn product_market() -> TypeDistribution<f64> {
    let law = TypeLaw::Product {
        k: Uniform::new(K_LO, K_HI).unwrap(),
        alpha: Uniform::new((-3f64).exp(), (-2f64).exp()).unwrap(),
    };
    TypeDistribution::exponential(law).unwrap()
}

/// `k ~ U(5000, 25000)`, `α = e⁻³`.
pub fn degenerate_market() -> TypeDistribution<f64> {
    let law = TypeLaw::DegenerateAlpha {
        k: Uniform::new(K_LO, K_HI).unwrap(),
        alpha: (-3f64).exp(),
    };
    TypeDistribution::exponential(law).unwrap()
}

pub fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs().max(f64::MIN_POSITIVE)
}

/// Composite Simpson with `n` (even) subintervals.
pub fn simpson(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    let h = (hi - lo) / n as f64;
    let mut s = f(lo) + f(hi);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(lo + h * i as f64);
    }
    s * h / 3.0
}

/// `P(a > t | k)` for the product market, in closed form:
/// `β (min(e^{-t/k}, e^{-2}) - e^{-3})_+` with `β = 1/(e⁻² - e⁻³)`.
pub fn tail_given_k(t: f64, k: f64) -> f64 {
    let (e2, e3) = ((-2f64).exp(), (-3f64).exp());
    ((-t / k).exp().min(e2) - e3).max(0.0) / (e2 - e3)
}

/// `∫ P(a > t | k) g(k) dk / (k_hi - k_lo)` with the inner probability in
/// closed form and Simpson in `k`, split where the probability kinks.
pub fn product_oracle(t: f64, g: impl Fn(f64) -> f64, n: usize) -> f64 {
    let mut cuts = vec![K_LO, K_HI];
    for c in [t / 3.0, t / 2.0] {
        if c > K_LO && c < K_HI {
            cuts.push(c);
        }
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let integrand = |k: f64| tail_given_k(t, k) * g(k);
    cuts.windows(2).map(|w| simpson(integrand, w[0], w[1], n)).sum::<f64>() / (K_HI - K_LO)
}

/// Stop-loss objective for the product market when `t > sup θ*_k`.
pub fn stop_loss_oracle(t: f64) -> f64 {
    let xi1 = 1.0 + 1.1f64.ln();
    product_oracle(t, |k| t - xi1 * k, 1000)
}

/// Quota-share objective for the product market.
pub fn quota_share_oracle(t: f64) -> f64 {
    product_oracle(t, |k| t - 1.1 * k, 1000)
}

/// Dense grid of `n` points on `[lo, hi]`, then golden section around the
/// best point to relative `1e-12`.
pub fn dense_argmax(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> f64 {
    let step = (hi - lo) / (n - 1) as f64;
    let mut best = (lo, f(lo));
    for i in 1..n {
        let x = lo + step * i as f64;
        let v = f(x);
        if v > best.1 {
            best = (x, v);
        }
    }
    let (mut a, mut b) = ((best.0 - step).max(lo), (best.0 + step).min(hi));
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > 1e-12 * best.0.abs() {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    (a + b) / 2.0
}
