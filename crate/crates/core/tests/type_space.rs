mod common;

use common::simpson;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use reinmenu::{LossFamily, QuadratureSettings, TypeAtom, TypeDistribution, TypeLaw, Uniform};

fn product(k_lo: f64, k_w: f64, al_lo: f64, al_w: f64) -> TypeDistribution<f64> {
    let law = TypeLaw::Product {
        k: Uniform::new(k_lo, k_lo + k_w).unwrap(),
        alpha: Uniform::new(al_lo, al_lo + al_w).unwrap(),
    };
    TypeDistribution::new(
        law,
        LossFamily::exponential(),
        QuadratureSettings {
            outer_nodes: 64,
            ..Default::default()
        },
    )
    .unwrap()
}

fn smooth(c: f64) -> impl Fn(f64, f64) -> f64 {
    move |a: f64, k: f64| (c * a / k).sin() + (a / k).powi(2) * (k / 1e4) + 1.0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn pushforward_matches_direct_quadrature(
        k_lo in 100.0f64..1e4,
        k_w in 10.0f64..1e4,
        al_lo in 0.01f64..0.5,
        al_w in 0.01f64..0.4,
        c in 0.1f64..3.0,
        t in 0.0f64..1.0,
    ) {
        let dist = product(k_lo, k_w, al_lo, al_w);
        let f = smooth(c);
        let (lo, hi) = (dist.lower_support(), dist.upper_support());
        let brk = lo + t * (hi - lo);
        let g = |a: f64, k: f64| if a > brk { f(a, k) } else { 0.5 * f(a, k) };
        let got = dist.integrate(g, &[brk]);
        // direct integral over (α, k) with a = -k ln α
        let al_hi = al_lo + al_w;
        let inner = |k: f64| {
            // α < cut ⇔ a > brk
            let h = |al: f64| f(-k * al.ln(), k);
            let cut = (-brk / k).exp().clamp(al_lo, al_hi);
            simpson(h, al_lo, cut, 400) + 0.5 * simpson(h, cut, al_hi, 400)
        };
        let mut cuts = vec![k_lo, k_lo + k_w];
        for kc in [brk / -al_lo.ln(), brk / -al_hi.ln()] {
            if kc > k_lo && kc < k_lo + k_w {
                cuts.push(kc);
            }
        }
        cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let direct = cuts.windows(2).map(|w| simpson(inner, w[0], w[1], 400)).sum::<f64>() / (k_w * al_w);
        prop_assert!((got - direct).abs() <= 1e-8 * direct.abs().max(1.0), "got {got}, direct {direct}");
    }

    #[test]
    fn integration_is_linear(k_lo in 100.0f64..1e4, k_w in 10.0f64..1e4, al_lo in 0.01f64..0.5, al_w in 0.01f64..0.4, s in -3.0f64..3.0) {
        let dist = product(k_lo, k_w, al_lo, al_w);
        let (f, g) = (smooth(1.0), smooth(2.5));
        let lhs = dist.integrate(|a, k| f(a, k) + s * g(a, k), &[]);
        let rhs = dist.integrate(&f, &[]) + s * dist.integrate(&g, &[]);
        prop_assert!((lhs - rhs).abs() <= 1e-8 * (1.0 + s.abs()) * rhs.abs().max(1.0));
        let one = dist.integrate(|_, _| 1.0, &[]);
        prop_assert!((one - 1.0).abs() <= 1e-8);
    }

    #[test]
    fn discrete_integration_is_a_weighted_sum(w in prop::collection::vec((0.01f64..0.99, 100.0f64..1e4, 0.1f64..1.0), 1..6)) {
        let total: f64 = w.iter().map(|x| x.2).sum();
        let atoms: Vec<_> = w.iter().map(|&(alpha, k, wt)| TypeAtom { alpha, k, weight: wt / total }).collect();
        let dist = TypeDistribution::exponential(TypeLaw::Discrete(atoms.clone())).unwrap();
        let got = dist.integrate(|a, k| a * k, &[]);
        let exact: f64 = atoms.iter().map(|at| at.weight * (-at.k * at.alpha.ln()) * at.k).sum();
        prop_assert!((got - exact).abs() <= 1e-12 * exact);
    }

    #[test]
    fn samples_lie_in_the_support(k_lo in 100.0f64..1e4, k_w in 10.0f64..1e4, al_lo in 0.0f64..0.5, al_w in 0.01f64..0.4, seed in any::<u64>()) {
        let dist = product(k_lo, k_w, al_lo, al_w);
        let (lo, hi) = (dist.lower_support(), dist.upper_support());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..200 {
            let t = dist.sample(&mut rng);
            prop_assert!(t.a >= lo && t.k >= k_lo && t.k <= k_lo + k_w);
            if al_lo > 0.0 {
                prop_assert!(t.a <= hi * (1.0 + 1e-12));
            }
        }
    }
}
