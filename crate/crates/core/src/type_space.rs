//! Agent types: the distribution over `(α, k)`, the change of variables
//! `(α, k) ↦ (a, k) = (VaR_α(X_k), k)`, and deterministic quadrature of
//! functionals against the pushed-forward measure.

use rand::Rng;

use crate::error::{domain, invalid, Result};
use crate::quadrature::{adaptive_simpson, panels, GaussLegendre};
use crate::risk_model::{CostFunctional, LossModel};
use crate::scalar::{lit, Scalar};

/// Uniform law on `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Uniform<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Scalar> Uniform<T> {
    pub fn new(lo: T, hi: T) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return invalid(format!("uniform law needs finite lo < hi, got [{lo}, {hi}]"));
        }
        Ok(Self { lo, hi })
    }

    pub fn density(&self) -> T {
        T::one() / (self.hi - self.lo)
    }

    pub fn contains(&self, x: T) -> bool {
        x >= self.lo && x <= self.hi
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        let u: f64 = rng.gen();
        self.lo + (self.hi - self.lo) * lit(u)
    }
}

/// A point mass at type `(α, k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TypeAtom<T> {
    pub alpha: T,
    pub k: T,
    pub weight: T,
}

/// Law of the original type `(α, k)`.
#[derive(Debug, Clone, PartialEq)]
pub enum TypeLaw<T> {
    /// `α` and `k` independent.
    Product { k: Uniform<T>, alpha: Uniform<T> },
    /// `α` fixed at a single level.
    DegenerateAlpha { k: Uniform<T>, alpha: T },
    /// Finitely many weighted types.
    Discrete(Vec<TypeAtom<T>>),
}

/// Scale family `X_k = k · Y`.
#[derive(Debug, Clone)]
pub struct LossFamily<T> {
    base: LossModel<T>,
}

impl<T: Scalar> LossFamily<T> {
    /// `base` is the loss of the type with `k = 1`.
    pub fn new(base: LossModel<T>) -> Self {
        Self { base }
    }

    /// `X_k` exponential with mean `k`.
    pub fn exponential() -> Self {
        Self::new(LossModel::exponential(T::one()).expect("unit exponential"))
    }

    pub fn base(&self) -> &LossModel<T> {
        &self.base
    }

    pub fn loss(&self, k: T) -> Result<LossModel<T>> {
        self.base.rescaled(k)
    }

    /// Per-type constants at unit scale; multiply by `k` for type `k`.
    pub fn constants(&self, cost: &CostFunctional<T>) -> Result<FamilyConstants<T>> {
        let theta_star = cost.theta_star(&self.base);
        let xi = if theta_star.is_finite() {
            Some(cost.xi(&self.base)?)
        } else {
            None
        };
        Ok(FamilyConstants {
            theta_star,
            xi,
            full_cost: cost.full_cost(&self.base)?,
        })
    }
}

/// `θ*`, `ξ`, and `H[X]` of the unit-scale member of a scale family. All
/// three are positively homogeneous in the scale, so `θ*_k = k θ*_1`, etc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyConstants<T> {
    pub theta_star: T,
    pub xi: Option<T>,
    pub full_cost: T,
}

impl<T: Scalar> FamilyConstants<T> {
    pub fn theta_star(&self, k: T) -> T {
        self.theta_star * k
    }

    pub fn xi(&self, k: T) -> Option<T> {
        self.xi.map(|x| x * k)
    }

    pub fn full_cost(&self, k: T) -> T {
        self.full_cost * k
    }
}

/// Transformed type `(a, k)` with `a = VaR_α(X_k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformedType<T> {
    pub a: T,
    pub k: T,
}

/// Fixed quadrature hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSettings {
    /// Gauss–Legendre nodes per panel in the `k` direction.
    pub outer_nodes: usize,
    /// Relative tolerance of the adaptive Simpson rule in the `a` direction.
    pub simpson_tol: f64,
    /// Upper-tail probability at which unbounded `a`-supports are truncated.
    pub a_quantile_cap: f64,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self {
            outer_nodes: 256,
            simpson_tol: 1e-10,
            a_quantile_cap: 1e-9,
        }
    }
}

/// Distribution of agent types, with its loss family and quadrature.
#[derive(Debug, Clone)]
pub struct TypeDistribution<T> {
    law: TypeLaw<T>,
    family: LossFamily<T>,
    settings: QuadratureSettings,
    rule: GaussLegendre<T>,
    /// `VaR` of the unit-scale loss at the extreme `α` levels: `a / k` ranges
    /// over `[q_min, q_max]` (continuous variants only).
    q_min: T,
    q_max: T,
}

impl<T: Scalar> TypeDistribution<T> {
    pub fn new(law: TypeLaw<T>, family: LossFamily<T>, settings: QuadratureSettings) -> Result<Self> {
        if settings.outer_nodes == 0 {
            return invalid("outer_nodes must be positive");
        }
        if !(settings.simpson_tol > 0.0) || !(settings.a_quantile_cap > 0.0 && settings.a_quantile_cap < 1.0) {
            return invalid("simpson_tol must be positive and a_quantile_cap in (0, 1)");
        }
        let base = family.base();
        let mass = base.positive_mass();
        let check_alpha = |alpha: T| -> Result<()> {
            if !(alpha > T::zero() && alpha < mass) {
                return invalid(format!("VaR level {alpha} outside (0, 1 - F(0)) = (0, {mass})"));
            }
            Ok(())
        };
        let check_k = |k: &Uniform<T>| -> Result<()> {
            if !(k.lo > T::zero()) {
                return invalid("loss scales k must be positive");
            }
            Ok(())
        };
        let (q_min, q_max) = match &law {
            TypeLaw::Product { k, alpha } => {
                check_k(k)?;
                if alpha.lo < T::zero() {
                    return invalid("alpha range must lie in (0, 1 - F(0))");
                }
                check_alpha(alpha.hi)?;
                let lo_eff = if alpha.lo > T::zero() {
                    alpha.lo
                } else {
                    alpha.lo + (alpha.hi - alpha.lo) * lit(settings.a_quantile_cap)
                };
                (base.var(alpha.hi)?, base.var(lo_eff)?)
            }
            TypeLaw::DegenerateAlpha { k, alpha } => {
                check_k(k)?;
                check_alpha(*alpha)?;
                let q = base.var(*alpha)?;
                (q, q)
            }
            TypeLaw::Discrete(atoms) => {
                if atoms.is_empty() {
                    return invalid("discrete type distribution needs at least one atom");
                }
                let mut total = T::zero();
                for atom in atoms {
                    check_alpha(atom.alpha)?;
                    if !(atom.k > T::zero() && atom.k.is_finite()) {
                        return invalid("loss scales k must be positive");
                    }
                    if !(atom.weight >= T::zero()) {
                        return invalid("atom weights must be nonnegative");
                    }
                    total = total + atom.weight;
                }
                if (total - T::one()).abs() > lit::<T>(1e-12).max(T::epsilon() * lit(16.0)) {
                    return invalid(format!("atom weights must sum to 1, got {total}"));
                }
                (T::nan(), T::nan())
            }
        };
        Ok(Self {
            rule: GaussLegendre::new(settings.outer_nodes),
            law,
            family,
            settings,
            q_min,
            q_max,
        })
    }

    /// Types with default quadrature and exponential losses.
    pub fn exponential(law: TypeLaw<T>) -> Result<Self> {
        Self::new(law, LossFamily::exponential(), QuadratureSettings::default())
    }

    pub fn law(&self) -> &TypeLaw<T> {
        &self.law
    }

    pub fn family(&self) -> &LossFamily<T> {
        &self.family
    }

    pub fn settings(&self) -> QuadratureSettings {
        self.settings
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self.law, TypeLaw::Discrete(_))
    }

    /// `X_k`.
    pub fn loss(&self, k: T) -> Result<LossModel<T>> {
        self.family.loss(k)
    }

    /// Whether `(α, k)` belongs to the support of the type law.
    pub fn contains(&self, alpha: T, k: T) -> bool {
        match &self.law {
            TypeLaw::Product { k: kl, alpha: al } => kl.contains(k) && alpha > al.lo && alpha <= al.hi,
            TypeLaw::DegenerateAlpha { k: kl, alpha: a0 } => kl.contains(k) && alpha == *a0,
            TypeLaw::Discrete(atoms) => atoms.iter().any(|at| at.alpha == alpha && at.k == k),
        }
    }

    /// `ι(α, k) = (VaR_α(X_k), k)`.
    pub fn transform(&self, alpha: T, k: T) -> Result<TransformedType<T>> {
        if !self.contains(alpha, k) {
            return domain(format!("type (alpha={alpha}, k={k}) is outside the support"));
        }
        Ok(TransformedType {
            a: self.loss(k)?.var(alpha)?,
            k,
        })
    }

    /// Range of `k` over the support.
    pub fn k_bounds(&self) -> (T, T) {
        match &self.law {
            TypeLaw::Product { k, .. } | TypeLaw::DegenerateAlpha { k, .. } => (k.lo, k.hi),
            TypeLaw::Discrete(atoms) => atoms.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), at| {
                (lo.min(at.k), hi.max(at.k))
            }),
        }
    }

    /// `L = inf a` over the support.
    pub fn lower_support(&self) -> T {
        match &self.law {
            TypeLaw::Product { k, .. } | TypeLaw::DegenerateAlpha { k, .. } => k.lo * self.q_min,
            TypeLaw::Discrete(_) => self.atom_types().iter().fold(T::infinity(), |acc, t| acc.min(t.a)),
        }
    }

    /// Largest `a` over the (capped) support.
    pub fn upper_support(&self) -> T {
        match &self.law {
            TypeLaw::Product { k, .. } | TypeLaw::DegenerateAlpha { k, .. } => k.hi * self.q_max,
            TypeLaw::Discrete(_) => self.atom_types().iter().fold(T::neg_infinity(), |acc, t| acc.max(t.a)),
        }
    }

    /// Transformed atoms with their weights (empty for continuous laws).
    pub fn atom_types(&self) -> Vec<TransformedType<T>> {
        match &self.law {
            TypeLaw::Discrete(atoms) => atoms
                .iter()
                .map(|at| TransformedType {
                    a: self.loss(at.k).and_then(|x| x.var(at.alpha)).expect("validated atom"),
                    k: at.k,
                })
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Range of `a` given `k` (continuous laws).
    pub fn a_range(&self, k: T) -> (T, T) {
        (k * self.q_min, k * self.q_max)
    }

    /// `∫ f(a, k) Q(da × dk)`. `a_breaks` are `a`-values where `f` may jump
    /// or kink.
    pub fn integrate<F>(&self, f: F, a_breaks: &[T]) -> T
    where
        F: Fn(T, T) -> T,
    {
        self.integrate_split(f, a_breaks, &[])
    }

    /// As [`integrate`](Self::integrate) with extra `k`-values where the
    /// integrand is known to kink.
    pub fn integrate_split<F>(&self, f: F, a_breaks: &[T], k_breaks: &[T]) -> T
    where
        F: Fn(T, T) -> T,
    {
        self.integrate_with(
            |k| {
                let f = &f;
                move |a| f(a, k)
            },
            a_breaks,
            k_breaks,
        )
    }

    /// `∫ g_k(a) Q(da × dk)` where `make(k)` builds the `a`-integrand once
    /// per `k` node, so per-type constants are not recomputed for every `a`.
    ///
    /// Continuous laws: the `k` range is split where a breakpoint enters or
    /// leaves the conditional `a`-support and at `k_breaks`; each panel uses
    /// the fixed Gauss–Legendre rule. Given `k`, the `a` integral is adaptive
    /// Simpson with forced splits at the breakpoints. Values exactly on a
    /// breakpoint are never used (measure zero). Discrete laws sum atoms
    /// exactly.
    pub fn integrate_with<M, G>(&self, make: M, a_breaks: &[T], k_breaks: &[T]) -> T
    where
        M: Fn(T) -> G,
        G: Fn(T) -> T,
    {
        let sum = |acc: T, v: T| acc + v;
        match &self.law {
            TypeLaw::Discrete(atoms) => atoms
                .iter()
                .zip(self.atom_types())
                .map(|(at, t)| at.weight * make(t.k)(t.a))
                .fold(T::zero(), sum),
            TypeLaw::DegenerateAlpha { k, .. } => {
                let q = self.q_min;
                let cuts = a_breaks.iter().map(|&t| t / q).chain(k_breaks.iter().copied());
                panels(k.lo, k.hi, cuts)
                    .into_iter()
                    .map(|(lo, hi)| self.rule.integrate(|kk| make(kk)(kk * q), lo, hi))
                    .fold(T::zero(), sum)
                    * k.density()
            }
            TypeLaw::Product { k, alpha } => {
                let cuts = a_breaks
                    .iter()
                    .flat_map(|&t| [t / self.q_min, t / self.q_max])
                    .chain(k_breaks.iter().copied());
                let alpha_dens = alpha.density();
                let inner = |kk: T| -> T {
                    let g = make(kk);
                    let loss = self.family.loss(kk).expect("validated scale");
                    let (a_lo, a_hi) = self.a_range(kk);
                    panels(a_lo, a_hi, a_breaks.iter().copied())
                        .into_iter()
                        .map(|(lo, hi)| {
                            adaptive_simpson(|a| g(a) * loss.density(a), lo, hi, self.settings.simpson_tol, T::zero())
                        })
                        .fold(T::zero(), sum)
                        * alpha_dens
                };
                panels(k.lo, k.hi, cuts)
                    .into_iter()
                    .map(|(lo, hi)| self.rule.integrate(&inner, lo, hi))
                    .fold(T::zero(), sum)
                    * k.density()
            }
        }
    }

    /// Draws one transformed type.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> TransformedType<T> {
        match &self.law {
            TypeLaw::Product { k, alpha } => {
                let kk = k.sample(rng);
                let mut al = alpha.sample(rng);
                while !(al > T::zero()) {
                    al = alpha.sample(rng);
                }
                TransformedType {
                    a: kk * self.family.base().var(al).expect("validated alpha range"),
                    k: kk,
                }
            }
            TypeLaw::DegenerateAlpha { k, .. } => {
                let kk = k.sample(rng);
                TransformedType {
                    a: kk * self.q_min,
                    k: kk,
                }
            }
            TypeLaw::Discrete(atoms) => {
                let u: T = lit(rng.gen::<f64>());
                let types = self.atom_types();
                let mut acc = T::zero();
                for (at, t) in atoms.iter().zip(&types) {
                    acc = acc + at.weight;
                    if u < acc {
                        return *t;
                    }
                }
                *types.last().expect("nonempty atoms")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn example_product() -> TypeDistribution<f64> {
        let law = TypeLaw::Product {
            k: Uniform::new(5000.0, 25000.0).unwrap(),
            alpha: Uniform::new((-3f64).exp(), (-2f64).exp()).unwrap(),
        };
        TypeDistribution::exponential(law).unwrap()
    }

    fn example_degenerate() -> TypeDistribution<f64> {
        let law = TypeLaw::DegenerateAlpha {
            k: Uniform::new(5000.0, 25000.0).unwrap(),
            alpha: (-3f64).exp(),
        };
        TypeDistribution::exponential(law).unwrap()
    }

    #[test]
    fn transform_examples() {
        let d = example_degenerate();
        let t = d.transform((-3f64).exp(), 5000.0).unwrap();
        assert!((t.a - 15000.0).abs() < 1e-9);
        let p = example_product();
        let t = p.transform((-2f64).exp(), 25000.0).unwrap();
        assert!((t.a - 50000.0).abs() < 1e-9);
        assert!(p.transform(0.5, 10000.0).is_err());
        assert!(p.transform(0.1, 30000.0).is_err());
    }

    #[test]
    fn lower_support_examples() {
        assert!((example_product().lower_support() - 10000.0).abs() < 1e-9);
        assert!((example_degenerate().lower_support() - 15000.0).abs() < 1e-9);
        assert!((example_product().upper_support() - 75000.0).abs() < 1e-8);
        let atoms = vec![TypeAtom {
            alpha: 0.1,
            k: 2.0,
            weight: 1.0,
        }];
        let d = TypeDistribution::exponential(TypeLaw::Discrete(atoms)).unwrap();
        assert!((d.lower_support() - (-2.0 * 0.1f64.ln())).abs() < 1e-14);
    }

    #[test]
    fn total_mass_is_one() {
        for d in [example_product(), example_degenerate()] {
            let m = d.integrate(|_, _| 1.0, &[]);
            assert!((m - 1.0).abs() < 1e-10, "mass {m}");
        }
    }

    #[test]
    fn indicator_below_support_integrates_to_one() {
        let d = example_product();
        let m = d.integrate(|a, _| if a >= 5000.0 { 1.0 } else { 0.0 }, &[5000.0]);
        assert!((m - 1.0).abs() < 1e-10);
    }

    #[test]
    fn conditional_density_normalized_per_k() {
        // ∫_{2k}^{3k} β/k e^{-a/k} da = 1 with β = 1/(e^{-2} - e^{-3})
        let beta = 1.0 / ((-2f64).exp() - (-3f64).exp());
        assert!((beta - 11.6894).abs() < 1e-4);
        for k in [5000.0, 12345.0, 25000.0] {
            let v = adaptive_simpson(|a: f64| beta / k * (-a / k).exp(), 2.0 * k, 3.0 * k, 1e-12, 0.0);
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn split_at_breakpoint_gives_exact_probability() {
        let d = example_product();
        let beta = 1.0 / ((-2f64).exp() - (-3f64).exp());
        let t = 40000.0;
        let got = d.integrate(|a, _| if a > t { 1.0 } else { 0.0 }, &[t]);
        // P(a > t) = (1/20000) ∫ β (e^{-max(t,2k)/k} - e^{-3})_+ dk
        let oracle = GaussLegendre::<f64>::new(200);
        let g = |k: f64| {
            let lo = t.max(2.0 * k);
            if lo >= 3.0 * k {
                0.0
            } else {
                beta * ((-lo / k).exp() - (-3f64).exp())
            }
        };
        let want = (oracle.integrate(g, t / 3.0, t / 2.0) + oracle.integrate(g, t / 2.0, 25000.0)) / 20000.0;
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    }

    #[test]
    fn discrete_weights_validated() {
        let bad = vec![
            TypeAtom {
                alpha: 0.1,
                k: 1.0,
                weight: 0.5,
            },
            TypeAtom {
                alpha: 0.2,
                k: 1.0,
                weight: 0.4,
            },
        ];
        assert!(TypeDistribution::<f64>::exponential(TypeLaw::Discrete(bad)).is_err());
        let neg = vec![
            TypeAtom {
                alpha: 0.1,
                k: 1.0,
                weight: 1.5,
            },
            TypeAtom {
                alpha: 0.2,
                k: 1.0,
                weight: -0.5,
            },
        ];
        assert!(TypeDistribution::<f64>::exponential(TypeLaw::Discrete(neg)).is_err());
        assert!(TypeDistribution::<f64>::exponential(TypeLaw::Discrete(vec![])).is_err());
    }

    #[test]
    fn alpha_must_leave_room_for_point_mass() {
        let fam = LossFamily::new(LossModel::exponential(1.0).unwrap().with_atom_at_zero(0.5).unwrap());
        let law = TypeLaw::DegenerateAlpha {
            k: Uniform::new(1.0, 2.0).unwrap(),
            alpha: 0.6,
        };
        assert!(TypeDistribution::new(law, fam, QuadratureSettings::default()).is_err());
    }

    #[test]
    fn discrete_integral_is_exact_sum() {
        let atoms = vec![
            TypeAtom {
                alpha: 0.1,
                k: 1.0,
                weight: 0.25,
            },
            TypeAtom {
                alpha: 0.05,
                k: 3.0,
                weight: 0.75,
            },
        ];
        let d = TypeDistribution::exponential(TypeLaw::Discrete(atoms)).unwrap();
        let v = d.integrate(|a, k| a * k, &[]);
        let want = 0.25 * (-(0.1f64).ln()) + 0.75 * 9.0 * (-(0.05f64).ln());
        assert!((v - want).abs() < 1e-14);
    }

    #[test]
    fn samples_respect_lower_support() {
        let d = example_product();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let l = d.lower_support();
        for _ in 0..10_000 {
            let t = d.sample(&mut rng);
            assert!(t.a >= l - 1e-9 && t.a <= d.upper_support() + 1e-9);
        }
    }
}
