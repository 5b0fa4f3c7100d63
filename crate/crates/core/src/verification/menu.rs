use rand::Rng;
use serde::Serialize;

use crate::contract::{MenuEntry, MenuRule};
use crate::error::{domain, Result};
use crate::scalar::Scalar;
use crate::type_space::TransformedType;

/// Default audit tolerance on currency amounts.
pub const AUDIT_TOL: f64 = 1e-9;
/// Offending pairs kept in a report.
const MAX_OFFENDERS: usize = 100;

/// Menu entry designated for a type.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MenuItem<T> {
    pub label: TransformedType<T>,
    pub entry: MenuEntry<T>,
}

/// Finite menu `{(I_(a,k), P_(a,k))}`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GenericMenu<T> {
    pub items: Vec<MenuItem<T>>,
}

impl<T: Scalar> GenericMenu<T> {
    pub fn new(items: Vec<MenuItem<T>>) -> Self {
        Self { items }
    }

    /// Entries a rule assigns to the given types.
    pub fn from_rule<R: MenuRule<T> + ?Sized>(rule: &R, types: &[TransformedType<T>]) -> Self {
        Self::new(
            types
                .iter()
                .map(|&t| MenuItem {
                    label: t,
                    entry: rule.entry(t),
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// `v_M(a) = max over entries of I(a) - P`.
    pub fn indirect_utility(&self, a: T) -> Result<T> {
        if self.items.is_empty() {
            return domain("indirect utility of an empty menu");
        }
        Ok(self
            .items
            .iter()
            .map(|it| it.entry.net_benefit(a))
            .fold(T::neg_infinity(), |acc, v| acc.max(v)))
    }

    /// Incentive compatibility on `(own, alternative)` index pairs: the own
    /// entry must be weakly preferred at the own type's `a`.
    pub fn check_ic(&self, pairs: &[(usize, usize)], tol: f64) -> ViolationReport {
        let mut report = ViolationReport::new("IC", tol);
        for &(i, j) in pairs {
            let (own, alt) = (&self.items[i], &self.items[j]);
            let a = own.label.a;
            let gap = alt.entry.net_benefit(a) - own.entry.net_benefit(a);
            report.record(i, Some(j), gap.to_f64().unwrap_or(f64::NAN));
        }
        report.finish()
    }

    /// Incentive compatibility over every ordered pair.
    pub fn check_ic_all(&self, tol: f64) -> ViolationReport {
        let n = self.items.len();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
        self.check_ic(&pairs, tol)
    }

    /// Individual rationality: `I(a) - P ≥ 0` for the listed entries.
    pub fn check_ir(&self, indices: &[usize], tol: f64) -> ViolationReport {
        let mut report = ViolationReport::new("IR", tol);
        for &i in indices {
            let it = &self.items[i];
            let gap = -it.entry.net_benefit(it.label.a);
            report.record(i, None, gap.to_f64().unwrap_or(f64::NAN));
        }
        report.finish()
    }

    pub fn check_ir_all(&self, tol: f64) -> ViolationReport {
        let idx: Vec<usize> = (0..self.items.len()).collect();
        self.check_ir(&idx, tol)
    }

    /// `n` uniformly drawn `(own, alternative)` pairs.
    pub fn sample_pairs<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<(usize, usize)> {
        let m = self.items.len();
        if m == 0 {
            return Vec::new();
        }
        (0..n).map(|_| (rng.gen_range(0..m), rng.gen_range(0..m))).collect()
    }
}

/// A constraint that fails by `magnitude`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Violation {
    pub own: usize,
    pub alternative: Option<usize>,
    pub magnitude: f64,
}

/// Result of an IC or IR audit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViolationReport {
    pub constraint: String,
    pub checked: usize,
    pub max_violation: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub offenders: Vec<Violation>,
}

impl ViolationReport {
    fn new(constraint: &str, tol: f64) -> Self {
        Self {
            constraint: constraint.into(),
            checked: 0,
            max_violation: 0.0,
            tolerance: tol,
            passed: true,
            offenders: Vec::new(),
        }
    }

    fn record(&mut self, own: usize, alternative: Option<usize>, gap: f64) {
        self.checked += 1;
        if gap.is_nan() || gap > self.max_violation {
            self.max_violation = if gap.is_nan() { f64::INFINITY } else { gap };
        }
        if gap.is_nan() || gap > self.tolerance {
            self.offenders.push(Violation {
                own,
                alternative,
                magnitude: gap,
            });
        }
    }

    fn finish(mut self) -> Self {
        self.passed = self.offenders.is_empty();
        self.offenders.sort_by(|x, y| {
            y.magnitude
                .partial_cmp(&x.magnitude)
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        self.offenders.truncate(MAX_OFFENDERS);
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contract::Contract;

    fn item(a: f64, contract: Contract<f64>, premium: f64) -> MenuItem<f64> {
        MenuItem {
            label: TransformedType { a, k: 1.0 },
            entry: MenuEntry { contract, premium },
        }
    }

    #[test]
    fn two_stop_loss_entries() {
        let menu = GenericMenu::new(vec![
            item(12.0, Contract::StopLoss { deductible: 0.0 }, 5.0),
            item(12.0, Contract::StopLoss { deductible: 10.0 }, 0.0),
        ]);
        assert_eq!(menu.indirect_utility(12.0).unwrap(), 7.0);
    }

    #[test]
    fn null_menu() {
        let menu = GenericMenu::new(vec![item(3.0, Contract::Null, 0.0)]);
        assert_eq!(menu.indirect_utility(100.0).unwrap(), 0.0);
        assert!(menu.check_ic_all(AUDIT_TOL).passed);
        let ir = menu.check_ir_all(AUDIT_TOL);
        assert!(ir.passed);
        assert_eq!(ir.max_violation, 0.0);
        assert!(GenericMenu::<f64>::default().indirect_utility(1.0).is_err());
    }

    #[test]
    fn overpriced_entry_fails_ir() {
        let menu = GenericMenu::new(vec![item(10.0, Contract::StopLoss { deductible: 5.0 }, 6.0)]);
        let ir = menu.check_ir_all(AUDIT_TOL);
        assert!(!ir.passed);
        assert!((ir.max_violation - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mimicry_detected() {
        // full-extraction menu: the high type gains by taking the low contract
        let menu = GenericMenu::new(vec![
            item(20.0, Contract::StopLoss { deductible: 1.0 }, 19.0),
            item(10.0, Contract::StopLoss { deductible: 1.0 }, 9.0),
        ]);
        let ic = menu.check_ic_all(AUDIT_TOL);
        assert!(!ic.passed);
        assert_eq!(ic.offenders[0].own, 0);
        assert_eq!(ic.offenders[0].alternative, Some(1));
    }
}
