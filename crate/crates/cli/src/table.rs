//! menu.csv, curve.csv and JSON number formatting.

use std::path::Path;

use reinmenu::verification::MenuItem;
use reinmenu::{Contract, ContractClass, GenericMenu, MenuEntry, MenuRule, TransformedType, TypeDistribution, TypeLaw};

use crate::config::MenuGridConfig;
use crate::error::CliError;

pub const MENU_HEADER: [&str; 7] = [
    "a",
    "k",
    "contract_class",
    "lambda",
    "deductible",
    "premium",
    "risk_reduction",
];

/// 17 significant digits; infinities as "inf".
pub fn fmt_num(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else if x.is_nan() {
        "nan".into()
    } else {
        format!("{x:.16e}")
    }
}

/// JSON value for `x`, with non-finite values as strings.
pub fn json_num(x: f64) -> serde_json::Value {
    serde_json::Number::from_f64(x).map_or_else(|| serde_json::Value::String(fmt_num(x)), serde_json::Value::Number)
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Types at which the menu is tabulated.
pub fn grid_types(dist: &TypeDistribution<f64>, grid: MenuGridConfig) -> Vec<TransformedType<f64>> {
    match dist.law() {
        TypeLaw::Discrete(_) => dist.atom_types(),
        TypeLaw::DegenerateAlpha { .. } => {
            let (lo, hi) = dist.k_bounds();
            linspace(lo, hi, grid.k_points)
                .into_iter()
                .map(|k| TransformedType {
                    a: dist.a_range(k).0,
                    k,
                })
                .collect()
        }
        TypeLaw::Product { .. } => {
            let (lo, hi) = dist.k_bounds();
            linspace(lo, hi, grid.k_points)
                .into_iter()
                .flat_map(|k| {
                    let (a_lo, a_hi) = dist.a_range(k);
                    linspace(a_lo, a_hi, grid.a_points)
                        .into_iter()
                        .map(move |a| TransformedType { a, k })
                })
                .collect()
        }
    }
}

fn output_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Output(format!("cannot write {}: {e}", path.display()))
}

pub fn write_menu(path: &Path, rule: &dyn MenuRule<f64>, types: &[TransformedType<f64>]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| output_err(path, e))?;
    w.write_record(MENU_HEADER).map_err(|e| output_err(path, e))?;
    let class = rule.class();
    for &t in types {
        let e = rule.entry(t);
        let (lambda, d) = e.contract.parameters();
        let row = [
            fmt_num(t.a),
            fmt_num(t.k),
            class.to_string(),
            fmt_num(lambda),
            fmt_num(d),
            fmt_num(e.premium),
            fmt_num(e.net_benefit(t.a)),
        ];
        w.write_record(&row).map_err(|e| output_err(path, e))?;
    }
    w.flush().map_err(|e| output_err(path, e))
}

pub fn write_curve(path: &Path, points: &[(f64, f64)]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| output_err(path, e))?;
    w.write_record(["t", "objective"]).map_err(|e| output_err(path, e))?;
    for &(t, j) in points {
        w.write_record([fmt_num(t), fmt_num(j)])
            .map_err(|e| output_err(path, e))?;
    }
    w.flush().map_err(|e| output_err(path, e))
}

pub fn write_json(path: &Path, value: &serde_json::Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| output_err(path, e))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| output_err(path, e))
}

/// A menu read back from menu.csv.
pub struct MenuTable {
    pub class: ContractClass,
    pub menu: GenericMenu<f64>,
}

pub fn read_menu(path: &Path) -> Result<MenuTable, CliError> {
    let bad = |line: usize, m: String| CliError::Input(format!("{}:{line}: {m}", path.display()));
    let mut r =
        csv::Reader::from_path(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let header = r.headers().map_err(|e| bad(1, e.to_string()))?.clone();
    if header.iter().ne(MENU_HEADER) {
        return Err(bad(1, format!("expected columns {}", MENU_HEADER.join(","))));
    }
    let mut class = None;
    let mut items = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| bad(line, e.to_string()))?;
        let num = |j: usize| -> Result<f64, CliError> {
            let s = rec[j].trim();
            s.parse::<f64>()
                .ok()
                .filter(|x| !x.is_nan())
                .ok_or_else(|| bad(line, format!("column {} is not a number: {s:?}", MENU_HEADER[j])))
        };
        let c = ContractClass::parse(rec[2].trim())
            .ok_or_else(|| bad(line, format!("unknown contract_class {:?}", &rec[2])))?;
        if *class.get_or_insert(c) != c {
            return Err(bad(line, "rows mix contract classes".into()));
        }
        let (a, k, lambda, d, premium) = (num(0)?, num(1)?, num(3)?, num(4)?, num(5)?);
        if !(a.is_finite() && k.is_finite() && premium.is_finite()) {
            return Err(bad(line, "a, k and premium must be finite".into()));
        }
        let contract = contract_from(c, lambda, d).map_err(|m| bad(line, m))?;
        items.push(MenuItem {
            label: TransformedType { a, k },
            entry: MenuEntry { contract, premium },
        });
    }
    let class = class.ok_or_else(|| CliError::Input(format!("{}: menu has no rows", path.display())))?;
    Ok(MenuTable {
        class,
        menu: GenericMenu::new(items),
    })
}

fn contract_from(class: ContractClass, lambda: f64, d: f64) -> Result<Contract<f64>, String> {
    let c = match class {
        ContractClass::StopLoss if d == f64::INFINITY => Ok(Contract::Null),
        ContractClass::StopLoss if lambda == 1.0 => Contract::stop_loss(d),
        ContractClass::StopLoss => return Err(format!("stop-loss rows need lambda = 1, got {lambda}")),
        ContractClass::QuotaShare if d == 0.0 => Contract::quota_share(lambda),
        ContractClass::QuotaShare => return Err(format!("quota-share rows need deductible = 0, got {d}")),
        ContractClass::ChangeLoss => Contract::change_loss(lambda, d),
    };
    c.map_err(|e| e.to_string())
}
