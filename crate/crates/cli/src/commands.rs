use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use reinmenu::solver::change_loss::{self, ChangeLossMenu};
use reinmenu::solver::curve;
use reinmenu::solver::quota_share::{self, QuotaShareMenu};
use reinmenu::solver::stop_loss::{self, StopLossMenu};
use reinmenu::verification::{first_best_demo, monte_carlo_profit, AUDIT_TOL};
use reinmenu::{ContractClass, GenericMenu, Market, MenuRule, TransformedType};

use crate::config::{Scenario, ScenarioConfig};
use crate::error::CliError;
use crate::table::{self, json_num};

/// IC is checked on all pairs up to this many rows, and on a seeded sample
/// of `IC_SAMPLE` pairs beyond it.
const IC_ALL_PAIRS_MAX_ROWS: usize = 2000;
const IC_SAMPLE: usize = 1_000_000;
/// Points of the indirect-utility audit grid.
const UTILITY_GRID: usize = 1001;
/// Relative agreement required when recovering the kink from menu rows.
const KINK_REL_TOL: f64 = 1e-9;

pub struct Common {
    pub config: PathBuf,
    pub out: PathBuf,
    pub class: Option<ContractClass>,
    pub grid: Option<usize>,
    pub seed: Option<u64>,
}

impl Common {
    fn scenario(&self) -> Result<Scenario, CliError> {
        let mut cfg = ScenarioConfig::load(&self.config)?;
        if let Some(c) = self.class {
            cfg.solver.class = c;
        }
        if let Some(g) = self.grid {
            cfg.solver.grid_points = g;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        let scenario = cfg.build()?;
        fs::create_dir_all(&self.out)
            .map_err(|e| CliError::Output(format!("cannot create {}: {e}", self.out.display())))?;
        Ok(scenario)
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }
}

fn solve_rule(s: &Scenario) -> Result<Box<dyn MenuRule<f64>>, CliError> {
    Ok(match s.class {
        ContractClass::StopLoss => Box::new(stop_loss::solve(&s.dist, &s.cost, s.search)?),
        ContractClass::QuotaShare => Box::new(quota_share::solve(&s.dist, &s.cost, s.search)?),
        ContractClass::ChangeLoss => Box::new(change_loss::solve(&s.dist, &s.cost, s.search)?),
    })
}

fn rule_with_kink(class: ContractClass, market: &Market<f64>, tau: f64) -> Result<Box<dyn MenuRule<f64>>, CliError> {
    Ok(match class {
        ContractClass::StopLoss => Box::new(StopLossMenu::with_kink(market, tau)?),
        ContractClass::QuotaShare => Box::new(QuotaShareMenu::with_kink(market, tau)?),
        ContractClass::ChangeLoss => Box::new(ChangeLossMenu::with_kink(market, tau)?),
    })
}

pub fn solve(c: &Common) -> Result<(), CliError> {
    let s = c.scenario()?;
    let market = Market::new(&s.dist, &s.cost)?;
    let check = market.assumption_check();
    let rule = solve_rule(&s)?;
    table::write_menu(
        &c.path("menu.csv"),
        rule.as_ref(),
        &table::grid_types(&s.dist, s.menu_grid),
    )?;
    let summary = json!({
        "contract_class": s.class,
        "tau_star": json_num(rule.tau_star()),
        "objective_value": json_num(rule.objective_value()),
        "L": json_num(s.dist.lower_support()),
        "a_max": json_num(s.dist.upper_support()),
        "sup_theta_star": json_num(check.sup_theta_star),
        "assumption_holds": check.holds,
    });
    table::write_json(&c.path("summary.json"), &summary)
}

pub fn curve_cmd(c: &Common, t_lo: Option<f64>, t_hi: Option<f64>, n: usize) -> Result<(), CliError> {
    let s = c.scenario()?;
    let market = Market::new(&s.dist, &s.cost)?;
    let lo = t_lo.unwrap_or(0.0);
    let hi = t_hi.unwrap_or_else(|| s.dist.upper_support());
    let points = match s.class {
        ContractClass::StopLoss => curve(|t| market.stop_loss_objective(t), lo, hi, n)?,
        ContractClass::QuotaShare => curve(|t| market.quota_share_objective(t), lo, hi, n)?,
        ContractClass::ChangeLoss => curve(|t| market.change_loss_objective(t), lo, hi, n)?,
    };
    table::write_curve(&c.path("curve.csv"), &points)
}

/// Largest failure of monotonicity, convexity or the 1-Lipschitz bound of
/// the indirect utility on an equally spaced grid.
fn utility_audit(menu: &GenericMenu<f64>, hi: f64) -> Result<serde_json::Value, CliError> {
    let grid: Vec<f64> = (0..UTILITY_GRID)
        .map(|i| hi * i as f64 / (UTILITY_GRID - 1) as f64)
        .collect();
    let v = grid
        .iter()
        .map(|&a| menu.indirect_utility(a))
        .collect::<Result<Vec<_>, _>>()?;
    let mut worst: f64 = 0.0;
    for i in 1..grid.len() {
        let dv = v[i] - v[i - 1];
        let da = grid[i] - grid[i - 1];
        worst = worst.max(-dv).max(dv - da);
        if i + 1 < grid.len() {
            worst = worst.max(v[i] - 0.5 * (v[i - 1] + v[i + 1]));
        }
    }
    Ok(json!({
        "checked": grid.len(),
        "max_violation": json_num(worst),
        "tolerance": AUDIT_TOL,
        "passed": worst <= AUDIT_TOL,
    }))
}

pub fn verify(c: &Common, menu_path: &Path) -> Result<(), CliError> {
    let s = c.scenario()?;
    let t = table::read_menu(menu_path)?;
    let menu = t.menu;
    let ic = if menu.len() <= IC_ALL_PAIRS_MAX_ROWS {
        menu.check_ic_all(AUDIT_TOL)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
        menu.check_ic(&menu.sample_pairs(&mut rng, IC_SAMPLE), AUDIT_TOL)
    };
    let ir = menu.check_ir_all(AUDIT_TOL);
    let hi = menu
        .items
        .iter()
        .fold(s.dist.upper_support(), |m, it| m.max(it.label.a));
    let utility = utility_audit(&menu, hi)?;
    let passed = ic.passed && ir.passed && utility["passed"] == json!(true);
    let report = json!({
        "menu": menu_path.display().to_string(),
        "contract_class": t.class,
        "rows": menu.len(),
        "passed": passed,
        "ic": ic,
        "ir": ir,
        "indirect_utility": utility,
    });
    table::write_json(&c.path("report.json"), &report)?;
    if passed {
        Ok(())
    } else {
        Err(CliError::AuditFailed(format!(
            "IC max violation {:e}, IR max violation {:e}",
            ic.max_violation, ir.max_violation
        )))
    }
}

/// Number of random pairs drawn when none are given.
const FIRST_BEST_PAIRS: usize = 20;
const FIRST_BEST_MAX_DRAWS: usize = 1000;

pub fn first_best(c: &Common, pairs: &[[f64; 4]]) -> Result<(), CliError> {
    let s = c.scenario()?;
    let mut types: Vec<(TransformedType<f64>, TransformedType<f64>)> = Vec::new();
    if pairs.is_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
        for _ in 0..FIRST_BEST_MAX_DRAWS {
            let (x, y) = (s.dist.sample(&mut rng), s.dist.sample(&mut rng));
            if x.a != y.a {
                types.push((x, y));
            }
            if types.len() == FIRST_BEST_PAIRS {
                break;
            }
        }
        if types.is_empty() {
            return Err(CliError::Input("all types share one a; nothing to mimic".into()));
        }
    } else {
        for p in pairs {
            for (alpha, k) in [(p[0], p[1]), (p[2], p[3])] {
                if !s.dist.contains(alpha, k) {
                    return Err(CliError::Input(format!(
                        "type (alpha={alpha}, k={k}) is outside the type support"
                    )));
                }
            }
            types.push((s.dist.transform(p[0], p[1])?, s.dist.transform(p[2], p[3])?));
        }
    }
    let mut reports = Vec::with_capacity(types.len());
    for (x, y) in types {
        let (high, low) = if x.a >= y.a { (x, y) } else { (y, x) };
        if high.a == low.a {
            return Err(CliError::Input(format!(
                "pair has equal a = {}; nothing to mimic",
                high.a
            )));
        }
        reports.push(first_best_demo(high, low, &s.dist, &s.cost)?);
    }
    let report = json!({
        "contract_class": ContractClass::StopLoss,
        "all_gains_nonnegative": reports.iter().all(|r| r.mimic_gain >= 0.0),
        "all_profit_chains_hold": reports.iter().all(|r| r.profit_chain_holds),
        "pairs": reports,
    });
    table::write_json(&c.path("report.json"), &report)
}

/// `τ*` implied by the served rows: `P + d` for stop-loss and change-loss,
/// `P` for full quota-share cover. `+inf` when no row is served.
fn recover_kink(class: ContractClass, menu: &GenericMenu<f64>) -> Result<f64, CliError> {
    let mut tau: Option<f64> = None;
    for it in &menu.items {
        let (lambda, d) = it.entry.contract.parameters();
        if it.entry.contract.is_null() {
            continue;
        }
        let t = match class {
            ContractClass::QuotaShare => it.entry.premium,
            _ => it.entry.premium + d,
        };
        if lambda != 1.0 {
            return Err(CliError::Input(format!(
                "served row with lambda = {lambda} is not a kink menu"
            )));
        }
        match tau {
            Some(prev) if (prev - t).abs() > KINK_REL_TOL * prev.abs().max(t.abs()) => {
                return Err(CliError::Input(format!(
                    "menu rows disagree on the kink: {prev} vs {t}"
                )));
            }
            Some(_) => {}
            None => tau = Some(t),
        }
    }
    Ok(tau.unwrap_or(f64::INFINITY))
}

pub fn simulate(c: &Common, menu_path: &Path, n: usize) -> Result<(), CliError> {
    if n == 0 {
        return Err(CliError::Input("--n must be at least 1".into()));
    }
    let s = c.scenario()?;
    let t = table::read_menu(menu_path)?;
    if c.class.is_some_and(|cl| cl != t.class) {
        return Err(CliError::Input(format!(
            "--class differs from the menu's class {}",
            t.class
        )));
    }
    let market = Market::new(&s.dist, &s.cost)?;
    let tau = recover_kink(t.class, &t.menu)?;
    let rule = rule_with_kink(t.class, &market, tau)?;
    let mc = monte_carlo_profit(rule.as_ref(), &t.menu, &s.dist, &s.cost, n, s.seed)?;
    let objective = rule.objective_value();
    let z = if mc.std_error > 0.0 {
        (mc.estimate - objective) / mc.std_error
    } else if mc.estimate == objective {
        0.0
    } else {
        f64::INFINITY.copysign(mc.estimate - objective)
    };
    let report = json!({
        "contract_class": t.class,
        "tau_star": json_num(tau),
        "n": mc.n,
        "seed": s.seed,
        "estimate": json_num(mc.estimate),
        "std_error": json_num(mc.std_error),
        "objective_value": json_num(objective),
        "z_score": json_num(z),
    });
    table::write_json(&c.path("estimate.json"), &report)
}
