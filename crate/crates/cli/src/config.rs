//! Scenario configuration: strict JSON schema and conversion into solver inputs.

use std::path::Path;

use serde::Deserialize;

use reinmenu::{
    ContractClass, CostFunctional, Distortion, LossFamily, LossModel, QuadratureSettings, SearchSettings, TypeAtom,
    TypeDistribution, TypeLaw, Uniform,
};

use crate::error::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub cost: CostConfig,
    #[serde(default)]
    pub loss: LossConfig,
    pub types: TypesConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default)]
    pub menu_grid: MenuGridConfig,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostConfig {
    pub theta: f64,
    #[serde(default)]
    pub distortion: DistortionConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistortionKind {
    #[default]
    Identity,
    Power,
    ProportionalHazard,
    Tabulated,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum DistortionParam {
    Exponent(f64),
    Table { xs: Vec<f64>, ys: Vec<f64> },
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistortionConfig {
    pub kind: DistortionKind,
    #[serde(default)]
    pub param: Option<DistortionParam>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    #[default]
    Exponential,
    Lomax,
    Uniform,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LossConfig {
    pub family: LossKind,
    #[serde(default)]
    pub params: LossParams,
}

/// Unit-scale parameters; the type's `k` is the scale.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LossParams {
    /// Lomax tail index.
    pub shape: Option<f64>,
    /// Probability of a zero loss.
    pub atom_at_zero: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TypeVariant {
    Product,
    DegenerateAlpha,
    Discrete,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TypesConfig {
    pub variant: TypeVariant,
    pub k_dist: Option<RangeConfig>,
    pub alpha_dist: Option<AlphaConfig>,
    pub atoms: Option<Vec<AtomConfig>>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeConfig {
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum AlphaConfig {
    Range(RangeConfig),
    Value { value: f64 },
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomConfig {
    pub alpha: f64,
    pub k: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "default_class")]
    pub class: ContractClass,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    #[serde(default = "default_refine_tol")]
    pub refine_tol: f64,
    #[serde(default = "default_a_quantile_cap")]
    pub a_quantile_cap: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            class: default_class(),
            grid_points: default_grid_points(),
            refine_tol: default_refine_tol(),
            a_quantile_cap: default_a_quantile_cap(),
        }
    }
}

fn default_class() -> ContractClass {
    ContractClass::StopLoss
}

fn default_grid_points() -> usize {
    SearchSettings::default().grid_points
}

fn default_refine_tol() -> f64 {
    SearchSettings::default().refine_tol
}

fn default_a_quantile_cap() -> f64 {
    QuadratureSettings::default().a_quantile_cap
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    #[serde(default = "default_outer_nodes")]
    pub outer_nodes: usize,
    #[serde(default = "default_simpson_tol")]
    pub simpson_tol: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            outer_nodes: default_outer_nodes(),
            simpson_tol: default_simpson_tol(),
        }
    }
}

fn default_outer_nodes() -> usize {
    QuadratureSettings::default().outer_nodes
}

fn default_simpson_tol() -> f64 {
    QuadratureSettings::default().simpson_tol
}

/// Resolution of the `(a, k)` table written to menu.csv: `k_points` scales,
/// each with `a_points` VaR levels across its conditional support.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MenuGridConfig {
    #[serde(default = "default_menu_points")]
    pub a_points: usize,
    #[serde(default = "default_menu_points")]
    pub k_points: usize,
}

impl Default for MenuGridConfig {
    fn default() -> Self {
        Self {
            a_points: default_menu_points(),
            k_points: default_menu_points(),
        }
    }
}

fn default_menu_points() -> usize {
    21
}

/// Validated solver inputs.
pub struct Scenario {
    pub class: ContractClass,
    pub dist: TypeDistribution<f64>,
    pub cost: CostFunctional<f64>,
    pub search: SearchSettings,
    pub menu_grid: MenuGridConfig,
    pub seed: u64,
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("invalid config {}: {e}", path.display())))
    }

    pub fn build(&self) -> Result<Scenario, CliError> {
        let s = &self.solver;
        if s.grid_points < 2 {
            return Err(CliError::Input("solver.grid_points must be at least 2".into()));
        }
        if !(s.refine_tol > 0.0 && s.refine_tol < 1.0) {
            return Err(CliError::Input("solver.refine_tol must lie in (0, 1)".into()));
        }
        if self.menu_grid.a_points == 0 || self.menu_grid.k_points == 0 {
            return Err(CliError::Input("menu_grid sizes must be positive".into()));
        }
        let settings = QuadratureSettings {
            outer_nodes: self.quadrature.outer_nodes,
            simpson_tol: self.quadrature.simpson_tol,
            a_quantile_cap: s.a_quantile_cap,
        };
        let dist = TypeDistribution::new(self.types.law()?, self.loss.family()?, settings)?;
        Ok(Scenario {
            class: s.class,
            dist,
            cost: self.cost.functional()?,
            search: SearchSettings {
                grid_points: s.grid_points,
                refine_tol: s.refine_tol,
            },
            menu_grid: self.menu_grid,
            seed: self.seed,
        })
    }
}

impl CostConfig {
    fn functional(&self) -> Result<CostFunctional<f64>, CliError> {
        let d = &self.distortion;
        let exponent = || match d.param {
            Some(DistortionParam::Exponent(c)) => Ok(c),
            _ => Err(CliError::Input(
                "power and proportional_hazard distortions need a numeric param".into(),
            )),
        };
        let h = match d.kind {
            DistortionKind::Identity => {
                if d.param.is_some() {
                    return Err(CliError::Input("identity distortion takes no param".into()));
                }
                Distortion::Identity
            }
            DistortionKind::Power => Distortion::power(exponent()?)?,
            DistortionKind::ProportionalHazard => Distortion::proportional_hazard(exponent()?)?,
            DistortionKind::Tabulated => match &d.param {
                Some(DistortionParam::Table { xs, ys }) => Distortion::tabulated(xs.clone(), ys.clone())?,
                _ => return Err(CliError::Input("tabulated distortion needs param {xs, ys}".into())),
            },
        };
        Ok(CostFunctional::new(self.theta, h)?)
    }
}

impl LossConfig {
    fn family(&self) -> Result<LossFamily<f64>, CliError> {
        let p = &self.params;
        let base = match self.family {
            LossKind::Exponential | LossKind::Uniform if p.shape.is_some() => {
                return Err(CliError::Input(
                    "loss.params.shape only applies to the lomax family".into(),
                ))
            }
            LossKind::Exponential => LossModel::exponential(1.0)?,
            LossKind::Uniform => LossModel::uniform(1.0)?,
            LossKind::Lomax => {
                let shape = p
                    .shape
                    .ok_or_else(|| CliError::Input("lomax loss needs params.shape".into()))?;
                LossModel::lomax(shape, 1.0)?
            }
        };
        let base = match p.atom_at_zero {
            Some(p0) => base.with_atom_at_zero(p0)?,
            None => base,
        };
        Ok(LossFamily::new(base))
    }
}

impl TypesConfig {
    fn law(&self) -> Result<TypeLaw<f64>, CliError> {
        let input = |m: &str| Err(CliError::Input(m.to_string()));
        let k_range = || -> Result<Uniform<f64>, CliError> {
            let k = self
                .k_dist
                .ok_or_else(|| CliError::Input("types.k_dist {lo, hi} is required".into()))?;
            Ok(Uniform::new(k.lo, k.hi)?)
        };
        match self.variant {
            TypeVariant::Product => {
                if self.atoms.is_some() {
                    return input("types.atoms only applies to the discrete variant");
                }
                let Some(AlphaConfig::Range(al)) = self.alpha_dist else {
                    return input("product types need alpha_dist {lo, hi}");
                };
                Ok(TypeLaw::Product {
                    k: k_range()?,
                    alpha: Uniform::new(al.lo, al.hi)?,
                })
            }
            TypeVariant::DegenerateAlpha => {
                if self.atoms.is_some() {
                    return input("types.atoms only applies to the discrete variant");
                }
                let Some(AlphaConfig::Value { value }) = self.alpha_dist else {
                    return input("degenerate_alpha types need alpha_dist {value}");
                };
                Ok(TypeLaw::DegenerateAlpha {
                    k: k_range()?,
                    alpha: value,
                })
            }
            TypeVariant::Discrete => {
                if self.k_dist.is_some() || self.alpha_dist.is_some() {
                    return input("discrete types are given by types.atoms only");
                }
                let atoms = self.atoms.as_deref().unwrap_or_default();
                Ok(TypeLaw::Discrete(
                    atoms
                        .iter()
                        .map(|a| TypeAtom {
                            alpha: a.alpha,
                            k: a.k,
                            weight: a.weight,
                        })
                        .collect(),
                ))
            }
        }
    }
}
