//! Problem configuration files.

use serde::{Deserialize, Serialize};
use tto_core::tolerances::default_truncation;
use tto_core::{InnerFunction, InnerFunctionSpec, LaurentSymbol, LaurentSymbolSpec, Region, Tolerances};

use crate::CliError;

fn default_grid() -> usize {
    64
}

/// Per-field overrides on top of the defaults chosen for θ.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zero: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub separation: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub circle: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eigen: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub double_root: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trivial: Option<f64>,
}

impl ToleranceOverrides {
    pub fn apply(&self, mut tol: Tolerances) -> Tolerances {
        let set = |field: &mut f64, value: Option<f64>| {
            if let Some(v) = value {
                *field = v;
            }
        };
        set(&mut tol.boundary, self.boundary);
        set(&mut tol.zero, self.zero);
        set(&mut tol.separation, self.separation);
        set(&mut tol.circle, self.circle);
        set(&mut tol.eigen, self.eigen);
        set(&mut tol.seed, self.seed);
        set(&mut tol.residual, self.residual);
        set(&mut tol.double_root, self.double_root);
        set(&mut tol.trivial, self.trivial);
        tol
    }

    fn is_empty(&self) -> bool {
        self == &Self::default()
    }
}

/// Contents of a `--config` file.
///
/// ```json
/// {
///   "theta": {"blaschke": [{"zero": [0, 0], "mult": 2}]},
///   "symbol": {"antianalytic": [[1, 0]], "analytic": [[0, 0], [4, 0]]},
///   "region": {"re_min": -5, "re_max": 5, "im_min": -5, "im_max": 5}
/// }
/// ```
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub theta: InnerFunctionSpec,
    #[serde(default)]
    pub symbol: LaurentSymbolSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<Region>,
    #[serde(default = "default_grid")]
    pub grid: usize,
    /// Truncation order K; defaults to 4096, or 65536 with atoms.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<usize>,
    #[serde(default, skip_serializing_if = "ToleranceOverrides::is_empty")]
    pub tolerances: ToleranceOverrides,
    /// Contour inset for the three-term solver.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inset: Option<f64>,
}

impl ProblemConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("malformed config: {e}")))
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn theta(&self) -> Result<InnerFunction, CliError> {
        Ok(self.theta.build()?)
    }

    pub fn symbol(&self) -> Result<LaurentSymbol, CliError> {
        Ok(self.symbol.build()?)
    }

    pub fn region(&self) -> Result<Region, CliError> {
        let region = self
            .region
            .ok_or_else(|| CliError::Config("config has no region".into()))?;
        region.validate()?;
        Ok(region)
    }

    pub fn truncation_for(&self, theta: &InnerFunction) -> usize {
        self.truncation.unwrap_or_else(|| default_truncation(theta))
    }

    pub fn tolerances_for(&self, theta: &InnerFunction) -> Tolerances {
        self.tolerances.apply(Tolerances::for_theta(theta))
    }
}
