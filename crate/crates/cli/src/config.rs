//! Experiment configuration: TOML schema, `key=value` overrides and
//! validation into a ready-to-run [`Experiment`].

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use qpdno::hops::{Algorithm, MAX_ORDER};
use qpdno::mms::{profile_library, ManufacturedSolution, PROFILE_NAMES};
use qpdno::summation::Summation;
use qpdno::{Complex64, Depth, LatticeSpec, SpectralGrid, SurfaceField};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub lattice: LatticeConfig,
    pub solution: SolutionConfig,
    pub profile: ProfileConfig,
    pub study: StudyConfig,
    pub resolution: ResolutionConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeConfig {
    /// Rows of the `d × n` matrix `K`.
    pub k: Vec<Vec<f64>>,
    /// `"infinite"` or the depth `h`.
    pub depth: DepthConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DepthConfig {
    Finite(f64),
    Named(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionConfig {
    /// `[re, im]`.
    pub amplitude: [f64; 2],
    pub mode: Vec<i64>,
    #[serde(default)]
    pub symmetrize: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    pub name: String,
    /// Coefficients for the `custom` profile.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub coefficients: Vec<CoefficientConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientConfig {
    pub mode: Vec<i64>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub epsilons: Vec<f64>,
    pub order: usize,
    pub algorithms: Vec<String>,
    pub summations: Vec<String>,
    /// Fixed Padé numerator degree; the default is `⌈n/2⌉`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pade_numerator: Option<usize>,
    /// Recorded in the metadata; the numerics themselves are deterministic.
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResolutionConfig {
    pub n_alpha: Vec<usize>,
    pub n_y: usize,
    pub a: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: "out".into() }
    }
}

/// One violated constraint, named by its config key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationError {
    pub field: String,
    pub message: String,
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

/// A validated configuration with its numerical objects built.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub lattice: LatticeSpec,
    pub grid: Arc<SpectralGrid>,
    pub profile: SurfaceField,
    pub solution: ManufacturedSolution,
    pub algorithms: Vec<Algorithm>,
    pub summations: Vec<Summation>,
    /// Non-fatal findings, such as an artificial boundary above the trough.
    pub warnings: Vec<String>,
}

/// Reads a config file and applies `key=value` overrides.
pub fn load_config(path: &Path, overrides: &[String]) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text, overrides)
}

pub fn parse_config(text: &str, overrides: &[String]) -> Result<ExperimentConfig, CliError> {
    let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| CliError::Parse(e.to_string()))?;
    for o in overrides {
        apply_override(&mut table, o)?;
    }
    toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| CliError::Parse(e.to_string()))
}

/// Sets a dotted key. The value is read as a TOML value when it parses as
/// one, otherwise as a bare string.
fn apply_override(table: &mut toml::Table, spec: &str) -> Result<(), CliError> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| CliError::Parse(format!("override {spec:?} is not of the form key=value")))?;
    let key = key.trim();
    let raw = raw.trim();
    let value = format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(CliError::Parse(format!("override key {key:?} is malformed")));
    }
    let mut node = table;
    for part in &parts[..parts.len() - 1] {
        let entry = node.entry(part.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        node = entry
            .as_table_mut()
            .ok_or_else(|| CliError::Parse(format!("override key {key:?}: {part:?} is not a table")))?;
    }
    node.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

impl ExperimentConfig {
    /// Checks every constraint and builds the numerical objects. All
    /// violations are reported together.
    pub fn validate(&self) -> Result<Experiment, Vec<ValidationError>> {
        let mut errors = Vec::new();
        let mut warnings = Vec::new();
        let mut err = |field: &str, message: String| errors.push(ValidationError { field: field.into(), message });

        let depth = match &self.lattice.depth {
            DepthConfig::Named(s) if s == "infinite" => Some(Depth::Infinite),
            DepthConfig::Named(s) => {
                err("lattice.depth", format!("expected \"infinite\" or a positive number, got {s:?}"));
                None
            }
            DepthConfig::Finite(h) if *h > 0.0 && h.is_finite() => Some(Depth::Finite(*h)),
            DepthConfig::Finite(h) => {
                err("lattice.depth", format!("depth must be positive and finite, got {h}"));
                None
            }
        };
        let lattice = depth.and_then(|d| match LatticeSpec::new(&self.lattice.k, d) {
            Ok(l) => Some(l),
            Err(e) => {
                err("lattice.k", e.to_string());
                None
            }
        });
        let d_torus = lattice.as_ref().map(|l| l.d_torus()).unwrap_or(self.lattice.k.len());

        let res = &self.resolution;
        if res.n_alpha.len() != d_torus {
            err("resolution.n_alpha", format!("needs {d_torus} entries (one per torus direction), got {}", res.n_alpha.len()));
        }
        if res.n_alpha.contains(&0) {
            err("resolution.n_alpha", "every entry must be at least 1".into());
        }
        if res.n_y == 0 {
            err("resolution.n_y", "must be at least 1".into());
        }
        if !(res.a > 0.0 && res.a.is_finite()) {
            err("resolution.a", format!("must be positive and finite, got {}", res.a));
        }
        if let Some(Depth::Finite(h)) = depth {
            if res.a >= h {
                err("resolution.a", format!("a = {} must be smaller than the depth h = {h}", res.a));
            }
        }

        let sol = &self.solution;
        if sol.mode.len() != d_torus {
            err("solution.mode", format!("needs {d_torus} entries, got {}", sol.mode.len()));
        }
        if !sol.amplitude.iter().all(|v| v.is_finite()) {
            err("solution.amplitude", "must be finite".into());
        }

        let st = &self.study;
        if st.epsilons.is_empty() {
            err("study.epsilons", "at least one value is required".into());
        }
        if st.epsilons.iter().any(|e| !e.is_finite() || *e < 0.0) {
            err("study.epsilons", "values must be finite and non-negative".into());
        }
        if st.order > MAX_ORDER {
            err("study.order", format!("must not exceed {MAX_ORDER}, got {}", st.order));
        }
        if let Some(l) = st.pade_numerator {
            if l > st.order {
                err("study.pade_numerator", format!("{l} exceeds the order {}", st.order));
            }
        }
        let mut algorithms = Vec::new();
        if st.algorithms.is_empty() {
            err("study.algorithms", "at least one algorithm is required".into());
        }
        for tag in &st.algorithms {
            match tag.parse::<Algorithm>() {
                Ok(a) if algorithms.contains(&a) => err("study.algorithms", format!("{tag} is listed twice")),
                Ok(a) => {
                    if let Some(d) = depth {
                        if !a.supports(d) {
                            err("study.algorithms", format!("{tag} is only available in infinite depth"));
                        }
                    }
                    algorithms.push(a);
                }
                Err(e) => err("study.algorithms", e.to_string()),
            }
        }
        let mut summations = Vec::new();
        if st.summations.is_empty() {
            err("study.summations", "at least one summation is required".into());
        }
        for tag in &st.summations {
            match tag.parse::<Summation>() {
                Ok(s) if summations.contains(&s) => err("study.summations", format!("{tag} is listed twice")),
                Ok(s) => summations.push(s),
                Err(e) => err("study.summations", e.to_string()),
            }
        }

        if !PROFILE_NAMES.contains(&self.profile.name.as_str()) {
            err("profile.name", format!("unknown profile {:?}; available: {}", self.profile.name, PROFILE_NAMES.join(", ")));
        } else if self.profile.name == "custom" && self.profile.coefficients.is_empty() {
            err("profile.coefficients", "the custom profile needs at least one coefficient".into());
        }

        // Everything below needs a well-formed lattice and grid.
        let grid = match &lattice {
            Some(l) if errors.is_empty() => match SpectralGrid::new(l.clone(), &res.n_alpha) {
                Ok(g) => Some(g),
                Err(e) => {
                    errors.push(ValidationError { field: "resolution.n_alpha".into(), message: e.to_string() });
                    None
                }
            },
            _ => None,
        };
        let mut built = None;
        if let (Some(lattice), Some(grid)) = (lattice, grid) {
            let custom: Vec<(Vec<i64>, Complex64)> =
                self.profile.coefficients.iter().map(|c| (c.mode.clone(), Complex64::new(c.re, c.im))).collect();
            let profile = profile_library(&self.profile.name, &custom, &grid);
            let solution = ManufacturedSolution::new(
                lattice.clone(),
                Complex64::new(sol.amplitude[0], sol.amplitude[1]),
                sol.mode.clone(),
                sol.symmetrize,
            );
            match (profile, solution) {
                (Ok(profile), Ok(solution)) => {
                    let values = profile.grid_values();
                    let scale = values.iter().fold(1.0f64, |m, v| m.max(v.norm()));
                    if values.iter().any(|v| v.im.abs() > 1e-12 * scale) {
                        errors.push(ValidationError { field: "profile".into(), message: "the profile must be real".into() });
                    }
                    let sup = values.iter().fold(0.0f64, |m, v| m.max(v.re.abs()));
                    let eps_max = st.epsilons.iter().fold(0.0f64, |m, e| m.max(*e));
                    if let Depth::Finite(h) = lattice.depth() {
                        if eps_max * sup >= h {
                            errors.push(ValidationError {
                                field: "study.epsilons".into(),
                                message: format!("interface reaches the bottom: eps_max * sup|f| = {} >= h = {h}", eps_max * sup),
                            });
                        }
                    }
                    if eps_max * sup >= res.a && algorithms.contains(&Algorithm::Tfe) {
                        warnings.push(format!(
                            "artificial boundary y = -{} lies above the lowest interface point (eps_max * sup|f| = {}); TFE proceeds by analytic continuation",
                            res.a,
                            eps_max * sup
                        ));
                    }
                    built = Some((lattice, grid, profile, solution));
                }
                (p, s) => {
                    if let Err(e) = p {
                        errors.push(ValidationError { field: "profile".into(), message: e.to_string() });
                    }
                    if let Err(e) = s {
                        errors.push(ValidationError { field: "solution.mode".into(), message: e.to_string() });
                    }
                }
            }
        }

        match built {
            Some((lattice, grid, profile, solution)) if errors.is_empty() => Ok(Experiment {
                config: self.clone(),
                lattice,
                grid,
                profile,
                solution,
                algorithms,
                summations,
                warnings,
            }),
            _ => Err(errors),
        }
    }
}
