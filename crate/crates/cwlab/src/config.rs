//! Experiment configuration files. A single TOML or JSON document drives
//! every CLI subcommand: it names the model and, per subcommand, the knobs
//! of the computation. Unknown keys are rejected so typos fail loudly, and
//! `spec_version` must be 1.
//!
//! Minimal TOML document: a `spec_version = 1` line, a `[model]` table with
//! `sizes = [8, 8]`, and a `[model.coupling]` table with either
//! `homogeneous = 0.5` or `matrix = [[0.5, 0.25], [0.25, 0.5]]`. Optional
//! tables `[pmf]`, `[lclt]`, `[definetti]`, `[bounds]` and `[mcmc]` configure
//! the respective subcommands; see the field docs below for keys and
//! defaults. The same shape as JSON is accepted for `.json` paths.

use std::path::Path;

use serde::Deserialize;

use crate::error::{CwError, Result};
use crate::model::{ModelSpec, RawModelSpec, SymmetryPolicy};

/// Schema version understood by this build.
pub const SPEC_VERSION: u32 = 1;

/// Parsed experiment configuration. Construct via [`ExperimentConfig::from_path`]
/// (dispatches on the `.toml` / `.json` extension) or the string parsers.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Must equal [`SPEC_VERSION`].
    spec_version: u32,
    model: RawModelSpec,
    /// Base PRNG seed; the CLI `--seed` flag and `[mcmc].seed` take
    /// precedence.
    #[serde(default)]
    seed: Option<u64>,
    /// Accept an asymmetric coupling matrix by replacing it with
    /// (J + J^T)/2 (a warning is reported). Default: reject.
    #[serde(default)]
    symmetrize: bool,
    #[serde(default)]
    pmf: Option<PmfSection>,
    #[serde(default)]
    lclt: Option<LcltSection>,
    #[serde(default)]
    definetti: Option<DefinettiSection>,
    #[serde(default)]
    bounds: Option<BoundsSection>,
    #[serde(default)]
    mcmc: Option<McmcSection>,
}

/// Exact pmf computation knobs.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PmfSection {
    /// Cap on the state count Π(n_a + 1); exceeding it is an error rather
    /// than an attempted allocation. Default: library cap.
    #[serde(default)]
    pub state_cap: Option<usize>,
}

/// Local limit error sweep knobs.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LcltSection {
    /// Total sizes n to sweep; must be nonempty and strictly increasing.
    pub sweep: Vec<u64>,
    /// Group weights used to split each n into group sizes. Default: the
    /// empirical weights of the `[model]` sizes.
    #[serde(default)]
    pub alpha: Option<Vec<f64>>,
}

/// Mixing density and concentration knobs.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DefinettiSection {
    /// Quadrature resolution per axis. Default: dimension-dependent.
    #[serde(default)]
    pub points_per_axis: Option<usize>,
    /// Also reconstruct the pmf through the mixture representation and
    /// report the max absolute probability difference against the exact
    /// pmf. Default: false.
    #[serde(default)]
    pub mixture_check: bool,
    #[serde(default)]
    pub concentration: Option<ConcentrationSection>,
}

/// Tail mass sweep knobs.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConcentrationSection {
    /// Ball radius around the density mode(s).
    pub delta: f64,
    /// Total sizes n to sweep (strictly increasing). Default: the `[model]`
    /// total size only.
    #[serde(default)]
    pub sweep: Option<Vec<u64>>,
}

/// Characteristic-function bound scan knobs. Defaults reproduce the
/// documented validity window at 100x100 resolution.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsSection {
    /// Mean-parameter half-width of the scan grid. Default: documented window.
    #[serde(default)]
    pub m_half: Option<f64>,
    /// Frequency half-width of the scan grid. Default: documented window.
    #[serde(default)]
    pub u_half: Option<f64>,
    /// Grid points along the mean axis. Default: 100.
    #[serde(default)]
    pub points_m: Option<usize>,
    /// Grid points along the frequency axis. Default: 100.
    #[serde(default)]
    pub points_u: Option<usize>,
}

/// Metropolis chain knobs.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McmcSection {
    /// Number of recorded (post-thinning) samples.
    pub samples: u64,
    /// Chain seed; overrides the top-level seed, overridden by `--seed`.
    #[serde(default)]
    pub seed: Option<u64>,
    /// Discarded leading steps. Default: 100 n.
    #[serde(default)]
    pub burn_in: Option<u64>,
    /// Steps between recorded samples. Default: n.
    #[serde(default)]
    pub thin: Option<u64>,
}

fn check_sweep(sweep: &[u64], what: &str) -> Result<()> {
    if sweep.is_empty() {
        return Err(CwError::Config(format!("{what} sweep must be nonempty")));
    }
    if sweep.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CwError::Config(format!(
            "{what} sweep must be strictly increasing"
        )));
    }
    Ok(())
}

impl ExperimentConfig {
    /// Load a config file, dispatching on its extension (`.toml` or `.json`).
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("toml") => Self::from_toml_str(&text),
            Some("json") => Self::from_json_str(&text),
            other => Err(CwError::Config(format!(
                "unsupported config extension {:?} (expected .toml or .json)",
                other.unwrap_or("")
            ))),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: ExperimentConfig =
            toml::from_str(text).map_err(|e| CwError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let config: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| CwError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<()> {
        if self.spec_version != SPEC_VERSION {
            return Err(CwError::Config(format!(
                "unsupported spec_version {} (this build understands {})",
                self.spec_version, SPEC_VERSION
            )));
        }
        if let Some(lclt) = &self.lclt {
            check_sweep(&lclt.sweep, "lclt")?;
        }
        if let Some(sweep) = self
            .definetti
            .as_ref()
            .and_then(|d| d.concentration.as_ref())
            .and_then(|c| c.sweep.as_ref())
        {
            check_sweep(sweep, "concentration")?;
        }
        Ok(())
    }

    /// Build the model, applying the configured symmetry policy. Returns the
    /// model together with any warnings (e.g. "matrix was symmetrized").
    pub fn model(&self) -> Result<(ModelSpec, Vec<String>)> {
        self.model.clone().build(self.policy())
    }

    /// Build the model but accept a symmetric indefinite coupling matrix,
    /// so that regime classification can report a verdict on it instead of
    /// failing at construction.
    pub fn model_allowing_indefinite(&self) -> Result<(ModelSpec, Vec<String>)> {
        self.model.clone().build_with(self.policy(), false)
    }

    fn policy(&self) -> SymmetryPolicy {
        if self.symmetrize {
            SymmetryPolicy::Symmetrize
        } else {
            SymmetryPolicy::Reject
        }
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn pmf(&self) -> Option<&PmfSection> {
        self.pmf.as_ref()
    }

    pub fn lclt(&self) -> Option<&LcltSection> {
        self.lclt.as_ref()
    }

    pub fn definetti(&self) -> Option<&DefinettiSection> {
        self.definetti.as_ref()
    }

    pub fn bounds(&self) -> Option<&BoundsSection> {
        self.bounds.as_ref()
    }

    pub fn mcmc(&self) -> Option<&McmcSection> {
        self.mcmc.as_ref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL_TOML: &str = "\
spec_version = 1

[model]
sizes = [2, 2]

[model.coupling]
homogeneous = 0.5
";

    #[test]
    fn minimal_toml_parses() {
        let config = ExperimentConfig::from_toml_str(MINIMAL_TOML).unwrap();
        let (model, warnings) = config.model().unwrap();
        assert!(warnings.is_empty());
        assert_eq!(model.groups.total(), 4);
        assert_eq!(model.coupling.beta(), Some(0.5));
        assert_eq!(config.seed(), None);
        assert!(config.mcmc().is_none());
    }

    #[test]
    fn json_and_toml_agree() {
        let json = r#"{
            "spec_version": 1,
            "seed": 9,
            "model": {"sizes": [3, 2], "coupling": {"matrix": [[0.5, 0.25], [0.25, 0.5]]}},
            "lclt": {"sweep": [16, 64]}
        }"#;
        let from_json = ExperimentConfig::from_json_str(json).unwrap();
        let toml_text = "\
spec_version = 1
seed = 9

[model]
sizes = [3, 2]

[model.coupling]
matrix = [[0.5, 0.25], [0.25, 0.5]]

[lclt]
sweep = [16, 64]
";
        let from_toml = ExperimentConfig::from_toml_str(toml_text).unwrap();
        assert_eq!(from_json.seed(), from_toml.seed());
        let (mj, _) = from_json.model().unwrap();
        let (mt, _) = from_toml.model().unwrap();
        assert_eq!(mj.to_json(), mt.to_json());
        assert_eq!(from_json.lclt().unwrap().sweep, from_toml.lclt().unwrap().sweep);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = format!("{MINIMAL_TOML}typo_knob = 3\n");
        let err = ExperimentConfig::from_toml_str(&bad).unwrap_err();
        assert!(matches!(err, CwError::Config(_)), "{err}");
        let bad_section = format!("{MINIMAL_TOML}\n[pmf]\nstate_cpa = 10\n");
        assert!(ExperimentConfig::from_toml_str(&bad_section).is_err());
    }

    #[test]
    fn version_and_sweep_validation() {
        let wrong_version = MINIMAL_TOML.replace("spec_version = 1", "spec_version = 2");
        let err = ExperimentConfig::from_toml_str(&wrong_version).unwrap_err();
        assert!(err.to_string().contains("spec_version"), "{err}");

        let bad_sweep = format!("{MINIMAL_TOML}\n[lclt]\nsweep = [64, 16]\n");
        assert!(ExperimentConfig::from_toml_str(&bad_sweep).is_err());
        let empty_sweep = format!("{MINIMAL_TOML}\n[lclt]\nsweep = []\n");
        assert!(ExperimentConfig::from_toml_str(&empty_sweep).is_err());
        let bad_conc = format!(
            "{MINIMAL_TOML}\n[definetti]\n[definetti.concentration]\ndelta = 0.5\nsweep = [20, 20]\n"
        );
        assert!(ExperimentConfig::from_toml_str(&bad_conc).is_err());
    }

    #[test]
    fn symmetrize_flag_controls_policy() {
        let asym = "\
spec_version = 1

[model]
sizes = [2, 2]

[model.coupling]
matrix = [[0.5, 0.3], [0.2, 0.5]]
";
        assert!(ExperimentConfig::from_toml_str(asym).unwrap().model().is_err());
        let with_flag = format!("symmetrize = true\n{asym}");
        let config = ExperimentConfig::from_toml_str(&with_flag).unwrap();
        let (model, warnings) = config.model().unwrap();
        assert_eq!(warnings.len(), 1);
        assert_eq!(model.coupling.entry(0, 1), 0.25);
    }
}
