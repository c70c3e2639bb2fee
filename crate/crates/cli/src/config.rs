//! Run configuration, read from TOML and echoed into every report.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Athermality,
    Coherence,
    Fig4,
    QubitSynth,
    Mutual,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Athermality => "athermality",
            Mode::Coherence => "coherence",
            Mode::Fig4 => "fig4",
            Mode::QubitSynth => "qubit_synth",
            Mode::Mutual => "mutual",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub athermality: Option<AthermalityConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coherence: Option<CoherenceConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fig4: Option<Fig4Config>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qubit_synth: Option<QubitSynthConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mutual: Option<MutualConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedStart {
    Cold,
    Hot,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StartSpec {
    Named(NamedStart),
    State(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AthermalityConfig {
    pub energies: Vec<f64>,
    /// Cold inverse temperature.
    pub alpha: f64,
    /// Hot inverse temperature, at most `alpha`.
    pub beta: f64,
    pub max_strokes: usize,
    /// Hausdorff convergence threshold; 0 runs every stroke.
    pub tol: f64,
    pub start: StartSpec,
}

impl Default for AthermalityConfig {
    fn default() -> Self {
        AthermalityConfig {
            energies: vec![1.0, 2.0, 3.0],
            alpha: 1.0 / 3.0,
            beta: 0.2,
            max_strokes: 40,
            tol: 1e-8,
            start: StartSpec::Named(NamedStart::Cold),
        }
    }
}

/// Where a matrix comes from: a text file or a generator string such as
/// `fourier d=5 alpha=0.3`.
#[derive(Debug, Clone, Copy)]
pub struct MatrixSource<'a> {
    pub matrix_file: Option<&'a Path>,
    pub generator: Option<&'a str>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CoherenceConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix_file: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generator: Option<String>,
    pub tol_zero: f64,
    pub dense_witness: bool,
    /// Restarts per column for the flat-column search; 0 means `4 d`.
    pub search_budget: usize,
    pub tol_flat: f64,
}

impl Default for CoherenceConfig {
    fn default() -> Self {
        CoherenceConfig {
            matrix_file: None,
            generator: None,
            tol_zero: resource_engine::tol::TOL_ZERO,
            dense_witness: true,
            search_budget: 0,
            tol_flat: resource_engine::tol::TOL_FLAT,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Fig4Config {
    pub dims: Vec<usize>,
    /// The grid is `k / alpha_steps` for `k = 1..=alpha_steps`.
    pub alpha_steps: usize,
}

impl Default for Fig4Config {
    fn default() -> Self {
        Fig4Config {
            dims: (3..=10).collect(),
            alpha_steps: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QubitSynthConfig {
    /// Angle between the two rotation axes.
    pub alpha: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix_file: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generator: Option<String>,
    /// Number of targets; only meaningful for the `haar` generator.
    pub count: usize,
}

impl Default for QubitSynthConfig {
    fn default() -> Self {
        QubitSynthConfig {
            alpha: std::f64::consts::FRAC_PI_4,
            matrix_file: None,
            generator: None,
            count: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MutualConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix_file: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generator: Option<String>,
    pub search_budget: usize,
    pub tol_flat: f64,
    /// Also look for a state unbiased in both bases.
    pub unbiased_state: bool,
}

impl Default for MutualConfig {
    fn default() -> Self {
        MutualConfig {
            matrix_file: None,
            generator: None,
            search_budget: 0,
            tol_flat: resource_engine::tol::TOL_FLAT,
            unbiased_state: true,
        }
    }
}

macro_rules! source_of {
    ($($t:ty),*) => {$(
        impl $t {
            pub fn source(&self) -> MatrixSource<'_> {
                MatrixSource {
                    matrix_file: self.matrix_file.as_deref(),
                    generator: self.generator.as_deref(),
                }
            }
        }
    )*};
}

source_of!(CoherenceConfig, QubitSynthConfig, MutualConfig);

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub max_strokes: Option<usize>,
    pub tol: Option<f64>,
}

pub fn parse_config(text: &str) -> CliResult<RunConfig> {
    toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
}

/// A validated config plus the directory relative matrix paths are read from.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub config: RunConfig,
    pub base_dir: PathBuf,
}

impl Loaded {
    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_relative() {
            self.base_dir.join(p)
        } else {
            p.to_path_buf()
        }
    }
}

/// Reads `path` (or starts from defaults), applies overrides and checks the
/// section for `mode`.
pub fn load_config(path: Option<&Path>, mode: Mode, ov: &Overrides) -> CliResult<Loaded> {
    let (mut cfg, base_dir) = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
            let dir = p.parent().map(Path::to_path_buf).unwrap_or_default();
            (parse_config(&text)?, dir)
        }
        None => (RunConfig::default(), PathBuf::new()),
    };
    if let Some(m) = cfg.mode {
        if m != mode {
            return Err(CliError::Config(format!(
                "config is for mode `{}` but the `{}` subcommand was used",
                m.name(),
                mode.name()
            )));
        }
    }
    cfg.mode = Some(mode);
    apply(&mut cfg, mode, ov)?;
    validate(&cfg, mode)?;
    Ok(Loaded {
        config: cfg,
        base_dir,
    })
}

fn apply(cfg: &mut RunConfig, mode: Mode, ov: &Overrides) -> CliResult<()> {
    if let Some(s) = ov.seed {
        cfg.seed = s;
    }
    if ov.max_strokes.is_some() && mode != Mode::Athermality {
        return Err(CliError::Config(
            "--max-strokes only applies to `athermality`".into(),
        ));
    }
    match mode {
        Mode::Athermality => {
            let a = cfg.athermality.get_or_insert_with(Default::default);
            if let Some(n) = ov.max_strokes {
                a.max_strokes = n;
            }
            if let Some(t) = ov.tol {
                a.tol = t;
            }
        }
        Mode::Coherence => {
            let c = cfg.coherence.get_or_insert_with(Default::default);
            if let Some(t) = ov.tol {
                c.tol_flat = t;
            }
        }
        Mode::Mutual => {
            let c = cfg.mutual.get_or_insert_with(Default::default);
            if let Some(t) = ov.tol {
                c.tol_flat = t;
            }
        }
        Mode::Fig4 | Mode::QubitSynth => {
            if ov.tol.is_some() {
                return Err(CliError::Config(format!(
                    "--tol does not apply to `{}`",
                    mode.name()
                )));
            }
            match mode {
                Mode::Fig4 => {
                    cfg.fig4.get_or_insert_with(Default::default);
                }
                _ => {
                    cfg.qubit_synth.get_or_insert_with(Default::default);
                }
            }
        }
    }
    Ok(())
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn check_source(file: &Option<PathBuf>, generator: &Option<String>, field: &str) -> CliResult<()> {
    if file.is_some() && generator.is_some() {
        return Err(bad(format!(
            "{field}: give either matrix_file or generator, not both"
        )));
    }
    Ok(())
}

fn check_tol(t: f64, field: &str) -> CliResult<()> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(bad(format!(
            "{field} must be finite and non-negative, got {t}"
        )));
    }
    Ok(())
}

fn validate(cfg: &RunConfig, mode: Mode) -> CliResult<()> {
    match mode {
        Mode::Athermality => {
            let a = cfg.athermality.as_ref().unwrap();
            if a.energies.len() < 2 {
                return Err(bad("athermality.energies needs at least two levels"));
            }
            if a.energies.iter().any(|e| !e.is_finite()) {
                return Err(bad("athermality.energies must be finite"));
            }
            if !(a.alpha.is_finite() && a.beta.is_finite() && a.beta >= 0.0 && a.beta <= a.alpha) {
                return Err(bad(format!(
                    "athermality needs 0 <= beta <= alpha, got alpha {} and beta {}",
                    a.alpha, a.beta
                )));
            }
            check_tol(a.tol, "athermality.tol")?;
            if let StartSpec::State(p) = &a.start {
                if p.len() != a.energies.len() {
                    return Err(bad(format!(
                        "athermality.start has {} entries for {} levels",
                        p.len(),
                        a.energies.len()
                    )));
                }
            }
        }
        Mode::Coherence => {
            let c = cfg.coherence.as_ref().unwrap();
            check_source(&c.matrix_file, &c.generator, "coherence")?;
            check_tol(c.tol_zero, "coherence.tol_zero")?;
            check_tol(c.tol_flat, "coherence.tol_flat")?;
        }
        Mode::Mutual => {
            let c = cfg.mutual.as_ref().unwrap();
            check_source(&c.matrix_file, &c.generator, "mutual")?;
            check_tol(c.tol_flat, "mutual.tol_flat")?;
        }
        Mode::Fig4 => {
            let f = cfg.fig4.as_ref().unwrap();
            if f.dims.is_empty() || f.dims.iter().any(|&d| d < 3) {
                return Err(bad("fig4.dims must be non-empty with every d >= 3"));
            }
            if f.alpha_steps < 2 {
                return Err(bad("fig4.alpha_steps must be at least 2"));
            }
        }
        Mode::QubitSynth => {
            let q = cfg.qubit_synth.as_ref().unwrap();
            check_source(&q.matrix_file, &q.generator, "qubit_synth")?;
            if !(q.alpha > 0.0 && q.alpha <= std::f64::consts::FRAC_PI_2) {
                return Err(bad(format!(
                    "qubit_synth.alpha must lie in (0, pi/2], got {}",
                    q.alpha
                )));
            }
            if q.count == 0 {
                return Err(bad("qubit_synth.count must be positive"));
            }
        }
    }
    Ok(())
}
