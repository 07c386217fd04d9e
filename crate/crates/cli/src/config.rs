//! Run configuration: the strict, human-writable description of one data
//! run. A configuration comes from a TOML file or a named preset, is
//! validated as a whole, and is echoed verbatim into the run manifest so
//! every output is reproducible from its own paperwork.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Model identifiers accepted in `model = "..."`.
pub const MODEL_IDS: [&str; 6] = ["ssh", "ssh-open", "qwz", "qwz-strip", "km-ribbon", "weyl"];

/// A configuration problem: the file could not be parsed, a field is
/// missing, or a value is out of range. Reported with the field name (and
/// the parser's line/column where available) and mapped to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

// ═══════════════════════════════════════════════════════════════════════
// Schema
// ═══════════════════════════════════════════════════════════════════════

/// One full run description. Sections are consumed by the command they
/// belong to; unknown keys are rejected everywhere.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// One of `MODEL_IDS`.
    pub model: String,
    /// Qubit coupling strength.
    pub delta: f64,
    /// Model parameters by name (for example `phi`, `m`, `b3`).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
    /// Discretization per axis: samples per momentum axis for Bloch
    /// models, cells per real-space axis for chains and strips (strips
    /// list `[width, transverse_samples]`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<TimeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series: Option<SeriesSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes: Option<NodeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topo: Option<TopoSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub sizes: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    /// Largest time on the grid; snapshots (kmap, path) evaluate here.
    pub t_max: f64,
    /// Number of steps; the grid is `t_j = t_max * j / steps`, `j = 0..=steps`.
    pub steps: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSpec {
    /// Name of the model parameter swept by the `sweep` command.
    pub parameter: String,
    pub range: [f64; 2],
    pub points: usize,
    /// When set, the sweep diagnostic is the log-modulus snapshot at this
    /// time index instead of the minimum modulus over the window.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshot_index: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathSpec {
    pub samples_per_segment: usize,
    pub vertex: Vec<VertexSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexSpec {
    pub label: String,
    pub k: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesSpec {
    /// Fixed momentum for a single-sector time series. For a strip or
    /// ribbon this is the one transverse momentum of the slice.
    pub k: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coarse: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refine_rounds: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopoSpec {
    /// `"zak"` (one momentum axis) or `"chern"` (two momentum axes).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub invariant: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_k: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    /// `"csv"` (default) or `"json"` (CSV plus a JSON mirror).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
}

// ═══════════════════════════════════════════════════════════════════════
// Parsing and validation
// ═══════════════════════════════════════════════════════════════════════

impl RunConfig {
    /// Parse a TOML document and validate it. Parser errors keep the
    /// line/column diagnostics produced by the TOML reader.
    pub fn from_toml(text: &str) -> Result<RunConfig, ConfigError> {
        let config: RunConfig =
            toml::from_str(text).map_err(|e| ConfigError(format!("invalid config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    /// Structural checks that hold for every command.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !MODEL_IDS.contains(&self.model.as_str()) {
            return err(format!(
                "field `model`: unknown model {:?}; expected one of {}",
                self.model,
                MODEL_IDS.join(", ")
            ));
        }
        if !self.delta.is_finite() {
            return err("field `delta`: must be finite");
        }
        let allowed = allowed_params(&self.model);
        for key in self.params.keys() {
            if !allowed.contains(&key.as_str()) {
                return err(format!(
                    "field `params.{key}`: unknown parameter for model {:?}; expected one of {}",
                    self.model,
                    allowed.join(", ")
                ));
            }
        }
        for (key, value) in &self.params {
            if !value.is_finite() {
                return err(format!("field `params.{key}`: must be finite"));
            }
        }
        if let Some(grid) = &self.grid {
            if grid.sizes.is_empty() {
                return err("field `grid.sizes`: must not be empty");
            }
            for (axis, &n) in grid.sizes.iter().enumerate() {
                if n < 2 {
                    return err(format!("field `grid.sizes[{axis}]`: must be at least 2, got {n}"));
                }
            }
        }
        if let Some(time) = &self.time {
            if !(time.t_max > 0.0) {
                return err(format!("field `time.t_max`: must be positive, got {}", time.t_max));
            }
            if time.steps == 0 {
                return err("field `time.steps`: must be at least 1");
            }
        }
        if let Some(scan) = &self.scan {
            if scan.points < 5 {
                return err(format!(
                    "field `scan.points`: a sweep needs at least 5 points to resolve curvature, got {}",
                    scan.points
                ));
            }
            if !(scan.range[0].is_finite() && scan.range[1].is_finite()) {
                return err("field `scan.range`: bounds must be finite");
            }
            if scan.range[0] >= scan.range[1] {
                return err(format!(
                    "field `scan.range`: lower bound {} must be below upper bound {}",
                    scan.range[0], scan.range[1]
                ));
            }
        }
        if let Some(path) = &self.path {
            if path.vertex.len() < 2 {
                return err("field `path.vertex`: a path needs at least two vertices");
            }
            if path.samples_per_segment == 0 {
                return err("field `path.samples_per_segment`: must be at least 1");
            }
            let dim = path.vertex[0].k.len();
            for v in &path.vertex {
                if v.k.len() != dim {
                    return err(format!(
                        "field `path.vertex`: vertex {:?} has {} momentum components, others have {dim}",
                        v.label,
                        v.k.len()
                    ));
                }
            }
        }
        if let Some(series) = &self.series {
            if series.k.is_empty() {
                return err("field `series.k`: must not be empty");
            }
        }
        if let Some(output) = &self.output {
            if let Some(format) = &output.format {
                if format != "csv" && format != "json" {
                    return err(format!(
                        "field `output.format`: expected \"csv\" or \"json\", got {format:?}"
                    ));
                }
            }
        }
        Ok(())
    }

    /// The parameter value `params.<name>`, or a config error naming the
    /// missing field.
    pub fn require_param(&self, name: &str) -> Result<f64, ConfigError> {
        self.params
            .get(name)
            .copied()
            .ok_or_else(|| ConfigError(format!("field `params.{name}`: required for model {:?}", self.model)))
    }

    pub fn require_grid(&self) -> Result<&GridSpec, ConfigError> {
        self.grid
            .as_ref()
            .ok_or_else(|| ConfigError("field `grid`: required for this command".into()))
    }

    pub fn require_time(&self) -> Result<&TimeSpec, ConfigError> {
        self.time
            .as_ref()
            .ok_or_else(|| ConfigError("field `time`: required for this command".into()))
    }

    pub fn require_scan(&self) -> Result<&ScanSpec, ConfigError> {
        self.scan
            .as_ref()
            .ok_or_else(|| ConfigError("field `scan`: required for the sweep command".into()))
    }

    pub fn require_path(&self) -> Result<&PathSpec, ConfigError> {
        self.path
            .as_ref()
            .ok_or_else(|| ConfigError("field `path`: required for this command".into()))
    }
}

impl TimeSpec {
    /// The time grid `0, t_max/steps, ..., t_max`.
    pub fn grid(&self) -> Vec<f64> {
        (0..=self.steps)
            .map(|j| self.t_max * j as f64 / self.steps as f64)
            .collect()
    }
}

/// Parameter names each model accepts in `[params]`.
pub fn allowed_params(model: &str) -> &'static [&'static str] {
    match model {
        "ssh" | "ssh-open" => &["phi"],
        "qwz" | "qwz-strip" => &["m"],
        "km-ribbon" => &["lambda_so", "lambda_r", "lambda_v"],
        "weyl" => &["lambda", "lambda_z", "t", "eps", "b0", "b1", "b2", "b3"],
        _ => &[],
    }
}

// ═══════════════════════════════════════════════════════════════════════
// Config hash
// ═══════════════════════════════════════════════════════════════════════

/// Hash of the physics content of a configuration: the canonical TOML
/// serialization with the `output` section removed, so the same run
/// writes the same bytes no matter where the files land.
pub fn config_hash(config: &RunConfig) -> String {
    use sha2::{Digest, Sha256};
    let mut stripped = config.clone();
    stripped.output = None;
    let canonical = toml::to_string(&stripped).expect("config serializes");
    let digest = Sha256::digest(canonical.as_bytes());
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

// ═══════════════════════════════════════════════════════════════════════
// Presets
// ═══════════════════════════════════════════════════════════════════════

/// A named, built-in configuration reproducing one published data panel.
#[derive(Debug)]
pub struct Preset {
    pub name: &'static str,
    /// The command the preset is written for.
    pub command: &'static str,
    pub summary: &'static str,
    toml: &'static str,
}

impl Preset {
    pub fn config(&self) -> RunConfig {
        RunConfig::from_toml(self.toml).expect("presets are validated by tests")
    }
}

macro_rules! weyl_axis_preset {
    ($name:literal, $command:literal, $summary:literal, $params:literal) => {
        Preset {
            name: $name,
            command: $command,
            summary: $summary,
            toml: concat!(
                "model = \"weyl\"\ndelta = 0.5\n",
                $params,
                "\n[time]\nt_max = 20.0\nsteps = 100\n",
                "[path]\nsamples_per_segment = 200\n",
                "[[path.vertex]]\nlabel = \"-Z\"\nk = [0.0, 0.0, -3.141592653589793]\n",
                "[[path.vertex]]\nlabel = \"G\"\nk = [0.0, 0.0, 0.0]\n",
                "[[path.vertex]]\nlabel = \"Z\"\nk = [0.0, 0.0, 3.141592653589793]\n"
            ),
        }
    };
}

/// All built-in presets, one per published data panel.
pub static PRESETS: &[Preset] = &[
    Preset {
        name: "fig1",
        command: "sweep",
        summary: "dimerization sweep of the two-band chain, 200 momenta, 101 points",
        toml: "model = \"ssh\"\ndelta = 0.1\n[grid]\nsizes = [200]\n[time]\nt_max = 20.0\nsteps = 100\n[scan]\nparameter = \"phi\"\nrange = [-1.0, 1.0]\npoints = 101\n",
    },
    Preset {
        name: "fig2",
        command: "spectrum",
        summary: "open dimerized chain of 200 sites at phi = 0.5: boundary modes",
        toml: "model = \"ssh-open\"\ndelta = 0.1\n[params]\nphi = 0.5\n[grid]\nsizes = [200]\n",
    },
    Preset {
        name: "fig3",
        command: "sweep",
        summary: "mass sweep of the checkerboard model, 100x100 momenta, 121 points",
        toml: "model = \"qwz\"\ndelta = 0.1\n[grid]\nsizes = [100, 100]\n[time]\nt_max = 20.0\nsteps = 100\n[scan]\nparameter = \"m\"\nrange = [-5.0, 1.0]\npoints = 121\n",
    },
    Preset {
        name: "fig4",
        command: "spectrum",
        summary: "open checkerboard strip, 16 cells wide, M = -2: edge crossing",
        toml: "model = \"qwz-strip\"\ndelta = 0.1\n[params]\nm = -2.0\n[grid]\nsizes = [16, 100]\n",
    },
    weyl_axis_preset!(
        "fig5a",
        "spectrum",
        "semimetal bands along the vertical axis, symmetric regime",
        ""
    ),
    weyl_axis_preset!(
        "fig5b",
        "spectrum",
        "semimetal bands, time-reversal broken: momentum-split nodes",
        "[params]\nb3 = 1.8\n"
    ),
    weyl_axis_preset!(
        "fig5c",
        "spectrum",
        "semimetal bands, inversion broken: energy-split touchings",
        "[params]\nb0 = 1.4\n"
    ),
    weyl_axis_preset!(
        "fig5d",
        "spectrum",
        "semimetal bands, gapped regime",
        "[params]\neps = 5.5\nb0 = 1.4\n"
    ),
    weyl_axis_preset!(
        "fig6a",
        "path",
        "overlap along the vertical axis, symmetric regime: one sharp valley",
        ""
    ),
    weyl_axis_preset!(
        "fig6b",
        "path",
        "overlap along the vertical axis, split nodes: two valleys",
        "[params]\nb3 = 1.8\n"
    ),
    weyl_axis_preset!(
        "fig6c",
        "path",
        "overlap along the vertical axis, energy-split touchings",
        "[params]\nb0 = 1.4\n"
    ),
    weyl_axis_preset!(
        "fig6d",
        "path",
        "overlap along the vertical axis, gapped regime",
        "[params]\neps = 5.5\nb0 = 1.4\n"
    ),
    Preset {
        name: "fig7",
        command: "path",
        summary: "overlap and bands along Z - G - M - Z, symmetric regime",
        toml: "model = \"weyl\"\ndelta = 0.5\n[time]\nt_max = 20.0\nsteps = 100\n[path]\nsamples_per_segment = 200\n[[path.vertex]]\nlabel = \"Z\"\nk = [3.141592653589793, 0.0, 3.141592653589793]\n[[path.vertex]]\nlabel = \"G\"\nk = [0.0, 0.0, 0.0]\n[[path.vertex]]\nlabel = \"M\"\nk = [0.0, 0.0, 3.141592653589793]\n[[path.vertex]]\nlabel = \"Z\"\nk = [3.141592653589793, 0.0, 3.141592653589793]\n",
    },
];

/// Look up a preset; an unknown name errors and lists what exists.
pub fn preset(name: &str) -> Result<&'static Preset, ConfigError> {
    PRESETS.iter().find(|p| p.name == name).ok_or_else(|| {
        let names: Vec<&str> = PRESETS.iter().map(|p| p.name).collect();
        ConfigError(format!(
            "unknown preset {name:?}; available presets: {}",
            names.join(", ")
        ))
    })
}
