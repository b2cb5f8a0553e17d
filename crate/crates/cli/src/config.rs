//! Run configuration: built-in defaults, then a preset, then a TOML file, then
//! command-line flags. Each later layer overrides the earlier ones key by key.

use std::path::Path;

use bunching_core::correlations::{coherent_truncation, COHERENT_TAIL_TOL};
use bunching_core::{ChainConfig, Complex64, FieldState, Frame};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

const DEFAULTS: &str = r#"
n = 8000
b = 1.0
lambda = [1.0]
eta2 = 0.1
frequency_ratio = 3.0
omega2 = 75.0
tmax = 50.0
steps = 20000
state = "half-half"
alpha = 1.0
frame = "as-printed"
first_order = false
k_c = 0.6283185307179586
trailing_fraction = 0.25
"#;

pub const PRESETS: [(&str, &str); 3] = [
    ("fig2", include_str!("../presets/fig2.toml")),
    ("fig3", include_str!("../presets/fig3.toml")),
    ("fig4", include_str!("../presets/fig4.toml")),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum StateKind {
    Vacuum,
    HalfHalf,
    Coherent,
    Explicit,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Lambdas {
    One(f64),
    Many(Vec<f64>),
}

impl Lambdas {
    fn values(&self) -> Vec<f64> {
        match self {
            Self::One(v) => vec![*v],
            Self::Many(v) => v.clone(),
        }
    }
}

/// One configuration layer; every key optional.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Layer {
    pub name: Option<String>,
    pub n: Option<usize>,
    pub b: Option<f64>,
    pub lambda: Option<Lambdas>,
    pub eta1: Option<f64>,
    pub eta2: Option<f64>,
    pub frequency_ratio: Option<f64>,
    pub omega1: Option<f64>,
    pub omega2: Option<f64>,
    pub tmax: Option<f64>,
    pub steps: Option<usize>,
    pub state: Option<StateKind>,
    pub alpha: Option<f64>,
    pub truncation: Option<usize>,
    pub c: Option<Vec<[f64; 2]>>,
    pub d: Option<Vec<[f64; 2]>>,
    pub frame: Option<Frame>,
    pub first_order: Option<bool>,
    pub k_c: Option<f64>,
    pub trailing_fraction: Option<f64>,
    pub scenario: Option<Vec<Layer>>,
}

macro_rules! overlay {
    ($base:expr, $top:expr; $($field:ident),*) => {
        Layer { $($field: $top.$field.clone().or_else(|| $base.$field.clone()),)* scenario: None }
    };
}

impl Layer {
    pub fn parse(text: &str, origin: &str) -> Result<Self, CliError> {
        let layer: Layer = toml::from_str(text).map_err(|e| CliError::Usage(format!("{origin}: {e}")))?;
        if let Some(list) = &layer.scenario {
            if list.iter().any(|s| s.scenario.is_some()) {
                return Err(CliError::Usage(format!("{origin}: nested scenario lists are not allowed")));
            }
        }
        Ok(layer)
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn preset(name: &str) -> Result<Self, CliError> {
        let (_, text) = PRESETS.iter().find(|(n, _)| *n == name).ok_or_else(|| {
            let known: Vec<&str> = PRESETS.iter().map(|(n, _)| *n).collect();
            CliError::Usage(format!("unknown preset `{name}` (known: {})", known.join(", ")))
        })?;
        Self::parse(text, &format!("preset {name}"))
    }

    /// `top` wins wherever it sets a key. Scenario lists are not merged.
    pub fn overlay(&self, top: &Layer) -> Layer {
        overlay!(self, top; name, n, b, lambda, eta1, eta2, frequency_ratio, omega1, omega2, tmax, steps,
            state, alpha, truncation, c, d, frame, first_order, k_c, trailing_fraction)
    }
}

/// A fully resolved scenario. Every value that influences the output is here.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Scenario {
    pub name: String,
    pub n: usize,
    pub b: f64,
    pub lambda: f64,
    pub eta1: f64,
    pub eta2: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub tmax: f64,
    pub steps: usize,
    pub state: StateKind,
    pub alpha: f64,
    pub truncation: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub c: Vec<[f64; 2]>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub d: Vec<[f64; 2]>,
    pub frame: Frame,
    pub first_order: bool,
    pub k_c: f64,
    pub trailing_fraction: f64,
}

fn require<T: Clone>(v: &Option<T>, key: &str) -> Result<T, CliError> {
    v.clone().ok_or_else(|| CliError::Usage(format!("missing setting `{key}`")))
}

fn to_complex(v: &[[f64; 2]]) -> Vec<Complex64> {
    v.iter().map(|&[re, im]| Complex64::new(re, im)).collect()
}

impl Scenario {
    fn resolve(layer: &Layer, name: String, lambda: f64) -> Result<Self, CliError> {
        let eta2 = require(&layer.eta2, "eta2")?;
        let ratio = require(&layer.frequency_ratio, "frequency_ratio")?;
        let omega2 = require(&layer.omega2, "omega2")?;
        let state = require(&layer.state, "state")?;
        let alpha = require(&layer.alpha, "alpha")?;
        let (c, d) = match state {
            StateKind::Explicit => match (&layer.c, &layer.d) {
                (Some(c), Some(d)) => (c.clone(), d.clone()),
                _ => return Err(CliError::Usage("state `explicit` needs amplitude lists `c` and `d`".into())),
            },
            _ => (Vec::new(), Vec::new()),
        };
        let truncation = match state {
            StateKind::Coherent => layer.truncation.unwrap_or_else(|| coherent_truncation(alpha.abs(), COHERENT_TAIL_TOL)),
            StateKind::Explicit => c.len().max(d.len()).saturating_sub(1),
            _ => 1,
        };
        let scenario = Self {
            name,
            n: require(&layer.n, "n")?,
            b: require(&layer.b, "b")?,
            lambda,
            eta1: layer.eta1.unwrap_or(ratio.sqrt() * eta2),
            eta2,
            omega1: layer.omega1.unwrap_or(ratio * omega2),
            omega2,
            tmax: require(&layer.tmax, "tmax")?,
            steps: require(&layer.steps, "steps")?,
            state,
            alpha,
            truncation,
            c,
            d,
            frame: require(&layer.frame, "frame")?,
            first_order: require(&layer.first_order, "first_order")?,
            k_c: require(&layer.k_c, "k_c")?,
            trailing_fraction: require(&layer.trailing_fraction, "trailing_fraction")?,
        };
        if !(scenario.trailing_fraction > 0.0 && scenario.trailing_fraction <= 1.0) {
            return Err(CliError::Usage("trailing_fraction must lie in (0, 1]".into()));
        }
        if state == StateKind::Coherent && truncation < 1 {
            return Err(CliError::Usage("truncation must be at least 1".into()));
        }
        // fail early on anything the library would reject
        scenario.chain()?;
        scenario.field_state()?;
        Ok(scenario)
    }

    pub fn chain(&self) -> Result<ChainConfig, CliError> {
        Ok(ChainConfig::new(self.n, self.lambda)?
            .with_energy_scale(self.b)?
            .with_frequencies(self.omega1, self.omega2)?
            .with_couplings(self.eta1, self.eta2)?)
    }

    pub fn field_state(&self) -> Result<FieldState, CliError> {
        Ok(match self.state {
            StateKind::Vacuum => FieldState::vacuum(),
            StateKind::HalfHalf => FieldState::half_half(),
            StateKind::Coherent => FieldState::coherent(Complex64::new(self.alpha, 0.0), self.truncation)?,
            StateKind::Explicit => FieldState::normalized(to_complex(&self.c), to_complex(&self.d))?,
        })
    }

    /// SHA-256 over the command name and the serialized scenario.
    pub fn hash(&self, command: &str) -> String {
        let body = serde_json::to_string(&(command, self)).expect("scenario serializes");
        hex::encode(Sha256::digest(body.as_bytes()))
    }
}

fn lambda_label(v: f64) -> String {
    format!("lambda-{v}")
}

/// Resolves the layers into the scenarios to run, in output order.
pub fn resolve(preset: Option<&Layer>, file: Option<&Layer>, flags: &Layer) -> Result<Vec<Scenario>, CliError> {
    let mut base = Layer::parse(DEFAULTS, "defaults")?;
    for layer in [preset, file].into_iter().flatten() {
        base = base.overlay(layer);
    }
    let listed = file.and_then(|f| f.scenario.clone()).or_else(|| preset.and_then(|p| p.scenario.clone()));
    let mut out = Vec::new();
    match listed {
        Some(list) if flags.lambda.is_none() => {
            for (i, entry) in list.iter().enumerate() {
                let layer = base.overlay(entry).overlay(flags);
                let values = require(&layer.lambda, "lambda")?.values();
                let [lambda] = values[..] else {
                    return Err(CliError::Usage(format!("scenario {} must set a single lambda", i + 1)));
                };
                let name = entry.name.clone().unwrap_or_else(|| lambda_label(lambda));
                out.push(Scenario::resolve(&layer, name, lambda)?);
            }
        }
        _ => {
            let layer = base.overlay(flags);
            let values = require(&layer.lambda, "lambda")?.values();
            if values.is_empty() {
                return Err(CliError::Usage("lambda list is empty".into()));
            }
            for &lambda in &values {
                let name = match (&layer.name, values.len()) {
                    (Some(n), 1) => n.clone(),
                    _ => lambda_label(lambda),
                };
                out.push(Scenario::resolve(&layer, name, lambda)?);
            }
        }
    }
    let mut names: Vec<&str> = out.iter().map(|s| s.name.as_str()).collect();
    names.sort_unstable();
    if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
        return Err(CliError::Usage(format!("duplicate scenario name `{}`", w[0])));
    }
    Ok(out)
}
