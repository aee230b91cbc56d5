//! Parameter records, deformation functions and the five reference presets.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Intensity dependence `f(n)` of the deformed ladder operators `A = a f(n)`.
#[derive(Debug, Clone, PartialEq)]
pub enum DeformationFunction {
    /// `f(n) = 1`, the ordinary (undeformed) oscillator.
    Unity,
    /// `f(n) = sqrt(n)`.
    SqrtN,
    /// Explicit values; `table[j - 1]` holds `f(j)` for `j >= 1`.
    Tabulated(Vec<f64>),
}

impl DeformationFunction {
    /// Evaluates `f(n)` for `n >= 1`.
    ///
    /// Tabulated functions return NaN past the end of the table; callers
    /// check coverage up front with [`DeformationFunction::ensure_covers`].
    pub fn value(&self, n: usize) -> f64 {
        match self {
            DeformationFunction::Unity => 1.0,
            DeformationFunction::SqrtN => (n as f64).sqrt(),
            DeformationFunction::Tabulated(table) => {
                if n == 0 {
                    f64::NAN
                } else {
                    table.get(n - 1).copied().unwrap_or(f64::NAN)
                }
            }
        }
    }

    /// Fails if `f(n)` is not available for every `1 <= j <= n`.
    pub fn ensure_covers(&self, n: usize) -> Result<()> {
        match self {
            DeformationFunction::Tabulated(table) if table.len() < n => Err(Error::TableTooShort {
                len: table.len(),
                needed: n,
            }),
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DeformationFunction::Unity => "unity",
            DeformationFunction::SqrtN => "sqrt-n",
            DeformationFunction::Tabulated(_) => "tabulated",
        }
    }
}

/// Whether the free-evolution prefactor is kept in the state vector.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Picture {
    #[default]
    Interaction,
    /// Reinstates `exp[-i omega t (n f^2(n) + k sum sigma_z)]` with the given frequency.
    IncludeFreePhase { omega: f64 },
}

/// Physical constants of the effective two-atom model. Frequencies are in units of `g`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    /// Photon multiplicity; each atomic flip exchanges `2k` photons.
    pub k: usize,
    pub g: f64,
    pub chi: f64,
    pub delta: f64,
    pub beta1: f64,
    pub beta2: f64,
    /// Initial atomic state `cos(theta/2)|ee> + sin(theta/2)|gg>`.
    pub theta: f64,
    /// Coherent amplitude of the initial field.
    pub alpha: Complex64,
    pub deformation: DeformationFunction,
    pub picture: Picture,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            k: 1,
            g: 1.0,
            chi: 0.0,
            delta: 0.0,
            beta1: 0.0,
            beta2: 0.0,
            theta: 0.0,
            alpha: Complex64::new(5.0, 0.0),
            deformation: DeformationFunction::SqrtN,
            picture: Picture::Interaction,
        }
    }
}

impl ModelParams {
    pub fn mean_photon_number(&self) -> f64 {
        self.alpha.norm_sqr()
    }

    /// Sets a real coherent amplitude with the given mean photon number.
    pub fn with_alpha_sq(mut self, alpha_sq: f64) -> Self {
        self.alpha = Complex64::new(alpha_sq.max(0.0).sqrt(), 0.0);
        self
    }

    /// Reports when `g` differs from `sqrt(beta1 beta2)`, the value implied by
    /// adiabatic elimination. The presets treat `g` as independent, so this is
    /// only a warning.
    pub fn elimination_warning(&self) -> Option<String> {
        let implied = (self.beta1 * self.beta2).sqrt();
        if self.beta1 > 0.0 && self.beta2 > 0.0 && (implied - self.g).abs() > 1e-9 * self.g.max(1.0) {
            Some(format!("g = {} differs from sqrt(beta1 * beta2) = {}", self.g, implied))
        } else {
            None
        }
    }
}

/// Checks every parameter invariant and returns the record unchanged.
pub fn validate(params: ModelParams) -> Result<ModelParams> {
    let mut problems = Vec::new();
    if params.k == 0 {
        problems.push("k must be ≥ 1".to_string());
    }
    if !(params.g.is_finite() && params.g > 0.0) {
        problems.push(format!("g must be finite and > 0 (got {})", params.g));
    }
    if !(params.chi.is_finite() && params.chi >= 0.0) {
        problems.push(format!("chi must be finite and ≥ 0 (got {})", params.chi));
    }
    if !params.delta.is_finite() {
        problems.push(format!("delta must be finite (got {})", params.delta));
    }
    for (name, value) in [("beta1", params.beta1), ("beta2", params.beta2)] {
        if !(value.is_finite() && value >= 0.0) {
            problems.push(format!("{name} must be finite and ≥ 0 (got {value})"));
        }
    }
    if !(params.theta.is_finite() && (0.0..=PI).contains(&params.theta)) {
        problems.push(format!("theta out of [0,π] (got {})", params.theta));
    }
    if !params.alpha.norm_sqr().is_finite() {
        problems.push("|alpha|^2 must be finite".to_string());
    }
    if let DeformationFunction::Tabulated(table) = &params.deformation {
        if let Some(bad) = table.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
            problems.push(format!("tabulated f({}) must be finite and > 0", bad + 1));
        }
    }
    if let Picture::IncludeFreePhase { omega } = params.picture {
        if !omega.is_finite() {
            problems.push("free-evolution frequency must be finite".to_string());
        }
    }
    if problems.is_empty() {
        Ok(params)
    } else {
        Err(Error::InvalidParams(problems.join("; ")))
    }
}

/// Label of one of the five plotted parameter sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScenarioLabel {
    A,
    B,
    C,
    D,
    E,
}

impl ScenarioLabel {
    pub const ALL: [ScenarioLabel; 5] = [
        ScenarioLabel::A,
        ScenarioLabel::B,
        ScenarioLabel::C,
        ScenarioLabel::D,
        ScenarioLabel::E,
    ];

    pub fn parse(label: &str) -> Result<Self> {
        match label.trim().to_ascii_lowercase().as_str() {
            "a" => Ok(ScenarioLabel::A),
            "b" => Ok(ScenarioLabel::B),
            "c" => Ok(ScenarioLabel::C),
            "d" => Ok(ScenarioLabel::D),
            "e" => Ok(ScenarioLabel::E),
            _ => Err(Error::UnknownScenario(label.to_string())),
        }
    }
}

impl fmt::Display for ScenarioLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ScenarioLabel::A => "a",
            ScenarioLabel::B => "b",
            ScenarioLabel::C => "c",
            ScenarioLabel::D => "d",
            ScenarioLabel::E => "e",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioPreset {
    pub label: ScenarioLabel,
    pub delta: f64,
    pub chi: f64,
    pub beta1: f64,
    pub beta2: f64,
}

impl ScenarioPreset {
    /// Full parameter record with the common defaults: `|alpha|^2 = 25`,
    /// `theta = 0`, `f(n) = sqrt(n)`, `g = 1`.
    pub fn params(&self, k: usize) -> ModelParams {
        ModelParams {
            k,
            delta: self.delta,
            chi: self.chi,
            beta1: self.beta1,
            beta2: self.beta2,
            ..ModelParams::default()
        }
        .with_alpha_sq(25.0)
    }
}

pub fn scenario_preset(label: ScenarioLabel) -> ScenarioPreset {
    let (delta, chi, beta1, beta2) = match label {
        ScenarioLabel::A => (0.0, 0.0, 0.0, 0.0),
        ScenarioLabel::B => (10.0, 0.0, 0.0, 0.0),
        ScenarioLabel::C => (0.0, 0.5, 0.0, 0.0),
        ScenarioLabel::D => (0.0, 0.0, 6.0, 1.0),
        ScenarioLabel::E => (10.0, 0.5, 6.0, 1.0),
    };
    ScenarioPreset {
        label,
        delta,
        chi,
        beta1,
        beta2,
    }
}

/// Looks up a preset by its textual label.
pub fn scenario_by_name(label: &str) -> Result<ScenarioPreset> {
    ScenarioLabel::parse(label).map(scenario_preset)
}
