//! Run configuration: one JSON document per experiment.

use std::path::PathBuf;

use num_complex::Complex64;
use qwalk::analysis::DEFAULT_WINDOW;
use qwalk::disorder::DisorderKind;
use qwalk::ensemble::{DisorderSpec, EnsembleConfig, InitialState, Observables, VarianceMode};
use qwalk::hilbert::{Symmetry, NORM_TOLERANCE};
use qwalk::operators::PhaseOrder;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Qfi,
    Variance,
    Distribution,
    TwoParticle,
    Fit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Series a `fit` experiment is run on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitTarget {
    #[default]
    Qfi,
    Variance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Not part of the provenance record: moving outputs does not change them.
    #[serde(default = "default_out", skip_serializing)]
    pub path: PathBuf,
    #[serde(default)]
    pub format: Format,
    #[serde(default)]
    pub plot: bool,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec {
            path: default_out(),
            format: Format::Csv,
            plot: false,
        }
    }
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSpec {
    #[serde(default)]
    pub observable: FitTarget,
    /// Defaults to `min(10, T / 2)`.
    #[serde(default)]
    pub t_min: Option<usize>,
    /// Defaults to `T`.
    #[serde(default)]
    pub t_max: Option<usize>,
    #[serde(default = "default_window")]
    pub window: usize,
}

impl Default for FitSpec {
    fn default() -> Self {
        FitSpec {
            observable: FitTarget::Qfi,
            t_min: None,
            t_max: None,
            window: DEFAULT_WINDOW,
        }
    }
}

fn default_window() -> usize {
    DEFAULT_WINDOW
}

fn default_maps() -> u64 {
    1_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: Experiment,
    #[serde(default = "DisorderSpec::ordered")]
    pub disorder: DisorderSpec,
    #[serde(rename = "T")]
    pub steps: usize,
    #[serde(default = "default_maps")]
    pub maps: u64,
    #[serde(default)]
    pub phi: f64,
    /// Defaults to `|0,up>` for QFI runs, the balanced coin for variance and
    /// distribution runs, and bosons for two-particle runs.
    #[serde(default)]
    pub initial: Option<InitialState>,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub variance_mode: VarianceMode,
    #[serde(default)]
    pub phase_order: PhaseOrder,
    #[serde(default)]
    pub fit: FitSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

fn invalid(field: &str, message: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("field `{field}`: {message}"))
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let mut config: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        config.initial = Some(config.initial_state());
        config.validate()?;
        Ok(config)
    }

    pub fn initial_state(&self) -> InitialState {
        self.initial.unwrap_or(match self.experiment {
            Experiment::Qfi | Experiment::Fit => InitialState::origin_up(),
            Experiment::Variance | Experiment::Distribution => InitialState::origin_balanced(),
            Experiment::TwoParticle => InitialState::TwoParticle {
                statistics: Symmetry::Boson,
            },
        })
    }

    /// Fit range after defaults, `(t_min, t_max)`.
    pub fn fit_range(&self) -> (usize, usize) {
        let t_max = self.fit.t_max.unwrap_or(self.steps);
        let t_min = self.fit.t_min.unwrap_or_else(|| 10.min(self.steps / 2).max(1));
        (t_min, t_max)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let p = self.disorder.p;
        if !(0.0..=1.0).contains(&p) {
            return Err(invalid(
                "p",
                format_args!("disorder degree must lie in [0, 1], got {p}"),
            ));
        }
        if self.disorder.kind == DisorderKind::None && p != 0.0 {
            return Err(invalid(
                "p",
                format_args!("must be 0 when disorder kind is none, got {p}"),
            ));
        }
        if self.steps == 0 {
            return Err(invalid("T", "must be at least 1"));
        }
        if self.maps == 0 {
            return Err(invalid("maps", "must be at least 1"));
        }
        if !self.phi.is_finite() {
            return Err(invalid("phi", "must be finite"));
        }
        match (self.experiment, self.initial_state()) {
            (Experiment::TwoParticle, InitialState::Single { .. }) => {
                return Err(invalid(
                    "initial",
                    "two-particle experiments need a two-particle initial state",
                ));
            }
            (Experiment::TwoParticle, InitialState::TwoParticle { .. }) => {}
            (_, InitialState::TwoParticle { .. }) => {
                return Err(invalid(
                    "initial",
                    "only two-particle experiments take a two-particle initial state",
                ));
            }
            (_, InitialState::Single { coin, .. }) => {
                if coin.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                    return Err(invalid("coin", "amplitudes must be finite"));
                }
                let norm: f64 = coin.iter().map(Complex64::norm_sqr).sum();
                if (norm - 1.0).abs() > NORM_TOLERANCE {
                    return Err(invalid(
                        "coin",
                        format_args!("must be normalized, |up|^2 + |down|^2 = {norm}"),
                    ));
                }
            }
        }
        if self.experiment == Experiment::Fit {
            let (t_min, t_max) = self.fit_range();
            if t_max > self.steps {
                return Err(invalid("t_max", format_args!("{t_max} exceeds T = {}", self.steps)));
            }
            if t_min + 2 > t_max {
                return Err(invalid(
                    "t_min",
                    format_args!("needs at least 3 points below t_max = {t_max}, got {t_min}"),
                ));
            }
            if self.fit.window < 5 || self.fit.window >= self.steps {
                return Err(invalid(
                    "window",
                    format_args!("must lie in [5, T) = [5, {}), got {}", self.steps, self.fit.window),
                ));
            }
        }
        Ok(())
    }

    /// Ensemble run for this config with the given observables.
    pub fn ensemble(&self, observables: Observables) -> EnsembleConfig {
        let mut cfg = EnsembleConfig::new(self.disorder, self.steps, self.maps, self.master_seed)
            .with_initial(self.initial_state())
            .with_observables(observables)
            .with_phi(self.phi);
        cfg.variance_mode = self.variance_mode;
        cfg.phase_order = self.phase_order;
        cfg
    }
}
