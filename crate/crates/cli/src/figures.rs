//! Figure presets: each figure is a list of panels, each panel a [`RunConfig`].

use qwalk::disorder::{DisorderKind, Semantics};
use qwalk::ensemble::{DisorderSpec, InitialState};
use qwalk::hilbert::Symmetry;
use serde::Serialize;

use crate::config::{Experiment, FitSpec, FitTarget, OutputSpec, RunConfig};
use crate::output::{Artifacts, Manifest};
use crate::plot::{LinePlot, Style};
use crate::run::{execute, Plot};
use crate::CliError;

pub const DEFAULT_SEED: u64 = 1;
pub const DESK_MAPS: u64 = 1_000;
pub const PAPER_MAPS: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Figure {
    /// Ordered-walk QFI (ballistic).
    Fig2a,
    /// QFI at p = 0.1, static and dynamic.
    Fig2b,
    /// QFI at p = 1, static.
    Fig2cStatic,
    /// QFI at p = 1, dynamic.
    Fig2cDynamic,
    /// Static p = 1 QFI with its windowed exponent.
    Fig3,
    /// Two-walker QFI, ordered.
    Fig4a,
    /// Two-walker QFI, static p = 1.
    Fig4b,
    /// Two-walker QFI, dynamic p = 1.
    Fig4c,
    /// Position-distribution heatmaps.
    Fig5,
    /// Position variance.
    Fig6,
}

impl Figure {
    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig2a => "fig2a",
            Figure::Fig2b => "fig2b",
            Figure::Fig2cStatic => "fig2c-static",
            Figure::Fig2cDynamic => "fig2c-dynamic",
            Figure::Fig3 => "fig3",
            Figure::Fig4a => "fig4a",
            Figure::Fig4b => "fig4b",
            Figure::Fig4c => "fig4c",
            Figure::Fig5 => "fig5",
            Figure::Fig6 => "fig6",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Panel {
    pub name: String,
    pub config: RunConfig,
}

#[derive(Debug, Clone, Serialize)]
pub struct Preset {
    pub figure: Figure,
    pub paper_scale: bool,
    pub panels: Vec<Panel>,
}

fn p_label(p: f64) -> String {
    format!("p{p}")
}

fn panel_name(kind: DisorderKind, p: f64) -> String {
    match kind {
        DisorderKind::None => p_label(0.0),
        DisorderKind::Static => format!("static_{}", p_label(p)),
        DisorderKind::Dynamic => format!("dynamic_{}", p_label(p)),
    }
}

struct PanelBuilder {
    experiment: Experiment,
    steps: usize,
    maps: u64,
    seed: u64,
    initial: InitialState,
    fit: FitSpec,
}

impl PanelBuilder {
    /// Ordered panels are deterministic, so one member is the exact mean.
    fn panel(&self, kind: DisorderKind, p: f64) -> Panel {
        let disorder = match kind {
            DisorderKind::None => DisorderSpec::ordered(),
            _ => DisorderSpec::new(kind, p),
        };
        let maps = if kind == DisorderKind::None { 1 } else { self.maps };
        Panel {
            name: panel_name(kind, p),
            config: RunConfig {
                experiment: self.experiment,
                disorder,
                steps: self.steps,
                maps,
                phi: 0.0,
                initial: Some(self.initial),
                master_seed: self.seed,
                variance_mode: Default::default(),
                phase_order: Default::default(),
                fit: self.fit,
                output: OutputSpec {
                    plot: true,
                    ..OutputSpec::default()
                },
            },
        }
    }
}

fn fit_spec(observable: FitTarget, t_max: usize) -> FitSpec {
    FitSpec {
        observable,
        t_min: Some(10),
        t_max: Some(t_max),
        window: 20,
    }
}

pub fn preset(figure: Figure, paper_scale: bool, seed: u64) -> Preset {
    let maps = if paper_scale { PAPER_MAPS } else { DESK_MAPS };
    let qfi = |steps| PanelBuilder {
        experiment: Experiment::Fit,
        steps,
        maps,
        seed,
        initial: InitialState::origin_up(),
        fit: fit_spec(FitTarget::Qfi, steps),
    };
    let two = PanelBuilder {
        experiment: Experiment::TwoParticle,
        steps: 50,
        maps,
        seed,
        initial: InitialState::TwoParticle {
            statistics: Symmetry::Boson,
        },
        fit: fit_spec(FitTarget::Qfi, 50),
    };
    let spread = |experiment, steps| PanelBuilder {
        experiment,
        steps,
        maps,
        seed,
        initial: InitialState::origin_balanced(),
        fit: fit_spec(FitTarget::Variance, steps),
    };
    let sweep = |b: &PanelBuilder| {
        vec![
            b.panel(DisorderKind::None, 0.0),
            b.panel(DisorderKind::Static, 0.1),
            b.panel(DisorderKind::Static, 1.0),
            b.panel(DisorderKind::Dynamic, 0.1),
            b.panel(DisorderKind::Dynamic, 1.0),
        ]
    };
    let panels = match figure {
        Figure::Fig2a => vec![qfi(100).panel(DisorderKind::None, 0.0)],
        Figure::Fig2b => vec![
            qfi(50).panel(DisorderKind::Static, 0.1),
            qfi(50).panel(DisorderKind::Dynamic, 0.1),
        ],
        Figure::Fig2cStatic => vec![qfi(50).panel(DisorderKind::Static, 1.0)],
        Figure::Fig2cDynamic => vec![qfi(50).panel(DisorderKind::Dynamic, 1.0)],
        Figure::Fig3 => vec![qfi(100).panel(DisorderKind::Static, 1.0)],
        Figure::Fig4a => vec![two.panel(DisorderKind::None, 0.0)],
        Figure::Fig4b => vec![two.panel(DisorderKind::Static, 1.0)],
        Figure::Fig4c => vec![two.panel(DisorderKind::Dynamic, 1.0)],
        Figure::Fig5 => sweep(&spread(Experiment::Distribution, 50)),
        Figure::Fig6 => sweep(&spread(Experiment::Fit, 100)),
    };
    Preset {
        figure,
        paper_scale,
        panels,
    }
}

fn panel_label(panel: &Panel) -> String {
    let d = panel.config.disorder;
    match d.kind {
        DisorderKind::None => "ordered".to_string(),
        DisorderKind::Static => format!("static p = {}", d.p),
        DisorderKind::Dynamic => format!("dynamic p = {}", d.p),
    }
}

/// Overlay plots that gather several panels: `(file stem, title)`.
fn overlay_groups(figure: Figure, kind: DisorderKind) -> &'static [(&'static str, &'static str)] {
    const QFI: (&str, &str) = ("qfi", "QFI at p = 0.1");
    const STATIC: (&str, &str) = ("variance_static", "position variance, static disorder");
    const DYNAMIC: (&str, &str) = ("variance_dynamic", "position variance, dynamic disorder");
    match (figure, kind) {
        (Figure::Fig2b, _) => &[QFI],
        (Figure::Fig6, DisorderKind::None) => &[STATIC, DYNAMIC],
        (Figure::Fig6, DisorderKind::Static) => &[STATIC],
        (Figure::Fig6, DisorderKind::Dynamic) => &[DYNAMIC],
        _ => &[],
    }
}

fn absorb(into: &mut LinePlot, label: &str, plot: &LinePlot) {
    for s in &plot.series {
        let mut s = s.clone();
        s.label = match s.style {
            Style::Fit => format!("{label} fit"),
            _ => label.to_string(),
        };
        into.series.push(s);
    }
    for n in &plot.notes {
        into.notes.push(format!("{label}: {n}"));
    }
}

/// Runs every panel and writes data, plots and `manifest.json` into `artifacts`.
pub fn reproduce(preset: &Preset, workers: Option<usize>, artifacts: &mut Artifacts) -> Result<Vec<String>, CliError> {
    let fig = preset.figure.name();
    let command = format!("reproduce {fig}");
    let figure_manifest = Manifest::new(
        &command,
        preset,
        Some(preset.panels[0].config.master_seed),
        Some(Semantics::default()),
    );
    let single = preset.panels.len() == 1;
    let mut summary = Vec::new();
    let mut overlays: Vec<(&'static str, LinePlot)> = Vec::new();
    let mut panel_manifests = Vec::new();

    for panel in &preset.panels {
        let label = panel_label(panel);
        let manifest = Manifest::new(
            &command,
            &panel.config,
            Some(panel.config.master_seed),
            Some(panel.config.disorder.semantics),
        );
        let mut outcome = execute(&panel.config, workers)?;
        if !single {
            for t in &mut outcome.tables {
                t.name = format!("{}_{}", t.name, panel.name);
            }
        }
        artifacts.write_tables_csv(&outcome.tables, &manifest)?;
        summary.extend(outcome.summary.iter().map(|s| format!("{fig} [{label}] {s}")));

        let groups = overlay_groups(preset.figure, panel.config.disorder.kind);
        for (stem, plot) in outcome.plots {
            let file = if single {
                format!("{stem}.svg")
            } else {
                format!("{stem}_{}.svg", panel.name)
            };
            match plot {
                Plot::Heat(mut h) => {
                    h.title = format!("{fig}: {label}");
                    artifacts.write(&file, h.render(&figure_manifest).as_bytes())?;
                }
                Plot::Line(p) if stem != "alpha" && !groups.is_empty() => {
                    for &(group, title) in groups {
                        let slot = match overlays.iter().position(|(g, _)| *g == group) {
                            Some(i) => i,
                            None => {
                                overlays.push((
                                    group,
                                    LinePlot {
                                        title: format!("{fig}: {title}"),
                                        series: Vec::new(),
                                        notes: Vec::new(),
                                        ..p.clone()
                                    },
                                ));
                                overlays.len() - 1
                            }
                        };
                        absorb(&mut overlays[slot].1, &label, &p);
                    }
                }
                Plot::Line(mut p) => {
                    p.title = format!("{fig}: {}", p.title);
                    artifacts.write(&file, p.render(&figure_manifest).as_bytes())?;
                }
            }
        }
        panel_manifests.push(serde_json::json!({"name": panel.name, "manifest": manifest}));
    }

    for (stem, plot) in overlays {
        artifacts.write(&format!("{stem}.svg"), plot.render(&figure_manifest).as_bytes())?;
    }
    artifacts.write_json(
        "manifest.json",
        &serde_json::json!({
            "figure": figure_manifest,
            "panels": panel_manifests,
        }),
    )?;
    Ok(summary)
}
