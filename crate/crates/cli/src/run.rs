//! Executes a [`RunConfig`] into tables and plots.

use qwalk::analysis::{fit_power_law, windowed_alpha, AlphaSeries, PowerLawFit};
use qwalk::ensemble::{run_ensemble, EnsembleSeries, InitialState, Observables, SeriesStats};
use qwalk::hilbert::Symmetry;
use qwalk::observables::PositionDistribution;

use crate::config::{Experiment, FitTarget, RunConfig};
use crate::output::{Cell, Table};
use crate::plot::{Heatmap, LinePlot, Scale, Series, Style};
use crate::CliError;

/// Everything a run produces before it touches the filesystem.
#[derive(Default)]
pub struct Outcome {
    pub tables: Vec<Table>,
    /// `(file stem, plot)`; rendered only when plots are requested.
    pub plots: Vec<(String, Plot)>,
    /// One-line human summaries printed to stdout.
    pub summary: Vec<String>,
}

pub enum Plot {
    Line(LinePlot),
    Heat(Heatmap),
}

pub const QFI_COLUMNS: [&str; 3] = ["t", "qfi_mean", "qfi_stderr"];
pub const VARIANCE_COLUMNS: [&str; 2] = ["t", "variance"];
pub const DISTRIBUTION_COLUMNS: [&str; 3] = ["t", "x", "probability"];
pub const ALPHA_COLUMNS: [&str; 2] = ["t_center", "alpha"];
pub const FIT_COLUMNS: [&str; 5] = ["t_min", "t_max", "alpha", "amplitude", "residual"];

pub fn qfi_table(name: &str, stats: &SeriesStats) -> Table {
    let mut t = Table::new(name, &QFI_COLUMNS);
    for (i, (m, s)) in stats.mean.iter().zip(&stats.stderr).enumerate() {
        t.push(vec![Cell::Int(i as i64), Cell::Float(*m), Cell::Float(*s)]);
    }
    t
}

pub fn variance_table(name: &str, stats: &SeriesStats) -> Table {
    let mut t = Table::new(name, &VARIANCE_COLUMNS);
    for (i, v) in stats.mean.iter().enumerate() {
        t.push(vec![Cell::Int(i as i64), Cell::Float(*v)]);
    }
    t
}

/// Rows inside the light cone `|x - origin| <= t`.
pub fn distribution_table(name: &str, dists: &[PositionDistribution], origin: i64) -> Table {
    let mut table = Table::new(name, &DISTRIBUTION_COLUMNS);
    for (t, d) in dists.iter().enumerate() {
        let t = t as i64;
        for x in -t..=t {
            table.push(vec![Cell::Int(t), Cell::Int(x + origin), Cell::Float(d.probability(x))]);
        }
    }
    table
}

pub fn alpha_table(name: &str, alpha: &AlphaSeries) -> Table {
    let mut t = Table::new(name, &ALPHA_COLUMNS);
    for (c, a) in alpha.iter() {
        t.push(vec![Cell::Int(c as i64), Cell::Float(a)]);
    }
    t
}

pub fn fit_table(name: &str, fit: &PowerLawFit) -> Table {
    let mut t = Table::new(name, &FIT_COLUMNS);
    t.push(vec![
        Cell::Int(fit.t_min as i64),
        Cell::Int(fit.t_max as i64),
        Cell::Float(fit.alpha),
        Cell::Float(fit.amplitude),
        Cell::Float(fit.residual),
    ]);
    t
}

pub fn series_points(values: &[f64]) -> Vec<(f64, f64)> {
    values.iter().enumerate().map(|(t, &v)| (t as f64, v)).collect()
}

/// Fitted curve `A t^alpha` over the fit range, for overlays.
pub fn fit_points(fit: &PowerLawFit) -> Vec<(f64, f64)> {
    (fit.t_min.max(1)..=fit.t_max)
        .map(|t| (t as f64, fit.amplitude * (t as f64).powf(fit.alpha)))
        .collect()
}

pub fn heatmap_rows(dists: &[PositionDistribution], steps: usize) -> Vec<Vec<f64>> {
    let t = steps as i64;
    dists
        .iter()
        .map(|d| (-t..=t).map(|x| d.probability(x)).collect())
        .collect()
}

pub fn log_log(title: String, y_label: &str, series: Vec<Series>, notes: Vec<String>) -> LinePlot {
    LinePlot {
        title,
        x_label: "step t".to_string(),
        y_label: y_label.to_string(),
        x_scale: Scale::Log,
        y_scale: Scale::Log,
        series,
        notes,
    }
}

pub fn alpha_plot(title: String, alpha: &AlphaSeries) -> LinePlot {
    LinePlot {
        title,
        x_label: "window centre t".to_string(),
        y_label: "alpha(t)".to_string(),
        x_scale: Scale::Linear,
        y_scale: Scale::Linear,
        series: vec![Series {
            label: format!("w = {}", alpha.width),
            points: alpha.iter().map(|(c, a)| (c as f64, a)).collect(),
            style: Style::Markers,
        }],
        notes: Vec::new(),
    }
}

fn line(label: impl Into<String>, points: Vec<(f64, f64)>) -> Series {
    Series {
        label: label.into(),
        points,
        style: Style::Line,
    }
}

fn qfi_only() -> Observables {
    Observables {
        qfi: true,
        variance: false,
        distribution: false,
    }
}

fn run(config: &RunConfig, observables: Observables, workers: Option<usize>) -> Result<EnsembleSeries, CliError> {
    Ok(run_ensemble(&config.ensemble(observables), workers)?)
}

fn describe(config: &RunConfig) -> String {
    let d = config.disorder;
    let kind = serde_json::to_value(d.kind).expect("enum serializes");
    format!(
        "{} p = {}, T = {}, {} maps",
        kind.as_str().unwrap_or(""),
        d.p,
        config.steps,
        config.maps
    )
}

/// Global fit with a plot overlay, skipped when the range does not admit one.
fn annotated_fit(
    values: &[f64],
    config: &RunConfig,
    label: &str,
    series: &mut Vec<Series>,
    notes: &mut Vec<String>,
    summary: &mut Vec<String>,
) -> Option<PowerLawFit> {
    let (t_min, t_max) = config.fit_range();
    let fit = fit_power_law(values, t_min, t_max.min(config.steps)).ok()?;
    let note = format!("{label}: alpha[{}, {}] = {:.4}", fit.t_min, fit.t_max, fit.alpha);
    series.push(Series {
        label: format!("{label} fit"),
        points: fit_points(&fit),
        style: Style::Fit,
    });
    notes.push(note.clone());
    summary.push(note);
    Some(fit)
}

pub fn execute(config: &RunConfig, workers: Option<usize>) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    let what = describe(config);
    match config.experiment {
        Experiment::Qfi => {
            let r = run(config, qfi_only(), workers)?;
            let q = r.qfi.expect("qfi requested");
            let mut series = vec![line("mean QFI", series_points(&q.mean))];
            let mut notes = Vec::new();
            annotated_fit(&q.mean, config, "QFI", &mut series, &mut notes, &mut out.summary);
            out.tables.push(qfi_table("qfi", &q));
            out.plots.push((
                "qfi".to_string(),
                Plot::Line(log_log(format!("QFI, {what}"), "F", series, notes)),
            ));
        }
        Experiment::Variance => {
            let obs = Observables {
                qfi: false,
                variance: true,
                distribution: false,
            };
            let r = run(config, obs, workers)?;
            let v = r.variance.expect("variance requested");
            let mut series = vec![line("variance", series_points(&v.mean))];
            let mut notes = Vec::new();
            annotated_fit(&v.mean, config, "variance", &mut series, &mut notes, &mut out.summary);
            out.tables.push(variance_table("variance", &v));
            out.plots.push((
                "variance".to_string(),
                Plot::Line(log_log(format!("position variance, {what}"), "sigma^2", series, notes)),
            ));
        }
        Experiment::Distribution => {
            let obs = Observables {
                qfi: false,
                variance: false,
                distribution: true,
            };
            let r = run(config, obs, workers)?;
            let d = r.distributions.expect("distribution requested");
            out.tables.push(distribution_table("distribution", &d, r.origin));
            out.plots.push((
                "distribution".to_string(),
                Plot::Heat(Heatmap {
                    title: format!("position distribution, {what}"),
                    values: heatmap_rows(&d, config.steps),
                    steps: config.steps,
                }),
            ));
        }
        Experiment::TwoParticle => {
            let statistics = match config.initial_state() {
                InitialState::TwoParticle { statistics } => statistics,
                InitialState::Single { .. } => unreachable!("validated"),
            };
            let mut runs = vec![(statistics, run(config, qfi_only(), workers)?)];
            if statistics != Symmetry::Separable {
                let mut separable = config.clone();
                separable.initial = Some(InitialState::TwoParticle {
                    statistics: Symmetry::Separable,
                });
                runs.push((Symmetry::Separable, run(&separable, qfi_only(), workers)?));
            }
            let mut series = Vec::new();
            let mut notes = Vec::new();
            for (sym, r) in &runs {
                let name = statistics_name(*sym);
                let q = r.qfi.as_ref().expect("qfi requested");
                series.push(Series {
                    label: name.to_string(),
                    points: series_points(&q.mean),
                    style: Style::Markers,
                });
                annotated_fit(&q.mean, config, name, &mut Vec::new(), &mut notes, &mut out.summary);
                out.tables.push(qfi_table(&format!("qfi_{name}"), q));
            }
            out.plots.push((
                "qfi".to_string(),
                Plot::Line(log_log(format!("two-walker QFI, {what}"), "F", series, notes)),
            ));
        }
        Experiment::Fit => {
            let (t_min, t_max) = config.fit_range();
            let (values, table, label) = match config.fit.observable {
                FitTarget::Qfi => {
                    let q = run(config, qfi_only(), workers)?.qfi.expect("qfi requested");
                    let table = qfi_table("qfi", &q);
                    (q.mean, table, "QFI")
                }
                FitTarget::Variance => {
                    let obs = Observables {
                        qfi: false,
                        variance: true,
                        distribution: false,
                    };
                    let v = run(config, obs, workers)?.variance.expect("variance requested");
                    let table = variance_table("variance", &v);
                    (v.mean, table, "variance")
                }
            };
            let fit = fit_power_law(&values, t_min, t_max)?;
            let alpha = windowed_alpha(&values, config.fit.window)?;
            out.summary.push(format!(
                "{label}: alpha[{t_min}, {t_max}] = {:.4}, last windowed alpha = {:.4}",
                fit.alpha,
                alpha.last().unwrap_or(f64::NAN)
            ));
            let stem = table.name.clone();
            out.tables.push(table);
            out.tables.push(fit_table("fit", &fit));
            out.tables.push(alpha_table("alpha", &alpha));
            let series = vec![
                line(label, series_points(&values)),
                Series {
                    label: "fit".to_string(),
                    points: fit_points(&fit),
                    style: Style::Fit,
                },
            ];
            let notes = vec![format!("alpha[{t_min}, {t_max}] = {:.4}", fit.alpha)];
            out.plots.push((
                stem,
                Plot::Line(log_log(format!("{label}, {what}"), label, series, notes)),
            ));
            out.plots.push((
                "alpha".to_string(),
                Plot::Line(alpha_plot(format!("windowed alpha, {what}"), &alpha)),
            ));
        }
    }
    Ok(out)
}

pub fn statistics_name(sym: Symmetry) -> &'static str {
    match sym {
        Symmetry::Separable => "separable",
        Symmetry::Boson => "boson",
        Symmetry::Fermion => "fermion",
    }
}
