//! Power-law exponents of QFI and variance series.
//!
//! A series `y[t]` is fitted as `y ~ A t^alpha` by least squares on
//! `(ln t, ln y)`. Entries at `t = 0` and exact zeros are skipped rather
//! than offset. The step-dependent exponent `alpha(t)` is the slope of the
//! same fit over a sliding window centred on `t`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default sliding-window width for `alpha(t)`.
pub const DEFAULT_WINDOW: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub alpha: f64,
    pub amplitude: f64,
    pub t_min: usize,
    pub t_max: usize,
    /// RMS of the log-log residuals.
    pub residual: f64,
}

/// Fits `series[t] ~ amplitude * t^alpha` over `t_min..=t_max`.
pub fn fit_power_law(series: &[f64], t_min: usize, t_max: usize) -> Result<PowerLawFit> {
    if t_min > t_max || t_max >= series.len() {
        return Err(Error::InvalidRange {
            t_min,
            t_max,
            len: series.len(),
        });
    }
    let mut xs = Vec::with_capacity(t_max - t_min + 1);
    let mut ys = Vec::with_capacity(t_max - t_min + 1);
    for (t, &y) in series.iter().enumerate().take(t_max + 1).skip(t_min.max(1)) {
        if y == 0.0 {
            continue;
        }
        if y.is_nan() || y < 0.0 {
            return Err(Error::NonPositiveValue { t, value: y });
        }
        xs.push((t as f64).ln());
        ys.push(y.ln());
    }
    if xs.len() < 3 {
        return Err(Error::TooFewPoints { found: xs.len() });
    }

    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (sxy, sxx) = xs.iter().zip(&ys).fold((0.0, 0.0), |(sxy, sxx), (x, y)| {
        let dx = x - mx;
        (sxy + dx * (y - my), sxx + dx * dx)
    });
    let alpha = sxy / sxx;
    let intercept = my - alpha * mx;
    let ss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - (intercept + alpha * x);
            r * r
        })
        .sum();
    Ok(PowerLawFit {
        alpha,
        amplitude: intercept.exp(),
        t_min,
        t_max,
        residual: (ss / n).sqrt(),
    })
}

/// Step-dependent exponent: `alpha[i]` is the fitted slope on
/// `[centers[i] - width/2, centers[i] + width/2]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaSeries {
    pub width: usize,
    pub centers: Vec<usize>,
    pub alpha: Vec<f64>,
}

impl AlphaSeries {
    /// `(center, alpha)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.centers.iter().copied().zip(self.alpha.iter().copied())
    }

    /// Exponent of the last admissible window.
    pub fn last(&self) -> Option<f64> {
        self.alpha.last().copied()
    }
}

/// Sliding-window exponent for every centre whose window lies in `1..len`.
pub fn windowed_alpha(series: &[f64], width: usize) -> Result<AlphaSeries> {
    let half = width / 2;
    if width < 5 || series.len() <= width || series.len() < 2 * half + 2 {
        return Err(Error::InvalidWindow {
            width,
            len: series.len(),
        });
    }
    let first = half + 1;
    let last = series.len() - 1 - half;
    let mut out = AlphaSeries {
        width,
        centers: Vec::with_capacity(last + 1 - first),
        alpha: Vec::with_capacity(last + 1 - first),
    };
    for c in first..=last {
        let fit = fit_power_law(series, c - half, c + half)?;
        out.centers.push(c);
        out.alpha.push(fit.alpha);
    }
    Ok(out)
}

/// Spreading regime named by an exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Ballistic,
    Superdiffusive,
    Diffusive,
    Subdiffusive,
    Localized,
}

impl Regime {
    /// Classifies a global exponent; values within `tol` of 2 or 1 snap to
    /// ballistic or diffusive.
    pub fn from_alpha(alpha: f64, tol: f64) -> Self {
        if (alpha - 2.0).abs() <= tol || alpha > 2.0 {
            Regime::Ballistic
        } else if (alpha - 1.0).abs() <= tol {
            Regime::Diffusive
        } else if alpha > 1.0 {
            Regime::Superdiffusive
        } else {
            Regime::Subdiffusive
        }
    }

    /// Like [`Regime::from_alpha`] on the global fit, but reports
    /// localization when the late windowed exponent has dropped below
    /// `threshold` and kept falling from its early value.
    pub fn classify(global: &PowerLawFit, local: &AlphaSeries, tol: f64, threshold: f64) -> Self {
        match (local.alpha.first(), local.last()) {
            (Some(&early), Some(late)) if late < threshold && late < early => Regime::Localized,
            _ => Regime::from_alpha(global.alpha, tol),
        }
    }
}
