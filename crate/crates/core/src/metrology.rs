//! Quantum Fisher information of the walker about the encoded phase.
//!
//! All walker states are pure, so the information follows from the state and
//! its phase derivative alone:
//! `F = 4 (<dpsi|dpsi> - |<psi|dpsi>|^2)`.
//! The derivative is co-evolved with the state (see
//! [`operators::step_with_derivative`](crate::operators::step_with_derivative));
//! [`qfi_finite_difference`] is an independent check that never touches the
//! recursion.

use num_complex::Complex64;

use crate::disorder::PhaseMap;
use crate::error::{Error, Result};
use crate::hilbert::State;
use crate::operators::{Evolve, PhaseOrder, StepContext};

/// Values in `(-NEGATIVE_CLAMP, 0)` are rounding noise and are reported as 0.
pub const NEGATIVE_CLAMP: f64 = 1e-9;

/// Normalization slack accepted by [`qfi_pure`].
pub const NORM_SLACK: f64 = 1e-10;

/// A state together with its (unnormalized) derivative with respect to `phi`.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativePair<S> {
    pub psi: S,
    pub dpsi: S,
}

impl<S: State> DerivativePair<S> {
    /// Initial pair `(psi_0, 0)`: the input does not depend on `phi`.
    pub fn new(psi: S) -> Self {
        let dpsi = psi.zeroed_like();
        DerivativePair { psi, dpsi }
    }
}

/// Per-step QFI, `values[t]` for `t = 0..=T`.
#[derive(Debug, Clone, PartialEq)]
pub struct QfiSeries {
    pub values: Vec<f64>,
    pub phi: f64,
}

/// Neumaier-compensated sum; two-walker states have ~10^5 terms.
fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut carry) = (0.0_f64, 0.0_f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

fn pure_state_formula(psi: &[Complex64], dpsi: &[Complex64]) -> Result<f64> {
    let norm_sqr = compensated_sum(psi.iter().map(|a| a.norm_sqr()));
    if (norm_sqr - 1.0).abs() > NORM_SLACK {
        return Err(Error::NotNormalized { norm_sqr });
    }
    let dd = compensated_sum(dpsi.iter().map(|a| a.norm_sqr()));
    let overlap = Complex64::new(
        compensated_sum(psi.iter().zip(dpsi).map(|(p, d)| (p.conj() * d).re)),
        compensated_sum(psi.iter().zip(dpsi).map(|(p, d)| (p.conj() * d).im)),
    );
    let f = 4.0 * (dd - overlap.norm_sqr());
    if f < -NEGATIVE_CLAMP {
        Err(Error::NegativeQfi(f))
    } else {
        Ok(f.max(0.0))
    }
}

/// Pure-state QFI of a derivative pair.
pub fn qfi_pure<S: State>(pair: &DerivativePair<S>) -> Result<f64> {
    pure_state_formula(pair.psi.amplitudes(), pair.dpsi.amplitudes())
}

/// Evolves `initial` for `steps` steps under `map` and records the QFI
/// after each one. `values[0]` is 0 because the input carries no phase.
pub fn qfi_series<S: Evolve>(initial: &S, map: &PhaseMap, phi: f64, steps: usize) -> Result<QfiSeries> {
    qfi_series_ordered(initial, map, phi, steps, PhaseOrder::default())
}

pub fn qfi_series_ordered<S: Evolve>(
    initial: &S,
    map: &PhaseMap,
    phi: f64,
    steps: usize,
    order: PhaseOrder,
) -> Result<QfiSeries> {
    let mut pair = DerivativePair::new(initial.clone());
    let mut values = Vec::with_capacity(steps + 1);
    values.push(qfi_pure(&pair)?);
    for t in 1..=steps {
        let ctx = StepContext::new(phi, t, map)?.with_order(order);
        S::step_with_derivative(&mut pair, &ctx)?;
        values.push(qfi_pure(&pair)?);
    }
    Ok(QfiSeries { values, phi })
}

/// Evolves `initial` for `steps` plain steps at phase `phi`.
pub fn evolve<S: Evolve>(initial: &S, map: &PhaseMap, phi: f64, steps: usize, order: PhaseOrder) -> Result<S> {
    let mut state = initial.clone();
    for t in 1..=steps {
        state.step(&StepContext::new(phi, t, map)?.with_order(order))?;
    }
    Ok(state)
}

/// QFI at step `t` from a central finite difference of the evolved state:
/// `dpsi ~ (psi_t(phi + h) - psi_t(phi - h)) / 2h`.
pub fn qfi_finite_difference<S: Evolve>(initial: &S, map: &PhaseMap, phi: f64, t: usize, h: f64) -> Result<f64> {
    if !(1e-7..=1e-3).contains(&h) {
        return Err(Error::InvalidStepSize(h));
    }
    let order = PhaseOrder::default();
    let centre = evolve(initial, map, phi, t, order)?;
    let plus = evolve(initial, map, phi + h, t, order)?;
    let minus = evolve(initial, map, phi - h, t, order)?;
    let dpsi: Vec<Complex64> = plus
        .amplitudes()
        .iter()
        .zip(minus.amplitudes())
        .map(|(a, b)| (a - b) / (2.0 * h))
        .collect();
    pure_state_formula(centre.amplitudes(), &dpsi)
}

/// Cramér-Rao limit `1 / sqrt(M F)` on the phase uncertainty after
/// `measurements` repetitions; infinite when `F = 0` (phase unidentifiable).
pub fn cramer_rao_bound(fisher: f64, measurements: u64) -> Result<f64> {
    if measurements == 0 {
        return Err(Error::ZeroMeasurements);
    }
    if fisher < 0.0 || fisher.is_nan() {
        return Err(Error::NegativeFisherInformation(fisher));
    }
    if fisher == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(1.0 / (measurements as f64 * fisher).sqrt())
}
