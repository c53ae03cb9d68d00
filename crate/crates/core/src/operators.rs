//! Coin, shift and phase-shift unitaries and the composed walk step
//! `U(phi) = S (I (x) C) P`, together with its `phi`-derivative.
//!
//! All kernels act in place on the flat amplitude layout of
//! [`WalkerState`]; two-walker states reuse them row by row.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_1_SQRT_2;

use crate::disorder::PhaseMap;
use crate::error::{Error, Result};
use crate::hilbert::{site_count, State, TwoParticleState, WalkerState};
use crate::metrology::DerivativePair;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Where the phase-shift operator sits within one step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseOrder {
    /// `U = S (I (x) C) P`: phase first, then coin, then shift.
    #[default]
    BeforeCoin,
    /// `U = P S (I (x) C)`: phase applied once the walker has moved.
    /// Only meant for sensitivity checks.
    AfterShift,
}

/// Everything a single step needs besides the state itself.
#[derive(Debug, Clone, Copy)]
pub struct StepContext<'a> {
    pub phi: f64,
    /// 1-based step number `t`.
    pub step: usize,
    pub map: &'a PhaseMap,
    pub order: PhaseOrder,
}

impl<'a> StepContext<'a> {
    pub fn new(phi: f64, step: usize, map: &'a PhaseMap) -> Result<Self> {
        map.row(step)?;
        Ok(StepContext {
            phi,
            step,
            map,
            order: PhaseOrder::default(),
        })
    }

    pub fn with_order(mut self, order: PhaseOrder) -> Self {
        self.order = order;
        self
    }

    fn row(&self) -> Result<&'a [bool]> {
        self.map.row(self.step)
    }
}

/// Evolution by one walk step, plain or co-evolved with the derivative.
pub trait Evolve: State {
    fn step(&mut self, ctx: &StepContext<'_>) -> Result<()>;

    fn step_with_derivative(pair: &mut DerivativePair<Self>, ctx: &StepContext<'_>) -> Result<()>;
}

fn coin_kernel(buf: &mut [Complex64]) {
    for pair in buf.chunks_exact_mut(2) {
        let (up, down) = (pair[0], pair[1]);
        pair[0] = (up + down) * FRAC_1_SQRT_2;
        pair[1] = (up - down) * FRAC_1_SQRT_2;
    }
}

fn shift_kernel(buf: &mut [Complex64], t_max: usize) -> Result<()> {
    let n = site_count(t_max);
    let last = 2 * (n - 1);
    if buf[0] != ZERO || buf[1] != ZERO || buf[last] != ZERO || buf[last + 1] != ZERO {
        return Err(Error::BoundaryContact { t_max });
    }
    for site in (1..n).rev() {
        buf[2 * site] = buf[2 * (site - 1)];
    }
    buf[0] = ZERO;
    for site in 0..n - 1 {
        buf[2 * site + 1] = buf[2 * (site + 1) + 1];
    }
    buf[last + 1] = ZERO;
    Ok(())
}

/// Multiplies up amplitudes by `exp(i(phi + dphi(t, x)))`, with the pi
/// fluctuation realized as an exact sign flip.
fn phase_kernel(buf: &mut [Complex64], t_max: usize, row: &[bool], factor: Complex64) {
    let offset = (row.len() as i64 - 1) / 2 - t_max as i64;
    for (site, pair) in buf.chunks_exact_mut(2).enumerate() {
        let m = site as i64 + offset;
        let flip = m >= 0 && (m as usize) < row.len() && row[m as usize];
        pair[0] *= if flip { -factor } else { factor };
    }
}

/// `dpsi_up += i psi_up`, the `dP/dphi` contribution once both vectors carry `P`.
fn phase_derivative_kernel(psi: &[Complex64], dpsi: &mut [Complex64]) {
    for (d, p) in dpsi.chunks_exact_mut(2).zip(psi.chunks_exact(2)) {
        d[0] += I * p[0];
    }
}

fn step_kernel(buf: &mut [Complex64], t_max: usize, row: &[bool], ctx: &StepContext<'_>) -> Result<()> {
    let factor = Complex64::from_polar(1.0, ctx.phi);
    match ctx.order {
        PhaseOrder::BeforeCoin => {
            phase_kernel(buf, t_max, row, factor);
            coin_kernel(buf);
            shift_kernel(buf, t_max)
        }
        PhaseOrder::AfterShift => {
            coin_kernel(buf);
            shift_kernel(buf, t_max)?;
            phase_kernel(buf, t_max, row, factor);
            Ok(())
        }
    }
}

fn step_pair_kernel(
    psi: &mut [Complex64],
    dpsi: &mut [Complex64],
    t_max: usize,
    row: &[bool],
    ctx: &StepContext<'_>,
) -> Result<()> {
    let factor = Complex64::from_polar(1.0, ctx.phi);
    match ctx.order {
        PhaseOrder::BeforeCoin => {
            phase_kernel(psi, t_max, row, factor);
            phase_kernel(dpsi, t_max, row, factor);
            phase_derivative_kernel(psi, dpsi);
            coin_kernel(psi);
            coin_kernel(dpsi);
            shift_kernel(psi, t_max)?;
            shift_kernel(dpsi, t_max)
        }
        PhaseOrder::AfterShift => {
            coin_kernel(psi);
            coin_kernel(dpsi);
            shift_kernel(psi, t_max)?;
            shift_kernel(dpsi, t_max)?;
            phase_kernel(psi, t_max, row, factor);
            phase_kernel(dpsi, t_max, row, factor);
            phase_derivative_kernel(psi, dpsi);
            Ok(())
        }
    }
}

/// Hadamard coin on every site: `(a_up, a_down) -> ((a_up + a_down), (a_up - a_down)) / sqrt 2`.
pub fn apply_coin(state: &mut WalkerState) {
    coin_kernel(state.amplitudes_mut());
}

/// Moves up amplitudes one site right and down amplitudes one site left.
///
/// Fails if any amplitude sits on the outermost sites, since the shifted
/// state would leave the lattice.
pub fn apply_shift(state: &mut WalkerState) -> Result<()> {
    let t_max = state.t_max();
    shift_kernel(state.amplitudes_mut(), t_max)
}

/// Phase-shift operator `P` for step `ctx.step`.
pub fn apply_phase(state: &mut WalkerState, ctx: &StepContext<'_>) -> Result<()> {
    let row = ctx.row()?;
    let t_max = state.t_max();
    phase_kernel(state.amplitudes_mut(), t_max, row, Complex64::from_polar(1.0, ctx.phi));
    Ok(())
}

/// One walk step in place.
pub fn step(state: &mut WalkerState, ctx: &StepContext<'_>) -> Result<()> {
    let row = ctx.row()?;
    let t_max = state.t_max();
    step_kernel(state.amplitudes_mut(), t_max, row, ctx)
}

/// Advances `(psi, dpsi)` by one step using
/// `dpsi_t = (dU/dphi) psi_{t-1} + U dpsi_{t-1}`.
pub fn step_with_derivative(pair: &mut DerivativePair<WalkerState>, ctx: &StepContext<'_>) -> Result<()> {
    let row = ctx.row()?;
    let t_max = pair.psi.t_max();
    step_pair_kernel(pair.psi.amplitudes_mut(), pair.dpsi.amplitudes_mut(), t_max, row, ctx)
}

fn transpose(buf: &mut [Complex64], d: usize, scratch: &mut Vec<Complex64>) {
    scratch.clear();
    scratch.extend_from_slice(buf);
    for i in 0..d {
        for j in 0..d {
            buf[j * d + i] = scratch[i * d + j];
        }
    }
}

/// Applies `U(phi) (x) U(phi)` with both walkers seeing the same phase map.
pub fn two_particle_step(state: &mut TwoParticleState, ctx: &StepContext<'_>) -> Result<()> {
    let row = ctx.row()?;
    let t_max = state.t_max();
    let d = state.single_dim();
    let buf = state.amplitudes_mut();
    let mut scratch = Vec::with_capacity(d * d);
    // Rows hold walker 2; transposing exposes walker 1 as rows.
    for _ in 0..2 {
        for r in buf.chunks_exact_mut(d) {
            step_kernel(r, t_max, row, ctx)?;
        }
        transpose(buf, d, &mut scratch);
    }
    Ok(())
}

/// Two-walker step with derivative, via the product rule on `U (x) U`.
pub fn two_particle_step_with_derivative(
    pair: &mut DerivativePair<TwoParticleState>,
    ctx: &StepContext<'_>,
) -> Result<()> {
    let row = ctx.row()?;
    let t_max = pair.psi.t_max();
    let d = pair.psi.single_dim();
    let mut scratch = Vec::with_capacity(d * d);
    for _ in 0..2 {
        let psi = pair.psi.amplitudes_mut();
        let dpsi = pair.dpsi.amplitudes_mut();
        for (p, dp) in psi.chunks_exact_mut(d).zip(dpsi.chunks_exact_mut(d)) {
            step_pair_kernel(p, dp, t_max, row, ctx)?;
        }
        transpose(psi, d, &mut scratch);
        transpose(dpsi, d, &mut scratch);
    }
    Ok(())
}

impl Evolve for WalkerState {
    fn step(&mut self, ctx: &StepContext<'_>) -> Result<()> {
        step(self, ctx)
    }

    fn step_with_derivative(pair: &mut DerivativePair<Self>, ctx: &StepContext<'_>) -> Result<()> {
        step_with_derivative(pair, ctx)
    }
}

impl Evolve for TwoParticleState {
    fn step(&mut self, ctx: &StepContext<'_>) -> Result<()> {
        two_particle_step(self, ctx)
    }

    fn step_with_derivative(pair: &mut DerivativePair<Self>, ctx: &StepContext<'_>) -> Result<()> {
        two_particle_step_with_derivative(pair, ctx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disorder::{generate_map, DisorderKind, Semantics};
    use crate::hilbert::{Coin, Symmetry};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn up(t_max: usize) -> WalkerState {
        WalkerState::new(0, [c(1.0, 0.0), c(0.0, 0.0)], t_max).unwrap()
    }

    fn down(t_max: usize) -> WalkerState {
        WalkerState::new(0, [c(0.0, 0.0), c(1.0, 0.0)], t_max).unwrap()
    }

    fn assert_close(a: Complex64, b: Complex64, tol: f64) {
        assert!((a - b).norm() < tol, "{a} vs {b}");
    }

    #[test]
    fn coin_on_basis_states() {
        let h = FRAC_1_SQRT_2;
        let mut s = up(2);
        apply_coin(&mut s);
        assert_eq!(s.amplitude(0, Coin::Up), c(h, 0.0));
        assert_eq!(s.amplitude(0, Coin::Down), c(h, 0.0));

        let mut s = down(2);
        apply_coin(&mut s);
        assert_eq!(s.amplitude(0, Coin::Up), c(h, 0.0));
        assert_eq!(s.amplitude(0, Coin::Down), c(-h, 0.0));
    }

    #[test]
    fn shift_moves_by_coin() {
        let mut s = up(2);
        apply_shift(&mut s).unwrap();
        assert_eq!(s.amplitude(1, Coin::Up), c(1.0, 0.0));
        assert_eq!(s.norm_sqr(), 1.0);

        let mut s = down(2);
        apply_shift(&mut s).unwrap();
        assert_eq!(s.amplitude(-1, Coin::Down), c(1.0, 0.0));
        assert_eq!(s.norm_sqr(), 1.0);
    }

    #[test]
    fn shift_at_boundary_is_an_error() {
        let mut s = WalkerState::new(-2, [c(0.0, 0.0), c(1.0, 0.0)], 2).unwrap();
        assert_eq!(apply_shift(&mut s).unwrap_err(), Error::BoundaryContact { t_max: 2 });
        let mut s = WalkerState::new(2, [c(0.0, 0.0), c(1.0, 0.0)], 2).unwrap();
        assert!(apply_shift(&mut s).is_err());
    }

    #[test]
    fn phase_operator_cases() {
        let ordered = PhaseMap::ordered(3).unwrap();
        let ctx = StepContext::new(0.0, 1, &ordered).unwrap();
        let mut s = WalkerState::new(1, [c(0.6, 0.0), c(0.0, 0.8)], 3).unwrap();
        let before = s.clone();
        apply_phase(&mut s, &ctx).unwrap();
        assert_eq!(s, before);

        let flipped = PhaseMap::from_json(
            r#"{"kind":"dynamic","p":1.0,"T":1,"semantics":"exact-pi-fraction","seed":0,"entries":[1,1,1]}"#,
        )
        .unwrap();
        let phi = 0.3;
        let ctx = StepContext::new(phi, 1, &flipped).unwrap();
        let mut s = WalkerState::new(0, [c(0.6, 0.0), c(0.0, 0.8)], 1).unwrap();
        apply_phase(&mut s, &ctx).unwrap();
        assert_close(s.amplitude(0, Coin::Up), -Complex64::from_polar(1.0, phi) * 0.6, 1e-15);
        assert_eq!(s.amplitude(0, Coin::Down), c(0.0, 0.8));
    }

    #[test]
    fn one_ordered_step() {
        let h = FRAC_1_SQRT_2;
        let map = PhaseMap::ordered(1).unwrap();
        let mut s = up(1);
        step(&mut s, &StepContext::new(0.0, 1, &map).unwrap()).unwrap();
        assert_eq!(s.amplitude(1, Coin::Up), c(h, 0.0));
        assert_eq!(s.amplitude(-1, Coin::Down), c(h, 0.0));
        assert_eq!(s.amplitude(0, Coin::Up), c(0.0, 0.0));
    }

    #[test]
    fn step_equals_composed_primitives() {
        let map = generate_map(DisorderKind::Dynamic, 12, 1.0, Semantics::BernoulliUniform, 5).unwrap();
        let mut a = WalkerState::new(0, [c(0.6, 0.0), c(0.0, 0.8)], 12).unwrap();
        let mut b = a.clone();
        for t in 1..=12 {
            let ctx = StepContext::new(0.7, t, &map).unwrap();
            step(&mut a, &ctx).unwrap();
            apply_phase(&mut b, &ctx).unwrap();
            apply_coin(&mut b);
            apply_shift(&mut b).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn derivative_first_step_is_i_psi() {
        let h = FRAC_1_SQRT_2;
        let map = PhaseMap::ordered(2).unwrap();
        let mut pair = DerivativePair::new(up(2));
        step_with_derivative(&mut pair, &StepContext::new(0.0, 1, &map).unwrap()).unwrap();
        assert_eq!(pair.dpsi.amplitude(1, Coin::Up), c(0.0, h));
        assert_eq!(pair.dpsi.amplitude(-1, Coin::Down), c(0.0, h));
        assert_close(pair.psi.inner(&pair.dpsi).unwrap(), c(0.0, 1.0), 1e-15);
    }

    #[test]
    fn derivative_second_step_hand_values() {
        let map = PhaseMap::ordered(2).unwrap();
        let mut pair = DerivativePair::new(up(2));
        for t in 1..=2 {
            step_with_derivative(&mut pair, &StepContext::new(0.0, t, &map).unwrap()).unwrap();
        }
        let d = &pair.dpsi;
        assert_close(d.amplitude(2, Coin::Up), c(0.0, 1.0), 1e-15);
        assert_close(d.amplitude(0, Coin::Down), c(0.0, 1.0), 1e-15);
        assert_close(d.amplitude(0, Coin::Up), c(0.0, 0.5), 1e-15);
        assert_close(d.amplitude(-2, Coin::Down), c(0.0, -0.5), 1e-15);
        assert_close(d.inner(d).unwrap(), c(2.5, 0.0), 1e-15);
        assert_close(pair.psi.inner(d).unwrap(), c(0.0, 1.5), 1e-15);
    }

    #[test]
    fn derivative_psi_matches_plain_step_bitwise() {
        for order in [PhaseOrder::BeforeCoin, PhaseOrder::AfterShift] {
            let map = generate_map(DisorderKind::Static, 20, 1.0, Semantics::BernoulliUniform, 9).unwrap();
            let mut plain = up(20);
            let mut pair = DerivativePair::new(up(20));
            for t in 1..=20 {
                let ctx = StepContext::new(0.4, t, &map).unwrap().with_order(order);
                step(&mut plain, &ctx).unwrap();
                step_with_derivative(&mut pair, &ctx).unwrap();
                assert_eq!(plain, pair.psi);
            }
        }
    }

    #[test]
    fn step_outside_map_range_rejected() {
        let map = PhaseMap::ordered(3).unwrap();
        assert!(StepContext::new(0.0, 4, &map).is_err());
        assert!(StepContext::new(0.0, 0, &map).is_err());
    }

    #[test]
    fn separable_two_particle_step_factorizes() {
        let map = generate_map(DisorderKind::Dynamic, 6, 1.0, Semantics::BernoulliUniform, 3).unwrap();
        let mut a = up(6);
        let mut b = down(6);
        let mut joint = TwoParticleState::new(Symmetry::Separable, 6).unwrap();
        for t in 1..=6 {
            let ctx = StepContext::new(0.9, t, &map).unwrap();
            step(&mut a, &ctx).unwrap();
            step(&mut b, &ctx).unwrap();
            two_particle_step(&mut joint, &ctx).unwrap();
            let product = TwoParticleState::product(&a, &b).unwrap();
            for (x, y) in joint.amplitudes().iter().zip(product.amplitudes()) {
                assert!((x - y).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn exchange_symmetry_survives_steps() {
        let map = generate_map(DisorderKind::Dynamic, 10, 0.5, Semantics::BernoulliUniform, 8).unwrap();
        for sym in [Symmetry::Boson, Symmetry::Fermion] {
            let mut s = TwoParticleState::new(sym, 10).unwrap();
            for t in 1..=10 {
                two_particle_step(&mut s, &StepContext::new(0.2, t, &map).unwrap()).unwrap();
                assert!(s.exchange_residual().unwrap() < 1e-12);
                assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
            }
        }
    }
}
