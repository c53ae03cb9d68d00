//! Walker states on a bounded 1-D lattice.
//!
//! A lattice of capacity `t_max` spans the sites `-t_max..=t_max`. A walk of
//! `t` steps started at the origin never leaves `[-t, t]`, so a capacity equal
//! to the number of steps is exact and the storage never grows.
//!
//! Amplitudes are stored contiguously with the coin as the fastest-varying
//! index: slot `2 * (x + t_max) + coin`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used when checking that an input coin vector or state is normalized.
pub const NORM_TOLERANCE: f64 = 1e-12;

/// Internal (coin) basis state of a walker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Coin {
    Up = 0,
    Down = 1,
}

impl Coin {
    pub const ALL: [Coin; 2] = [Coin::Up, Coin::Down];
}

/// Exchange statistics of a two-walker input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Symmetry {
    Separable,
    Boson,
    Fermion,
}

impl Symmetry {
    /// Sign picked up under particle exchange, `None` for distinguishable walkers.
    pub fn exchange_sign(self) -> Option<f64> {
        match self {
            Symmetry::Separable => None,
            Symmetry::Boson => Some(1.0),
            Symmetry::Fermion => Some(-1.0),
        }
    }
}

/// Common view over single- and two-walker amplitude arrays.
pub trait State: Clone + Send + Sync {
    /// Lattice capacity; sites span `-t_max..=t_max` for every particle.
    fn t_max(&self) -> usize;

    fn amplitudes(&self) -> &[Complex64];

    fn amplitudes_mut(&mut self) -> &mut [Complex64];

    /// A zero vector of identical shape (used as the initial derivative).
    fn zeroed_like(&self) -> Self;

    fn norm_sqr(&self) -> f64 {
        self.amplitudes().iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`, antilinear in `self`.
    fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.t_max() != other.t_max() {
            return Err(Error::CapacityMismatch {
                left: self.t_max(),
                right: other.t_max(),
            });
        }
        Ok(inner_slices(self.amplitudes(), other.amplitudes()))
    }

    /// Multiplies every amplitude by `exp(i theta)`.
    fn apply_global_phase(&mut self, theta: f64) {
        let factor = Complex64::from_polar(1.0, theta);
        for a in self.amplitudes_mut() {
            *a *= factor;
        }
    }
}

pub(crate) fn inner_slices(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Number of lattice sites for capacity `t_max`.
pub fn site_count(t_max: usize) -> usize {
    2 * t_max + 1
}

fn check_coin_norm(coin: &[Complex64; 2]) -> Result<()> {
    let norm_sqr = coin[0].norm_sqr() + coin[1].norm_sqr();
    if (norm_sqr - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::NotNormalized { norm_sqr });
    }
    Ok(())
}

/// Pure state of one walker, `sum_x sum_c a(x, c) |x>|c>`.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkerState {
    t_max: usize,
    amps: Vec<Complex64>,
}

impl WalkerState {
    /// All-zero amplitude array (not a physical state; used for derivatives).
    pub fn zeros(t_max: usize) -> Self {
        WalkerState {
            t_max,
            amps: vec![Complex64::new(0.0, 0.0); 2 * site_count(t_max)],
        }
    }

    /// Walker localized at `position` with coin amplitudes `(up, down)`.
    pub fn new(position: i64, coin: [Complex64; 2], t_max: usize) -> Result<Self> {
        check_coin_norm(&coin)?;
        let mut state = WalkerState::zeros(t_max);
        let up = state
            .index(position, Coin::Up)
            .ok_or(Error::PositionOutOfBounds { position, t_max })?;
        state.amps[up] = coin[0];
        state.amps[up + 1] = coin[1];
        Ok(state)
    }

    /// Builds a state from a raw amplitude vector in the crate's layout.
    pub fn from_amplitudes(t_max: usize, amps: Vec<Complex64>) -> Result<Self> {
        let expected = 2 * site_count(t_max);
        if amps.len() != expected {
            return Err(Error::CapacityMismatch {
                left: expected,
                right: amps.len(),
            });
        }
        Ok(WalkerState { t_max, amps })
    }

    /// Flat slot of `(x, coin)`, `None` outside the lattice.
    pub fn index(&self, x: i64, coin: Coin) -> Option<usize> {
        let t = self.t_max as i64;
        if x < -t || x > t {
            return None;
        }
        Some(2 * (x + t) as usize + coin as usize)
    }

    /// Amplitude at `(x, coin)`; zero outside the lattice.
    pub fn amplitude(&self, x: i64, coin: Coin) -> Complex64 {
        self.index(x, coin).map_or(Complex64::new(0.0, 0.0), |i| self.amps[i])
    }

    pub fn set_amplitude(&mut self, x: i64, coin: Coin, value: Complex64) -> Result<()> {
        let i = self.index(x, coin).ok_or(Error::PositionOutOfBounds {
            position: x,
            t_max: self.t_max,
        })?;
        self.amps[i] = value;
        Ok(())
    }

    pub fn positions(&self) -> std::ops::RangeInclusive<i64> {
        -(self.t_max as i64)..=self.t_max as i64
    }

    /// Largest `|x|` carrying a nonzero amplitude, `None` for the zero vector.
    pub fn support_radius(&self) -> Option<usize> {
        let t = self.t_max as i64;
        self.amps
            .chunks_exact(2)
            .enumerate()
            .filter(|(_, pair)| pair[0] != Complex64::new(0.0, 0.0) || pair[1] != Complex64::new(0.0, 0.0))
            .map(|(site, _)| (site as i64 - t).unsigned_abs() as usize)
            .max()
    }
}

impl State for WalkerState {
    fn t_max(&self) -> usize {
        self.t_max
    }

    fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    fn zeroed_like(&self) -> Self {
        WalkerState::zeros(self.t_max)
    }
}

/// Dense first-quantized state of two walkers, indexed `(x1, c1, x2, c2)`.
///
/// Stored as a `D x D` row-major matrix where `D = 2 (2 t_max + 1)` is the
/// single-walker dimension: rows belong to walker 1, columns to walker 2.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoParticleState {
    t_max: usize,
    symmetry: Symmetry,
    amps: Vec<Complex64>,
}

impl TwoParticleState {
    /// Both walkers at the origin with opposite coins: `|0 up> (x) |0 down>`
    /// for the separable input, `(|up down> +- |down up>)/sqrt 2` otherwise.
    pub fn new(symmetry: Symmetry, t_max: usize) -> Result<Self> {
        if t_max == 0 {
            return Err(Error::ZeroCapacity);
        }
        let mut state = TwoParticleState::zeros(symmetry, t_max);
        match symmetry.exchange_sign() {
            None => state.set(0, Coin::Up, 0, Coin::Down, Complex64::new(1.0, 0.0)),
            Some(sign) => {
                let h = std::f64::consts::FRAC_1_SQRT_2;
                state.set(0, Coin::Up, 0, Coin::Down, Complex64::new(h, 0.0));
                state.set(0, Coin::Down, 0, Coin::Up, Complex64::new(sign * h, 0.0));
            }
        }
        Ok(state)
    }

    /// Product state `a (x) b`, tagged separable.
    pub fn product(a: &WalkerState, b: &WalkerState) -> Result<Self> {
        if a.t_max() != b.t_max() {
            return Err(Error::CapacityMismatch {
                left: a.t_max(),
                right: b.t_max(),
            });
        }
        let amps = a
            .amplitudes()
            .iter()
            .flat_map(|x| b.amplitudes().iter().map(move |y| x * y))
            .collect();
        Ok(TwoParticleState {
            t_max: a.t_max(),
            symmetry: Symmetry::Separable,
            amps,
        })
    }

    pub fn zeros(symmetry: Symmetry, t_max: usize) -> Self {
        let d = 2 * site_count(t_max);
        TwoParticleState {
            t_max,
            symmetry,
            amps: vec![Complex64::new(0.0, 0.0); d * d],
        }
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    /// Dimension of one walker's Hilbert space.
    pub fn single_dim(&self) -> usize {
        2 * site_count(self.t_max)
    }

    fn slot(&self, x: i64, coin: Coin) -> Option<usize> {
        let t = self.t_max as i64;
        (-t..=t).contains(&x).then(|| 2 * (x + t) as usize + coin as usize)
    }

    pub fn amplitude(&self, x1: i64, c1: Coin, x2: i64, c2: Coin) -> Complex64 {
        match (self.slot(x1, c1), self.slot(x2, c2)) {
            (Some(i), Some(j)) => self.amps[i * self.single_dim() + j],
            _ => Complex64::new(0.0, 0.0),
        }
    }

    fn set(&mut self, x1: i64, c1: Coin, x2: i64, c2: Coin, value: Complex64) {
        let i = self.slot(x1, c1).expect("site inside lattice");
        let j = self.slot(x2, c2).expect("site inside lattice");
        let d = self.single_dim();
        self.amps[i * d + j] = value;
    }

    /// Largest `|a(i, j) - s a(j, i)|` where `s` is the exchange sign;
    /// `None` for separable inputs, which carry no exchange constraint.
    pub fn exchange_residual(&self) -> Option<f64> {
        let sign = self.symmetry.exchange_sign()?;
        let d = self.single_dim();
        let mut worst = 0.0_f64;
        for i in 0..d {
            for j in i..d {
                let r = (self.amps[i * d + j] - self.amps[j * d + i] * sign).norm();
                worst = worst.max(r);
            }
        }
        Some(worst)
    }
}

impl State for TwoParticleState {
    fn t_max(&self) -> usize {
        self.t_max
    }

    fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    fn zeroed_like(&self) -> Self {
        TwoParticleState::zeros(self.symmetry, self.t_max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn origin_up_state_has_unit_norm() {
        let s = WalkerState::new(0, [c(1.0, 0.0), c(0.0, 0.0)], 50).unwrap();
        assert_eq!(s.amplitudes().len(), 2 * 101);
        assert_eq!(s.amplitude(0, Coin::Up), c(1.0, 0.0));
        assert_eq!(s.norm_sqr(), 1.0);
        assert_eq!(s.support_radius(), Some(0));
    }

    #[test]
    fn balanced_coin_state() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = WalkerState::new(0, [c(h, 0.0), c(h, 0.0)], 50).unwrap();
        assert_eq!(s.amplitude(0, Coin::Down), c(h, 0.0));
        assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_unnormalized_coin() {
        let err = WalkerState::new(0, [c(1.0, 0.0), c(1.0, 0.0)], 50).unwrap_err();
        assert!(matches!(err, Error::NotNormalized { .. }));
    }

    #[test]
    fn rejects_position_outside_lattice() {
        let err = WalkerState::new(6, [c(1.0, 0.0), c(0.0, 0.0)], 5).unwrap_err();
        assert_eq!(err, Error::PositionOutOfBounds { position: 6, t_max: 5 });
        assert!(WalkerState::new(-5, [c(1.0, 0.0), c(0.0, 0.0)], 5).is_ok());
    }

    #[test]
    fn inner_product_basics() {
        let up = WalkerState::new(0, [c(1.0, 0.0), c(0.0, 0.0)], 3).unwrap();
        let down = WalkerState::new(0, [c(0.0, 0.0), c(1.0, 0.0)], 3).unwrap();
        assert_eq!(up.inner(&up).unwrap(), c(1.0, 0.0));
        assert_eq!(up.inner(&down).unwrap(), c(0.0, 0.0));

        let a = WalkerState::new(1, [c(0.6, 0.0), c(0.0, 0.8)], 3).unwrap();
        let b = WalkerState::new(1, [c(0.0, 1.0), c(0.0, 0.0)], 3).unwrap();
        assert_eq!(a.inner(&b).unwrap(), b.inner(&a).unwrap().conj());

        let other = WalkerState::zeros(4);
        assert_eq!(
            up.inner(&other).unwrap_err(),
            Error::CapacityMismatch { left: 3, right: 4 }
        );
    }

    #[test]
    fn separable_two_particle_input() {
        let s = TwoParticleState::new(Symmetry::Separable, 20).unwrap();
        assert_eq!(s.amplitude(0, Coin::Up, 0, Coin::Down), c(1.0, 0.0));
        assert_eq!(s.amplitude(0, Coin::Down, 0, Coin::Up), c(0.0, 0.0));
        assert_eq!(s.norm_sqr(), 1.0);
        assert_eq!(s.exchange_residual(), None);
    }

    #[test]
    fn symmetrized_two_particle_inputs() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let b = TwoParticleState::new(Symmetry::Boson, 20).unwrap();
        assert_eq!(b.amplitude(0, Coin::Up, 0, Coin::Down), c(h, 0.0));
        assert_eq!(b.amplitude(0, Coin::Down, 0, Coin::Up), c(h, 0.0));
        assert_eq!(b.exchange_residual(), Some(0.0));

        let f = TwoParticleState::new(Symmetry::Fermion, 20).unwrap();
        assert_eq!(f.amplitude(0, Coin::Up, 0, Coin::Down), c(h, 0.0));
        assert_eq!(f.amplitude(0, Coin::Down, 0, Coin::Up), c(-h, 0.0));
        assert_eq!(f.exchange_residual(), Some(0.0));
        assert!((f.norm_sqr() - 1.0).abs() < 1e-15);
        assert_eq!(f.amplitude(0, Coin::Up, 0, Coin::Up), c(0.0, 0.0));
    }

    #[test]
    fn zero_capacity_two_particle_rejected() {
        assert_eq!(
            TwoParticleState::new(Symmetry::Boson, 0).unwrap_err(),
            Error::ZeroCapacity
        );
    }

    #[test]
    fn product_matches_separable_constructor() {
        let up = WalkerState::new(0, [c(1.0, 0.0), c(0.0, 0.0)], 4).unwrap();
        let down = WalkerState::new(0, [c(0.0, 0.0), c(1.0, 0.0)], 4).unwrap();
        let p = TwoParticleState::product(&up, &down).unwrap();
        assert_eq!(p, TwoParticleState::new(Symmetry::Separable, 4).unwrap());
    }
}
