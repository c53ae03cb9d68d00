//! Reference evolution written straight from the operator definitions,
//! sharing no code with the library's in-place kernels.

#![allow(dead_code)]

use std::collections::BTreeMap;

use num_complex::Complex64;
use qwalk::disorder::PhaseMap;
use qwalk::hilbert::{Coin, WalkerState};

pub type Amps = BTreeMap<(i64, u8), Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn basis(x: i64, coin: u8) -> Amps {
    let mut m = Amps::new();
    m.insert((x, coin), c(1.0, 0.0));
    m
}

/// One step `S (I (x) C) P` at phase `phi`, step `t`, as sums over basis kets.
pub fn reference_step(psi: &Amps, map: &PhaseMap, t: usize, phi: f64) -> Amps {
    let h = 1.0 / 2f64.sqrt();
    let mut out = Amps::new();
    for (&(x, coin), &a) in psi {
        // P: e^{i(phi + dphi)} on |up>, identity on |down>.
        let a = if coin == 0 {
            a * Complex64::from_polar(1.0, phi + map.phase(t, x).unwrap())
        } else {
            a
        };
        // C: |up> -> (|up> + |down>)/sqrt2, |down> -> (|up> - |down>)/sqrt2.
        let (to_up, to_down) = if coin == 0 { (a * h, a * h) } else { (a * h, -a * h) };
        // S: |x, up> -> |x+1, up>, |x, down> -> |x-1, down>.
        *out.entry((x + 1, 0)).or_insert(c(0.0, 0.0)) += to_up;
        *out.entry((x - 1, 1)).or_insert(c(0.0, 0.0)) += to_down;
    }
    out
}

pub fn reference_evolve(psi0: &Amps, map: &PhaseMap, steps: usize, phi: f64) -> Amps {
    (1..=steps).fold(psi0.clone(), |psi, t| reference_step(&psi, map, t, phi))
}

/// Central finite-difference derivative of the reference evolution.
pub fn reference_derivative(psi0: &Amps, map: &PhaseMap, steps: usize, phi: f64, h: f64) -> Amps {
    let plus = reference_evolve(psi0, map, steps, phi + h);
    let minus = reference_evolve(psi0, map, steps, phi - h);
    let mut out = Amps::new();
    for (k, v) in &plus {
        let m = minus.get(k).copied().unwrap_or(c(0.0, 0.0));
        out.insert(*k, (v - m) / (2.0 * h));
    }
    out
}

pub fn reference_qfi(psi: &Amps, dpsi: &Amps) -> f64 {
    let dd: f64 = dpsi.values().map(|a| a.norm_sqr()).sum();
    let overlap: Complex64 = psi
        .iter()
        .map(|(k, a)| a.conj() * dpsi.get(k).copied().unwrap_or(c(0.0, 0.0)))
        .sum();
    4.0 * (dd - overlap.norm_sqr())
}

pub fn amplitude(state: &WalkerState, x: i64, coin: u8) -> Complex64 {
    state.amplitude(x, if coin == 0 { Coin::Up } else { Coin::Down })
}

/// Largest componentwise gap between a library state and a reference state.
pub fn max_gap(state: &WalkerState, reference: &Amps) -> f64 {
    let mut worst = 0.0_f64;
    for x in state.positions() {
        for coin in 0..2u8 {
            let r = reference.get(&(x, coin)).copied().unwrap_or(c(0.0, 0.0));
            worst = worst.max((amplitude(state, x, coin) - r).norm());
        }
    }
    worst
}
