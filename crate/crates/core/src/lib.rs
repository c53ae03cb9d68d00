//! Disordered discrete-time quantum walks on a line.
//!
//! A walker with a two-level coin evolves under `U(phi) = S (I (x) C) P`,
//! where `P` imprints the phase `phi` on the up coin state together with a
//! disorder fluctuation `dphi(t, x) in {0, pi}`. The crate evolves single and
//! two-walker states, co-evolves the `phi`-derivative to obtain the quantum
//! Fisher information at every step, averages over disorder realizations and
//! fits spreading exponents.
//!
//! ```
//! use qwalk::{disorder::PhaseMap, hilbert::WalkerState, metrology::qfi_series};
//! use num_complex::Complex64;
//!
//! let up = WalkerState::new(0, [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)], 10).unwrap();
//! let map = PhaseMap::ordered(10).unwrap();
//! let qfi = qfi_series(&up, &map, 0.0, 10).unwrap();
//! assert!((qfi.values[2] - 1.0).abs() < 1e-12);
//! ```

pub mod analysis;
pub mod disorder;
pub mod ensemble;
pub mod error;
pub mod hilbert;
pub mod metrology;
pub mod observables;
pub mod operators;
pub mod twoparticle;

pub use error::{Error, Result};
