//! Position distributions and position variance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{site_count, State, TwoParticleState, WalkerState, NORM_TOLERANCE};

/// Which walker's marginal to take from a two-walker state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Particle {
    First,
    Second,
}

/// Probability of finding the walker at each site `-t_max..=t_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositionDistribution {
    t_max: usize,
    probabilities: Vec<f64>,
}

impl PositionDistribution {
    /// Wraps raw per-site probabilities (length `2 t_max + 1`).
    pub fn from_probabilities(t_max: usize, probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.len() != site_count(t_max) {
            return Err(Error::CapacityMismatch {
                left: site_count(t_max),
                right: probabilities.len(),
            });
        }
        Ok(PositionDistribution { t_max, probabilities })
    }

    pub fn t_max(&self) -> usize {
        self.t_max
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    /// `p(x)`, zero outside the lattice.
    pub fn probability(&self, x: i64) -> f64 {
        let i = x + self.t_max as i64;
        if i < 0 || i as usize >= self.probabilities.len() {
            0.0
        } else {
            self.probabilities[i as usize]
        }
    }

    /// `(x, p(x))` pairs in increasing `x`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        let t = self.t_max as i64;
        self.probabilities
            .iter()
            .enumerate()
            .map(move |(i, &p)| (i as i64 - t, p))
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.iter().map(|(x, p)| x as f64 * p).sum()
    }

    /// `<X^2> - <X>^2`, clamped at zero against rounding.
    pub fn variance(&self) -> f64 {
        let (m1, m2) = self.iter().fold((0.0, 0.0), |(m1, m2), (x, p)| {
            let x = x as f64;
            (m1 + x * p, m2 + x * x * p)
        });
        (m2 - m1 * m1).max(0.0)
    }
}

fn check_norm(norm_sqr: f64) -> Result<()> {
    if (norm_sqr - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::NotNormalized { norm_sqr });
    }
    Ok(())
}

/// `p(x) = sum_c |psi(x, c)|^2`.
pub fn position_distribution(state: &WalkerState) -> Result<PositionDistribution> {
    check_norm(state.norm_sqr())?;
    let probabilities = state
        .amplitudes()
        .chunks_exact(2)
        .map(|pair| pair[0].norm_sqr() + pair[1].norm_sqr())
        .collect();
    PositionDistribution::from_probabilities(state.t_max(), probabilities)
}

/// Single-walker marginal of a two-walker state.
pub fn marginal_distribution(state: &TwoParticleState, particle: Particle) -> Result<PositionDistribution> {
    check_norm(state.norm_sqr())?;
    let d = state.single_dim();
    let amps = state.amplitudes();
    let mut slot_prob = vec![0.0; d];
    for (i, row) in amps.chunks_exact(d).enumerate() {
        for (j, a) in row.iter().enumerate() {
            let p = a.norm_sqr();
            match particle {
                Particle::First => slot_prob[i] += p,
                Particle::Second => slot_prob[j] += p,
            }
        }
    }
    let probabilities = slot_prob.chunks_exact(2).map(|c| c[0] + c[1]).collect();
    PositionDistribution::from_probabilities(state.t_max(), probabilities)
}

/// Position variance of a distribution.
pub fn position_variance(dist: &PositionDistribution) -> f64 {
    dist.variance()
}
