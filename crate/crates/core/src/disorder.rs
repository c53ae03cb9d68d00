//! Coherent phase disorder: realizations of the fluctuation table
//! `dphi(t, x) in {0, pi}` for static and dynamic disorder.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DisorderKind {
    /// Ordered walk, every fluctuation is zero.
    None,
    /// Fluctuations frozen in time: one row of phases reused at every step.
    Static,
    /// Fluctuations drawn independently for every (step, site) cell.
    Dynamic,
}

/// How the disorder degree `p` turns into phase fluctuations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Semantics {
    /// Each cell (dynamic) or column (static) is randomized with probability
    /// `p`; a randomized cell takes 0 or pi with equal probability.
    #[default]
    BernoulliUniform,
    /// Exactly `floor(p N)` cells, chosen uniformly without replacement, are pi.
    ExactPiFraction,
}

/// One disorder realization over steps `1..=steps` and sites `-steps..=steps`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "PhaseMapRecord", try_from = "PhaseMapRecord")]
pub struct PhaseMap {
    kind: DisorderKind,
    p: f64,
    steps: usize,
    semantics: Semantics,
    seed: u64,
    /// Row-major `(t - 1, x + steps)`; `true` means a pi fluctuation.
    entries: Vec<bool>,
}

/// Wire form of a phase map: entries are a flat row-major 0/1 array, 1 = pi.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PhaseMapRecord {
    kind: DisorderKind,
    p: f64,
    #[serde(rename = "T")]
    steps: usize,
    semantics: Semantics,
    seed: u64,
    entries: Vec<u8>,
}

impl From<PhaseMap> for PhaseMapRecord {
    fn from(map: PhaseMap) -> Self {
        PhaseMapRecord {
            kind: map.kind,
            p: map.p,
            steps: map.steps,
            semantics: map.semantics,
            seed: map.seed,
            entries: map.entries.iter().map(|&pi| u8::from(pi)).collect(),
        }
    }
}

impl TryFrom<PhaseMapRecord> for PhaseMap {
    type Error = Error;

    fn try_from(rec: PhaseMapRecord) -> Result<Self> {
        check_degree(rec.p)?;
        if rec.steps == 0 {
            return Err(Error::EmptyPhaseMap);
        }
        let width = 2 * rec.steps + 1;
        if rec.entries.len() != rec.steps * width {
            return Err(Error::MalformedPhaseMap(format!(
                "expected {} entries, found {}",
                rec.steps * width,
                rec.entries.len()
            )));
        }
        let entries = rec
            .entries
            .iter()
            .map(|&v| match v {
                0 => Ok(false),
                1 => Ok(true),
                other => Err(Error::MalformedPhaseMap(format!("entry {other} is neither 0 nor 1"))),
            })
            .collect::<Result<Vec<_>>>()?;
        let map = PhaseMap {
            kind: rec.kind,
            p: rec.p,
            steps: rec.steps,
            semantics: rec.semantics,
            seed: rec.seed,
            entries,
        };
        match map.kind {
            DisorderKind::None if map.entries.iter().any(|&e| e) => {
                Err(Error::MalformedPhaseMap("ordered map carries pi entries".into()))
            }
            DisorderKind::Static if !map.is_frozen() => {
                Err(Error::MalformedPhaseMap("static map varies in time".into()))
            }
            _ => Ok(map),
        }
    }
}

fn check_degree(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidDisorderDegree(p));
    }
    Ok(())
}

/// Number of pi cells under the exact-fraction rule; the small guard keeps
/// products like `0.29 * 100` from flooring one below the intended count.
fn exact_count(p: f64, cells: usize) -> usize {
    ((p * cells as f64) + 1e-9).floor().min(cells as f64) as usize
}

fn draw_row(rng: &mut ChaCha8Rng, len: usize, p: f64, semantics: Semantics) -> Vec<bool> {
    match semantics {
        Semantics::BernoulliUniform => (0..len).map(|_| rng.random_bool(p) && rng.random_bool(0.5)).collect(),
        Semantics::ExactPiFraction => {
            let mut row = vec![false; len];
            for i in index::sample(rng, len, exact_count(p, len)) {
                row[i] = true;
            }
            row
        }
    }
}

/// Draws a disorder realization for a walk of `steps` steps.
pub fn generate_map(kind: DisorderKind, steps: usize, p: f64, semantics: Semantics, seed: u64) -> Result<PhaseMap> {
    check_degree(p)?;
    if steps == 0 {
        return Err(Error::EmptyPhaseMap);
    }
    let width = 2 * steps + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let entries = match kind {
        _ if p == 0.0 => vec![false; steps * width],
        DisorderKind::None => vec![false; steps * width],
        DisorderKind::Static => draw_row(&mut rng, width, p, semantics).repeat(steps),
        DisorderKind::Dynamic => draw_row(&mut rng, steps * width, p, semantics),
    };
    Ok(PhaseMap {
        kind,
        p,
        steps,
        semantics,
        seed,
        entries,
    })
}

impl PhaseMap {
    /// The ordered map (no fluctuations) for `steps` steps.
    pub fn ordered(steps: usize) -> Result<Self> {
        generate_map(DisorderKind::None, steps, 0.0, Semantics::default(), 0)
    }

    pub fn kind(&self) -> DisorderKind {
        self.kind
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn semantics(&self) -> Semantics {
        self.semantics
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Sites per row, `2 * steps + 1`.
    pub fn width(&self) -> usize {
        2 * self.steps + 1
    }

    /// Fluctuation row for step `t` (1-based), indexed by `x + steps`.
    pub fn row(&self, t: usize) -> Result<&[bool]> {
        if t == 0 || t > self.steps {
            return Err(Error::StepOutOfRange {
                step: t,
                steps: self.steps,
            });
        }
        let w = self.width();
        Ok(&self.entries[(t - 1) * w..t * w])
    }

    /// Whether `dphi(t, x) = pi`. Sites beyond `|x| = steps` are unreachable
    /// and carry no fluctuation.
    pub fn is_pi(&self, t: usize, x: i64) -> Result<bool> {
        let row = self.row(t)?;
        let offset = x + self.steps as i64;
        Ok(offset >= 0 && (offset as usize) < row.len() && row[offset as usize])
    }

    /// `dphi(t, x)` in radians.
    pub fn phase(&self, t: usize, x: i64) -> Result<f64> {
        Ok(if self.is_pi(t, x)? { std::f64::consts::PI } else { 0.0 })
    }

    /// True when every row equals the first one.
    pub fn is_frozen(&self) -> bool {
        let w = self.width();
        let first = &self.entries[..w];
        self.entries.chunks_exact(w).all(|row| row == first)
    }

    /// Fraction of cells carrying a pi fluctuation.
    pub fn disorder_fraction(&self) -> f64 {
        let pis = self.entries.iter().filter(|&&e| e).count();
        pis as f64 / self.entries.len() as f64
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("phase map serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::MalformedPhaseMap(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const KINDS: [DisorderKind; 3] = [DisorderKind::None, DisorderKind::Static, DisorderKind::Dynamic];
    const SEMANTICS: [Semantics; 2] = [Semantics::BernoulliUniform, Semantics::ExactPiFraction];

    #[test]
    fn zero_degree_gives_ordered_map() {
        for kind in KINDS {
            for sem in SEMANTICS {
                let m = generate_map(kind, 20, 0.0, sem, 99).unwrap();
                assert_eq!(m.disorder_fraction(), 0.0);
            }
        }
    }

    #[test]
    fn none_kind_is_all_zero_at_any_degree() {
        let m = generate_map(DisorderKind::None, 10, 1.0, Semantics::ExactPiFraction, 1).unwrap();
        assert_eq!(m.disorder_fraction(), 0.0);
    }

    #[test]
    fn static_maps_are_frozen() {
        for seed in 0..20 {
            let m = generate_map(DisorderKind::Static, 50, 1.0, Semantics::BernoulliUniform, seed).unwrap();
            assert!(m.is_frozen());
            for x in -50..=50 {
                let first = m.is_pi(1, x).unwrap();
                assert!((1..=50).all(|t| m.is_pi(t, x).unwrap() == first));
            }
        }
    }

    #[test]
    fn static_full_degree_fraction_centres_on_half() {
        // Per-map fraction is Binomial(101, 1/2)/101; average over many maps.
        let n = 2000;
        let mean: f64 = (0..n)
            .map(|s| {
                generate_map(DisorderKind::Static, 50, 1.0, Semantics::BernoulliUniform, s)
                    .unwrap()
                    .disorder_fraction()
            })
            .sum::<f64>()
            / n as f64;
        let sd = (0.25 / 101.0 / n as f64).sqrt();
        assert!((mean - 0.5).abs() < 4.0 * sd, "mean {mean}");
    }

    #[test]
    fn exact_fraction_counts() {
        let m = generate_map(DisorderKind::Dynamic, 50, 0.1, Semantics::ExactPiFraction, 7).unwrap();
        let count = (1..=50)
            .flat_map(|t| (-50..=50).map(move |x| (t, x)))
            .filter(|&(t, x)| m.is_pi(t, x).unwrap())
            .count();
        assert_eq!(count, 505);
        assert_eq!(m.disorder_fraction(), 505.0 / 5050.0);

        let full = generate_map(DisorderKind::Dynamic, 30, 1.0, Semantics::ExactPiFraction, 7).unwrap();
        assert_eq!(full.disorder_fraction(), 1.0);

        let stat = generate_map(DisorderKind::Static, 50, 0.3, Semantics::ExactPiFraction, 3).unwrap();
        assert!(stat.is_frozen());
        assert_eq!(stat.disorder_fraction(), 30.0 / 101.0);
    }

    #[test]
    fn exact_count_guards_representation_error() {
        assert_eq!(exact_count(0.29, 100), 29);
        assert_eq!(exact_count(0.1, 5050), 505);
        assert_eq!(exact_count(1.0, 17), 17);
    }

    #[test]
    fn dynamic_full_degree_fraction() {
        let mean: f64 = (0..100)
            .map(|s| {
                generate_map(DisorderKind::Dynamic, 100, 1.0, Semantics::BernoulliUniform, s)
                    .unwrap()
                    .disorder_fraction()
            })
            .sum::<f64>()
            / 100.0;
        assert!((mean - 0.5).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn same_seed_same_map() {
        for kind in KINDS {
            for sem in SEMANTICS {
                let a = generate_map(kind, 25, 0.4, sem, 123).unwrap();
                let b = generate_map(kind, 25, 0.4, sem, 123).unwrap();
                assert_eq!(a, b);
            }
        }
        let a = generate_map(DisorderKind::Dynamic, 25, 0.4, Semantics::BernoulliUniform, 1).unwrap();
        let b = generate_map(DisorderKind::Dynamic, 25, 0.4, Semantics::BernoulliUniform, 2).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn rejects_bad_degree_and_empty_maps() {
        assert_eq!(
            generate_map(DisorderKind::Static, 5, 1.5, Semantics::BernoulliUniform, 0).unwrap_err(),
            Error::InvalidDisorderDegree(1.5)
        );
        assert!(generate_map(DisorderKind::Static, 5, -0.1, Semantics::BernoulliUniform, 0).is_err());
        assert!(generate_map(DisorderKind::Static, 5, f64::NAN, Semantics::BernoulliUniform, 0).is_err());
        assert_eq!(
            generate_map(DisorderKind::Dynamic, 0, 0.5, Semantics::BernoulliUniform, 0).unwrap_err(),
            Error::EmptyPhaseMap
        );
    }

    #[test]
    fn step_range_is_checked() {
        let m = PhaseMap::ordered(4).unwrap();
        assert!(m.row(0).is_err());
        assert!(m.row(5).is_err());
        assert_eq!(m.row(4).unwrap().len(), 9);
        assert!(!m.is_pi(2, 100).unwrap());
    }

    #[test]
    fn json_round_trip_and_schema() {
        let m = generate_map(DisorderKind::Dynamic, 3, 1.0, Semantics::BernoulliUniform, 42).unwrap();
        let text = m.to_json();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["kind"], "dynamic");
        assert_eq!(v["semantics"], "bernoulli-uniform");
        assert_eq!(v["T"], 3);
        assert_eq!(v["seed"], 42);
        assert_eq!(v["entries"].as_array().unwrap().len(), 3 * 7);
        assert_eq!(PhaseMap::from_json(&text).unwrap(), m);
    }

    #[test]
    fn json_import_validates() {
        let bad_len = r#"{"kind":"dynamic","p":1.0,"T":1,"semantics":"bernoulli-uniform","seed":0,"entries":[0,1]}"#;
        assert!(PhaseMap::from_json(bad_len).is_err());
        let bad_val = r#"{"kind":"dynamic","p":1.0,"T":1,"semantics":"bernoulli-uniform","seed":0,"entries":[0,2,0]}"#;
        assert!(PhaseMap::from_json(bad_val).is_err());
        let thawed = r#"{"kind":"static","p":1.0,"T":2,"semantics":"bernoulli-uniform","seed":0,"entries":[0,0,0,0,0,0,0,0,0,1]}"#;
        assert!(PhaseMap::from_json(thawed).is_err());
        let ok = r#"{"kind":"static","p":1.0,"T":1,"semantics":"exact-pi-fraction","seed":5,"entries":[1,0,1]}"#;
        let m = PhaseMap::from_json(ok).unwrap();
        assert!(m.is_pi(1, -1).unwrap() && !m.is_pi(1, 0).unwrap());
    }
}
