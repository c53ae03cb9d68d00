//! Monte Carlo averaging over disorder realizations.
//!
//! Member `k` of an ensemble draws its phase map from `split(master_seed, k)`,
//! so any member can be replayed in isolation. Members are grouped in
//! fixed-size chunks; each chunk is reduced in member order and the chunk
//! partials are merged in chunk order. The grouping never depends on the
//! worker count, which makes results bit-identical for any pool size.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::disorder::{generate_map, DisorderKind, PhaseMap, Semantics};
use crate::error::{Error, Result};
use crate::hilbert::{Symmetry, TwoParticleState, WalkerState};
use crate::metrology::{qfi_pure, DerivativePair};
use crate::observables::{marginal_distribution, position_distribution, Particle, PositionDistribution};
use crate::operators::{Evolve, PhaseOrder, StepContext};

/// Members per reduction chunk.
const CHUNK: u64 = 32;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Child seed for ensemble member `k`: the `k`-th output of a SplitMix64
/// stream seeded with `master`. Stateless, and injective in `k` because both
/// the counter step and the finalizer are bijections on `u64`.
pub fn split(master: u64, k: u64) -> u64 {
    mix64(master.wrapping_add(k.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisorderSpec {
    pub kind: DisorderKind,
    pub p: f64,
    #[serde(default)]
    pub semantics: Semantics,
}

impl DisorderSpec {
    pub fn ordered() -> Self {
        DisorderSpec {
            kind: DisorderKind::None,
            p: 0.0,
            semantics: Semantics::default(),
        }
    }

    pub fn new(kind: DisorderKind, p: f64) -> Self {
        DisorderSpec {
            kind,
            p,
            semantics: Semantics::default(),
        }
    }
}

/// Input state of every ensemble member.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialState {
    /// One walker at `position` with coin amplitudes `[up, down]`, each `[re, im]`.
    Single {
        position: i64,
        coin: [Complex64; 2],
    },
    TwoParticle {
        statistics: Symmetry,
    },
}

impl InitialState {
    /// `|0> (x) |up>`.
    pub fn origin_up() -> Self {
        InitialState::Single {
            position: 0,
            coin: [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        }
    }

    /// `|0> (x) |down>`.
    pub fn origin_down() -> Self {
        InitialState::Single {
            position: 0,
            coin: [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        }
    }

    /// `|0> (x) (|up> + |down>) / sqrt 2`.
    pub fn origin_balanced() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        InitialState::Single {
            position: 0,
            coin: [Complex64::new(h, 0.0), Complex64::new(h, 0.0)],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Observables {
    pub qfi: bool,
    pub variance: bool,
    pub distribution: bool,
}

impl Default for Observables {
    fn default() -> Self {
        Observables {
            qfi: true,
            variance: true,
            distribution: false,
        }
    }
}

/// How an ensemble variance is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VarianceMode {
    /// Average `p(x)` over maps first, then take the variance.
    #[default]
    AveragedDistribution,
    /// Average the per-map variances.
    PerMap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub disorder: DisorderSpec,
    pub steps: usize,
    pub maps: u64,
    pub master_seed: u64,
    pub phi: f64,
    pub initial: InitialState,
    pub observables: Observables,
    pub variance_mode: VarianceMode,
    pub phase_order: PhaseOrder,
}

impl EnsembleConfig {
    pub fn new(disorder: DisorderSpec, steps: usize, maps: u64, master_seed: u64) -> Self {
        EnsembleConfig {
            disorder,
            steps,
            maps,
            master_seed,
            phi: 0.0,
            initial: InitialState::origin_up(),
            observables: Observables::default(),
            variance_mode: VarianceMode::default(),
            phase_order: PhaseOrder::default(),
        }
    }

    pub fn with_initial(mut self, initial: InitialState) -> Self {
        self.initial = initial;
        self
    }

    pub fn with_observables(mut self, observables: Observables) -> Self {
        self.observables = observables;
        self
    }

    pub fn with_phi(mut self, phi: f64) -> Self {
        self.phi = phi;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.maps == 0 || self.steps == 0 {
            return Err(Error::EmptyEnsemble);
        }
        if !(0.0..=1.0).contains(&self.disorder.p) {
            return Err(Error::InvalidDisorderDegree(self.disorder.p));
        }
        if let InitialState::Single { coin, .. } = self.initial {
            // Constructed at the origin; `position` only relabels the lattice.
            WalkerState::new(0, coin, 1)?;
        }
        Ok(())
    }

    /// Phase map of member `k`.
    pub fn member_map(&self, k: u64) -> Result<PhaseMap> {
        let d = self.disorder;
        generate_map(d.kind, self.steps, d.p, d.semantics, split(self.master_seed, k))
    }
}

/// Per-step mean and standard error of the mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesStats {
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
}

/// Ensemble-averaged observables, indexed by step `t = 0..=steps`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSeries {
    pub config: EnsembleConfig,
    pub qfi: Option<SeriesStats>,
    pub variance: Option<SeriesStats>,
    pub distributions: Option<Vec<PositionDistribution>>,
    /// Absolute position of lattice site 0 (the walker's starting site).
    pub origin: i64,
    pub member_seeds: Vec<u64>,
}

impl EnsembleSeries {
    pub fn steps(&self) -> usize {
        self.config.steps
    }
}

/// Running mean and sum of squared deviations per element (Welford), with
/// the pairwise merge of Chan et al. Identical inputs give an exact mean and
/// an exactly zero spread.
#[derive(Debug, Clone)]
struct RunningStats {
    n: u64,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl RunningStats {
    fn new(len: usize) -> Self {
        RunningStats {
            n: 0,
            mean: vec![0.0; len],
            m2: vec![0.0; len],
        }
    }

    fn push(&mut self, xs: &[f64]) {
        self.n += 1;
        let n = self.n as f64;
        for ((m, s), &x) in self.mean.iter_mut().zip(&mut self.m2).zip(xs) {
            let delta = x - *m;
            *m += delta / n;
            *s += delta * (x - *m);
        }
    }

    fn merge(&mut self, other: &RunningStats) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = other.clone();
            return;
        }
        let (na, nb) = (self.n as f64, other.n as f64);
        let n = na + nb;
        for i in 0..self.mean.len() {
            let delta = other.mean[i] - self.mean[i];
            self.mean[i] += delta * (nb / n);
            self.m2[i] += other.m2[i] + delta * delta * (na * nb / n);
        }
        self.n += other.n;
    }

    fn into_stats(self) -> SeriesStats {
        let n = self.n as f64;
        let stderr = self
            .m2
            .iter()
            .map(|&s| {
                if self.n < 2 {
                    0.0
                } else {
                    ((s / (n - 1.0)).max(0.0) / n).sqrt()
                }
            })
            .collect();
        SeriesStats {
            mean: self.mean,
            stderr,
        }
    }
}

struct Partial {
    qfi: Option<RunningStats>,
    per_map_variance: Option<RunningStats>,
    /// Flattened `(t, site)` probabilities.
    distribution: Option<RunningStats>,
}

struct Plan {
    qfi: bool,
    per_map_variance: bool,
    distribution: bool,
}

impl Plan {
    fn of(config: &EnsembleConfig) -> Self {
        let obs = config.observables;
        let per_map = obs.variance && config.variance_mode == VarianceMode::PerMap;
        Plan {
            qfi: obs.qfi,
            per_map_variance: per_map,
            distribution: obs.distribution || (obs.variance && !per_map),
        }
    }

    fn partial(&self, steps: usize) -> Partial {
        let sites = 2 * steps + 1;
        Partial {
            qfi: self.qfi.then(|| RunningStats::new(steps + 1)),
            per_map_variance: self.per_map_variance.then(|| RunningStats::new(steps + 1)),
            distribution: self.distribution.then(|| RunningStats::new((steps + 1) * sites)),
        }
    }
}

impl Partial {
    fn merge(&mut self, other: &Partial) {
        fn m(a: &mut Option<RunningStats>, b: &Option<RunningStats>) {
            if let (Some(a), Some(b)) = (a.as_mut(), b.as_ref()) {
                a.merge(b);
            }
        }
        m(&mut self.qfi, &other.qfi);
        m(&mut self.per_map_variance, &other.per_map_variance);
        m(&mut self.distribution, &other.distribution);
    }
}

/// Walker types the ensemble can drive.
trait Member: Evolve {
    fn distribution(&self) -> Result<PositionDistribution>;
}

impl Member for WalkerState {
    fn distribution(&self) -> Result<PositionDistribution> {
        position_distribution(self)
    }
}

impl Member for TwoParticleState {
    fn distribution(&self) -> Result<PositionDistribution> {
        marginal_distribution(self, Particle::First)
    }
}

struct MemberRecord {
    qfi: Vec<f64>,
    variance: Vec<f64>,
    distribution: Vec<f64>,
}

fn run_member<S: Member>(initial: &S, map: &PhaseMap, config: &EnsembleConfig, plan: &Plan) -> Result<MemberRecord> {
    let steps = config.steps;
    let mut rec = MemberRecord {
        qfi: Vec::with_capacity(if plan.qfi { steps + 1 } else { 0 }),
        variance: Vec::new(),
        distribution: Vec::new(),
    };
    let observe = |psi: &S, rec: &mut MemberRecord| -> Result<()> {
        if plan.per_map_variance || plan.distribution {
            let dist = psi.distribution()?;
            if plan.per_map_variance {
                rec.variance.push(dist.variance());
            }
            if plan.distribution {
                rec.distribution.extend_from_slice(dist.probabilities());
            }
        }
        Ok(())
    };

    if plan.qfi {
        let mut pair = DerivativePair::new(initial.clone());
        rec.qfi.push(qfi_pure(&pair)?);
        observe(&pair.psi, &mut rec)?;
        for t in 1..=steps {
            let ctx = StepContext::new(config.phi, t, map)?.with_order(config.phase_order);
            S::step_with_derivative(&mut pair, &ctx)?;
            rec.qfi.push(qfi_pure(&pair)?);
            observe(&pair.psi, &mut rec)?;
        }
    } else {
        let mut psi = initial.clone();
        observe(&psi, &mut rec)?;
        for t in 1..=steps {
            let ctx = StepContext::new(config.phi, t, map)?.with_order(config.phase_order);
            psi.step(&ctx)?;
            observe(&psi, &mut rec)?;
        }
    }
    Ok(rec)
}

fn run_chunk<S: Member>(
    initial: &S,
    config: &EnsembleConfig,
    plan: &Plan,
    members: std::ops::Range<u64>,
) -> Result<Partial> {
    let mut partial = plan.partial(config.steps);
    for k in members {
        let seed = split(config.master_seed, k);
        let outcome = config
            .member_map(k)
            .and_then(|map| run_member(initial, &map, config, plan));
        let rec = outcome.map_err(|e| Error::Member {
            index: k,
            seed,
            source: Box::new(e),
        })?;
        if let Some(s) = partial.qfi.as_mut() {
            s.push(&rec.qfi);
        }
        if let Some(s) = partial.per_map_variance.as_mut() {
            s.push(&rec.variance);
        }
        if let Some(s) = partial.distribution.as_mut() {
            s.push(&rec.distribution);
        }
    }
    Ok(partial)
}

fn run_all<S: Member>(initial: &S, config: &EnsembleConfig) -> Result<Partial> {
    let plan = Plan::of(config);
    let chunks = config.maps.div_ceil(CHUNK);
    let partials = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK;
            let end = (start + CHUNK).min(config.maps);
            run_chunk(initial, config, &plan, start..end)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut total = plan.partial(config.steps);
    for p in &partials {
        total.merge(p);
    }
    Ok(total)
}

/// Runs `config.maps` disorder realizations on a pool of `workers` threads
/// (`None` uses the available parallelism) and averages the requested
/// observables. The result does not depend on the worker count.
pub fn run_ensemble(config: &EnsembleConfig, workers: Option<usize>) -> Result<EnsembleSeries> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::WorkerPool(e.to_string()))?;

    let steps = config.steps;
    let (total, origin) = pool.install(|| match config.initial {
        InitialState::Single { position, coin } => {
            let psi = WalkerState::new(0, coin, steps)?;
            Ok::<_, Error>((run_all(&psi, config)?, position))
        }
        InitialState::TwoParticle { statistics } => {
            let psi = TwoParticleState::new(statistics, steps)?;
            Ok((run_all(&psi, config)?, 0))
        }
    })?;

    let sites = 2 * steps + 1;
    let distributions = total
        .distribution
        .map(|s| {
            s.mean
                .chunks_exact(sites)
                .map(|row| PositionDistribution::from_probabilities(steps, row.to_vec()))
                .collect::<Result<Vec<_>>>()
        })
        .transpose()?;

    let variance = if !config.observables.variance {
        None
    } else if let Some(per_map) = total.per_map_variance {
        Some(per_map.into_stats())
    } else {
        let dists = distributions.as_ref().expect("averaged variance needs distributions");
        Some(SeriesStats {
            mean: dists.iter().map(PositionDistribution::variance).collect(),
            stderr: vec![0.0; steps + 1],
        })
    };

    Ok(EnsembleSeries {
        config: config.clone(),
        qfi: total.qfi.map(RunningStats::into_stats),
        variance,
        distributions: if config.observables.distribution {
            distributions
        } else {
            None
        },
        origin,
        member_seeds: (0..config.maps).map(|k| split(config.master_seed, k)).collect(),
    })
}
