mod common;

use common::*;
use qwalk::disorder::{generate_map, DisorderKind, PhaseMap, Semantics};
use qwalk::ensemble::{run_ensemble, DisorderSpec, EnsembleConfig, InitialState, Observables};
use qwalk::hilbert::{State, Symmetry, TwoParticleState, WalkerState};
use qwalk::metrology::{qfi_finite_difference, qfi_pure, qfi_series, DerivativePair};
use qwalk::observables::position_distribution;
use qwalk::operators::{step, step_with_derivative, two_particle_step_with_derivative, StepContext};
use qwalk::twoparticle::compare;

fn up(t_max: usize) -> WalkerState {
    WalkerState::new(0, [c(1.0, 0.0), c(0.0, 0.0)], t_max).unwrap()
}

fn down(t_max: usize) -> WalkerState {
    WalkerState::new(0, [c(0.0, 0.0), c(1.0, 0.0)], t_max).unwrap()
}

fn maps(kind: DisorderKind, steps: usize, count: u64, base: u64) -> Vec<PhaseMap> {
    (0..count)
        .map(|s| generate_map(kind, steps, 1.0, Semantics::BernoulliUniform, base + s).unwrap())
        .collect()
}

#[test]
fn library_step_matches_reference_evolution() {
    for kind in [DisorderKind::None, DisorderKind::Static, DisorderKind::Dynamic] {
        for map in maps(kind, 40, 5, 100) {
            let mut s = up(40);
            let mut r = basis(0, 0);
            for t in 1..=40 {
                step(&mut s, &StepContext::new(0.37, t, &map).unwrap()).unwrap();
                r = reference_step(&r, &map, t, 0.37);
                assert!(max_gap(&s, &r) < 1e-13, "{kind:?} t = {t}");
            }
        }
    }
}

#[test]
fn derivative_matches_reference_finite_difference() {
    // The central difference carries an O(h^2) truncation error that grows
    // with t (about 1.2e-7 per component at t = 30 for h = 1e-5), so the
    // tight bound is checked at h = 1e-6 and the loose one at h = 1e-5.
    for kind in [DisorderKind::None, DisorderKind::Static, DisorderKind::Dynamic] {
        for map in maps(kind, 30, 10, 7) {
            let mut pair = DerivativePair::new(up(30));
            for t in 1..=30 {
                step_with_derivative(&mut pair, &StepContext::new(0.0, t, &map).unwrap()).unwrap();
                if t % 5 == 0 || t < 4 {
                    let fine = reference_derivative(&basis(0, 0), &map, t, 0.0, 1e-6);
                    let coarse = reference_derivative(&basis(0, 0), &map, t, 0.0, 1e-5);
                    assert!(max_gap(&pair.dpsi, &fine) < 1e-8, "{kind:?} t = {t}");
                    assert!(max_gap(&pair.dpsi, &coarse) < 1e-6, "{kind:?} t = {t}");
                }
            }
        }
    }
}

#[test]
fn finite_difference_gap_shrinks_as_h_squared() {
    // If the recursion were off, the gap would plateau instead of falling 100x.
    let map = PhaseMap::ordered(30).unwrap();
    let mut pair = DerivativePair::new(up(30));
    for t in 1..=30 {
        step_with_derivative(&mut pair, &StepContext::new(0.0, t, &map).unwrap()).unwrap();
    }
    let gap = |h| max_gap(&pair.dpsi, &reference_derivative(&basis(0, 0), &map, 30, 0.0, h));
    let ratio = gap(1e-5) / gap(1e-6);
    assert!((ratio - 100.0).abs() < 1.0, "ratio {ratio}");
}

#[test]
fn qfi_recursion_matches_reference_qfi() {
    for kind in [DisorderKind::Static, DisorderKind::Dynamic] {
        for map in maps(kind, 30, 20, 500) {
            let series = qfi_series(&up(30), &map, 0.0, 30).unwrap();
            for t in 1..=30 {
                let psi = reference_evolve(&basis(0, 0), &map, t, 0.0);
                let dpsi = reference_derivative(&basis(0, 0), &map, t, 0.0, 1e-6);
                let f = reference_qfi(&psi, &dpsi);
                assert!((series.values[t] - f).abs() < 1e-6, "{kind:?} t = {t}");
            }
            let lib_fd = qfi_finite_difference(&up(30), &map, 0.0, 30, 1e-6).unwrap();
            assert!((series.values[30] - lib_fd).abs() < 1e-6);
            let lib_fd = qfi_finite_difference(&up(30), &map, 0.0, 10, 1e-5).unwrap();
            assert!((series.values[10] - lib_fd).abs() < 1e-6);
        }
    }
}

#[test]
fn hand_computed_two_step_values() {
    let map = PhaseMap::ordered(2).unwrap();
    let mut pair = DerivativePair::new(up(2));
    step_with_derivative(&mut pair, &StepContext::new(0.0, 1, &map).unwrap()).unwrap();
    let overlap = pair.psi.inner(&pair.dpsi).unwrap();
    assert!((overlap - c(0.0, 1.0)).norm() < 1e-15);
    assert!(qfi_pure(&pair).unwrap().abs() < 1e-12);
    step_with_derivative(&mut pair, &StepContext::new(0.0, 2, &map).unwrap()).unwrap();
    assert!((pair.dpsi.norm_sqr() - 2.5).abs() < 1e-14);
    assert!((pair.psi.inner(&pair.dpsi).unwrap() - c(0.0, 1.5)).norm() < 1e-14);
    assert!((qfi_pure(&pair).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn qfi_invariant_under_global_input_phase() {
    for map in maps(DisorderKind::Dynamic, 25, 5, 40) {
        let plain = qfi_series(&up(25), &map, 0.0, 25).unwrap();
        let mut rotated = up(25);
        rotated.apply_global_phase(1.234);
        let rot = qfi_series(&rotated, &map, 0.0, 25).unwrap();
        for (a, b) in plain.values.iter().zip(&rot.values) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}

#[test]
fn separable_joint_qfi_is_additive_under_disorder() {
    for kind in [DisorderKind::None, DisorderKind::Static, DisorderKind::Dynamic] {
        for map in maps(kind, 15, 3, 77) {
            let a = qfi_series(&up(15), &map, 0.2, 15).unwrap();
            let b = qfi_series(&down(15), &map, 0.2, 15).unwrap();
            let mut pair = DerivativePair::new(TwoParticleState::new(Symmetry::Separable, 15).unwrap());
            for t in 1..=15 {
                two_particle_step_with_derivative(&mut pair, &StepContext::new(0.2, t, &map).unwrap()).unwrap();
                let joint = qfi_pure(&pair).unwrap();
                assert!((joint - a.values[t] - b.values[t]).abs() < 1e-10, "{kind:?} t = {t}");
            }
        }
    }
}

#[test]
fn separable_ensemble_equals_sum_of_single_ensembles() {
    let disorder = DisorderSpec::new(DisorderKind::Static, 1.0);
    let only_qfi = Observables {
        qfi: true,
        variance: false,
        distribution: false,
    };
    let single = |init| {
        run_ensemble(
            &EnsembleConfig::new(disorder, 20, 30, 9)
                .with_initial(init)
                .with_observables(only_qfi),
            None,
        )
        .unwrap()
        .qfi
        .unwrap()
        .mean
    };
    let (a, b) = (single(InitialState::origin_up()), single(InitialState::origin_down()));
    let cmp = compare(Symmetry::Boson, disorder, 20, 30, 9, None).unwrap();
    let joint = cmp.distinguishable.qfi.unwrap().mean;
    for t in 0..=20 {
        assert!((joint[t] - a[t] - b[t]).abs() < 1e-10);
    }
}

#[test]
fn balanced_input_distribution_symmetry_is_reported() {
    // Not an invariant: with this coin the ordered walk from (|up>+|down>)/sqrt2
    // drifts, so only the sum rule is asserted.
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let map = PhaseMap::ordered(100).unwrap();
    let mut s = WalkerState::new(0, [c(h, 0.0), c(h, 0.0)], 100).unwrap();
    for t in 1..=100 {
        step(&mut s, &StepContext::new(0.0, t, &map).unwrap()).unwrap();
    }
    let d = position_distribution(&s).unwrap();
    let asym: f64 = (1..=100).map(|x| (d.probability(x) - d.probability(-x)).abs()).sum();
    println!(
        "balanced ordered walk, t = 100: <x> = {:.4}, sum |p(x) - p(-x)| = {:.4}",
        d.mean(),
        asym
    );
    assert!((d.total() - 1.0).abs() < 1e-12);
}
