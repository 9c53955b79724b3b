//! Property tests for state, evolution, measurement, entanglement and grid invariants.

use std::sync::Arc;

use gedanken_core::entangle::{cut_entropy, is_product, partial_trace, schmidt, PRODUCT_TOLERANCE};
use gedanken_core::evolve::{controlled_relabel, Op};
use gedanken_core::grid::{momentum_spectrum, window_project, DickeParams, GridWavefunction};
use gedanken_core::grid::gaussian_superposition;
use gedanken_core::measure::{
    click_probability, erase_partial, joint_probability, partial_measure_outcome, postselect, project,
    sample_readings, weak_measure, PartialOutcome, PartialStrength, WeakParams,
};
use gedanken_core::register::{fidelity, superpose};
use gedanken_core::{new_register, Register, StateVector, SubsystemSpec, C64};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const DIM: usize = 16;

fn reg() -> Arc<Register> {
    new_register(vec![
        SubsystemSpec::new("a", ["a0", "a1", "a2", "a3"]),
        SubsystemSpec::new("b", ["b0", "b1"]),
        SubsystemSpec::new("c", ["c0", "c1"]),
    ])
    .unwrap()
}

fn assignments(reg: &Register) -> Vec<Vec<(String, String)>> {
    (0..reg.dim())
        .map(|i| reg.labels_of(i).into_iter().map(|(s, l)| (s.to_string(), l.to_string())).collect())
        .collect()
}

fn build(reg: &Arc<Register>, amps: &[C64], normalize: bool) -> gedanken_core::Result<StateVector> {
    let owned = assignments(reg);
    let refs: Vec<Vec<(&str, &str)>> =
        owned.iter().map(|v| v.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect()).collect();
    let terms: Vec<(C64, &[(&str, &str)])> = amps.iter().zip(&refs).map(|(a, r)| (*a, &r[..])).collect();
    superpose(reg, &terms, normalize)
}

fn amps(n: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n)
        .prop_map(|v| v.into_iter().map(|(re, im)| C64::new(re, im)).collect::<Vec<_>>())
        .prop_filter("nonzero", |v: &Vec<C64>| v.iter().map(|z| z.norm_sqr()).sum::<f64>() > 0.05)
}

fn random_state() -> impl Strategy<Value = StateVector> {
    amps(DIM).prop_map(|a| build(&reg(), &a, true).unwrap())
}

/// Random element of U(2) from Euler angles and a global phase.
fn unitary(t: f64, p: f64, q: f64, g: f64) -> [[C64; 2]; 2] {
    let (s, c) = t.sin_cos();
    let e = |x: f64| C64::from_polar(1.0, x);
    [[e(g + p) * c, -e(g + q) * s], [e(g - q) * s, e(g - p) * c]]
}

fn any_op() -> impl Strategy<Value = Op> {
    let angle = -6.3..6.3f64;
    prop_oneof![
        Just(Op::split("a", "a0", "a1", ("a2", "a3"))),
        (angle.clone(), 0..4usize, 0..4usize).prop_filter("distinct", |(_, i, j)| i != j).prop_map(|(t, i, j)| {
            let l = ["a0", "a1", "a2", "a3"];
            Op::rotation("a", (l[i], l[j]), t)
        }),
        (angle.clone(), angle.clone(), angle.clone(), angle.clone())
            .prop_map(|(t, p, q, g)| Op::basis_change("b", ("b0", "b1"), unitary(t, p, q, g))),
        Just(Op::swap(&[("c", "c1")], &[("a", "a0"), ("b", "b1")], &[("a", "a3"), ("b", "b0")])),
        Just(Op::relabel(&[("b", "b0")], &[(&[("a", "a0")], &[("a", "a1")]), (&[("a", "a1")], &[("a", "a2")]), (&[("a", "a2")], &[("a", "a0")])])),
        angle.prop_map(|t| Op::phase(&[("a", "a2"), ("c", "c0")], t)),
    ]
}

fn max_diff(x: &StateVector, y: &StateVector) -> f64 {
    (0..x.register().dim()).map(|i| (x.amplitude_at(i) - y.amplitude_at(i)).norm()).fold(0.0, f64::max)
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.partial_cmp(a).unwrap());
    v
}

proptest! {
    #[test]
    fn ops_preserve_norm_and_invert(s in random_state(), op in any_op()) {
        let out = op.apply(&s).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-10);
        let back = op.inverse().apply(&out).unwrap();
        prop_assert!((fidelity(&back, &s).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rotation_is_additive(s in random_state(), alpha in -1.0..1.0f64, n in 1usize..9) {
        let step = Op::rotation("a", ("a1", "a3"), alpha);
        let mut many = s.clone();
        for _ in 0..n {
            many = step.apply(&many).unwrap();
        }
        let once = Op::rotation("a", ("a1", "a3"), n as f64 * alpha).apply(&s).unwrap();
        prop_assert!(max_diff(&many, &once) < 1e-9);
    }

    #[test]
    fn relabels_on_disjoint_supports_commute(s in random_state()) {
        let first = |x: &StateVector| controlled_relabel(x, &[("c", "c0")], &[(&[("a", "a0")], &[("a", "a2")]), (&[("a", "a2")], &[("a", "a0")])]);
        let second = |x: &StateVector| controlled_relabel(x, &[("c", "c1")], &[(&[("b", "b0")], &[("b", "b1")]), (&[("b", "b1")], &[("b", "b0")])]);
        let ab = second(&first(&s).unwrap()).unwrap();
        let ba = first(&second(&s).unwrap()).unwrap();
        prop_assert!(max_diff(&ab, &ba) < 1e-15);
    }

    #[test]
    fn superpose_round_trips_coefficients(a in amps(DIM)) {
        let r = reg();
        let n = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let unit: Vec<C64> = a.iter().map(|z| z / n).collect();
        let exact = build(&r, &unit, false).unwrap();
        for (i, z) in unit.iter().enumerate() {
            prop_assert_eq!(exact.amplitude_at(i), *z);
        }
        let scaled = build(&r, &a, true).unwrap();
        for (i, z) in a.iter().enumerate() {
            if z.norm() > 1e-3 {
                let ratio = scaled.amplitude_at(i) / z;
                prop_assert!(ratio.im.abs() < 1e-12 && (ratio.re - 1.0 / n).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn fidelity_is_symmetric_and_phase_blind(x in random_state(), y in random_state(), g in -3.0..3.0f64) {
        let fxy = fidelity(&x, &y).unwrap();
        prop_assert!((fxy - fidelity(&y, &x).unwrap()).abs() < 1e-12);
        let rotated = Op::phase(&[], g).apply(&x).unwrap();
        prop_assert!((fidelity(&x, &rotated).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn schmidt_matches_svd(s in random_state()) {
        // rows: subsystem a (4), columns: b and c jointly (4)
        let m = DMatrix::from_fn(4, 4, |i, j| {
            let z = s.amplitude_at(i * 4 + j);
            nalgebra::Complex::new(z.re, z.im)
        });
        let svd: Vec<f64> = sorted(m.singular_values().iter().map(|v| v * v).filter(|v| *v > 1e-12).collect());
        let ours = sorted(schmidt(&s, &["a"], &["b", "c"]).unwrap().coefficients().to_vec());
        prop_assert_eq!(svd.len(), ours.len());
        for (x, y) in svd.iter().zip(&ours) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn schmidt_invariant_under_local_unitaries(
        s in random_state(),
        (t, p, q, g) in (-3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64),
        alpha in -3.0..3.0f64,
        phi in -3.0..3.0f64,
    ) {
        let before = sorted(schmidt(&s, &["a"], &["b", "c"]).unwrap().coefficients().to_vec());
        let mut u = Op::rotation("a", ("a0", "a3"), alpha).apply(&s).unwrap();
        u = Op::split("a", "a1", "a2", ("a0", "a3")).apply(&u).unwrap();
        u = Op::basis_change("b", ("b0", "b1"), unitary(t, p, q, g)).apply(&u).unwrap();
        u = Op::phase(&[("c", "c1")], phi).apply(&u).unwrap();
        let after = sorted(schmidt(&u, &["a"], &["b", "c"]).unwrap().coefficients().to_vec());
        prop_assert_eq!(before.len(), after.len());
        for (x, y) in before.iter().zip(&after) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn partial_trace_entropy_is_symmetric(s in random_state()) {
        for (side, rest) in [(&["a"][..], &["b", "c"][..]), (&["b"][..], &["a", "c"][..]), (&["a", "c"][..], &["b"][..])] {
            let x = partial_trace(&s, side).unwrap().entropy().unwrap();
            let y = partial_trace(&s, rest).unwrap().entropy().unwrap();
            prop_assert!((x - y).abs() < 1e-9, "{} vs {}", x, y);
        }
    }

    #[test]
    fn entropy_vanishes_exactly_on_products(x in amps(4), y in amps(4), s in random_state()) {
        let product: Vec<C64> = (0..DIM).map(|i| x[i / 4] * y[i % 4]).collect();
        let p = build(&reg(), &product, true).unwrap();
        prop_assert!(is_product(&p, &["a"], &["b", "c"], PRODUCT_TOLERANCE).unwrap());
        prop_assert!(cut_entropy(&p, &["a"]).unwrap() < 1e-9);
        let second = schmidt(&s, &["a"], &["b", "c"]).unwrap().second();
        if second > 1e-3 {
            prop_assert!(!is_product(&s, &["a"], &["b", "c"], PRODUCT_TOLERANCE).unwrap());
            prop_assert!(cut_entropy(&s, &["a"]).unwrap() > 1e-3);
        }
    }

    #[test]
    fn projection_is_idempotent_and_sequential(s in random_state()) {
        let first = project(&s, "b", "b1").unwrap();
        let again = project(&first.post_state, "b", "b1").unwrap();
        prop_assert!((again.probability - 1.0).abs() < 1e-12);
        let then = postselect(&first.post_state, &[("a", "a2"), ("c", "c0")]).unwrap();
        let joint = joint_probability(&s, &[("b", "b1"), ("a", "a2"), ("c", "c0")]).unwrap();
        prop_assert!((first.probability * then.probability - joint).abs() < 1e-12);
    }

    #[test]
    fn partial_measurement_is_complete(s in random_state(), eps in 0.0..=1.0f64) {
        let k = PartialStrength::new(eps).unwrap();
        let p_click = click_probability(&s, "a", "a1", k).unwrap();
        let no = partial_measure_outcome(&s, "a", "a1", k, PartialOutcome::NoClick);
        let p_no = no.map(|r| r.probability).unwrap_or(0.0);
        prop_assert!((p_click + p_no - 1.0).abs() < 1e-10);
        let p_a1 = joint_probability(&s, &[("a", "a1")]).unwrap();
        prop_assert!((p_click - eps * p_a1).abs() < 1e-12);
    }

    #[test]
    fn erasure_equalizes_and_keeps_phase(p in 0.51..0.9999f64, phase in -3.1..3.1f64) {
        let r = new_register(vec![SubsystemSpec::new("spin", ["up", "down"])]).unwrap();
        let s = superpose(
            &r,
            &[(C64::new(p.sqrt(), 0.0), &[("spin", "up")]), (C64::from_polar((1.0 - p).sqrt(), phase), &[("spin", "down")])],
            false,
        )
        .unwrap();
        let e = erase_partial(&s, "spin", "up", "down").unwrap();
        let up = e.post_state.amplitude(&[("spin", "up")]).unwrap();
        let down = e.post_state.amplitude(&[("spin", "down")]).unwrap();
        prop_assert!((up.norm() - down.norm()).abs() < 1e-10);
        let rel = (down / up).arg();
        let d = (rel - phase + std::f64::consts::PI).rem_euclid(2.0 * std::f64::consts::PI) - std::f64::consts::PI;
        prop_assert!(d.abs() < 1e-12);
        prop_assert!((e.success_probability - 2.0 * (1.0 - p)).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn window_probabilities_are_complementary(
        center in -3.0..3.0f64,
        sigma in 0.2..1.5f64,
        a in -9.0..9.0f64,
        width in 0.01..9.0f64,
    ) {
        let wf = GridWavefunction::gaussian(512, -10.0, 10.0, center, sigma).unwrap();
        let b = (a + width).min(10.0);
        let inside = window_project(&wf, (a, b), true).map(|r| r.0).unwrap_or(0.0);
        let outside = window_project(&wf, (a, b), false).map(|r| r.0).unwrap_or(0.0);
        prop_assert!((inside + outside - 1.0).abs() < 1e-9);
    }

    #[test]
    fn momentum_round_trip(center in -3.0..3.0f64, sigma in 0.2..1.5f64, k in -4.0..4.0f64) {
        let g = GridWavefunction::gaussian(256, -10.0, 10.0, center, sigma).unwrap();
        let amps: Vec<C64> =
            g.amplitudes().iter().enumerate().map(|(i, z)| z * C64::from_polar(1.0, k * g.x(i))).collect();
        let wf = GridWavefunction::new(-10.0, 10.0, amps).unwrap();
        let spec = momentum_spectrum(&wf);
        let psum: f64 = spec.probabilities().iter().sum();
        prop_assert!((psum - wf.norm_sqr()).abs() < 1e-10);
        let back = spec.to_position();
        let err = wf.amplitudes().iter().zip(back.amplitudes()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-10);
    }

    #[test]
    fn uncertainty_product_holds(sigma in 0.2..1.5f64, ratio in 10.0..40.0f64, eps in 0.001..0.3f64) {
        let g = GridWavefunction::gaussian(1024, -12.0, 12.0, 0.0, sigma).unwrap();
        let prod = g.position_moments().std * momentum_spectrum(&g).moments().std;
        prop_assert!(prod >= 0.5 - 1e-3);
        let mut params = DickeParams::standard(ratio);
        params.spoon_amplitude = eps;
        let wf = gaussian_superposition(&params, 4096, None).unwrap();
        let prod = wf.position_moments().std * momentum_spectrum(&wf).moments().std;
        prop_assert!(prod >= 0.5 - 1e-3);
    }
}

#[test]
fn weak_measurement_strong_limit_matches_born() {
    let r = new_register(vec![SubsystemSpec::new("s", ["+", "-"])]).unwrap();
    let (c, s) = (0.6f64, 0.8f64);
    let state = superpose(&r, &[(C64::new(c, 0.0), &[("s", "+")]), (C64::new(s, 0.0), &[("s", "-")])], false).unwrap();
    let g = 1.0;
    let params = WeakParams::auto(g, 0.1 * g, 1.0).unwrap();
    let coupled = weak_measure(&state, "s", &[("+", 1.0), ("-", -1.0)], &params).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 20_000;
    let readings = sample_readings(&coupled, n, &mut rng);
    let plus = readings.iter().filter(|&&x| x > 0.0).count() as f64 / n as f64;
    let se = (c * c * s * s / n as f64).sqrt();
    assert!((plus - c * c).abs() < 4.0 * se, "{plus}");
    // readings sit on the eigenvalues, not in between
    assert!(readings.iter().all(|x| (x.abs() - g).abs() < 0.6 * g));
}
