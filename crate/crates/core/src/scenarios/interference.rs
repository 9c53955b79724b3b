//! Two-path interferometers: which-path marking and erasure, and the
//! solenoid toy model of the Aharonov-Bohm phase.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use super::{At, Params, Run};
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::evolve::{hadamard, recombine_probability, time_reverse, Op, OpLog};
use crate::measure::{joint_probability, postselect};
use crate::register::{fidelity, new_register, Register, StateVector, SubsystemSpec};
use crate::Result;

const TAU: f64 = 2.0 * core::f64::consts::PI;

fn visibility(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::MIN, f64::max);
    let min = values.iter().copied().fold(f64::MAX, f64::min);
    if max + min <= 0.0 {
        return 0.0;
    }
    (max - min) / (max + min)
}

pub(crate) fn eraser_register() -> Result<Arc<Register>> {
    new_register(vec![
        SubsystemSpec::new("path", ["src", "dark", "a", "b"]),
        SubsystemSpec::new("marker", ["m0", "m1"]),
    ])
}

pub(crate) fn quantum_erasure(run: &mut Run, params: &Params) -> Result<()> {
    let points = params.count("points");
    let reg = eraser_register()?;
    let source = StateVector::basis_state(&reg, &[("path", "src"), ("marker", "m0")])?;
    let mut marked = Vec::with_capacity(points);
    let mut erased = Vec::with_capacity(points);
    let mut worst: f64 = 0.0;
    for k in 0..points {
        let phi = TAU * k as f64 / points as f64;
        let ops = [
            Op::split("path", "src", "dark", ("a", "b")),
            Op::swap(&[("path", "b")], &[("marker", "m0")], &[("marker", "m1")]),
            Op::phase(&[("path", "a")], phi),
            Op::split("path", "src", "dark", ("a", "b")),
        ];
        let mut state = source.clone();
        for op in &ops {
            state = op.apply(&state).at("interferometer")?;
        }
        let p_marked = joint_probability(&state, &[("path", "src")])?;
        let rotated = Op::basis_change("marker", ("m0", "m1"), hadamard()).apply(&state).at("marker erasure")?;
        let rec = postselect(&rotated, &[("marker", "m0")]).at("marker erasure")?;
        let p_erased = joint_probability(&rec.post_state, &[("path", "src")])?;
        worst = worst.max((p_erased - (phi / 2.0).cos().powi(2)).abs());
        let dist: Vec<(String, f64)> = vec![
            ("src marked".into(), p_marked),
            ("dark marked".into(), 1.0 - p_marked),
        ];
        run.step(&format!("phase {k}/{points}"), &state, dist, None, &[("path|marker", &["path"])])?;
        run.metric(&format!("fringe_erased_{k}"), p_erased);
        marked.push(p_marked);
        erased.push(p_erased);
    }
    let v_marked = visibility(&marked);
    let v_erased = visibility(&erased);
    run.below("marked visibility", 0.01, v_marked, "orthogonal markers remove the cross term");
    run.above("erased visibility", 0.99, v_erased, "conditional fringes cos^2(phi/2)");
    run.close("erased fringe deviation from cos^2(phi/2)", 0.0, worst, 1e-10, "two-qubit closed form");
    run.metric("visibility_marked", v_marked);
    run.metric("visibility_erased", v_erased);
    Ok(())
}

pub(crate) fn ab_register(levels: usize) -> Result<Arc<Register>> {
    let labels: Vec<String> = (0..levels).map(|k| format!("s{k}")).collect();
    new_register(vec![
        SubsystemSpec::new("path", ["src", "dark", "up", "down"]),
        SubsystemSpec::new("solenoid", labels),
    ])
}

/// Cyclic shift of the solenoid pointer while the electron is on the upper arm.
pub(crate) fn solenoid_shift(levels: usize) -> Op {
    let names: Vec<String> = (0..levels).map(|k| format!("s{k}")).collect();
    let pairs: Vec<([(&str, &str); 1], [(&str, &str); 1])> = (0..levels)
        .map(|k| ([("solenoid", names[k].as_str())], [("solenoid", names[(k + 1) % levels].as_str())]))
        .collect();
    let mapping: Vec<(&[(&str, &str)], &[(&str, &str)])> = pairs.iter().map(|(f, t)| (&f[..], &t[..])).collect();
    Op::relabel(&[("path", "up")], &mapping)
}

pub(crate) fn ab_toy(run: &mut Run, params: &Params) -> Result<()> {
    let levels = params.count("levels");
    let phi = params.get("phi");
    let reg = ab_register(levels)?;
    let cuts: &[(&str, &[&str])] = &[("path|solenoid", &["path"])];
    let source = StateVector::basis_state(&reg, &[("path", "src"), ("solenoid", "s0")])?;
    let mut log = OpLog::new();
    run.step("source", &source, vec![], None, cuts)?;
    let split = log.apply(&source, Op::split("path", "src", "dark", ("up", "down"))).at("split")?;
    let h0 = run.step("split", &split, vec![], None, cuts)?[0];
    let shift = solenoid_shift(levels);
    let entered = log.apply(&split, shift.clone()).at("entry shift")?;
    let h1 = run.step("entry shift", &entered, vec![], None, cuts)?[0];
    let phased = log.apply(&entered, Op::phase(&[("path", "up")], phi)).at("phase")?;
    run.step("phase", &phased, vec![], None, cuts)?;
    let exited = log.apply(&phased, shift.inverse()).at("exit shift")?;
    let h2 = run.step("exit shift", &exited, vec![], None, cuts)?[0];

    run.below("entropy before entry", 1e-9, h0, "product after the split");
    run.above("entropy inside", 0.1, h1, "path correlated with the solenoid pointer");
    run.close("entropy inside (bits)", 1.0, h1, 1e-9, "two equal branches with orthogonal pointer states");
    run.below("entropy after exit", 1e-9, h2, "pointer released");
    let p = recombine_probability(&exited, "path", "src", "dark", ("up", "down")).at("recombination")?;
    run.close("recombination probability", (phi / 2.0).cos().powi(2), p, 1e-10, "cos^2(phi/2) interferometer algebra");
    let back = time_reverse(&exited, &log).at("time reversal")?;
    run.close("time reversal", 1.0, fidelity(&back, &source)?, 1e-9, "unitarity of the logged ops");
    run.metric("entropy_inside", h1);
    run.metric("entropy_after", h2);
    run.metric("recombination", p);
    Ok(())
}
