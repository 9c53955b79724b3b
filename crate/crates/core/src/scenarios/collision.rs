//! Two-atom collision version of the oblivion experiment.
//!
//! Atom A2 is split into paths 1 and 2, atom A1 into 3 and 4. Path 3 meets
//! path 2 at t1 (deflecting into 2' and 3') and path 1 at t2 (into 1' and
//! 3''). Where A1 took path 4 nothing happens and A2 drifts on to 1' or 2'.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use super::{c, distribution, At, Run};

use crate::entangle::cut_entropy;
use crate::evolve::{time_reverse, LogEntry, Op, OpLog};
use crate::measure::{joint_probability, postselect, sample_measure};
use crate::register::{fidelity, new_register, superpose, Register, StateVector, SubsystemSpec};
use crate::{Error, Result};

const A2: &[&str] = &["src", "dark", "1", "2", "1'", "2'"];
const A1: &[&str] = &["src", "dark", "3", "4", "3'", "3''"];

fn atoms() -> Vec<SubsystemSpec> {
    vec![SubsystemSpec::new("A2", A2.iter().copied()), SubsystemSpec::new("A1", A1.iter().copied())]
}

pub(crate) fn collision_register() -> Result<Arc<Register>> {
    new_register(atoms())
}

pub(crate) fn pointer_register() -> Result<Arc<Register>> {
    let mut specs = atoms();
    specs.push(SubsystemSpec::new("P1", ["rest", "kicked"]));
    specs.push(SubsystemSpec::new("P2", ["rest", "kicked"]));
    new_register(specs)
}

pub(crate) fn split_ops() -> Vec<Op> {
    vec![Op::split("A2", "src", "dark", ("1", "2")), Op::split("A1", "src", "dark", ("3", "4"))]
}

pub(crate) fn t1_collision() -> Op {
    Op::swap(&[], &[("A2", "2"), ("A1", "3")], &[("A2", "2'"), ("A1", "3'")])
}

pub(crate) fn t2_collision() -> Op {
    Op::swap(&[], &[("A2", "1"), ("A1", "3")], &[("A2", "1'"), ("A1", "3''")])
}

/// A2 moves on to its primed location where A1 went the other way.
pub(crate) fn drift() -> Op {
    Op::relabel(
        &[("A1", "4")],
        &[
            (&[("A2", "1")], &[("A2", "1'")]),
            (&[("A2", "1'")], &[("A2", "1")]),
            (&[("A2", "2")], &[("A2", "2'")]),
            (&[("A2", "2'")], &[("A2", "2")]),
        ],
    )
}

/// Pointer `pointer` is kicked when the atoms sit at `(a2, a1)`.
pub(crate) fn kick(pointer: &str, a2: &str, a1: &str) -> Op {
    Op::swap(&[("A2", a2), ("A1", a1)], &[(pointer, "rest")], &[(pointer, "kicked")])
}

/// `½[|1'⟩|3''⟩ + |2'⟩|3'⟩ + (|1'⟩+|2'⟩)|4⟩]`.
fn collided_state(reg: &Arc<Register>) -> Result<StateVector> {
    superpose(
        reg,
        &[
            (c(0.5), &[("A2", "1'"), ("A1", "3''")]),
            (c(0.5), &[("A2", "2'"), ("A1", "3'")]),
            (c(0.5), &[("A2", "1'"), ("A1", "4")]),
            (c(0.5), &[("A2", "2'"), ("A1", "4")]),
        ],
        false,
    )
}

pub(crate) fn atom_collision(run: &mut Run) -> Result<()> {
    let reg = collision_register()?;
    let cuts: &[(&str, &[&str])] = &[("A2|A1", &["A2"])];
    let mut log = OpLog::new();
    let mut state = StateVector::basis_state(&reg, &[("A2", "src"), ("A1", "src")])?;
    let source = state.clone();
    run.step("source", &state, vec![], None, cuts)?;
    for op in split_ops() {
        state = log.apply(&state, op).at("split")?;
    }
    let h0 = run.step("split", &state, vec![], None, cuts)?[0];
    state = log.apply(&state, t1_collision()).at("t1 collision")?;
    let h1 = run.step("t1 collision", &state, vec![], None, cuts)?[0];
    state = log.apply(&state, t2_collision()).at("t2 collision")?;
    run.step("t2 collision", &state, vec![], None, cuts)?;
    state = log.apply(&state, drift()).at("drift")?;
    let h3 = run.step("drift", &state, distribution(&state, "A2")?, None, cuts)?[0];

    run.close("collided state", 1.0, fidelity(&state, &collided_state(&reg)?)?, 1e-10, "four branches at amplitude 1/2");
    let branches = [("1'", "3''"), ("2'", "3'"), ("1'", "4"), ("2'", "4")];
    let worst = branches
        .iter()
        .map(|&(a, b)| state.amplitude(&[("A2", a), ("A1", b)]).map(|z| (z - c(0.5)).norm()))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    run.close("largest branch amplitude deviation from 1/2", 0.0, worst, 1e-10, "four branches at amplitude 1/2");
    let m1 = joint_probability(&state, &[("A2", "1'")])?;
    let m2 = joint_probability(&state, &[("A2", "2'")])?;
    run.close("P(A2 on 1')", 0.5, m1, 1e-10, "A2 remains superposed over its primed locations");
    run.close("P(A2 on 2')", 0.5, m2, 1e-10, "A2 remains superposed over its primed locations");
    run.below("entropy before collisions", 1e-9, h0, "product after the splits");
    run.above("entropy after t1", 0.1, h1, "collision entangles the two atoms");
    run.above("entropy after collisions", 0.1, h3, "asymmetric collision leaves the atoms entangled");

    let back = time_reverse(&state, &log).at("time reversal")?;
    run.close("time reversal", 1.0, fidelity(&back, &source)?, 1e-9, "unitarity of the logged ops");
    run.metric("p_a2_1prime", m1);
    run.metric("p_a2_2prime", m2);
    run.metric("entropy_final", h3);
    Ok(())
}

fn unitary_log(log: &OpLog) -> OpLog {
    log.entries()
        .iter()
        .filter_map(|e| match e {
            LogEntry::Unitary(op) => Some(op.clone()),
            LogEntry::Projection(_) => None,
        })
        .collect()
}

pub(crate) fn oblivion_with_pointers(run: &mut Run) -> Result<()> {
    let reg = pointer_register()?;
    let a2_cut: &[&str] = &["A2"];
    let cuts: &[(&str, &[&str])] = &[("A2|rest", a2_cut)];
    let mut log = OpLog::new();
    let source = StateVector::basis_state(&reg, &[("A2", "src"), ("A1", "src"), ("P1", "rest"), ("P2", "rest")])?;
    let mut state = source.clone();
    run.step("source", &state, vec![], None, cuts)?;
    for op in split_ops() {
        state = log.apply(&state, op).at("split")?;
    }
    let h0 = run.step("split", &state, vec![], None, cuts)?[0];
    state = log.apply(&state, t1_collision()).at("t1 collision")?;
    state = log.apply(&state, kick("P1", "2'", "3'")).at("t1 pointer")?;
    run.step("t1 collision and pointer", &state, distribution(&state, "P1")?, None, cuts)?;
    state = log.apply(&state, t2_collision()).at("t2 collision")?;
    state = log.apply(&state, kick("P2", "1'", "3''")).at("t2 pointer")?;
    state = log.apply(&state, drift()).at("drift")?;
    let coupled = state.clone();
    let h1 = run.step("fourfold entanglement", &coupled, distribution(&coupled, "P2")?, None, cuts)?[0];

    for name in ["A2", "A1", "P1", "P2"] {
        let h = cut_entropy(&coupled, &[name])?;
        run.above(&alloc::format!("entropy {name}|rest"), 0.0, h, "every party is entangled with the others");
        run.metric(&alloc::format!("entropy_{name}"), h);
    }

    let back = time_reverse(&coupled, &log).at("time reversal before readout")?;
    let h2 = run.step("time reversed before readout", &back, vec![], None, cuts)?[0];
    run.close("time reversal before readout", 1.0, fidelity(&back, &source)?, 1e-9, "unitarity of the logged ops");
    run.below("entropy before collisions", 1e-9, h0, "product after the splits");
    run.above("entropy during the interaction", 0.1, h1, "collision entangles atoms and pointers");
    run.below("entropy after reversal", 1e-9, h2, "reversal undoes the entanglement");

    // sampled pointer readout
    let r1 = sample_measure(&coupled, "P1", &mut run.rng).at("pointer readout")?;
    let r2 = sample_measure(&r1.post_state, "P2", &mut run.rng).at("pointer readout")?;
    log.record_projection("P1, P2 readout");
    let readout = r2.post_state;
    let label = alloc::format!("readout P1={} P2={}", r1.event[0].1, r2.event[0].1);
    run.step(&label, &readout, vec![], Some(r1.probability * r2.probability), cuts)?;
    let refused = matches!(time_reverse(&readout, &log), Err(Error::NotInvertible(_)));
    run.holds("time reversal across the readout refused", refused, "projections are not invertible");

    // run the unitary history backwards on every readout outcome
    let unitary = unitary_log(&log);
    let mut average = 0.0;
    let mut total = 0.0;
    for (p1, p2) in [("rest", "rest"), ("kicked", "rest"), ("rest", "kicked"), ("kicked", "kicked")] {
        let rec = match postselect(&coupled, &[("P1", p1), ("P2", p2)]) {
            Ok(rec) => rec,
            Err(e) if e.is_impossible_outcome() => continue,
            Err(e) => return Err(e.at_step("readout branches")),
        };
        let reversed = time_reverse(&rec.post_state, &unitary).at("reversal after readout")?;
        let home = joint_probability(&reversed, &[("A2", "src")])?;
        average += rec.probability * home;
        total += rec.probability;
        if (p1, p2) == ("rest", "rest") {
            let f = fidelity(&reversed, &source)?;
            run.below("full reversal after a silent readout", 1.0, f, "readout removed the crossing branches");
            run.close("full reversal fidelity after a silent readout", 0.5, f, 1e-10, "A1 left on path 4 returns half-way");
            run.metric("reversal_fidelity_silent", f);
        }
    }
    run.close("readout outcomes exhausted", 1.0, total, 1e-10, "pointer outcomes are complete");
    run.below("A2 return probability after readout", 1.0, average, "readout leaves a which-path record");
    run.close("A2 return probability after readout (outcome average)", 0.75, average, 1e-10, "1/2 silent x 1 + 2 x 1/4 kicked x 1/2");
    let sampled = time_reverse(&readout, &unitary).at("reversal after readout")?;
    run.metric("a2_return_sampled", joint_probability(&sampled, &[("A2", "src")])?);
    run.metric("a2_return_average", average);
    run.metric("p_readout_sampled", r1.probability * r2.probability);
    Ok(())
}
