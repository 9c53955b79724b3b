//! The electron-positron oblivion experiment.
//!
//! Both particles are split into two paths. Paths 2 and 3 cross at t1 and
//! paths 1 and 3 at t2; a crossing annihilates the pair into a conditional
//! photon that one of two far detectors would absorb. Both detectors staying
//! silent leaves the positron on path 4 while the electron stays superposed.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use super::{c, distribution, At, Run};
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::entangle::{is_product, schmidt, PRODUCT_TOLERANCE};
use crate::evolve::{recombine_probability, time_reverse, Op, OpLog};
use crate::measure::project;
use crate::register::{fidelity, new_register, superpose, Register, StateVector, SubsystemSpec};
use crate::{Error, Result};

pub(crate) fn register() -> Result<Arc<Register>> {
    new_register(vec![
        SubsystemSpec::new("e-", ["src", "dark", "1", "2", "ann"]),
        SubsystemSpec::new("e+", ["src", "dark", "3", "4", "ann"]),
        SubsystemSpec::new("photon", ["none", "pair@t1", "pair@t2"]),
        SubsystemSpec::new("det1", ["READY", "CLICK"]),
        SubsystemSpec::new("det2", ["READY", "CLICK"]),
    ])
}

pub(crate) fn source(reg: &Arc<Register>) -> Result<StateVector> {
    StateVector::basis_state(
        reg,
        &[("e-", "src"), ("e+", "src"), ("photon", "none"), ("det1", "READY"), ("det2", "READY")],
    )
}

pub(crate) fn split_ops() -> Vec<Op> {
    vec![Op::split("e-", "src", "dark", ("1", "2")), Op::split("e+", "src", "dark", ("3", "4"))]
}

/// Annihilation on crossing paths plus the detector reading the photon.
pub(crate) fn coupling_ops(electron: &str, positron: &str, flag: &str, detector: &str) -> Vec<Op> {
    vec![
        Op::swap(
            &[],
            &[("e-", electron), ("e+", positron), ("photon", "none")],
            &[("e-", "ann"), ("e+", "ann"), ("photon", flag)],
        ),
        Op::swap(&[("photon", flag)], &[(detector, "READY")], &[(detector, "CLICK")]),
    ]
}

pub(crate) fn t1_ops() -> Vec<Op> {
    coupling_ops("2", "3", "pair@t1", "det1")
}

pub(crate) fn t2_ops() -> Vec<Op> {
    coupling_ops("1", "3", "pair@t2", "det2")
}

type Branch = (&'static str, &'static str);

fn golden(reg: &Arc<Register>, branches: &[Branch]) -> Result<StateVector> {
    let full: Vec<[(&str, &str); 5]> = branches
        .iter()
        .map(|&(e, p)| [("e-", e), ("e+", p), ("photon", "none"), ("det1", "READY"), ("det2", "READY")])
        .collect();
    let terms: Vec<_> = full.iter().map(|a| (c(1.0), &a[..])).collect();
    superpose(reg, &terms, true)
}

/// `½(|1⟩+|2⟩)(|3⟩+|4⟩)` with both detectors ready.
pub(crate) fn separable_state(reg: &Arc<Register>) -> Result<StateVector> {
    golden(reg, &[("1", "3"), ("1", "4"), ("2", "3"), ("2", "4")])
}

/// `(1/√3)[(|1⟩+|2⟩)|4⟩ + |1⟩|3⟩]` with both detectors ready.
pub(crate) fn interval_state(reg: &Arc<Register>) -> Result<StateVector> {
    golden(reg, &[("1", "4"), ("2", "4"), ("1", "3")])
}

/// `(1/√2)(|1⟩+|2⟩)|4⟩` with both detectors ready.
pub(crate) fn final_state(reg: &Arc<Register>) -> Result<StateVector> {
    golden(reg, &[("1", "4"), ("2", "4")])
}

const ELECTRON_CUT: &[&str] = &["e-"];

fn apply_all(log: &mut OpLog, mut state: StateVector, ops: Vec<Op>, step: &str) -> Result<StateVector> {
    for op in ops {
        state = log.apply(&state, op).at(step)?;
    }
    Ok(state)
}

/// States along the null-result timeline, shared with `hardy_ci`.
struct Timeline {
    reg: Arc<Register>,
    source: StateVector,
    separable: StateVector,
    coupled_t1: StateVector,
    interval: StateVector,
    p_ready_t1: f64,
    log: OpLog,
}

fn to_interval(run: &mut Run) -> Result<Timeline> {
    let reg = register()?;
    let source = source(&reg)?;
    let mut log = OpLog::new();
    let cuts: &[(&str, &[&str])] = &[("e-|rest", ELECTRON_CUT)];
    run.step("source", &source, vec![], None, cuts)?;

    let separable = apply_all(&mut log, source.clone(), split_ops(), "split")?;
    run.step("split", &separable, vec![], None, cuts)?;

    let coupled_t1 = apply_all(&mut log, separable.clone(), t1_ops(), "t1 coupling")?;
    run.step("t1 coupling", &coupled_t1, distribution(&coupled_t1, "det1")?, None, cuts)?;

    let rec = project(&coupled_t1, "det1", "READY").at("t1 null result")?;
    log.record_projection("det1=READY");
    run.step("t1 null result", &rec.post_state, vec![], Some(rec.probability), cuts)?;
    Ok(Timeline {
        reg,
        source,
        separable,
        coupled_t1,
        interval: rec.post_state,
        p_ready_t1: rec.probability,
        log,
    })
}

pub(crate) fn qo_core(run: &mut Run) -> Result<()> {
    let tl = to_interval(run)?;
    let reg = tl.reg.clone();
    let mut log = tl.log;
    let cuts: &[(&str, &[&str])] = &[("e-|rest", ELECTRON_CUT)];

    let coupled_t2 = apply_all(&mut log, tl.interval.clone(), t2_ops(), "t2 coupling")?;
    run.step("t2 coupling", &coupled_t2, distribution(&coupled_t2, "det2")?, None, cuts)?;
    let rec = project(&coupled_t2, "det2", "READY").at("t2 null result")?;
    log.record_projection("det2=READY");
    let last = rec.post_state;
    run.step("t2 null result", &last, vec![], Some(rec.probability), cuts)?;

    run.close(
        "separable state after split",
        1.0,
        fidelity(&tl.separable, &separable_state(&reg)?)?,
        1e-10,
        "four equal 1/2 amplitudes of the split pair",
    );
    run.close("P(det1 CLICK)", 0.25, 1.0 - tl.p_ready_t1, 1e-10, "Born weight of the crossing branch (1/2)^2");
    run.close(
        "interval state after t1 silence",
        1.0,
        fidelity(&tl.interval, &interval_state(&reg)?)?,
        1e-10,
        "three surviving branches at 1/sqrt3",
    );
    run.close(
        "P(det2 CLICK | t1 silence)",
        1.0 / 3.0,
        1.0 - rec.probability,
        1e-10,
        "Born weight (1/sqrt3)^2 of the second crossing branch",
    );
    run.close(
        "final state after t2 silence",
        1.0,
        fidelity(&last, &final_state(&reg)?)?,
        1e-10,
        "electron superposed, positron on path 4",
    );
    let p_silence = tl.p_ready_t1 * rec.probability;
    run.close("P(total silence)", 0.5, p_silence, 1e-10, "sequential Born product (3/4)(2/3)");

    let h = |label: &str| -> f64 {
        run.report.step(label).map_or(f64::NAN, |s| s.entropies[0].1)
    };
    let (h0, h1, h2) = (h("split"), h("t1 null result"), h("t2 null result"));
    run.below("entropy before t1", 1e-9, h0, "product state after the split");
    run.above("entropy on the critical interval", 0.1, h1, "entangled three-branch state");
    run.below("entropy after t2", 1e-9, h2, "final state is a product");

    let r_e = recombine_probability(&last, "e-", "src", "dark", ("1", "2")).at("recombine e-")?;
    let r_p = recombine_probability(&last, "e+", "src", "dark", ("3", "4")).at("recombine e+")?;
    run.close("electron recombination", 1.0, r_e, 1e-9, "inverse split on (|1>+|2>)/sqrt2");
    run.close("positron recombination", 0.5, r_p, 1e-9, "inverse split on |4>");

    // reverse the unitary prefix up to the first projection
    let unitary: OpLog = split_ops().into_iter().chain(t1_ops()).collect();
    let back = time_reverse(&tl.coupled_t1, &unitary).at("time reversal")?;
    run.close("time reversal before any projection", 1.0, fidelity(&back, &tl.source)?, 1e-9, "unitarity of the logged ops");
    let refused = matches!(time_reverse(&last, &log), Err(Error::NotInvertible(_)));
    run.holds("time reversal across a projection refused", refused, "projections are not invertible");

    run.metric("p_click_t1", 1.0 - tl.p_ready_t1);
    run.metric("p_click_t2_given_silence", 1.0 - rec.probability);
    run.metric("p_total_silence", p_silence);
    run.metric("entropy_interval", h1);
    run.metric("recombine_electron", r_e);
    run.metric("recombine_positron", r_p);
    run.note("the final state is a product state even though it is often described as entangled");
    Ok(())
}

pub(crate) fn hardy_ci(run: &mut Run) -> Result<()> {
    let tl = to_interval(run)?;
    let pair = tl.interval.restrict(&["e-", "e+"]).at("restrict to the pair")?;
    let pair_reg = pair.register().clone();
    let golden = superpose(
        &pair_reg,
        &[
            (c(1.0), &[("e-", "1"), ("e+", "4")]),
            (c(1.0), &[("e-", "2"), ("e+", "4")]),
            (c(1.0), &[("e-", "1"), ("e+", "3")]),
        ],
        true,
    )?;
    run.step("critical interval pair", &pair, vec![], None, &[("e-|e+", ELECTRON_CUT)])?;
    run.close("Hardy pair state", 1.0, fidelity(&pair, &golden)?, 1e-10, "three-branch Hardy amplitudes");

    let spectrum = schmidt(&pair, &["e-"], &["e+"])?;
    let r5 = 5f64.sqrt();
    let (l0, l1) = ((3.0 + r5) / 6.0, (3.0 - r5) / 6.0);
    let coeffs = spectrum.coefficients();
    run.close("Schmidt coefficient 1", l0, coeffs.first().copied().unwrap_or(f64::NAN), 1e-9, "eigenvalues of M M^T, M = [[1,1],[0,1]]/sqrt3");
    run.close("Schmidt coefficient 2", l1, coeffs.get(1).copied().unwrap_or(f64::NAN), 1e-9, "eigenvalues of M M^T, M = [[1,1],[0,1]]/sqrt3");
    let h_expected = -(l0 * l0.log2() + l1 * l1.log2());
    run.close("pair entropy", h_expected, spectrum.entropy(), 1e-9, "-sum l log2 l over the closed-form spectrum");
    run.holds("pair is entangled", !is_product(&pair, &["e-"], &["e+"], PRODUCT_TOLERANCE)?, "rank-2 spectrum");

    let on3 = project(&pair, "e+", "3").at("positron on 3")?;
    let forced = crate::measure::joint_probability(&on3.post_state, &[("e-", "1")])?;
    run.step("positron found on 3", &on3.post_state, distribution(&on3.post_state, "e-")?, Some(on3.probability), &[])?;
    run.close("P(e- on 1 | e+ on 3)", 1.0, forced, 1e-12, "only the (1,3) branch carries path 3");
    run.close("P(e+ on 3)", 1.0 / 3.0, on3.probability, 1e-12, "Born weight of the (1,3) branch");
    let on4 = project(&pair, "e+", "4").at("positron on 4")?;
    let split4 = crate::measure::joint_probability(&on4.post_state, &[("e-", "1")])?;
    run.close("P(e- on 1 | e+ on 4)", 0.5, split4, 1e-12, "electron stays superposed on the (1,2)|4 branch");

    // the same interval continued through t2
    let mut state = tl.interval;
    for op in t2_ops() {
        state = op.apply(&state).at("t2 coupling")?;
    }
    let rec = project(&state, "det2", "READY").at("t2 null result")?;
    let h = run.step("t2 null result", &rec.post_state, vec![], Some(rec.probability), &[("e-|rest", ELECTRON_CUT)])?;
    run.below("entropy after t2", 1e-9, h[0], "final state is a product");

    run.metric("schmidt_1", coeffs.first().copied().unwrap_or(f64::NAN));
    run.metric("schmidt_2", coeffs.get(1).copied().unwrap_or(f64::NAN));
    run.metric("entropy", spectrum.entropy());
    Ok(())
}
