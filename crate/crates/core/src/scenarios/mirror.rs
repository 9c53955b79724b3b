//! The ghostly mirror.
//!
//! A spin mirror starts in Z+ while an electron is split over L and R. The
//! Hardy split puts the mirror into X+ and X-; only the (X-, L) pairing
//! scatters the electron. Post-selecting on no scattering and then reading
//! the mirror in the Z basis leaves, one time in six, the mirror in Z- and the
//! electron on L.
//!
//! The mirror is a four-port subsystem {Z+, Z-, X+, X-} and the basis change
//! is the self-inverse splitter Z+/Z- <-> X+/X-.

use alloc::sync::Arc;
use alloc::vec;

use super::{c, distribution, At, Run};
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::evolve::{Op, OpLog};
use crate::measure::postselect;
use crate::register::{fidelity, new_register, superpose, Register, StateVector, SubsystemSpec};
use crate::Result;

pub(crate) fn register() -> Result<Arc<Register>> {
    new_register(vec![
        SubsystemSpec::new("mirror", ["Z+", "Z-", "X+", "X-"]),
        SubsystemSpec::new("e-", ["L", "R"]),
        SubsystemSpec::new("scatter", ["none", "scattered"]),
    ])
}

pub(crate) fn hardy_split() -> Op {
    Op::split("mirror", "Z+", "Z-", ("X+", "X-"))
}

pub(crate) fn scattering() -> Op {
    Op::swap(&[("mirror", "X-"), ("e-", "L")], &[("scatter", "none")], &[("scatter", "scattered")])
}

type Term3 = (f64, &'static str, &'static str);

fn state(reg: &Arc<Register>, terms: &[Term3]) -> Result<StateVector> {
    let full: vec::Vec<[(&str, &str); 3]> =
        terms.iter().map(|&(_, m, e)| [("mirror", m), ("e-", e), ("scatter", "none")]).collect();
    let t: vec::Vec<_> = terms.iter().zip(&full).map(|(&(a, _, _), f)| (c(a), &f[..])).collect();
    superpose(reg, &t, true)
}

fn coefficient_error(s: &StateVector, terms: &[Term3]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &(a, m, e) in terms {
        let z = s.amplitude(&[("mirror", m), ("e-", e), ("scatter", "none")])?;
        worst = worst.max((z - c(a)).norm());
    }
    Ok(worst)
}

pub(crate) fn ghostly_mirror(run: &mut Run) -> Result<()> {
    let reg = register()?;
    let r2 = 0.5f64.sqrt();
    let r3 = 1.0 / 3f64.sqrt();
    let r6 = 1.0 / 6f64.sqrt();
    let cuts: &[(&str, &[&str])] = &[("mirror|rest", &["mirror"])];
    let mut log = OpLog::new();

    let initial = state(&reg, &[(r2, "Z+", "L"), (r2, "Z+", "R")])?;
    run.step("mirror Z+, electron split", &initial, vec![], None, cuts)?;

    let split = log.apply(&initial, hardy_split()).at("Hardy split")?;
    run.step("Hardy split", &split, vec![], None, cuts)?;
    let t9 = [(0.5, "X+", "L"), (0.5, "X+", "R"), (0.5, "X-", "L"), (0.5, "X-", "R")];
    run.close("Hardy split coefficients", 0.0, coefficient_error(&split, &t9)?, 1e-10, "(X+ + X-)(L + R)/2");

    let scattered = log.apply(&split, scattering()).at("scattering")?;
    run.step("scattering", &scattered, distribution(&scattered, "scatter")?, None, cuts)?;
    let quiet = postselect(&scattered, &[("scatter", "none")]).at("no scattering")?;
    log.record_projection("scatter=none");
    run.step("no scattering recorded", &quiet.post_state, vec![], Some(quiet.probability), cuts)?;
    let t10 = [(r3, "X+", "L"), (r3, "X+", "R"), (r3, "X-", "R")];
    run.close("no-scatter coefficients", 0.0, coefficient_error(&quiet.post_state, &t10)?, 1e-10, "[X+(L + R) + X- R]/sqrt3");
    run.close("P(no scattering)", 0.75, quiet.probability, 1e-10, "squared weight of the three unscattered branches");

    let measured = log.apply(&quiet.post_state, hardy_split()).at("Z readout basis")?;
    run.step("Z readout basis", &measured, distribution(&measured, "mirror")?, None, cuts)?;
    let t11 = [(r6, "Z+", "L"), (2.0 * r6, "Z+", "R"), (r6, "Z-", "L")];
    run.close("Z-basis coefficients", 0.0, coefficient_error(&measured, &t11)?, 1e-10, "[Z+(L + 2R) + Z- L]/sqrt6");
    run.close(
        "Z-basis state",
        1.0,
        fidelity(&measured, &state(&reg, &t11)?)?,
        1e-10,
        "[Z+(L + 2R) + Z- L]/sqrt6",
    );

    let down = postselect(&measured, &[("mirror", "Z-")]).at("mirror spin down")?;
    log.record_projection("mirror=Z-");
    run.step("mirror spin down", &down.post_state, vec![], Some(down.probability), cuts)?;
    run.close("P(Z-)", 1.0 / 6.0, down.probability, 1e-10, "squared Z- coefficient (1/sqrt6)^2");
    let last = StateVector::basis_state(&reg, &[("mirror", "Z-"), ("e-", "L"), ("scatter", "none")])?;
    run.close("final state Z- L", 1.0, fidelity(&down.post_state, &last)?, 1e-10, "mirror down, electron on the left");

    run.metric("p_no_scatter", quiet.probability);
    run.metric("p_spin_down", down.probability);
    run.note("the particle is an electron throughout; the closing statement of the original account calls it a photon");
    Ok(())
}
