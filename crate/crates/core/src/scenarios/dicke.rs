//! Tray and spoon: a null position measurement over the wide tray packet
//! localizes the particle in the narrow far spoon and widens its momentum
//! distribution by about the ratio of the widths.

use alloc::format;
use alloc::vec;

use super::{At, Params, Run};
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::grid::{gaussian_superposition, momentum_spectrum, window_project, DickeParams, GridWavefunction};
use crate::{Error, Result, C64};

fn spoon_packet(wf: &GridWavefunction, p: &DickeParams) -> Result<GridWavefunction> {
    let amps = wf
        .positions()
        .iter()
        .map(|x| {
            let d = x - p.spoon_center;
            C64::new((-d * d / (2.0 * p.spoon_width * p.spoon_width)).exp(), 0.0)
        })
        .collect();
    GridWavefunction::new(wf.x_min(), wf.x_max(), amps)?.normalized()
}

fn overlap(a: &GridWavefunction, b: &GridWavefunction) -> f64 {
    let s: C64 = a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| x.conj() * y).sum();
    (s * a.dx()).norm_sqr()
}

pub(crate) fn dicke_tray_spoon(run: &mut Run, params: &Params) -> Result<()> {
    let tray = params.get("tray_width");
    let p = DickeParams {
        tray_width: tray,
        spoon_width: params.get("l_spoon"),
        tray_center: 0.0,
        spoon_center: params.get("separation") * tray,
        spoon_amplitude: params.get("eps"),
    };
    let points = params.count("points");
    if !points.is_power_of_two() {
        return Err(Error::ParameterOutOfRange {
            name: "points".into(),
            value: points as f64,
            reason: "must be a power of two".into(),
        });
    }
    let wf = gaussian_superposition(&p, points, None).at("tray/spoon superposition")?;
    let eps2 = p.spoon_amplitude * p.spoon_amplitude;
    let ratio = p.tray_width / p.spoon_width;

    let pre = momentum_spectrum(&wf);
    let (xm, pm) = (wf.position_moments(), pre.moments());
    let spoon_mass = wf.mass_in(p.spoon_window());
    run.bare_step(
        "tray/spoon superposition",
        vec![("tray window".into(), wf.mass_in(p.tray_window())), ("spoon window".into(), spoon_mass)],
        None,
    );
    run.below("boundary amplitude ratio", crate::grid::CONTAINMENT, wf.boundary_ratio(), "wavefunction contained in the domain");
    run.close("Parseval before the tray measurement", wf.norm_sqr(), pre.probabilities().iter().sum(), 1e-9, "unitary DFT");
    run.close("spoon window mass", eps2, spoon_mass, 0.1 * eps2, "quadrature of the weighted spoon packet");
    run.at_least("uncertainty product before", 0.5 - 1e-3, xm.std * pm.std, "Heisenberg bound with hbar = 1");

    let (prob, post) = window_project(&wf, p.tray_window(), false).at("tray null result")?;
    let spec = momentum_spectrum(&post);
    let (xq, pq) = (post.position_moments(), spec.moments());
    run.bare_step(
        "tray null result",
        vec![("spoon window".into(), post.mass_in(p.spoon_window())), ("elsewhere".into(), 1.0 - post.mass_in(p.spoon_window()))],
        Some(prob),
    );
    run.close("P(tray null result)", eps2, prob, 0.1 * eps2, "spoon weight eps^2");
    run.at_least("post-selected state is the spoon packet", 1.0 - 1e-6, overlap(&post, &spoon_packet(&post, &p)?), "normalized spoon Gaussian");
    run.close("Parseval after the tray measurement", 1.0, spec.probabilities().iter().sum(), 1e-9, "unitary DFT");
    run.at_least("uncertainty product after", 0.5 - 1e-3, xq.std * pq.std, "Heisenberg bound with hbar = 1");
    let spread = pq.std / pm.std;
    run.close("momentum spread ratio", ratio, spread, 0.2 * ratio, "Fourier widths 1/(sqrt2 L) and 1/(sqrt2 l)");

    // momentum mass outside three tray widths, carried by the spoon before any measurement
    let tail = pre.tail_mass(3.0 / (2f64.sqrt() * p.tray_width));
    run.metric("position_std_pre", xm.std);
    run.metric("momentum_std_pre", pm.std);
    run.metric("momentum_std_post", pq.std);
    run.metric("momentum_std_ratio", spread);
    run.metric("momentum_variance_ratio", spread * spread);
    run.metric("p_tray_null", prob);
    run.metric("momentum_tail_mass_pre", tail);
    run.note(&format!(
        "grid: {} points on [{}, {}], spacing {}",
        points,
        wf.x_min(),
        wf.x_max(),
        wf.dx()
    ));
    Ok(())
}
