//! Born-rule measurement and post-selection.
//!
//! Projective readouts return a [`MeasurementRecord`] carrying the Born weight
//! of the outcome and the renormalized post-state. Two-outcome partial
//! measurement uses the operators `K_click = √ε P_m` and
//! `K_none = P_rest + √(1−ε) P_m` on a monitored label `m`. Weak measurement
//! couples one subsystem to a discretized Gaussian pointer.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::Rng;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::grid::GridWavefunction;
use crate::register::{describe, StateVector};
use crate::{Error, Result, C64};

/// Outcomes with Born weight at or below this are treated as impossible.
pub const PROBABILITY_FLOOR: f64 = 1e-12;

/// Outcome of a measurement or post-selection.
#[derive(Debug, Clone)]
pub struct MeasurementRecord {
    /// `(subsystem, outcome)` pairs that were conditioned on.
    pub event: Vec<(String, String)>,
    pub probability: f64,
    pub post_state: StateVector,
}

/// Marginal outcome probabilities of `subsystem`, in label order.
pub fn born_probabilities(state: &StateVector, subsystem: &str) -> Result<Vec<(String, f64)>> {
    let reg = state.register();
    let s = reg.subsystem_index(subsystem)?;
    let spec = &reg.subsystems()[s];
    let mut weights = alloc::vec![0.0; spec.dim()];
    for (i, a) in state.iter() {
        weights[reg.digit(i, s)] += a.norm_sqr();
    }
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return Err(Error::ZeroNorm);
    }
    Ok(spec.labels().iter().cloned().zip(weights.into_iter().map(|w| w / total)).collect())
}

/// Born weight of a partial assignment.
pub fn joint_probability(state: &StateVector, condition: &[(&str, &str)]) -> Result<f64> {
    let reg = state.register();
    let cond = reg.condition(condition)?;
    let total = state.norm_sqr();
    if !(total > 0.0) {
        return Err(Error::ZeroNorm);
    }
    let hit: f64 = state
        .iter()
        .filter(|&(i, _)| cond.matches(reg, i))
        .map(|(_, a)| a.norm_sqr())
        .sum();
    Ok(hit / total)
}

fn keep_where(
    state: &StateVector,
    outcome: String,
    event: Vec<(String, String)>,
    keep: impl Fn(usize) -> bool,
) -> Result<MeasurementRecord> {
    let total = state.norm_sqr();
    let projected = state.map_amplitudes(|i, a| if keep(i) { a } else { C64::default() });
    let p = if total > 0.0 { projected.norm_sqr() / total } else { 0.0 };
    if p <= PROBABILITY_FLOOR {
        return Err(Error::ImpossibleOutcome { outcome, probability: p });
    }
    Ok(MeasurementRecord { event, probability: p, post_state: projected.normalized()? })
}

fn owned(a: &[(&str, &str)]) -> Vec<(String, String)> {
    a.iter().map(|(s, l)| (s.to_string(), l.to_string())).collect()
}

/// Projects onto a joint condition and renormalizes.
pub fn postselect(state: &StateVector, condition: &[(&str, &str)]) -> Result<MeasurementRecord> {
    let reg = state.register();
    let cond = reg.condition(condition)?;
    keep_where(state, describe(condition), owned(condition), |i| cond.matches(reg, i))
}

/// Projects `subsystem` onto `label`.
pub fn project(state: &StateVector, subsystem: &str, label: &str) -> Result<MeasurementRecord> {
    postselect(state, &[(subsystem, label)])
}

/// Projects onto the complement of a joint condition (a null result of a
/// detector that fires on `condition`). The event is recorded as `!label`.
pub fn exclude(state: &StateVector, condition: &[(&str, &str)]) -> Result<MeasurementRecord> {
    let reg = state.register();
    let cond = reg.condition(condition)?;
    let event = condition.iter().map(|(s, l)| (s.to_string(), format!("!{l}"))).collect();
    keep_where(state, format!("not ({})", describe(condition)), event, |i| !cond.matches(reg, i))
}

/// Draws an outcome of `subsystem` from its Born distribution and projects.
pub fn sample_measure<R: Rng + ?Sized>(state: &StateVector, subsystem: &str, rng: &mut R) -> Result<MeasurementRecord> {
    let probs = born_probabilities(state, subsystem)?;
    let label = draw(&probs, rng.gen::<f64>());
    project(state, subsystem, &label)
}

fn draw(probs: &[(String, f64)], u: f64) -> String {
    let mut acc = 0.0;
    let mut last = None;
    for (label, p) in probs {
        if *p <= PROBABILITY_FLOOR {
            continue;
        }
        acc += p;
        last = Some(label);
        if u < acc {
            return label.clone();
        }
    }
    // u landed in the rounding gap above the accumulated sum
    last.cloned().unwrap_or_default()
}

/// Coupling fraction ε ∈ [0, 1] of a partial measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartialStrength(f64);

impl PartialStrength {
    pub fn new(eps: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&eps) {
            Ok(PartialStrength(eps))
        } else {
            Err(Error::InvalidStrength(eps))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartialOutcome {
    Click,
    NoClick,
}

impl PartialOutcome {
    pub fn label(self) -> &'static str {
        match self {
            PartialOutcome::Click => "click",
            PartialOutcome::NoClick => "no-click",
        }
    }
}

/// Applies the Kraus operator for `outcome` and renormalizes.
pub fn partial_measure_outcome(
    state: &StateVector,
    subsystem: &str,
    monitored: &str,
    strength: PartialStrength,
    outcome: PartialOutcome,
) -> Result<MeasurementRecord> {
    let reg = state.register();
    let s = reg.subsystem_index(subsystem)?;
    let m = reg.label_index(s, monitored)?;
    let eps = strength.value();
    let (on, off) = match outcome {
        PartialOutcome::Click => (eps.sqrt(), 0.0),
        PartialOutcome::NoClick => ((1.0 - eps).sqrt(), 1.0),
    };
    let total = state.norm_sqr();
    let image = state.map_amplitudes(|i, a| if reg.digit(i, s) == m { a * on } else { a * off });
    let p = if total > 0.0 { image.norm_sqr() / total } else { 0.0 };
    let event = alloc::vec![(subsystem.to_string(), format!("{}@{monitored}", outcome.label()))];
    if p <= PROBABILITY_FLOOR {
        return Err(Error::ImpossibleOutcome { outcome: event[0].1.clone(), probability: p });
    }
    Ok(MeasurementRecord { event, probability: p, post_state: image.normalized()? })
}

/// Probability of a click: ε times the Born weight of the monitored label.
pub fn click_probability(state: &StateVector, subsystem: &str, monitored: &str, strength: PartialStrength) -> Result<f64> {
    Ok(strength.value() * joint_probability(state, &[(subsystem, monitored)])?)
}

/// Samples a partial measurement outcome.
pub fn partial_measure<R: Rng + ?Sized>(
    state: &StateVector,
    subsystem: &str,
    monitored: &str,
    strength: PartialStrength,
    rng: &mut R,
) -> Result<MeasurementRecord> {
    let pc = click_probability(state, subsystem, monitored, strength)?;
    let outcome = if rng.gen::<f64>() < pc { PartialOutcome::Click } else { PartialOutcome::NoClick };
    partial_measure_outcome(state, subsystem, monitored, strength, outcome)
}

/// Result of erasing a partial measurement.
#[derive(Debug, Clone)]
pub struct Erasure {
    /// Strength ε′ of the erasing measurement on the boosted label.
    pub strength: f64,
    /// Probability of the no-click outcome that completes the erasure.
    pub success_probability: f64,
    pub post_state: StateVector,
}

/// Partially measures `boosted` with the strength that equalizes its weight
/// with `suppressed` on a no-click outcome: `(1−ε′)|a|² = |b|²`.
pub fn erase_partial(state: &StateVector, subsystem: &str, boosted: &str, suppressed: &str) -> Result<Erasure> {
    let a2 = joint_probability(state, &[(subsystem, boosted)])?;
    let b2 = joint_probability(state, &[(subsystem, suppressed)])?;
    if boosted == suppressed {
        return Err(Error::LabelCollision);
    }
    if b2 <= PROBABILITY_FLOOR {
        return Err(Error::ErasureImpossible);
    }
    if a2 < b2 {
        return Err(Error::InvalidParameter(format!(
            "`{boosted}` carries less weight ({a2}) than `{suppressed}` ({b2})"
        )));
    }
    let eps = (1.0 - b2 / a2).clamp(0.0, 1.0);
    let rec = partial_measure_outcome(state, subsystem, boosted, PartialStrength::new(eps)?, PartialOutcome::NoClick)?;
    Ok(Erasure { strength: eps, success_probability: rec.probability, post_state: rec.post_state })
}

/// Pointer settings for a weak measurement. Lengths are in pointer units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakParams {
    /// Pointer shift per unit eigenvalue.
    pub coupling: f64,
    /// Standard deviation of the pointer position density.
    pub sigma: f64,
    pub points: usize,
    pub x_min: f64,
    pub x_max: f64,
}

/// Required pointer samples per σ.
pub const POINTER_POINTS_PER_SIGMA: f64 = 8.0;

impl WeakParams {
    /// A symmetric pointer domain wide enough for shifts up to
    /// `coupling · max_eigenvalue` plus ten widths, resolved at 8 points per σ.
    pub fn auto(coupling: f64, sigma: f64, max_eigenvalue: f64) -> Result<Self> {
        if !(sigma > 0.0) || !coupling.is_finite() || !max_eigenvalue.is_finite() {
            return Err(Error::InvalidParameter(format!("pointer coupling {coupling}, width {sigma}")));
        }
        let half = (coupling * max_eigenvalue).abs() + 10.0 * sigma;
        let needed = (2.0 * half * POINTER_POINTS_PER_SIGMA / sigma).ceil() as usize;
        let points = needed.max(64).next_power_of_two();
        Ok(WeakParams { coupling, sigma, points, x_min: -half, x_max: half })
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.points as f64
    }

    fn validate(&self, shifts: &[f64]) -> Result<()> {
        if !(self.sigma > 0.0) || !self.coupling.is_finite() {
            return Err(Error::InvalidParameter(format!("pointer coupling {}, width {}", self.coupling, self.sigma)));
        }
        let required = self.sigma / POINTER_POINTS_PER_SIGMA;
        if self.dx() > required {
            return Err(Error::UnderResolved { spacing: self.dx(), width: self.sigma, required });
        }
        for &d in shifts {
            if d - 8.0 * self.sigma < self.x_min || d + 8.0 * self.sigma > self.x_max {
                return Err(Error::DomainTooSmall {
                    x_min: self.x_min,
                    x_max: self.x_max,
                    what: format!("pointer shifted by {d}"),
                });
            }
        }
        Ok(())
    }
}

/// System ⊗ pointer after the coupling `Σ_k a_k |k⟩ φ(x − g λ_k)`.
#[derive(Debug, Clone)]
pub struct WeakCoupled {
    system: StateVector,
    subsystem: usize,
    /// Pointer wavefunction for each label of the measured subsystem.
    pointers: BTreeMap<usize, GridWavefunction>,
    /// Born weight of each label.
    weights: BTreeMap<usize, f64>,
    cdf: Vec<f64>,
}

impl WeakCoupled {
    pub fn system(&self) -> &StateVector {
        &self.system
    }

    /// Pointer position grid.
    pub fn positions(&self) -> Vec<f64> {
        self.pointers.values().next().map(|p| p.positions()).unwrap_or_default()
    }

    /// Marginal pointer distribution (probability per cell).
    pub fn pointer_distribution(&self) -> Vec<f64> {
        let mut prev = 0.0;
        self.cdf
            .iter()
            .map(|&c| {
                let p = c - prev;
                prev = c;
                p
            })
            .collect()
    }

    /// Mean pointer position, `g⟨A⟩` up to discretization.
    pub fn pointer_mean(&self) -> f64 {
        self.positions().iter().zip(self.pointer_distribution()).map(|(x, p)| x * p).sum()
    }

    /// System state conditioned on the pointer reading at cell `cell`.
    pub fn conditional_state(&self, cell: usize) -> Result<StateVector> {
        let reg = self.system.register();
        let s = self.subsystem;
        let image = self.system.map_amplitudes(|i, a| a * self.pointers[&reg.digit(i, s)].amplitudes()[cell]);
        image.normalized()
    }

    /// Average over readings of the fidelity between the conditional system
    /// state and the pre-measurement state.
    pub fn average_fidelity(&self) -> f64 {
        let reg = self.system.register();
        let s = self.subsystem;
        let dx = self.pointers.values().next().map_or(0.0, |p| p.dx());
        let n = self.cdf.len();
        let mut total = 0.0;
        for cell in 0..n {
            // ⟨ψ|a_x⟩ with a_x the unnormalized conditional state; summing
            // |⟨ψ|a_x⟩|² dx averages the fidelity with weight P(x)
            let overlap: C64 = self
                .system
                .iter()
                .map(|(i, a)| a.norm_sqr() * self.pointers[&reg.digit(i, s)].amplitudes()[cell])
                .sum();
            total += overlap.norm_sqr() * dx;
        }
        total
    }
}

/// Couples `subsystem` to a Gaussian pointer centred at zero, shifting each
/// branch by `g · observable(label)`. Labels missing from `observable` have
/// eigenvalue zero.
pub fn weak_measure(
    state: &StateVector,
    subsystem: &str,
    observable: &[(&str, f64)],
    params: &WeakParams,
) -> Result<WeakCoupled> {
    let reg = state.register();
    let s = reg.subsystem_index(subsystem)?;
    let mut eigen = BTreeMap::new();
    for &(label, value) in observable {
        eigen.insert(reg.label_index(s, label)?, value);
    }
    let mut weights: BTreeMap<usize, f64> = BTreeMap::new();
    for (i, a) in state.iter() {
        *weights.entry(reg.digit(i, s)).or_default() += a.norm_sqr();
    }
    let total: f64 = weights.values().sum();
    if !(total > 0.0) {
        return Err(Error::ZeroNorm);
    }
    let shifts: Vec<f64> = weights.keys().map(|l| params.coupling * eigen.get(l).copied().unwrap_or(0.0)).collect();
    params.validate(&shifts)?;
    let base = GridWavefunction::gaussian(params.points, params.x_min, params.x_max, 0.0, params.sigma)?;
    let mut pointers = BTreeMap::new();
    for (&label, &shift) in weights.keys().zip(&shifts) {
        let p = if shift == 0.0 {
            base.clone()
        } else {
            GridWavefunction::gaussian(params.points, params.x_min, params.x_max, shift, params.sigma)?
        };
        pointers.insert(label, p);
    }
    let mut density = alloc::vec![0.0; params.points];
    for (label, w) in &weights {
        for (d, p) in density.iter_mut().zip(pointers[label].probabilities()) {
            *d += w / total * p;
        }
    }
    let norm: f64 = density.iter().sum();
    let mut acc = 0.0;
    let cdf = density
        .iter()
        .map(|d| {
            acc += d / norm;
            acc
        })
        .collect();
    Ok(WeakCoupled { system: state.normalized()?, subsystem: s, pointers, weights, cdf })
}

/// Samples a pointer position and returns it with the conditional system state.
pub fn read_pointer<R: Rng + ?Sized>(coupled: &WeakCoupled, rng: &mut R) -> Result<(f64, StateVector)> {
    let cell = sample_cell(coupled, rng);
    let x = coupled.positions()[cell];
    Ok((x, coupled.conditional_state(cell)?))
}

/// Samples `count` pointer readings without building post-states.
pub fn sample_readings<R: Rng + ?Sized>(coupled: &WeakCoupled, count: usize, rng: &mut R) -> Vec<f64> {
    let xs = coupled.positions();
    (0..count).map(|_| xs[sample_cell(coupled, rng)]).collect()
}

fn sample_cell<R: Rng + ?Sized>(coupled: &WeakCoupled, rng: &mut R) -> usize {
    let u = rng.gen::<f64>() * coupled.cdf.last().copied().unwrap_or(1.0);
    coupled.cdf.partition_point(|&c| c <= u).min(coupled.cdf.len() - 1)
}

/// Expectation of a diagonal observable on `subsystem`.
pub fn expectation(state: &StateVector, subsystem: &str, observable: &[(&str, f64)]) -> Result<f64> {
    let probs = born_probabilities(state, subsystem)?;
    let mut total = 0.0;
    for (label, p) in &probs {
        total += p * observable.iter().find(|(l, _)| l == label).map_or(0.0, |(_, v)| *v);
    }
    Ok(total)
}

impl WeakCoupled {
    /// Born weights of the measured subsystem's labels.
    pub fn label_weights(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.weights.iter().map(|(&l, &w)| (l, w))
    }
}
