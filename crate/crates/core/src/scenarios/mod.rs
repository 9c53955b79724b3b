//! Scripted, self-checking experiments.
//!
//! Each scenario builds its register, runs a timeline of unitary steps and
//! post-selections, and records a [`ScenarioReport`]: a step-by-step state
//! summary plus named checks comparing computed numbers with golden values.
//! Runs are deterministic for a fixed `(name, params, seed)`.

mod collision;
mod dicke;
mod interference;
mod mirror;
mod oblivion;
mod partial;
mod zeno;

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::entangle::cut_entropy;
use crate::register::StateVector;
use crate::{Error, Result, C64};

/// Number of amplitudes kept in each step's state summary.
pub const SUMMARY_TERMS: usize = 8;

/// One amplitude of a state summary.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub assignment: Vec<(String, String)>,
    pub amplitude: C64,
}

/// A point on a scenario timeline.
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub label: String,
    /// Largest amplitudes of the state after this step (empty for grid states).
    pub state: Vec<Term>,
    /// Outcome distribution of the readout at this step, if any.
    pub distribution: Vec<(String, f64)>,
    /// Born weight of the post-selection performed at this step, if any.
    pub probability: Option<f64>,
    /// Entanglement entropies in bits, keyed by cut (`a|b`).
    pub entropies: Vec<(String, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparison {
    /// `|actual − expected| ≤ tolerance`
    Close,
    Below,
    Above,
    AtMost,
    AtLeast,
}

impl Comparison {
    pub fn name(self) -> &'static str {
        match self {
            Comparison::Close => "close",
            Comparison::Below => "below",
            Comparison::Above => "above",
            Comparison::AtMost => "at_most",
            Comparison::AtLeast => "at_least",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [Comparison::Close, Comparison::Below, Comparison::Above, Comparison::AtMost, Comparison::AtLeast]
            .into_iter()
            .find(|c| c.name() == s)
    }

    pub fn holds(self, actual: f64, expected: f64, tolerance: f64) -> bool {
        match self {
            Comparison::Close => (actual - expected).abs() <= tolerance,
            Comparison::Below => actual < expected,
            Comparison::Above => actual > expected,
            Comparison::AtMost => actual <= expected,
            Comparison::AtLeast => actual >= expected,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub expected: f64,
    pub actual: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub pass: bool,
    /// Where the expected value comes from.
    pub provenance: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioReport {
    pub scenario: String,
    pub params: Vec<(String, f64)>,
    pub seed: u64,
    pub steps: Vec<Step>,
    pub checks: Vec<Check>,
    /// Scalar summaries, stable across parameter values.
    pub metrics: Vec<(String, f64)>,
    pub notes: Vec<String>,
}

impl ScenarioReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    pub fn step(&self, label: &str) -> Option<&Step> {
        self.steps.iter().find(|s| s.label == label)
    }
}

/// A tunable scenario parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamSpec {
    pub name: &'static str,
    pub default: f64,
    pub min: f64,
    pub max: f64,
    pub min_inclusive: bool,
    pub max_inclusive: bool,
    pub integer: bool,
    pub description: &'static str,
}

impl ParamSpec {
    const fn real(name: &'static str, default: f64, min: f64, max: f64, description: &'static str) -> Self {
        ParamSpec { name, default, min, max, min_inclusive: true, max_inclusive: true, integer: false, description }
    }

    const fn int(name: &'static str, default: f64, min: f64, max: f64, description: &'static str) -> Self {
        ParamSpec { name, default, min, max, min_inclusive: true, max_inclusive: true, integer: true, description }
    }

    const fn open_min(mut self) -> Self {
        self.min_inclusive = false;
        self
    }

    const fn open_max(mut self) -> Self {
        self.max_inclusive = false;
        self
    }

    pub fn validate(&self, value: f64) -> Result<()> {
        let fail = |reason: String| Err(Error::ParameterOutOfRange { name: self.name.into(), value, reason });
        if !value.is_finite() {
            return fail("not finite".into());
        }
        if self.integer && value.fract() != 0.0 {
            return fail("must be an integer".into());
        }
        let low_ok = if self.min_inclusive { value >= self.min } else { value > self.min };
        let high_ok = if self.max_inclusive { value <= self.max } else { value < self.max };
        if !low_ok || !high_ok {
            return fail(self.range());
        }
        Ok(())
    }

    /// Interval notation, e.g. `(0, 0.785]`.
    pub fn range(&self) -> String {
        format!(
            "{}{}, {}{}",
            if self.min_inclusive { "[" } else { "(" },
            self.min,
            self.max,
            if self.max_inclusive { "]" } else { ")" }
        )
    }
}

/// Catalog entry.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioInfo {
    pub name: &'static str,
    /// What the scenario reproduces.
    pub anchor: &'static str,
    pub params: Vec<ParamSpec>,
}

const PI: f64 = core::f64::consts::PI;

/// All scenarios in a fixed order.
pub fn list_scenarios() -> Vec<ScenarioInfo> {
    vec![
        ScenarioInfo {
            name: "qo_core",
            anchor: "electron-positron oblivion: split paths, annihilation couplings at t1 and t2, null results, recombination asymmetry",
            params: vec![],
        },
        ScenarioInfo {
            name: "hardy_ci",
            anchor: "critical-interval state of the pair, identical to the Hardy pair; Schmidt spectrum and path correlations",
            params: vec![],
        },
        ScenarioInfo {
            name: "atom_collision",
            anchor: "two-atom collision at t1 and t2 with primed post-collision locations",
            params: vec![],
        },
        ScenarioInfo {
            name: "oblivion_with_pointers",
            anchor: "atom collision finalized by two detector pointers: fourfold entanglement and loss of reversibility",
            params: vec![],
        },
        ScenarioInfo {
            name: "ghostly_mirror",
            anchor: "spin mirror in a Hardy split, no-scatter post-selection and spin-down readout",
            params: vec![],
        },
        ScenarioInfo {
            name: "zeno_basic",
            anchor: "photon between two mirrors with a weak beam splitter, with and without a right-side detector",
            params: vec![
                ParamSpec::real("alpha", PI / 20.0, 0.0, PI / 4.0, "splitter angle per cycle (radians)").open_min().open_max(),
                ParamSpec::int("cycles", 0.0, 0.0, 100000.0, "cycle count; 0 means ceil(pi / 2 alpha)"),
            ],
        },
        ScenarioInfo {
            name: "zeno_counterfactual",
            anchor: "Zeno cycles against a spin-1/2 bomb that reflects only in its z+ state",
            params: vec![
                ParamSpec::real("alpha", PI / 40.0, 0.0, PI / 4.0, "splitter angle per cycle (radians)").open_min().open_max(),
                ParamSpec::int("cycles", 0.0, 0.0, 100000.0, "cycle count; 0 means ceil(pi / 2 alpha)"),
            ],
        },
        ScenarioInfo {
            name: "zeno_ghost_entanglement",
            anchor: "three-region box with spin bombs on both sides; photon searched for in the middle",
            params: vec![
                ParamSpec::real("alpha", PI / 40.0, 0.0, PI / 4.0, "splitter angle per cycle (radians)").open_min().open_max(),
                ParamSpec::int("cycles", 0.0, 0.0, 100000.0, "cycle count; 0 means ceil(pi / 2 alpha)"),
            ],
        },
        ScenarioInfo {
            name: "partial_erasure",
            anchor: "iterated partial which-path measurement driven to 99% and then erased",
            params: vec![
                ParamSpec::real("eps", 0.1, 0.0, 1.0, "coupling fraction of each partial measurement").open_min(),
                ParamSpec::real("target", 0.99, 0.5, 1.0, "probability the iteration drives towards").open_min().open_max(),
                ParamSpec::real("phase", 0.0, -2.0 * PI, 2.0 * PI, "relative phase of the initial superposition"),
            ],
        },
        ScenarioInfo {
            name: "weak_ensemble",
            anchor: "ensemble of weak measurements of a two-valued observable against a Gaussian pointer",
            params: vec![
                ParamSpec::real("coupling", 1.0, 0.0, 100.0, "pointer shift per unit eigenvalue").open_min(),
                ParamSpec::real("sigma_ratio", 10.0, 0.05, 1000.0, "pointer width over coupling for the ensemble"),
                ParamSpec::real("fidelity_sigma_ratio", 20.0, 0.05, 1000.0, "pointer width over coupling for the single shot"),
                ParamSpec::int("ensemble", 10000.0, 1.0, 10_000_000.0, "number of weakly measured copies"),
                ParamSpec::real("theta", PI / 4.0, 0.0, PI / 2.0, "state cos(theta)|+1> + sin(theta)|-1>"),
            ],
        },
        ScenarioInfo {
            name: "quantum_erasure",
            anchor: "interferometer with a which-path marker; fringes return after erasing the marker",
            params: vec![ParamSpec::int("points", 32.0, 2.0, 4096.0, "phase samples over one period")],
        },
        ScenarioInfo {
            name: "dicke_tray_spoon",
            anchor: "tray/spoon Gaussian superposition; null tray measurement localizes the particle in the spoon",
            params: vec![
                ParamSpec::real("tray_width", 1.0, 0.0, 1000.0, "tray Gaussian width L").open_min(),
                ParamSpec::real("l_spoon", 0.025, 0.0, 100.0, "spoon Gaussian width").open_min(),
                ParamSpec::real("eps", 0.01, 0.0, 1.0, "spoon amplitude").open_min().open_max(),
                ParamSpec::real("separation", 8.0, 0.0, 1e6, "spoon centre minus tray centre, in tray widths").open_min(),
                ParamSpec::int("points", 4096.0, 64.0, 1_048_576.0, "grid points (power of two)"),
            ],
        },
        ScenarioInfo {
            name: "ab_toy",
            anchor: "path qubit entangling with and then releasing a solenoid pointer, keeping only a phase",
            params: vec![
                ParamSpec::int("levels", 3.0, 2.0, 64.0, "solenoid pointer dimension"),
                ParamSpec::real("phi", PI / 3.0, -2.0 * PI, 2.0 * PI, "accumulated phase on the upper arm"),
            ],
        },
    ]
}

pub fn scenario_info(name: &str) -> Result<ScenarioInfo> {
    list_scenarios()
        .into_iter()
        .find(|s| s.name == name)
        .ok_or_else(|| Error::UnknownScenario(name.into()))
}

/// Resolved parameter values in schema order.
#[derive(Debug, Clone)]
pub(crate) struct Params {
    values: Vec<(&'static str, f64)>,
}

impl Params {
    fn resolve(info: &ScenarioInfo, overrides: &[(&str, f64)]) -> Result<Self> {
        let mut values: Vec<(&'static str, f64)> = info.params.iter().map(|p| (p.name, p.default)).collect();
        for &(name, value) in overrides {
            let spec = info.params.iter().find(|p| p.name == name).ok_or_else(|| Error::UnknownParameter {
                scenario: info.name.into(),
                name: name.into(),
            })?;
            spec.validate(value)?;
            if let Some(slot) = values.iter_mut().find(|(n, _)| *n == name) {
                slot.1 = value;
            }
        }
        Ok(Params { values })
    }

    pub(crate) fn get(&self, name: &str) -> f64 {
        self.values.iter().find(|(n, _)| *n == name).map_or(f64::NAN, |(_, v)| *v)
    }

    pub(crate) fn count(&self, name: &str) -> usize {
        self.get(name) as usize
    }
}

/// Runs `name` with parameter overrides.
pub fn run_scenario(name: &str, overrides: &[(&str, f64)], seed: u64) -> Result<ScenarioReport> {
    let info = scenario_info(name)?;
    let params = Params::resolve(&info, overrides)?;
    let mut run = Run {
        report: ScenarioReport {
            scenario: name.into(),
            params: params.values.iter().map(|(n, v)| (n.to_string(), *v)).collect(),
            seed,
            steps: Vec::new(),
            checks: Vec::new(),
            metrics: Vec::new(),
            notes: Vec::new(),
        },
        rng: ChaCha8Rng::seed_from_u64(seed ^ fnv1a(name)),
    };
    match name {
        "qo_core" => oblivion::qo_core(&mut run)?,
        "hardy_ci" => oblivion::hardy_ci(&mut run)?,
        "atom_collision" => collision::atom_collision(&mut run)?,
        "oblivion_with_pointers" => collision::oblivion_with_pointers(&mut run)?,
        "ghostly_mirror" => mirror::ghostly_mirror(&mut run)?,
        "zeno_basic" => zeno::zeno_basic(&mut run, &params)?,
        "zeno_counterfactual" => zeno::zeno_counterfactual(&mut run, &params)?,
        "zeno_ghost_entanglement" => zeno::zeno_ghost_entanglement(&mut run, &params)?,
        "partial_erasure" => partial::partial_erasure(&mut run, &params)?,
        "weak_ensemble" => partial::weak_ensemble(&mut run, &params)?,
        "quantum_erasure" => interference::quantum_erasure(&mut run, &params)?,
        "dicke_tray_spoon" => dicke::dicke_tray_spoon(&mut run, &params)?,
        "ab_toy" => interference::ab_toy(&mut run, &params)?,
        _ => return Err(Error::UnknownScenario(name.into())),
    }
    Ok(run.report)
}

/// 64-bit FNV-1a, used to give each scenario its own RNG stream.
pub fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3))
}

/// Tags errors with the step that raised them.
pub(crate) trait At<T> {
    fn at(self, step: &str) -> Result<T>;
}

impl<T> At<T> for Result<T> {
    fn at(self, step: &str) -> Result<T> {
        self.map_err(|e| e.at_step(step))
    }
}

/// Report under construction.
pub(crate) struct Run {
    pub(crate) report: ScenarioReport,
    pub(crate) rng: ChaCha8Rng,
}

/// A cut to report: a display key and the subsystems on one side.
pub(crate) type Cut<'a> = (&'a str, &'a [&'a str]);

impl Run {
    /// Records a step with the requested cut entropies.
    pub(crate) fn step(
        &mut self,
        label: &str,
        state: &StateVector,
        distribution: Vec<(String, f64)>,
        probability: Option<f64>,
        cuts: &[Cut<'_>],
    ) -> Result<Vec<f64>> {
        let mut entropies = Vec::with_capacity(cuts.len());
        for (key, side) in cuts {
            entropies.push((key.to_string(), cut_entropy(state, side).at(label)?));
        }
        let values = entropies.iter().map(|(_, v)| *v).collect();
        let terms = state
            .top_terms(SUMMARY_TERMS)
            .into_iter()
            .map(|(assignment, amplitude)| Term { assignment, amplitude })
            .collect();
        self.report.steps.push(Step { label: label.into(), state: terms, distribution, probability, entropies });
        Ok(values)
    }

    /// Records a step that has no discrete state (grid or ensemble summaries).
    pub(crate) fn bare_step(&mut self, label: &str, distribution: Vec<(String, f64)>, probability: Option<f64>) {
        self.report.steps.push(Step {
            label: label.into(),
            state: Vec::new(),
            distribution,
            probability,
            entropies: Vec::new(),
        });
    }

    fn push(&mut self, name: &str, expected: f64, actual: f64, tolerance: f64, comparison: Comparison, provenance: &str) {
        let pass = comparison.holds(actual, expected, tolerance);
        self.report.checks.push(Check {
            name: name.into(),
            expected,
            actual,
            tolerance,
            comparison,
            pass,
            provenance: provenance.into(),
        });
    }

    pub(crate) fn close(&mut self, name: &str, expected: f64, actual: f64, tolerance: f64, provenance: &str) {
        self.push(name, expected, actual, tolerance, Comparison::Close, provenance);
    }

    pub(crate) fn below(&mut self, name: &str, bound: f64, actual: f64, provenance: &str) {
        self.push(name, bound, actual, 0.0, Comparison::Below, provenance);
    }

    pub(crate) fn above(&mut self, name: &str, bound: f64, actual: f64, provenance: &str) {
        self.push(name, bound, actual, 0.0, Comparison::Above, provenance);
    }

    pub(crate) fn at_least(&mut self, name: &str, bound: f64, actual: f64, provenance: &str) {
        self.push(name, bound, actual, 0.0, Comparison::AtLeast, provenance);
    }

    /// A boolean fact recorded as `1 == 1`.
    pub(crate) fn holds(&mut self, name: &str, fact: bool, provenance: &str) {
        self.push(name, 1.0, if fact { 1.0 } else { 0.0 }, 0.0, Comparison::Close, provenance);
    }

    pub(crate) fn metric(&mut self, name: &str, value: f64) {
        self.report.metrics.push((name.into(), value));
    }

    pub(crate) fn note(&mut self, text: &str) {
        self.report.notes.push(text.into());
    }
}

/// Born distribution of one subsystem as `(label, p)` pairs.
pub(crate) fn distribution(state: &StateVector, subsystem: &str) -> Result<Vec<(String, f64)>> {
    crate::measure::born_probabilities(state, subsystem)
}

/// Number of Zeno cycles: the override if nonzero, else `ceil(π / 2α)`.
pub(crate) fn zeno_cycles(alpha: f64, requested: usize) -> usize {
    if requested > 0 {
        return requested;
    }
    // guard against π/2α landing a hair above an integer
    ((PI / (2.0 * alpha)) - 1e-9).ceil().max(1.0) as usize
}

pub(crate) fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}
