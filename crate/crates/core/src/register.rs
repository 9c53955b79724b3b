//! Labeled registers and sparse pure states over them.
//!
//! A [`Register`] is an ordered list of subsystems, each with string basis
//! labels. Joint basis states are numbered in mixed radix with the first
//! subsystem varying slowest, so iterating a [`StateVector`] always yields
//! amplitudes in the same order.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::{Error, Result, C64, NORM_TOLERANCE};

/// Amplitudes with squared magnitude below this are dropped from the map.
const PRUNE: f64 = 1e-30;

/// One named subsystem with its ordered basis labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsystemSpec {
    name: String,
    labels: Vec<String>,
}

impl SubsystemSpec {
    pub fn new<I, S>(name: impl Into<String>, labels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        SubsystemSpec {
            name: name.into(),
            labels: labels.into_iter().map(Into::into).collect(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

/// Ordered collection of subsystems defining a joint basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Register {
    subsystems: Vec<SubsystemSpec>,
    strides: Vec<usize>,
    dim: usize,
}

/// Builds a register, rejecting duplicate names, duplicate labels and
/// one-dimensional subsystems.
pub fn new_register(specs: Vec<SubsystemSpec>) -> Result<Arc<Register>> {
    Register::new(specs).map(Arc::new)
}

impl Register {
    pub fn new(specs: Vec<SubsystemSpec>) -> Result<Register> {
        if specs.is_empty() {
            return Err(Error::EmptyRegister);
        }
        let mut names = BTreeSet::new();
        for spec in &specs {
            if !names.insert(spec.name.as_str()) {
                return Err(Error::DuplicateSubsystem(spec.name.clone()));
            }
            if spec.dim() < 2 {
                return Err(Error::DimensionTooSmall(spec.name.clone()));
            }
            let mut seen = BTreeSet::new();
            for label in &spec.labels {
                if !seen.insert(label.as_str()) {
                    return Err(Error::DuplicateLabel {
                        subsystem: spec.name.clone(),
                        label: label.clone(),
                    });
                }
            }
        }
        let mut strides = alloc::vec![0; specs.len()];
        let mut dim = 1usize;
        for (i, spec) in specs.iter().enumerate().rev() {
            strides[i] = dim;
            dim = dim.checked_mul(spec.dim()).ok_or(Error::RegisterTooLarge)?;
        }
        Ok(Register { subsystems: specs, strides, dim })
    }

    pub fn subsystems(&self) -> &[SubsystemSpec] {
        &self.subsystems
    }

    pub fn len(&self) -> usize {
        self.subsystems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsystems.is_empty()
    }

    /// Joint dimension (product of subsystem dimensions).
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn subsystem_index(&self, name: &str) -> Result<usize> {
        self.subsystems
            .iter()
            .position(|s| s.name == name)
            .ok_or_else(|| Error::UnknownSubsystem(name.into()))
    }

    pub fn label_index(&self, subsystem: usize, label: &str) -> Result<usize> {
        let spec = &self.subsystems[subsystem];
        spec.label_index(label).ok_or_else(|| Error::UnknownLabel {
            subsystem: spec.name.clone(),
            label: label.into(),
        })
    }

    pub(crate) fn stride(&self, subsystem: usize) -> usize {
        self.strides[subsystem]
    }

    /// Label index of `subsystem` within joint basis state `index`.
    pub fn digit(&self, index: usize, subsystem: usize) -> usize {
        (index / self.strides[subsystem]) % self.subsystems[subsystem].dim()
    }

    /// `index` with the digit of `subsystem` replaced by `label`.
    pub fn with_digit(&self, index: usize, subsystem: usize, label: usize) -> usize {
        let old = self.digit(index, subsystem);
        index - old * self.strides[subsystem] + label * self.strides[subsystem]
    }

    /// Resolves a partial assignment into `(subsystem, label)` index pairs.
    pub fn condition(&self, assignment: &[(&str, &str)]) -> Result<Condition> {
        let mut pairs = Vec::with_capacity(assignment.len());
        for &(name, label) in assignment {
            let s = self.subsystem_index(name)?;
            if pairs.iter().any(|&(t, _)| t == s) {
                return Err(Error::RepeatedSubsystem(name.into()));
            }
            pairs.push((s, self.label_index(s, label)?));
        }
        Ok(Condition { pairs })
    }

    /// Joint basis index of a full assignment (every subsystem named once).
    pub fn basis(&self, assignment: &[(&str, &str)]) -> Result<usize> {
        let cond = self.condition(assignment)?;
        let mut index = 0;
        for (s, spec) in self.subsystems.iter().enumerate() {
            let &(_, l) = cond
                .pairs
                .iter()
                .find(|&&(t, _)| t == s)
                .ok_or_else(|| Error::IncompleteAssignment(spec.name.clone()))?;
            index += l * self.strides[s];
        }
        Ok(index)
    }

    /// Labels of joint basis state `index`, in subsystem order.
    pub fn labels_of(&self, index: usize) -> Vec<(&str, &str)> {
        self.subsystems
            .iter()
            .enumerate()
            .map(|(s, spec)| (spec.name.as_str(), spec.labels[self.digit(index, s)].as_str()))
            .collect()
    }
}

/// A resolved partial assignment.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Condition {
    pairs: Vec<(usize, usize)>,
}

impl Condition {
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn matches(&self, register: &Register, index: usize) -> bool {
        self.pairs.iter().all(|&(s, l)| register.digit(index, s) == l)
    }

    pub fn touches(&self, subsystem: usize) -> bool {
        self.pairs.iter().any(|&(s, _)| s == subsystem)
    }

    /// Overwrites the conditioned digits of `index`.
    pub fn write(&self, register: &Register, index: usize) -> usize {
        self.pairs
            .iter()
            .fold(index, |i, &(s, l)| register.with_digit(i, s, l))
    }
}

/// Sparse pure state over a register. Absent basis states have amplitude zero.
#[derive(Debug, Clone)]
pub struct StateVector {
    register: Arc<Register>,
    amps: BTreeMap<usize, C64>,
}

impl StateVector {
    pub(crate) fn from_map(register: Arc<Register>, mut amps: BTreeMap<usize, C64>) -> Self {
        amps.retain(|_, a| a.norm_sqr() >= PRUNE);
        StateVector { register, amps }
    }

    /// The single basis state named by a full assignment.
    pub fn basis_state(register: &Arc<Register>, assignment: &[(&str, &str)]) -> Result<Self> {
        superpose(register, &[(C64::new(1.0, 0.0), assignment)], false)
    }

    pub fn register(&self) -> &Arc<Register> {
        &self.register
    }

    /// Populated basis states with their amplitudes, in basis order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, C64)> + '_ {
        self.amps.iter().map(|(&i, &a)| (i, a))
    }

    pub fn support_len(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitude_at(&self, index: usize) -> C64 {
        self.amps.get(&index).copied().unwrap_or_default()
    }

    /// Amplitude of a full assignment; zero if never populated.
    pub fn amplitude(&self, assignment: &[(&str, &str)]) -> Result<C64> {
        Ok(self.amplitude_at(self.register.basis(assignment)?))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_TOLERANCE
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr();
        if n <= 0.0 {
            return Err(Error::ZeroNorm);
        }
        let scale = 1.0 / n.sqrt();
        Ok(self.map_amplitudes(|_, a| a * scale))
    }

    pub(crate) fn map_amplitudes(&self, mut f: impl FnMut(usize, C64) -> C64) -> Self {
        let amps = self.amps.iter().map(|(&i, &a)| (i, f(i, a))).collect();
        StateVector::from_map(self.register.clone(), amps)
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.register != other.register {
            return Err(Error::RegisterMismatch);
        }
        Ok(self
            .amps
            .iter()
            .filter_map(|(i, a)| other.amps.get(i).map(|b| a.conj() * b))
            .sum())
    }

    /// The pure state of `keep` when every other subsystem sits in one basis
    /// state. Fails if the discarded subsystems are superposed or entangled.
    pub fn restrict(&self, keep: &[&str]) -> Result<StateVector> {
        let reg = &self.register;
        let kept: Vec<usize> = keep
            .iter()
            .map(|n| reg.subsystem_index(n))
            .collect::<Result<_>>()?;
        let dropped: Vec<usize> = (0..reg.len()).filter(|s| !kept.contains(s)).collect();
        let mut kept_sorted = kept.clone();
        kept_sorted.sort_unstable();
        let sub = Arc::new(Register::new(
            kept_sorted.iter().map(|&s| reg.subsystems[s].clone()).collect(),
        )?);
        let mut frozen: Option<Vec<usize>> = None;
        let mut amps = BTreeMap::new();
        for (index, a) in self.iter() {
            let rest: Vec<usize> = dropped.iter().map(|&s| reg.digit(index, s)).collect();
            match &frozen {
                None => frozen = Some(rest),
                Some(f) if *f != rest => {
                    let names: Vec<&str> = dropped.iter().map(|&s| reg.subsystems[s].name()).collect();
                    return Err(Error::NotFactorizable(names.join(", ")));
                }
                Some(_) => {}
            }
            let j = kept_sorted
                .iter()
                .enumerate()
                .map(|(k, &s)| reg.digit(index, s) * sub.stride(k))
                .sum();
            amps.insert(j, a);
        }
        Ok(StateVector::from_map(sub, amps))
    }

    /// Largest-magnitude amplitudes, ties broken by basis order.
    pub fn top_terms(&self, k: usize) -> Vec<(Vec<(String, String)>, C64)> {
        let mut terms: Vec<(usize, C64)> = self.iter().collect();
        terms.sort_by(|a, b| {
            b.1.norm_sqr()
                .partial_cmp(&a.1.norm_sqr())
                .unwrap_or(core::cmp::Ordering::Equal)
                .then(a.0.cmp(&b.0))
        });
        terms.truncate(k);
        terms
            .into_iter()
            .map(|(i, a)| {
                let labels = self
                    .register
                    .labels_of(i)
                    .into_iter()
                    .map(|(s, l)| (s.to_string(), l.to_string()))
                    .collect();
                (labels, a)
            })
            .collect()
    }
}

/// Builds a state from `(amplitude, full assignment)` terms. Duplicate
/// assignments add up. Without `normalize`, the terms must already have unit
/// norm.
pub fn superpose(
    register: &Arc<Register>,
    terms: &[(C64, &[(&str, &str)])],
    normalize: bool,
) -> Result<StateVector> {
    let mut amps: BTreeMap<usize, C64> = BTreeMap::new();
    for (amp, assignment) in terms {
        *amps.entry(register.basis(assignment)?).or_default() += *amp;
    }
    let state = StateVector::from_map(register.clone(), amps);
    if normalize {
        state.normalized()
    } else {
        let n = state.norm_sqr();
        if (n - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized(n));
        }
        Ok(state)
    }
}

/// |⟨a|b⟩|², insensitive to global phase.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    let f = a.inner(b)?.norm_sqr();
    Ok(f.min(1.0))
}

/// `name=label` list for error messages and record keys.
pub(crate) fn describe(assignment: &[(&str, &str)]) -> String {
    let parts: Vec<String> = assignment.iter().map(|(s, l)| format!("{s}={l}")).collect();
    parts.join(",")
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn qo_register() -> Arc<Register> {
        new_register(vec![
            SubsystemSpec::new("e-", ["src", "1", "2", "ann"]),
            SubsystemSpec::new("e+", ["src", "3", "4", "ann"]),
            SubsystemSpec::new("det1", ["READY", "CLICK"]),
            SubsystemSpec::new("det2", ["READY", "CLICK"]),
        ])
        .unwrap()
    }

    #[test]
    fn joint_dimension_is_product() {
        assert_eq!(qo_register().dim(), 64);
        let photon = new_register(vec![SubsystemSpec::new("photon", ["L", "R"])]).unwrap();
        assert_eq!(photon.dim(), 2);
    }

    #[test]
    fn construction_errors() {
        let dup = new_register(vec![
            SubsystemSpec::new("e-", ["1", "2"]),
            SubsystemSpec::new("e-", ["3", "4"]),
        ]);
        assert_eq!(dup.unwrap_err(), Error::DuplicateSubsystem("e-".into()));
        let lab = new_register(vec![SubsystemSpec::new("e-", ["1", "1"])]);
        assert!(matches!(lab, Err(Error::DuplicateLabel { .. })));
        let one = new_register(vec![SubsystemSpec::new("x", ["only"])]);
        assert!(matches!(one, Err(Error::DimensionTooSmall(_))));
        assert_eq!(new_register(vec![]).unwrap_err(), Error::EmptyRegister);
    }

    #[test]
    fn first_subsystem_varies_slowest() {
        let reg = qo_register();
        let a = reg.basis(&[("e-", "src"), ("e+", "src"), ("det1", "READY"), ("det2", "CLICK")]).unwrap();
        let b = reg.basis(&[("e-", "1"), ("e+", "src"), ("det1", "READY"), ("det2", "READY")]).unwrap();
        assert_eq!(a, 1);
        assert_eq!(b, 16);
        assert_eq!(reg.labels_of(b)[0], ("e-", "1"));
    }

    #[test]
    fn separable_and_null_result_states() {
        let reg = qo_register();
        let t = |e: &'static str, p: &'static str| [("e-", e), ("e+", p), ("det1", "READY"), ("det2", "READY")];
        let (a, b, cc, d) = (t("1", "3"), t("1", "4"), t("2", "3"), t("2", "4"));
        let sep = superpose(&reg, &[(c(0.5), &a), (c(0.5), &b), (c(0.5), &cc), (c(0.5), &d)], false).unwrap();
        assert!(sep.is_normalized());
        assert_eq!(sep.support_len(), 4);

        let three = superpose(&reg, &[(c(1.0), &b), (c(1.0), &d), (c(1.0), &a)], true).unwrap();
        let third = 1.0 / 3f64.sqrt();
        assert!((three.amplitude(&a).unwrap() - c(third)).norm() < 1e-15);
        assert_eq!(three.amplitude(&cc).unwrap(), C64::default());
    }

    #[test]
    fn superpose_errors() {
        let reg = qo_register();
        let bad = [("e-", "9"), ("e+", "3"), ("det1", "READY"), ("det2", "READY")];
        assert!(matches!(superpose(&reg, &[(c(1.0), &bad)], false), Err(Error::UnknownLabel { .. })));
        let ok = [("e-", "1"), ("e+", "3"), ("det1", "READY"), ("det2", "READY")];
        assert_eq!(
            superpose(&reg, &[(c(1.0), &ok), (c(-1.0), &ok)], true).unwrap_err(),
            Error::ZeroNorm
        );
        assert!(matches!(superpose(&reg, &[(c(2.0), &ok)], false), Err(Error::NotNormalized(_))));
        let partial = [("e-", "1"), ("e+", "3")];
        assert!(matches!(
            superpose(&reg, &[(c(1.0), &partial)], false),
            Err(Error::IncompleteAssignment(_))
        ));
    }

    #[test]
    fn duplicate_terms_add() {
        let reg = new_register(vec![SubsystemSpec::new("p", ["L", "R"])]).unwrap();
        let s = superpose(&reg, &[(c(0.5), &[("p", "L")]), (c(0.5), &[("p", "L")])], false).unwrap();
        assert_eq!(s.amplitude(&[("p", "L")]).unwrap(), c(1.0));
    }

    #[test]
    fn fidelity_basics() {
        let reg = new_register(vec![SubsystemSpec::new("p", ["1", "2"])]).unwrap();
        let one = StateVector::basis_state(&reg, &[("p", "1")]).unwrap();
        let two = StateVector::basis_state(&reg, &[("p", "2")]).unwrap();
        let plus = superpose(&reg, &[(c(1.0), &[("p", "1")]), (c(1.0), &[("p", "2")])], true).unwrap();
        let phased = plus.map_amplitudes(|_, a| a * C64::from_polar(1.0, 0.7));
        assert!((fidelity(&plus, &plus).unwrap() - 1.0).abs() < 1e-12);
        assert!((fidelity(&plus, &phased).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(fidelity(&one, &two).unwrap(), 0.0);
        let other = new_register(vec![SubsystemSpec::new("q", ["1", "2"])]).unwrap();
        let q = StateVector::basis_state(&other, &[("q", "1")]).unwrap();
        assert_eq!(fidelity(&one, &q).unwrap_err(), Error::RegisterMismatch);
    }

    #[test]
    fn restrict_drops_product_factor() {
        let reg = qo_register();
        let t = |e: &'static str, p: &'static str| [("e-", e), ("e+", p), ("det1", "READY"), ("det2", "READY")];
        let s = superpose(&reg, &[(c(1.0), &t("1", "4")), (c(1.0), &t("2", "4"))], true).unwrap();
        let r = s.restrict(&["e+", "e-"]).unwrap();
        assert_eq!(r.register().len(), 2);
        assert_eq!(r.register().subsystems()[0].name(), "e-");
        assert!((r.amplitude(&[("e-", "1"), ("e+", "4")]).unwrap().re - 0.5f64.sqrt()).abs() < 1e-15);

        let clicked = superpose(
            &reg,
            &[(c(1.0), &t("1", "4")), (c(1.0), &[("e-", "2"), ("e+", "4"), ("det1", "CLICK"), ("det2", "READY")])],
            true,
        )
        .unwrap();
        assert!(matches!(clicked.restrict(&["e-", "e+"]), Err(Error::NotFactorizable(_))));
    }
}
