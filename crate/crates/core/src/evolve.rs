//! Unitary dynamics on labeled registers.
//!
//! Every step is an [`Op`]: a parameter record that knows how to apply itself
//! and how to produce its exact inverse. An [`OpLog`] keeps the applied ops in
//! order, together with markers for projections, so that a unitary segment can
//! be run backwards with [`time_reverse`].
//!
//! Splitters use the symmetric real convention
//! `(1/√2)[[1, 1], [1, -1]]`: the source port feeds `(|l1⟩ + |l2⟩)/√2`, the
//! dump port feeds `(|l1⟩ - |l2⟩)/√2`, and on the way back `|l1⟩` returns to
//! `(|source⟩ + |dump⟩)/√2` and `|l2⟩` to `(|source⟩ - |dump⟩)/√2`. The
//! four-port map is its own inverse.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::register::{describe, Condition, Register, StateVector};
use crate::{Error, Result, C64, NORM_TOLERANCE};

/// Owned `(subsystem, label)` pairs.
pub type Assignment = Vec<(String, String)>;

fn owned(a: &[(&str, &str)]) -> Assignment {
    a.iter().map(|(s, l)| (s.to_string(), l.to_string())).collect()
}

fn borrowed(a: &Assignment) -> Vec<(&str, &str)> {
    a.iter().map(|(s, l)| (s.as_str(), l.as_str())).collect()
}

/// A single invertible unitary step.
#[derive(Debug, Clone, PartialEq)]
pub enum Op {
    /// Four-port splitter: source/dump ports on one side, two arms on the other.
    Split {
        subsystem: String,
        source: String,
        dump: String,
        arms: (String, String),
    },
    /// `|a⟩ → cos α|a⟩ + sin α|b⟩`, `|b⟩ → −sin α|a⟩ + cos α|b⟩`.
    Rotation {
        subsystem: String,
        pair: (String, String),
        angle: f64,
    },
    /// Arbitrary 2×2 unitary acting on the amplitudes of `pair`.
    BasisChange {
        subsystem: String,
        pair: (String, String),
        matrix: [[C64; 2]; 2],
    },
    /// Permutation of basis states: amplitude on each `from` pattern moves to
    /// the matching `to` pattern whenever `condition` holds.
    Relabel {
        condition: Assignment,
        mapping: Vec<(Assignment, Assignment)>,
    },
    /// Multiplies every amplitude matching `condition` by `e^{iφ}`.
    Phase { condition: Assignment, angle: f64 },
}

impl Op {
    pub fn split(subsystem: &str, source: &str, dump: &str, arms: (&str, &str)) -> Op {
        Op::Split {
            subsystem: subsystem.into(),
            source: source.into(),
            dump: dump.into(),
            arms: (arms.0.into(), arms.1.into()),
        }
    }

    pub fn rotation(subsystem: &str, pair: (&str, &str), angle: f64) -> Op {
        Op::Rotation {
            subsystem: subsystem.into(),
            pair: (pair.0.into(), pair.1.into()),
            angle,
        }
    }

    pub fn basis_change(subsystem: &str, pair: (&str, &str), matrix: [[C64; 2]; 2]) -> Op {
        Op::BasisChange {
            subsystem: subsystem.into(),
            pair: (pair.0.into(), pair.1.into()),
            matrix,
        }
    }

    pub fn relabel(condition: &[(&str, &str)], mapping: &[(&[(&str, &str)], &[(&str, &str)])]) -> Op {
        Op::Relabel {
            condition: owned(condition),
            mapping: mapping.iter().map(|(f, t)| (owned(f), owned(t))).collect(),
        }
    }

    /// Exchanges two patterns in both directions.
    pub fn swap(condition: &[(&str, &str)], a: &[(&str, &str)], b: &[(&str, &str)]) -> Op {
        Op::relabel(condition, &[(a, b), (b, a)])
    }

    pub fn phase(condition: &[(&str, &str)], angle: f64) -> Op {
        Op::Phase { condition: owned(condition), angle }
    }

    /// The exact inverse, built from parameters rather than matrices.
    pub fn inverse(&self) -> Op {
        match self {
            Op::Split { .. } => self.clone(),
            Op::Rotation { subsystem, pair, angle } => Op::Rotation {
                subsystem: subsystem.clone(),
                pair: pair.clone(),
                angle: -angle,
            },
            Op::BasisChange { subsystem, pair, matrix } => {
                let m = matrix;
                Op::BasisChange {
                    subsystem: subsystem.clone(),
                    pair: pair.clone(),
                    matrix: [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]],
                }
            }
            Op::Relabel { condition, mapping } => Op::Relabel {
                condition: condition.clone(),
                mapping: mapping.iter().map(|(f, t)| (t.clone(), f.clone())).collect(),
            },
            Op::Phase { condition, angle } => Op::Phase {
                condition: condition.clone(),
                angle: -angle,
            },
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Op::Split { subsystem, source, arms, .. } => {
                format!("split {subsystem}:{source} -> ({}, {})", arms.0, arms.1)
            }
            Op::Rotation { subsystem, pair, angle } => {
                format!("rotate {subsystem}:({}, {}) by {angle}", pair.0, pair.1)
            }
            Op::BasisChange { subsystem, pair, .. } => {
                format!("basis change {subsystem}:({}, {})", pair.0, pair.1)
            }
            Op::Relabel { condition, mapping } => {
                format!("relabel [{}] x{}", describe(&borrowed(condition)), mapping.len())
            }
            Op::Phase { condition, angle } => format!("phase [{}] by {angle}", describe(&borrowed(condition))),
        }
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        let reg = state.register();
        match self {
            Op::Split { subsystem, source, dump, arms } => {
                let s = reg.subsystem_index(subsystem)?;
                let ports = [
                    reg.label_index(s, source)?,
                    reg.label_index(s, dump)?,
                    reg.label_index(s, &arms.0)?,
                    reg.label_index(s, &arms.1)?,
                ];
                let set: BTreeSet<usize> = ports.iter().copied().collect();
                if set.len() != 4 {
                    return Err(Error::LabelCollision);
                }
                let h = core::f64::consts::FRAC_1_SQRT_2;
                let (z, p, m) = (0.0, h, -h);
                #[rustfmt::skip]
                let matrix = [
                    z, z, p, p,
                    z, z, p, m,
                    p, p, z, z,
                    p, m, z, z,
                ];
                let matrix: Vec<C64> = matrix.iter().map(|&x| C64::new(x, 0.0)).collect();
                Ok(apply_local(state, s, &ports, &matrix))
            }
            Op::Rotation { subsystem, pair, angle } => {
                let (s, a, b) = resolve_pair(reg, subsystem, pair)?;
                let (sin, cos) = angle.sin_cos();
                let matrix = [C64::new(cos, 0.0), C64::new(-sin, 0.0), C64::new(sin, 0.0), C64::new(cos, 0.0)];
                Ok(apply_local(state, s, &[a, b], &matrix))
            }
            Op::BasisChange { subsystem, pair, matrix } => {
                let (s, a, b) = resolve_pair(reg, subsystem, pair)?;
                let dev = unitarity_deviation(matrix);
                if dev > NORM_TOLERANCE {
                    return Err(Error::NotUnitary(dev));
                }
                let flat = [matrix[0][0], matrix[0][1], matrix[1][0], matrix[1][1]];
                Ok(apply_local(state, s, &[a, b], &flat))
            }
            Op::Relabel { condition, mapping } => {
                let perm = Permutation::resolve(reg, condition, mapping)?;
                let mut out = BTreeMap::new();
                for (index, amp) in state.iter() {
                    out.insert(perm.image(reg, index), amp);
                }
                Ok(StateVector::from_map(reg.clone(), out))
            }
            Op::Phase { condition, angle } => {
                let cond = reg.condition(&borrowed(condition))?;
                let factor = C64::from_polar(1.0, *angle);
                Ok(state.map_amplitudes(|i, a| if cond.matches(reg, i) { a * factor } else { a }))
            }
        }
    }
}

fn resolve_pair(reg: &Register, subsystem: &str, pair: &(String, String)) -> Result<(usize, usize, usize)> {
    let s = reg.subsystem_index(subsystem)?;
    let a = reg.label_index(s, &pair.0)?;
    let b = reg.label_index(s, &pair.1)?;
    if a == b {
        return Err(Error::LabelCollision);
    }
    Ok((s, a, b))
}

fn unitarity_deviation(m: &[[C64; 2]; 2]) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let dot: C64 = (0..2).map(|k| m[k][i].conj() * m[k][j]).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((dot - C64::new(target, 0.0)).norm());
        }
    }
    dev
}

/// Applies a `k × k` matrix (row-major, `new = M · old`) to the amplitudes
/// of `labels` within `subsystem`. Other labels pass through.
fn apply_local(state: &StateVector, subsystem: usize, labels: &[usize], matrix: &[C64]) -> StateVector {
    let reg = state.register();
    let k = labels.len();
    let stride = reg.stride(subsystem);
    let mut out: BTreeMap<usize, C64> = BTreeMap::new();
    for (index, amp) in state.iter() {
        let digit = reg.digit(index, subsystem);
        match labels.iter().position(|&l| l == digit) {
            None => *out.entry(index).or_default() += amp,
            Some(col) => {
                let base = index - digit * stride;
                for row in 0..k {
                    let m = matrix[row * k + col];
                    if m != C64::default() {
                        *out.entry(base + labels[row] * stride).or_default() += m * amp;
                    }
                }
            }
        }
    }
    StateVector::from_map(reg.clone(), out)
}

/// A validated relabel: a bijection on the assignments of the touched
/// subsystems, gated by a condition on other subsystems.
struct Permutation {
    condition: Condition,
    map: Vec<(Condition, Condition)>,
}

impl Permutation {
    fn resolve(reg: &Register, condition: &Assignment, mapping: &[(Assignment, Assignment)]) -> Result<Self> {
        let condition = reg.condition(&borrowed(condition))?;
        let mut touched: Option<BTreeSet<usize>> = None;
        let mut map = Vec::with_capacity(mapping.len());
        let mut froms = BTreeSet::new();
        let mut tos = BTreeSet::new();
        for (from, to) in mapping {
            let f = reg.condition(&borrowed(from))?;
            let t = reg.condition(&borrowed(to))?;
            let fs: BTreeSet<usize> = f.pairs().iter().map(|p| p.0).collect();
            let ts: BTreeSet<usize> = t.pairs().iter().map(|p| p.0).collect();
            if fs != ts {
                return Err(Error::NotPermutation(format!(
                    "`{}` and `{}` name different subsystems",
                    describe(&borrowed(from)),
                    describe(&borrowed(to))
                )));
            }
            if fs.iter().any(|&s| condition.touches(s)) {
                return Err(Error::NotPermutation("mapping rewrites a conditioned subsystem".into()));
            }
            match &touched {
                None => touched = Some(fs.clone()),
                Some(prev) if *prev != fs => {
                    return Err(Error::NotPermutation("patterns must all name the same subsystems".into()))
                }
                Some(_) => {}
            }
            let key = |c: &Condition| {
                let mut v = c.pairs().to_vec();
                v.sort_unstable();
                v
            };
            if !froms.insert(key(&f)) {
                return Err(Error::NotPermutation(format!("`{}` mapped twice", describe(&borrowed(from)))));
            }
            if !tos.insert(key(&t)) {
                return Err(Error::NotPermutation(format!("`{}` reached twice", describe(&borrowed(to)))));
            }
            map.push((f, t));
        }
        if froms != tos {
            return Err(Error::NotPermutation(
                "targets must coincide with sources (write exchanges as swaps)".into(),
            ));
        }
        Ok(Permutation { condition, map })
    }

    fn image(&self, reg: &Register, index: usize) -> usize {
        if !self.condition.matches(reg, index) {
            return index;
        }
        self.map
            .iter()
            .find(|(f, _)| f.matches(reg, index))
            .map_or(index, |(_, t)| t.write(reg, index))
    }
}

pub fn apply_split(
    state: &StateVector,
    subsystem: &str,
    source: &str,
    dump: &str,
    arms: (&str, &str),
) -> Result<StateVector> {
    Op::split(subsystem, source, dump, arms).apply(state)
}

pub fn apply_rotation(state: &StateVector, subsystem: &str, pair: (&str, &str), angle: f64) -> Result<StateVector> {
    Op::rotation(subsystem, pair, angle).apply(state)
}

pub fn apply_basis_change(
    state: &StateVector,
    subsystem: &str,
    pair: (&str, &str),
    matrix: [[C64; 2]; 2],
) -> Result<StateVector> {
    Op::basis_change(subsystem, pair, matrix).apply(state)
}

pub fn controlled_relabel(
    state: &StateVector,
    condition: &[(&str, &str)],
    mapping: &[(&[(&str, &str)], &[(&str, &str)])],
) -> Result<StateVector> {
    Op::relabel(condition, mapping).apply(state)
}

pub fn controlled_phase(state: &StateVector, condition: &[(&str, &str)], angle: f64) -> Result<StateVector> {
    Op::phase(condition, angle).apply(state)
}

/// The Hadamard-form matrix `(1/√2)[[1, 1], [1, -1]]`.
pub fn hadamard() -> [[C64; 2]; 2] {
    let h = C64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
    [[h, h], [h, -h]]
}

#[derive(Debug, Clone, PartialEq)]
pub enum LogEntry {
    Unitary(Op),
    /// A projection happened here; nothing before it can be undone exactly.
    Projection(String),
}

/// Append-only record of what a run did to its state.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OpLog {
    entries: Vec<LogEntry>,
}

impl OpLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn entries(&self) -> &[LogEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn push(&mut self, op: Op) {
        self.entries.push(LogEntry::Unitary(op));
    }

    pub fn record_projection(&mut self, what: impl Into<String>) {
        self.entries.push(LogEntry::Projection(what.into()));
    }

    /// Applies `op` and records it.
    pub fn apply(&mut self, state: &StateVector, op: Op) -> Result<StateVector> {
        let next = op.apply(state)?;
        self.push(op);
        Ok(next)
    }

    /// Entries from `start` to the end as a new log.
    pub fn since(&self, start: usize) -> OpLog {
        OpLog { entries: self.entries[start.min(self.entries.len())..].to_vec() }
    }

    pub fn has_projection(&self) -> bool {
        self.entries.iter().any(|e| matches!(e, LogEntry::Projection(_)))
    }
}

impl FromIterator<Op> for OpLog {
    fn from_iter<I: IntoIterator<Item = Op>>(iter: I) -> Self {
        OpLog { entries: iter.into_iter().map(LogEntry::Unitary).collect() }
    }
}

/// Undoes `log` by applying inverses in reverse order.
pub fn time_reverse(state: &StateVector, log: &OpLog) -> Result<StateVector> {
    if let Some(LogEntry::Projection(what)) = log.entries.iter().find(|e| matches!(e, LogEntry::Projection(_))) {
        return Err(Error::NotInvertible(what.clone()));
    }
    log.entries.iter().rev().try_fold(state.clone(), |s, e| match e {
        LogEntry::Unitary(op) => op.inverse().apply(&s),
        LogEntry::Projection(_) => unreachable!(),
    })
}

/// Probability that `subsystem` exits the splitter through `source` on the
/// return pass. The input state is not modified.
pub fn recombine_probability(
    state: &StateVector,
    subsystem: &str,
    source: &str,
    dump: &str,
    arms: (&str, &str),
) -> Result<f64> {
    let back = apply_split(state, subsystem, source, dump, arms)?;
    let reg = back.register();
    let s = reg.subsystem_index(subsystem)?;
    let l = reg.label_index(s, source)?;
    Ok(back.iter().filter(|&(i, _)| reg.digit(i, s) == l).map(|(_, a)| a.norm_sqr()).sum())
}
