//! Bipartite entanglement diagnostics for pure states.
//!
//! Entropies are in bits. Eigenvalues below [`EIGEN_FLOOR`] are dropped
//! before taking logarithms.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::linalg::hermitian_eigenvalues;
use crate::register::{Register, StateVector};
use crate::{Error, Result, C64};

pub const EIGEN_FLOOR: f64 = 1e-12;

/// Negative eigenvalues beyond this are reported as an invalid density.
const NEGATIVE_SLACK: f64 = 1e-10;

/// Default tolerance for [`is_product`].
pub const PRODUCT_TOLERANCE: f64 = 1e-9;

/// Reduced density matrix over the kept subsystems, in their register order.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    basis: Arc<Register>,
    entries: Vec<C64>,
}

impl DensityMatrix {
    /// The register spanned by the kept subsystems.
    pub fn basis(&self) -> &Arc<Register> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.entries[i * self.dim() + j]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.entry(i, i).re).sum()
    }

    /// tr(ρ²).
    pub fn purity(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Eigenvalues in descending order. Rows with zero diagonal are skipped,
    /// which is exact for a positive semidefinite matrix.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let n = self.dim();
        let live: Vec<usize> = (0..n).filter(|&i| self.entry(i, i).re > 0.0).collect();
        let m = live.len();
        let mut sub = Vec::with_capacity(m * m);
        for &i in &live {
            for &j in &live {
                sub.push(self.entry(i, j));
            }
        }
        let eig = hermitian_eigenvalues(m, &sub);
        if let Some(&low) = eig.last() {
            if low < -NEGATIVE_SLACK {
                return Err(Error::InvalidDensity(format!("eigenvalue {low}")));
            }
        }
        Ok(eig)
    }

    pub fn entropy(&self) -> Result<f64> {
        Ok(entropy_bits(&self.eigenvalues()?))
    }
}

/// `−Σ λ log₂ λ` over the entries above [`EIGEN_FLOOR`].
pub fn entropy_bits(values: &[f64]) -> f64 {
    let total: f64 = values.iter().filter(|&&v| v > EIGEN_FLOOR).sum();
    if total <= 0.0 {
        return 0.0;
    }
    let h: f64 = values
        .iter()
        .filter(|&&v| v > EIGEN_FLOOR)
        .map(|&v| {
            let p = v / total;
            -p * p.log2()
        })
        .sum();
    h.max(0.0)
}

fn resolve(reg: &Register, names: &[&str]) -> Result<Vec<usize>> {
    let mut idx: Vec<usize> = names.iter().map(|n| reg.subsystem_index(n)).collect::<Result<_>>()?;
    idx.sort_unstable();
    let before = idx.len();
    idx.dedup();
    if idx.len() != before {
        return Err(Error::InvalidPartition(String::from("a subsystem is listed twice")));
    }
    Ok(idx)
}

/// Index of the basis state restricted to `subs`, in mixed radix over them.
fn sub_index(reg: &Register, index: usize, subs: &[usize]) -> usize {
    subs.iter()
        .fold(0, |acc, &s| acc * reg.subsystems()[s].dim() + reg.digit(index, s))
}

/// Traces out every subsystem not in `keep`.
pub fn partial_trace(state: &StateVector, keep: &[&str]) -> Result<DensityMatrix> {
    let reg = state.register();
    let kept = resolve(reg, keep)?;
    if kept.is_empty() || kept.len() == reg.len() {
        return Err(Error::InvalidPartition(String::from("keep must be a nonempty proper subset")));
    }
    let rest: Vec<usize> = (0..reg.len()).filter(|s| !kept.contains(s)).collect();
    let basis = Arc::new(Register::new(kept.iter().map(|&s| reg.subsystems()[s].clone()).collect())?);
    let n = basis.dim();
    // group amplitudes by the environment state
    let mut groups: BTreeMap<usize, Vec<(usize, C64)>> = BTreeMap::new();
    for (i, a) in state.iter() {
        groups.entry(sub_index(reg, i, &rest)).or_default().push((sub_index(reg, i, &kept), a));
    }
    let norm = state.norm_sqr();
    if !(norm > 0.0) {
        return Err(Error::ZeroNorm);
    }
    let mut entries = vec![C64::default(); n * n];
    for members in groups.values() {
        for &(i, a) in members {
            for &(j, b) in members {
                entries[i * n + j] += a * b.conj() / norm;
            }
        }
    }
    Ok(DensityMatrix { basis, entries })
}

/// Squared Schmidt coefficients across a cut, descending and summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtSpectrum {
    coefficients: Vec<f64>,
}

impl SchmidtSpectrum {
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Number of coefficients above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.coefficients.iter().filter(|&&c| c > tol).count()
    }

    pub fn entropy(&self) -> f64 {
        entropy_bits(&self.coefficients)
    }

    /// Second-largest coefficient, zero for a product state.
    pub fn second(&self) -> f64 {
        self.coefficients.get(1).copied().unwrap_or(0.0)
    }
}

fn check_partition(reg: &Register, a: &[&str], b: &[&str]) -> Result<(Vec<usize>, Vec<usize>)> {
    let sa = resolve(reg, a)?;
    let sb = resolve(reg, b)?;
    if sa.is_empty() || sb.is_empty() {
        return Err(Error::InvalidPartition(String::from("both sides must be nonempty")));
    }
    if sa.iter().any(|s| sb.contains(s)) {
        return Err(Error::InvalidPartition(String::from("sides overlap")));
    }
    if sa.len() + sb.len() != reg.len() {
        return Err(Error::InvalidPartition(String::from("sides do not cover the register")));
    }
    Ok((sa, sb))
}

/// Schmidt spectrum of `state` across the cut `a | b`.
pub fn schmidt(state: &StateVector, a: &[&str], b: &[&str]) -> Result<SchmidtSpectrum> {
    let reg = state.register();
    let (sa, sb) = check_partition(reg, a, b)?;
    let norm = state.norm_sqr();
    if !(norm > 0.0) {
        return Err(Error::ZeroNorm);
    }
    // amplitude matrix over populated row/column keys only
    let mut rows: BTreeMap<usize, usize> = BTreeMap::new();
    let mut cols: BTreeMap<usize, usize> = BTreeMap::new();
    let mut cells = Vec::new();
    for (i, amp) in state.iter() {
        let ka = sub_index(reg, i, &sa);
        let kb = sub_index(reg, i, &sb);
        let nr = rows.len();
        let r = *rows.entry(ka).or_insert(nr);
        let nc = cols.len();
        let c = *cols.entry(kb).or_insert(nc);
        cells.push((r, c, amp));
    }
    let (nr, nc) = (rows.len(), cols.len());
    // Gram matrix on the smaller side
    let transpose = nc < nr;
    let m = if transpose { nc } else { nr };
    let mut byother: BTreeMap<usize, Vec<(usize, C64)>> = BTreeMap::new();
    for (r, c, amp) in cells {
        let (own, other) = if transpose { (c, r) } else { (r, c) };
        byother.entry(other).or_default().push((own, amp));
    }
    let mut gram = vec![C64::default(); m * m];
    for members in byother.values() {
        for &(i, x) in members {
            for &(j, y) in members {
                gram[i * m + j] += x * y.conj() / norm;
            }
        }
    }
    let mut coefficients: Vec<f64> = hermitian_eigenvalues(m, &gram)
        .into_iter()
        .map(|v| v.max(0.0))
        .filter(|&v| v > EIGEN_FLOOR)
        .collect();
    let total: f64 = coefficients.iter().sum();
    for c in &mut coefficients {
        *c /= total;
    }
    Ok(SchmidtSpectrum { coefficients })
}

/// True when the second Schmidt coefficient across `a | b` is below `tol`.
pub fn is_product(state: &StateVector, a: &[&str], b: &[&str], tol: f64) -> Result<bool> {
    Ok(schmidt(state, a, b)?.second() < tol)
}

/// Entanglement entropy of `side` against all remaining subsystems.
pub fn cut_entropy(state: &StateVector, side: &[&str]) -> Result<f64> {
    let reg = state.register();
    let sa = resolve(reg, side)?;
    let rest: Vec<&str> = (0..reg.len())
        .filter(|s| !sa.contains(s))
        .map(|s| reg.subsystems()[s].name())
        .collect();
    Ok(schmidt(state, side, &rest)?.entropy())
}
