//! 1D wavefunctions sampled on a uniform grid.
//!
//! Units use ħ = 1. Momentum spectra come from a unitary DFT:
//! `c_k = (1/√n) Σ_j ψ_j √Δx e^{-2πi jk/n}`, so `Σ|c_k|² = Σ|ψ_j|²Δx`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::{Error, Result, C64};

const TWO_PI: f64 = 2.0 * core::f64::consts::PI;

/// Containment: boundary magnitude must stay below this fraction of the peak.
pub const CONTAINMENT: f64 = 1e-6;

/// Default sample count for the tray/spoon grid.
pub const DEFAULT_POINTS: usize = 4096;

/// Tray half-window in units of the tray width.
pub const TRAY_WINDOW: f64 = 6.0;

/// Minimum samples per packet width.
pub const POINTS_PER_WIDTH: f64 = 4.0;

/// Complex amplitudes on `n` uniformly spaced points `x_min + iΔx`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridWavefunction {
    x_min: f64,
    x_max: f64,
    amps: Vec<C64>,
}

/// Mean and standard deviation of a discrete distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub std: f64,
}

impl Moments {
    pub fn variance(&self) -> f64 {
        self.std * self.std
    }
}

/// Weighted first and second moments. Weights need not be normalized.
pub fn moments(values: &[f64], weights: &[f64]) -> Moments {
    let total: f64 = weights.iter().sum();
    let mean = values.iter().zip(weights).map(|(x, w)| x * w).sum::<f64>() / total;
    let var = values
        .iter()
        .zip(weights)
        .map(|(x, w)| (x - mean) * (x - mean) * w)
        .sum::<f64>()
        / total;
    Moments { mean, std: var.max(0.0).sqrt() }
}

impl GridWavefunction {
    pub fn new(x_min: f64, x_max: f64, amps: Vec<C64>) -> Result<Self> {
        let n = amps.len();
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::InvalidParameter(format!("grid size {n} is not a power of two")));
        }
        if !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::InvalidParameter(format!("bad domain [{x_min}, {x_max}]")));
        }
        Ok(GridWavefunction { x_min, x_max, amps })
    }

    /// Normalized Gaussian centred at `center` whose position density has
    /// standard deviation `sigma`.
    pub fn gaussian(n: usize, x_min: f64, x_max: f64, center: f64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::InvalidParameter(format!("gaussian width {sigma} must be positive")));
        }
        let dx = (x_max - x_min) / n as f64;
        let amps = (0..n)
            .map(|i| {
                let x = x_min + i as f64 * dx - center;
                C64::new((-x * x / (4.0 * sigma * sigma)).exp(), 0.0)
            })
            .collect();
        GridWavefunction::new(x_min, x_max, amps)?.normalized()
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.amps.len() as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.x(i)).collect()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    /// Σ|ψ_i|²Δx.
    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.dx()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr();
        if !(n > 0.0) {
            return Err(Error::ZeroNorm);
        }
        let s = 1.0 / n.sqrt();
        Ok(GridWavefunction {
            x_min: self.x_min,
            x_max: self.x_max,
            amps: self.amps.iter().map(|a| a * s).collect(),
        })
    }

    /// Probability mass per grid cell, |ψ_i|²Δx.
    pub fn probabilities(&self) -> Vec<f64> {
        let dx = self.dx();
        self.amps.iter().map(|a| a.norm_sqr() * dx).collect()
    }

    pub fn position_moments(&self) -> Moments {
        moments(&self.positions(), &self.probabilities())
    }

    /// Largest boundary magnitude relative to the peak magnitude.
    pub fn boundary_ratio(&self) -> f64 {
        let peak = self.amps.iter().map(|a| a.norm()).fold(0.0, f64::max);
        if peak == 0.0 {
            return 0.0;
        }
        let first = self.amps[0].norm();
        let last = self.amps[self.len() - 1].norm();
        first.max(last) / peak
    }

    pub fn is_contained(&self) -> bool {
        self.boundary_ratio() < CONTAINMENT
    }

    /// Probability mass inside `[a, b]`.
    pub fn mass_in(&self, (a, b): (f64, f64)) -> f64 {
        let dx = self.dx();
        (0..self.len())
            .filter(|&i| {
                let x = self.x(i);
                x >= a && x <= b
            })
            .map(|i| self.amps[i].norm_sqr() * dx)
            .sum()
    }

    /// The same wavefunction translated by `shift` (periodic, via the DFT).
    pub fn shifted(&self, shift: f64) -> GridWavefunction {
        let spectrum = momentum_spectrum(self);
        let amps = spectrum
            .momenta
            .iter()
            .zip(&spectrum.amplitudes)
            .map(|(&p, &c)| c * C64::from_polar(1.0, -p * shift))
            .collect();
        MomentumSpectrum { amplitudes: amps, ..spectrum }.to_position()
    }
}

/// In-place radix-2 FFT; `inverse` uses `e^{+2πi jk/n}`. Unscaled.
fn fft(buf: &mut [C64], inverse: bool) {
    let n = buf.len();
    debug_assert!(n.is_power_of_two());
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            buf.swap(i, j);
        }
    }
    let sign = if inverse { 1.0 } else { -1.0 };
    let mut len = 2;
    while len <= n {
        let step = sign * TWO_PI / len as f64;
        for start in (0..n).step_by(len) {
            for k in 0..len / 2 {
                let w = C64::from_polar(1.0, step * k as f64);
                let a = buf[start + k];
                let b = buf[start + k + len / 2] * w;
                buf[start + k] = a + b;
                buf[start + k + len / 2] = a - b;
            }
        }
        len <<= 1;
    }
}

/// Momentum-space amplitudes, sorted by ascending momentum.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumSpectrum {
    pub momenta: Vec<f64>,
    pub amplitudes: Vec<C64>,
    x_min: f64,
    x_max: f64,
}

impl MomentumSpectrum {
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|c| c.norm_sqr()).collect()
    }

    pub fn moments(&self) -> Moments {
        moments(&self.momenta, &self.probabilities())
    }

    /// Probability mass with `|p| > threshold`.
    pub fn tail_mass(&self, threshold: f64) -> f64 {
        self.momenta
            .iter()
            .zip(&self.amplitudes)
            .filter(|(p, _)| p.abs() > threshold)
            .map(|(_, c)| c.norm_sqr())
            .sum()
    }

    /// Inverse transform back onto the original grid.
    pub fn to_position(&self) -> GridWavefunction {
        let n = self.amplitudes.len();
        let dx = (self.x_max - self.x_min) / n as f64;
        // undo the fftshift ordering
        let mut buf = vec![C64::default(); n];
        for (sorted, &c) in self.amplitudes.iter().enumerate() {
            buf[(sorted + n / 2) % n] = c;
        }
        fft(&mut buf, true);
        let scale = 1.0 / ((n as f64).sqrt() * dx.sqrt());
        GridWavefunction {
            x_min: self.x_min,
            x_max: self.x_max,
            amps: buf.into_iter().map(|c| c * scale).collect(),
        }
    }
}

pub fn momentum_spectrum(wf: &GridWavefunction) -> MomentumSpectrum {
    let n = wf.len();
    let dx = wf.dx();
    let scale = dx.sqrt() / (n as f64).sqrt();
    let mut buf: Vec<C64> = wf.amps.iter().map(|a| a * scale).collect();
    fft(&mut buf, false);
    let dp = TWO_PI / (n as f64 * dx);
    let half = n / 2;
    let mut momenta = Vec::with_capacity(n);
    let mut amplitudes = Vec::with_capacity(n);
    for sorted in 0..n {
        let k = (sorted + half) % n;
        let signed = k as f64 - if k >= half { n as f64 } else { 0.0 };
        momenta.push(signed * dp);
        amplitudes.push(buf[k]);
    }
    MomentumSpectrum { momenta, amplitudes, x_min: wf.x_min, x_max: wf.x_max }
}

/// Zeroes the amplitudes inside (`keep_inside = false`) or outside the
/// interval and renormalizes. Returns the probability of the kept part.
pub fn window_project(
    wf: &GridWavefunction,
    (a, b): (f64, f64),
    keep_inside: bool,
) -> Result<(f64, GridWavefunction)> {
    if !(a < b) || a < wf.x_min || b > wf.x_max {
        return Err(Error::DomainTooSmall {
            x_min: wf.x_min,
            x_max: wf.x_max,
            what: format!("window [{a}, {b}]"),
        });
    }
    let amps: Vec<C64> = (0..wf.len())
        .map(|i| {
            let x = wf.x(i);
            let inside = x >= a && x <= b;
            if inside == keep_inside { wf.amps[i] } else { C64::default() }
        })
        .collect();
    let kept = GridWavefunction { x_min: wf.x_min, x_max: wf.x_max, amps };
    let p = kept.norm_sqr() / wf.norm_sqr();
    if p <= crate::measure::PROBABILITY_FLOOR {
        let side = if keep_inside { "inside" } else { "outside" };
        return Err(Error::ImpossibleOutcome { outcome: format!("particle {side} [{a}, {b}]"), probability: p });
    }
    Ok((p, kept.normalized()?))
}

/// Tray/spoon superposition parameters: a wide Gaussian of width `tray_width`
/// carrying amplitude `√(1−ε²)` and a narrow far-away one of width
/// `spoon_width` carrying `ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DickeParams {
    pub tray_width: f64,
    pub spoon_width: f64,
    pub tray_center: f64,
    pub spoon_center: f64,
    pub spoon_amplitude: f64,
}

impl DickeParams {
    /// Tray width 1, spoon width 1/40, separation 8, ε = 0.01.
    pub fn standard(ratio: f64) -> Self {
        DickeParams {
            tray_width: 1.0,
            spoon_width: 1.0 / ratio,
            tray_center: 0.0,
            spoon_center: 8.0,
            spoon_amplitude: 0.01,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if !(self.tray_width > 0.0) || !(self.spoon_width > 0.0) {
            return bad(format!("widths must be positive ({}, {})", self.tray_width, self.spoon_width));
        }
        if self.spoon_width > self.tray_width / 10.0 {
            return bad(format!("spoon width {} exceeds a tenth of the tray width", self.spoon_width));
        }
        if !(self.spoon_amplitude > 0.0 && self.spoon_amplitude < 1.0) {
            return bad(format!("spoon amplitude {} outside (0, 1)", self.spoon_amplitude));
        }
        let sep = (self.tray_center - self.spoon_center).abs();
        if sep < 5.0 * (self.tray_width + self.spoon_width) {
            return bad(format!("separation {sep} below 5(L + l)"));
        }
        Ok(())
    }

    /// `[min − 8L, max + 8L]` over both centres.
    pub fn default_domain(&self) -> (f64, f64) {
        let lo = self.tray_center.min(self.spoon_center);
        let hi = self.tray_center.max(self.spoon_center);
        (lo - 8.0 * self.tray_width, hi + 8.0 * self.tray_width)
    }

    /// Region watched by the tray detectors.
    pub fn tray_window(&self) -> (f64, f64) {
        (
            self.tray_center - TRAY_WINDOW * self.tray_width,
            self.tray_center + TRAY_WINDOW * self.tray_width,
        )
    }

    pub fn spoon_window(&self) -> (f64, f64) {
        (
            self.spoon_center - TRAY_WINDOW * self.spoon_width,
            self.spoon_center + TRAY_WINDOW * self.spoon_width,
        )
    }
}

fn packet(n: usize, x_min: f64, dx: f64, center: f64, width: f64) -> Vec<C64> {
    (0..n)
        .map(|i| {
            let x = x_min + i as f64 * dx - center;
            C64::new((-x * x / (2.0 * width * width)).exp(), 0.0)
        })
        .collect()
}

/// `√(1−ε²) N₁ e^{−(x−x₁)²/2L²} + ε N₂ e^{−(x−x₂)²/2ℓ²}` with each packet
/// normalized on the grid before weighting, then the sum renormalized.
pub fn gaussian_superposition(
    params: &DickeParams,
    n: usize,
    domain: Option<(f64, f64)>,
) -> Result<GridWavefunction> {
    params.validate()?;
    let (x_min, x_max) = domain.unwrap_or_else(|| params.default_domain());
    let margin = |c: f64, w: f64, what: &str| -> Result<()> {
        if c - 5.0 * w < x_min || c + 5.0 * w > x_max {
            return Err(Error::DomainTooSmall { x_min, x_max, what: String::from(what) });
        }
        Ok(())
    };
    margin(params.tray_center, params.tray_width, "the tray packet")?;
    margin(params.spoon_center, params.spoon_width, "the spoon packet")?;
    let dx = (x_max - x_min) / n as f64;
    let required = params.spoon_width / POINTS_PER_WIDTH;
    if dx > required {
        return Err(Error::UnderResolved { spacing: dx, width: params.spoon_width, required });
    }
    let tray = GridWavefunction::new(x_min, x_max, packet(n, x_min, dx, params.tray_center, params.tray_width))?
        .normalized()?;
    let spoon = GridWavefunction::new(x_min, x_max, packet(n, x_min, dx, params.spoon_center, params.spoon_width))?
        .normalized()?;
    let eps = params.spoon_amplitude;
    let big = (1.0 - eps * eps).sqrt();
    let amps = tray.amps.iter().zip(&spoon.amps).map(|(t, s)| t * big + s * eps).collect();
    GridWavefunction::new(x_min, x_max, amps)?.normalized()
}
