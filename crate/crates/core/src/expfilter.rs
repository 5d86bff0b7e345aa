//! Phase retrieval from two Fourier intensities: the bare object and the
//! object seen through an exponential amplitude filter `exp(-c (x - s))`.
//!
//! The filtered spectrum equals `exp(c s) F(p - i c)`. Comparing its modulus
//! with the analytically continued modulus `|M(p - i c)|`, which is computable
//! from `M` alone, isolates `D(p) = -Im phi(p - i c)`. Expanding that relation
//! in position space turns it into a division by `-i sinh(c x)`, from which the
//! phase follows up to a constant and a linear term. The linear term is read off
//! the `x = 0` sample separately as the tilt.
//!
//! Both continuation steps work on the grid re-anchored at `x = 0`: the
//! inverse transforms of `M` and `D` are centered there by construction.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::wavefield::{dft, idft, Grid, SampledField, Spectrum, EXTENSION_EXPONENT_LIMIT};

/// Default modulus floor, relative to the peak, below which bins are masked.
pub const DEFAULT_FLOOR_REL: f64 = 1e-6;

/// Default filter strength `c (b - a)`.
pub const DEFAULT_STRENGTH: f64 = 2.0;

/// Default offset of `s` to the left of the support, as a fraction of its width.
pub const DEFAULT_OFFSET_FRACTION: f64 = 0.05;

/// Relative spread of `D` below which it is reported as flat.
const FLAT_D_TOLERANCE: f64 = 1e-9;

/// An exponential amplitude filter `exp(-c (x - s))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilterSpec {
    pub c: f64,
    pub s: f64,
}

impl FilterSpec {
    pub fn new(c: f64, s: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidFilter(format!("c must be positive, got {c}")));
        }
        if !s.is_finite() {
            return Err(Error::InvalidFilter(format!("s must be finite, got {s}")));
        }
        Ok(Self { c, s })
    }

    /// The default filter for an object supported on `[a, b]`:
    /// `c (b - a) = 2` and `s = a - 0.05 (b - a)`.
    pub fn for_support(a: f64, b: f64) -> Result<Self> {
        Self::with_strength(a, b, DEFAULT_STRENGTH)
    }

    /// Filter with `c (b - a) = strength` and the default offset.
    pub fn with_strength(a: f64, b: f64, strength: f64) -> Result<Self> {
        let width = b - a;
        if !(width > 0.0) {
            return Err(Error::InvalidFilter(format!(
                "support must have positive width, got [{a}, {b}]"
            )));
        }
        Self::new(strength / width, a - DEFAULT_OFFSET_FRACTION * width)
    }

    /// Checks that `s` lies strictly left of the support of `field`, so that
    /// the filter never amplifies the object.
    pub fn check_support(&self, field: &SampledField) -> Result<()> {
        if let Some((a, _)) = field.support() {
            if self.s >= a {
                return Err(Error::InvalidFilter(format!(
                    "offset s = {} must lie left of the support edge a = {a}",
                    self.s
                )));
            }
        }
        Ok(())
    }
}

/// Retrieved phase and tilt, with per-bin validity and diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseResult {
    /// `phi(p_j)` with the constant and linear parts removed.
    pub phase: Vec<f64>,
    /// Coefficient `alpha` of the linear phase `alpha p`.
    pub tilt: f64,
    /// Bins where both moduli cleared the floor.
    pub valid: Vec<bool>,
    pub diagnostics: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
}

impl PhaseResult {
    /// `phase + tilt * p` on the momentum grid of `grid`.
    pub fn total_phase(&self, grid: &Grid) -> Vec<f64> {
        self.phase
            .iter()
            .zip(grid.momenta())
            .map(|(phi, p)| phi + self.tilt * p)
            .collect()
    }
}

/// `f(x) exp(-c (x - s))`. Samples outside the support stay exactly zero.
pub fn apply_exp_filter(field: &SampledField, fs: &FilterSpec) -> Result<SampledField> {
    fs.check_support(field)?;
    let values = field
        .values()
        .iter()
        .zip(field.grid().positions())
        .map(|(v, x)| {
            if v.norm_sqr() == 0.0 {
                *v
            } else {
                v * (-fs.c * (x - fs.s)).exp()
            }
        })
        .collect();
    SampledField::new(*field.grid(), values)
}

/// The two intensities the method consumes: `|F(p)|^2` and the intensity
/// behind the filter.
pub fn simulate_intensities(field: &SampledField, fs: &FilterSpec) -> Result<(Vec<f64>, Vec<f64>)> {
    let bare = dft(field).intensity();
    let filtered = dft(&apply_exp_filter(field, fs)?).intensity();
    Ok((bare, filtered))
}

fn check_length(grid: &Grid, len: usize) -> Result<()> {
    if len != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            actual: len,
        });
    }
    Ok(())
}

fn check_exponent(c: f64, grid: &Grid) -> Result<()> {
    let half_width = grid.len() as f64 * grid.dx() / 2.0;
    let product = c * half_width;
    if product > EXTENSION_EXPONENT_LIMIT {
        return Err(Error::ExtensionOverflow { q: c, product });
    }
    Ok(())
}

fn check_modulus(m: &[f64]) -> Result<()> {
    for (index, &value) in m.iter().enumerate() {
        if !value.is_finite() {
            return Err(Error::NonFinite { index });
        }
        if value < 0.0 {
            return Err(Error::NegativeModulus { index, value });
        }
    }
    Ok(())
}

/// Inverse-transform samples below this fraction of the peak are treated as zero.
pub const ROUNDOFF_REL: f64 = 16.0 * f64::EPSILON;

/// `|M(p - i c)|` from samples of `M(p)`: the modulus of the transform of
/// `IFT[M](x) exp(-c x)`.
pub fn extended_modulus(m: &[f64], c: f64, grid: &Grid) -> Result<Vec<f64>> {
    check_length(grid, m.len())?;
    check_modulus(m)?;
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::InvalidFilter(format!("c must be positive, got {c}")));
    }
    let centered = grid.recentered();
    check_exponent(c, &centered)?;
    let spectrum = Spectrum::new(centered, m.iter().map(|&v| Complex64::new(v, 0.0)).collect())?;
    let inverse = idft(&spectrum);
    // samples at roundoff level carry no information and would otherwise be
    // amplified by the exponential weight far from the support
    let peak = inverse.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
    let noise = ROUNDOFF_REL * peak;
    let weighted: Vec<Complex64> = inverse
        .values()
        .iter()
        .zip(centered.positions())
        .map(|(v, x)| if v.norm() < noise { Complex64::new(0.0, 0.0) } else { v * (-c * x).exp() })
        .collect();
    Ok(dft(&SampledField::new(centered, weighted)?).modulus())
}

/// `D(p) = ln(|F~(p)| / |M(p - i c)|) - c s` on bins where both moduli reach
/// `floor_rel` of their maxima; masked bins are filled by linear interpolation
/// between the nearest valid bins, wrapping around the ends of the grid.
pub fn log_ratio_d(
    ftilde_mod: &[f64],
    mext: &[f64],
    fs: &FilterSpec,
    floor_rel: f64,
) -> Result<(Vec<f64>, Vec<bool>)> {
    if ftilde_mod.len() != mext.len() {
        return Err(Error::LengthMismatch {
            expected: ftilde_mod.len(),
            actual: mext.len(),
        });
    }
    if !(floor_rel > 0.0 && floor_rel < 1.0) {
        return Err(Error::InvalidFilter(format!(
            "floor_rel must lie in (0, 1), got {floor_rel}"
        )));
    }
    check_modulus(ftilde_mod)?;
    check_modulus(mext)?;
    let peak_f = ftilde_mod.iter().copied().fold(0.0, f64::max);
    let peak_m = mext.iter().copied().fold(0.0, f64::max);
    let mask: Vec<bool> = ftilde_mod
        .iter()
        .zip(mext)
        .map(|(&f, &m)| f > 0.0 && m > 0.0 && f >= floor_rel * peak_f && m >= floor_rel * peak_m)
        .collect();
    let valid = mask.iter().filter(|&&v| v).count();
    if valid < 2 {
        return Err(Error::InsufficientSupport { valid });
    }
    let mut d: Vec<f64> = ftilde_mod
        .iter()
        .zip(mext)
        .zip(&mask)
        .map(|((&f, &m), &ok)| if ok { (f / m).ln() - fs.c * fs.s } else { 0.0 })
        .collect();
    fill_circular(&mut d, &mask);
    Ok((d, mask))
}

/// Linear interpolation over masked entries, treating the array as periodic.
fn fill_circular(values: &mut [f64], mask: &[bool]) {
    let n = values.len();
    let anchors: Vec<usize> = (0..n).filter(|&j| mask[j]).collect();
    for (i, &left) in anchors.iter().enumerate() {
        let right = anchors[(i + 1) % anchors.len()];
        let gap = (right + n - left) % n;
        let gap = if gap == 0 { n } else { gap };
        let (vl, vr) = (values[left], values[right]);
        for step in 1..gap {
            let t = step as f64 / gap as f64;
            values[(left + step) % n] = vl + t * (vr - vl);
        }
    }
}

/// Solves `D(p) = -Im phi(p - i c)` for `phi`.
///
/// With `m(x) = IFT[D](x)`, the phase is `Re FT[m(x) / (-i sinh(c x))]`, with
/// the quotient set to zero at `x = 0`. The `x = 0` sample carries the linear
/// part instead: a phase `alpha p` contributes the constant `alpha c` to `D`,
/// hence a point mass `alpha c / dx` at the origin, so `alpha = m(0) dx / c`.
pub fn solve_phase(d: &[f64], c: f64, grid: &Grid) -> Result<PhaseResult> {
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::InvalidFilter(format!("c must be positive, got {c}")));
    }
    check_length(grid, d.len())?;
    let centered = grid.recentered();
    check_exponent(c, &centered)?;
    let spectrum = Spectrum::new(centered, d.iter().map(|&v| Complex64::new(v, 0.0)).collect())?;
    let m = idft(&spectrum);
    let origin = centered.zero_momentum_index();
    let quotient: Vec<Complex64> = m
        .values()
        .iter()
        .zip(centered.positions())
        .enumerate()
        .map(|(k, (v, x))| {
            if k == origin {
                Complex64::new(0.0, 0.0)
            } else {
                v / Complex64::new(0.0, -(c * x).sinh())
            }
        })
        .collect();
    let transformed = dft(&SampledField::new(centered, quotient)?);
    let phase: Vec<f64> = transformed.values().iter().map(|v| v.re).collect();
    let imag_residual = transformed
        .values()
        .iter()
        .map(|v| v.im.abs())
        .fold(0.0, f64::max);
    let tilt = m.values()[origin].re * centered.dx() / c;

    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("imag_residual".to_string(), imag_residual);
    diagnostics.insert("origin_imag".to_string(), m.values()[origin].im.abs());
    Ok(PhaseResult {
        phase,
        tilt,
        valid: vec![true; d.len()],
        diagnostics,
        warnings: Vec::new(),
    })
}

/// `idft(M exp(i phi))`, with `phi` the retrieved phase and, optionally, the
/// tilt term `alpha p`.
pub fn reconstruct_object(
    m: &[f64],
    pr: &PhaseResult,
    grid: &Grid,
    include_tilt: bool,
) -> Result<SampledField> {
    check_length(grid, m.len())?;
    check_length(grid, pr.phase.len())?;
    check_modulus(m)?;
    let tilt = if include_tilt { pr.tilt } else { 0.0 };
    let values = m
        .iter()
        .zip(&pr.phase)
        .zip(grid.momenta())
        .map(|((&mag, &phi), p)| Complex64::from_polar(mag, phi + tilt * p))
        .collect();
    Ok(idft(&Spectrum::new(*grid, values)?))
}

fn sqrt_intensity(intensity: &[f64]) -> Result<Vec<f64>> {
    check_modulus(intensity)?;
    Ok(intensity.iter().map(|v| v.sqrt()).collect())
}

/// Heuristics for objects the method cannot handle. A Hermitian object has a
/// real spectrum up to a linear phase, which makes `D` constant and hides the
/// sign flips at its real zeros.
fn hermitian_warnings(d: &[f64], modulus: &[f64], mask: &[bool], grid: &Grid) -> Vec<String> {
    let mut warnings = Vec::new();
    let valid_d: Vec<f64> = d.iter().zip(mask).filter(|(_, &ok)| ok).map(|(v, _)| *v).collect();
    let lo = valid_d.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = valid_d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo <= FLAT_D_TOLERANCE * hi.abs().max(lo.abs()).max(1.0) {
        warnings.push(
            "log-ratio D is constant: the object may be Hermitian, whose phase is not recoverable"
                .to_string(),
        );
    }
    for j in 1..modulus.len().saturating_sub(1) {
        if !(mask[j - 1] && mask[j + 1]) {
            continue;
        }
        let neighbours = modulus[j - 1].min(modulus[j + 1]);
        if modulus[j] < 0.5 * neighbours {
            warnings.push(format!(
                "deep modulus null near p = {:.6}: a real zero of the spectrum, as for Hermitian objects",
                grid.p(j)
            ));
        }
    }
    warnings
}

/// Full pipeline: intensities to moduli, extended modulus, `D`, phase solve
/// and reconstruction. The reconstruction omits the tilt; apply it through
/// [`reconstruct_object`] if the absolute position matters.
pub fn retrieve(
    intensity_unfiltered: &[f64],
    intensity_filtered: &[f64],
    fs: &FilterSpec,
    grid: &Grid,
    floor_rel: f64,
) -> Result<(PhaseResult, SampledField)> {
    check_length(grid, intensity_unfiltered.len())?;
    check_length(grid, intensity_filtered.len())?;
    let m = sqrt_intensity(intensity_unfiltered)?;
    let ftilde = sqrt_intensity(intensity_filtered)?;
    let mext = extended_modulus(&m, fs.c, grid)?;
    let (d, mask) = log_ratio_d(&ftilde, &mext, fs, floor_rel)?;
    let mut result = solve_phase(&d, fs.c, grid)?;
    result.warnings = hermitian_warnings(&d, &m, &mask, grid);
    let valid_bins = mask.iter().filter(|&&v| v).count();
    result
        .diagnostics
        .insert("valid_bins".to_string(), valid_bins as f64);
    result.valid = mask;
    let object = reconstruct_object(&m, &result, grid, false)?;
    Ok((result, object))
}
