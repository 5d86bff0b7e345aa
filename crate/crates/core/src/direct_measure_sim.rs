//! Direct wavefunction measurement by scanning a polarization-rotating sliver
//! across the object and post-selecting the `p = 0` Fourier bin.
//!
//! The object `psi(x)` enters in `|V>`. A sliver at cell `x_s` rotates the
//! polarization there by `exp(-i theta sigma_y)`. Behind a pinhole at `p = 0`
//! the polarization imbalance is proportional to the weak value
//! `psi(x_s) dx / psi~(0)`, so scanning `x_s` maps out `psi` up to a constant.
//!
//! All rotations are exact; the first-order behaviour is a measured property.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polarization::{pauli_expectation, rotate_polarization, JonesState, PauliOp};
use crate::polarization::PolarizedSpectrum;
use crate::wavefield::{dft, SampledField};

/// Largest sliver rotation accepted without an explicit override (20 degrees).
pub const THETA_LIMIT: f64 = 20.0 * std::f64::consts::PI / 180.0;

/// `|psi~(0)|` below this fraction of the spectral peak counts as a null.
pub const PINHOLE_FLOOR_REL: f64 = 1e-12;

/// `|theta <A>_w|` above which the operational route flags strong coupling.
pub const STRONG_COUPLING_LIMIT: f64 = 0.5;

/// An object and a sliver of one grid cell rotated by `theta`.
#[derive(Clone, Debug)]
pub struct SliverScenario {
    object: SampledField,
    theta: f64,
    sliver_index: usize,
}

impl SliverScenario {
    pub fn new(object: SampledField, theta: f64, sliver_index: usize) -> Result<Self> {
        Self::build(object, theta, sliver_index, false)
    }

    /// As [`SliverScenario::new`] without the 20 degree limit.
    pub fn with_theta_override(object: SampledField, theta: f64, sliver_index: usize) -> Result<Self> {
        Self::build(object, theta, sliver_index, true)
    }

    fn build(object: SampledField, theta: f64, sliver_index: usize, allow_large: bool) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::InvalidScenario("theta must be finite".into()));
        }
        if !allow_large && theta.abs() > THETA_LIMIT {
            return Err(Error::InvalidScenario(format!(
                "|theta| = {} exceeds 20 degrees",
                theta.abs()
            )));
        }
        if sliver_index >= object.grid().len() {
            return Err(Error::InvalidScenario(format!(
                "sliver index {sliver_index} outside grid of {} cells",
                object.grid().len()
            )));
        }
        if object.norm_sqr() == 0.0 {
            return Err(Error::ZeroIntensity);
        }
        Ok(Self {
            object,
            theta,
            sliver_index,
        })
    }

    pub fn object(&self) -> &SampledField {
        &self.object
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn sliver_index(&self) -> usize {
        self.sliver_index
    }
}

/// Applies the exact rotation at the sliver cell and transforms both
/// polarization components.
///
/// With `psi` entering in `|V>`, the rotated cell holds
/// `-sin(theta) psi(x_s) |H> + cos(theta) psi(x_s) |V>`.
pub fn sliver_rotate(sc: &SliverScenario) -> PolarizedSpectrum {
    let grid = *sc.object.grid();
    let k = sc.sliver_index;
    let psi_s = sc.object.values()[k];
    let rotated = rotate_polarization(&JonesState::new(Complex64::new(0.0, 0.0), psi_s), sc.theta);
    let mut h = vec![Complex64::new(0.0, 0.0); grid.len()];
    h[k] = rotated.h;
    let mut v = sc.object.values().to_vec();
    v[k] = rotated.v;
    let h = dft(&SampledField::new(grid, h).expect("finite"));
    let v = dft(&SampledField::new(grid, v).expect("finite"));
    PolarizedSpectrum::new(h, v).expect("components share a grid")
}

fn pinhole_amplitude(object: &SampledField) -> Result<Complex64> {
    let spectrum = dft(object);
    let peak = spectrum.modulus().into_iter().fold(0.0, f64::max);
    let at_zero = spectrum.value_at_zero();
    if !(at_zero.norm() > PINHOLE_FLOOR_REL * peak) {
        return Err(Error::PostSelectionNull(format!(
            "object spectrum vanishes at p = 0 (|psi~(0)| = {:.3e})",
            at_zero.norm()
        )));
    }
    Ok(at_zero)
}

/// `psi(x_s) dx / psi~(0)`: the weak value of the sliver projector with
/// post-selection on the `p = 0` bin, in the discrete measure.
pub fn pinhole_weak_value(sc: &SliverScenario) -> Result<Complex64> {
    let psi0 = pinhole_amplitude(&sc.object)?;
    Ok(sc.object.values()[sc.sliver_index] * sc.object.grid().dx() / psi0)
}

/// Exact `<sigma_x>` and `<sigma_y>` of the polarization state in the `p = 0`
/// bin after the sliver.
pub fn pointer_signals(sc: &SliverScenario) -> Result<(f64, f64)> {
    pinhole_amplitude(&sc.object)?;
    let ps = sliver_rotate(sc);
    let state = ps.at(sc.object.grid().zero_momentum_index());
    Ok((
        pauli_expectation(&state, PauliOp::X),
        pauli_expectation(&state, PauliOp::Y),
    ))
}

/// The `p = 0` polarization state for a sliver at cell `k`, without forming
/// the full spectra. At `p = 0` every transform kernel is 1, so the bin is
/// `psi~(0)` with the cell contribution `psi(x_k) dx` redistributed by the
/// rotation.
fn pinhole_state(object: &SampledField, psi0: Complex64, k: usize, theta: f64) -> JonesState {
    let cell = object.values()[k] * object.grid().dx();
    let rotated = rotate_polarization(&JonesState::new(Complex64::new(0.0, 0.0), cell), theta);
    JonesState::new(rotated.h, psi0 - cell + rotated.v)
}

/// Weak-value estimates `(-<sigma_x> + i <sigma_y>) / (2 theta |psi~(0)|^2)`
/// for every sliver position.
pub fn scan_weak_values(object: &SampledField, theta: f64) -> Result<Vec<Complex64>> {
    if theta == 0.0 {
        return Err(Error::Domain("theta = 0 carries no pointer signal".into()));
    }
    let psi0 = pinhole_amplitude(object)?;
    let denom = 2.0 * theta * psi0.norm_sqr();
    Ok((0..object.grid().len())
        .map(|k| {
            let state = pinhole_state(object, psi0, k, theta);
            let sx = pauli_expectation(&state, PauliOp::X);
            let sy = pauli_expectation(&state, PauliOp::Y);
            Complex64::new(-sx, sy) / denom
        })
        .collect())
}

/// Scales to unit norm and rotates the global phase so that the
/// largest-magnitude sample is real and positive.
pub fn fix_gauge(field: &SampledField) -> Result<SampledField> {
    let unit = field.normalized()?;
    let peak = unit
        .values()
        .iter()
        .copied()
        .max_by(|a, b| a.norm_sqr().total_cmp(&b.norm_sqr()))
        .expect("non-empty grid");
    let rotation = peak.conj() / peak.norm();
    SampledField::new(
        *unit.grid(),
        unit.values().iter().map(|v| v * rotation).collect(),
    )
}

/// Scans the sliver over every cell and assembles the normalized, gauge-fixed
/// wavefunction estimate.
pub fn scan_reconstruct(object: &SampledField, theta: f64) -> Result<SampledField> {
    let estimates = scan_weak_values(object, theta)?;
    fix_gauge(&SampledField::new(*object.grid(), estimates)?)
}

/// Modulus ratios at `p = 0` after attenuating (`exp(-theta)`) and
/// phase-shifting (`exp(-i theta)`) the sliver cell.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperationalRatios {
    pub re_ratio: f64,
    pub im_ratio: f64,
    /// Set when `|theta <A>_w|` exceeds 0.5 and the first-order reading is unreliable.
    pub strong_coupling: bool,
}

impl OperationalRatios {
    /// `(-ln re_ratio + i ln im_ratio) / theta`, the first-order weak value.
    pub fn weak_value(&self, theta: f64) -> Complex64 {
        Complex64::new(-self.re_ratio.ln(), self.im_ratio.ln()) / theta
    }
}

fn operational_at(object: &SampledField, psi0: Complex64, k: usize, theta: f64) -> Result<OperationalRatios> {
    let cell = object.values()[k] * object.grid().dx();
    let attenuated = psi0 + cell * ((-theta).exp() - 1.0);
    let shifted = psi0 + cell * (Complex64::from_polar(1.0, -theta) - 1.0);
    let (re_ratio, im_ratio) = (attenuated.norm() / psi0.norm(), shifted.norm() / psi0.norm());
    if !(re_ratio > 0.0 && im_ratio > 0.0) {
        return Err(Error::PostSelectionNull(format!(
            "modulated spectrum vanishes at p = 0 for cell {k}"
        )));
    }
    Ok(OperationalRatios {
        re_ratio,
        im_ratio,
        strong_coupling: (theta * cell / psi0).norm() > STRONG_COUPLING_LIMIT,
    })
}

/// The operational readout at one cell: exact single-cell modulations with
/// unit weight, so that `theta A` acts as `theta` on the cell.
pub fn operational_ratios(object: &SampledField, x_s: usize, theta: f64) -> Result<OperationalRatios> {
    if x_s >= object.grid().len() {
        return Err(Error::InvalidScenario(format!("cell {x_s} outside grid")));
    }
    let psi0 = pinhole_amplitude(object)?;
    operational_at(object, psi0, x_s, theta)
}

/// First-order weak values from the operational route at every cell.
pub fn operational_scan(object: &SampledField, theta: f64) -> Result<Vec<Complex64>> {
    if theta == 0.0 {
        return Err(Error::Domain("theta = 0 carries no signal".into()));
    }
    let psi0 = pinhole_amplitude(object)?;
    (0..object.grid().len())
        .map(|k| operational_at(object, psi0, k, theta).map(|r| r.weak_value(theta)))
        .collect()
}

/// Accuracy of a scan against the known object.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanError {
    pub theta: f64,
    /// Largest pointwise deviation of the gauge-fixed unit-norm fields.
    pub max_err: f64,
    /// `1 - |<rec|true>|`.
    pub overlap_err: f64,
}

impl ScanError {
    pub const CSV_HEADER: &'static str = "theta,max_err,overlap_err";

    pub fn csv_row(&self) -> String {
        format!("{:.16e},{:.16e},{:.16e}", self.theta, self.max_err, self.overlap_err)
    }
}

/// Compares a reconstruction with the gauge-fixed unit-norm object.
pub fn scan_error(object: &SampledField, reconstruction: &SampledField, theta: f64) -> Result<ScanError> {
    let truth = fix_gauge(object)?;
    let max_err = truth
        .values()
        .iter()
        .zip(reconstruction.values())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    let overlap = reconstruction.inner(&truth)?.norm();
    Ok(ScanError {
        theta,
        max_err,
        overlap_err: 1.0 - overlap,
    })
}

pub const SCAN_CSV_HEADER: &str = "x,re_true,im_true,re_rec,im_rec";

/// Rows of `x,re_true,im_true,re_rec,im_rec`, with the truth gauge-fixed.
pub fn scan_csv_rows(object: &SampledField, reconstruction: &SampledField) -> Result<Vec<String>> {
    let truth = fix_gauge(object)?;
    Ok(truth
        .grid()
        .positions()
        .zip(truth.values())
        .zip(reconstruction.values())
        .map(|((x, t), r)| format!("{x:.16e},{:.16e},{:.16e},{:.16e},{:.16e}", t.re, t.im, r.re, r.im))
        .collect())
}
