//! Weak-value amplification with a birefringent crystal.
//!
//! A probe beam pre-selected in `|S>` is split by `exp(-i eps sigma_z p)`,
//! which displaces the `|H>` and `|V>` components by `+eps` and `-eps`. After
//! projecting onto `|D_theta>` the beam centroid sits near `eps / tan(theta)`,
//! far beyond the physical splitting when `theta` is small.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polarization::{JonesState, PolarizedSpectrum};
use crate::wavefield::{centroid, dft, idft, momentum_spread, position_spread, translate};
use crate::wavefield::{Grid, SampledField, Spectrum};
use crate::zeros::sine_model_final_state;

/// Largest post-selection angle accepted without an explicit override.
pub const THETA_LIMIT: f64 = PI / 9.0;

/// Largest `|eps|` accepted, as a fraction of the probe's rms width.
pub const EPS_LIMIT_FRACTION: f64 = 0.1;

const CONSTANT_PHASE_TOLERANCE: f64 = 1e-9;

/// Default probe: unit-norm Gaussian with unit rms width of `|psi|^2`, sampled
/// on 4096 points spanning `[-12, 12)`.
pub fn default_probe() -> SampledField {
    gaussian_probe(1.0, 4096, 12.0)
}

/// Unit-norm `exp(-x^2 / (4 sigma^2))` on `n` points spanning `+-half_span * sigma`.
pub fn gaussian_probe(sigma: f64, n: usize, half_span: f64) -> SampledField {
    let grid = Grid::centered(2.0 * half_span * sigma / n as f64, n).expect("valid probe grid");
    SampledField::from_fn(grid, |x| Complex64::new((-x * x / (4.0 * sigma * sigma)).exp(), 0.0))
        .and_then(|f| f.normalized())
        .expect("gaussian probe is finite and nonzero")
}

/// Probe, splitting and post-selection angle.
#[derive(Clone, Debug)]
pub struct CrystalScenario {
    probe: SampledField,
    eps: f64,
    theta: f64,
}

impl CrystalScenario {
    /// Validates the scenario, including the `|theta| <= pi/9` guard.
    pub fn new(probe: SampledField, eps: f64, theta: f64) -> Result<Self> {
        Self::build(probe, eps, theta, false)
    }

    /// As [`CrystalScenario::new`] but accepts any `theta`.
    pub fn with_theta_override(probe: SampledField, eps: f64, theta: f64) -> Result<Self> {
        Self::build(probe, eps, theta, true)
    }

    fn build(probe: SampledField, eps: f64, theta: f64, allow_large_theta: bool) -> Result<Self> {
        if !(eps.is_finite() && theta.is_finite()) {
            return Err(Error::InvalidScenario("eps and theta must be finite".into()));
        }
        if !allow_large_theta && theta.abs() > THETA_LIMIT {
            return Err(Error::InvalidScenario(format!(
                "|theta| = {} exceeds pi/9; use the override to go beyond it",
                theta.abs()
            )));
        }
        let peak = probe
            .values()
            .iter()
            .copied()
            .max_by(|a, b| a.norm_sqr().total_cmp(&b.norm_sqr()))
            .filter(|v| v.norm_sqr() > 0.0)
            .ok_or(Error::ZeroIntensity)?;
        let reference = peak.conj() / peak.norm();
        if let Some(k) = probe
            .values()
            .iter()
            .position(|v| v.norm_sqr() > 0.0 && (v * reference).arg().abs() > CONSTANT_PHASE_TOLERANCE)
        {
            return Err(Error::InvalidScenario(format!(
                "probe phase must be constant; sample {k} deviates"
            )));
        }
        let width = position_spread(&probe)?;
        if eps.abs() > EPS_LIMIT_FRACTION * width {
            return Err(Error::InvalidScenario(format!(
                "|eps| = {} exceeds 0.1 of the probe width {width}",
                eps.abs()
            )));
        }
        Ok(Self { probe, eps, theta })
    }

    pub fn probe(&self) -> &SampledField {
        &self.probe
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
}

/// Crystal evolution of the probe pre-selected in `|S>`.
pub fn crystal_evolve(sc: &CrystalScenario) -> PolarizedSpectrum {
    crystal_evolve_from(sc, &JonesState::diagonal())
}

/// `exp(-i eps sigma_z p)` applied to `psi0 (x) pre`: the `H` component picks up
/// `exp(-i eps p)` and the `V` component `exp(+i eps p)`.
pub fn crystal_evolve_from(sc: &CrystalScenario, pre: &JonesState) -> PolarizedSpectrum {
    let spectrum = dft(&sc.probe);
    let eps = sc.eps;
    let h = spectrum
        .modulated(|p| pre.h * Complex64::from_polar(1.0, -eps * p))
        .expect("finite modulation");
    let v = spectrum
        .modulated(|p| pre.v * Complex64::from_polar(1.0, eps * p))
        .expect("finite modulation");
    PolarizedSpectrum::new(h, v).expect("components share a grid")
}

/// Projection of every momentum bin onto `|D_theta>`.
pub fn post_select(ps: &PolarizedSpectrum, theta: f64) -> Spectrum {
    ps.project(&JonesState::post_selection(theta))
}

/// Modulus and phase of `cos(eps p) sin(theta) - i sin(eps p) cos(theta)` in
/// the factored form `A = |cos(eps p) cos(theta)| sqrt(tan^2 theta + tan^2(eps p))`,
/// `Phi = -atan(tan(eps p) / tan(theta))`.
///
/// The product `A exp(i Phi)` reproduces the bracket exactly when
/// `cos(eps p) cos(theta) tan(theta) > 0`, which covers `0 < theta < pi/2` with
/// `|eps p| < pi/2`. For negative `theta` it differs by an overall sign.
pub fn amplitude_phase_factors(eps: f64, theta: f64, p: f64) -> Result<(f64, f64)> {
    let u = eps * p;
    if u.cos().abs() < 1e-12 || theta.cos().abs() < 1e-12 {
        return Err(Error::Domain(format!(
            "eps p = {u} or theta = {theta} is an odd multiple of pi/2"
        )));
    }
    let (tu, tt) = (u.tan(), theta.tan());
    let amplitude = (u.cos() * theta.cos()).abs() * (tt * tt + tu * tu).sqrt();
    let phase = if tu == 0.0 { 0.0 } else { -(tu / tt).atan() };
    Ok((amplitude, phase))
}

/// The weak-measurement approximation `|sin theta| psi0(x - eps / tan theta)`.
///
/// Requires `|eps| dp < |theta|` with `dp` the probe's momentum spread.
pub fn weak_final_field(sc: &CrystalScenario) -> Result<SampledField> {
    let spread = momentum_spread(&sc.probe)?;
    let ratio = sc.eps.abs() * spread / sc.theta.abs();
    if !(ratio < 1.0) {
        return Err(Error::RegimeViolation { ratio });
    }
    let shifted = translate(&sc.probe, sc.eps / sc.theta.tan());
    let scale = sc.theta.sin().abs();
    SampledField::new(
        *shifted.grid(),
        shifted.values().iter().map(|v| v * scale).collect(),
    )
}

/// Exact and model centroids for one scenario.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisplacementReport {
    pub theta: f64,
    pub eps: f64,
    pub exact_centroid: f64,
    /// `eps / tan(theta)`.
    pub weak_prediction: f64,
    /// `eps / theta`.
    pub amplified_prediction: f64,
    pub zero_model_centroid: f64,
    pub post_selection_probability: f64,
}

impl DisplacementReport {
    pub const CSV_HEADER: &'static str = "theta,eps,exact,weak,amplified,zero_model,probability";

    pub fn csv_row(&self) -> String {
        format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            self.theta,
            self.eps,
            self.exact_centroid,
            self.weak_prediction,
            self.amplified_prediction,
            self.zero_model_centroid,
            self.post_selection_probability
        )
    }
}

/// Runs the exact pipeline and the single-zero model, and measures both
/// centroids in position space.
pub fn measure_displacement(sc: &CrystalScenario) -> Result<DisplacementReport> {
    if sc.theta == 0.0 {
        return Err(Error::Domain(
            "theta = 0 makes the weak-value prediction infinite".into(),
        ));
    }
    let initial = dft(&sc.probe);
    let final_spectrum = post_select(&crystal_evolve(sc), sc.theta);
    let probability = final_spectrum.norm_sqr() / initial.norm_sqr();
    let null = || Error::PostSelectionNull("post-selected intensity vanishes".into());
    if !(probability > 0.0) {
        return Err(null());
    }
    let exact_centroid = centroid(&idft(&final_spectrum)).map_err(|_| null())?;
    let (eps, theta) = (sc.eps, sc.theta);
    let model = initial.modulated(|p| sine_model_final_state(eps, theta, p))?;
    let zero_model_centroid = centroid(&idft(&model)).map_err(|_| null())?;
    Ok(DisplacementReport {
        theta,
        eps,
        exact_centroid,
        weak_prediction: eps / theta.tan(),
        amplified_prediction: eps / theta,
        zero_model_centroid,
        post_selection_probability: probability,
    })
}
