//! The exponential filter read as a weak measurement of
//! `A = -i (X - s)`: for small `c`, `exp(-c (X - s)) = exp(-i c A)` and the
//! filtered-to-bare modulus ratio at momentum `p` approaches
//! `exp(c Im <A>_w)`, with `<A>_w = <p|A|f> / <p|f>`.
//!
//! Everything here uses direct sums, so `p` need not lie on the grid.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expfilter::FilterSpec;
use crate::wavefield::{analytic_extension, SampledField};

/// `|<p|f>|` below this fraction of `sum |f| dx` counts as a null.
pub const MODULUS_FLOOR_REL: f64 = 1e-12;

fn modulus_bound(field: &SampledField) -> f64 {
    field.values().iter().map(|v| v.norm()).sum::<f64>() * field.grid().dx()
}

fn checked_amplitude(field: &SampledField, p: f64) -> Result<Complex64> {
    let amplitude = analytic_extension(field, p, 0.0)?;
    let bound = modulus_bound(field);
    if !(amplitude.norm() > MODULUS_FLOOR_REL * bound) {
        return Err(Error::PostSelectionNull(format!(
            "|<p|f>| = {:.3e} at p = {p} is below the floor",
            amplitude.norm()
        )));
    }
    Ok(amplitude)
}

/// `<p|A|f> / <p|f>` with `A = -i (X - s)`, by direct summation.
pub fn position_weak_value(field: &SampledField, p: f64, s: f64) -> Result<Complex64> {
    let denominator = checked_amplitude(field, p)?;
    let dx = field.grid().dx();
    let numerator: Complex64 = field
        .values()
        .iter()
        .zip(field.grid().positions())
        .map(|(v, x)| -Complex64::i() * (x - s) * v * Complex64::from_polar(dx, -x * p))
        .sum();
    Ok(numerator / denominator)
}

/// The same weak value assembled as `M'/M + i (s + phi')` from central
/// differences of the spectrum with step `step`.
pub fn weak_value_decomposition(field: &SampledField, p: f64, s: f64, step: f64) -> Result<Complex64> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::Domain(format!("step must be positive, got {step}")));
    }
    let up = checked_amplitude(field, p + step)?;
    let down = checked_amplitude(field, p - step)?;
    let log_modulus_slope = (up.norm().ln() - down.norm().ln()) / (2.0 * step);
    let phase_slope = (up / down).arg() / (2.0 * step);
    Ok(Complex64::new(log_modulus_slope, s + phase_slope))
}

/// `|<p|exp(-c (X - s))|f>| / |<p|f>|`.
pub fn filter_ratio(field: &SampledField, fs: &FilterSpec, p: f64) -> Result<f64> {
    fs.check_support(field)?;
    let bare = checked_amplitude(field, p)?;
    let dx = field.grid().dx();
    let filtered: Complex64 = field
        .values()
        .iter()
        .zip(field.grid().positions())
        .filter(|(v, _)| v.norm_sqr() > 0.0)
        .map(|(v, x)| v * Complex64::from_polar(dx * (-fs.c * (x - fs.s)).exp(), -x * p))
        .sum();
    let ratio = filtered.norm() / bare.norm();
    if !(ratio > 0.0) {
        return Err(Error::PostSelectionNull(format!(
            "filtered amplitude vanishes at p = {p}"
        )));
    }
    Ok(ratio)
}

/// Both sides of the small-`c` relation at one `(p, c)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BridgeReport {
    pub p: f64,
    pub c: f64,
    /// Measured modulus ratio.
    pub lhs: f64,
    /// `exp(c Im <A>_w)`.
    pub rhs: f64,
    /// `|ln lhs - ln rhs|`.
    pub residual: f64,
    pub weak_value: Complex64,
}

impl BridgeReport {
    pub const CSV_HEADER: &'static str = "p,c,lhs,rhs,residual,wv_re,wv_im";

    pub fn csv_row(&self) -> String {
        format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            self.p, self.c, self.lhs, self.rhs, self.residual, self.weak_value.re, self.weak_value.im
        )
    }
}

/// One report per filter slope in `c_list`.
pub fn bridge_residual(field: &SampledField, s: f64, c_list: &[f64], p: f64) -> Result<Vec<BridgeReport>> {
    let weak_value = position_weak_value(field, p, s)?;
    c_list
        .iter()
        .map(|&c| {
            let fs = FilterSpec::new(c, s)?;
            let lhs = filter_ratio(field, &fs, p)?;
            let log_rhs = c * weak_value.im;
            Ok(BridgeReport {
                p,
                c,
                lhs,
                rhs: log_rhs.exp(),
                residual: (lhs.ln() - log_rhs).abs(),
                weak_value,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavefield::Grid;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn gaussian(center: f64) -> SampledField {
        let g = Grid::centered(0.05, 1024).unwrap();
        SampledField::from_fn(g, |x| {
            let u = x - center;
            if u.abs() > 11.75 {
                c(0.0, 0.0)
            } else {
                c((-u * u / 4.0).exp(), 0.0)
            }
        })
        .unwrap()
    }

    #[test]
    fn centered_gaussian_weak_value() {
        let f = gaussian(1.2);
        let w = position_weak_value(&f, 0.0, -15.0).unwrap();
        assert!(w.re.abs() < 1e-10);
        assert!((w.im - (-15.0 - 1.2)).abs() < 1e-10);
        let w = position_weak_value(&f, 0.0, 1.2).unwrap();
        assert!(w.norm() < 1e-10);
    }

    #[test]
    fn decomposition_agrees() {
        let g = Grid::centered(0.05, 1024).unwrap();
        let f = SampledField::from_fn(g, |x| {
            if x.abs() > 11.0 {
                c(0.0, 0.0)
            } else {
                c(-(x - 0.4) * (x - 0.4) / 3.0, 0.2 * x * x).exp()
            }
        })
        .unwrap();
        for p in [-0.7, 0.0, 0.35] {
            let direct = position_weak_value(&f, p, -12.0).unwrap();
            let fd = weak_value_decomposition(&f, p, -12.0, 1e-4).unwrap();
            assert!((direct - fd).norm() <= 1e-6, "{direct} {fd}");
        }
    }

    #[test]
    fn ratio_limits() {
        let f = gaussian(0.0);
        let weak = FilterSpec::new(1e-12, -12.0).unwrap();
        assert!((filter_ratio(&f, &weak, 0.3).unwrap() - 1.0).abs() <= 1e-10);

        let g = Grid::centered(0.1, 64).unwrap();
        let mut v = vec![c(0.0, 0.0); 64];
        v[40] = c(0.5, 0.5);
        let pm = SampledField::new(g, v).unwrap();
        let fs = FilterSpec::new(0.3, -4.0).unwrap();
        let expect = (-0.3 * (g.x(40) + 4.0)).exp();
        assert!((filter_ratio(&pm, &fs, 1.7).unwrap() - expect).abs() <= 1e-14 * expect);
        let w = position_weak_value(&pm, 1.7, -4.0).unwrap();
        assert!((w.im - (-4.0 - g.x(40))).abs() < 1e-12);
    }

    #[test]
    fn point_mass_bridge_is_exact() {
        let g = Grid::centered(0.1, 64).unwrap();
        let mut v = vec![c(0.0, 0.0); 64];
        v[32] = c(1.0, 0.0);
        let pm = SampledField::new(g, v).unwrap();
        let reports = bridge_residual(&pm, -1.0, &[1e-3, 1e-2, 1e-1], 0.4).unwrap();
        for r in reports {
            assert!(r.residual <= 1e-12);
        }
    }

    #[test]
    fn offset_inside_support_rejected() {
        let f = gaussian(0.0);
        assert!(bridge_residual(&f, 0.0, &[0.01], 0.0).is_err());
    }

    #[test]
    fn report_row() {
        let r = BridgeReport {
            p: 0.0,
            c: 0.1,
            lhs: 1.0,
            rhs: 1.0,
            residual: 0.0,
            weak_value: c(0.0, 1.0),
        };
        assert_eq!(r.csv_row().split(',').count(), 7);
    }
}
