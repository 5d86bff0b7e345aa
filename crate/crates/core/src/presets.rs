//! Test objects with known ground truth.
//!
//! Gaussian widths are rms widths of the intensity: `exp(-x^2 / (4 sigma^2))`
//! has `|f|^2` of standard deviation `sigma` and momentum spread `1 / (2 sigma)`.
//! Smooth objects are cut to exactly zero where they fall below `1e-15` of
//! their peak, which gives them the compact support the retrieval needs, and
//! the grid is widened by an oversampling factor around that support.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::wavefield::{idft, Grid, SampledField, Spectrum};

/// Objects are truncated below this fraction of their peak modulus.
pub const TRUNCATION_REL: f64 = 1e-15;

/// Half-width at which `exp(-x^2 / (4 sigma^2))` reaches [`TRUNCATION_REL`].
pub fn gaussian_half_width(sigma: f64) -> f64 {
    2.0 * sigma * (-TRUNCATION_REL.ln()).sqrt()
}

fn check_positive(name: &str, value: f64) -> Result<()> {
    if !(value.is_finite() && value > 0.0) {
        return Err(Error::InvalidScenario(format!("{name} must be positive, got {value}")));
    }
    Ok(())
}

/// Centered grid of `n` points whose extent is `oversample` times the support width.
fn padded_grid(support_width: f64, n: usize, oversample: f64) -> Result<Grid> {
    check_positive("oversample", oversample)?;
    Grid::centered(oversample * support_width / n as f64, n)
}

/// `exp(-(x - center)^2 / (4 sigma^2) + i beta (x - center)^2 + i kappa (x - center)^3)`
/// on a grid sized for the unshifted envelope, zero outside the truncation radius.
fn shaped_gaussian(
    sigma: f64,
    beta: f64,
    kappa: f64,
    center: f64,
    n: usize,
    oversample: f64,
) -> Result<SampledField> {
    check_positive("sigma", sigma)?;
    let w = gaussian_half_width(sigma);
    let grid = padded_grid(2.0 * w, n, oversample)?;
    SampledField::from_fn(grid, |x| {
        let u = x - center;
        // the relative slack keeps a sample landing exactly on the edge
        if u.abs() > w * (1.0 + 1e-12) {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(-u * u / (4.0 * sigma * sigma), beta * u * u + kappa * u * u * u).exp()
        }
    })
}

pub fn gaussian(sigma: f64, n: usize, oversample: f64) -> Result<SampledField> {
    shaped_gaussian(sigma, 0.0, 0.0, 0.0, n, oversample)
}

/// Gaussian with quadratic phase `beta x^2`, optionally displaced to `center`.
pub fn chirped_gaussian(sigma: f64, beta: f64, center: f64, n: usize, oversample: f64) -> Result<SampledField> {
    shaped_gaussian(sigma, beta, 0.0, center, n, oversample)
}

/// Gaussian with cubic phase `kappa x^3`.
pub fn cubic_phase_gaussian(sigma: f64, kappa: f64, n: usize, oversample: f64) -> Result<SampledField> {
    shaped_gaussian(sigma, 0.0, kappa, 0.0, n, oversample)
}

/// Unit spikes at `x = 0` and `x = separation`, eight cells apart.
pub fn two_spikes(separation: f64, n: usize) -> Result<SampledField> {
    check_positive("separation", separation)?;
    let grid = Grid::centered(separation / 8.0, n)?;
    let origin = grid.zero_momentum_index();
    if origin + 8 >= n {
        return Err(Error::InvalidScenario("grid too small for two spikes".into()));
    }
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    v[origin] = Complex64::new(1.0, 0.0);
    v[origin + 8] = Complex64::new(1.0, 0.0);
    SampledField::new(grid, v)
}

/// A single unit sample at `x = 0`.
pub fn point_mass(n: usize, dx: f64) -> Result<SampledField> {
    let grid = Grid::centered(dx, n)?;
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    v[grid.zero_momentum_index()] = Complex64::new(1.0, 0.0);
    SampledField::new(grid, v)
}

/// Zeroes everything outside the contiguous span of samples at or above
/// `rel` times the peak modulus.
pub fn truncate(field: &SampledField, rel: f64) -> SampledField {
    let peak = field.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
    let keep = |v: &Complex64| v.norm() >= rel * peak && peak > 0.0;
    let lo = field.values().iter().position(keep);
    let hi = field.values().iter().rposition(keep);
    let values = match (lo, hi) {
        (Some(lo), Some(hi)) => field
            .values()
            .iter()
            .enumerate()
            .map(|(k, v)| if (lo..=hi).contains(&k) { *v } else { Complex64::new(0.0, 0.0) })
            .collect(),
        _ => vec![Complex64::new(0.0, 0.0); field.grid().len()],
    };
    SampledField::new(*field.grid(), values).expect("truncation keeps values finite")
}

/// Threshold used by [`random_smooth`] when cutting the object to its support.
pub const RANDOM_TRUNCATION_REL: f64 = 1e-13;

/// A seeded random object built from a zero-free spectrum
/// `exp(-(p - p0)^2 / (4 sp^2) + i (g1 p + g2 p^2 + g3 p^3 + z sin(p / w + th)))`.
///
/// Drawing the log-spectrum rather than the object keeps spectral zeros far
/// from the real axis, so the analytic continuation used by the retrieval is
/// well conditioned. Parameters are drawn from a ChaCha8 stream.
pub fn random_smooth(seed: u64, n: usize, dx: f64) -> Result<SampledField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sigma_x: f64 = rng.gen_range(0.8..1.2);
    let sigma_p = 1.0 / (2.0 * sigma_x);
    let p0: f64 = rng.gen_range(-0.5..0.5);
    let g1: f64 = rng.gen_range(-1.5..1.5);
    let g2: f64 = rng.gen_range(-0.15..0.15);
    let g3: f64 = rng.gen_range(-0.01..0.01);
    let z: f64 = rng.gen_range(0.0..0.5);
    let w: f64 = rng.gen_range(0.7..1.5);
    let th: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let grid = Grid::centered(dx, n)?;
    let spectrum = Spectrum::from_fn(grid, |p| {
        let envelope = -(p - p0) * (p - p0) / (4.0 * sigma_p * sigma_p);
        let phase = g1 * p + g2 * p * p + g3 * p * p * p + z * (p / w + th).sin();
        Complex64::new(envelope, phase).exp()
    })?;
    Ok(truncate(&idft(&spectrum), RANDOM_TRUNCATION_REL))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavefield::{centroid, dft, position_spread};

    #[test]
    fn gaussian_support_and_width() {
        let f = gaussian(1.0, 1024, 4.0).unwrap();
        let (a, b) = f.support().unwrap();
        let w = gaussian_half_width(1.0);
        assert!((a + w).abs() <= f.grid().dx() && (b - w).abs() <= f.grid().dx());
        assert!((position_spread(&f).unwrap() - 1.0).abs() < 1e-6);
        let (lo, hi) = f.grid().extent();
        assert!((hi - lo) > 3.9 * (b - a));
    }

    #[test]
    fn shifted_chirp_shares_grid() {
        let a = chirped_gaussian(1.0, 0.3, 0.0, 512, 4.0).unwrap();
        let b = chirped_gaussian(1.0, 0.3, -0.7, 512, 4.0).unwrap();
        assert_eq!(a.grid(), b.grid());
        assert!((centroid(&b).unwrap() + 0.7).abs() < 1e-9);
    }

    #[test]
    fn spikes_and_point_mass() {
        let f = two_spikes(1.0, 64).unwrap();
        let xs: Vec<f64> = f
            .grid()
            .positions()
            .zip(f.values())
            .filter(|(_, v)| v.norm() > 0.0)
            .map(|(x, _)| x)
            .collect();
        assert_eq!(xs.len(), 2);
        assert!(xs[0].abs() < 1e-15 && (xs[1] - 1.0).abs() < 1e-12);
        let pm = point_mass(32, 0.1).unwrap();
        assert_eq!(pm.support(), Some((0.0, 0.0)));
    }

    #[test]
    fn random_objects_are_seeded() {
        let a = random_smooth(7, 512, 0.25).unwrap();
        let b = random_smooth(7, 512, 0.25).unwrap();
        let c = random_smooth(8, 512, 0.25).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        let (lo, hi) = a.support().unwrap();
        let (gl, gh) = a.grid().extent();
        assert!((gh - gl) / (hi - lo) > 4.0);
        assert!(dft(&a).norm_sqr() > 0.0);
    }

    #[test]
    fn bad_parameters_rejected() {
        assert!(gaussian(0.0, 64, 4.0).is_err());
        assert!(gaussian(1.0, 64, -1.0).is_err());
        assert!(two_spikes(1.0, 8).is_err());
    }
}
