//! Independent reference computations shared by the integration tests. None
//! of these route through the library's transforms.

#![allow(dead_code)]

use std::f64::consts::PI;

use weakphase_core::{Complex64, Grid, SampledField};

/// `sum_k f_k exp(-i x_k z) dx`, summed from the last sample to the first with
/// compensated accumulation.
pub fn direct_sum(field: &SampledField, z: Complex64) -> Complex64 {
    let g = field.grid();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut comp = Complex64::new(0.0, 0.0);
    for k in (0..g.len()).rev() {
        let x = g.x0() + k as f64 * g.dx();
        let term = field.values()[k] * (-Complex64::i() * z * x).exp() * g.dx() - comp;
        let next = sum + term;
        comp = (next - sum) - term;
        sum = next;
    }
    sum
}

/// The full O(n^2) transform on the momentum grid.
pub fn direct_dft(field: &SampledField) -> Vec<Complex64> {
    let g = field.grid();
    (0..g.len())
        .map(|j| {
            let p = 2.0 * PI * (j as f64 - (g.len() / 2) as f64) / (g.len() as f64 * g.dx());
            direct_sum(field, Complex64::new(p, 0.0))
        })
        .collect()
}

/// `|M(p - i c)|` from the continued spectrum: `sqrt(|F(p - i c)| |F(p + i c)|)`.
pub fn extended_modulus_oracle(field: &SampledField, p: f64, c: f64) -> f64 {
    let below = direct_sum(field, Complex64::new(p, -c)).norm();
    let above = direct_sum(field, Complex64::new(p, c)).norm();
    (below * above).sqrt()
}

/// `-Im phi(p - i c) = ln(|F(p - i c)| / |M(p - i c)|) = ln(|F(p - i c)| / |F(p + i c)|) / 2`.
pub fn minus_im_phase_oracle(field: &SampledField, p: f64, c: f64) -> f64 {
    let below = direct_sum(field, Complex64::new(p, -c)).norm();
    let above = direct_sum(field, Complex64::new(p, c)).norm();
    0.5 * (below / above).ln()
}

/// Composite Simpson rule on `[a, b]` with `n` (even) intervals.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    assert!(n % 2 == 0);
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + k as f64 * h);
    }
    s * h / 3.0
}

/// Deterministic pseudo-random complex samples (splitmix64) for fixtures.
pub fn random_values(seed: u64, n: usize) -> Vec<Complex64> {
    let mut state = seed;
    let mut next = move || {
        state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
        (z >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    };
    (0..n).map(|_| Complex64::new(next(), next())).collect()
}

pub fn random_field(seed: u64, grid: Grid) -> SampledField {
    SampledField::new(grid, random_values(seed, grid.len())).unwrap()
}

pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn max_norm(a: &[Complex64]) -> f64 {
    a.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Post-selected beam of the crystal experiment in position space:
/// `[(s + c) psi0(x - eps) + (s - c) psi0(x + eps)] / 2` with `s = sin theta`,
/// `c = cos theta`, for the Gaussian `psi0 = exp(-x^2 / 4)`.
pub fn crystal_final_amplitude(x: f64, eps: f64, theta: f64) -> f64 {
    let psi0 = |u: f64| (-u * u / 4.0).exp();
    let (s, c) = theta.sin_cos();
    ((s + c) * psi0(x - eps) + (s - c) * psi0(x + eps)) / 2.0
}

/// Centroid of `|crystal_final_amplitude|^2` by Simpson quadrature on `[-20, 20]`.
pub fn crystal_centroid_quadrature(eps: f64, theta: f64) -> f64 {
    let w = |x: f64| crystal_final_amplitude(x, eps, theta).powi(2);
    let n = 40_000;
    simpson(|x| x * w(x), -20.0, 20.0, n) / simpson(w, -20.0, 20.0, n)
}
