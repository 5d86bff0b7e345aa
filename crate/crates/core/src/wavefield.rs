//! Uniform sampling grids, the continuous Fourier convention used throughout
//! the crate, and a few beam diagnostics.
//!
//! The forward transform is the Riemann sum
//!
//! ```text
//! F(p_j) = sum_k f(x_k) exp(-i x_k p_j) dx
//! ```
//!
//! on the momentum grid `p_j = 2 pi (j - n/2) / (n dx)`, so `p = 0` sits at
//! index `n / 2`. The inverse is normalized so that `idft(dft(f)) == f`, which
//! makes Parseval read `sum |f|^2 dx = sum |F|^2 dp / (2 pi)`.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const MIN_SAMPLES: usize = 8;

/// Largest allowed `|q| * max|x|` in [`analytic_extension`]; `exp(700)` is
/// close to the `f64` ceiling.
pub const EXTENSION_EXPONENT_LIMIT: f64 = 700.0;

/// A uniform position grid `x_k = x0 + k dx`, `k in [0, n)`, together with its
/// conjugate momentum grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    x0: f64,
    dx: f64,
    n: usize,
}

impl Grid {
    pub fn new(x0: f64, dx: f64, n: usize) -> Result<Self> {
        if !x0.is_finite() {
            return Err(Error::InvalidGrid(format!("x0 must be finite, got {x0}")));
        }
        if !(dx.is_finite() && dx > 0.0) {
            return Err(Error::InvalidGrid(format!("dx must be positive, got {dx}")));
        }
        if n < MIN_SAMPLES || n % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "sample count must be even and >= {MIN_SAMPLES}, got {n}"
            )));
        }
        Ok(Self { x0, dx, n })
    }

    /// Grid with `x = 0` at index `n / 2`.
    pub fn centered(dx: f64, n: usize) -> Result<Self> {
        Self::new(-(n as f64) * dx / 2.0, dx, n)
    }

    /// Same spacing and length, re-anchored so that `x = 0` is at index `n / 2`.
    /// The momentum grid is unchanged.
    pub fn recentered(&self) -> Self {
        Self {
            x0: -(self.n as f64) * self.dx / 2.0,
            ..*self
        }
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn x(&self, k: usize) -> f64 {
        self.x0 + k as f64 * self.dx
    }

    pub fn positions(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n).map(move |k| self.x(k))
    }

    /// `(x_first, x_last)`.
    pub fn extent(&self) -> (f64, f64) {
        (self.x0, self.x(self.n - 1))
    }

    pub fn dp(&self) -> f64 {
        2.0 * PI / (self.n as f64 * self.dx)
    }

    pub fn p(&self, j: usize) -> f64 {
        (j as f64 - (self.n / 2) as f64) * self.dp()
    }

    pub fn momenta(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n).map(move |j| self.p(j))
    }

    /// Index of the `p = 0` bin.
    pub fn zero_momentum_index(&self) -> usize {
        self.n / 2
    }

    /// Index of the sample nearest to `x`, if it lies on the grid.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        let k = ((x - self.x0) / self.dx).round();
        (k >= 0.0 && (k as usize) < self.n).then_some(k as usize)
    }
}

fn check_values(grid: &Grid, values: &[Complex64]) -> Result<()> {
    if values.len() != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            actual: values.len(),
        });
    }
    match values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
        Some(index) => Err(Error::NonFinite { index }),
        None => Ok(()),
    }
}

/// Complex amplitude samples on a position grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledField {
    grid: Grid,
    values: Vec<Complex64>,
}

impl SampledField {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        check_values(&grid, &values)?;
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let values = grid.positions().map(f).collect();
        Self::new(grid, values)
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// `sum |f|^2 dx`.
    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dx
    }

    /// Copy scaled to unit `sum |f|^2 dx`.
    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm_sqr().sqrt();
        if norm == 0.0 {
            return Err(Error::ZeroIntensity);
        }
        Ok(Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v / norm).collect(),
        })
    }

    /// Coordinates of the first and last nonzero samples.
    pub fn support(&self) -> Option<(f64, f64)> {
        let first = self.values.iter().position(|v| v.norm_sqr() > 0.0)?;
        let last = self.values.iter().rposition(|v| v.norm_sqr() > 0.0)?;
        Some((self.grid.x(first), self.grid.x(last)))
    }

    /// `sum_k conj(self_k) other_k dx`.
    pub fn inner(&self, other: &SampledField) -> Result<Complex64> {
        if other.values.len() != self.values.len() {
            return Err(Error::LengthMismatch {
                expected: self.values.len(),
                actual: other.values.len(),
            });
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            * self.grid.dx)
    }
}

/// Complex amplitude samples on the momentum grid of `grid`.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    grid: Grid,
    values: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        check_values(&grid, &values)?;
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let values = grid.momenta().map(f).collect();
        Self::new(grid, values)
    }

    /// The originating position grid.
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn momenta(&self) -> Vec<f64> {
        self.grid.momenta().collect()
    }

    /// `M(p) = |F(p)|`.
    pub fn modulus(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    /// Principal-branch argument of `F(p)`.
    pub fn phase(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.arg()).collect()
    }

    pub fn intensity(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    /// `sum |F|^2 dp / (2 pi)`, equal to the position-space norm.
    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dp() / (2.0 * PI)
    }

    /// Bin-wise product with a function of momentum.
    pub fn modulated(&self, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let values = self
            .values
            .iter()
            .zip(self.grid.momenta())
            .map(|(v, p)| v * f(p))
            .collect();
        Self::new(self.grid, values)
    }

    pub fn value_at_zero(&self) -> Complex64 {
        self.values[self.grid.zero_momentum_index()]
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn forward_plan(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n))
}

fn inverse_plan(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n))
}

fn alternating(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Forward transform `F(p_j) = sum_k f(x_k) exp(-i x_k p_j) dx`.
///
/// With `x_k p_j = x0 p_j + 2 pi k (j - n/2) / n`, the sum is an FFT of
/// `(-1)^k f_k` followed by the phase `exp(-i x0 p_j)` and the measure `dx`.
pub fn dft(field: &SampledField) -> Spectrum {
    let grid = field.grid;
    let mut buf: Vec<Complex64> = field
        .values
        .iter()
        .enumerate()
        .map(|(k, v)| v * alternating(k))
        .collect();
    forward_plan(grid.n).process(&mut buf);
    for (j, v) in buf.iter_mut().enumerate() {
        *v *= Complex64::from_polar(grid.dx, -grid.x0 * grid.p(j));
    }
    Spectrum { grid, values: buf }
}

/// Inverse of [`dft`]; `idft(dft(f)) == f` up to rounding.
pub fn idft(spectrum: &Spectrum) -> SampledField {
    let grid = spectrum.grid;
    let scale = 1.0 / (grid.n as f64 * grid.dx);
    let mut buf: Vec<Complex64> = spectrum
        .values
        .iter()
        .enumerate()
        .map(|(j, v)| v * Complex64::from_polar(scale, grid.x0 * grid.p(j)))
        .collect();
    inverse_plan(grid.n).process(&mut buf);
    for (k, v) in buf.iter_mut().enumerate() {
        *v *= alternating(k);
    }
    SampledField { grid, values: buf }
}

/// The transform evaluated off the real axis at `z = p + i q`, by direct
/// summation: `sum_k f(x_k) exp(-i x_k z) dx`.
pub fn analytic_extension(field: &SampledField, p: f64, q: f64) -> Result<Complex64> {
    let (lo, hi) = field.grid.extent();
    let product = q.abs() * lo.abs().max(hi.abs());
    if product > EXTENSION_EXPONENT_LIMIT {
        return Err(Error::ExtensionOverflow { q, product });
    }
    let dx = field.grid.dx;
    Ok(field
        .values
        .iter()
        .zip(field.grid.positions())
        .filter(|(v, _)| v.norm_sqr() > 0.0)
        .map(|(v, x)| v * Complex64::from_polar(dx * (q * x).exp(), -x * p))
        .sum())
}

/// Intensity-weighted mean position.
pub fn centroid(field: &SampledField) -> Result<f64> {
    let (mut total, mut first) = (0.0, 0.0);
    for (v, x) in field.values.iter().zip(field.grid.positions()) {
        let w = v.norm_sqr();
        total += w;
        first += w * x;
    }
    if total == 0.0 {
        return Err(Error::ZeroIntensity);
    }
    Ok(first / total)
}

/// Standard deviation of `p` under `|F(p)|^2`.
pub fn momentum_spread(field: &SampledField) -> Result<f64> {
    let spectrum = dft(field);
    let (mut total, mut first, mut second) = (0.0, 0.0, 0.0);
    for (v, p) in spectrum.values.iter().zip(spectrum.grid.momenta()) {
        let w = v.norm_sqr();
        total += w;
        first += w * p;
        second += w * p * p;
    }
    if total == 0.0 {
        return Err(Error::ZeroIntensity);
    }
    let mean = first / total;
    Ok((second / total - mean * mean).max(0.0).sqrt())
}

/// Intensity-weighted standard deviation of `x`.
pub fn position_spread(field: &SampledField) -> Result<f64> {
    let mean = centroid(field)?;
    let (mut total, mut second) = (0.0, 0.0);
    for (v, x) in field.values.iter().zip(field.grid.positions()) {
        let w = v.norm_sqr();
        total += w;
        second += w * (x - mean) * (x - mean);
    }
    Ok((second / total).sqrt())
}

/// Band-limited translation `f(x) -> f(x - d)`, applied as the spectral phase
/// `exp(-i p d)`.
pub fn translate(field: &SampledField, d: f64) -> SampledField {
    let spectrum = dft(field);
    let shifted = Spectrum {
        grid: spectrum.grid,
        values: spectrum
            .values
            .iter()
            .zip(spectrum.grid.momenta())
            .map(|(v, p)| v * Complex64::from_polar(1.0, -p * d))
            .collect(),
    };
    idft(&shifted)
}
