//! Two-level polarization algebra over the `{|H>, |V>}` basis.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::wavefield::Spectrum;

/// Relative overlap below which pre- and post-selection count as orthogonal.
pub const OVERLAP_THRESHOLD: f64 = 1e-12;

/// A Jones vector `h |H> + v |V>`. States are stored unnormalized.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JonesState {
    pub h: Complex64,
    pub v: Complex64,
}

impl JonesState {
    pub const fn new(h: Complex64, v: Complex64) -> Self {
        Self { h, v }
    }

    pub fn horizontal() -> Self {
        Self::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
    }

    pub fn vertical() -> Self {
        Self::new(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))
    }

    /// `|S> = (|H> + |V>) / sqrt 2`.
    pub fn diagonal() -> Self {
        Self::new(
            Complex64::new(FRAC_1_SQRT_2, 0.0),
            Complex64::new(FRAC_1_SQRT_2, 0.0),
        )
    }

    /// `|D> = (|H> - |V>) / sqrt 2`.
    pub fn anti_diagonal() -> Self {
        Self::new(
            Complex64::new(FRAC_1_SQRT_2, 0.0),
            Complex64::new(-FRAC_1_SQRT_2, 0.0),
        )
    }

    /// `|R> = (|H> + i |V>) / sqrt 2`.
    pub fn right_circular() -> Self {
        Self::new(
            Complex64::new(FRAC_1_SQRT_2, 0.0),
            Complex64::new(0.0, FRAC_1_SQRT_2),
        )
    }

    /// `|D_theta> = sin(theta) |S> + cos(theta) |D>`, the post-selection
    /// polarizer setting. `theta = pi/2` gives `|S>` and `theta = 0` gives `|D>`.
    pub fn post_selection(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::new(
            Complex64::new((s + c) * FRAC_1_SQRT_2, 0.0),
            Complex64::new((s - c) * FRAC_1_SQRT_2, 0.0),
        )
    }

    pub fn norm_sqr(&self) -> f64 {
        self.h.norm_sqr() + self.v.norm_sqr()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr().sqrt();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::Domain(format!("cannot normalize state with norm {n}")));
        }
        Ok(Self::new(self.h / n, self.v / n))
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &JonesState) -> Complex64 {
        self.h.conj() * other.h + self.v.conj() * other.v
    }

    pub fn scaled(&self, k: Complex64) -> Self {
        Self::new(self.h * k, self.v * k)
    }
}

impl fmt::Display for JonesState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({},{},{},{})",
            self.h.re, self.h.im, self.v.re, self.v.im
        )
    }
}

/// Pauli operators in the `{|H>, |V>}` basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PauliOp {
    X,
    Y,
    Z,
}

impl PauliOp {
    pub fn apply(&self, s: &JonesState) -> JonesState {
        let i = Complex64::i();
        match self {
            PauliOp::X => JonesState::new(s.v, s.h),
            PauliOp::Y => JonesState::new(-i * s.v, i * s.h),
            PauliOp::Z => JonesState::new(s.h, -s.v),
        }
    }

    /// Row-major 2x2 matrix.
    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        let o = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::i();
        match self {
            PauliOp::X => [[o, one], [one, o]],
            PauliOp::Y => [[o, -i], [i, o]],
            PauliOp::Z => [[one, o], [o, -one]],
        }
    }
}

/// `<post|op|pre> / <post|pre>`. Both states may be unnormalized.
pub fn weak_value(pre: &JonesState, post: &JonesState, op: PauliOp) -> Result<Complex64> {
    let overlap = post.inner(pre);
    let scale = (pre.norm_sqr() * post.norm_sqr()).sqrt();
    if !(overlap.norm() > OVERLAP_THRESHOLD * scale) {
        return Err(Error::UndefinedWeakValue {
            overlap: overlap.norm(),
        });
    }
    Ok(post.inner(&op.apply(pre)) / overlap)
}

/// `<psi|op|psi>` for the unnormalized two-vector `psi`.
pub fn pauli_expectation(state: &JonesState, op: PauliOp) -> f64 {
    match op {
        PauliOp::X => 2.0 * (state.h.conj() * state.v).re,
        PauliOp::Y => 2.0 * (state.h.conj() * state.v).im,
        PauliOp::Z => state.h.norm_sqr() - state.v.norm_sqr(),
    }
}

/// The exact rotation `exp(-i theta sigma_y) = cos(theta) I - i sin(theta) sigma_y`.
pub fn rotate_polarization(state: &JonesState, theta: f64) -> JonesState {
    let (s, c) = theta.sin_cos();
    JonesState::new(c * state.h - s * state.v, s * state.h + c * state.v)
}

/// A field carrying polarization: one spectrum per basis component.
#[derive(Clone, Debug, PartialEq)]
pub struct PolarizedSpectrum {
    h: Spectrum,
    v: Spectrum,
}

impl PolarizedSpectrum {
    pub fn new(h: Spectrum, v: Spectrum) -> Result<Self> {
        if h.grid() != v.grid() {
            return Err(Error::InvalidGrid(
                "H and V components must share a grid".into(),
            ));
        }
        Ok(Self { h, v })
    }

    pub fn h(&self) -> &Spectrum {
        &self.h
    }

    pub fn v(&self) -> &Spectrum {
        &self.v
    }

    /// Polarization state at momentum bin `j`.
    pub fn at(&self, j: usize) -> JonesState {
        JonesState::new(self.h.values()[j], self.v.values()[j])
    }

    /// Bin-wise projection `<post|psi(p)>`.
    pub fn project(&self, post: &JonesState) -> Spectrum {
        let values = self
            .h
            .values()
            .iter()
            .zip(self.v.values())
            .map(|(h, v)| post.h.conj() * h + post.v.conj() * v)
            .collect();
        Spectrum::new(*self.h.grid(), values).expect("projection of finite spectra is finite")
    }

    /// `sum (|H|^2 + |V|^2) dp / (2 pi)`.
    pub fn norm_sqr(&self) -> f64 {
        self.h.norm_sqr() + self.v.norm_sqr()
    }
}
