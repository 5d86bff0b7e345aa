//! Zeros of entire spectra: truncated Hadamard products, real-axis zero
//! location, and the single-zero model of anomalous displacement.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::wavefield::Spectrum;

/// Pairs of consecutive samples weaker than this fraction of the peak are
/// treated as numerical noise by [`find_real_zeros`].
const NOISE_FLOOR_REL: f64 = 1e-12;

/// A truncated Hadamard representation
/// `F(z) = z^d exp(i (a + b) z / 2) B prod_j (1 - z / z_j)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ZeroSetRecord", into = "ZeroSetRecord")]
pub struct ZeroSet {
    zeros: Vec<Complex64>,
    scale: Complex64,
    origin_order: u32,
    support: (f64, f64),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ZeroSetRecord {
    zeros: Vec<[f64; 2]>,
    #[serde(rename = "B")]
    scale: [f64; 2],
    d: u32,
    a: f64,
    b: f64,
}

impl TryFrom<ZeroSetRecord> for ZeroSet {
    type Error = Error;

    fn try_from(r: ZeroSetRecord) -> Result<Self> {
        ZeroSet::new(
            r.zeros.iter().map(|z| Complex64::new(z[0], z[1])).collect(),
            Complex64::new(r.scale[0], r.scale[1]),
            r.d,
            (r.a, r.b),
        )
    }
}

impl From<ZeroSet> for ZeroSetRecord {
    fn from(z: ZeroSet) -> Self {
        ZeroSetRecord {
            zeros: z.zeros.iter().map(|v| [v.re, v.im]).collect(),
            scale: [z.scale.re, z.scale.im],
            d: z.origin_order,
            a: z.support.0,
            b: z.support.1,
        }
    }
}

impl ZeroSet {
    /// Zeros at the origin belong in `origin_order`, not in `zeros`.
    pub fn new(
        zeros: Vec<Complex64>,
        scale: Complex64,
        origin_order: u32,
        support: (f64, f64),
    ) -> Result<Self> {
        if let Some(i) = zeros.iter().position(|z| *z == Complex64::new(0.0, 0.0)) {
            return Err(Error::Domain(format!(
                "zero {i} lies at the origin; encode it in the origin order"
            )));
        }
        if zeros.iter().any(|z| !(z.re.is_finite() && z.im.is_finite()))
            || !(scale.re.is_finite() && scale.im.is_finite())
        {
            return Err(Error::Domain("zero set entries must be finite".into()));
        }
        if !(support.0 < support.1) {
            return Err(Error::Domain(format!(
                "support must satisfy a < b, got ({}, {})",
                support.0, support.1
            )));
        }
        Ok(Self {
            zeros,
            scale,
            origin_order,
            support,
        })
    }

    pub fn zeros(&self) -> &[Complex64] {
        &self.zeros
    }

    pub fn scale(&self) -> Complex64 {
        self.scale
    }

    pub fn origin_order(&self) -> u32 {
        self.origin_order
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }
}

/// Evaluates the truncated product at `z`.
///
/// The exponential prefactor uses the support midpoint `(a + b) / 2`, which is
/// the form that makes a product over real zeros reproduce a band-limited
/// spectrum centered on its support.
pub fn hadamard_eval(zs: &ZeroSet, z: Complex64) -> Complex64 {
    let (a, b) = zs.support;
    let prefactor = (Complex64::i() * (a + b) * z / 2.0).exp() * zs.scale;
    let product: Complex64 = zs.zeros.iter().map(|zj| 1.0 - z / zj).product();
    z.powu(zs.origin_order) * prefactor * product
}

/// Locates sign changes of the spectrum along the real momentum axis.
///
/// A pair of neighbouring bins brackets a zero when, after rotating the pair
/// by the phase of its first member, the real parts have opposite signs and
/// the weaker member lies below `floor` times the peak modulus. The crossing is
/// refined by linear interpolation in that rotated frame. Bins that are exactly
/// zero between two opposite-signed neighbours are reported as they are.
pub fn find_real_zeros(spectrum: &Spectrum, floor: f64) -> Vec<f64> {
    let values = spectrum.values();
    let grid = spectrum.grid();
    let peak = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if peak == 0.0 || !(floor > 0.0) {
        return Vec::new();
    }
    let threshold = floor * peak;
    let noise = NOISE_FLOOR_REL * peak;
    let mut found = Vec::new();
    for j in 0..values.len().saturating_sub(1) {
        let (u, w) = (values[j], values[j + 1]);
        let (mu, mw) = (u.norm(), w.norm());
        if mu.max(mw) <= noise || mu.min(mw) > threshold {
            continue;
        }
        if mu == 0.0 {
            if j > 0 && (values[j + 1] * values[j - 1].conj()).re < 0.0 {
                found.push(grid.p(j));
            }
            continue;
        }
        let r1 = (w * u.conj()).re / mu;
        if r1 < 0.0 {
            let t = mu / (mu - r1);
            found.push(grid.p(j) + t * grid.dp());
        }
    }
    found
}

/// The factor contributed by the zero at `z0 = -i theta / eps` of the sine
/// model, `1 - p / z0 = 1 - i eps p / theta`, and its small-argument linear
/// phase `-eps p / theta`.
pub fn zero_shift_factor(theta: f64, eps: f64, p: f64) -> Result<(Complex64, f64)> {
    if theta == 0.0 {
        return Err(Error::Domain(
            "theta = 0 places the zero on the real axis".into(),
        ));
    }
    let u = eps * p / theta;
    Ok((Complex64::new(1.0, -u), -u))
}

/// `-i sin(eps p + i theta)`: the post-selected spectral factor with the
/// polarization rotation folded into an imaginary shift of the argument.
pub fn sine_model_final_state(eps: f64, theta: f64, p: f64) -> Complex64 {
    -Complex64::i() * Complex64::new(eps * p, theta).sin()
}

/// Number of zeros minus poles of `f` inside the axis-aligned rectangle
/// `[re_min, re_max] x [im_min, im_max]`, by tracking the argument around its
/// boundary with `samples_per_side` steps per side.
pub fn argument_principle_count(
    f: impl Fn(Complex64) -> Complex64,
    re: (f64, f64),
    im: (f64, f64),
    samples_per_side: usize,
) -> i64 {
    let corners = [
        Complex64::new(re.0, im.0),
        Complex64::new(re.1, im.0),
        Complex64::new(re.1, im.1),
        Complex64::new(re.0, im.1),
    ];
    let mut total = 0.0;
    let mut prev = f(corners[0]);
    for side in 0..4 {
        let (start, end) = (corners[side], corners[(side + 1) % 4]);
        for k in 1..=samples_per_side {
            let z = start + (end - start) * (k as f64 / samples_per_side as f64);
            let cur = f(z);
            total += (cur / prev).arg();
            prev = cur;
        }
    }
    (total / std::f64::consts::TAU).round() as i64
}
