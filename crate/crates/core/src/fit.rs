//! Small least-squares helpers for convergence studies and gauge removal.

/// Ordinary least-squares line `y = intercept + slope * x`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    assert_eq!(xs.len(), ys.len(), "fit inputs must have equal length");
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    (my - slope * mx, slope)
}

/// Slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    linear_fit(&lx, &ly).1
}

/// Residual of `ys` after removing its best constant-plus-linear fit in `xs`,
/// using only entries where `mask` is set. Masked-out entries are returned as 0.
pub fn remove_affine(xs: &[f64], ys: &[f64], mask: &[bool]) -> Vec<f64> {
    let (sx, sy): (Vec<f64>, Vec<f64>) = xs
        .iter()
        .zip(ys)
        .zip(mask)
        .filter(|(_, &m)| m)
        .map(|((x, y), _)| (*x, *y))
        .unzip();
    let (a, b) = linear_fit(&sx, &sy);
    xs.iter()
        .zip(ys)
        .zip(mask)
        .map(|((x, y), &m)| if m { y - a - b * x } else { 0.0 })
        .collect()
}

/// Root mean square over entries where `mask` is set.
pub fn masked_rms(values: &[f64], mask: &[bool]) -> f64 {
    let (sum, count) = values
        .iter()
        .zip(mask)
        .filter(|(_, &m)| m)
        .fold((0.0, 0usize), |(s, c), (v, _)| (s + v * v, c + 1));
    (sum / count as f64).sqrt()
}

/// Unwraps a phase sequence so consecutive entries differ by less than `pi`.
pub fn unwrap(phase: &[f64]) -> Vec<f64> {
    let tau = std::f64::consts::TAU;
    let mut out = Vec::with_capacity(phase.len());
    let mut offset = 0.0;
    for (i, &p) in phase.iter().enumerate() {
        if i > 0 {
            let prev = phase[i - 1];
            offset -= ((p - prev) / tau).round() * tau;
        }
        out.push(p + offset);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| 1.5 - 0.5 * x).collect();
        let (a, b) = linear_fit(&xs, &ys);
        assert!((a - 1.5).abs() < 1e-14 && (b + 0.5).abs() < 1e-14);
    }

    #[test]
    fn power_law_slope() {
        let xs = [1e-3, 1e-2, 1e-1];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x * x).collect();
        assert!((loglog_slope(&xs, &ys) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn affine_removal() {
        let xs = [0.0, 1.0, 2.0, 3.0, 4.0];
        let ys = [2.0, 3.0, 100.0, 5.0, 6.0];
        let mask = [true, true, false, true, true];
        let r = remove_affine(&xs, &ys, &mask);
        assert!(r.iter().all(|v| v.abs() < 1e-12));
        assert_eq!(masked_rms(&[3.0, 4.0, 9.0], &[true, true, false]), (12.5f64).sqrt());
    }

    #[test]
    fn unwrap_removes_jumps() {
        let raw = [3.0, -3.0, -2.9];
        let u = unwrap(&raw);
        assert!((u[1] - (2.0 * std::f64::consts::PI - 3.0)).abs() < 1e-12);
        assert!((u[2] - u[1] - 0.1).abs() < 1e-12);
    }
}
