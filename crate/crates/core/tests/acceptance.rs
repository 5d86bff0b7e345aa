//! Acceptance suite. Runs every criterion at its stated tolerance, prints one
//! PASS/FAIL line per criterion and exits non-zero if any criterion fails.
//!
//! This target uses its own `main` so the report lines are always visible in
//! `cargo test` output.

mod common;

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use weakphase_core::birefringence_sim::{
    amplitude_phase_factors, default_probe, measure_displacement, CrystalScenario,
};
use weakphase_core::direct_measure_sim::{
    operational_scan, scan_error, scan_reconstruct, scan_weak_values,
};
use weakphase_core::expfilter::{
    apply_exp_filter, extended_modulus, retrieve, simulate_intensities, DEFAULT_FLOOR_REL,
};
use weakphase_core::fit::{loglog_slope, masked_rms, remove_affine, unwrap};
use weakphase_core::polarization::{weak_value, JonesState, PauliOp};
use weakphase_core::wavefield::{dft, idft};
use weakphase_core::weakvalue_bridge::bridge_residual;
use weakphase_core::{presets, Complex64, FilterSpec, Grid, SampledField};

use common::*;

type Criterion = (&'static str, &'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn within(value: f64, lo: f64, hi: f64) -> bool {
    (lo..=hi).contains(&value)
}

// 1. Filtered-modulus identity on random objects.
fn exact_identity() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut min_oversample = f64::INFINITY;
    let mut min_bins = usize::MAX;
    for seed in 0..20 {
        let f = presets::random_smooth(seed, 512, 0.25).unwrap();
        let g = *f.grid();
        let (a, b) = f.support().unwrap();
        let (lo, hi) = g.extent();
        min_oversample = min_oversample.min((hi - lo + g.dx()) / (b - a));
        let fs = FilterSpec::for_support(a, b).unwrap();
        let m = dft(&f).modulus();
        let ftilde = dft(&apply_exp_filter(&f, &fs).unwrap()).modulus();
        let mext = extended_modulus(&m, fs.c, &g).unwrap();
        let peak = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
        let (pm, pf, pe) = (peak(&m), peak(&ftilde), peak(&mext));
        let mut bins = 0;
        for j in 0..g.len() {
            if m[j] < 1e-6 * pm || ftilde[j] < 1e-6 * pf || mext[j] < 1e-6 * pe {
                continue;
            }
            bins += 1;
            let lhs = (ftilde[j] / mext[j]).ln();
            let rhs = fs.c * fs.s + minus_im_phase_oracle(&f, g.p(j), fs.c);
            worst = worst.max((lhs - rhs).abs());
        }
        min_bins = min_bins.min(bins);
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= 1e-8 && min_oversample >= 4.0 && elapsed < Duration::from_secs(5),
        format!(
            "20 random objects, worst |lhs - rhs| = {worst:.2e} (tol 1e-8), min oversampling {min_oversample:.2}, \
             min compared bins {min_bins}, {:.2} s (budget 5 s)",
            elapsed.as_secs_f64()
        ),
    )
}

// 2. End-to-end retrieval and tilt recovery.
fn end_to_end_retrieval() -> Outcome {
    let start = Instant::now();
    let alpha = 0.7;
    let f0 = presets::chirped_gaussian(1.0, 0.3, 0.0, 1024, 4.0).unwrap();
    // f(x + alpha) has spectrum exp(i alpha p) F(p)
    let f1 = presets::chirped_gaussian(1.0, 0.3, -alpha, 1024, 4.0).unwrap();
    let g = *f0.grid();
    let (a0, b0) = f0.support().unwrap();
    let (a1, b1) = f1.support().unwrap();
    let fs = FilterSpec::for_support(a0.min(a1), b0.max(b1)).unwrap();

    let (bare0, filt0) = simulate_intensities(&f0, &fs).unwrap();
    let (pr0, _) = retrieve(&bare0, &filt0, &fs, &g, DEFAULT_FLOOR_REL).unwrap();
    let (bare1, filt1) = simulate_intensities(&f1, &fs).unwrap();
    let (pr1, _) = retrieve(&bare1, &filt1, &fs, &g, DEFAULT_FLOOR_REL).unwrap();
    let elapsed = start.elapsed();

    let truth = dft(&f0).phase();
    let valid: Vec<usize> = (0..g.len()).filter(|&j| pr0.valid[j]).collect();
    let truth_valid = unwrap(&valid.iter().map(|&j| truth[j]).collect::<Vec<_>>());
    let total = pr0.total_phase(&g);
    let ps: Vec<f64> = valid.iter().map(|&j| g.p(j)).collect();
    let diff: Vec<f64> = valid
        .iter()
        .zip(&truth_valid)
        .map(|(&j, t)| total[j] - t)
        .collect();
    let mask = vec![true; diff.len()];
    let rms = masked_rms(&remove_affine(&ps, &diff, &mask), &mask);
    let tilt_shift = pr1.tilt - pr0.tilt;
    outcome(
        rms <= 1e-3 && (tilt_shift - alpha).abs() <= 1e-4 && elapsed < Duration::from_secs(1),
        format!(
            "chirped Gaussian n=1024: phase RMS {rms:.2e} rad on {} valid bins (tol 1e-3), \
             injected tilt 0.7 recovered as {tilt_shift:.7} (tol 1e-4), {:.3} s (budget 1 s)",
            valid.len(),
            elapsed.as_secs_f64()
        ),
    )
}

// 3. Anomalous displacement and parity.
fn anomalous_displacement() -> Outcome {
    let (eps, theta) = (1e-3, 0.1f64);
    let probe = default_probe();
    let centroid_for = |e: f64, t: f64| {
        measure_displacement(&CrystalScenario::new(probe.clone(), e, t).unwrap())
            .unwrap()
            .exact_centroid
    };
    let report = measure_displacement(&CrystalScenario::new(probe.clone(), eps, theta).unwrap()).unwrap();
    let oracle = crystal_centroid_quadrature(eps, theta);
    let weak = eps / theta.tan();
    let rel = (report.exact_centroid - weak).abs() / weak;
    let oracle_rel = (oracle - weak).abs() / weak;
    let amplification = report.exact_centroid / eps;
    let amp_rel = (amplification * theta.tan() - 1.0).abs();
    let flip_eps = (centroid_for(-eps, theta) + report.exact_centroid).abs();
    let flip_theta = (centroid_for(eps, -theta) + report.exact_centroid).abs();
    outcome(
        rel <= 0.01 && oracle_rel <= 0.01 && amp_rel <= 0.01 && flip_eps <= 1e-10 && flip_theta <= 1e-10,
        format!(
            "centroid {:.6e} vs eps/tan(theta) {weak:.6e} (rel {rel:.2e}), quadrature {oracle:.6e}, \
             amplification {amplification:.4} (rel {amp_rel:.2e}); parity residuals eps {flip_eps:.1e}, theta {flip_theta:.1e}",
            report.exact_centroid
        ),
    )
}

// 4. Weak value of sigma_z.
fn weak_value_constant() -> Outcome {
    let mut worst: f64 = 0.0;
    for theta in [PI / 10.0, PI / 20.0, 0.1] {
        let w = weak_value(&JonesState::diagonal(), &JonesState::post_selection(theta), PauliOp::Z).unwrap();
        worst = worst.max((w - Complex64::new(1.0 / theta.tan(), 0.0)).norm());
    }
    let d = JonesState::post_selection(PI / 10.0);
    let sin = d.inner(&JonesState::diagonal()).re;
    let cos = d.inner(&JonesState::anti_diagonal()).re;
    let round5 = |v: f64| (v * 1e5).round() / 1e5;
    let quoted = round5(sin) == 0.30902 && round5(cos) == 0.95106;
    outcome(
        worst <= 1e-12 && quoted,
        format!(
            "max |w - 1/tan(theta)| = {worst:.1e} (tol 1e-12); components at pi/10: sin {sin:.5}, cos {cos:.5} (quoted 0.30902, 0.95106)"
        ),
    )
}

// 5. Zero-shift model.
fn zero_shift_model() -> Outcome {
    let (eps, theta) = (1e-3, 0.1f64);
    let h = 1e-3;
    let (_, up) = amplitude_phase_factors(eps, theta, h).unwrap();
    let (_, down) = amplitude_phase_factors(eps, theta, -h).unwrap();
    let slope = (up - down) / (2.0 * h);
    let analytic = -eps / theta.tan();
    let slope_rel = ((slope - analytic) / analytic).abs();
    let probe = default_probe();
    let spread = weakphase_core::wavefield::momentum_spread(&probe).unwrap();
    let report = measure_displacement(&CrystalScenario::new(probe, eps, theta).unwrap()).unwrap();
    let model_rel = (report.zero_model_centroid - report.exact_centroid).abs() / report.exact_centroid.abs();
    outcome(
        slope_rel <= 1e-8 && model_rel <= 0.05,
        format!(
            "phase slope {slope:.10e} vs {analytic:.10e} (rel {slope_rel:.1e}, tol 1e-8); sine-model centroid {:.6e} vs exact {:.6e} \
             (rel {model_rel:.2e}, tol 5e-2) at eps*dp = {:.1e}",
            report.zero_model_centroid,
            report.exact_centroid,
            eps * spread
        ),
    )
}

fn cubic_object() -> SampledField {
    presets::cubic_phase_gaussian(1.0, 0.1, 512, 1.0).unwrap()
}

// 6a. Scan reconstruction accuracy.
fn scan_accuracy() -> Outcome {
    let start = Instant::now();
    let f = cubic_object();
    let rec = scan_reconstruct(&f, 0.1).unwrap();
    let err = scan_error(&f, &rec, 0.1).unwrap();
    let elapsed = start.elapsed();
    outcome(
        err.overlap_err <= 2e-3 && elapsed < Duration::from_secs(10),
        format!(
            "cubic-phase Gaussian, 512-cell scan at theta=0.1: 1 - |<rec|true>| = {:.2e} (tol 2e-3), {:.3} s (budget 10 s)",
            err.overlap_err,
            elapsed.as_secs_f64()
        ),
    )
}

// 6b. First-order convergence of the scan in theta.
fn scan_convergence() -> Outcome {
    let f = cubic_object();
    let errs: Vec<f64> = [0.2, 0.1, 0.05]
        .iter()
        .map(|&t| scan_error(&f, &scan_reconstruct(&f, t).unwrap(), t).unwrap().max_err)
        .collect();
    let r1 = errs[0] / errs[1];
    let r2 = errs[1] / errs[2];
    outcome(
        within(r1, 1.8, 2.2) && within(r2, 1.8, 2.2),
        format!(
            "max pointwise error {:.3e}, {:.3e}, {:.3e} at theta 0.2, 0.1, 0.05; reduction factors {r1:.3}, {r2:.3} (window [1.8, 2.2])",
            errs[0], errs[1], errs[2]
        ),
    )
}

// 7. Pointer-signal and operational routes agree to first order.
fn operational_equivalence() -> Outcome {
    let f = cubic_object();
    let thetas = [0.2, 0.1, 0.05];
    let residuals: Vec<f64> = thetas
        .iter()
        .map(|&t| {
            let a = scan_weak_values(&f, t).unwrap();
            let b = operational_scan(&f, t).unwrap();
            max_abs_diff(&a, &b)
        })
        .collect();
    let slope = loglog_slope(&thetas, &residuals);
    outcome(
        within(slope, 0.8, 1.2),
        format!(
            "route difference {:.3e}, {:.3e}, {:.3e} at theta 0.2, 0.1, 0.05; log-log slope {slope:.3} (window [0.8, 1.2])",
            residuals[0], residuals[1], residuals[2]
        ),
    )
}

// 8. Bridge residual scales as c^2.
fn bridge_scaling() -> Outcome {
    let cs = [1e-3, 3e-3, 1e-2, 3e-2, 1e-1];
    let slope_for = |f: &SampledField, p: f64| {
        let (a, b) = f.support().unwrap();
        let s = a - 0.05 * (b - a);
        let reports = bridge_residual(f, s, &cs, p).unwrap();
        let residuals: Vec<f64> = reports.iter().map(|r| r.residual).collect();
        loglog_slope(&cs, &residuals)
    };
    let gaussian = presets::gaussian(1.0, 1024, 4.0).unwrap();
    let chirped = presets::chirped_gaussian(1.0, 0.3, 0.0, 1024, 4.0).unwrap();
    let mut slopes = vec![slope_for(&gaussian, 0.0)];
    for p in [-0.5, 0.0, 0.5] {
        slopes.push(slope_for(&chirped, p));
    }
    let point = presets::point_mass(64, 0.1).unwrap();
    let exact = bridge_residual(&point, -1.0, &cs, 0.3)
        .unwrap()
        .iter()
        .map(|r| r.residual)
        .fold(0.0, f64::max);
    outcome(
        slopes.iter().all(|&s| within(s, 1.8, 2.2)) && exact <= 1e-12,
        format!(
            "slopes: Gaussian {:.3}, chirped at p=-0.5/0/0.5 {:.3}/{:.3}/{:.3} (window [1.8, 2.2]); point-mass residual {exact:.1e} (tol 1e-12)",
            slopes[0], slopes[1], slopes[2], slopes[3]
        ),
    )
}

// 9. Transform and operator foundations.
fn foundations() -> Outcome {
    let mut parseval: f64 = 0.0;
    let mut oracle: f64 = 0.0;
    let mut round_trip: f64 = 0.0;
    for (seed, n) in [(1u64, 8usize), (2, 16), (3, 64), (4, 128), (5, 256)] {
        let g = Grid::new(-0.37 * n as f64 / 10.0, 0.1 + 0.01 * seed as f64, n).unwrap();
        let f = random_field(seed, g);
        let spec = dft(&f);
        parseval = parseval.max((spec.norm_sqr() - f.norm_sqr()).abs() / f.norm_sqr());
        let reference = direct_dft(&f);
        oracle = oracle.max(max_abs_diff(spec.values(), &reference) / max_norm(&reference));
        round_trip = round_trip.max(max_abs_diff(idft(&spec).values(), f.values()) / max_norm(f.values()));
    }
    let mut projector: f64 = 0.0;
    for seed in 0..20u64 {
        let v = random_values(100 + seed, 2);
        let psi = JonesState::new(v[0], v[1]);
        for (op, basis) in [(PauliOp::X, JonesState::diagonal()), (PauliOp::Y, JonesState::right_circular())] {
            let acted = op.apply(&psi);
            let proj = basis.scaled(basis.inner(&psi) * 2.0);
            projector = projector
                .max((acted.h - (proj.h - psi.h)).norm())
                .max((acted.v - (proj.v - psi.v)).norm());
        }
    }
    outcome(
        parseval <= 1e-10 && oracle <= 1e-12 && round_trip <= 1e-12 && projector <= 1e-12,
        format!(
            "Parseval {parseval:.1e} (tol 1e-10), dft vs direct sum {oracle:.1e} (tol 1e-12), round trip {round_trip:.1e} (tol 1e-12), \
             projector identities {projector:.1e} (tol 1e-12)"
        ),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("1", "filtered-modulus identity", exact_identity),
        ("2", "end-to-end phase retrieval", end_to_end_retrieval),
        ("3", "anomalous displacement", anomalous_displacement),
        ("4", "weak value constant", weak_value_constant),
        ("5", "zero-shift model", zero_shift_model),
        ("6a", "direct measurement accuracy", scan_accuracy),
        ("6b", "direct measurement convergence", scan_convergence),
        ("7", "operational equivalence", operational_equivalence),
        ("8", "bridge residual scaling", bridge_scaling),
        ("9", "foundations", foundations),
    ];
    let mut failures = 0;
    for (id, name, run) in criteria {
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        let tag = if result.pass { "PASS" } else { "FAIL" };
        if !result.pass {
            failures += 1;
        }
        println!("{tag} [{id}] {name}: {}", result.detail);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
