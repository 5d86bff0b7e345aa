//! One function per scenario. Each writes its CSV files into the output
//! directory and returns what goes into the run metadata.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use weakphase_core::birefringence_sim::{gaussian_probe, measure_displacement, CrystalScenario, DisplacementReport};
use weakphase_core::direct_measure_sim::{
    operational_scan, scan_csv_rows, scan_error, scan_reconstruct, scan_weak_values, ScanError, SCAN_CSV_HEADER,
};
use weakphase_core::expfilter::{reconstruct_object, retrieve, simulate_intensities, DEFAULT_FLOOR_REL, DEFAULT_STRENGTH};
use weakphase_core::fit::{loglog_slope, masked_rms, remove_affine, unwrap};
use weakphase_core::io::{save_field, save_intensity, save_phase_result, write_csv};
use weakphase_core::wavefield::{dft, translate};
use weakphase_core::weakvalue_bridge::{bridge_residual, BridgeReport};
use weakphase_core::zeros::{find_real_zeros, zero_shift_factor};
use weakphase_core::{presets, FilterSpec};

use crate::config::{ObjectSpec, Preset, ScenarioConfig, ScenarioName};
use crate::error::{CliError, CliResult};

/// A check performed during the run; a failed check makes the run fail.
#[derive(Debug, Clone, Serialize)]
pub struct Assertion {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub passed: bool,
}

impl Assertion {
    fn at_most(name: &str, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            limit,
            passed: value <= limit,
        }
    }
}

#[derive(Debug, Default)]
pub struct Outcome {
    pub outputs: Vec<String>,
    pub summary: Map<String, Value>,
    pub assertions: Vec<Assertion>,
}

impl Outcome {
    fn csv(&mut self, out: &Path, name: &str, header: &str, rows: Vec<String>) -> CliResult<()> {
        write_csv(&out.join(name), header, rows)?;
        self.outputs.push(name.into());
        Ok(())
    }
}

pub fn run(cfg: &ScenarioConfig, out: &Path, base: &Path) -> CliResult<Outcome> {
    match cfg.scenario {
        ScenarioName::Retrieve => retrieve_scenario(cfg, out, base),
        ScenarioName::Crystal => crystal_scenario(cfg, out),
        ScenarioName::Sliver => sliver_scenario(cfg, out, base),
        ScenarioName::Bridge => bridge_scenario(cfg, out, base),
        ScenarioName::Zeros => zeros_scenario(cfg, out, base),
    }
}

fn object_or(spec: Option<ObjectSpec>, default: ObjectSpec) -> ObjectSpec {
    spec.unwrap_or(default)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RetrieveParams {
    object: Option<ObjectSpec>,
    /// `c (b - a)`, used when `c` and `s` are not given.
    strength: Option<f64>,
    c: Option<f64>,
    s: Option<f64>,
    floor_rel: Option<f64>,
    /// Linear spectral phase `tilt p` injected into the object.
    tilt: Option<f64>,
    max_phase_rms: Option<f64>,
    max_tilt_error: Option<f64>,
}

fn retrieve_scenario(cfg: &ScenarioConfig, out: &Path, base: &Path) -> CliResult<Outcome> {
    let params: RetrieveParams = cfg.parameters()?;
    let spec = object_or(params.object, ObjectSpec::preset(Preset::ChirpedGaussian));
    let tilt = params.tilt.unwrap_or(0.0);
    // exp(i tilt p) F(p) is the object moved by -tilt; the spectral shift
    // leaves roundoff everywhere, so the support is cut again afterwards
    let built = spec.build(cfg.seed, base)?;
    let object = if tilt == 0.0 {
        built.clone()
    } else {
        presets::truncate(&translate(&built, -tilt), presets::TRUNCATION_REL)
    };
    let grid = *object.grid();
    let (a, b) = object
        .support()
        .ok_or_else(|| CliError::Numerical("object is identically zero".into()))?;
    let fs = match (params.c, params.s) {
        (Some(c), Some(s)) => FilterSpec::new(c, s)?,
        (None, None) => FilterSpec::with_strength(a, b, params.strength.unwrap_or(DEFAULT_STRENGTH))?,
        _ => return Err(CliError::Config("give both `c` and `s` or neither".into())),
    };
    let floor_rel = params.floor_rel.unwrap_or(DEFAULT_FLOOR_REL);

    let (bare, filtered) = simulate_intensities(&object, &fs)?;
    let (pr, _) = retrieve(&bare, &filtered, &fs, &grid, floor_rel)?;
    // the injected tilt is measured against the untilted object, whose own
    // linear phase is part of the absolute tilt
    let recovered_tilt = if tilt == 0.0 {
        0.0
    } else {
        fs.check_support(&built)?;
        let (bare0, filtered0) = simulate_intensities(&built, &fs)?;
        pr.tilt - retrieve(&bare0, &filtered0, &fs, &grid, floor_rel)?.0.tilt
    };
    let modulus: Vec<f64> = bare.iter().map(|v| v.sqrt()).collect();
    let reconstruction = reconstruct_object(&modulus, &pr, &grid, true)?;

    let mut outcome = Outcome::default();
    save_intensity(&grid, &bare, &out.join("intensity_unfiltered.csv"))?;
    save_intensity(&grid, &filtered, &out.join("intensity_filtered.csv"))?;
    save_phase_result(&pr, &grid, &fs, floor_rel, &out.join("phase.csv"))?;
    save_field(&reconstruction, &out.join("reconstruction.csv"))?;
    outcome.outputs.extend(
        ["intensity_unfiltered.csv", "intensity_filtered.csv", "phase.csv", "phase.json", "reconstruction.csv"]
            .map(String::from),
    );

    // phase error against the true spectrum on valid bins, up to a constant
    // and a linear term
    let truth = dft(&object).phase();
    let valid: Vec<usize> = (0..grid.len()).filter(|&j| pr.valid[j]).collect();
    let truth_valid = unwrap(&valid.iter().map(|&j| truth[j]).collect::<Vec<_>>());
    let total = pr.total_phase(&grid);
    let ps: Vec<f64> = valid.iter().map(|&j| grid.p(j)).collect();
    let diff: Vec<f64> = valid.iter().zip(&truth_valid).map(|(&j, t)| total[j] - t).collect();
    let mask = vec![true; diff.len()];
    let rms = if diff.len() > 2 {
        masked_rms(&remove_affine(&ps, &diff, &mask), &mask)
    } else {
        f64::NAN
    };

    outcome.summary.insert("c".into(), json!(fs.c));
    outcome.summary.insert("s".into(), json!(fs.s));
    outcome.summary.insert("support".into(), json!([a, b]));
    outcome.summary.insert("tilt".into(), json!(pr.tilt));
    outcome.summary.insert("recovered_tilt".into(), json!(recovered_tilt));
    outcome.summary.insert("valid_bins".into(), json!(valid.len()));
    outcome.summary.insert("phase_rms".into(), json!(rms));
    outcome.summary.insert("warnings".into(), json!(pr.warnings));
    if let Some(limit) = params.max_phase_rms {
        outcome.assertions.push(Assertion::at_most("phase_rms", rms, limit));
    }
    if let Some(limit) = params.max_tilt_error {
        outcome
            .assertions
            .push(Assertion::at_most("tilt_error", (recovered_tilt - tilt).abs(), limit));
    }
    Ok(outcome)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CrystalParams {
    eps: f64,
    thetas: Vec<f64>,
    sigma: Option<f64>,
    n: Option<usize>,
    half_span: Option<f64>,
    /// Accept post-selection angles beyond the small-angle guard.
    allow_large_theta: Option<bool>,
    max_weak_deviation: Option<f64>,
}

fn crystal_scenario(cfg: &ScenarioConfig, out: &Path) -> CliResult<Outcome> {
    let params: CrystalParams = cfg.parameters()?;
    if params.thetas.is_empty() {
        return Err(CliError::Config("`thetas` must not be empty".into()));
    }
    let probe = gaussian_probe(params.sigma.unwrap_or(1.0), params.n.unwrap_or(4096), params.half_span.unwrap_or(12.0));
    let reports: Vec<DisplacementReport> = params
        .thetas
        .iter()
        .map(|&theta| {
            let sc = if params.allow_large_theta.unwrap_or(false) {
                CrystalScenario::with_theta_override(probe.clone(), params.eps, theta)?
            } else {
                CrystalScenario::new(probe.clone(), params.eps, theta)?
            };
            Ok(measure_displacement(&sc)?)
        })
        .collect::<CliResult<_>>()?;

    let mut outcome = Outcome::default();
    outcome.csv(out, "displacement.csv", DisplacementReport::CSV_HEADER, reports.iter().map(|r| r.csv_row()).collect())?;
    let deviation = reports
        .iter()
        .map(|r| ((r.exact_centroid - r.weak_prediction) / r.weak_prediction).abs())
        .fold(0.0, f64::max);
    outcome.summary.insert("rows".into(), json!(reports.len()));
    outcome.summary.insert("max_weak_deviation".into(), json!(deviation));
    if let Some(limit) = params.max_weak_deviation {
        outcome.assertions.push(Assertion::at_most("max_weak_deviation", deviation, limit));
    }
    Ok(outcome)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SliverParams {
    object: Option<ObjectSpec>,
    thetas: Vec<f64>,
    max_overlap_err: Option<f64>,
}

fn sliver_scenario(cfg: &ScenarioConfig, out: &Path, base: &Path) -> CliResult<Outcome> {
    let params: SliverParams = cfg.parameters()?;
    if params.thetas.is_empty() {
        return Err(CliError::Config("`thetas` must not be empty".into()));
    }
    let spec = object_or(
        params.object,
        ObjectSpec {
            n: Some(512),
            oversample: Some(1.0),
            ..ObjectSpec::preset(Preset::CubicPhaseGaussian)
        },
    );
    let object = spec.build(cfg.seed, base)?;
    let mut outcome = Outcome::default();
    let mut errors: Vec<ScanError> = Vec::new();
    let mut route_rows = Vec::new();
    for (k, &theta) in params.thetas.iter().enumerate() {
        let rec = scan_reconstruct(&object, theta)?;
        errors.push(scan_error(&object, &rec, theta)?);
        outcome.csv(out, &format!("scan_{k}.csv"), SCAN_CSV_HEADER, scan_csv_rows(&object, &rec)?)?;
        let pointer = scan_weak_values(&object, theta)?;
        let operational = operational_scan(&object, theta)?;
        let diff = pointer.iter().zip(&operational).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        route_rows.push(format!("{theta:.16e},{diff:.16e}"));
    }
    outcome.csv(out, "scan_errors.csv", ScanError::CSV_HEADER, errors.iter().map(|e| e.csv_row()).collect())?;
    outcome.csv(out, "routes.csv", "theta,route_diff", route_rows)?;
    let worst = errors.iter().map(|e| e.overlap_err).fold(0.0, f64::max);
    outcome.summary.insert("max_overlap_err".into(), json!(worst));
    outcome.summary.insert("overlap_err".into(), json!(errors.iter().map(|e| e.overlap_err).collect::<Vec<_>>()));
    if let Some(limit) = params.max_overlap_err {
        outcome.assertions.push(Assertion::at_most("max_overlap_err", worst, limit));
    }
    Ok(outcome)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BridgeParams {
    object: Option<ObjectSpec>,
    c: Vec<f64>,
    p: Option<Vec<f64>>,
    s: Option<f64>,
    /// Largest allowed `|slope - 2|` of the residual against `c`.
    max_slope_deviation: Option<f64>,
}

fn bridge_scenario(cfg: &ScenarioConfig, out: &Path, base: &Path) -> CliResult<Outcome> {
    let params: BridgeParams = cfg.parameters()?;
    if params.c.is_empty() {
        return Err(CliError::Config("`c` must not be empty".into()));
    }
    let object = object_or(params.object, ObjectSpec::preset(Preset::Gaussian)).build(cfg.seed, base)?;
    let (a, b) = object
        .support()
        .ok_or_else(|| CliError::Numerical("object is identically zero".into()))?;
    let s = params.s.unwrap_or(a - 0.05 * (b - a).max(object.grid().dx()));
    let ps = params.p.unwrap_or_else(|| vec![0.0]);

    let mut rows = Vec::new();
    let mut slopes = Vec::new();
    let mut max_residual: f64 = 0.0;
    for &p in &ps {
        let reports = bridge_residual(&object, s, &params.c, p)?;
        let residuals: Vec<f64> = reports.iter().map(|r| r.residual).collect();
        max_residual = residuals.iter().copied().fold(max_residual, f64::max);
        // a vanishing residual has no meaningful scaling
        let slope = if params.c.len() > 1 && residuals.iter().all(|&r| r > 1e-12) {
            Some(loglog_slope(&params.c, &residuals))
        } else {
            None
        };
        slopes.push(slope);
        rows.extend(reports.iter().map(BridgeReport::csv_row));
    }
    let mut outcome = Outcome::default();
    outcome.csv(out, "bridge.csv", BridgeReport::CSV_HEADER, rows)?;
    outcome.summary.insert("s".into(), json!(s));
    outcome.summary.insert("slopes".into(), json!(slopes));
    outcome.summary.insert("max_residual".into(), json!(max_residual));
    if let Some(limit) = params.max_slope_deviation {
        for (p, slope) in ps.iter().zip(&slopes) {
            if let Some(slope) = slope {
                outcome
                    .assertions
                    .push(Assertion::at_most(&format!("slope_deviation_p={p}"), (slope - 2.0).abs(), limit));
            }
        }
    }
    Ok(outcome)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ZeroShiftParams {
    eps: f64,
    theta: f64,
    p: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ZerosParams {
    object: Option<ObjectSpec>,
    /// Largest modulus, relative to the peak, of the weaker bin next to a zero.
    floor: Option<f64>,
    zero_shift: Option<ZeroShiftParams>,
}

fn zeros_scenario(cfg: &ScenarioConfig, out: &Path, base: &Path) -> CliResult<Outcome> {
    let params: ZerosParams = cfg.parameters()?;
    let spec = object_or(
        params.object,
        ObjectSpec {
            n: Some(256),
            ..ObjectSpec::preset(Preset::TwoSpikes)
        },
    );
    let object = spec.build(cfg.seed, base)?;
    let zeros = find_real_zeros(&dft(&object), params.floor.unwrap_or(0.5));
    let mut outcome = Outcome::default();
    outcome.csv(out, "zeros.csv", "p", zeros.iter().map(|z| format!("{z:.16e}")).collect())?;
    outcome.summary.insert("real_zeros".into(), json!(zeros.len()));
    if let Some(zs) = params.zero_shift {
        let rows = zs
            .p
            .iter()
            .map(|&p| {
                let (factor, phase) = zero_shift_factor(zs.theta, zs.eps, p)?;
                Ok(format!("{p:.16e},{:.16e},{:.16e},{phase:.16e}", factor.re, factor.im))
            })
            .collect::<CliResult<Vec<_>>>()?;
        outcome.csv(out, "zero_shift.csv", "p,factor_re,factor_im,phase", rows)?;
        outcome.summary.insert("phase_slope".into(), json!(-zs.eps / zs.theta));
    }
    Ok(outcome)
}
