//! Browser bindings: a recoil-versus-phase curve, a polar slice of the
//! information radiation pattern and a Wigner function grid, all for the
//! axial motion of the default silica sphere and a backward Gaussian beam.

use std::f64::consts::PI;

use levsqueeze::angular::{make_gaussian_beam_with, overlap_with, AngularDistribution, Axis, Direction, QuadSpec};
use levsqueeze::detect::{input_spectra_relative, interacting_covariance, wigner_grid};
use levsqueeze::physics::{derive_motion_modes, Laser, ModeKind, Particle};
use levsqueeze::scatter::{differential_cross_section, CrossSectionUnits, ScatterConfig};
use levsqueeze::squeeze::{db_to_r, mode_distribution, recoil_ratio_relative, SqueezeParams};
use levsqueeze::{Complex64, Error, Result};
use wasm_bindgen::prelude::*;

fn quad() -> QuadSpec {
    QuadSpec::new(32, 64).expect("static rule")
}

fn setup(na: f64) -> Result<(AngularDistribution, AngularDistribution, Complex64)> {
    let spec = quad();
    let target = mode_distribution(ModeKind::Motion(Axis::Z), 0.0)?;
    let beam = make_gaussian_beam_with(na, [0.0, 0.0, -1.0], 0.0, spec)?;
    let xi = overlap_with(&beam, &target, spec)?;
    Ok((target, beam, xi))
}

fn samples(n: usize) -> Result<impl Iterator<Item = f64>> {
    if n < 2 {
        return Err(Error::invalid("n", "need at least 2 samples"));
    }
    Ok((0..n).map(move |i| 2.0 * PI * i as f64 / (n - 1) as f64))
}

/// Rows `(Φ, ratio for ξ = 1, ratio for the beam)` over `Φ ∈ [0, 2π]`.
pub fn recoil_curve_rows(na: f64, db: f64, n: usize) -> Result<Vec<[f64; 3]>> {
    let r = db_to_r(db)?;
    let (_, _, xi) = setup(na)?;
    let x = xi.norm_sqr();
    Ok(samples(n)?
        .map(|p| [p, recoil_ratio_relative(1.0, r, p), recoil_ratio_relative(x, r, p)])
        .collect())
}

/// `Γ/Γ^(0)` for the backward beam at one relative phase.
pub fn recoil_at(na: f64, db: f64, rel_phase: f64) -> Result<f64> {
    Ok(recoil_ratio_relative(setup(na)?.2.norm_sqr(), db_to_r(db)?, rel_phase))
}

/// `|ξ|` of the backward beam at this aperture.
pub fn overlap_modulus(na: f64) -> Result<f64> {
    Ok(setup(na)?.2.norm())
}

/// Normalized `I(t)` along the great circle `k = (sin t, 0, cos t)`,
/// `t ∈ [0, 2π]`, at relative squeezing phase `rel_phase`.
pub fn irp_slice_values(na: f64, db: f64, rel_phase: f64, n: usize) -> Result<Vec<f64>> {
    let (target, beam, xi) = setup(na)?;
    let mode = derive_motion_modes(&Particle::silica(), &Laser::default())?[2];
    let sq = SqueezeParams::from_db(db, rel_phase + 2.0 * xi.arg())?;
    let cfg = ScatterConfig::new(mode, target, beam, sq, Complex64::new(1.0, 0.0), CrossSectionUnits::Shape, quad())?;
    let total = cfg.total_cross_section()?;
    if !(total > 0.0) {
        return Err(Error::Numerical(format!("integrated cross section {total} is not positive")));
    }
    samples(n)?
        .map(|t| {
            let (theta, phi) = if t <= PI { (t, 0.0) } else { (2.0 * PI - t, PI) };
            Ok(differential_cross_section(&cfg, &Direction::new(theta.clamp(0.0, PI), phi)?) / total)
        })
        .collect()
}

/// Wigner function of the interacting input on an `n × n` grid spanning
/// ±4 marginal standard deviations. Returns `(values row-major in x, half width x, half width y)`.
pub fn wigner_values(xi_sq: f64, db: f64, rel_phase: f64, n: usize) -> Result<(Vec<f64>, f64, f64)> {
    if !(0.0..=1.0).contains(&xi_sq) {
        return Err(Error::invalid("xi_sq", "must lie in [0, 1]"));
    }
    let cov = interacting_covariance(&input_spectra_relative(xi_sq, db_to_r(db)?, rel_phase))?;
    let (table, _) = wigner_grid(&cov, n, n, 4.0)?;
    let values = table.rows.iter().map(|r| r[2]).collect();
    Ok((values, 4.0 * cov.xx.sqrt(), 4.0 * cov.yy.sqrt()))
}

fn js(e: Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Flattened `[Φ, perfect, beam, Φ, ...]`.
#[wasm_bindgen]
pub fn recoil_curve(na: f64, db: f64, n: usize) -> std::result::Result<Vec<f64>, JsError> {
    Ok(recoil_curve_rows(na, db, n).map_err(js)?.concat())
}

#[wasm_bindgen]
pub fn recoil_ratio(na: f64, db: f64, rel_phase: f64) -> std::result::Result<f64, JsError> {
    recoil_at(na, db, rel_phase).map_err(js)
}

#[wasm_bindgen]
pub fn beam_overlap(na: f64) -> std::result::Result<f64, JsError> {
    overlap_modulus(na).map_err(js)
}

#[wasm_bindgen]
pub fn irp_slice(na: f64, db: f64, rel_phase: f64, n: usize) -> std::result::Result<Vec<f64>, JsError> {
    irp_slice_values(na, db, rel_phase, n).map_err(js)
}

/// Grid values followed by the two half widths.
#[wasm_bindgen]
pub fn wigner(xi_sq: f64, db: f64, rel_phase: f64, n: usize) -> std::result::Result<Vec<f64>, JsError> {
    let (mut v, hx, hy) = wigner_values(xi_sq, db, rel_phase, n).map_err(js)?;
    v.extend([hx, hy]);
    Ok(v)
}
