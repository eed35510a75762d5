//! Recoil heating in the presence of squeezed vacuum.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::angular::{
    make_libration_distribution, make_motion_distribution, overlap_with, AngularDistribution, Axis,
    BeamSpec, QuadSpec,
};
use crate::output::Table;
use crate::physics::{MechanicalMode, ModeKind};
use crate::{Error, Result};

/// Degree `r` and phase `φ_s` of squeezing at the carrier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezeParams {
    pub r: f64,
    pub phi: f64,
}

impl SqueezeParams {
    pub fn new(r: f64, phi: f64) -> Result<Self> {
        if !(r.is_finite() && r >= 0.0) {
            return Err(Error::invalid("squeezer.r", format!("{r} must be non-negative")));
        }
        if !phi.is_finite() {
            return Err(Error::invalid("squeezer.phase", "not finite"));
        }
        Ok(SqueezeParams {
            r,
            phi: phi.rem_euclid(2.0 * PI),
        })
    }

    pub fn from_db(db: f64, phi: f64) -> Result<Self> {
        Self::new(db_to_r(db)?, phi)
    }

    /// `s0 = sinh r`.
    pub fn s0(&self) -> f64 {
        self.r.sinh()
    }

    /// `c0 = cosh r`.
    pub fn c0(&self) -> f64 {
        self.r.cosh()
    }

    /// `φ_s − 2ψ`, the combination every observable depends on.
    pub fn relative_phase(&self, xi: &OverlapResult) -> f64 {
        self.phi - 2.0 * xi.phase()
    }
}

/// How a user-supplied phase is interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseReference {
    /// The value is `φ_s − 2ψ` for the mode at hand.
    Relative,
    /// The value is `φ_s` itself.
    Absolute,
}

impl PhaseReference {
    /// Absolute squeezing phase for a given overlap.
    pub fn resolve(self, phase: f64, xi: &OverlapResult) -> f64 {
        match self {
            PhaseReference::Relative => phase + 2.0 * xi.phase(),
            PhaseReference::Absolute => phase,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlapResult {
    pub xi: Complex64,
}

impl OverlapResult {
    pub fn new(xi: Complex64) -> Result<Self> {
        if !(xi.re.is_finite() && xi.im.is_finite()) {
            return Err(Error::Numerical(format!("overlap {xi} is not finite")));
        }
        if xi.norm() > 1.0 + 1e-10 {
            return Err(Error::Numerical(format!(
                "overlap modulus {} exceeds 1; inputs are not normalized",
                xi.norm()
            )));
        }
        Ok(OverlapResult { xi })
    }

    /// `ξ = 1`.
    pub fn perfect() -> Self {
        OverlapResult {
            xi: Complex64::new(1.0, 0.0),
        }
    }

    pub fn modulus(&self) -> f64 {
        self.xi.norm()
    }

    pub fn modulus_sq(&self) -> f64 {
        self.xi.norm_sqr()
    }

    /// `ψ = arg ξ`.
    pub fn phase(&self) -> f64 {
        self.xi.arg()
    }

    pub fn compute(beam: &AngularDistribution, target: &AngularDistribution, spec: QuadSpec) -> Result<Self> {
        Self::new(overlap_with(beam, target, spec)?)
    }
}

/// `r = dB · ln 10 / 20`.
pub fn db_to_r(db: f64) -> Result<f64> {
    if !(db.is_finite() && db >= 0.0) {
        return Err(Error::invalid("squeezer.db", format!("{db} must be non-negative")));
    }
    Ok(db * std::f64::consts::LN_10 / 20.0)
}

/// `Γ/Γ^(0)` in terms of `|ξ|²`, `r` and `Φ = φ_s − 2ψ`.
pub fn recoil_ratio_relative(xi_sq: f64, r: f64, rel_phase: f64) -> f64 {
    let (s, c) = (0.5 * rel_phase).sin_cos();
    1.0 - xi_sq * (1.0 - (2.0 * r).exp() * s * s - (-2.0 * r).exp() * c * c)
}

/// `Γ/Γ^(0) = 1 − |ξ|²[1 − e^{2r} sin²(Φ/2) − e^{−2r} cos²(Φ/2)]`.
pub fn recoil_ratio(xi: &OverlapResult, sq: &SqueezeParams) -> f64 {
    recoil_ratio_relative(xi.modulus_sq(), sq.r, sq.relative_phase(xi))
}

/// `Γ_μμ' = Γ^(0) δ + 2 sqrt(Γ_μ^(0) Γ_μ'^(0)) |ξ_μ ξ_μ'| [s0² − s0 c0 cos(φ_s − ψ_μ − ψ_μ')]`.
/// `same_mode` selects the Kronecker delta.
pub fn cross_rate(
    xi_a: &OverlapResult,
    xi_b: &OverlapResult,
    g0_a: f64,
    g0_b: f64,
    sq: &SqueezeParams,
    same_mode: bool,
) -> Result<f64> {
    if !(g0_a >= 0.0 && g0_b >= 0.0) {
        return Err(Error::invalid("bare_recoil", "rates must be non-negative"));
    }
    let (s0, c0) = (sq.s0(), sq.c0());
    let diag = if same_mode { g0_a } else { 0.0 };
    let angle = sq.phi - xi_a.phase() - xi_b.phase();
    Ok(diag + 2.0 * (g0_a * g0_b).sqrt() * xi_a.modulus() * xi_b.modulus() * (s0 * s0 - s0 * c0 * angle.cos()))
}

/// Angular distribution of the photons carrying information about `kind`.
pub fn mode_distribution(kind: ModeKind, arg_alpha0: f64) -> Result<AngularDistribution> {
    match kind {
        ModeKind::Motion(a) => make_motion_distribution(a, arg_alpha0),
        ModeKind::Libration(a) => make_libration_distribution(a, arg_alpha0),
    }
}

/// Grid of a recoil sweep: every squeezing level against every phase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub db: Vec<f64>,
    pub phase: Vec<f64>,
    pub reference: PhaseReference,
}

/// Recoil ratio over `grid` for perfect overlap and for each beam.
/// Columns: `r_db, phase, ratio_perfect, ratio_<beam label>...`.
pub fn recoil_sweep(kind: ModeKind, beams: &[BeamSpec], grid: &SweepGrid, arg_alpha0: f64, spec: QuadSpec) -> Result<Table> {
    let target = mode_distribution(kind, arg_alpha0)?;
    let xis: Vec<OverlapResult> = beams
        .iter()
        .map(|b| OverlapResult::compute(&b.build(spec)?, &target, spec))
        .collect::<Result<_>>()?;
    sweep_with_overlaps(beams.iter().map(|b| b.label()).collect(), &xis, grid)
}

/// Libration variant of [`recoil_sweep`], restricted to `y` and `z`.
pub fn libration_recoil_sweep(axis: Axis, beams: &[BeamSpec], grid: &SweepGrid, arg_alpha0: f64, spec: QuadSpec) -> Result<Table> {
    if axis == Axis::X {
        return Err(Error::invalid("axis", "libration is defined about y or z"));
    }
    recoil_sweep(ModeKind::Libration(axis), beams, grid, arg_alpha0, spec)
}

/// Sweep table from precomputed overlaps.
pub fn sweep_with_overlaps(labels: Vec<String>, xis: &[OverlapResult], grid: &SweepGrid) -> Result<Table> {
    if grid.db.is_empty() || grid.phase.is_empty() {
        return Err(Error::invalid("grid", "empty sweep grid"));
    }
    let rs: Vec<f64> = grid.db.iter().map(|&d| db_to_r(d)).collect::<Result<_>>()?;
    let mut columns = vec!["r_db".to_string(), "phase".to_string(), "ratio_perfect".to_string()];
    columns.extend(labels.iter().map(|l| format!("ratio_{l}")));
    let mut table = Table::new(columns);
    let points: Vec<(f64, f64, f64)> = grid
        .db
        .iter()
        .zip(&rs)
        .flat_map(|(&d, &r)| grid.phase.iter().map(move |&p| (d, r, p)))
        .collect();
    let perfect = OverlapResult::perfect();
    let rows: Vec<Vec<f64>> = points
        .par_iter()
        .map(|&(d, r, p)| {
            let mut row = vec![d, p];
            for xi in std::iter::once(&perfect).chain(xis) {
                let sq = SqueezeParams {
                    r,
                    phi: grid.reference.resolve(p, xi).rem_euclid(2.0 * PI),
                };
                row.push(recoil_ratio(xi, &sq));
            }
            row
        })
        .collect();
    for row in rows {
        table.push(row);
    }
    Ok(table)
}

/// `⟨n⟩(t) = n0 + (Γ/Γ^(0)) Γ^(0) t`: phonon growth without damping or a
/// thermal bath. Columns `t, n`.
pub fn reheating_trajectory(mode: &MechanicalMode, ratio: f64, n0: f64, times: &[f64]) -> Result<Table> {
    if times.iter().any(|t| !(*t >= 0.0)) {
        return Err(Error::invalid("t", "times must be non-negative"));
    }
    let rate = ratio * mode.bare_recoil;
    let mut table = Table::new(["t", "n"]);
    for &t in times {
        table.push(vec![t, n0 + rate * t]);
    }
    Ok(table)
}
