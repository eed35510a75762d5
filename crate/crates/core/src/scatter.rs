//! Scattering amplitudes, differential cross sections and information
//! radiation patterns in the presence of squeezed light.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::angular::{
    overlap_with, AngularDistribution, CVec3, Direction, Polarization, QuadSpec, QuadratureRule, Vec3,
};
use crate::constants::{C, TWO_PI_CUBED};
use crate::output::Table;
use crate::physics::MechanicalMode;
use crate::squeeze::{OverlapResult, SqueezeParams};
use crate::{Error, Result};

/// Unit of reported cross sections.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CrossSectionUnits {
    /// Multiples of `(2π)³|α0|²Γ^(0)/c`.
    #[default]
    Shape,
    /// SI, from the mode's bare recoil rate and `α0`.
    Absolute,
}

#[derive(Debug, Clone)]
pub struct ScatterConfig {
    pub mode: MechanicalMode,
    pub target: AngularDistribution,
    pub beam: AngularDistribution,
    pub sq: SqueezeParams,
    pub alpha0: Complex64,
    pub units: CrossSectionUnits,
    pub quad: QuadSpec,
    xi: OverlapResult,
}

impl ScatterConfig {
    pub fn new(
        mode: MechanicalMode,
        target: AngularDistribution,
        beam: AngularDistribution,
        sq: SqueezeParams,
        alpha0: Complex64,
        units: CrossSectionUnits,
        quad: QuadSpec,
    ) -> Result<Self> {
        let xi = OverlapResult::new(overlap_with(&beam, &target, quad)?)?;
        Ok(ScatterConfig {
            mode,
            target,
            beam,
            sq,
            alpha0,
            units,
            quad,
            xi,
        })
    }

    pub fn overlap(&self) -> OverlapResult {
        self.xi
    }

    /// `g = ξ s0 (s0 − c0 e^{i(φ_s − 2ψ)})`.
    pub fn squeezing_coefficient(&self) -> Complex64 {
        let (s0, c0) = (self.sq.s0(), self.sq.c0());
        let delta = self.sq.relative_phase(&self.xi);
        self.xi.xi * s0 * (s0 - c0 * Complex64::from_polar(1.0, delta))
    }

    /// `(2π)³|α0|²Γ^(0)/c` in the chosen units.
    pub fn unit_cross_section(&self) -> f64 {
        match self.units {
            CrossSectionUnits::Shape => 1.0,
            CrossSectionUnits::Absolute => TWO_PI_CUBED * self.alpha0.norm_sqr() * self.mode.bare_recoil / C,
        }
    }

    fn prefactor(&self) -> Complex64 {
        let phase = Complex64::from_polar(1.0, self.alpha0.arg());
        match self.units {
            CrossSectionUnits::Shape => phase,
            CrossSectionUnits::Absolute => self.alpha0 * (TWO_PI_CUBED * self.mode.bare_recoil / C).sqrt(),
        }
    }

    /// Field vectors whose projections on a polarization are `f⁺` and `f⁻`.
    fn amplitude_fields(&self, k: &Vec3) -> (CVec3, CVec3) {
        let g = self.squeezing_coefficient();
        let pre = self.prefactor();
        let a_mu = self.target.field(k);
        let a_s = self.beam.field(k);
        let mut fp = [Complex64::new(0.0, 0.0); 3];
        let mut fm = fp;
        for i in 0..3 {
            fp[i] = -pre.conj() * (a_mu[i] + a_s[i].conj() * g);
            fm[i] = -pre * a_s[i].conj() * g.conj();
        }
        (fp, fm)
    }

    /// Polarization sums `(Σ|f⁺|², Σ|f⁻|²)` at `k`.
    fn intensities(&self, k: &Vec3) -> (f64, f64) {
        let (fp, fm) = self.amplitude_fields(k);
        (transverse_sq(&fp, k), transverse_sq(&fm, k))
    }

    /// `∫ dσ/dΩ dΩ`, by quadrature on the rule that resolves the beam.
    pub fn total_cross_section(&self) -> Result<f64> {
        let rule = overlap_rule(&self.beam, &self.target, self.quad);
        let v = rule.sum_nodes(|n| {
            let (p, m) = self.intensities(&n.unit);
            Complex64::new(p - m, 0.0)
        })?;
        Ok(v.re)
    }

    /// `(2π)³|α0|²Γ/c` with `Γ/Γ^(0) = 1 + 2 Re(g ξ*)`.
    pub fn expected_total(&self) -> f64 {
        let g = self.squeezing_coefficient();
        self.unit_cross_section() * (1.0 + 2.0 * (g * self.xi.xi.conj()).re)
    }
}

fn transverse_sq(v: &CVec3, k: &Vec3) -> f64 {
    let all: f64 = v.iter().map(|c| c.norm_sqr()).sum();
    let along = (v[0] * k[0] + v[1] * k[1] + v[2] * k[2]).norm_sqr();
    (all - along).max(0.0)
}

fn overlap_rule(beam: &AngularDistribution, target: &AngularDistribution, spec: QuadSpec) -> QuadratureRule {
    // the overlap and the cross-section integral must share nodes for the
    // normalization identity to hold at quadrature precision
    crate::angular::quadrature_rule_for(&[beam, target], spec)
}

/// `f⁺ = −α0* sqrt((2π)³Γ^(0)/c)[A_μ + A_s* g]`, `f⁻ = −α0 sqrt(...) A_s* g*`.
pub fn scattering_amplitudes(cfg: &ScatterConfig, dir: &Direction, pol: Polarization) -> (Complex64, Complex64) {
    let (fp, fm) = cfg.amplitude_fields(&dir.unit());
    let e = *dir.basis().vector(pol);
    let proj = |v: &CVec3| v[0] * e[0] + v[1] * e[1] + v[2] * e[2];
    (proj(&fp), proj(&fm))
}

/// `dσ/dΩ = Σ_pol (|f⁺|² − |f⁻|²)`.
pub fn differential_cross_section(cfg: &ScatterConfig, dir: &Direction) -> f64 {
    let (p, m) = cfg.intensities(&dir.unit());
    p - m
}

/// Equiangular plotting grid, values at cell centres.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSpec {
    pub n_theta: usize,
    pub n_phi: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { n_theta: 181, n_phi: 360 }
    }
}

/// Summary written next to an IRP table.
#[derive(Debug, Clone, Serialize)]
pub struct IrpMetadata {
    pub label: String,
    pub units: CrossSectionUnits,
    pub unit_cross_section: f64,
    /// `∫ dσ/dΩ dΩ`, the IRP normalization.
    pub normalization: f64,
    pub expected_normalization: f64,
    pub xi: [f64; 2],
    pub xi_modulus: f64,
    pub recoil_ratio: f64,
    pub dsigma_min: f64,
    pub dsigma_max: f64,
    /// True when some cell has `dσ/dΩ < 0`.
    pub negative_values: bool,
}

#[derive(Debug, Clone)]
pub struct IrpGrid {
    /// Columns `theta, phi, dsigma, irp, f_plus_sq, f_minus_sq`.
    pub table: Table,
    pub metadata: IrpMetadata,
}

/// Tabulates `dσ/dΩ` and `I = (dσ/dΩ) / ∫dσ` on `grid`, row-major in θ.
pub fn irp_grid(cfg: &ScatterConfig, grid: GridSpec) -> Result<IrpGrid> {
    if grid.n_theta < 2 || grid.n_phi < 2 {
        return Err(Error::invalid("grid", "resolution must be at least 2x2"));
    }
    let total = cfg.total_cross_section()?;
    if !(total > 0.0) {
        return Err(Error::Numerical(format!(
            "integrated cross section {total} is not positive"
        )));
    }
    let cells: Vec<(f64, f64)> = (0..grid.n_theta)
        .flat_map(|i| {
            let th = (i as f64 + 0.5) * PI / grid.n_theta as f64;
            (0..grid.n_phi).map(move |j| (th, (j as f64 + 0.5) * 2.0 * PI / grid.n_phi as f64))
        })
        .collect();
    let rows: Vec<Vec<f64>> = cells
        .par_iter()
        .map(|&(th, ph)| {
            let d = Direction { theta: th, phi: ph };
            let (p, m) = cfg.intensities(&d.unit());
            let ds = p - m;
            vec![th, ph, ds, ds / total, p, m]
        })
        .collect();
    if let Some(bad) = rows.iter().find(|r| r.iter().any(|v| !v.is_finite())) {
        return Err(Error::Numerical(format!(
            "non-finite cross section at theta={}, phi={}",
            bad[0], bad[1]
        )));
    }
    let (lo, hi) = rows
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r[2]), hi.max(r[2])));
    let mut table = Table::new(["theta", "phi", "dsigma", "irp", "f_plus_sq", "f_minus_sq"]);
    for r in rows {
        table.push(r);
    }
    let xi = cfg.overlap();
    Ok(IrpGrid {
        table,
        metadata: IrpMetadata {
            label: format!("{} / {}", cfg.target.label(), cfg.beam.label()),
            units: cfg.units,
            unit_cross_section: cfg.unit_cross_section(),
            normalization: total,
            expected_normalization: cfg.expected_total(),
            xi: [xi.xi.re, xi.xi.im],
            xi_modulus: xi.modulus(),
            recoil_ratio: crate::squeeze::recoil_ratio(&xi, &cfg.sq),
            dsigma_min: lo,
            dsigma_max: hi,
            negative_values: lo < 0.0,
        },
    })
}
