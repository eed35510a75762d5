//! Input noise spectra, minimum detectable signal relative to the standard
//! quantum limit, back-action and correlation spectra, and Gaussian Wigner
//! functions of the input light.
//!
//! Spectra are stored pre-multiplied by 2π, so vacuum noise is 1.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::output::Table;
use crate::physics::MechanicalMode;
use crate::squeeze::{OverlapResult, SqueezeParams};
use crate::{Error, Result};

/// `(2πS_XX, 2πS_YY, 2π(S_XY + S_YX)/2)` of the interacting input mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InputSpectra {
    pub sxx: f64,
    pub syy: f64,
    pub scross: f64,
}

impl InputSpectra {
    pub const VACUUM: InputSpectra = InputSpectra {
        sxx: 1.0,
        syy: 1.0,
        scross: 0.0,
    };

    /// `sxx·syy − scross²`, bounded below by 1.
    pub fn determinant(&self) -> f64 {
        self.sxx * self.syy - self.scross * self.scross
    }
}

/// Spectra from `|ξ|²`, `r` and `Φ = φ_s − 2ψ`.
pub fn input_spectra_relative(xi_sq: f64, r: f64, rel_phase: f64) -> InputSpectra {
    let (s0, c0) = (r.sinh(), r.cosh());
    let (sn, cs) = rel_phase.sin_cos();
    InputSpectra {
        sxx: 1.0 + 2.0 * xi_sq * s0 * (s0 - c0 * cs),
        syy: 1.0 + 2.0 * xi_sq * s0 * (s0 + c0 * cs),
        scross: -2.0 * xi_sq * s0 * c0 * sn,
    }
}

pub fn input_spectra(xi: &OverlapResult, sq: &SqueezeParams) -> InputSpectra {
    input_spectra_relative(xi.modulus_sq(), sq.r, sq.relative_phase(xi))
}

/// `χ̃(ω) = Ω²/(Ω² − ω² − iγω)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Susceptibility {
    pub omega: f64,
    pub frequency: f64,
    pub damping: f64,
    pub chi_tilde: Complex64,
}

impl Susceptibility {
    pub fn new(omega: f64, frequency: f64, damping: f64) -> Result<Self> {
        if !(frequency.is_finite() && frequency > 0.0) {
            return Err(Error::invalid("frequency", "must be positive"));
        }
        if !(damping.is_finite() && damping >= 0.0) {
            return Err(Error::invalid("damping", "must be non-negative"));
        }
        if !omega.is_finite() {
            return Err(Error::invalid("omega", "not finite"));
        }
        let den = Complex64::new(frequency * frequency - omega * omega, -damping * omega);
        if den.norm() == 0.0 {
            return Err(Error::Numerical(format!(
                "susceptibility pole at omega = {omega} with zero damping"
            )));
        }
        Ok(Susceptibility {
            omega,
            frequency,
            damping,
            chi_tilde: frequency * frequency / den,
        })
    }

    pub fn for_mode(mode: &MechanicalMode, omega: f64) -> Result<Self> {
        Self::new(omega, mode.frequency, mode.damping)
    }

    /// `ω = 10⁻³Ω`, `γ = 10⁻⁶Ω`.
    pub fn low_frequency(frequency: f64) -> Result<Self> {
        Self::new(1e-3 * frequency, frequency, 1e-6 * frequency)
    }

    pub fn modulus(&self) -> f64 {
        self.chi_tilde.norm()
    }

    /// `Re χ̃ / |χ̃|`.
    pub fn rho(&self) -> f64 {
        self.chi_tilde.re / self.chi_tilde.norm()
    }
}

/// `S_min/S_SQL = ½[u|χ̃| sxx + syy/(u|χ̃|) − 2(Re χ̃/|χ̃|) scross]`.
pub fn s_min(spectra: &InputSpectra, chi: &Susceptibility, u: f64) -> Result<f64> {
    if !(u.is_finite() && u > 0.0) {
        return Err(Error::invalid("u", format!("{u} must be positive")));
    }
    let a = u * chi.modulus();
    Ok(0.5 * (a * spectra.sxx + spectra.syy / a - 2.0 * chi.rho() * spectra.scross))
}

/// Optimum over `u`: `u = |χ̃|⁻¹ sqrt(syy/sxx)`, value `sqrt(sxx syy) − ρ scross`.
pub fn s_min_opt_u(spectra: &InputSpectra, chi: &Susceptibility) -> Result<(f64, f64)> {
    if !(spectra.sxx > 0.0 && spectra.syy > 0.0) {
        return Err(Error::invalid("spectra", "sxx and syy must be positive"));
    }
    let u = (spectra.syy / spectra.sxx).sqrt() / chi.modulus();
    let value = (spectra.sxx * spectra.syy).sqrt() - chi.rho() * spectra.scross;
    Ok((u, value))
}

/// Joint optimum over `u` and `Φ = φ_s − 2ψ`. Returns `(Φ_opt, value)`.
///
/// With `A = 1 + 2|ξ|²s0²` and `B = 2|ξ|²s0c0`, the optimum sits on the
/// quadrature branch `Φ = 3π/2` (or `π/2` when `Re χ̃ < 0`) with value
/// `A − |ρ|B` whenever `|ρ| ≥ B/A`; closer to resonance the optimal phase
/// moves off that branch and the value becomes `sqrt(A² − B²) sqrt(1 − ρ²)`.
pub fn s_min_opt_u_phase(xi_sq: f64, r: f64, chi: &Susceptibility) -> (f64, f64) {
    let (s0, c0) = (r.sinh(), r.cosh());
    let a = 1.0 + 2.0 * xi_sq * s0 * s0;
    let b = 2.0 * xi_sq * s0 * c0;
    let rho = chi.rho();
    let branch = if rho >= 0.0 { 1.5 * PI } else { 0.5 * PI };
    if rho.abs() * a >= b {
        return (branch, a - rho.abs() * b);
    }
    let det = 1.0 + 4.0 * xi_sq * (1.0 - xi_sq) * s0 * s0;
    let value = det.sqrt() * (1.0 - rho * rho).sqrt();
    let cos_sq = ((b * b - rho * rho * a * a) / (b * b * (1.0 - rho * rho))).clamp(0.0, 1.0);
    let sin = -rho.signum() * (1.0 - cos_sq).sqrt();
    let phi = sin.atan2(cos_sq.sqrt()).rem_euclid(2.0 * PI);
    (phi, value)
}

/// The compact two-branch expression
/// `1 − |ξ|² + |ξ|² Σ_η (e^{2ηr}/2)(1 − η|Re χ̃|/|χ̃|)`, the optimum over
/// `u` restricted to `Φ ∈ {π/2, 3π/2}`.
pub fn s_min_quadrature_branch(xi_sq: f64, r: f64, chi: &Susceptibility) -> (f64, f64) {
    let rho = chi.rho();
    let phi = if rho >= 0.0 { 1.5 * PI } else { 0.5 * PI };
    let sum: f64 = [1.0f64, -1.0]
        .iter()
        .map(|&eta| (2.0 * eta * r).exp() / 2.0 * (1.0 - eta * rho.abs()))
        .sum();
    (phi, 1.0 - xi_sq + xi_sq * sum)
}

fn require_damping(chi: &Susceptibility) -> Result<()> {
    if chi.damping > 0.0 {
        Ok(())
    } else {
        Err(Error::Numerical(
            "spectral densities need positive damping to regularize the resonance pole".into(),
        ))
    }
}

/// `2πS^ba = r_0² Γ^(0) sxx |2χ̃/Ω|²` (`2mΩχ = 2χ̃/Ω`).
pub fn backaction_psd(mode: &MechanicalMode, spectra: &InputSpectra, chi: &Susceptibility) -> Result<f64> {
    require_damping(chi)?;
    let k = (2.0 * chi.chi_tilde / mode.frequency).norm_sqr();
    Ok(mode.zero_point.powi(2) * mode.bare_recoil * spectra.sxx * k)
}

/// `2πS^c = r_0 sqrt(Γ^(0)) Re(2χ̃/Ω) · 2 scross`.
pub fn correlation_psd(mode: &MechanicalMode, spectra: &InputSpectra, chi: &Susceptibility) -> Result<f64> {
    require_damping(chi)?;
    let re = (2.0 * chi.chi_tilde / mode.frequency).re;
    Ok(mode.zero_point * mode.bare_recoil.sqrt() * re * 2.0 * spectra.scross)
}

/// Shot-noise imprecision referred to displacement, `2π r_0² S_YY/(4Γ^(0))`.
pub fn imprecision_psd(mode: &MechanicalMode, spectra: &InputSpectra) -> f64 {
    mode.zero_point.powi(2) * spectra.syy / (4.0 * mode.bare_recoil)
}

/// `2πS_SQL = 2|χ̃| r_0²/Ω`.
pub fn sql_psd(mode: &MechanicalMode, chi: &Susceptibility) -> f64 {
    2.0 * chi.modulus() * mode.zero_point.powi(2) / mode.frequency
}

/// Total added displacement noise over the SQL, assembled from the three
/// spectral densities at the mode's own measurement strength.
pub fn added_noise_over_sql(mode: &MechanicalMode, spectra: &InputSpectra, chi: &Susceptibility) -> Result<f64> {
    let imp = imprecision_psd(mode, spectra);
    let ba = backaction_psd(mode, spectra, chi)?;
    let c = correlation_psd(mode, spectra, chi)?;
    let referred_c = mode.zero_point / (2.0 * mode.bare_recoil.sqrt()) * c;
    Ok((imp + ba - referred_c) / sql_psd(mode, chi))
}

/// Symmetric 2×2 covariance matrix of a Gaussian state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Covariance {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl Covariance {
    pub fn new(xx: f64, xy: f64, yy: f64) -> Result<Self> {
        let c = Covariance { xx, xy, yy };
        if !(xx > 0.0 && yy > 0.0 && c.determinant() > 0.0) {
            return Err(Error::Numerical(format!(
                "covariance [[{xx}, {xy}], [{xy}, {yy}]] is not positive definite"
            )));
        }
        Ok(c)
    }

    pub fn determinant(&self) -> f64 {
        self.xx * self.yy - self.xy * self.xy
    }

    /// `W(X, Y) = exp(−Xᵀ C⁻¹ X / 2) / (2π sqrt(det C))`.
    pub fn wigner(&self, x: f64, y: f64) -> f64 {
        let det = self.determinant();
        let q = (self.yy * x * x - 2.0 * self.xy * x * y + self.xx * y * y) / det;
        (-0.5 * q).exp() / (2.0 * PI * det.sqrt())
    }
}

/// `[[sxx, −scross], [−scross, syy]]`.
pub fn interacting_covariance(spectra: &InputSpectra) -> Result<Covariance> {
    Covariance::new(spectra.sxx, -spectra.scross, spectra.syy)
}

/// Bare squeezed mode: `⟨Q²⟩ = e^{2r}cos²(φ/2) + e^{−2r}sin²(φ/2)`,
/// `⟨P²⟩ = e^{2r}sin²(φ/2) + e^{−2r}cos²(φ/2)`, `⟨QP + PQ⟩/2 = −sinh(2r) sin φ`.
pub fn bare_mode_covariance(r: f64, phi: f64) -> Result<Covariance> {
    let (s, c) = (0.5 * phi).sin_cos();
    let (ep, em) = ((2.0 * r).exp(), (-2.0 * r).exp());
    Covariance::new(
        ep * c * c + em * s * s,
        -(2.0 * r).sinh() * phi.sin(),
        ep * s * s + em * c * c,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WignerSource {
    InteractingInput,
    BareMode,
}

/// `W` on an `n_x × n_y` grid spanning ±`width` marginal standard deviations
/// per axis. Columns `x, y, w`, row-major in `x`. Also returns the grid sum
/// `Σ W ΔX ΔY`.
pub fn wigner_grid(cov: &Covariance, n_x: usize, n_y: usize, width: f64) -> Result<(Table, f64)> {
    if n_x < 2 || n_y < 2 {
        return Err(Error::invalid("grid", "need at least 2x2 points"));
    }
    if !(width > 0.0) {
        return Err(Error::invalid("width", "must be positive"));
    }
    let hx = width * cov.xx.sqrt();
    let hy = width * cov.yy.sqrt();
    let dx = 2.0 * hx / (n_x - 1) as f64;
    let dy = 2.0 * hy / (n_y - 1) as f64;
    let mut table = Table::new(["x", "y", "w"]);
    let mut values = Vec::with_capacity(n_x * n_y);
    for i in 0..n_x {
        let x = -hx + i as f64 * dx;
        for j in 0..n_y {
            let y = -hy + j as f64 * dy;
            let w = cov.wigner(x, y);
            values.push(w);
            table.push(vec![x, y, w]);
        }
    }
    let integral = crate::angular::pairwise_sum(&values) * dx * dy;
    Ok((table, integral))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::squeeze::{db_to_r, recoil_ratio_relative};

    #[test]
    fn vacuum_spectra() {
        let s = input_spectra_relative(0.7, 0.0, 1.0);
        assert_eq!(s, InputSpectra::VACUUM);
    }

    #[test]
    fn perfect_overlap_spectra() {
        let r = db_to_r(15.0).unwrap();
        let s = input_spectra_relative(1.0, r, 0.0);
        assert!((s.sxx - (-2.0 * r).exp()).abs() < 1e-12);
        assert!((s.syy - (2.0 * r).exp()).abs() < 1e-12);
        assert_eq!(s.scross, 0.0);
    }

    #[test]
    fn sxx_is_recoil_ratio() {
        for &(x, r, p) in &[(0.3, 0.5, 1.0), (1.0, 2.0, 3.0), (0.0, 1.0, 0.2)] {
            let s = input_spectra_relative(x, r, p);
            assert!((s.sxx - recoil_ratio_relative(x, r, p)).abs() < 1e-12 * s.sxx.max(1.0));
        }
    }

    #[test]
    fn vacuum_sql() {
        let chi = Susceptibility::low_frequency(1.0).unwrap();
        let u = 1.0 / chi.modulus();
        assert!((s_min(&InputSpectra::VACUUM, &chi, u).unwrap() - 1.0).abs() < 1e-15);
        let (uo, v) = s_min_opt_u(&InputSpectra::VACUUM, &chi).unwrap();
        assert!((uo - u).abs() < 1e-15 && (v - 1.0).abs() < 1e-15);
        assert!(s_min(&InputSpectra::VACUUM, &chi, 0.0).is_err());
    }

    #[test]
    fn resonance_has_zero_real_part() {
        let chi = Susceptibility::new(2.0, 2.0, 1e-3).unwrap();
        assert!(chi.chi_tilde.re.abs() < 1e-12 * chi.modulus());
        assert!(Susceptibility::new(2.0, 2.0, 0.0).is_err());
        let neg = Susceptibility::new(-0.5, 2.0, 1e-3).unwrap();
        let pos = Susceptibility::new(0.5, 2.0, 1e-3).unwrap();
        assert_eq!(neg.chi_tilde, pos.chi_tilde.conj());
    }

    #[test]
    fn quadrature_branch_limits() {
        let r = db_to_r(15.0).unwrap();
        let low = Susceptibility::low_frequency(1.0).unwrap();
        let (phi, v) = s_min_quadrature_branch(0.8, r, &low);
        assert_eq!(phi, 1.5 * PI);
        assert!((v - (1.0 - 0.8 * (1.0 - (-2.0 * r).exp()))).abs() < 1e-5);
        let res = Susceptibility::new(1.0, 1.0, 1e-6).unwrap();
        let (_, v) = s_min_quadrature_branch(0.8, r, &res);
        assert!((v - ((2.0 * r).cosh() * 0.8 + 0.2)).abs() < 1e-9);
        assert!((s_min_quadrature_branch(0.0, r, &low).1 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn joint_optimum_at_resonance_is_sqrt_det() {
        let r = 1.0;
        let res = Susceptibility::new(1.0, 1.0, 1e-6).unwrap();
        let (_, v) = s_min_opt_u_phase(0.6, r, &res);
        let det = 1.0 + 4.0 * 0.6 * 0.4 * r.sinh().powi(2);
        assert!((v - det.sqrt()).abs() < 1e-9);
        assert!(v >= 1.0);
    }

    #[test]
    fn psd_limits() {
        let mode = crate::physics::derive_motion_modes(
            &crate::physics::Particle::silica(),
            &crate::physics::Laser::default(),
        )
        .unwrap()[0];
        let s = input_spectra_relative(0.5, 1.0, 0.4);
        let w = mode.frequency;
        let at = |o: f64| Susceptibility::for_mode(&mode, o).unwrap();
        let ratio = backaction_psd(&mode, &s, &at(0.0)).unwrap() / backaction_psd(&mode, &s, &at(w)).unwrap();
        assert!((ratio / (mode.damping / w).powi(2) - 1.0).abs() < 1e-6);
        assert!(correlation_psd(&mode, &s, &at(w)).unwrap().abs() < 1e-12 * backaction_psd(&mode, &s, &at(w)).unwrap().sqrt() * mode.zero_point);
        let below = correlation_psd(&mode, &s, &at(0.5 * w)).unwrap();
        let above = correlation_psd(&mode, &s, &at(1.5 * w)).unwrap();
        assert!(below * above < 0.0);
        let flat = input_spectra_relative(0.5, 1.0, 0.0);
        assert_eq!(correlation_psd(&mode, &flat, &at(0.5 * w)).unwrap(), 0.0);
        let undamped = mode.with_damping(0.0).unwrap();
        let chi0 = Susceptibility::for_mode(&undamped, 0.5 * w).unwrap();
        assert!(backaction_psd(&undamped, &s, &chi0).is_err());
    }

    #[test]
    fn covariance_examples() {
        let v = interacting_covariance(&InputSpectra::VACUUM).unwrap();
        assert_eq!((v.xx, v.xy, v.yy), (1.0, 0.0, 1.0));
        assert!((v.wigner(0.0, 0.0) - 1.0 / (2.0 * PI)).abs() < 1e-16);
        let b = bare_mode_covariance(1.2, 0.0).unwrap();
        assert!((b.xx - 2.4f64.exp()).abs() < 1e-12 && (b.yy - (-2.4f64).exp()).abs() < 1e-15);
        assert!(Covariance::new(1.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn wigner_grid_normalized() {
        let c = bare_mode_covariance(0.5, 0.0).unwrap();
        let (t, integral) = wigner_grid(&c, 161, 161, 8.0).unwrap();
        assert_eq!(t.rows.len(), 161 * 161);
        assert!((integral - 1.0).abs() < 1e-6, "{integral}");
    }
}
