//! Trap parameters: polarizabilities, mechanical frequencies, zero-point
//! amplitudes and bare recoil heating rates, all in SI units.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angular::Axis;
use crate::constants::{C, EPSILON_0, HBAR, TWO_PI_CUBED};
use crate::{Error, Result};

/// Relative damping used when none is supplied.
pub const DEFAULT_DAMPING_RATIO: f64 = 1e-6;

/// `l_μ = (1, 2, 7)·e_μ / 5`.
pub fn geometry_factor(axis: Axis) -> f64 {
    match axis {
        Axis::X => 0.2,
        Axis::Y => 0.4,
        Axis::Z => 1.4,
    }
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("{v} must be positive and finite")))
    }
}

/// Homogeneous dielectric sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Particle {
    /// m
    pub radius: f64,
    /// kg/m³
    pub density: f64,
    pub permittivity: f64,
}

impl Particle {
    /// Silica with a 70 nm radius. A convenience default, not a fitted value.
    pub fn silica() -> Self {
        Particle {
            radius: 70e-9,
            density: 2200.0,
            permittivity: 2.1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        positive("particle.radius", self.radius)?;
        positive("particle.density", self.density)?;
        if !(self.permittivity.is_finite() && self.permittivity > 1.0) {
            return Err(Error::invalid(
                "particle.permittivity",
                format!("{} must exceed 1", self.permittivity),
            ));
        }
        Ok(())
    }

    pub fn volume(&self) -> f64 {
        4.0 / 3.0 * PI * self.radius.powi(3)
    }

    pub fn mass(&self) -> f64 {
        self.density * self.volume()
    }

    fn clausius_mossotti(&self) -> f64 {
        (self.permittivity - 1.0) / (self.permittivity + 2.0)
    }

    /// `α = 3ε0 V (ε−1)/(ε+2)`.
    pub fn polarizability(&self) -> f64 {
        3.0 * EPSILON_0 * self.volume() * self.clausius_mossotti()
    }
}

/// Anisotropic rotor described by its polarizability eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rotor {
    /// F·m²
    pub alpha_parallel: f64,
    /// F·m²
    pub alpha_perp: f64,
    /// kg·m²
    pub moment_of_inertia: f64,
    pub permittivity: f64,
    /// m³
    pub volume: f64,
}

impl Rotor {
    /// Two touching silica spheres of 85 nm radius with a 10% anisotropy in
    /// polarizability. A convenience default, not a fitted value.
    pub fn silica_dumbbell() -> Self {
        let sphere = Particle {
            radius: 85e-9,
            ..Particle::silica()
        };
        let a = 2.0 * sphere.polarizability();
        let m = sphere.mass();
        let r2 = sphere.radius * sphere.radius;
        Rotor {
            alpha_parallel: 1.1 * a,
            alpha_perp: a,
            moment_of_inertia: 2.0 * (0.4 * m * r2 + m * r2),
            permittivity: sphere.permittivity,
            volume: 2.0 * sphere.volume(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        positive("rotor.alpha_perp", self.alpha_perp)?;
        positive("rotor.alpha_parallel", self.alpha_parallel)?;
        positive("rotor.moment_of_inertia", self.moment_of_inertia)?;
        positive("rotor.volume", self.volume)?;
        if !(self.permittivity.is_finite() && self.permittivity > 1.0) {
            return Err(Error::invalid("rotor.permittivity", "must exceed 1"));
        }
        if self.delta_alpha() <= 0.0 {
            return Err(Error::invalid(
                "rotor.alpha_parallel",
                "must exceed alpha_perp (Δα ≤ 0 has no libration)",
            ));
        }
        Ok(())
    }

    pub fn delta_alpha(&self) -> f64 {
        self.alpha_parallel - self.alpha_perp
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Laser {
    /// W
    pub power: f64,
    /// m
    pub waist: f64,
    /// m
    pub wavelength: f64,
    /// Phase of α0 in radians; cancels in every observable.
    #[serde(default)]
    pub arg_alpha0: f64,
}

impl Default for Laser {
    fn default() -> Self {
        Laser {
            power: 0.5,
            waist: 0.7e-6,
            wavelength: 1064e-9,
            arg_alpha0: 0.0,
        }
    }
}

impl Laser {
    pub fn validate(&self) -> Result<()> {
        if !(self.power.is_finite() && self.power >= 0.0) {
            return Err(Error::invalid("laser.power", "must be non-negative"));
        }
        positive("laser.waist", self.waist)?;
        positive("laser.wavelength", self.wavelength)?;
        if !self.arg_alpha0.is_finite() {
            return Err(Error::invalid("laser.arg_alpha0", "not finite"));
        }
        if self.is_non_paraxial() {
            log::warn!(
                "waist {} m is below half the wavelength; paraxial trap frequencies are unreliable",
                self.waist
            );
        }
        Ok(())
    }

    pub fn is_non_paraxial(&self) -> bool {
        self.waist < 0.5 * self.wavelength
    }

    pub fn omega0(&self) -> f64 {
        2.0 * PI * C / self.wavelength
    }

    pub fn k0(&self) -> f64 {
        2.0 * PI / self.wavelength
    }
}

/// Coherent amplitude of the trapping field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Alpha0 {
    pub modulus_sq: f64,
    pub value: Complex64,
}

/// `|α0|² = 16π² P / (ħ c² k0 W²)`.
pub fn derive_alpha0(laser: &Laser) -> Alpha0 {
    let modulus_sq = 16.0 * PI * PI * laser.power / (HBAR * C * C * laser.k0() * laser.waist.powi(2));
    Alpha0 {
        modulus_sq,
        value: Complex64::from_polar(modulus_sq.sqrt(), laser.arg_alpha0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", content = "axis", rename_all = "lowercase")]
pub enum ModeKind {
    Motion(Axis),
    Libration(Axis),
}

impl ModeKind {
    pub fn axis(self) -> Axis {
        match self {
            ModeKind::Motion(a) | ModeKind::Libration(a) => a,
        }
    }
}

impl std::fmt::Display for ModeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModeKind::Motion(a) => write!(f, "motion-{a}"),
            ModeKind::Libration(a) => write!(f, "libration-{a}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MechanicalMode {
    pub kind: ModeKind,
    /// Ω, rad/s
    pub frequency: f64,
    /// r_0 in m (motion) or rad (libration)
    pub zero_point: f64,
    /// γ, rad/s
    pub damping: f64,
    /// Γ^(0), 1/s
    pub bare_recoil: f64,
    /// l_μ, motion only
    pub geometry_factor: Option<f64>,
}

impl MechanicalMode {
    pub fn with_damping(mut self, damping: f64) -> Result<Self> {
        if !(damping.is_finite() && damping >= 0.0) {
            return Err(Error::invalid("damping", "must be non-negative"));
        }
        self.damping = damping;
        Ok(self)
    }

    /// `u = 4Γ^(0)/Ω`, the natural measurement strength of the trap.
    pub fn measurement_strength(&self) -> f64 {
        4.0 * self.bare_recoil / self.frequency
    }
}

/// `Ω_x = Ω_y = sqrt[(ε−1)/(ε+2)·12P/(πcρW⁴)]`, `Ω_z = Ω_x λ0/(√2 π W)`.
pub fn motion_frequencies(p: &Particle, l: &Laser) -> [f64; 3] {
    let wx = (p.clausius_mossotti() * 12.0 * l.power / (PI * C * p.density * l.waist.powi(4))).sqrt();
    let wz = wx * l.wavelength / (2f64.sqrt() * PI * l.waist);
    [wx, wx, wz]
}

pub fn derive_motion_modes(p: &Particle, l: &Laser) -> Result<[MechanicalMode; 3]> {
    p.validate()?;
    l.validate()?;
    let freqs = motion_frequencies(p, l);
    let m = p.mass();
    let modes = Axis::ALL.map(|axis| {
        let omega = freqs[axis.index()];
        let mut mode = MechanicalMode {
            kind: ModeKind::Motion(axis),
            frequency: omega,
            zero_point: (HBAR / (2.0 * m * omega)).sqrt(),
            damping: DEFAULT_DAMPING_RATIO * omega,
            bare_recoil: 0.0,
            geometry_factor: Some(geometry_factor(axis)),
        };
        mode.bare_recoil = recoil_bare(&mode, p, l);
        mode
    });
    if modes.iter().any(|m| !(m.frequency > 0.0)) {
        return Err(Error::invalid("laser.power", "trap frequency vanishes"));
    }
    Ok(modes)
}

/// `Γ^(0) = (2π/c)|α0|²[α/(2ε0(2π)³)]² ω0² r_0² (8πk0⁴/3) l_μ`.
pub fn recoil_bare(mode: &MechanicalMode, p: &Particle, l: &Laser) -> f64 {
    let a0 = derive_alpha0(l).modulus_sq;
    let coupling = p.polarizability() / (2.0 * EPSILON_0 * TWO_PI_CUBED);
    let lmu = geometry_factor(mode.kind.axis());
    2.0 * PI / C
        * a0
        * coupling
        * coupling
        * l.omega0().powi(2)
        * mode.zero_point.powi(2)
        * (8.0 * PI * l.k0().powi(4) / 3.0)
        * lmu
}

/// `Ω = sqrt[Δα/I · ħω0|α0|²/(ε0(2π)³)]`.
pub fn libration_frequency(r: &Rotor, l: &Laser) -> f64 {
    let a0 = derive_alpha0(l).modulus_sq;
    (r.delta_alpha() / r.moment_of_inertia * HBAR * l.omega0() * a0 / (EPSILON_0 * TWO_PI_CUBED)).sqrt()
}

fn libration_core(r: &Rotor, l: &Laser, r0: f64) -> f64 {
    let a0 = derive_alpha0(l).modulus_sq;
    let coupling = r.delta_alpha() / (2.0 * EPSILON_0 * TWO_PI_CUBED);
    a0 * coupling * coupling * (8.0 * PI * l.k0().powi(2) / 3.0) * r0 * r0 * l.omega0().powi(2)
}

/// `Γ^(0) = V/(4π²c)|α0|²(Δα/(2ε0(2π)³))²(8πk0²/3) r_0² ω0²`, the closed
/// form as published. It carries an extra factor of volume relative to a
/// rate; see [`libration_recoil_from_coupling`].
pub fn libration_recoil_published(r: &Rotor, l: &Laser, r0: f64) -> f64 {
    r.volume / (4.0 * PI * PI * C) * libration_core(r, l, r0)
}

/// Same rate with the `2π/c` prefactor of the translational formula, which
/// is what the rotational coupling and the dipole normalization give.
pub fn libration_recoil_from_coupling(r: &Rotor, l: &Laser, r0: f64) -> f64 {
    2.0 * PI / C * libration_core(r, l, r0)
}

/// Libration about `y` or `z`. Both share Ω and Γ^(0).
pub fn derive_libration_mode(r: &Rotor, l: &Laser, axis: Axis) -> Result<MechanicalMode> {
    if axis == Axis::X {
        return Err(Error::invalid("axis", "libration is defined about y or z"));
    }
    r.validate()?;
    l.validate()?;
    let omega = libration_frequency(r, l);
    if !(omega > 0.0) {
        return Err(Error::invalid("laser.power", "libration frequency vanishes"));
    }
    let r0 = (HBAR / (2.0 * r.moment_of_inertia * omega)).sqrt();
    Ok(MechanicalMode {
        kind: ModeKind::Libration(axis),
        frequency: omega,
        zero_point: r0,
        damping: DEFAULT_DAMPING_RATIO * omega,
        bare_recoil: libration_recoil_published(r, l, r0),
        geometry_factor: None,
    })
}

/// Every intermediate of a derivation, for the JSON report.
#[derive(Debug, Clone, Serialize)]
pub struct DerivedReport {
    pub omega0: f64,
    pub k0: f64,
    pub alpha0_modulus_sq: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub polarizability: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_alpha: Option<f64>,
    pub volume: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mass: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub moment_of_inertia: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub libration_recoil_from_coupling: Option<f64>,
    pub non_paraxial: bool,
    pub modes: Vec<MechanicalMode>,
}

impl DerivedReport {
    pub fn for_particle(p: &Particle, l: &Laser) -> Result<Self> {
        let modes = derive_motion_modes(p, l)?;
        Ok(DerivedReport {
            omega0: l.omega0(),
            k0: l.k0(),
            alpha0_modulus_sq: derive_alpha0(l).modulus_sq,
            polarizability: Some(p.polarizability()),
            delta_alpha: None,
            volume: p.volume(),
            mass: Some(p.mass()),
            moment_of_inertia: None,
            libration_recoil_from_coupling: None,
            non_paraxial: l.is_non_paraxial(),
            modes: modes.to_vec(),
        })
    }

    pub fn for_rotor(r: &Rotor, l: &Laser) -> Result<Self> {
        let y = derive_libration_mode(r, l, Axis::Y)?;
        let z = derive_libration_mode(r, l, Axis::Z)?;
        Ok(DerivedReport {
            omega0: l.omega0(),
            k0: l.k0(),
            alpha0_modulus_sq: derive_alpha0(l).modulus_sq,
            polarizability: None,
            delta_alpha: Some(r.delta_alpha()),
            volume: r.volume,
            mass: None,
            moment_of_inertia: Some(r.moment_of_inertia),
            libration_recoil_from_coupling: Some(libration_recoil_from_coupling(r, l, y.zero_point)),
            non_paraxial: l.is_non_paraxial(),
            modes: vec![y, z],
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn alpha0_is_linear_in_power() {
        let l = Laser::default();
        let l2 = Laser { power: 2.0 * l.power, ..l };
        assert!(rel(derive_alpha0(&l2).modulus_sq, 2.0 * derive_alpha0(&l).modulus_sq) < 1e-15);
        let l0 = Laser { power: 0.0, ..l };
        assert_eq!(derive_alpha0(&l0).modulus_sq, 0.0);
    }

    #[test]
    fn alpha0_phase_follows_config() {
        let l = Laser {
            arg_alpha0: 0.3,
            ..Laser::default()
        };
        assert!((derive_alpha0(&l).value.arg() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn motion_frequency_ratio() {
        let p = Particle::silica();
        let l = Laser::default();
        let m = derive_motion_modes(&p, &l).unwrap();
        let expected = 2f64.sqrt() * PI * l.waist / l.wavelength;
        assert!(rel(m[0].frequency / m[2].frequency, expected) < 1e-14);
        assert_eq!(m[0].frequency, m[1].frequency);
    }

    #[test]
    fn recoil_ratios_follow_geometry() {
        let m = derive_motion_modes(&Particle::silica(), &Laser::default()).unwrap();
        assert!(rel(m[1].bare_recoil / m[0].bare_recoil, 2.0) < 1e-14);
        assert!(rel(geometry_factor(Axis::Z) / geometry_factor(Axis::X), 7.0) < 1e-15);
    }

    #[test]
    fn zero_point_invariant() {
        let p = Particle::silica();
        for m in derive_motion_modes(&p, &Laser::default()).unwrap() {
            assert!(rel(m.zero_point.powi(2) * 2.0 * p.mass() * m.frequency, HBAR) < 1e-12);
        }
    }

    #[test]
    fn libration_modes_agree() {
        let r = Rotor::silica_dumbbell();
        let l = Laser::default();
        let y = derive_libration_mode(&r, &l, Axis::Y).unwrap();
        let z = derive_libration_mode(&r, &l, Axis::Z).unwrap();
        assert_eq!(y.frequency, z.frequency);
        assert_eq!(y.bare_recoil, z.bare_recoil);
        assert!(derive_libration_mode(&r, &l, Axis::X).is_err());
        assert!(rel(y.zero_point.powi(2) * 2.0 * r.moment_of_inertia * y.frequency, HBAR) < 1e-12);
    }

    #[test]
    fn libration_requires_anisotropy() {
        let r = Rotor {
            alpha_parallel: 1e-32,
            alpha_perp: 1e-32,
            ..Rotor::silica_dumbbell()
        };
        assert!(derive_libration_mode(&r, &Laser::default(), Axis::Y).is_err());
    }

    #[test]
    fn rejects_invalid_particle() {
        let bad = Particle {
            permittivity: 0.9,
            ..Particle::silica()
        };
        assert!(derive_motion_modes(&bad, &Laser::default()).is_err());
    }

    #[test]
    fn silica_frequency_in_expected_band() {
        let m = derive_motion_modes(&Particle::silica(), &Laser::default()).unwrap();
        let fx_khz = m[0].frequency / (2.0 * PI) / 1e3;
        assert!((100.0..1000.0).contains(&fx_khz), "{fx_khz}");
    }

    #[test]
    fn paraxial_flag() {
        let l = Laser {
            waist: 0.4e-6,
            ..Laser::default()
        };
        assert!(l.is_non_paraxial());
        assert!(!Laser::default().is_non_paraxial());
    }
}
