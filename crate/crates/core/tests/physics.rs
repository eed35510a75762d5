mod common;

use std::f64::consts::PI;

use common::richardson;
use levsqueeze::angular::Axis;
use levsqueeze::constants::{C, EPSILON_0, HBAR, TWO_PI_CUBED};
use levsqueeze::physics::{
    derive_alpha0, derive_libration_mode, derive_motion_modes, libration_recoil_from_coupling,
    libration_recoil_published, DerivedReport, Laser, Particle, Rotor,
};
use levsqueeze::squeeze::mode_distribution;
use levsqueeze::Complex64;
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn bare_recoil_from_radiated_power_integral() {
    let p = Particle::silica();
    let l = Laser::default();
    let k0 = 2.0 * PI / l.wavelength;
    let omega0 = C * k0;
    let a0 = 16.0 * PI * PI * l.power / (HBAR * C * C * k0 * l.waist.powi(2));
    let alpha = 3.0 * EPSILON_0 * 4.0 / 3.0 * PI * p.radius.powi(3) * (p.permittivity - 1.0) / (p.permittivity + 2.0);
    for mode in derive_motion_modes(&p, &l).unwrap() {
        let mu = mode.kind.axis().index();
        let angular = richardson(
            &|k: [f64; 3]| {
                let d = k[mu] - if mu == 2 { 1.0 } else { 0.0 };
                Complex64::new(k0.powi(4) * d * d * (1.0 - k[0] * k[0]), 0.0)
            },
            0.0,
            PI,
            512,
            64,
        )
        .re;
        let coupling = alpha / (2.0 * EPSILON_0 * TWO_PI_CUBED);
        let gamma = 2.0 * PI / C * a0 * coupling * coupling * omega0 * omega0 * mode.zero_point.powi(2) * angular;
        assert!(rel(mode.bare_recoil, gamma) < 1e-8, "{}: {} vs {gamma}", mode.kind, mode.bare_recoil);
    }
}

#[test]
fn normalized_distribution_carries_the_prefactor() {
    let p = Particle::silica();
    let l = Laser::default();
    for mode in derive_motion_modes(&p, &l).unwrap() {
        let a = mode_distribution(mode.kind, 0.0).unwrap();
        let k = C.powi(3) * mode.bare_recoil / (2.0 * PI * l.omega0().powi(2));
        let v = richardson(
            &|kk: [f64; 3]| {
                let f = a.field(&kk);
                Complex64::new(f.iter().map(|c| (c * k.sqrt()).norm_sqr()).sum(), 0.0)
            },
            0.0,
            PI,
            512,
            64,
        );
        assert!(rel(v.re, k) < 1e-8);
    }
}

#[test]
fn zero_point_invariant() {
    let p = Particle::silica();
    let l = Laser::default();
    for m in derive_motion_modes(&p, &l).unwrap() {
        assert!(rel(m.zero_point.powi(2) * 2.0 * p.mass() * m.frequency, HBAR) < 1e-12);
    }
    let r = Rotor::silica_dumbbell();
    for axis in [Axis::Y, Axis::Z] {
        let m = derive_libration_mode(&r, &l, axis).unwrap();
        assert!(rel(m.zero_point.powi(2) * 2.0 * r.moment_of_inertia * m.frequency, HBAR) < 1e-12);
    }
}

#[test]
fn trap_frequencies_match_closed_form() {
    let p = Particle::silica();
    let l = Laser::default();
    let cm = (p.permittivity - 1.0) / (p.permittivity + 2.0);
    let wx = (cm * 12.0 * l.power / (PI * C * p.density * l.waist.powi(4))).sqrt();
    let modes = derive_motion_modes(&p, &l).unwrap();
    assert!(rel(modes[0].frequency, wx) < 1e-14);
    assert!(rel(modes[1].frequency, wx) < 1e-14);
    assert!(rel(modes[2].frequency, wx * l.wavelength / (2f64.sqrt() * PI * l.waist)) < 1e-14);
}

#[test]
fn geometry_ratio_is_seven() {
    let modes = derive_motion_modes(&Particle::silica(), &Laser::default()).unwrap();
    let (lx, lz) = (modes[0].geometry_factor.unwrap(), modes[2].geometry_factor.unwrap());
    assert!((lz / lx - 7.0).abs() < 1e-14);
}

#[test]
fn default_rates_are_in_the_kilohertz_decades() {
    let modes = derive_motion_modes(&Particle::silica(), &Laser::default()).unwrap();
    let fz = modes[2].bare_recoil / (2.0 * PI);
    assert!(fz > 1e3 && fz < 1e5, "{fz}");
}

fn gamma_z(p: &Particle, l: &Laser) -> f64 {
    derive_motion_modes(p, l).unwrap()[2].bare_recoil
}

#[test]
fn power_laws_of_the_bare_rate() {
    let p = Particle::silica();
    let l = Laser::default();
    let g = gamma_z(&p, &l);
    let s: f64 = 1.7;
    // Γ ∝ P^{1/2}: |α0|² ∝ P and r_0² ∝ 1/Ω ∝ P^{−1/2}
    let hp = Laser { power: l.power * s, ..l };
    assert!(rel(gamma_z(&p, &hp), g * s.sqrt()) < 1e-12);
    // Γ_z ∝ a³: α² ∝ a⁶, m ∝ a³
    let big = Particle { radius: p.radius * s, ..p };
    assert!(rel(gamma_z(&big, &l), g * s.powi(3)) < 1e-12);
    // Γ_z ∝ W: |α0|² ∝ W⁻², Ω_z ∝ W⁻³; Γ_x does not depend on W
    let wide = Laser { waist: l.waist * s, ..l };
    assert!(rel(gamma_z(&p, &wide), g * s) < 1e-12);
    let gx = derive_motion_modes(&p, &l).unwrap()[0].bare_recoil;
    assert!(rel(derive_motion_modes(&p, &wide).unwrap()[0].bare_recoil, gx) < 1e-12);
    // Γ ∝ ρ^{-1/2}: m ∝ ρ, Ω ∝ ρ^{-1/2}
    let dense = Particle { density: p.density * s, ..p };
    assert!(rel(gamma_z(&dense, &l), g / s.sqrt()) < 1e-12);
}

#[test]
fn rescaling_every_length_rescales_rates() {
    // λ, W, a → s·(λ, W, a): Ω ∝ s⁻², |α0|² ∝ s⁻¹, r_0² ∝ s⁻¹, Γ ∝ s⁻²
    let p = Particle::silica();
    let l = Laser::default();
    let s: f64 = 2.3;
    let q = Particle { radius: p.radius * s, ..p };
    let m = Laser { wavelength: l.wavelength * s, waist: l.waist * s, ..l };
    assert!(rel(derive_alpha0(&m).modulus_sq, derive_alpha0(&l).modulus_sq / s) < 1e-12);
    let (a, b) = (derive_motion_modes(&p, &l).unwrap(), derive_motion_modes(&q, &m).unwrap());
    for i in 0..3 {
        assert!(rel(b[i].frequency, a[i].frequency / (s * s)) < 1e-12);
        assert!(rel(b[i].zero_point.powi(2), a[i].zero_point.powi(2) / s) < 1e-12);
        assert!(rel(b[i].bare_recoil, a[i].bare_recoil / (s * s)) < 1e-12);
    }
}

#[test]
fn doubled_volume_follows_closed_form() {
    let p = Particle::silica();
    let l = Laser::default();
    let q = Particle { radius: p.radius * 2f64.cbrt(), ..p };
    assert!(rel(q.polarizability(), 2.0 * p.polarizability()) < 1e-12);
    assert!(rel(q.mass(), 2.0 * p.mass()) < 1e-12);
    let (a, b) = (derive_motion_modes(&p, &l).unwrap(), derive_motion_modes(&q, &l).unwrap());
    for i in 0..3 {
        assert!(rel(b[i].frequency, a[i].frequency) < 1e-12);
        assert!(rel(b[i].zero_point.powi(2), a[i].zero_point.powi(2) / 2.0) < 1e-12);
        assert!(rel(b[i].bare_recoil, 2.0 * a[i].bare_recoil) < 1e-12);
    }
}

#[test]
fn libration_rate_forms_differ_by_volume() {
    let r = Rotor::silica_dumbbell();
    let l = Laser::default();
    let m = derive_libration_mode(&r, &l, Axis::Y).unwrap();
    let published = libration_recoil_published(&r, &l, m.zero_point);
    let coupled = libration_recoil_from_coupling(&r, &l, m.zero_point);
    assert_eq!(published, m.bare_recoil);
    assert!(rel(published / coupled, r.volume / (8.0 * PI.powi(3))) < 1e-12);
    // the published form grows with the rotor volume at fixed polarizabilities
    let bigger = Rotor { volume: r.volume * 3.0, ..r };
    assert!(rel(libration_recoil_published(&bigger, &l, m.zero_point), 3.0 * published) < 1e-12);
}

#[test]
fn libration_frequency_closed_form() {
    let r = Rotor::silica_dumbbell();
    let l = Laser::default();
    let m = derive_libration_mode(&r, &l, Axis::Z).unwrap();
    let a0 = derive_alpha0(&l).modulus_sq;
    let da = r.alpha_parallel - r.alpha_perp;
    let want = (da / r.moment_of_inertia * HBAR * l.omega0() * a0 / (EPSILON_0 * TWO_PI_CUBED)).sqrt();
    assert!(rel(m.frequency, want) < 1e-14);
}

#[test]
fn report_echoes_intermediates() {
    let p = Particle::silica();
    let l = Laser::default();
    let rep = DerivedReport::for_particle(&p, &l).unwrap();
    let v = serde_json::to_value(&rep).unwrap();
    for key in ["omega0", "k0", "alpha0_modulus_sq", "polarizability", "volume", "mass", "modes"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert_eq!(rep.modes.len(), 3);
    let rot = DerivedReport::for_rotor(&Rotor::silica_dumbbell(), &l).unwrap();
    assert!(rot.delta_alpha.unwrap() > 0.0 && rot.moment_of_inertia.is_some());
}

proptest! {
    #[test]
    fn derived_rates_are_positive(
        radius in 1e-8f64..1e-6,
        density in 500.0f64..2e4,
        eps in 1.1f64..10.0,
        power in 1e-3f64..2.0,
        waist in 6e-7f64..5e-6,
    ) {
        let p = Particle { radius, density, permittivity: eps };
        let l = Laser { power, waist, ..Laser::default() };
        for m in derive_motion_modes(&p, &l).unwrap() {
            prop_assert!(m.frequency > 0.0 && m.bare_recoil > 0.0 && m.zero_point > 0.0 && m.damping >= 0.0);
        }
    }

    #[test]
    fn invalid_particles_rejected(radius in -1e-6f64..0.0) {
        let p = Particle { radius, ..Particle::silica() };
        prop_assert!(derive_motion_modes(&p, &Laser::default()).is_err());
    }
}
