//! Angular and polarization distributions on the unit sphere.
//!
//! Every distribution is stored as a transverse complex vector field `v(e_k)`
//! so that its amplitude for polarization `ε` is `v · ε`. Sums over the two
//! transverse polarizations are then basis independent, which lets the
//! quadrature run in whatever frame resolves the integrand best (the frame
//! of a beam's propagation axis, typically).

mod distribution;
mod quadrature;

pub use distribution::{
    inner_product, inner_product_with, quadrature_rule_for, BeamSpec, make_gaussian_beam, make_gaussian_beam_with,
    make_libration_distribution, make_motion_distribution, make_dipole_distribution, overlap,
    overlap_with, AngularDistribution, DistributionKind, Metadata,
};
pub use quadrature::{gauss_legendre, integrate_sphere, pairwise_sum, QuadSpec, QuadratureNode, QuadratureRule};

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub type Vec3 = [f64; 3];
pub type CVec3 = [Complex64; 3];

#[inline]
pub fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn scale(a: &Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub fn normalize(a: &Vec3) -> Option<Vec3> {
    let n = norm(a);
    (n.is_finite() && n > 1e-300).then(|| scale(a, 1.0 / n))
}

/// Component of `v` transverse to the unit vector `k`.
#[inline]
pub fn transverse(v: &Vec3, k: &Vec3) -> Vec3 {
    let p = dot(v, k);
    [v[0] - p * k[0], v[1] - p * k[1], v[2] - p * k[2]]
}

#[inline]
pub(crate) fn cdot_real(v: &CVec3, e: &Vec3) -> Complex64 {
    v[0] * e[0] + v[1] * e[1] + v[2] * e[2]
}

/// Cartesian laboratory axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn unit(self) -> Vec3 {
        match self {
            Axis::X => [1.0, 0.0, 0.0],
            Axis::Y => [0.0, 1.0, 0.0],
            Axis::Z => [0.0, 0.0, 1.0],
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        })
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "x" => Ok(Axis::X),
            "y" => Ok(Axis::Y),
            "z" => Ok(Axis::Z),
            other => Err(Error::invalid("axis", format!("expected x, y or z, got `{other}`"))),
        }
    }
}

/// Parses `z`, `-z`, `+x` or an explicit `a;b;c` triple into a unit vector.
pub fn parse_direction(s: &str) -> Result<Vec3> {
    let t = s.trim();
    let (sign, rest) = match t.strip_prefix('-') {
        Some(r) => (-1.0, r),
        None => (1.0, t.strip_prefix('+').unwrap_or(t)),
    };
    if let Ok(axis) = rest.parse::<Axis>() {
        return Ok(scale(&axis.unit(), sign));
    }
    let parts: Vec<f64> = t
        .split(';')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::invalid("axis", format!("cannot parse direction `{s}`")))?;
    if parts.len() != 3 {
        return Err(Error::invalid("axis", format!("cannot parse direction `{s}`")));
    }
    normalize(&[parts[0], parts[1], parts[2]])
        .ok_or_else(|| Error::invalid("axis", "zero-length direction vector"))
}

/// One of the two transverse polarizations of the spherical basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarization {
    Theta,
    Phi,
}

impl Polarization {
    pub const BOTH: [Polarization; 2] = [Polarization::Theta, Polarization::Phi];
}

/// A propagation direction given by its spherical angles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    pub theta: f64,
    pub phi: f64,
}

impl Direction {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::invalid("theta", format!("{theta} outside [0, π]")));
        }
        if !phi.is_finite() {
            return Err(Error::invalid("phi", "not finite"));
        }
        Ok(Direction {
            theta,
            phi: phi.rem_euclid(2.0 * PI),
        })
    }

    pub fn from_unit(v: &Vec3) -> Self {
        let theta = v[2].clamp(-1.0, 1.0).acos();
        let phi = v[1].atan2(v[0]).rem_euclid(2.0 * PI);
        Direction { theta, phi }
    }

    pub fn unit(&self) -> Vec3 {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    pub fn basis(&self) -> PolarizationBasis {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        PolarizationBasis {
            e_theta: [ct * cp, ct * sp, -st],
            e_phi: [-sp, cp, 0.0],
        }
    }
}

/// Polar and azimuthal unit vectors at a direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationBasis {
    pub e_theta: Vec3,
    pub e_phi: Vec3,
}

impl PolarizationBasis {
    pub fn vector(&self, pol: Polarization) -> &Vec3 {
        match pol {
            Polarization::Theta => &self.e_theta,
            Polarization::Phi => &self.e_phi,
        }
    }
}
