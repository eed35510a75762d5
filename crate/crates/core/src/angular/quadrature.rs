//! Product quadrature on the sphere: Gauss–Legendre in cos θ, trapezoid in φ.
//!
//! The polar variable is measured from an arbitrary pole, and the cos θ
//! range can be split at break points so that a discontinuity along a
//! latitude (a hemisphere cut) falls on a sub-interval boundary instead of
//! between two nodes.

use std::f64::consts::PI;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{cross, dot, normalize, Direction, Polarization, PolarizationBasis, Vec3};
use crate::{Error, Result};

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[a, b]`,
/// ascending.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "Gauss-Legendre rule needs at least one node");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n.
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        dp = if d.is_finite() { d } else { dp };
        let weight = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = weight;
        w[n - 1 - i] = weight;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    for (xi, wi) in x.iter_mut().zip(w.iter_mut()) {
        *xi = mid + half * *xi;
        *wi *= half;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let (pn, pnm1) = if n == 1 { (z, 1.0) } else { (p1, p0) };
    let d = n as f64 * (z * pn - pnm1) / (z * z - 1.0);
    (pn, d)
}

/// Fixed-order pairwise summation. The reduction tree depends only on the
/// slice length, so results are bit-identical for any thread count.
pub fn pairwise_sum<T>(values: &[T]) -> T
where
    T: Copy + Add<Output = T> + Default,
{
    const BLOCK: usize = 16;
    if values.len() <= BLOCK {
        return values.iter().fold(T::default(), |acc, &v| acc + v);
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Node counts of a product rule: `n_theta` Gauss–Legendre nodes per cos θ
/// sub-interval and `n_phi` equispaced azimuths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadSpec {
    pub n_theta: usize,
    pub n_phi: usize,
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec {
            n_theta: 64,
            n_phi: 128,
        }
    }
}

impl QuadSpec {
    pub fn new(n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta < 2 || n_phi < 2 {
            return Err(Error::invalid(
                "quad",
                format!("need at least 2x2 nodes, got {n_theta}x{n_phi}"),
            ));
        }
        Ok(QuadSpec { n_theta, n_phi })
    }

    pub fn doubled(self) -> Self {
        QuadSpec {
            n_theta: 2 * self.n_theta,
            n_phi: 2 * self.n_phi,
        }
    }
}

impl fmt::Display for QuadSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.n_theta, self.n_phi)
    }
}

impl FromStr for QuadSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::invalid("quad", format!("expected NTHETAxNPHI, got `{s}`"));
        let (a, b) = s.trim().split_once(['x', 'X']).ok_or_else(bad)?;
        let n_theta = a.trim().parse().map_err(|_| bad())?;
        let n_phi = b.trim().parse().map_err(|_| bad())?;
        QuadSpec::new(n_theta, n_phi)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadratureNode {
    /// Laboratory spherical angles of the node.
    pub direction: Direction,
    pub unit: Vec3,
    pub basis: PolarizationBasis,
    pub weight: f64,
}

#[derive(Debug, Clone)]
pub struct QuadratureRule {
    spec: QuadSpec,
    pole: Vec3,
    breaks: Vec<f64>,
    nodes: Vec<QuadratureNode>,
}

impl QuadratureRule {
    /// Laboratory-frame rule with the pole along `e_z` and no splits.
    pub fn new(spec: QuadSpec) -> Self {
        Self::oriented(spec, [0.0, 0.0, 1.0], &[])
    }

    /// Rule whose polar angle is measured from `pole`, with the cos θ range
    /// split at every value in `breaks` (values outside (-1, 1) are ignored).
    pub fn oriented(spec: QuadSpec, pole: Vec3, breaks: &[f64]) -> Self {
        let pole = normalize(&pole).unwrap_or([0.0, 0.0, 1.0]);
        let mut cuts: Vec<f64> = breaks
            .iter()
            .copied()
            .filter(|b| b.is_finite() && *b > -1.0 + 1e-12 && *b < 1.0 - 1e-12)
            .collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

        let (u, v) = transverse_frame(&pole);
        let mut edges = Vec::with_capacity(cuts.len() + 2);
        edges.push(-1.0);
        edges.extend_from_slice(&cuts);
        edges.push(1.0);

        let dphi = 2.0 * PI / spec.n_phi as f64;
        let azimuths: Vec<(f64, f64)> = (0..spec.n_phi)
            .map(|j| (j as f64 * dphi).sin_cos())
            .collect();
        let mut nodes = Vec::with_capacity((edges.len() - 1) * spec.n_theta * spec.n_phi);
        for win in edges.windows(2) {
            let (xs, ws) = gauss_legendre(spec.n_theta, win[0], win[1]);
            for (&c, &wc) in xs.iter().zip(&ws) {
                let s = (1.0 - c * c).max(0.0).sqrt();
                for &(sp, cp) in &azimuths {
                    let unit = [
                        s * cp * u[0] + s * sp * v[0] + c * pole[0],
                        s * cp * u[1] + s * sp * v[1] + c * pole[1],
                        s * cp * u[2] + s * sp * v[2] + c * pole[2],
                    ];
                    let direction = Direction::from_unit(&unit);
                    nodes.push(QuadratureNode {
                        direction,
                        unit: direction.unit(),
                        basis: direction.basis(),
                        weight: wc * dphi,
                    });
                }
            }
        }
        QuadratureRule {
            spec,
            pole,
            breaks: cuts,
            nodes,
        }
    }

    pub fn spec(&self) -> QuadSpec {
        self.spec
    }

    pub fn pole(&self) -> Vec3 {
        self.pole
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn nodes(&self) -> &[QuadratureNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Same orientation and splits at a new resolution.
    pub fn with_spec(&self, spec: QuadSpec) -> Self {
        Self::oriented(spec, self.pole, &self.breaks)
    }

    /// Σ_nodes w · g(node), with a finiteness check on every node value.
    pub(crate) fn sum_nodes<G>(&self, g: G) -> Result<Complex64>
    where
        G: Fn(&QuadratureNode) -> Complex64 + Sync,
    {
        let values: Vec<Complex64> = self
            .nodes
            .par_iter()
            .enumerate()
            .map(|(i, node)| {
                let value = g(node);
                if value.re.is_finite() && value.im.is_finite() {
                    Ok(value * node.weight)
                } else {
                    Err(Error::Numerical(format!(
                        "non-finite integrand at node {i} (theta={}, phi={})",
                        node.direction.theta, node.direction.phi
                    )))
                }
            })
            .collect::<Result<_>>()?;
        Ok(pairwise_sum(&values))
    }
}

/// Orthonormal `(u, v)` spanning the plane transverse to `pole`, with
/// `u` the projection of `e_x` when that is well defined.
pub(crate) fn transverse_frame(pole: &Vec3) -> (Vec3, Vec3) {
    let ex = [1.0, 0.0, 0.0];
    let ey = [0.0, 1.0, 0.0];
    let reference = if dot(&ex, pole).abs() < 0.9 { ex } else { ey };
    let u = normalize(&super::transverse(&reference, pole)).expect("reference not parallel to pole");
    let v = cross(pole, &u);
    (u, v)
}

/// Quadrature of `Σ_pol f(direction, pol)` over the full sphere.
pub fn integrate_sphere<F>(f: F, rule: &QuadratureRule) -> Result<Complex64>
where
    F: Fn(&Direction, Polarization) -> Complex64 + Sync,
{
    rule.sum_nodes(|node| {
        f(&node.direction, Polarization::Theta) + f(&node.direction, Polarization::Phi)
    })
}
