//! Dense midpoint quadrature used as an independent oracle.

#![allow(dead_code)]

use std::f64::consts::PI;

use levsqueeze::Complex64;

/// Midpoint rule over `θ ∈ [a, b]`, `φ ∈ [0, 2π)` with `n_t × n_p` cells.
pub fn midpoint<F>(f: &F, a: f64, b: f64, n_t: usize, n_p: usize) -> Complex64
where
    F: Fn([f64; 3]) -> Complex64,
{
    let ht = (b - a) / n_t as f64;
    let hp = 2.0 * PI / n_p as f64;
    let mut total = Complex64::new(0.0, 0.0);
    for i in 0..n_t {
        let th = a + (i as f64 + 0.5) * ht;
        let (st, ct) = th.sin_cos();
        let mut ring = Complex64::new(0.0, 0.0);
        for j in 0..n_p {
            let ph = (j as f64 + 0.5) * hp;
            ring += f([st * ph.cos(), st * ph.sin(), ct]);
        }
        total += ring * st;
    }
    total * ht * hp
}

/// Midpoint rule at `n_t` and `2 n_t` θ-cells combined by Richardson
/// extrapolation. The integrand must be smooth on `[a, b]`.
pub fn richardson<F>(f: &F, a: f64, b: f64, n_t: usize, n_p: usize) -> Complex64
where
    F: Fn([f64; 3]) -> Complex64,
{
    let coarse = midpoint(f, a, b, n_t, n_p);
    let fine = midpoint(f, a, b, 2 * n_t, n_p);
    (fine * 4.0 - coarse) / 3.0
}

/// `∫ Σ_pol a·b*` for transverse fields.
pub fn field_product(a: [Complex64; 3], b: [Complex64; 3]) -> Complex64 {
    a[0] * b[0].conj() + a[1] * b[1].conj() + a[2] * b[2].conj()
}

/// `∫ Σ_pol a·b` without conjugation.
pub fn field_product_plain(a: [Complex64; 3], b: [Complex64; 3]) -> Complex64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}
