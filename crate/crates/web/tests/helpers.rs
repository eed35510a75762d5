use std::f64::consts::PI;

use levsqueeze::squeeze::{db_to_r, recoil_ratio_relative};
use levsqueeze_web::{irp_slice_values, overlap_modulus, recoil_curve_rows, wigner_values};

#[test]
fn curve_spans_squeezed_and_antisqueezed_extremes() {
    let rows = recoil_curve_rows(0.9, 15.0, 41).unwrap();
    assert_eq!(rows.len(), 41);
    assert_eq!(rows[0][0], 0.0);
    assert!((rows[40][0] - 2.0 * PI).abs() < 1e-15);
    let r = db_to_r(15.0).unwrap();
    assert!((rows[0][1] - (-2.0 * r).exp()).abs() < 1e-14);
    assert!((rows[20][1] - (2.0 * r).exp()).abs() < 1e-9);
    let x = overlap_modulus(0.9).unwrap().powi(2);
    for row in &rows {
        assert!((row[2] - recoil_ratio_relative(x, r, row[0])).abs() < 1e-14);
    }
}

#[test]
fn slice_is_mirror_symmetric_and_bare_pattern_vanishes_forward() {
    let n = 73;
    let v = irp_slice_values(0.9, 10.0, 0.0, n).unwrap();
    for i in 0..n {
        assert!((v[i] - v[n - 1 - i]).abs() < 1e-12, "{i}");
        assert!(v[i].is_finite());
    }
    let bare = irp_slice_values(0.9, 0.0, 0.0, n).unwrap();
    assert!(bare[0].abs() < 1e-15);
    let back = bare[(n - 1) / 2];
    assert!(bare.iter().all(|x| *x <= back * (1.0 + 1e-12)));
}

#[test]
fn wigner_grid_has_requested_shape() {
    let (v, hx, hy) = wigner_values(0.8, 6.0, 0.0, 31).unwrap();
    assert_eq!(v.len(), 31 * 31);
    let dx = 2.0 * hx / 30.0;
    let dy = 2.0 * hy / 30.0;
    let sum: f64 = v.iter().sum::<f64>() * dx * dy;
    assert!((sum - 1.0).abs() < 1e-2, "{sum}");
    assert!(v[15 * 31 + 15] >= *v.iter().max_by(|a, b| a.total_cmp(b)).unwrap() - 1e-15);
}

#[test]
fn bad_inputs_are_errors() {
    assert!(recoil_curve_rows(0.9, -1.0, 10).is_err());
    assert!(recoil_curve_rows(1.5, 3.0, 10).is_err());
    assert!(irp_slice_values(0.9, 3.0, 0.0, 1).is_err());
    assert!(wigner_values(1.2, 3.0, 0.0, 10).is_err());
}

#[test]
fn single_point_matches_curve() {
    let rows = levsqueeze_web::recoil_curve_rows(0.7, 8.0, 9).unwrap();
    for row in rows {
        assert_eq!(levsqueeze_web::recoil_at(0.7, 8.0, row[0]).unwrap(), row[2]);
    }
}
