//! The minimizing sequence whose limit is not a planar curve.

use approx::assert_relative_eq;
use sr_elastica::nonexistence::{build_pn, build_qbar, check_d1, convergence_table, XI_DEFAULT, XI_MAX};
use sr_elastica::Error;

#[test]
fn cost_of_the_limit_is_twice_xi() {
    for xi in [0.005, 0.01, XI_DEFAULT, XI_MAX] {
        let qbar = build_qbar(xi).unwrap();
        let table = convergence_table(&qbar, &[10]).unwrap();
        assert_relative_eq!(table.c_qbar, 2.0 * xi, max_relative = 1e-8);
    }
}

#[test]
fn gaps_shrink_to_zero() {
    let qbar = build_qbar(XI_DEFAULT).unwrap();
    let table = convergence_table(&qbar, &[1, 3, 10, 30, 100, 300, 1000]).unwrap();
    assert!(table.gaps_positive_and_decreasing());
    assert!(table.rows.windows(2).all(|w| w[1].max_distance <= w[0].max_distance));
    for r in &table.rows {
        assert!(r.sandwich, "n = {}", r.n);
        assert!((r.tail_j - r.tail_c).abs() < 1e-8, "n = {}", r.n);
        assert!(r.d1.admissible, "n = {}: {:?}", r.n, r.d1);
    }
}

#[test]
fn every_member_starts_and_ends_correctly() {
    let qbar = build_qbar(XI_DEFAULT).unwrap();
    let bc = qbar.boundary_conditions().unwrap();
    for n in [1, 2, 7, 50] {
        let pn = build_pn(&qbar, n).unwrap();
        let d1 = check_d1(&pn.curve, &bc);
        assert!(d1.admissible, "n = {n}: {d1:?}");
        assert!(pn.tail_start > 0.0 && pn.tail_start <= pn.curve.t_end() + 1e-15);
    }
}

#[test]
fn rejects_bad_parameters() {
    assert!(matches!(build_qbar(2.0 * XI_MAX), Err(Error::XiTooLarge { .. })));
    assert!(build_qbar(0.0).is_err());
    assert!(build_qbar(f64::NAN).is_err());
    let qbar = build_qbar(XI_DEFAULT).unwrap();
    assert!(build_pn(&qbar, 0).is_err());
}

#[test]
fn csv_and_json_carry_every_row() {
    let qbar = build_qbar(XI_DEFAULT).unwrap();
    let table = convergence_table(&qbar, &[1, 10]).unwrap();
    let csv = table.to_csv();
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.starts_with("n,J_pn,C_qbar,gap"));
    let json: serde_json::Value = serde_json::from_str(&table.to_json()).unwrap();
    assert_eq!(json["rows"].as_array().unwrap().len(), 2);
}
