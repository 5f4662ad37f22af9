use qhecke::format::{parse_monomial, series_json, series_text};
use qhecke::hecke::fabc;
use qhecke::report::Verdict;
use qhecke::verify::{list_identities, params, run_identity, run_identity_with, Params, Weights};
use qhecke::{Error, QExp};

fn qi(n: i64) -> QExp {
    QExp::int(n)
}

#[test]
fn reports_are_deterministic() {
    let ps = params(&[("t", 2), ("m", 1)]);
    let mut a = run_identity("theo-main", &ps, qi(10)).unwrap();
    let mut b = run_identity("theo-main", &ps, qi(10)).unwrap();
    a.runtime_ms = 0;
    b.runtime_ms = 0;
    assert_eq!(a.to_json(), b.to_json());
    assert!(a.is_equal());
}

#[test]
fn equal_at_n_implies_equal_below() {
    for order in [12, 8, 3, 0] {
        assert!(run_identity("lem-lem2-f", &params(&[("t", 3), ("m", 2)]), qi(order)).unwrap().is_equal());
    }
}

#[test]
fn weight_override_runs_every_assignment() {
    let ws = [Weights::new(QExp::new(2, 9), QExp::new(1, 5)), Weights::new(QExp::new(-4, 9), QExp::new(3, 5))];
    let rep = run_identity_with("g3-func", &Params::new(), qi(10), Some(&ws)).unwrap();
    assert!(rep.is_equal(), "{rep}");
    assert_eq!(rep.checks, 2);
    assert!(rep.params["weights"].contains("2/9"));
}

#[test]
fn integer_weight_is_a_pole() {
    let ws = [Weights::new(qi(1), QExp::new(1, 5))];
    let r = run_identity_with("kernel-lem2", &Params::new(), qi(5), Some(&ws));
    assert!(matches!(r, Err(Error::PoleHit(_))), "{r:?}");
}

#[test]
fn main_theorem_range() {
    let r = run_identity("theo-main", &params(&[("t", 2), ("m", 5)]), qi(10));
    assert!(matches!(r, Err(Error::ParamOutOfRange(_))));
    let r = run_identity("theo-twee", &params(&[("t", 1), ("m", 1)]), qi(10));
    assert!(matches!(r, Err(Error::ParamOutOfRange(_))));
}

#[test]
fn registry_lists_the_expected_names() {
    let names: Vec<&str> = list_identities().iter().map(|d| d.name).collect();
    for n in ["lem-theta-a", "theo-main", "theo-general-hecke", "cor-main", "love-equiv", "u-table-2", "duality", "triple-product"] {
        assert!(names.contains(&n), "missing {n}");
    }
}

#[test]
fn duality_report_json() {
    let rep = run_identity("duality", &params(&[("t", 3), ("m", 3), ("N", 6)]), qi(0)).unwrap();
    assert_eq!(rep.verdict, Verdict::Equal);
    let json = rep.to_json();
    assert_eq!(json["verdict"], "Equal");
    assert_eq!(json["params"]["N"], "6");
}

#[test]
fn empty_window_is_empty() {
    let x = parse_monomial("q^2*x^-1").unwrap();
    let y = parse_monomial("q^4").unwrap();
    let s = fabc(1, 2, 3, &x, &y, qi(0)).unwrap();
    assert_eq!(series_text(&s), "O(q^0)\n");
    assert_eq!(series_json(&s)["terms"].as_array().unwrap().len(), 0);
}

