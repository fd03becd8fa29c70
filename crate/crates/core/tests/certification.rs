use std::collections::BTreeMap;

use fastescape::certify::{
    certify_disc_sequence, certify_regular_growth, verify_certificate, CertStatus, FailureReason, DEFAULT_DELTA,
};
use fastescape::growth::ladder::find_min_R;
use fastescape::growth::order::Verdict;
use fastescape::growth::scan::{find_regular_sequence, growth_inequality_scan, GrowthTest, RegularOutcome};
use fastescape::{iterate_function, make_builtin, EntireFunction};

fn builtin(name: &str) -> EntireFunction {
    make_builtin(name, &BTreeMap::new()).unwrap()
}

fn gap1() -> EntireFunction {
    make_builtin("gap_series", &BTreeMap::from([("c".to_string(), 1.0)])).unwrap()
}

fn quarter_r() -> f64 {
    find_min_R(&builtin("quarter_order"), 1e6, 256).unwrap()
}

#[test]
fn quarter_disc_certificate_survives_oversampling() {
    let q = builtin("quarter_order");
    let cert = certify_disc_sequence(&q, quarter_r(), 3, 1024, DEFAULT_DELTA).unwrap();
    assert!(cert.is_certified(), "{}", cert.summary());
    assert!(cert.depth >= 3);
    for n in 0..cert.rho.len() {
        assert!(fastescape::Magnitude::from_f64(cert.rho[n]).unwrap() > cert.ladder[n]);
    }
    assert!(verify_certificate(&q, &cert, 4));
    assert!(verify_certificate(&q, &cert, 8));
}

#[test]
fn swapped_radii_fail_verification() {
    let q = builtin("quarter_order");
    let mut cert = certify_disc_sequence(&q, quarter_r(), 3, 256, DEFAULT_DELTA).unwrap();
    assert!(cert.is_certified());
    cert.rho.swap(1, 2);
    cert.m_values.swap(1, 2);
    assert!(!verify_certificate(&q, &cert, 2));
}

#[test]
fn zero_delta_verification_returns_a_verdict() {
    let q = builtin("quarter_order");
    let cert = certify_disc_sequence(&q, quarter_r(), 3, 64, 0.0).unwrap();
    // either outcome is acceptable; the call must not panic or error
    let _ = verify_certificate(&q, &cert, 16);
}

#[test]
fn regular_route_certifies_quarter_and_gap() {
    let q = builtin("quarter_order");
    let c = certify_regular_growth(&q, quarter_r(), 3.0, 2, 1024, DEFAULT_DELTA).unwrap();
    assert!(c.is_certified() && c.depth >= 2, "{}", c.summary());
    assert!(verify_certificate(&q, &c, 4));

    let g = gap1();
    let r = find_min_R(&g, 1e6, 256).unwrap();
    let c = certify_regular_growth(&g, r, 2.0, 2, 1024, DEFAULT_DELTA).unwrap();
    assert!(c.is_certified() && c.depth >= 2, "{}", c.summary());
    assert!(verify_certificate(&g, &c, 4));
}

#[test]
fn gap_regular_sequence_exists() {
    let g = gap1();
    let r = find_min_R(&g, 1e6, 256).unwrap();
    assert!(matches!(
        find_regular_sequence(&g, r, 2.0, 2, DEFAULT_DELTA, 256).unwrap(),
        RegularOutcome::Found(_)
    ));
}

#[test]
fn negative_controls_fail_on_the_ceiling() {
    for name in ["exp", "cosh_sq"] {
        let c = certify_disc_sequence(&builtin(name), 1.0, 3, 1024, DEFAULT_DELTA).unwrap();
        assert!(
            matches!(
                c.status,
                CertStatus::Failed {
                    reason: FailureReason::MinModulusCeiling,
                    level: 0
                }
            ),
            "{name}: {:?}",
            c.status
        );
    }
    let c = certify_regular_growth(&builtin("exp"), 1.0, 2.0, 2, 256, DEFAULT_DELTA).unwrap();
    assert!(matches!(
        c.status,
        CertStatus::Failed {
            reason: FailureReason::ClauseA,
            ..
        }
    ));
}

#[test]
fn second_iterate_of_quarter_certifies() {
    let q2 = iterate_function(&builtin("quarter_order"), 2).unwrap();
    let c = certify_disc_sequence(&q2, quarter_r(), 1, 1024, DEFAULT_DELTA).unwrap();
    assert!(c.depth >= 1, "{}", c.summary());
}

#[test]
fn quarter_min_condition_holds() {
    let s = growth_inequality_scan(
        &builtin("quarter_order"),
        GrowthTest::MinCondition { m: 3.0 },
        (1e4, 1e6),
        16,
        256,
    )
    .unwrap();
    assert_eq!(s.verdict, Verdict::HoldsEmpirically, "{:?}", s.witnesses.first());
    assert_eq!(s.witnesses.len(), 16);
    assert!(s.witnesses.iter().all(|w| w.rho.is_some()));
}

#[test]
fn polynomials_are_refused() {
    let p = fastescape::function::make_table_series("p", vec![(0, 1.0.into()), (5, 1.0.into())]);
    assert!(matches!(
        certify_disc_sequence(&p, 2.0, 2, 64, DEFAULT_DELTA),
        Err(fastescape::Error::NonTranscendental(_))
    ));
}
