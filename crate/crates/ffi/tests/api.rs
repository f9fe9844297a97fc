use std::ffi::{CStr, CString};
use std::ptr;

use jsrcert_ffi::*;

fn last_error() -> String {
    let p = jsrcert_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

unsafe fn diag_system(scale: f64) -> *mut JsrcertSystem {
    let a = [scale, 0.0, 0.0, scale];
    let c = [1.0, 0.0, 0.0, 1.0];
    let mut sys = ptr::null_mut();
    assert_eq!(jsrcert_system_new(2, 1, 2, a.as_ptr(), c.as_ptr(), &mut sys), JsrcertStatus::Ok);
    sys
}

#[test]
fn full_pipeline_through_handles() {
    unsafe {
        let sys = diag_system(0.5);
        let (mut lo, mut hi) = (0.0, 0.0);
        assert_eq!(jsrcert_jsr_bracket(sys, 4, &mut lo, &mut hi), JsrcertStatus::Ok);
        assert!((lo - 0.5).abs() < 1e-12 && (hi - 0.5).abs() < 1e-12);

        let mut samples = ptr::null_mut();
        assert_eq!(jsrcert_collect(sys, 50, 6, 3, &mut samples), JsrcertStatus::Ok);
        let mut cert = ptr::null_mut();
        assert_eq!(jsrcert_solve(samples, 1, 10.0, 0.0, &mut cert), JsrcertStatus::Ok);

        let mut gamma = 0.0;
        assert_eq!(jsrcert_certificate_gamma(cert, &mut gamma), JsrcertStatus::Ok);
        assert!((gamma - 0.5).abs() <= 5e-6);
        let mut kappa = 0.0;
        assert_eq!(jsrcert_certificate_kappa(cert, &mut kappa), JsrcertStatus::Ok);
        assert!(kappa >= 1.0);

        let mut dim = 0;
        assert_eq!(jsrcert_certificate_p_star(cert, ptr::null_mut(), 0, &mut dim), JsrcertStatus::Ok);
        assert_eq!(dim, 2);
        let mut small = [0.0; 3];
        assert_eq!(jsrcert_certificate_p_star(cert, small.as_mut_ptr(), 3, &mut dim), JsrcertStatus::Dimension);
        let mut p = [0.0; 4];
        assert_eq!(jsrcert_certificate_p_star(cert, p.as_mut_ptr(), 4, &mut dim), JsrcertStatus::Ok);
        assert!((p[1] - p[2]).abs() < 1e-12 && p[0] >= 1.0 - 1e-9);

        let mut verdict = JsrcertVerdict::Inconclusive;
        let mut json = ptr::null_mut();
        assert_eq!(jsrcert_certify(cert, samples, sys, 0.1, 0.0, &mut verdict, &mut json), JsrcertStatus::Ok);
        let report: serde_json::Value = serde_json::from_str(CStr::from_ptr(json).to_str().unwrap()).unwrap();
        jsrcert_string_free(json);
        assert_eq!(report["gamma_star"].as_f64().unwrap(), gamma);
        let expected = if report["verdict"] == "certified-stable" {
            JsrcertVerdict::CertifiedStable
        } else {
            JsrcertVerdict::Inconclusive
        };
        assert_eq!(verdict, expected);

        jsrcert_certificate_free(cert);
        jsrcert_samples_free(samples);
        jsrcert_system_free(sys);
    }
}

#[test]
fn black_box_outputs_match_collected() {
    unsafe {
        let sys = diag_system(0.9);
        let mut collected = ptr::null_mut();
        assert_eq!(jsrcert_collect(sys, 20, 4, 11, &mut collected), JsrcertStatus::Ok);
        let mut from_sys = ptr::null_mut();
        assert_eq!(jsrcert_solve(collected, 1, 10.0, 0.0, &mut from_sys), JsrcertStatus::Ok);

        // Unit-circle initial states under a scaled identity give y_t = 0.9^t x0.
        let mut y = Vec::new();
        for i in 0..20 {
            let th = i as f64 * 0.3;
            for t in 0..4 {
                let s = 0.9f64.powi(t);
                y.extend([s * th.cos(), s * th.sin()]);
            }
        }
        let mut outside = ptr::null_mut();
        assert_eq!(jsrcert_samples_from_outputs(2, 1, 2, 4, 20, y.as_ptr(), 0, &mut outside), JsrcertStatus::Ok);
        let mut from_data = ptr::null_mut();
        assert_eq!(jsrcert_solve(outside, 1, 10.0, 0.0, &mut from_data), JsrcertStatus::Ok);
        let (mut g1, mut g2) = (0.0, 0.0);
        jsrcert_certificate_gamma(from_sys, &mut g1);
        jsrcert_certificate_gamma(from_data, &mut g2);
        assert!((g1 - 0.9).abs() < 1e-5 && (g2 - 0.9).abs() < 1e-5);

        let mut verdict = JsrcertVerdict::Inconclusive;
        let mut json = ptr::null_mut();
        assert_eq!(
            jsrcert_certify(from_data, outside, ptr::null(), 0.1, 0.0, &mut verdict, &mut json),
            JsrcertStatus::Ok
        );
        jsrcert_string_free(json);

        for h in [from_sys, from_data] {
            jsrcert_certificate_free(h);
        }
        jsrcert_samples_free(collected);
        jsrcert_samples_free(outside);
        jsrcert_system_free(sys);
    }
}

#[test]
fn errors_set_codes_and_messages() {
    unsafe {
        let mut sys = ptr::null_mut();
        let bad = CString::new("{not json").unwrap();
        assert_eq!(jsrcert_system_from_json(bad.as_ptr(), &mut sys), JsrcertStatus::Format);
        assert!(sys.is_null());
        assert!(!last_error().is_empty());

        assert_eq!(jsrcert_system_from_json(ptr::null(), &mut sys), JsrcertStatus::NullPointer);
        assert!(last_error().contains("json"));

        let a = [1.0; 4];
        assert_ne!(jsrcert_system_new(2, 1, 1, a.as_ptr(), ptr::null(), &mut sys), JsrcertStatus::Ok);

        let real = diag_system(0.5);
        let mut samples = ptr::null_mut();
        assert_eq!(jsrcert_collect(real, 10, 2, 0, &mut samples), JsrcertStatus::Ok);
        let mut cert = ptr::null_mut();
        // k must leave a nontrivial horizon.
        assert_eq!(jsrcert_solve(samples, 2, 10.0, 0.0, &mut cert), JsrcertStatus::InvalidArgument);

        let mut v = 0.0;
        assert_eq!(jsrcert_phi(0.1, 3, 2, &mut v), JsrcertStatus::InvalidArgument);
        assert_eq!(jsrcert_phi(0.1, 1, 10, &mut v), JsrcertStatus::Ok);
        assert!((v - 0.9f64.powi(10)).abs() < 1e-13);
        assert!(jsrcert_last_error_message().is_null());
        assert_eq!(jsrcert_delta(0.1, 2, ptr::null_mut()), JsrcertStatus::NullPointer);

        jsrcert_samples_free(samples);
        jsrcert_system_free(real);
        jsrcert_system_free(ptr::null_mut());
    }
}

#[test]
fn system_json_round_trip() {
    unsafe {
        let text = CString::new(r#"{"n": 2, "M": 1, "p": 1, "A": [[0.5, 0.1, 0.0, 0.4]], "C": [[1.0, 0.0]]}"#).unwrap();
        let mut sys = ptr::null_mut();
        let status = jsrcert_system_from_json(text.as_ptr(), &mut sys);
        assert_eq!(status, JsrcertStatus::Ok, "{}", if status == JsrcertStatus::Ok { String::new() } else { last_error() });
        let (mut lo, mut hi) = (0.0, 0.0);
        assert_eq!(jsrcert_jsr_bracket(sys, 2, &mut lo, &mut hi), JsrcertStatus::Ok);
        assert!((lo - 0.5).abs() < 1e-12 && hi >= lo);
        jsrcert_system_free(sys);
    }
}
