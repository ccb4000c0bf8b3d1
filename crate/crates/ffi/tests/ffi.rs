use std::f64::consts::{FRAC_PI_2, TAU};
use std::ffi::{CStr, CString};
use std::path::Path;
use std::ptr;

use spinwrithe_ffi::*;

fn last_error() -> String {
    let p = sw_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn twist() -> *mut SwField {
    let mut f = ptr::null_mut();
    let st = unsafe { sw_field_twist(-20.0, 20.0, 1024, FRAC_PI_2, 1.0, TAU, 1.0, 0.0, &mut f) };
    assert_eq!(st, SwStatus::Ok);
    f
}

#[test]
fn observables_and_writhe() {
    let f = twist();
    let mut obs = SwObservables::default();
    let mut ang = 0.0;
    let mut ful = 0.0;
    unsafe {
        assert_eq!(sw_field_observables(f, 1.0, &mut obs), SwStatus::Ok);
        assert_eq!(sw_writhe_angular(f, &mut ang), SwStatus::Ok);
        assert_eq!(sw_writhe_fuller(f, &mut ful), SwStatus::Ok);
        sw_field_free(f);
    }
    assert!(obs.energy > 0.0 && obs.magnetization < 0.0);
    assert!((ang * TAU - obs.momentum).abs() < 1e-12);
    assert!((ang - ful).abs() < 1e-12);
}

#[test]
fn curve_closure_and_gauss() {
    let f = twist();
    let mut open = ptr::null_mut();
    let mut closed = ptr::null_mut();
    let (mut n, mut is_closed, mut wr, mut ang) = (0usize, false, 0.0, 0.0);
    unsafe {
        assert_eq!(sw_curve_from_field(f, &mut open), SwStatus::Ok);
        assert_eq!(sw_curve_close(open, 10.0, &mut closed), SwStatus::Ok);
        assert_eq!(sw_curve_is_closed(closed, &mut is_closed), SwStatus::Ok);
        assert_eq!(sw_curve_len(closed, &mut n), SwStatus::Ok);
        let mut buf = vec![0.0; 3 * n];
        assert_eq!(
            sw_curve_points(closed, buf.as_mut_ptr(), buf.len()),
            SwStatus::Ok
        );
        assert_eq!(&buf[..3], &buf[3 * n - 3..]);
        assert_eq!(
            sw_curve_points(closed, buf.as_mut_ptr(), 3),
            SwStatus::InvalidArgument
        );
        assert_eq!(sw_curve_writhe(closed, &mut wr), SwStatus::Ok);
        assert_eq!(sw_writhe_angular(f, &mut ang), SwStatus::Ok);
        // reclosing is an error
        let mut again = ptr::null_mut();
        assert_eq!(
            sw_curve_close(closed, 10.0, &mut again),
            SwStatus::Validation
        );
        assert!(again.is_null());
        sw_curve_free(closed);
        sw_curve_free(open);
        sw_field_free(f);
    }
    assert!(is_closed);
    assert!((wr - ang).abs() < 5e-3, "{wr} vs {ang}");
}

#[test]
fn json_round_trip() {
    let f = twist();
    let mut s = ptr::null_mut();
    let mut g = ptr::null_mut();
    let (mut a, mut b) = (SwObservables::default(), SwObservables::default());
    unsafe {
        assert_eq!(sw_field_to_json(f, &mut s), SwStatus::Ok);
        assert_eq!(sw_field_from_json(s, &mut g), SwStatus::Ok);
        sw_field_observables(f, 1.0, &mut a);
        sw_field_observables(g, 1.0, &mut b);
        sw_string_free(s);
        sw_field_free(f);
        sw_field_free(g);
    }
    assert_eq!(a, b);
}

#[test]
fn errors_are_reported() {
    let mut f = ptr::null_mut();
    unsafe {
        assert_eq!(sw_field_ground(1.0, 0.0, 64, &mut f), SwStatus::Validation);
        assert!(f.is_null());
        assert!(!last_error().is_empty());

        let bad = CString::new("{\"grid\":1}").unwrap();
        assert_eq!(
            sw_field_from_json(bad.as_ptr(), &mut f),
            SwStatus::Validation
        );
        assert_eq!(
            sw_field_from_json(ptr::null(), &mut f),
            SwStatus::NullPointer
        );
        assert!(last_error().contains("null"));

        let mut x = 0.0;
        assert_eq!(
            sw_writhe_angular(ptr::null(), &mut x),
            SwStatus::NullPointer
        );
        let g = twist();
        assert_eq!(sw_writhe_angular(g, ptr::null_mut()), SwStatus::NullPointer);
        let mut o = SwObservables::default();
        assert_eq!(sw_field_observables(g, -1.0, &mut o), SwStatus::Validation);
        assert_eq!(
            sw_field_random(-20.0, 20.0, 512, 3, 0, 0.5, &mut f),
            SwStatus::Validation
        );
        sw_field_free(g);
        sw_field_free(ptr::null_mut());
        sw_curve_free(ptr::null_mut());
        sw_string_free(ptr::null_mut());
    }
}

#[test]
fn random_field_is_deterministic() {
    let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
    let (mut oa, mut ob) = (SwObservables::default(), SwObservables::default());
    let mut len = 0;
    unsafe {
        assert_eq!(
            sw_field_random(-20.0, 20.0, 512, 7, 8, 0.5, &mut a),
            SwStatus::Ok
        );
        assert_eq!(
            sw_field_random(-20.0, 20.0, 512, 7, 8, 0.5, &mut b),
            SwStatus::Ok
        );
        sw_field_len(a, &mut len);
        sw_field_observables(a, 1.0, &mut oa);
        sw_field_observables(b, 1.0, &mut ob);
        sw_field_free(a);
        sw_field_free(b);
    }
    assert_eq!(len, 512);
    assert_eq!(oa, ob);
}

#[test]
fn header_declares_api() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/spinwrithe.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in [
        "sw_last_error_message",
        "sw_field_from_json",
        "sw_field_twist",
        "sw_field_free",
        "sw_writhe_fuller",
        "sw_curve_close",
        "sw_curve_writhe",
        "typedef struct SwField SwField",
        "SW_STATUS_NUMERICAL = 5",
    ] {
        assert!(text.contains(name), "{name} missing from header");
    }
    // syntax check with the system C compiler when there is one
    if let Ok(out) = std::process::Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c"])
        .arg(&header)
        .output()
    {
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}
