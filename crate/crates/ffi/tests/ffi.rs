use std::ffi::{c_char, CString};
use std::ptr;

use semiflux_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0u8; 256];
    let n = unsafe { sf_last_error(buf.as_mut_ptr() as *mut c_char, buf.len()) };
    buf.truncate(n.min(255));
    String::from_utf8(buf).unwrap()
}

#[test]
fn heaviside_values_and_pairing() {
    unsafe {
        let mut h = ptr::null_mut();
        assert_eq!(sf_piecewise_heaviside(SfOrientation::Left, &mut h), SfStatus::Ok);
        let (mut v, mut assigned) = (0.0, false);
        assert_eq!(sf_piecewise_eval(h, 0.0, &mut v, &mut assigned), SfStatus::Ok);
        assert!(assigned && v == 0.0);
        sf_piecewise_eval(h, 0.5, &mut v, &mut assigned);
        assert!(assigned && v == 1.0);

        let phi = CString::new("gaussian").unwrap();
        let mut s = ptr::null_mut();
        assert_eq!(sf_piecewise_sgn(SfOrientation::Left, &mut s), SfStatus::Ok);
        let mut p = 0.0;
        assert_eq!(sf_pair_test_derivative(s, phi.as_ptr(), SfOrientation::Left, &mut p), SfStatus::Ok);
        assert!((p + 2.0).abs() < 1e-10, "{p}");

        let mut r = ptr::null_mut();
        assert_eq!(sf_piecewise_reflect(h, &mut r), SfStatus::Ok);
        sf_piecewise_eval(r, -0.5, &mut v, &mut assigned);
        assert!(assigned && v == 1.0);

        sf_piecewise_free(r);
        sf_piecewise_free(s);
        sf_piecewise_free(h);
        sf_piecewise_free(ptr::null_mut());
    }
}

#[test]
fn euler_character_of_two_sided_sign() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(sf_piecewise_sgn(SfOrientation::Standard, &mut s), SfStatus::Ok);
        let mut chi = 0;
        assert_eq!(sf_euler_character(s, SfOrientation::Standard, &mut chi), SfStatus::Ok);
        assert_eq!(chi, 1);
        sf_piecewise_free(s);
    }
}

#[test]
fn json_round_trip_and_bad_json() {
    let f = semiflux::PiecewiseFn::heaviside(semiflux::Orientation::Right).unwrap();
    let text = CString::new(serde_json::to_string(&f).unwrap()).unwrap();
    unsafe {
        let mut h = ptr::null_mut();
        assert_eq!(sf_piecewise_from_json(text.as_ptr(), &mut h), SfStatus::Ok);
        let (mut v, mut assigned) = (0.0, false);
        sf_piecewise_eval(h, 0.0, &mut v, &mut assigned);
        assert!(assigned && v == 1.0);
        sf_piecewise_free(h);

        let bad = CString::new("{not json").unwrap();
        assert_eq!(sf_piecewise_from_json(bad.as_ptr(), &mut h), SfStatus::InvalidArgument);
        assert!(last_error().starts_with("piecewise JSON"));
    }
}

#[test]
fn spectrum_through_buffer() {
    unsafe {
        let mut h = ptr::null_mut();
        assert_eq!(sf_hamiltonian_build(1.0, 0.0, SfOrientation::Left, 64, std::f64::consts::TAU, &mut h), SfStatus::Ok);
        let mut n = 0;
        assert_eq!(sf_hamiltonian_spectrum(h, ptr::null_mut(), 0, &mut n), SfStatus::BufferTooSmall);
        assert_eq!(n, 64);
        let mut ev = vec![0.0; n];
        assert_eq!(sf_hamiltonian_spectrum(h, ev.as_mut_ptr(), ev.len(), &mut n), SfStatus::Ok);
        assert!(ev[0].abs() < 1e-10);
        assert!((ev[1] - 1.0).abs() < 1e-2 && (ev[2] - 1.0).abs() < 1e-2);
        sf_hamiltonian_free(h);
    }
}

#[test]
fn errors_are_reported_not_raised() {
    unsafe {
        let mut h = ptr::null_mut();
        assert_eq!(sf_hamiltonian_build(1.0, 8.0, SfOrientation::Left, 32, 6.0, &mut h), SfStatus::InvalidArgument);
        assert!(last_error().contains("not elliptic"));
        assert!(h.is_null());

        assert_eq!(sf_piecewise_heaviside(SfOrientation::Left, ptr::null_mut()), SfStatus::NullPointer);
        assert_eq!(sf_piecewise_heaviside(SfOrientation::Standard, &mut ptr::null_mut()), SfStatus::InvalidArgument);

        let phi = CString::new("no-such").unwrap();
        let mut v = 0.0;
        assert_eq!(sf_regularized_pair(1e-3, phi.as_ptr(), &mut v), SfStatus::InvalidArgument);
        assert_eq!(sf_regularized_pair(1e-3, ptr::null(), &mut v), SfStatus::NullPointer);
    }
}

#[test]
fn regularized_delta_approaches_the_value_at_zero() {
    let phi = CString::new("gaussian").unwrap();
    let mut v = [0.0; 2];
    unsafe {
        assert_eq!(sf_regularized_pair(1e-3, phi.as_ptr(), &mut v[0]), SfStatus::Ok);
        assert_eq!(sf_regularized_pair(5e-4, phi.as_ptr(), &mut v[1]), SfStatus::Ok);
    }
    let (e0, e1) = ((v[0] - 1.0).abs(), (v[1] - 1.0).abs());
    assert!(e1 < e0 && e0 < 2e-3, "{e0} {e1}");
}

#[test]
fn header_declares_every_entry_point() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/semiflux.h")).unwrap();
    for name in [
        "sf_last_error",
        "sf_piecewise_heaviside",
        "sf_piecewise_sgn",
        "sf_piecewise_from_json",
        "sf_piecewise_eval",
        "sf_piecewise_reflect",
        "sf_piecewise_extend",
        "sf_piecewise_free",
        "sf_pair_test_derivative",
        "sf_euler_character",
        "sf_hamiltonian_build",
        "sf_hamiltonian_spectrum",
        "sf_hamiltonian_free",
        "sf_regularized_pair",
        "typedef struct SfPiecewise SfPiecewise",
    ] {
        assert!(header.contains(name), "{name} missing from the header");
    }
}
