use std::ffi::{CStr, CString};
use std::ptr;

use involution_occ_ffi::*;

fn last_error() -> String {
    let p = iocc_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

unsafe fn take_string(p: *mut std::ffi::c_char) -> String {
    let s = CStr::from_ptr(p).to_str().unwrap().to_owned();
    iocc_string_free(p);
    s
}

#[test]
fn involution_handles() {
    unsafe {
        let mut h = ptr::null_mut();
        assert_eq!(iocc_involution_canonical(6, 2, &mut h), IoccStatus::Ok);
        assert_eq!(iocc_involution_m(h), 6);
        assert_eq!(iocc_involution_fixed_count(h), 2);
        let mut y = 99;
        assert_eq!(iocc_involution_apply(h, 2, &mut y), IoccStatus::Ok);
        assert_eq!(y, 3);
        assert_eq!(iocc_involution_apply(h, 6, &mut y), IoccStatus::InvalidArgument);
        iocc_involution_free(h);

        let map = [3usize, 2, 1, 0];
        let mut h = ptr::null_mut();
        assert_eq!(iocc_involution_from_map(map.as_ptr(), 4, &mut h), IoccStatus::Ok);
        assert_eq!(iocc_involution_fixed_count(h), 0);
        iocc_involution_free(h);

        let bad = [1usize, 2, 3, 0];
        let mut h = ptr::null_mut();
        assert_eq!(iocc_involution_from_map(bad.as_ptr(), 4, &mut h), IoccStatus::NotInvolution);
        assert!(h.is_null());
        assert!(last_error().contains("self-inverse") || !last_error().is_empty());

        assert_eq!(iocc_involution_canonical(5, 0, &mut h), IoccStatus::InvalidArgument);
        assert_eq!(iocc_involution_canonical(4, 0, ptr::null_mut()), IoccStatus::NullPointer);
        iocc_involution_free(ptr::null_mut());
        assert_eq!(iocc_involution_m(ptr::null()), 0);
    }
}

#[test]
fn scalar_functions() {
    unsafe {
        let mut x = 0.0;
        assert_eq!(iocc_main_term(0, 0.0, &mut x), IoccStatus::Ok);
        assert!((x - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(iocc_average_exact_f64(4, 0, 1, &mut x), IoccStatus::Ok);
        assert_eq!(x, 0.5);
        assert_eq!(iocc_average_log(4, 0, 1, &mut x), IoccStatus::Ok);
        assert!((x - 0.5).abs() < 1e-12);
        assert_eq!(iocc_chebyshev_bound(4, 0, 1, 1.0, &mut x), IoccStatus::Ok);
        assert!((x - 0.7325).abs() < 1e-4);
        assert_eq!(iocc_threshold_c(0, 1, 0.01, &mut x), IoccStatus::Ok);
        assert!((x - 0.953699).abs() < 1e-6);
        assert_eq!(iocc_threshold_c(0, 0, 0.01, &mut x), IoccStatus::InvalidArgument);
        assert_eq!(iocc_main_term(0, 2.0, &mut x), IoccStatus::InvalidArgument);
        assert_eq!(iocc_main_term(0, 0.5, ptr::null_mut()), IoccStatus::NullPointer);
        assert!((iocc_e_cumulative(1) - 2.0 / std::f64::consts::E).abs() < 1e-15);
        assert!((iocc_present_pair_threshold() - 0.8678794).abs() < 1e-7);
        assert!(!CStr::from_ptr(iocc_version()).to_bytes().is_empty());
    }
}

#[test]
fn json_outputs() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(iocc_exact_stats_json(4, 0, 1, &mut s), IoccStatus::Ok);
        let text = take_string(s);
        assert!(text.contains(r#""a":{"num":"1","den":"2"}"#), "{text}");

        let mut psi = ptr::null_mut();
        iocc_involution_canonical(4, 0, &mut psi);
        let mut s = ptr::null_mut();
        assert_eq!(iocc_oracle_report_json(psi, 1, &mut s), IoccStatus::Ok);
        assert!(take_string(s).contains(r#""sum_mk_sq":"128""#));
        iocc_involution_free(psi);

        let mut big = ptr::null_mut();
        iocc_involution_canonical(40, 0, &mut big);
        let mut s = ptr::null_mut();
        assert_eq!(iocc_oracle_report_json(big, 1, &mut s), IoccStatus::TooLarge);
        iocc_involution_free(big);

        let cfg = CString::new(r#"{"command": "exact", "m": 4, "k": 1}"#).unwrap();
        let mut s = ptr::null_mut();
        assert_eq!(iocc_run_json(cfg.as_ptr(), &mut s), IoccStatus::Ok);
        assert!(take_string(s).contains("\"schema_version\": 1"));
        let cfg = CString::new(r#"{"command": "sample", "m": 4}"#).unwrap();
        assert_eq!(iocc_run_json(cfg.as_ptr(), &mut s), IoccStatus::InvalidArgument);
        assert!(last_error().contains("seed"));
        let cfg = CString::new("{not json").unwrap();
        assert_eq!(iocc_run_json(cfg.as_ptr(), &mut s), IoccStatus::InvalidArgument);
    }
}

#[test]
fn sample_summary_handle() {
    unsafe {
        let mut psi = ptr::null_mut();
        iocc_involution_canonical(20, 4, &mut psi);
        let mut a = ptr::null_mut();
        let mut b = ptr::null_mut();
        assert_eq!(iocc_sample_estimate(psi, 3, 500, 9, 0.2, 1, &mut a), IoccStatus::Ok);
        assert_eq!(iocc_sample_estimate(psi, 3, 500, 9, 0.2, 0, &mut b), IoccStatus::Ok);
        assert_eq!(iocc_sample_summary_len(a), 4);
        let mut ra = std::mem::zeroed::<IoccSampleRow>();
        let mut rb = std::mem::zeroed::<IoccSampleRow>();
        for k in 0..4 {
            assert_eq!(iocc_sample_summary_row(a, k, &mut ra), IoccStatus::Ok);
            assert_eq!(iocc_sample_summary_row(b, k, &mut rb), IoccStatus::Ok);
            assert_eq!(ra, rb);
            assert_eq!(ra.k, k);
        }
        assert_eq!(iocc_sample_summary_row(a, 4, &mut ra), IoccStatus::InvalidArgument);
        let mut s = ptr::null_mut();
        assert_eq!(iocc_sample_summary_json(a, &mut s), IoccStatus::Ok);
        assert!(take_string(s).contains("\"trials\":500"));
        let mut c = ptr::null_mut();
        assert_eq!(iocc_sample_estimate(psi, 3, 0, 9, 0.2, 0, &mut c), IoccStatus::InvalidArgument);
        assert!(c.is_null());
        iocc_sample_summary_free(a);
        iocc_sample_summary_free(b);
        iocc_involution_free(psi);
    }
}

#[test]
fn factorial_handle() {
    unsafe {
        let mut h = ptr::null_mut();
        assert_eq!(iocc_factorial_profile(13, &mut h), IoccStatus::Ok);
        assert_eq!(
            (iocc_factorial_m_k(h, 0), iocc_factorial_m_k(h, 1), iocc_factorial_m_k(h, 2)),
            (3, 6, 3)
        );
        assert_eq!(iocc_factorial_distinct_count(h), 9);
        assert!(iocc_factorial_wilson_holds(h));
        let mut len = 0;
        let p = iocc_factorial_residues(h, &mut len);
        assert_eq!(std::slice::from_raw_parts(p, len), &[1, 2, 6, 11, 3, 5, 9, 7, 11, 6, 1, 12]);
        iocc_factorial_profile_free(h);

        let mut h = ptr::null_mut();
        assert_eq!(iocc_factorial_profile(15, &mut h), IoccStatus::NotPrime);
        assert!(last_error().contains("15"));
        assert!(!iocc_factorial_wilson_holds(ptr::null()));
    }
}

#[test]
fn errors_are_per_thread() {
    unsafe {
        let mut x = 0.0;
        assert_eq!(iocc_main_term(0, -1.0, &mut x), IoccStatus::InvalidArgument);
    }
    let here = last_error();
    std::thread::spawn(|| assert!(iocc_last_error_message().is_null()))
        .join()
        .unwrap();
    assert_eq!(last_error(), here);
}
