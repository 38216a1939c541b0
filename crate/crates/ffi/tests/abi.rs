use std::ffi::{CStr, CString};
use std::ptr;

use coarse_clt_ffi::*;

fn take_string(p: *mut libc::c_char) -> String {
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned();
    unsafe { cc_string_free(p) };
    s
}

fn free2() -> *mut CcGraph {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { cc_graph_free_combing(2, &mut g) }, CcStatus::Ok);
    g
}

#[test]
fn free_group_counts_and_lambda() {
    let g = free2();
    let mut v = 0;
    assert_eq!(unsafe { cc_graph_vertex_count(g, &mut v) }, CcStatus::Ok);
    assert_eq!(v, 5);

    let mut s = ptr::null_mut();
    assert_eq!(unsafe { cc_graph_count_paths(g, 0, 20, &mut s) }, CcStatus::Ok);
    let expected = num_bigint::BigUint::from(4u32) * num_bigint::BigUint::from(3u32).pow(19);
    assert_eq!(take_string(s), expected.to_string());

    let mut l = 0.0;
    assert_eq!(unsafe { cc_graph_leading_eigenvalue(g, &mut l) }, CcStatus::Ok);
    assert!((l - 3.0).abs() < 1e-9);

    let mut js = ptr::null_mut();
    assert_eq!(unsafe { cc_graph_spectral_json(g, &mut js) }, CcStatus::Ok);
    let doc: serde_json::Value = serde_json::from_str(&take_string(js)).unwrap();
    assert!(doc.is_object());
    unsafe { cc_graph_free(g) };
}

#[test]
fn json_round_trip_and_errors() {
    let json = CString::new(
        r#"{"group":{"kind":"opaque","letters":["x","y","z"]},"vertices":2,"initial":0,
            "edges":[{"from":0,"to":0,"label":"x"},{"from":0,"to":1,"label":"y"},{"from":1,"to":0,"label":"z"}]}"#,
    )
    .unwrap();
    let mut g = ptr::null_mut();
    let st = unsafe { cc_graph_from_json(json.as_ptr(), &mut g) };
    if st != CcStatus::Ok {
        panic!("{:?}", unsafe { CStr::from_ptr(cc_last_error()) });
    }
    let mut l = 0.0;
    assert_eq!(unsafe { cc_graph_leading_eigenvalue(g, &mut l) }, CcStatus::Ok);
    assert!((l - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-9);
    unsafe { cc_graph_free(g) };

    let bad = CString::new("{not json").unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { cc_graph_from_json(bad.as_ptr(), &mut g) }, CcStatus::Malformed);
    assert!(g.is_null());
    let msg = unsafe { CStr::from_ptr(cc_last_error()) }.to_str().unwrap();
    assert!(!msg.is_empty());

    assert_eq!(unsafe { cc_graph_from_json(ptr::null(), &mut g) }, CcStatus::NullPointer);
    let mut v = 0;
    assert_eq!(unsafe { cc_graph_vertex_count(ptr::null(), &mut v) }, CcStatus::NullPointer);
    assert_eq!(unsafe { cc_graph_free_combing(1, &mut g) }, CcStatus::InvalidInput);
}

#[test]
fn sampler_is_seeded_and_checks_capacity() {
    let g = free2();
    let draw = |seed| {
        let mut s = ptr::null_mut();
        assert_eq!(unsafe { cc_sampler_new(g, 10, seed, &mut s) }, CcStatus::Ok);
        let mut buf = [0usize; 10];
        let mut len = 0;
        assert_eq!(unsafe { cc_sampler_sample(s, 10, buf.as_mut_ptr(), 10, &mut len) }, CcStatus::Ok);
        assert_eq!(len, 10);
        let mut small = [0usize; 3];
        assert_eq!(
            unsafe { cc_sampler_sample(s, 10, small.as_mut_ptr(), 3, &mut len) },
            CcStatus::BufferTooSmall
        );
        unsafe { cc_sampler_free(s) };
        buf
    };
    assert_eq!(draw(7), draw(7));
    unsafe { cc_graph_free(g) };
}

#[test]
fn actions_over_free_group() {
    let g = free2();
    let spec = CString::new(r#"{"kind":"cayley-tree"}"#).unwrap();
    let mut a = ptr::null_mut();
    assert_eq!(unsafe { cc_action_new(g, spec.as_ptr(), &mut a) }, CcStatus::Ok);
    let w = CString::new("a b A").unwrap();
    let mut d = 0.0;
    assert_eq!(unsafe { cc_action_displacement(a, w.as_ptr(), &mut d) }, CcStatus::Ok);
    assert_eq!(d, 3.0);
    assert_eq!(unsafe { cc_action_translation_length(a, w.as_ptr(), &mut d) }, CcStatus::Ok);
    assert!((d - 1.0).abs() < 1e-12);
    let bad = CString::new("q").unwrap();
    assert_ne!(unsafe { cc_action_displacement(a, bad.as_ptr(), &mut d) }, CcStatus::Ok);
    unsafe { cc_action_free(a) };
    unsafe { cc_graph_free(g) };
}

#[test]
fn experiment_json() {
    let doc = coarse_clt::combings::free_group_combing(2).unwrap().to_document();
    let cfg = serde_json::json!({
        "automaton": doc,
        "action": {"kind": "cayley-tree"},
        "n": 12,
        "samples": 200,
        "seed": 3,
    });
    let cfg = CString::new(cfg.to_string()).unwrap();
    let mut out = ptr::null_mut();
    let st = unsafe { cc_run_experiment_json(cfg.as_ptr(), &mut out) };
    if st != CcStatus::Ok {
        panic!("{:?}", unsafe { CStr::from_ptr(cc_last_error()) });
    }
    let report: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
    assert_eq!(report["runs"][0]["verdict"], "zero");

    let bad = CString::new(r#"{"automaton": 3}"#).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { cc_run_experiment_json(bad.as_ptr(), &mut out) }, CcStatus::Malformed);
    assert!(out.is_null());
}

#[test]
fn version_and_null_free() {
    let v = unsafe { CStr::from_ptr(cc_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
    unsafe {
        cc_string_free(ptr::null_mut());
        cc_graph_free(ptr::null_mut());
        cc_sampler_free(ptr::null_mut());
        cc_action_free(ptr::null_mut());
    }
}

#[test]
fn header_is_generated() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/coarse_clt.h")).unwrap();
    for f in ["cc_graph_from_json", "cc_sampler_sample", "cc_action_new", "cc_run_experiment_json", "CC_STATUS_OK"] {
        assert!(h.contains(f), "{f}");
    }
}
