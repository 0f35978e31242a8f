use std::ffi::{c_char, CStr, CString};
use std::ptr;

use charp_ffi::*;

fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { charp_string_free(s) };
    out
}

fn last_error() -> String {
    let p = charp_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

struct Handles {
    field: *mut CharpField,
    series: Vec<*mut CharpSeries>,
}

impl Handles {
    fn field(p: u32, deg: u32) -> Self {
        let mut field = ptr::null_mut();
        assert_eq!(
            unsafe { charp_field_new(p, deg, &mut field) },
            CharpStatus::Ok
        );
        Handles {
            field,
            series: Vec::new(),
        }
    }

    fn parse(&mut self, text: &str, trunc: i64) -> Result<*mut CharpSeries, CharpStatus> {
        let c = CString::new(text).unwrap();
        let mut s = ptr::null_mut();
        match unsafe { charp_series_parse(self.field, c.as_ptr(), trunc, &mut s) } {
            CharpStatus::Ok => {
                self.series.push(s);
                Ok(s)
            }
            st => Err(st),
        }
    }
}

impl Drop for Handles {
    fn drop(&mut self) {
        for &s in &self.series {
            unsafe { charp_series_free(s) };
        }
        unsafe { charp_field_free(self.field) };
    }
}

#[test]
fn field_description() {
    let h = Handles::field(2, 2);
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { charp_field_describe(h.field, &mut out) },
        CharpStatus::Ok
    );
    assert_eq!(take(out), r#"{"p":2,"deg":2,"modulus":"g^2+g+1"}"#);
}

#[test]
fn field_errors() {
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { charp_field_new(4, 1, &mut out) },
        CharpStatus::Field
    );
    assert!(last_error().contains("not a prime"));
    let m = CString::new("g^2+1").unwrap();
    assert_eq!(
        unsafe { charp_field_with_modulus(2, m.as_ptr(), &mut out) },
        CharpStatus::Field
    );
    let m = CString::new("g^2+g+1").unwrap();
    assert_eq!(
        unsafe { charp_field_with_modulus(2, m.as_ptr(), &mut out) },
        CharpStatus::Ok
    );
    unsafe { charp_field_free(out) };
}

#[test]
fn series_round_trip_and_trunc() {
    let mut h = Handles::field(2, 2);
    let s = h.parse("x^2 + (g+1)*x^5", -1).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { charp_series_to_string(s, &mut out) },
        CharpStatus::Ok
    );
    assert_eq!(take(out), "x^2 + (g+1)*x^5");
    let mut trunc = 0usize;
    assert_eq!(
        unsafe { charp_series_trunc(s, &mut trunc) },
        CharpStatus::Ok
    );
    assert_eq!(trunc, 9);
    let s = h.parse("x^2 + x^5", 12).unwrap();
    assert_eq!(
        unsafe { charp_series_trunc(s, &mut trunc) },
        CharpStatus::Ok
    );
    assert_eq!(trunc, 12);
}

#[test]
fn parse_errors_set_message() {
    let mut h = Handles::field(2, 1);
    assert_eq!(h.parse("x^2 + x^2", -1), Err(CharpStatus::Parse));
    assert!(last_error().contains("duplicate exponent 2"));
    assert_eq!(h.parse("x^2 + y", -1), Err(CharpStatus::Parse));
    assert_eq!(h.parse("3*x", -1), Err(CharpStatus::Parse));
}

#[test]
fn numeric_queries() {
    let mut h = Handles::field(2, 1);
    let f = h.parse("x^2 + x^5", -1).unwrap();
    let (mut mu, mut inf) = (0u64, true);
    assert_eq!(
        unsafe { charp_milnor(f, &mut mu, &mut inf) },
        CharpStatus::Ok
    );
    assert_eq!((mu, inf), (4, false));
    let mut m = 0u64;
    assert_eq!(unsafe { charp_modality(f, &mut m) }, CharpStatus::Ok);
    assert_eq!(m, 2);
    let (mut d, mut e) = (0u64, 9u32);
    assert_eq!(
        unsafe { charp_determinacy(f, &mut d, &mut e) },
        CharpStatus::Ok
    );
    assert_eq!((d, e), (7, 0));

    let g = h.parse("x^4", -1).unwrap();
    assert_eq!(
        unsafe { charp_milnor(g, &mut mu, &mut inf) },
        CharpStatus::Ok
    );
    assert!(inf);
    assert_eq!(
        unsafe { charp_modality(g, &mut m) },
        CharpStatus::InfiniteMilnor
    );
    assert_eq!(
        unsafe { charp_determinacy(g, &mut d, &mut e) },
        CharpStatus::Ok
    );
    assert_eq!((d, e), (4, 2));
}

#[test]
fn json_reports() {
    let mut h = Handles::field(2, 1);
    let f = h.parse("x^2 + x^4 + x^5", -1).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { charp_invariants_json(f, &mut out) },
        CharpStatus::Ok
    );
    let inv: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(inv["lambda"], serde_json::json!([5, 7]));
    assert_eq!(inv["d"], 7);

    assert_eq!(
        unsafe { charp_normal_form_json(f, &mut out) },
        CharpStatus::Ok
    );
    let nf: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(nf["m"], 2);
    assert_eq!(nf["lambda"]["5"], "1");
    assert_eq!(nf["guarantee_order"], 7);
}

#[test]
fn match_jets_extends_field() {
    let mut h = Handles::field(2, 1);
    let f = h.parse("x^2 + x^5 + x^7", 9).unwrap();
    let g = h.parse("x^2 + x^5 + x^7 + x^8", 9).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { charp_match_jets_json(f, g, &mut out) },
        CharpStatus::Ok
    );
    let r: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(r["matched"], true);
    assert_eq!(r["field"]["deg"], 2);

    let other = h.parse("x^2 + x^7", 9).unwrap();
    assert_eq!(
        unsafe { charp_match_jets_json(f, other, &mut out) },
        CharpStatus::Ok
    );
    let r: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(r["matched"], false);
}

#[test]
fn null_handles_are_rejected() {
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { charp_invariants_json(ptr::null(), &mut out) },
        CharpStatus::NullPointer
    );
    let mut h = Handles::field(3, 1);
    let f = h.parse("x^2", -1).unwrap();
    assert_eq!(
        unsafe { charp_invariants_json(f, ptr::null_mut()) },
        CharpStatus::NullPointer
    );
    unsafe {
        charp_series_free(ptr::null_mut());
        charp_field_free(ptr::null_mut());
        charp_string_free(ptr::null_mut());
    }
}

#[test]
fn precondition_failures() {
    let mut h = Handles::field(3, 1);
    let c = h.parse("2", -1).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { charp_normal_form_json(c, &mut out) },
        CharpStatus::Precondition
    );
    let short = h.parse("x^3 + x^4", 4).unwrap();
    assert_eq!(
        unsafe { charp_normal_form_json(short, &mut out) },
        CharpStatus::Precondition
    );
    assert!(last_error().contains("truncation"));
}
