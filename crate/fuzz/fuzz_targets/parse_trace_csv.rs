#![no_main]
use libfuzzer_sys::fuzz_target;

use ch_spectral::io::{parse_trace_csv, write_trace_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(trace) = parse_trace_csv(text) {
        let mut out = Vec::new();
        write_trace_csv(&mut out, &trace).unwrap();
        let back = parse_trace_csv(std::str::from_utf8(&out).unwrap()).unwrap();
        let mut again = Vec::new();
        write_trace_csv(&mut again, &back).unwrap();
        assert_eq!(again, out);
    }
});
