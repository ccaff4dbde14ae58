#![no_main]
use libfuzzer_sys::fuzz_target;

use ch_spectral::io::{decode_snapshot, encode_snapshot};

fuzz_target!(|data: &[u8]| {
    if let Ok(snap) = decode_snapshot(data) {
        let bytes = encode_snapshot(&snap.field, snap.time);
        let again = decode_snapshot(&bytes).unwrap();
        assert_eq!(again.time.to_bits(), snap.time.to_bits());
        assert_eq!(again.field, snap.field);
        assert_eq!(encode_snapshot(&again.field, again.time), bytes);
    }
});
