//! Replays the checked-in fuzz corpus through the same round-trip checks.

use std::path::PathBuf;

use ch_spectral::config::ExperimentConfig;
use ch_spectral::io::{decode_snapshot, encode_snapshot, parse_trace_csv, write_trace_csv};

fn seeds(target: &str) -> Vec<PathBuf> {
    let dir: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "fuzz", "corpus", target].iter().collect();
    let mut out: Vec<PathBuf> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    out.sort();
    assert!(!out.is_empty());
    out
}

#[test]
fn snapshot_seeds_decode_and_round_trip() {
    for path in seeds("decode_snapshot") {
        let bytes = std::fs::read(&path).unwrap();
        let snap = decode_snapshot(&bytes).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let again = decode_snapshot(&encode_snapshot(&snap.field, snap.time)).unwrap();
        assert_eq!(again, snap);
    }
}

#[test]
fn config_seeds_parse_and_round_trip() {
    for path in seeds("parse_config") {
        let text = std::fs::read_to_string(&path).unwrap();
        let cfg = ExperimentConfig::parse(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let out = cfg.to_toml().unwrap();
        assert_eq!(ExperimentConfig::parse(&out).unwrap(), cfg);
    }
}

#[test]
fn trace_seeds_parse_and_round_trip() {
    for path in seeds("parse_trace_csv") {
        let text = std::fs::read_to_string(&path).unwrap();
        let trace = parse_trace_csv(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let mut out = Vec::new();
        write_trace_csv(&mut out, &trace).unwrap();
        let back = parse_trace_csv(std::str::from_utf8(&out).unwrap()).unwrap();
        let mut again = Vec::new();
        write_trace_csv(&mut again, &back).unwrap();
        assert_eq!(again, out);
    }
}
