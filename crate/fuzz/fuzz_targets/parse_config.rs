#![no_main]
use libfuzzer_sys::fuzz_target;

use ch_spectral::config::ExperimentConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cfg) = ExperimentConfig::parse(text) {
        // resolving may fail on bad values but must not panic
        let _ = cfg.grid();
        let _ = cfg.step_count();
        if let Ok(out) = cfg.to_toml() {
            let back = ExperimentConfig::parse(&out).unwrap();
            assert_eq!(back.to_toml().unwrap(), out);
        }
    }
});
