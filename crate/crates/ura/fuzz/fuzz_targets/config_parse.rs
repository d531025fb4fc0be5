#![no_main]

use libfuzzer_sys::fuzz_target;
use ura::config::{parse_key_values, SystemConfig};

// Arbitrary text through the config parser, field application and
// validation must never panic; a valid config must survive the derived
// accessors and an energy round trip.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(pairs) = parse_key_values(text) else {
        return;
    };
    let mut cfg = SystemConfig::default();
    if cfg.apply_pairs(pairs).is_err() {
        return;
    }
    if cfg.validate().is_ok() {
        let _ = cfg.data_bits();
        let _ = cfg.slot_len();
        let _ = cfg.info_len();
        let with = cfg.with_ebn0(1.5, 0.5);
        assert!((with.ebn0_linear() - 1.5).abs() < 1e-9);
    }
});
