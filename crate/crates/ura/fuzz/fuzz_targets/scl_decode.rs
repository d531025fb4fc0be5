#![no_main]

use libfuzzer_sys::fuzz_target;
use ura::polar::{scl_decode, PolarSpec};

// First three bytes choose (N, K, list size); the rest become LLRs,
// including non-finite values. The decoder must return at most list_size
// candidates with consistent payload lengths and never panic.
fuzz_target!(|data: &[u8]| {
    if data.len() < 3 {
        return;
    }
    let n = 1usize << (1 + data[0] % 6); // 2..=64
    let k = 1 + data[1] as usize % n;
    let list_size = 1 + data[2] as usize % 8;
    let Ok(spec) = PolarSpec::construct(n, k, 0.5) else {
        return;
    };
    let mut llrs = vec![0.0f64; n];
    for (slot, chunk) in llrs.iter_mut().zip(data[3..].chunks(2)) {
        let raw = i16::from_le_bytes([chunk[0], chunk.get(1).copied().unwrap_or(0)]);
        *slot = if raw == i16::MIN {
            f64::NAN
        } else {
            raw as f64 / 16.0
        };
    }
    let cands = scl_decode(&llrs, &spec, list_size);
    assert!(!cands.is_empty() && cands.len() <= list_size);
    for c in &cands {
        assert_eq!(c.info_bits.len(), k.saturating_sub(spec.crc_width()));
        assert!(c.info_bits.iter().all(|&b| b <= 1));
    }
});
