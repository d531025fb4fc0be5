#![no_main]

use libfuzzer_sys::fuzz_target;
use ura::hadamard::HadamardCodebook;
use ura::polar::{crc_append, crc_check, crc11};

// Pilot-segment parsing and the CRC bit-stream codec on arbitrary input.
fuzz_target!(|data: &[u8]| {
    if data.is_empty() {
        return;
    }
    let bits = 1 + data[0] as usize % 10;
    let cb = HadamardCodebook::build(bits).unwrap();
    let segment: Vec<u8> = data[1..].iter().map(|&b| b & 1).collect();
    if let Ok(idx) = cb.pilot_row_index(&segment) {
        assert!(idx < cb.order());
        assert_eq!(cb.row_bits(idx), segment);
    }

    let payload = crc_append(&segment);
    assert!(crc_check(&payload));
    let _ = crc_check(&segment);
    let _ = crc11(data);
});
