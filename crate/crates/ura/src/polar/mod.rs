//! CRC-aided polar code: Bhattacharyya construction, encoder, and
//! successive-cancellation list decoding.

mod scl;

pub use scl::{scl_decode, DecodeCandidate};

use crate::error::{Result, UraError};

/// CRC-11 generator x^11 + x^10 + x^9 + x^5 + 1 (low 11 coefficients).
const CRC11_POLY: u16 = 0x621;
pub const CRC_WIDTH: usize = 11;

#[derive(Debug, Clone)]
pub struct PolarSpec {
    block_len: usize,
    info_len: usize,
    /// frozen[i] == true when synthetic channel i carries a frozen zero.
    frozen: Vec<bool>,
    /// Info positions in increasing index order.
    info_positions: Vec<usize>,
    crc_width: usize,
}

impl PolarSpec {
    /// Frozen-set construction by Bhattacharyya-parameter ordering of the
    /// synthetic channels, evolved from an initial erasure parameter in log
    /// domain. The N−K channels with the largest parameters are frozen.
    pub fn construct(block_len: usize, info_len: usize, design_erasure: f64) -> Result<Self> {
        if !block_len.is_power_of_two() || block_len < 2 {
            return Err(UraError::InvalidSize(format!(
                "block length {block_len} is not a power of two"
            )));
        }
        if info_len > block_len {
            return Err(UraError::InvalidSize(format!(
                "info length {info_len} exceeds block length {block_len}"
            )));
        }
        if !(0.0 < design_erasure && design_erasure < 1.0) {
            return Err(UraError::Domain(format!(
                "design erasure {design_erasure} outside (0,1)"
            )));
        }
        let stages = block_len.trailing_zeros();
        let mut log_z = vec![design_erasure.ln()];
        for _ in 0..stages {
            let mut next = Vec::with_capacity(log_z.len() * 2);
            for &lz in &log_z {
                // worse child: ln(2z - z^2) = lz + ln(2 - e^lz)
                let worse = lz + (2.0 - lz.exp()).ln();
                next.push(worse);
                next.push(2.0 * lz);
            }
            log_z = next;
        }
        let mut order: Vec<usize> = (0..block_len).collect();
        // Least reliable (largest z) first; index as deterministic tie-break.
        order.sort_by(|&a, &b| log_z[b].total_cmp(&log_z[a]).then(a.cmp(&b)));
        let mut frozen = vec![false; block_len];
        for &i in order.iter().take(block_len - info_len) {
            frozen[i] = true;
        }
        let info_positions = (0..block_len).filter(|&i| !frozen[i]).collect();
        Ok(Self {
            block_len,
            info_len,
            frozen,
            info_positions,
            crc_width: CRC_WIDTH,
        })
    }

    /// Initial Bhattacharyya parameter for a BPSK-AWGN design SNR in dB.
    pub fn design_erasure_from_snr_db(snr_db: f64) -> f64 {
        (-10f64.powf(snr_db / 10.0)).exp()
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn info_len(&self) -> usize {
        self.info_len
    }

    pub fn crc_width(&self) -> usize {
        self.crc_width
    }

    pub fn frozen_mask(&self) -> &[bool] {
        &self.frozen
    }

    pub fn info_positions(&self) -> &[usize] {
        &self.info_positions
    }

    /// Polar transform of `payload` placed on the info positions.
    pub fn encode(&self, payload: &[u8]) -> Result<Vec<u8>> {
        if payload.len() != self.info_len {
            return Err(UraError::Dimension(format!(
                "payload has {} bits, expected {}",
                payload.len(),
                self.info_len
            )));
        }
        let mut u = vec![0u8; self.block_len];
        for (&pos, &bit) in self.info_positions.iter().zip(payload) {
            u[pos] = bit & 1;
        }
        polar_transform(&mut u);
        Ok(u)
    }
}

/// In-place x = u · F^{⊗n} with the Arıkan kernel F = [[1,0],[1,1]].
pub(crate) fn polar_transform(bits: &mut [u8]) {
    let n = bits.len();
    let mut step = 1;
    while step < n {
        let mut start = 0;
        while start < n {
            for i in start..start + step {
                bits[i] ^= bits[i + step];
            }
            start += 2 * step;
        }
        step *= 2;
    }
}

pub fn crc11(bits: &[u8]) -> u16 {
    let mut reg: u16 = 0;
    for &b in bits {
        let feedback = ((reg >> (CRC_WIDTH - 1)) & 1) as u8 ^ (b & 1);
        reg = (reg << 1) & 0x7ff;
        if feedback == 1 {
            reg ^= CRC11_POLY;
        }
    }
    reg
}

/// Append the 11 CRC bits (MSB first) to `info`.
pub fn crc_append(info: &[u8]) -> Vec<u8> {
    let crc = crc11(info);
    let mut out = info.to_vec();
    out.extend((0..CRC_WIDTH).rev().map(|i| ((crc >> i) & 1) as u8));
    out
}

/// Check a payload of info bits followed by the 11-bit CRC.
pub fn crc_check(payload: &[u8]) -> bool {
    if payload.len() < CRC_WIDTH {
        return false;
    }
    let (info, tail) = payload.split_at(payload.len() - CRC_WIDTH);
    let crc = crc11(info);
    tail.iter()
        .zip((0..CRC_WIDTH).rev())
        .all(|(&b, i)| b == ((crc >> i) & 1) as u8)
}
