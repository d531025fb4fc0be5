//! Iterative per-slot decoder: pilot detection, channel estimation, MRC,
//! LLR computation, CRC-aided list decoding and successive interference
//! cancellation, repeated until a full sweep over all pilot stages yields
//! no new messages.

use std::collections::HashSet;

use num_complex::Complex64;

use crate::detector::{detect, np_threshold};
use crate::error::{Result, UraError};
use crate::numerics::{ls_solve, ComplexMatrix};
use crate::phy::{Scheme, TxSignal, UserMessage};
use crate::polar::{scl_decode, DecodeCandidate};

/// ĥ = Y'_p b^H / (n_p sqrt(P_p)).
pub fn estimate_channel(y_p: &ComplexMatrix, pilot_row: &[i8], pilot_power: f64) -> Vec<Complex64> {
    let n_p = pilot_row.len();
    assert_eq!(y_p.cols(), n_p, "pilot block width");
    let scale = 1.0 / (n_p as f64 * pilot_power.sqrt());
    (0..y_p.rows())
        .map(|m| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (t, &b) in pilot_row.iter().enumerate() {
                acc += y_p.get(m, t) * b as f64;
            }
            acc * scale
        })
        .collect()
}

/// v̂ = ĥ^H Y'_c.
pub fn mrc_combine(h_hat: &[Complex64], y_c: &ComplexMatrix) -> Vec<Complex64> {
    assert_eq!(h_hat.len(), y_c.rows(), "antenna count");
    (0..y_c.cols())
        .map(|t| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (m, &h) in h_hat.iter().enumerate() {
                acc += h.conj() * y_c.get(m, t);
            }
            acc
        })
        .collect()
}

#[derive(Debug, Clone, Copy)]
pub struct PowerTerms {
    /// Signal power P_c ||ĥ||^4.
    pub signal: f64,
    /// Interference power P_c Σ_{k≠i} |ĥ^H ĥ_k|^2.
    pub interference: f64,
    /// Noise power ||ĥ||^2.
    pub noise: f64,
}

pub fn power_terms(
    h_self: &[Complex64],
    h_others: &[&[Complex64]],
    coded_power: f64,
) -> PowerTerms {
    let norm2: f64 = h_self.iter().map(|z| z.norm_sqr()).sum();
    let interference: f64 = h_others
        .iter()
        .map(|other| {
            let dot: Complex64 = h_self
                .iter()
                .zip(other.iter())
                .map(|(&a, &b)| a.conj() * b)
                .sum();
            dot.norm_sqr()
        })
        .sum();
    PowerTerms {
        signal: coded_power * norm2 * norm2,
        interference: coded_power * interference,
        noise: norm2,
    }
}

/// Soft demodulation of the MRC output into 2n_c LLRs in the order
/// [Im(β_1), Re(β_1), ..., Im(β_{n_c}), Re(β_{n_c})] with
/// β_t = 2 sqrt(σ_s^2) / (σ_n^2 + σ_I^2) · v̂_t.
pub fn compute_llrs(v_hat: &[Complex64], powers: &PowerTerms) -> Result<Vec<f64>> {
    let denom = powers.noise + powers.interference;
    if denom <= 0.0 {
        return Err(UraError::Domain(
            "degenerate LLR denominator: noise + interference power is zero".into(),
        ));
    }
    let scale = 2.0 * powers.signal.sqrt() / denom;
    let mut out = Vec::with_capacity(2 * v_hat.len());
    for v in v_hat {
        out.push(scale * v.im);
        out.push(scale * v.re);
    }
    Ok(out)
}

/// Reorder the [Im, Re] soft stream into codeword-bit order for the polar
/// decoder: bit 2t sets the real sign, bit 2t+1 the imaginary sign.
pub fn deinterleave_llrs(soft: &[f64]) -> Vec<f64> {
    debug_assert_eq!(soft.len() % 2, 0);
    let mut out = Vec::with_capacity(soft.len());
    for pair in soft.chunks_exact(2) {
        out.push(pair[1]);
        out.push(pair[0]);
    }
    out
}

/// Accept a candidate iff its CRC passes and its stage-j pilot bits map to
/// the detected row.
pub fn validate(
    candidate: &DecodeCandidate,
    scheme: &Scheme,
    stage: usize,
    expected_row: usize,
) -> bool {
    if !candidate.crc_ok {
        return false;
    }
    let b_p = scheme.config.pilot_bits;
    if candidate.info_bits.len() != scheme.config.total_bits {
        return false;
    }
    let segment = &candidate.info_bits[stage * b_p..(stage + 1) * b_p];
    scheme
        .codebook
        .pilot_row_index(segment)
        .map(|row| row == expected_row)
        .unwrap_or(false)
}

/// LS re-estimate of the decoded users' channels from the original Y and
/// subtraction of their reconstructed signals.
pub fn sic_update(y_original: &ComplexMatrix, decoded_signals: &[TxSignal]) -> Result<ComplexMatrix> {
    if decoded_signals.is_empty() {
        return Ok(y_original.clone());
    }
    let x = ComplexMatrix::from_rows(
        &decoded_signals
            .iter()
            .map(|s| s.samples.clone())
            .collect::<Vec<_>>(),
    );
    let h_hat = ls_solve(y_original, &x)?;
    Ok(y_original.sub(&h_hat.mul(&x)))
}

#[derive(Debug, Clone)]
pub struct DecodedList {
    /// Recovered B-bit messages, in acceptance order.
    pub messages: Vec<Vec<u8>>,
    /// Outer iterations executed.
    pub iterations: usize,
    /// SIC rounds skipped because the Gram matrix was singular.
    pub singular_gram_events: usize,
}

pub fn decode_slot(y: &ComplexMatrix, scheme: &Scheme) -> Result<DecodedList> {
    let cfg = &scheme.config;
    let n_p = cfg.pilot_len();
    let stages = cfg.pilot_stages;
    let slot_len = cfg.slot_len();
    assert_eq!(y.rows(), cfg.antennas);
    assert_eq!(y.cols(), slot_len);
    let threshold = np_threshold(cfg.np_level, cfg.antennas)?;

    let mut decoded_bits: Vec<Vec<u8>> = Vec::new();
    let mut decoded_signals: Vec<TxSignal> = Vec::new();
    let mut decoded_set: HashSet<Vec<u8>> = HashSet::new();
    let mut residual = y.clone();
    let mut singular_gram_events = 0usize;
    let mut iterations = 0usize;

    for _ in 0..cfg.max_iterations {
        iterations += 1;
        let mut progress = false;
        for j in 0..stages {
            let y_pj = residual.col_block(j * n_p, (j + 1) * n_p);
            let y_c = residual.col_block(stages * n_p, slot_len);
            let det = detect(&y_pj, &scheme.codebook, threshold)?;
            // Channel estimates for every detected row: interference terms
            // sum over all of them.
            let h_hats: Vec<(usize, Vec<Complex64>)> = det
                .detected_rows
                .iter()
                .map(|&row| {
                    (
                        row,
                        estimate_channel(&y_pj, scheme.codebook.row(row), cfg.pilot_power),
                    )
                })
                .collect();
            let mut newly: Vec<UserMessage> = Vec::new();
            for (idx, &(row, ref h_self)) in h_hats.iter().enumerate() {
                let others: Vec<&[Complex64]> = h_hats
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != idx)
                    .map(|(_, (_, h))| h.as_slice())
                    .collect();
                let powers = power_terms(h_self, &others, cfg.coded_power);
                let v_hat = mrc_combine(h_self, &y_c);
                let soft = match compute_llrs(&v_hat, &powers) {
                    Ok(s) => s,
                    Err(_) => continue, // zero-energy estimate, nothing to decode
                };
                let llrs = deinterleave_llrs(&soft);
                if let Some(msg) = try_decode(&llrs, scheme, j, row, &decoded_set) {
                    decoded_set.insert(msg.bits().to_vec());
                    newly.push(msg);
                }
            }
            if !newly.is_empty() {
                progress = true;
                for msg in newly {
                    decoded_signals.push(scheme.assemble_signal(&msg)?);
                    decoded_bits.push(msg.bits().to_vec());
                }
                // SIC always restarts from the original Y.
                match sic_update(y, &decoded_signals) {
                    Ok(r) => residual = r,
                    Err(UraError::SingularGram { .. }) => singular_gram_events += 1,
                    Err(e) => return Err(e),
                }
            }
        }
        if !progress {
            break;
        }
    }
    Ok(DecodedList {
        messages: decoded_bits,
        iterations,
        singular_gram_events,
    })
}

/// Decode with list 1 first and fall back to the configured list size; a
/// candidate is returned only if it validates against the detected row and
/// is not already in the decoded set.
fn try_decode(
    llrs: &[f64],
    scheme: &Scheme,
    stage: usize,
    row: usize,
    decoded_set: &HashSet<Vec<u8>>,
) -> Option<UserMessage> {
    for list_size in [1, scheme.config.list_size] {
        let cands = scl_decode(llrs, &scheme.polar, list_size);
        let hit = cands.iter().find(|c| {
            validate(c, scheme, stage, row) && !decoded_set.contains(&c.info_bits)
        });
        if let Some(c) = hit {
            return UserMessage::new(c.info_bits.clone(), &scheme.config).ok();
        }
        if scheme.config.list_size <= 1 {
            break;
        }
    }
    None
}
