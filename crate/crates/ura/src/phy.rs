//! Transmitter-side signal assembly and per-slot channel synthesis.

use num_complex::Complex64;
use rand::Rng;

use crate::config::SystemConfig;
use crate::error::{Result, UraError};
use crate::hadamard::HadamardCodebook;
use crate::numerics::{sample_complex_gaussian, ComplexMatrix, SimRng};
use crate::polar::{crc_append, PolarSpec};

/// One user's B-bit message, split as [w_{p_1} ... w_{p_J} w_c].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UserMessage {
    bits: Vec<u8>,
    pilot_bits: usize,
    pilot_stages: usize,
}

impl UserMessage {
    pub fn new(bits: Vec<u8>, config: &SystemConfig) -> Result<Self> {
        if bits.len() != config.total_bits {
            return Err(UraError::Dimension(format!(
                "message has {} bits, expected {}",
                bits.len(),
                config.total_bits
            )));
        }
        Ok(Self {
            bits,
            pilot_bits: config.pilot_bits,
            pilot_stages: config.pilot_stages,
        })
    }

    pub fn random(config: &SystemConfig, rng: &mut SimRng) -> Self {
        let bits = (0..config.total_bits).map(|_| rng.gen_range(0..2u8)).collect();
        Self::new(bits, config).expect("length by construction")
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    /// w_{p_j} for stage index j in 0..J.
    pub fn pilot_segment(&self, stage: usize) -> &[u8] {
        assert!(stage < self.pilot_stages);
        &self.bits[stage * self.pilot_bits..(stage + 1) * self.pilot_bits]
    }

    /// w_c, the trailing data part.
    pub fn data_segment(&self) -> &[u8] {
        &self.bits[self.pilot_stages * self.pilot_bits..]
    }
}

/// Length-L baseband signal [√P_p b_1, ..., √P_p b_J, v].
#[derive(Debug, Clone)]
pub struct TxSignal {
    pub samples: Vec<Complex64>,
}

/// Map code bits to QPSK: bit pair (2t, 2t+1) sets (real, imaginary) signs,
/// 0 -> +, scaled by sqrt(P_c/2).
pub fn qpsk_modulate(code_bits: &[u8], coded_power: f64) -> Result<Vec<Complex64>> {
    if code_bits.len() % 2 != 0 {
        return Err(UraError::Dimension(format!(
            "qpsk_modulate: odd bit count {}",
            code_bits.len()
        )));
    }
    let amp = (coded_power / 2.0).sqrt();
    Ok(code_bits
        .chunks_exact(2)
        .map(|pair| {
            let re = if pair[0] == 0 { amp } else { -amp };
            let im = if pair[1] == 0 { amp } else { -amp };
            Complex64::new(re, im)
        })
        .collect())
}

/// Immutable bundle of configuration, pilot codebook and polar code used by
/// transmitter, receiver and harness.
#[derive(Debug, Clone)]
pub struct Scheme {
    pub config: SystemConfig,
    pub codebook: HadamardCodebook,
    pub polar: PolarSpec,
}

impl Scheme {
    pub fn new(config: SystemConfig) -> Result<Self> {
        config.validate()?;
        let codebook = HadamardCodebook::build(config.pilot_bits)?;
        let polar = PolarSpec::construct(
            config.block_len(),
            config.info_len(),
            PolarSpec::design_erasure_from_snr_db(2.0),
        )?;
        Ok(Self {
            config,
            codebook,
            polar,
        })
    }

    /// Codebook row index selected by the stage-j pilot segment.
    pub fn pilot_row(&self, msg: &UserMessage, stage: usize) -> usize {
        self.codebook
            .pilot_row_index(msg.pilot_segment(stage))
            .expect("segment length fixed by config")
    }

    pub fn assemble_signal(&self, msg: &UserMessage) -> Result<TxSignal> {
        let cfg = &self.config;
        let mut samples = Vec::with_capacity(cfg.slot_len());
        let pilot_amp = cfg.pilot_power.sqrt();
        for j in 0..cfg.pilot_stages {
            let row = self.pilot_row(msg, j);
            samples.extend(
                self.codebook
                    .row(row)
                    .iter()
                    .map(|&b| Complex64::new(pilot_amp * b as f64, 0.0)),
            );
        }
        let payload = crc_append(msg.bits());
        let codeword = self.polar.encode(&payload)?;
        samples.extend(qpsk_modulate(&codeword, cfg.coded_power)?);
        Ok(TxSignal { samples })
    }

    /// Y = H X + Z with unit-variance noise.
    pub fn simulate_slot(
        &self,
        messages: &[UserMessage],
        rng: &mut SimRng,
    ) -> Result<(ComplexMatrix, SlotGroundTruth)> {
        self.simulate_slot_with_noise(messages, 1.0, rng)
    }

    pub fn simulate_slot_with_noise(
        &self,
        messages: &[UserMessage],
        noise_variance: f64,
        rng: &mut SimRng,
    ) -> Result<(ComplexMatrix, SlotGroundTruth)> {
        let cfg = &self.config;
        let k_l = messages.len();
        let channel = sample_complex_gaussian(cfg.antennas, k_l, 1.0, rng);
        let mut y = sample_complex_gaussian(cfg.antennas, cfg.slot_len(), noise_variance, rng);
        let mut signals = Vec::with_capacity(k_l);
        for (i, msg) in messages.iter().enumerate() {
            let tx = self.assemble_signal(msg)?;
            for m in 0..cfg.antennas {
                let h = channel.get(m, i);
                for (t, &s) in tx.samples.iter().enumerate() {
                    y.set(m, t, y.get(m, t) + h * s);
                }
            }
            signals.push(tx);
        }
        let mut collisions =
            vec![vec![0usize; self.codebook.order()]; cfg.pilot_stages];
        for msg in messages {
            for (j, counts) in collisions.iter_mut().enumerate() {
                counts[self.pilot_row(msg, j)] += 1;
            }
        }
        Ok((
            y,
            SlotGroundTruth {
                messages: messages.to_vec(),
                channel,
                signals,
                collisions,
            },
        ))
    }
}

/// Per-slot truth kept alongside the received matrix for oracle checks.
#[derive(Debug, Clone)]
pub struct SlotGroundTruth {
    pub messages: Vec<UserMessage>,
    /// H, M x K_l.
    pub channel: ComplexMatrix,
    pub signals: Vec<TxSignal>,
    /// collisions[j][row] = m_{row,j}, users picking that row in stage j.
    pub collisions: Vec<Vec<usize>>,
}
