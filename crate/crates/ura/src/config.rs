use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Result, UraError};

/// All scheme parameters. Derived quantities (B_c, n_p, L, n) come from
/// accessor methods so the invariants hold by construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    /// B: information bits per message.
    pub total_bits: usize,
    /// B_p: bits selecting one pilot per stage.
    pub pilot_bits: usize,
    /// J: number of pilot stages.
    pub pilot_stages: usize,
    /// n_c: coded (QPSK) symbols per slot.
    pub coded_len: usize,
    /// S: slots per frame.
    pub slots: usize,
    /// M: receive antennas.
    pub antennas: usize,
    /// K_a: active users per frame.
    pub active_users: usize,
    /// P_p: pilot power per channel use.
    pub pilot_power: f64,
    /// P_c: coded power per channel use.
    pub coded_power: f64,
    /// gamma: Neyman-Pearson false-alarm level.
    pub np_level: f64,
    /// r: CRC bits.
    pub crc_bits: usize,
    /// Polar list decoder size.
    pub list_size: usize,
    /// Safety cap on outer SIC iterations per slot.
    pub max_iterations: usize,
}

impl Default for SystemConfig {
    fn default() -> Self {
        // The short-blocklength operating point: B=100, r=11, gamma=0.001,
        // list 64, (J, n_p, n_c) = (2, 32, 256).
        SystemConfig {
            total_bits: 100,
            pilot_bits: 5,
            pilot_stages: 2,
            coded_len: 256,
            slots: 1,
            antennas: 100,
            active_users: 10,
            pilot_power: 0.1,
            coded_power: 0.05,
            np_level: 0.001,
            crc_bits: 11,
            list_size: 64,
            max_iterations: 20,
        }
    }
}

impl SystemConfig {
    /// B_c = B - J*B_p.
    pub fn data_bits(&self) -> usize {
        self.total_bits - self.pilot_stages * self.pilot_bits
    }

    /// n_p = 2^{B_p}.
    pub fn pilot_len(&self) -> usize {
        1 << self.pilot_bits
    }

    /// L = n_c + J*n_p.
    pub fn slot_len(&self) -> usize {
        self.coded_len + self.pilot_stages * self.pilot_len()
    }

    /// Polar block length N = 2*n_c.
    pub fn block_len(&self) -> usize {
        2 * self.coded_len
    }

    /// Polar payload length K = B + r.
    pub fn info_len(&self) -> usize {
        self.total_bits + self.crc_bits
    }

    pub fn validate(&self) -> Result<()> {
        // Field ranges first; the derived quantities below only stay within
        // machine range for bounded fields.
        let mut problems = Vec::new();
        if !(1..=16).contains(&self.pilot_stages) {
            problems.push(format!("pilot_stages = {} outside 1..=16", self.pilot_stages));
        }
        if !(1..=16).contains(&self.pilot_bits) {
            problems.push(format!("pilot_bits = {} outside 1..=16", self.pilot_bits));
        }
        if self.total_bits == 0 || self.total_bits > 1 << 20 {
            problems.push(format!("total_bits = {} outside 1..=2^20", self.total_bits));
        }
        if self.coded_len == 0 || self.coded_len > 1 << 26 {
            problems.push(format!("coded_len = {} outside 1..=2^26", self.coded_len));
        }
        if !problems.is_empty() {
            return Err(UraError::Config(problems.join("; ")));
        }
        if self.pilot_stages * self.pilot_bits > self.total_bits {
            problems.push(format!(
                "pilot_stages*pilot_bits = {} exceeds total_bits = {}",
                self.pilot_stages * self.pilot_bits,
                self.total_bits
            ));
        }
        if !self.block_len().is_power_of_two() || self.block_len() < 2 {
            problems.push(format!(
                "block length 2*coded_len = {} is not a power of two",
                self.block_len()
            ));
        }
        if self.info_len() >= self.block_len() {
            problems.push(format!(
                "info length {} not below block length {}",
                self.info_len(),
                self.block_len()
            ));
        }
        if self.crc_bits != crate::polar::CRC_WIDTH {
            problems.push(format!(
                "crc_bits = {} unsupported (fixed CRC-11)",
                self.crc_bits
            ));
        }
        if !(self.pilot_power >= 0.0 && self.pilot_power.is_finite())
            || !(self.coded_power >= 0.0 && self.coded_power.is_finite())
        {
            problems.push("powers must be finite and nonnegative".into());
        }
        if !(0.0 < self.np_level && self.np_level < 1.0) {
            problems.push(format!("np_level = {} outside (0,1)", self.np_level));
        }
        if self.slots == 0 || self.antennas == 0 || self.list_size == 0 || self.max_iterations == 0
        {
            problems.push("slots, antennas, list_size, max_iterations must be positive".into());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(UraError::Config(problems.join("; ")))
        }
    }

    /// Solve B*ebn0 = J*n_p*P_p + n_c*P_c with P_c = ratio*P_p.
    pub fn powers_from_ebn0(&self, ebn0_linear: f64, power_ratio: f64) -> (f64, f64) {
        assert!(ebn0_linear > 0.0 && power_ratio > 0.0);
        let denom =
            (self.pilot_stages * self.pilot_len()) as f64 + power_ratio * self.coded_len as f64;
        let p_p = self.total_bits as f64 * ebn0_linear / denom;
        (p_p, power_ratio * p_p)
    }

    pub fn with_ebn0(&self, ebn0_linear: f64, power_ratio: f64) -> SystemConfig {
        let (p_p, p_c) = self.powers_from_ebn0(ebn0_linear, power_ratio);
        SystemConfig {
            pilot_power: p_p,
            coded_power: p_c,
            ..self.clone()
        }
    }

    /// E_b/N0 = L*P/B implied by the configured powers.
    pub fn ebn0_linear(&self) -> f64 {
        ((self.pilot_stages * self.pilot_len()) as f64 * self.pilot_power
            + self.coded_len as f64 * self.coded_power)
            / self.total_bits as f64
    }

    /// Parse a flat key=value config file; '#' starts a comment.
    pub fn from_file(path: &Path) -> Result<SystemConfig> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg = SystemConfig::default();
        cfg.apply_pairs(parse_key_values(&text)?)?;
        Ok(cfg)
    }

    pub fn apply_pairs(&mut self, pairs: BTreeMap<String, String>) -> Result<()> {
        for (key, value) in pairs {
            self.apply_pair(&key, &value)?;
        }
        Ok(())
    }

    pub fn apply_pair(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse()
                .map_err(|_| UraError::Config(format!("field {key}: cannot parse {v:?}")))
        }
        match key {
            "total_bits" | "b" => self.total_bits = num(key, value)?,
            "pilot_bits" | "b_p" => self.pilot_bits = num(key, value)?,
            "pilot_stages" | "j" => self.pilot_stages = num(key, value)?,
            "coded_len" | "n_c" => self.coded_len = num(key, value)?,
            "slots" | "s" => self.slots = num(key, value)?,
            "antennas" | "m" => self.antennas = num(key, value)?,
            "active_users" | "k_a" => self.active_users = num(key, value)?,
            "pilot_power" | "p_p" => self.pilot_power = num(key, value)?,
            "coded_power" | "p_c" => self.coded_power = num(key, value)?,
            "np_level" | "gamma" => self.np_level = num(key, value)?,
            "crc_bits" | "r" => self.crc_bits = num(key, value)?,
            "list_size" => self.list_size = num(key, value)?,
            "max_iterations" => self.max_iterations = num(key, value)?,
            other => {
                return Err(UraError::Config(format!("unknown config field {other:?}")));
            }
        }
        Ok(())
    }
}

pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            UraError::Config(format!("line {}: expected key=value, got {raw:?}", lineno + 1))
        })?;
        out.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(out)
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}
