//! Orthogonal pilot codebook built from the Sylvester Hadamard recursion
//! B_2 = [[1,1],[1,-1]], B_{2^i} = B_2 ⊗ B_{2^{i-1}}.

use crate::error::{Result, UraError};

/// n_p × n_p matrix of ±1 rows; row 0 is all +1 and distinct rows are
/// orthogonal. Pilot bit segments select rows by their big-endian integer
/// value.
#[derive(Debug, Clone)]
pub struct HadamardCodebook {
    order: usize,
    bits_per_row: usize,
    rows: Vec<Vec<i8>>,
}

impl HadamardCodebook {
    pub fn build(bits: usize) -> Result<Self> {
        if !(1..=16).contains(&bits) {
            return Err(UraError::InvalidSize(format!(
                "hadamard order 2^{bits} unsupported (need 1 <= bits <= 16)"
            )));
        }
        let order = 1usize << bits;
        // Sylvester construction: entry (r, c) = (-1)^{popcount(r & c)}.
        // Equal to the Kronecker recursion with B_2 = [[1,1],[1,-1]].
        let rows = (0..order)
            .map(|r| {
                (0..order)
                    .map(|c| if (r & c).count_ones() % 2 == 0 { 1i8 } else { -1i8 })
                    .collect()
            })
            .collect();
        Ok(Self {
            order,
            bits_per_row: bits,
            rows,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn row(&self, idx: usize) -> &[i8] {
        &self.rows[idx]
    }

    /// Row index for a pilot bit segment (big-endian integer value).
    pub fn pilot_row_index(&self, pilot_bits: &[u8]) -> Result<usize> {
        if pilot_bits.len() != self.bits_per_row {
            return Err(UraError::Dimension(format!(
                "pilot segment has {} bits, codebook needs {}",
                pilot_bits.len(),
                self.bits_per_row
            )));
        }
        Ok(pilot_bits.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize))
    }

    /// Inverse of `pilot_row_index`.
    pub fn row_bits(&self, idx: usize) -> Vec<u8> {
        (0..self.bits_per_row)
            .rev()
            .map(|i| ((idx >> i) & 1) as u8)
            .collect()
    }
}
