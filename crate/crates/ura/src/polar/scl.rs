//! LLR-based successive-cancellation list decoding.
//!
//! Per-path state holds one active block per tree depth (2N-1 LLRs and
//! partial-sum bits), so path forks copy O(N) memory. LLR convention:
//! positive means bit 0 is more likely.

use super::{crc_check, PolarSpec};

#[derive(Debug, Clone)]
pub struct DecodeCandidate {
    /// Payload bits with the CRC tail stripped.
    pub info_bits: Vec<u8>,
    pub crc_ok: bool,
    /// Lower is better.
    pub path_metric: f64,
}

#[derive(Clone)]
struct Path {
    /// llr[d] is the active block at depth d (root = channel at d = 0),
    /// of length N >> d.
    llr: Vec<Vec<f64>>,
    /// left_bits[d] holds the partial sums of the completed left sibling
    /// at depth d while the right sibling is being decoded.
    left_bits: Vec<Vec<u8>>,
    /// Decided input bits u_0..u_{N-1}.
    u: Vec<u8>,
    pm: f64,
}

impl Path {
    fn new(channel_llrs: &[f64], depth: usize) -> Self {
        let n = channel_llrs.len();
        let mut llr = Vec::with_capacity(depth + 1);
        let mut left_bits = Vec::with_capacity(depth + 1);
        for d in 0..=depth {
            llr.push(if d == 0 {
                channel_llrs.to_vec()
            } else {
                vec![0.0; n >> d]
            });
            left_bits.push(vec![0u8; n >> d]);
        }
        Path {
            llr,
            left_bits,
            u: vec![0u8; n],
            pm: 0.0,
        }
    }

    /// Refresh the depth-d block for leaf phase `phi >> (depth - d)`.
    fn update_llr(&mut self, d: usize, phi: usize) {
        if d == 0 {
            return;
        }
        if phi % 2 == 0 {
            self.update_llr(d - 1, phi >> 1);
        }
        let (lower, upper) = self.llr.split_at_mut(d);
        let src = &lower[d - 1];
        let dst = &mut upper[0];
        let s = dst.len();
        if phi % 2 == 0 {
            for i in 0..s {
                dst[i] = f_minsum(src[i], src[i + s]);
            }
        } else {
            let left = &self.left_bits[d];
            for i in 0..s {
                dst[i] = g_combine(src[i], src[i + s], left[i]);
            }
        }
    }

    /// Propagate the completed block at depth d (in `block`) up the tree.
    fn store_bits(&mut self, d: usize, phi: usize, block: &[u8]) {
        if phi % 2 == 0 {
            self.left_bits[d][..block.len()].copy_from_slice(block);
        } else if d > 0 {
            let s = block.len();
            let mut parent = vec![0u8; 2 * s];
            for i in 0..s {
                parent[i] = self.left_bits[d][i] ^ block[i];
                parent[i + s] = block[i];
            }
            self.store_bits(d - 1, phi >> 1, &parent);
        }
    }
}

#[inline]
fn f_minsum(a: f64, b: f64) -> f64 {
    let sign = if (a < 0.0) != (b < 0.0) { -1.0 } else { 1.0 };
    sign * a.abs().min(b.abs())
}

#[inline]
fn g_combine(a: f64, b: f64, u_left: u8) -> f64 {
    if u_left == 1 {
        b - a
    } else {
        b + a
    }
}

/// Decode `llrs` into up to `list_size` candidates sorted by path metric.
/// The caller picks the best candidate passing its validation; an empty
/// CRC-passing set is a decoding failure, not an error.
pub fn scl_decode(llrs: &[f64], spec: &PolarSpec, list_size: usize) -> Vec<DecodeCandidate> {
    let n = spec.block_len();
    assert_eq!(llrs.len(), n, "LLR vector length");
    assert!(list_size >= 1);
    let depth = n.trailing_zeros() as usize;
    let frozen = spec.frozen_mask();

    let mut paths = vec![Path::new(llrs, depth)];
    for phi in 0..n {
        for p in paths.iter_mut() {
            p.update_llr(depth, phi);
        }
        if frozen[phi] {
            for p in paths.iter_mut() {
                let llr = p.llr[depth][0];
                if llr < 0.0 {
                    p.pm += -llr;
                }
                p.u[phi] = 0;
                p.store_bits(depth, phi, &[0]);
            }
        } else {
            // Fork every path on both bit values, keep the best list_size.
            let mut cands: Vec<(f64, usize, u8)> = Vec::with_capacity(paths.len() * 2);
            for (idx, p) in paths.iter().enumerate() {
                let llr = p.llr[depth][0];
                let pm0 = p.pm + if llr < 0.0 { -llr } else { 0.0 };
                let pm1 = p.pm + if llr > 0.0 { llr } else { 0.0 };
                cands.push((pm0, idx, 0));
                cands.push((pm1, idx, 1));
            }
            cands.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
            cands.truncate(list_size);

            let mut uses = vec![0usize; paths.len()];
            for &(_, idx, _) in &cands {
                uses[idx] += 1;
            }
            let mut sources: Vec<Option<Path>> = paths.into_iter().map(Some).collect();
            let mut next = Vec::with_capacity(cands.len());
            for (pm, idx, bit) in cands {
                uses[idx] -= 1;
                let mut p = if uses[idx] > 0 {
                    sources[idx].as_ref().unwrap().clone()
                } else {
                    sources[idx].take().unwrap()
                };
                p.pm = pm;
                p.u[phi] = bit;
                p.store_bits(depth, phi, &[bit]);
                next.push(p);
            }
            paths = next;
        }
    }

    paths.sort_by(|a, b| a.pm.total_cmp(&b.pm));
    paths
        .into_iter()
        .map(|p| {
            let payload: Vec<u8> = spec.info_positions().iter().map(|&i| p.u[i]).collect();
            let crc_ok = crc_check(&payload);
            let info_len = payload.len().saturating_sub(spec.crc_width());
            DecodeCandidate {
                info_bits: payload[..info_len].to_vec(),
                crc_ok,
                path_metric: p.pm,
            }
        })
        .collect()
}
