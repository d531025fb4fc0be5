//! Neyman-Pearson detection of active Hadamard rows in one pilot segment,
//! with the closed-form threshold, false-alarm and detection probabilities.

use num_complex::Complex64;

use crate::error::{Result, UraError};
use crate::hadamard::HadamardCodebook;
use crate::numerics::{chi2_cdf, chi2_inv_cdf, ComplexMatrix};

#[derive(Debug, Clone)]
pub struct DetectionResult {
    /// Row indices with statistic >= threshold, strongest first.
    pub detected_rows: Vec<usize>,
    /// Per-row test statistic ||u||^2 with u = Y_p b^H / sqrt(n_p).
    pub statistics: Vec<f64>,
}

/// Threshold of the gamma-level test: 0.5 * Gamma^{-1}_{2M}(1 - gamma).
pub fn np_threshold(gamma: f64, antennas: usize) -> Result<f64> {
    if !(0.0 < gamma && gamma < 1.0) {
        return Err(UraError::Domain(format!("gamma = {gamma} outside (0,1)")));
    }
    if antennas == 0 {
        return Err(UraError::Domain("antennas = 0".into()));
    }
    Ok(0.5 * chi2_inv_cdf(1.0 - gamma, 2 * antennas as u32)?)
}

/// Statistic ||Y_p b^H||^2 / n_p for one codebook row.
pub fn row_statistic(y_p: &ComplexMatrix, row: &[i8]) -> f64 {
    let n_p = row.len();
    let mut acc = 0.0;
    for m in 0..y_p.rows() {
        let mut u = Complex64::new(0.0, 0.0);
        for (t, &b) in row.iter().enumerate() {
            // b is real ±1, so conjugation is a no-op.
            u += y_p.get(m, t) * b as f64;
        }
        acc += u.norm_sqr();
    }
    acc / n_p as f64
}

/// Threshold every codebook row's energy statistic against `threshold`.
pub fn detect(
    y_p: &ComplexMatrix,
    codebook: &HadamardCodebook,
    threshold: f64,
) -> Result<DetectionResult> {
    if y_p.cols() != codebook.order() {
        return Err(UraError::Dimension(format!(
            "pilot block has {} columns, codebook order {}",
            y_p.cols(),
            codebook.order()
        )));
    }
    let statistics: Vec<f64> = (0..codebook.order())
        .map(|i| row_statistic(y_p, codebook.row(i)))
        .collect();
    let mut detected_rows: Vec<usize> = (0..codebook.order())
        .filter(|&i| statistics[i] >= threshold)
        .collect();
    detected_rows.sort_by(|&a, &b| statistics[b].total_cmp(&statistics[a]).then(a.cmp(&b)));
    Ok(DetectionResult {
        detected_rows,
        statistics,
    })
}

/// P_F = 1 - Gamma_{2M}(2*threshold).
pub fn analytic_pf(antennas: usize, threshold: f64) -> Result<f64> {
    if threshold < 0.0 {
        return Err(UraError::Domain(format!("threshold = {threshold} < 0")));
    }
    Ok(1.0 - chi2_cdf(2.0 * threshold, 2 * antennas as u32)?)
}

/// P_D for collision count m:
/// 1 - Gamma_{2M}( Gamma^{-1}_{2M}(1-gamma) / (1 + m*n_p*P_p) ).
pub fn analytic_pd(
    gamma: f64,
    antennas: usize,
    pilot_len: usize,
    pilot_power: f64,
    collisions: usize,
) -> Result<f64> {
    if collisions < 1 {
        return Err(UraError::Domain("collision count m must be >= 1".into()));
    }
    let k = 2 * antennas as u32;
    let q = chi2_inv_cdf(1.0 - gamma, k)?;
    let scale = 1.0 + collisions as f64 * pilot_len as f64 * pilot_power;
    Ok(1.0 - chi2_cdf(q / scale, k)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{rng_from_seed, sample_complex_gaussian};

    #[test]
    fn threshold_closed_form_m1() {
        // gamma = 0.5, M = 1: 0.5 * Gamma^{-1}_2(0.5) = ln 2.
        let t = np_threshold(0.5, 1).unwrap();
        assert!((t - std::f64::consts::LN_2).abs() < 1e-9);
    }

    #[test]
    fn threshold_decreases_in_gamma() {
        let mut prev = f64::INFINITY;
        for &g in &[0.001, 0.01, 0.1, 0.5, 0.9] {
            let t = np_threshold(g, 50).unwrap();
            assert!(t < prev);
            prev = t;
        }
        assert!(np_threshold(0.0, 4).is_err());
        assert!(np_threshold(0.1, 0).is_err());
    }

    #[test]
    fn threshold_bisection_oracle() {
        // gamma = 0.001, M = 50: bisect chi2_cdf(., 100) to 0.999 directly.
        let (mut lo, mut hi) = (0.0f64, 1e4f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if chi2_cdf(mid, 100).unwrap() < 0.999 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let t = np_threshold(0.001, 50).unwrap();
        assert!((t - 0.25 * (lo + hi)).abs() < 1e-6);
    }

    #[test]
    fn zero_input_detects_nothing() {
        let cb = HadamardCodebook::build(4).unwrap();
        let y = ComplexMatrix::zeros(8, 16);
        let t = np_threshold(0.001, 8).unwrap();
        let det = detect(&y, &cb, t).unwrap();
        assert!(det.detected_rows.is_empty());
        assert!(det.statistics.iter().all(|&s| s == 0.0));
    }

    #[test]
    fn noiseless_single_user_statistic_exact() {
        // Y_p = sqrt(P_p) h b_i: statistic_i = n_p P_p ||h||^2, others 0.
        let cb = HadamardCodebook::build(4).unwrap();
        let n_p = 16;
        let p_p = 0.3f64;
        let m = 6;
        let mut rng = rng_from_seed(21);
        let h = sample_complex_gaussian(m, 1, 1.0, &mut rng);
        let row = 9usize;
        let y = ComplexMatrix::from_fn(m, n_p, |r, c| {
            h.get(r, 0) * (p_p.sqrt() * cb.row(row)[c] as f64)
        });
        let det = detect(&y, &cb, np_threshold(0.001, m).unwrap()).unwrap();
        let h_norm2: f64 = (0..m).map(|r| h.get(r, 0).norm_sqr()).sum();
        assert!(
            (det.statistics[row] - n_p as f64 * p_p * h_norm2).abs() < 1e-9 * h_norm2
        );
        for (i, &s) in det.statistics.iter().enumerate() {
            if i != row {
                assert!(s.abs() < 1e-9);
            }
        }
        assert_eq!(det.detected_rows, vec![row]);
    }

    #[test]
    fn antenna_permutation_invariance() {
        let cb = HadamardCodebook::build(3).unwrap();
        let mut rng = rng_from_seed(22);
        let y = sample_complex_gaussian(5, 8, 1.0, &mut rng);
        let perm = [3usize, 0, 4, 1, 2];
        let y_perm = ComplexMatrix::from_fn(5, 8, |r, c| y.get(perm[r], c));
        let t = np_threshold(0.01, 5).unwrap();
        let a = detect(&y, &cb, t).unwrap();
        let b = detect(&y_perm, &cb, t).unwrap();
        for i in 0..8 {
            assert!((a.statistics[i] - b.statistics[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn pf_definitional_identities() {
        assert!((analytic_pf(10, 0.0).unwrap() - 1.0).abs() < 1e-12);
        for &(g, m) in &[(0.001, 4usize), (0.01, 50), (0.2, 100)] {
            let t = np_threshold(g, m).unwrap();
            assert!((analytic_pf(m, t).unwrap() - g).abs() < 1e-9);
        }
        // Monotone to zero for large thresholds.
        let mut prev = 1.0;
        for i in 1..20 {
            let pf = analytic_pf(4, i as f64 * 3.0).unwrap();
            assert!(pf <= prev);
            prev = pf;
        }
        assert!(prev < 1e-6);
    }

    #[test]
    fn pd_zero_power_equals_gamma() {
        for &(g, m) in &[(0.001, 50usize), (0.05, 4)] {
            let pd = analytic_pd(g, m, 32, 0.0, 1).unwrap();
            assert!((pd - g).abs() < 1e-9);
        }
    }

    #[test]
    fn pd_knee_points_from_reported_operating_region() {
        // P_D saturates toward 1 once the pilot power clears the knee.
        let pd1 = analytic_pd(0.001, 50, 256, 0.005, 1).unwrap();
        assert!(pd1 >= 0.99, "pd = {pd1}");
        // Exact value at the (M=100, n_p=32) knee; 0.99 needs P_p >~ 0.0223.
        let pd2 = analytic_pd(0.001, 100, 32, 0.02, 1).unwrap();
        assert!((pd2 - 0.9736054711444084).abs() < 1e-10, "pd = {pd2}");
        let pd3 = analytic_pd(0.001, 100, 32, 0.025, 1).unwrap();
        assert!(pd3 >= 0.99, "pd = {pd3}");
    }

    #[test]
    fn pd_monotone_in_each_argument() {
        let base = analytic_pd(0.001, 20, 32, 0.01, 1).unwrap();
        assert!(analytic_pd(0.001, 40, 32, 0.01, 1).unwrap() > base);
        assert!(analytic_pd(0.001, 20, 64, 0.01, 1).unwrap() > base);
        assert!(analytic_pd(0.001, 20, 32, 0.02, 1).unwrap() > base);
        assert!(analytic_pd(0.001, 20, 32, 0.01, 2).unwrap() > base);
        assert!(analytic_pd(0.001, 20, 32, 0.01, 0).is_err());
    }

    #[test]
    fn null_statistic_is_half_chi2() {
        // KS test of ||u||^2 against 0.5*chi2_{2M} over pure-noise trials.
        for &m in &[4usize, 50] {
            let mut rng = rng_from_seed(23 + m as u64);
            let trials = 20_000;
            let mut stats: Vec<f64> = (0..trials)
                .map(|_| {
                    let y = sample_complex_gaussian(m, 8, 1.0, &mut rng);
                    // One fixed ±1 row; distribution is row-independent.
                    row_statistic(&y, &[1, -1, 1, 1, -1, 1, -1, -1])
                })
                .collect();
            stats.sort_by(f64::total_cmp);
            let mut dmax = 0.0f64;
            for (i, &s) in stats.iter().enumerate() {
                let cdf = chi2_cdf(2.0 * s, 2 * m as u32).unwrap();
                let emp_hi = (i + 1) as f64 / trials as f64;
                let emp_lo = i as f64 / trials as f64;
                dmax = dmax.max((cdf - emp_lo).abs()).max((cdf - emp_hi).abs());
            }
            // KS critical value at level 0.01: 1.63 / sqrt(n).
            let crit = 1.63 / (trials as f64).sqrt();
            assert!(dmax < crit, "M={m}: KS statistic {dmax} >= {crit}");
        }
    }
}
