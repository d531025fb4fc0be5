use crate::error::{Result, UraError};

/// Chi-squared CDF with `k` degrees of freedom, via the regularized lower
/// incomplete gamma function P(k/2, x/2).
pub fn chi2_cdf(x: f64, k: u32) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(UraError::Domain(format!("chi2_cdf: x = {x} < 0")));
    }
    if k == 0 {
        return Err(UraError::Domain("chi2_cdf: k = 0".into()));
    }
    Ok(reg_lower_gamma(k as f64 / 2.0, x / 2.0))
}

/// Inverse chi-squared CDF: smallest x with chi2_cdf(x, k) = p.
///
/// Newton iterations on the CDF with a bisection fallback when a step
/// leaves the current bracket.
pub fn chi2_inv_cdf(p: f64, k: u32) -> Result<f64> {
    if !(0.0..1.0).contains(&p) {
        return Err(UraError::Domain(format!("chi2_inv_cdf: p = {p} outside [0,1)")));
    }
    if k == 0 {
        return Err(UraError::Domain("chi2_inv_cdf: k = 0".into()));
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    let kf = k as f64;
    // Bracket [lo, hi] with cdf(lo) < p <= cdf(hi).
    let mut lo = 0.0f64;
    let mut hi = kf + 10.0 * (2.0 * kf).sqrt() + 10.0;
    while chi2_cdf(hi, k)? < p {
        hi *= 2.0;
    }
    // Wilson-Hilferty starting point.
    let z = normal_quantile(p);
    let t = 1.0 - 2.0 / (9.0 * kf) + z * (2.0 / (9.0 * kf)).sqrt();
    let mut x = (kf * t * t * t).clamp(1e-300, hi);
    for _ in 0..200 {
        let f = chi2_cdf(x, k)? - p;
        if f > 0.0 {
            hi = hi.min(x);
        } else {
            lo = lo.max(x);
        }
        if f.abs() < 1e-14 {
            break;
        }
        let pdf = chi2_pdf(x, kf);
        let step = if pdf > 0.0 { f / pdf } else { 0.0 };
        let mut next = x - step;
        if !(next > lo && next < hi) || pdf == 0.0 {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() < 1e-14 * x.max(1.0) {
            x = next;
            break;
        }
        x = next;
    }
    Ok(x)
}

fn chi2_pdf(x: f64, k: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let a = k / 2.0;
    ((a - 1.0) * (x / 2.0).ln() - x / 2.0 - ln_gamma(a)).exp() / 2.0
}

/// Regularized lower incomplete gamma P(a, x): series for x < a + 1,
/// continued fraction for the complement otherwise.
fn reg_lower_gamma(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x < a + 1.0 {
        gamma_series(a, x)
    } else {
        1.0 - gamma_cont_frac(a, x)
    }
}

fn gamma_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut sum = 1.0 / a;
    let mut del = sum;
    for _ in 0..1000 {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * 1e-16 {
            break;
        }
    }
    sum * (-x + a * x.ln() - ln_gamma(a)).exp()
}

/// Upper regularized incomplete gamma Q(a, x) by Lentz's continued fraction.
fn gamma_cont_frac(a: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..1000 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x + a * x.ln() - ln_gamma(a)).exp() * h
}

/// Lanczos log-gamma.
fn ln_gamma(x: f64) -> f64 {
    const COEF: [f64; 6] = [
        76.180_091_729_471_46,
        -86.505_320_329_416_77,
        24.014_098_240_830_91,
        -1.231_739_572_450_155,
        0.120_865_097_386_617_9e-2,
        -0.539_523_938_495_3e-5,
    ];
    let tmp = x + 5.5;
    let tmp = tmp - (x + 0.5) * tmp.ln();
    let mut ser = 1.000_000_000_190_015;
    for (j, c) in COEF.iter().enumerate() {
        ser += c / (x + 1.0 + j as f64);
    }
    -tmp + (2.506_628_274_631_000_5 * ser / x).ln()
}

/// Standard normal quantile (Acklam's rational approximation); used only as
/// a Newton starting point, so modest accuracy suffices.
fn normal_quantile(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    let plow = 0.02425;
    if p < plow {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - plow {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -normal_quantile(1.0 - p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cdf_at_origin_is_zero() {
        assert_eq!(chi2_cdf(0.0, 100).unwrap(), 0.0);
    }

    #[test]
    fn cdf_k2_closed_form() {
        // Gamma_2(x) = 1 - exp(-x/2); at x = 2 ln 2 this is 0.5.
        let x = 2.0 * std::f64::consts::LN_2;
        assert!((chi2_cdf(x, 2).unwrap() - 0.5).abs() < 1e-12);
        for &x in &[0.1, 1.0, 5.0, 20.0] {
            let expect = 1.0 - (-x / 2.0f64).exp();
            assert!((chi2_cdf(x, 2).unwrap() - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn cdf_against_statrs_oracle() {
        use statrs::distribution::{ChiSquared, ContinuousCDF};
        for &k in &[1u32, 2, 5, 10, 100, 200, 1024] {
            let dist = ChiSquared::new(k as f64).unwrap();
            for &x in &[0.5, 1.0, 10.0, 50.0, 100.0, 500.0, 1500.0, 4096.0] {
                let got = chi2_cdf(x, k).unwrap();
                let expect = dist.cdf(x);
                assert!(
                    (got - expect).abs() <= 1e-10,
                    "k={k} x={x}: got {got}, oracle {expect}"
                );
            }
        }
    }

    #[test]
    fn cdf_x100_k100_frozen_oracle_value() {
        // From the regularized incomplete gamma continued-fraction oracle
        // (statrs + mpmath agree): P(50, 50) = 0.5188083154720433.
        assert!((chi2_cdf(100.0, 100).unwrap() - 0.5188083154720433).abs() < 1e-10);
    }

    #[test]
    fn inv_cdf_basics() {
        assert_eq!(chi2_inv_cdf(0.0, 5).unwrap(), 0.0);
        // gamma = 0.5, k = 2: inverse of 1 - exp(-x/2) at 0.5 is 2 ln 2.
        let x = chi2_inv_cdf(0.5, 2).unwrap();
        assert!((x - 2.0 * std::f64::consts::LN_2).abs() < 1e-9);
    }

    #[test]
    fn inv_cdf_bisection_oracle_p999_k200() {
        // Bisection against chi2_cdf, run independently of the Newton path.
        let k = 200u32;
        let p = 0.999;
        let (mut lo, mut hi) = (0.0f64, 1e4f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if chi2_cdf(mid, k).unwrap() < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let oracle = 0.5 * (lo + hi);
        let got = chi2_inv_cdf(p, k).unwrap();
        assert!((got - oracle).abs() < 1e-7, "got {got}, oracle {oracle}");
    }

    #[test]
    fn mutual_inverses() {
        for &k in &[2u32, 20, 200] {
            for i in 1..1000 {
                let p = i as f64 / 1000.0;
                let x = chi2_inv_cdf(p, k).unwrap();
                let back = chi2_cdf(x, k).unwrap();
                assert!((back - p).abs() <= 1e-8, "k={k} p={p} back={back}");
            }
        }
    }

    #[test]
    fn inv_cdf_strictly_increasing() {
        let mut prev = -1.0;
        for i in 0..100 {
            let p = 0.001 + 0.998 * i as f64 / 99.0;
            let x = chi2_inv_cdf(p, 17).unwrap();
            assert!(x > prev);
            prev = x;
        }
    }

    #[test]
    fn domain_errors() {
        assert!(chi2_cdf(-1.0, 2).is_err());
        assert!(chi2_cdf(1.0, 0).is_err());
        assert!(chi2_inv_cdf(1.0, 2).is_err());
        assert!(chi2_inv_cdf(-0.1, 2).is_err());
    }
}
