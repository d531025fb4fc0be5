//! Special functions, complex linear algebra and random sampling shared by
//! the rest of the simulator.

mod matrix;
mod rng;
mod special;

pub use matrix::{ls_solve, ComplexMatrix};
pub use rng::{rng_from_seed, sub_seed, SimRng};
pub use special::{chi2_cdf, chi2_inv_cdf};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

/// Matrix of i.i.d. CN(0, variance) entries: real and imaginary parts are
/// independent N(0, variance/2).
pub fn sample_complex_gaussian(
    rows: usize,
    cols: usize,
    variance: f64,
    rng: &mut SimRng,
) -> ComplexMatrix {
    assert!(variance >= 0.0);
    let s = (variance / 2.0).sqrt();
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(s * re, s * im)
    })
}
