use num_complex::Complex64;

use crate::error::{Result, UraError};

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let nr = rows.len();
        let nc = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == nc));
        Self {
            rows: nr,
            cols: nc,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Column block [c0, c1).
    pub fn col_block(&self, c0: usize, c1: usize) -> ComplexMatrix {
        assert!(c0 <= c1 && c1 <= self.cols);
        ComplexMatrix::from_fn(self.rows, c1 - c0, |r, c| self.get(r, c0 + c))
    }

    /// self * other
    pub fn mul(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, other.rows, "matmul dims");
        let mut out = ComplexMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[r * other.cols..(r + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        out
    }

    /// self * other^H
    pub fn mul_conj_transpose(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, other.cols, "matmul dims");
        ComplexMatrix::from_fn(self.rows, other.rows, |r, c| {
            self.row(r)
                .iter()
                .zip(other.row(c))
                .map(|(&a, &b)| a * b.conj())
                .sum()
        })
    }

    pub fn sub(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// LS solve of Y ≈ H·X for H: returns Y·X^H·(X·X^H)^{-1}.
///
/// Y is M×L, X is K×L with K ≤ L and full row rank. Fails with
/// `SingularGram` when the Gram matrix X·X^H is numerically singular
/// (pivot-ratio condition estimate above 1e12).
pub fn ls_solve(y: &ComplexMatrix, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    if y.cols() != x.cols() {
        return Err(UraError::Dimension(format!(
            "ls_solve: Y is {}x{}, X is {}x{}",
            y.rows(),
            y.cols(),
            x.rows(),
            x.cols()
        )));
    }
    let k = x.rows();
    if k == 0 {
        return Ok(ComplexMatrix::zeros(y.rows(), 0));
    }
    let gram = x.mul_conj_transpose(x); // K x K Hermitian PSD
    let chol = cholesky(&gram)?;
    let yxh = y.mul_conj_transpose(x); // M x K
    // Solve result * G = Y X^H, i.e. G^H w^H = (Y X^H)^H column-wise.
    // G Hermitian: G = L L^H. For each row r of yxh solve L L^H z = row^T
    // with the system transposed: row * G^{-1} = (G^{-1} row^H)^H.
    let mut out = ComplexMatrix::zeros(y.rows(), k);
    let mut rhs = vec![Complex64::new(0.0, 0.0); k];
    for r in 0..y.rows() {
        for c in 0..k {
            rhs[c] = yxh.get(r, c).conj();
        }
        let z = chol.solve(&rhs);
        for c in 0..k {
            out.set(r, c, z[c].conj());
        }
    }
    Ok(out)
}

struct Cholesky {
    n: usize,
    l: Vec<Complex64>, // lower triangular, row-major n x n
}

/// Cholesky of a Hermitian positive-definite matrix with a pivot-ratio
/// condition estimate; errors when the estimate exceeds 1e12.
fn cholesky(a: &ComplexMatrix) -> Result<Cholesky> {
    let n = a.rows();
    assert_eq!(n, a.cols());
    let mut l = vec![Complex64::new(0.0, 0.0); n * n];
    let mut min_piv = f64::INFINITY;
    let mut max_piv: f64 = 0.0;
    for i in 0..n {
        for j in 0..=i {
            let mut s = a.get(i, j);
            for p in 0..j {
                s -= l[i * n + p] * l[j * n + p].conj();
            }
            if i == j {
                let d = s.re;
                if d <= 0.0 || !d.is_finite() {
                    return Err(UraError::SingularGram { cond: f64::INFINITY });
                }
                min_piv = min_piv.min(d);
                max_piv = max_piv.max(d);
                l[i * n + i] = Complex64::new(d.sqrt(), 0.0);
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    let cond = max_piv / min_piv;
    if cond > 1e12 {
        return Err(UraError::SingularGram { cond });
    }
    Ok(Cholesky { n, l })
}

impl Cholesky {
    /// Solve L L^H z = b.
    fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let mut z = b.to_vec();
        for i in 0..n {
            for j in 0..i {
                let lij = self.l[i * n + j];
                z[i] = z[i] - lij * z[j];
            }
            z[i] /= self.l[i * n + i];
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let lji = self.l[j * n + i].conj();
                z[i] = z[i] - lji * z[j];
            }
            z[i] /= self.l[i * n + i];
        }
        z
    }
}
