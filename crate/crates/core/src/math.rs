//! Scalar helpers and small dense linear algebra.
//!
//! Everything here works on `alloc` only. Matrices are tiny (n ≤ 7 in
//! practice) so the algorithms favour robustness over speed: Cholesky for
//! metrics, cyclic Jacobi for symmetric eigenproblems, partial-pivot LU for
//! the occasional small solve.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

pub use core::f64::consts::PI;

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}
#[inline]
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}
#[inline]
pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}
#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}
#[inline]
pub fn tan(x: f64) -> f64 {
    libm::tan(x)
}
#[inline]
pub fn atan(x: f64) -> f64 {
    libm::atan(x)
}
#[inline]
pub fn acos(x: f64) -> f64 {
    libm::acos(x)
}
#[inline]
pub fn sinh(x: f64) -> f64 {
    libm::sinh(x)
}
#[inline]
pub fn cosh(x: f64) -> f64 {
    libm::cosh(x)
}
#[inline]
pub fn tanh(x: f64) -> f64 {
    libm::tanh(x)
}
#[inline]
pub fn atanh(x: f64) -> f64 {
    libm::atanh(x)
}
#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}
#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}
#[inline]
pub fn log2(x: f64) -> f64 {
    libm::log2(x)
}
#[inline]
pub fn powi(x: f64, k: i32) -> f64 {
    let mut acc = 1.0;
    let mut base = if k < 0 { 1.0 / x } else { x };
    let mut e = k.unsigned_abs();
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base *= base;
        e >>= 1;
    }
    acc
}
#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

/// Binomial coefficient as a float.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut c = 1.0;
    for i in 0..k {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    c
}

/// Hausdorff measure of the unit `m`-sphere in `R^{m+1}` (ω_2 = 4π).
pub fn sphere_area(m: usize) -> f64 {
    // |S^0| = 2, |S^1| = 2π, |S^{m}| = 2π/(m-1) |S^{m-2}|
    match m {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI / (m as f64 - 1.0) * sphere_area(m - 2),
    }
}

/// Pairwise (cascade) summation. The result depends only on the order of
/// `values`, never on how the values were produced.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 32;
    if values.len() <= BLOCK {
        let mut s = 0.0;
        for v in values {
            s += *v;
        }
        return s;
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    sqrt(dot(a, a))
}

pub fn cross3(a: &[f64], b: &[f64]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn diag(d: &[f64]) -> Self {
        let mut m = Mat::zeros(d.len(), d.len());
        for (i, v) in d.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn from_rows(rows: usize, cols: usize, data: &[f64]) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length mismatch");
        Mat {
            rows,
            cols,
            data: data.to_vec(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Mat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn mul(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = Mat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    pub fn add(&self, rhs: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, rhs: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(abs(*v)))
    }

    /// Largest |A - Aᵀ| entry.
    pub fn asymmetry(&self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.rows {
            for j in 0..i {
                m = m.max(abs(self[(i, j)] - self[(j, i)]));
            }
        }
        m
    }

    /// `(A + Aᵀ)/2`.
    pub fn symmetrized(&self) -> Mat {
        Mat::from_fn(self.rows, self.cols, |i, j| 0.5 * (self[(i, j)] + self[(j, i)]))
    }

    /// Frobenius inner product `Σ A_ij B_ij`.
    pub fn frobenius_dot(&self, rhs: &Mat) -> f64 {
        self.data.iter().zip(&rhs.data).map(|(a, b)| a * b).sum()
    }

    /// Lower Cholesky factor `L` with `A = L Lᵀ`; `None` unless positive definite.
    pub fn cholesky(&self) -> Option<Mat> {
        let n = self.rows;
        let mut l = Mat::zeros(n, n);
        for j in 0..n {
            let mut d = self[(j, j)];
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            if !(d > 0.0) {
                return None;
            }
            let dj = sqrt(d);
            l[(j, j)] = dj;
            for i in (j + 1)..n {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / dj;
            }
        }
        Some(l)
    }

    /// Inverse of a lower-triangular matrix.
    pub fn lower_inverse(&self) -> Mat {
        let n = self.rows;
        let mut inv = Mat::zeros(n, n);
        for col in 0..n {
            for i in col..n {
                let mut s = if i == col { 1.0 } else { 0.0 };
                for k in col..i {
                    s -= self[(i, k)] * inv[(k, col)];
                }
                inv[(i, col)] = s / self[(i, i)];
            }
        }
        inv
    }

    /// Inverse of a symmetric positive definite matrix via Cholesky.
    pub fn spd_inverse(&self) -> Option<Mat> {
        let l = self.cholesky()?;
        let li = l.lower_inverse();
        Some(li.transpose().mul(&li))
    }

    /// Solve `A x = b` with partial pivoting. `None` when a pivot falls below
    /// `1e-14` relative to the largest entry.
    pub fn solve(&self, b: &[f64]) -> Option<Vec<f64>> {
        let n = self.rows;
        assert!(self.is_square() && b.len() == n);
        let mut a = self.clone();
        let mut x = b.to_vec();
        let scale = a.max_abs().max(f64::MIN_POSITIVE);
        for col in 0..n {
            let mut piv = col;
            for r in (col + 1)..n {
                if abs(a[(r, col)]) > abs(a[(piv, col)]) {
                    piv = r;
                }
            }
            if abs(a[(piv, col)]) <= 1e-14 * scale {
                return None;
            }
            if piv != col {
                for j in 0..n {
                    let t = a[(col, j)];
                    a[(col, j)] = a[(piv, j)];
                    a[(piv, j)] = t;
                }
                x.swap(col, piv);
            }
            for r in (col + 1)..n {
                let f = a[(r, col)] / a[(col, col)];
                if f == 0.0 {
                    continue;
                }
                for j in col..n {
                    a[(r, j)] -= f * a[(col, j)];
                }
                x[r] -= f * x[col];
            }
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in (i + 1)..n {
                s -= a[(i, j)] * x[j];
            }
            x[i] = s / a[(i, i)];
        }
        Some(x)
    }

    /// Determinant by partial-pivot elimination.
    pub fn det(&self) -> f64 {
        let n = self.rows;
        let mut a = self.clone();
        let mut det = 1.0;
        for col in 0..n {
            let mut piv = col;
            for r in (col + 1)..n {
                if abs(a[(r, col)]) > abs(a[(piv, col)]) {
                    piv = r;
                }
            }
            if a[(piv, col)] == 0.0 {
                return 0.0;
            }
            if piv != col {
                for j in 0..n {
                    let t = a[(col, j)];
                    a[(col, j)] = a[(piv, j)];
                    a[(piv, j)] = t;
                }
                det = -det;
            }
            det *= a[(col, col)];
            for r in (col + 1)..n {
                let f = a[(r, col)] / a[(col, col)];
                for j in col..n {
                    a[(r, j)] -= f * a[(col, j)];
                }
            }
        }
        det
    }
}

impl Index<(usize, usize)> for Mat {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Mat {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Eigenvalues (ascending) of a symmetric matrix by cyclic Jacobi rotations.
pub fn symmetric_eigenvalues(a: &Mat) -> Vec<f64> {
    let n = a.rows();
    let mut m = a.symmetrized();
    for _sweep in 0..64 {
        let mut off = 0.0;
        for i in 0..n {
            for j in 0..i {
                off += m[(i, j)] * m[(i, j)];
            }
        }
        let diag_scale: f64 = (0..n).map(|i| m[(i, i)] * m[(i, i)]).sum::<f64>();
        if off <= 1e-34 * diag_scale.max(f64::MIN_POSITIVE) || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + sqrt(1.0 + theta * theta))
                } else {
                    -1.0 / (-theta + sqrt(1.0 + theta * theta))
                };
                let c = 1.0 / sqrt(1.0 + t * t);
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| m[(i, i)]).collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    ev
}

/// Eigenvalues of the pencil `(S, G)` for symmetric `S` and SPD `G`, i.e. the
/// eigenvalues of `G⁻¹S`, computed as those of `L⁻¹ S L⁻ᵀ` with `G = L Lᵀ`.
pub fn generalized_eigenvalues(s: &Mat, g: &Mat) -> Option<Vec<f64>> {
    let l = g.cholesky()?;
    let li = l.lower_inverse();
    let c = li.mul(&s.symmetrized()).mul(&li.transpose());
    Some(symmetric_eigenvalues(&c))
}

/// Tensor norm squared `|S|²_g = tr(G⁻¹ S G⁻¹ S)` of a covariant 2-tensor.
pub fn tensor_norm_sq(s: &Mat, g_inv: &Mat) -> f64 {
    let m = g_inv.mul(s);
    m.mul(&m).trace()
}

/// Bilinear form `uᵀ S v`.
pub fn bilinear(s: &Mat, u: &[f64], v: &[f64]) -> f64 {
    dot(u, &s.mul_vec(v))
}
