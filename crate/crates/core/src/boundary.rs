//! Boundary-condition matrices and the determinant functions `F_k`, `F_0`.
//!
//! Column `j` of a matrix is the vector of boundary functionals of the series
//! generated by the `j`-th unit seed, so `det A(s) = 0` exactly when some
//! seed combination satisfies every boundary condition at `x = +-x0`.

use num_complex::Complex64;

use crate::error::{Result, SpectraError};
use crate::params::SpectralParams;
use crate::series::{self, SeriesCoefficients};

type C64 = Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryMatrix {
    n: usize,
    /// Row-major entries.
    entries: Vec<C64>,
    /// Log-magnitude already factored out of the entries.
    pub scale: f64,
    pub params: SpectralParams,
    pub s: C64,
}

/// Determinant of the column-normalized matrix together with the log of the
/// factors removed: `det A = value * exp(log_scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Determinant {
    pub value: C64,
    pub log_scale: f64,
}

impl Determinant {
    /// `det A * exp(-reference)`: analytic in `s`, unlike `value`, whose
    /// normalizers vary with `|A|`.
    pub fn rescaled(&self, reference: f64) -> C64 {
        if self.value.norm() == 0.0 {
            return self.value;
        }
        self.value * (self.log_scale - reference).exp()
    }
}

impl BoundaryMatrix {
    pub fn from_columns(params: SpectralParams, s: C64, columns: &[Vec<C64>]) -> Self {
        let n = columns.len();
        let mut entries = vec![C64::new(0.0, 0.0); n * n];
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), n, "boundary matrix must be square");
            for (i, &v) in col.iter().enumerate() {
                entries[i * n + j] = v;
            }
        }
        Self { n, entries, scale: 0.0, params, s }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries[row * self.n + col]
    }

    pub fn column(&self, col: usize) -> Vec<C64> {
        (0..self.n).map(|i| self.get(i, col)).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Entries with every nonzero column divided by its largest magnitude,
    /// and the column normalizers.
    pub fn normalized(&self) -> (Vec<C64>, Vec<f64>) {
        let n = self.n;
        let mut out = self.entries.clone();
        let mut norms = vec![1.0; n];
        for (j, norm) in norms.iter_mut().enumerate() {
            let big = (0..n).map(|i| out[i * n + j].norm()).fold(0.0, f64::max);
            if big > 0.0 {
                *norm = big;
                for i in 0..n {
                    out[i * n + j] /= big;
                }
            }
        }
        (out, norms)
    }

    /// Null vector of the matrix in seed coordinates, from the smallest
    /// singular value of the column-normalized matrix.
    pub fn null_vector(&self) -> Vec<C64> {
        let (entries, norms) = self.normalized();
        let m = nalgebra::DMatrix::from_row_slice(self.n, self.n, &entries);
        let svd = m.svd(false, true);
        let v_t = svd.v_t.expect("requested right singular vectors");
        let (imin, _) =
            svd.singular_values.iter().enumerate().fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
        // rows of V^H are conjugated right singular vectors
        (0..self.n).map(|j| v_t[(imin, j)].conj() / norms[j]).collect()
    }
}

/// The four boundary functionals encoding `Psi(+-x0) = Psi'(+-x0) = 0` after
/// parity separation, in the same normalization as the literature:
/// `(sum c_m p_m, sum d_m p_m, sum 2m c_m p_m, sum (2m+1) d_m p_m)`
/// with `p_m = x0^(2m)`.
pub fn functionals_k(coeffs: &SeriesCoefficients, x0: f64) -> [C64; 4] {
    let mut out = [C64::new(0.0, 0.0); 4];
    let y = x0 * x0;
    let mut p = 1.0;
    for m in 0..coeffs.c.len() {
        let two_m = 2.0 * m as f64;
        out[0] += coeffs.c[m] * p;
        out[1] += coeffs.d[m] * p;
        out[2] += coeffs.c[m] * (two_m * p);
        out[3] += coeffs.d[m] * ((two_m + 1.0) * p);
        p *= y;
    }
    out
}

/// The two functionals encoding `Psi_0'(+-x0) = 0` for `k = 0`.
pub fn functionals_k0(coeffs: &SeriesCoefficients, x0: f64) -> [C64; 2] {
    let f = functionals_k(coeffs, x0);
    [f[2], f[3]]
}

fn check_finite(m: BoundaryMatrix) -> Result<BoundaryMatrix> {
    if m.is_finite() {
        Ok(m)
    } else {
        Err(SpectraError::NonFinite { s: m.s, m: m.params.m })
    }
}

/// 4x4 matrix over seeds `(a0, b0, c0, d0)`, `k != 0`.
pub fn assemble_k(params: &SpectralParams, s: C64) -> Result<BoundaryMatrix> {
    params.require_truncated()?;
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let mut columns = Vec::with_capacity(4);
    for j in 0..4 {
        let mut seeds = [zero; 4];
        seeds[j] = one;
        let coeffs = series::coeffs_k(params, s, seeds)?;
        columns.push(functionals_k(&coeffs, params.x0).to_vec());
    }
    check_finite(BoundaryMatrix::from_columns(*params, s, &columns))
}

/// 2x2 matrix over seeds `(a0, d0)`, `k = 0`.
pub fn assemble_k0(params: &SpectralParams, s: C64) -> Result<BoundaryMatrix> {
    params.require_truncated()?;
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let columns = [(one, zero), (zero, one)]
        .into_iter()
        .map(|(a0, d0)| Ok(functionals_k0(&series::coeffs_k0(params, s, a0, d0)?, params.x0).to_vec()))
        .collect::<Result<Vec<_>>>()?;
    check_finite(BoundaryMatrix::from_columns(*params, s, &columns))
}

/// Dispatches on `k`.
pub fn assemble(params: &SpectralParams, s: C64) -> Result<BoundaryMatrix> {
    if params.k == 0 {
        assemble_k0(params, s)
    } else {
        assemble_k(params, s)
    }
}

/// Determinant by LU with partial pivoting on the column-normalized matrix.
pub fn det_f(matrix: &BoundaryMatrix) -> Result<Determinant> {
    if !matrix.is_finite() {
        return Err(SpectraError::NonFinite { s: matrix.s, m: matrix.params.m });
    }
    let n = matrix.dim();
    let (mut a, norms) = matrix.normalized();
    let log_scale = matrix.scale + norms.iter().map(|v| v.ln()).sum::<f64>();
    let mut det = C64::new(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i * n + col].norm().total_cmp(&a[j * n + col].norm())).unwrap_or(col);
        let pv = a[pivot * n + col];
        if pv.norm() == 0.0 {
            return Ok(Determinant { value: C64::new(0.0, 0.0), log_scale });
        }
        if pivot != col {
            for j in 0..n {
                a.swap(col * n + j, pivot * n + j);
            }
            det = -det;
        }
        det *= pv;
        for i in col + 1..n {
            let factor = a[i * n + col] / pv;
            for j in col + 1..n {
                let u = a[col * n + j];
                a[i * n + j] -= factor * u;
            }
        }
    }
    Ok(Determinant { value: det, log_scale })
}

/// `F(s)` for the given problem: assemble then take the scaled determinant.
pub fn determinant(params: &SpectralParams, s: C64) -> Result<Determinant> {
    det_f(&assemble(params, s)?)
}
