//! Dense complex matrices and the small set of linear-algebra primitives the
//! rest of the library is built on.
//!
//! Everything here targets desk-scale problems (total dimension in the low
//! hundreds), so the representation is a plain row-major `Vec<Complex64>` and
//! the eigensolver is a cyclic Jacobi iteration rather than a LAPACK binding.

use std::fmt;
use std::ops::{Index, IndexMut};
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered list of subsystem dimensions `d_1..d_L`, each at least 2.
///
/// Composite indices are row-major with party 0 most significant: the basis
/// state `|i_0 i_1 .. i_{L-1}>` sits at `sum_k i_k * stride(k)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DimsSpec(Vec<usize>);

/// Cap on the composite dimension. Keeps any state a constructor is asked
/// for addressable in memory; sweeps hit the projection budget long before
/// this.
pub const MAX_TOTAL_DIM: usize = 1 << 24;

impl DimsSpec {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidInput("dims list must be non-empty".into()));
        }
        if let Some(d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidInput(format!(
                "every subsystem dimension must be at least 2, got {d}"
            )));
        }
        let total = dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d));
        if !matches!(total, Some(t) if t <= MAX_TOTAL_DIM) {
            return Err(Error::InvalidInput(format!(
                "total dimension of {} exceeds the supported maximum {MAX_TOTAL_DIM}",
                DimsSpec(dims)
            )));
        }
        Ok(DimsSpec(dims))
    }

    pub fn party_count(&self) -> usize {
        self.0.len()
    }

    /// Product of all subsystem dimensions.
    pub fn total_dim(&self) -> usize {
        self.0.iter().product()
    }

    pub fn dim(&self, party: usize) -> usize {
        self.0[party]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Stride of `party` in the composite index (party 0 most significant).
    pub fn stride(&self, party: usize) -> usize {
        self.0[party + 1..].iter().product()
    }

    /// Digits `i_0..i_{L-1}` of a composite index.
    pub fn decompose(&self, mut index: usize) -> Vec<usize> {
        let mut digits = vec![0; self.0.len()];
        for k in (0..self.0.len()).rev() {
            digits[k] = index % self.0[k];
            index /= self.0[k];
        }
        digits
    }

    pub fn compose(&self, digits: &[usize]) -> usize {
        debug_assert_eq!(digits.len(), self.0.len());
        let mut index = 0;
        for (k, &digit) in digits.iter().enumerate() {
            debug_assert!(digit < self.0[k]);
            index = index * self.0[k] + digit;
        }
        index
    }
}

impl fmt::Display for DimsSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
        write!(f, "{}", parts.join("x"))
    }
}

impl FromStr for DimsSpec {
    type Err = Error;

    /// Accepts `2x3x2` or `2,3,2`.
    fn from_str(s: &str) -> Result<Self> {
        let dims: std::result::Result<Vec<usize>, _> = s
            .split(['x', ','])
            .map(|part| part.trim().parse::<usize>())
            .collect();
        match dims {
            Ok(v) => DimsSpec::new(v),
            Err(_) => Err(Error::Parse(format!("cannot parse dims from {s:?}"))),
        }
    }
}

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    /// Builds from row slices; panics if the rows are ragged.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let nrows = rows.len();
        let ncols = if nrows == 0 { 0 } else { rows[0].len() };
        assert!(rows.iter().all(|r| r.len() == ncols), "ragged rows");
        ComplexMatrix {
            rows: nrows,
            cols: ncols,
            data: rows.concat(),
        }
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

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn mul(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            self.cols, rhs.rows,
            "matrix product shape mismatch: {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..rhs.cols {
                    out[(r, c)] += a * rhs.get(k, c);
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in add");
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a + b)
            .collect();
        ComplexMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in sub");
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a - b)
            .collect();
        ComplexMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scaled(&self, factor: Complex64) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * factor).collect(),
        }
    }

    pub fn transpose(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.cols, self.rows, |r, c| self.get(c, r))
    }

    /// Entrywise complex conjugate.
    pub fn conjugate(&self) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.conj()).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.cols, self.rows, |r, c| self.get(c, r).conj())
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square(), "trace of non-square matrix");
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    /// `sqrt(Tr(A A^dagger))`, i.e. the entrywise 2-norm.
    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, rhs: &ComplexMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in diff");
        self.data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest `|A[i][j] - conj(A[j][i])|` and where it occurs (row <= col).
    pub fn hermiticity_violation(&self) -> (f64, (usize, usize)) {
        assert!(self.is_square(), "hermiticity of non-square matrix");
        let mut worst = 0.0;
        let mut at = (0, 0);
        for r in 0..self.rows {
            for c in r..self.cols {
                let v = (self.get(r, c) - self.get(c, r).conj()).norm();
                if v > worst {
                    worst = v;
                    at = (r, c);
                }
            }
        }
        (worst, at)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.hermiticity_violation().0 <= tol
    }

    /// Root-sum-square of all off-diagonal entries.
    pub fn off_diagonal_norm(&self) -> f64 {
        let mut sum = 0.0;
        for r in 0..self.rows {
            for c in 0..self.cols {
                if r != c {
                    sum += self.get(r, c).norm_sqr();
                }
            }
        }
        sum.sqrt()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let v = self.get(r, c);
                write!(f, "{:+.4}{:+.4}i ", v.re, v.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Kronecker product; output index `(r_a * b.rows + r_b, c_a * b.cols + c_b)`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(a.rows() * b.rows(), a.cols() * b.cols());
    for ra in 0..a.rows() {
        for ca in 0..a.cols() {
            let f = a.get(ra, ca);
            if f == Complex64::new(0.0, 0.0) {
                continue;
            }
            for rb in 0..b.rows() {
                for cb in 0..b.cols() {
                    out[(ra * b.rows() + rb, ca * b.cols() + cb)] = f * b.get(rb, cb);
                }
            }
        }
    }
    out
}

fn check_operator_shape(m: &ComplexMatrix, dims: &DimsSpec, what: &str) -> Result<()> {
    if !m.is_square() || m.rows() != dims.total_dim() {
        return Err(Error::DimensionMismatch(format!(
            "{what}: operator is {}x{} but dims {} require {}x{}",
            m.rows(),
            m.cols(),
            dims,
            dims.total_dim(),
            dims.total_dim()
        )));
    }
    Ok(())
}

fn check_party_set(parties: &[usize], dims: &DimsSpec, what: &str) -> Result<Vec<usize>> {
    let mut sorted = parties.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != parties.len() {
        return Err(Error::InvalidInput(format!("{what}: duplicate party index")));
    }
    if let Some(&p) = sorted.iter().find(|&&p| p >= dims.party_count()) {
        return Err(Error::InvalidInput(format!(
            "{what}: party {p} out of range for {} parties",
            dims.party_count()
        )));
    }
    Ok(sorted)
}

/// Traces out every party not listed in `keep`; the result is indexed by the
/// kept parties in ascending party order.
pub fn partial_trace(m: &ComplexMatrix, dims: &DimsSpec, keep: &[usize]) -> Result<ComplexMatrix> {
    check_operator_shape(m, dims, "partial_trace")?;
    let keep = check_party_set(keep, dims, "partial_trace")?;
    if keep.is_empty() {
        return Err(Error::InvalidInput(
            "partial_trace: keep set must be non-empty (full trace is `trace`)".into(),
        ));
    }
    let traced: Vec<usize> = (0..dims.party_count()).filter(|p| !keep.contains(p)).collect();

    let keep_dim: usize = keep.iter().map(|&p| dims.dim(p)).product();
    let traced_dim: usize = traced.iter().map(|&p| dims.dim(p)).product();

    // Composite-index offsets contributed by each group of digits.
    let offsets = |parties: &[usize], count: usize| -> Vec<usize> {
        let mut offs = vec![0usize; count];
        for (i, off) in offs.iter_mut().enumerate() {
            let mut rem = i;
            let mut acc = 0;
            for &p in parties.iter().rev() {
                acc += (rem % dims.dim(p)) * dims.stride(p);
                rem /= dims.dim(p);
            }
            *off = acc;
        }
        offs
    };
    let keep_offsets = offsets(&keep, keep_dim);
    let traced_offsets = offsets(&traced, traced_dim);

    let mut out = ComplexMatrix::zeros(keep_dim, keep_dim);
    for r in 0..keep_dim {
        for c in 0..keep_dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for t in &traced_offsets {
                acc += m.get(keep_offsets[r] + t, keep_offsets[c] + t);
            }
            out[(r, c)] = acc;
        }
    }
    Ok(out)
}

/// Transposes the indices of the listed parties only.
pub fn partial_transpose(
    m: &ComplexMatrix,
    dims: &DimsSpec,
    parties: &[usize],
) -> Result<ComplexMatrix> {
    check_operator_shape(m, dims, "partial_transpose")?;
    let parties = check_party_set(parties, dims, "partial_transpose")?;
    let d = dims.total_dim();
    let mut out = ComplexMatrix::zeros(d, d);
    for r in 0..d {
        let rd = dims.decompose(r);
        for c in 0..d {
            let mut rd2 = rd.clone();
            let mut cd2 = dims.decompose(c);
            for &p in &parties {
                std::mem::swap(&mut rd2[p], &mut cd2[p]);
            }
            out[(dims.compose(&rd2), dims.compose(&cd2))] = m.get(r, c);
        }
    }
    Ok(out)
}

/// Hermiticity slack accepted by [`hermitian_eigen`].
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Off-diagonal Frobenius norm at which the Jacobi iteration stops.
const JACOBI_OFF_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in ascending order and a unitary whose columns are the
/// matching eigenvectors, so `A = V diag(w) V^dagger`. The input may deviate
/// from exact Hermiticity by at most [`HERMITICITY_TOL`]; it is symmetrized
/// before iterating. Iteration stops once the off-diagonal Frobenius norm
/// drops below 1e-13, or after 100 full sweeps.
pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "hermitian_eigen: matrix is {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let (violation, (r, c)) = m.hermiticity_violation();
    if violation > HERMITICITY_TOL {
        return Err(Error::NotHermitian { row: r, col: c, violation });
    }

    let n = m.rows();
    // Kill the sub-tolerance asymmetry so rotations see an exactly Hermitian matrix.
    let mut a = m.add(&m.dagger()).scaled(Complex64::new(0.5, 0.0));
    let mut v = ComplexMatrix::identity(n);

    for _sweep in 0..JACOBI_MAX_SWEEPS {
        if a.off_diagonal_norm() < JACOBI_OFF_TOL {
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let apq = a.get(p, q);
                let r = apq.norm();
                if r < 1e-300 {
                    continue;
                }
                // Absorb the phase of a_pq, then rotate as in the real case.
                let phase = apq / r;
                let app = a.get(p, p).re;
                let aqq = a.get(q, q).re;
                let tau = (aqq - app) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let cth = 1.0 / (1.0 + t * t).sqrt();
                let sth = t * cth;

                let sp = phase * sth; // right-multiply uses conj, left-multiply uses this
                // Columns p and q: A <- A J.
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, akp * cth - akq * sp.conj());
                    a.set(k, q, akp * sth + akq * cth * phase.conj());
                }
                // Rows p and q: A <- J^dagger A.
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, apk * cth - aqk * sp);
                    a.set(q, k, apk * sth + aqk * cth * phase);
                }
                // Accumulate the eigenvector basis: V <- V J.
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, vkp * cth - vkq * sp.conj());
                    v.set(k, q, vkp * sth + vkq * cth * phase.conj());
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a.get(i, i).re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap());

    let eigenvalues: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| v.get(r, order[c]));
    Ok((eigenvalues, vectors))
}
