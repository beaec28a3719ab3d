//! Antisymmetric rotation generators and the dichotomic observables they
//! embed into higher-dimensional systems.
//!
//! A generator `L` for the index pair `(j, k)` is the M x M matrix with
//! `L[j][k] = 1`, `L[k][j] = -1` and zeros elsewhere. There are M(M-1)/2 of
//! them; their list position in lexicographic (j, k) order is the label used
//! in sweep records. Each one selects a two-dimensional slice of an
//! M-dimensional system, and the observables below act only on that slice.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

/// Unit-vector slack accepted for observable directions.
pub const UNIT_TOL: f64 = 1e-12;

/// One antisymmetric generator, identified by `(dim, j, k)` with `j < k < dim`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    dim: usize,
    j: usize,
    k: usize,
}

impl Generator {
    pub fn new(dim: usize, j: usize, k: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidInput(format!(
                "generator dimension must be at least 2, got {dim}"
            )));
        }
        if j >= k || k >= dim {
            return Err(Error::InvalidInput(format!(
                "generator indices must satisfy j < k < dim, got j={j}, k={k}, dim={dim}"
            )));
        }
        Ok(Generator { dim, j, k })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// The antisymmetric matrix itself.
    pub fn matrix(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.dim, self.dim);
        m[(self.j, self.k)] = Complex64::new(1.0, 0.0);
        m[(self.k, self.j)] = Complex64::new(-1.0, 0.0);
        m
    }

    /// Position of this generator in [`enumerate_generators`] order.
    pub fn index(&self) -> usize {
        // Pairs with smaller j come first; within fixed j, ascending k.
        let before_j: usize = (0..self.j).map(|r| self.dim - 1 - r).sum();
        before_j + (self.k - self.j - 1)
    }
}

/// All M(M-1)/2 generators in lexicographic (j, k) order.
pub fn enumerate_generators(dim: usize) -> Result<Vec<Generator>> {
    if dim < 2 {
        return Err(Error::InvalidInput(format!(
            "generator dimension must be at least 2, got {dim}"
        )));
    }
    let mut gens = Vec::with_capacity(dim * (dim - 1) / 2);
    for j in 0..dim {
        for k in j + 1..dim {
            gens.push(Generator { dim, j, k });
        }
    }
    Ok(gens)
}

fn check_unit(a: [f64; 3], what: &str) -> Result<()> {
    let norm = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    if (norm - 1.0).abs() > UNIT_TOL {
        return Err(Error::InvalidInput(format!(
            "{what} must be a unit vector, got norm {norm:.15}"
        )));
    }
    Ok(())
}

/// Dichotomic observable for direction `a`, supported on the generator's
/// 2x2 slice: rows/columns (j, k) carry
/// `[[-a3, a1 + i a2], [a1 - i a2, a3]]`, everything else is zero.
///
/// The spectrum is {-1, +1} on the slice and 0 on its complement.
pub fn embed_observable(a: [f64; 3], g: &Generator) -> Result<ComplexMatrix> {
    check_unit(a, "observable direction")?;
    let mut m = ComplexMatrix::zeros(g.dim, g.dim);
    m[(g.j, g.j)] = Complex64::new(-a[2], 0.0);
    m[(g.j, g.k)] = Complex64::new(a[0], a[1]);
    m[(g.k, g.j)] = Complex64::new(a[0], -a[1]);
    m[(g.k, g.k)] = Complex64::new(a[2], 0.0);
    Ok(m)
}

/// The embedded observable conjugated by its generator: `L A L^dagger`.
///
/// Applying the conjugation twice returns the embedded observable, because
/// `L^2` restricted to the slice is minus the identity.
pub fn tilde_observable(a: [f64; 3], g: &Generator) -> Result<ComplexMatrix> {
    let embedded = embed_observable(a, g)?;
    let l = g.matrix();
    Ok(l.mul(&embedded).mul(&l.dagger()))
}

/// Two observable directions per side.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct MeasurementSetting {
    pub a1: [f64; 3],
    pub a2: [f64; 3],
    pub b1: [f64; 3],
    pub b2: [f64; 3],
}

impl MeasurementSetting {
    pub fn new(a1: [f64; 3], a2: [f64; 3], b1: [f64; 3], b2: [f64; 3]) -> Result<Self> {
        check_unit(a1, "a1")?;
        check_unit(a2, "a2")?;
        check_unit(b1, "b1")?;
        check_unit(b2, "b2")?;
        Ok(MeasurementSetting { a1, a2, b1, b2 })
    }
}

/// The swept Bell combination
/// `A~1 (x) B~1 + A~1 (x) B~2 + A~2 (x) B~1 - A~2 (x) B~2`
/// built from conjugated observables on the two generators' slices.
///
/// Its operator norm never exceeds 2*sqrt(2); expectation values on product
/// states stay within [-2, 2].
pub fn bell_operator(
    ga: &Generator,
    gb: &Generator,
    setting: &MeasurementSetting,
) -> Result<ComplexMatrix> {
    let a1 = tilde_observable(setting.a1, ga)?;
    let a2 = tilde_observable(setting.a2, ga)?;
    let b1 = tilde_observable(setting.b1, gb)?;
    let b2 = tilde_observable(setting.b2, gb)?;
    let sum_b = b1.add(&b2);
    let diff_b = b1.sub(&b2);
    Ok(crate::linalg::kron(&a1, &sum_b).add(&crate::linalg::kron(&a2, &diff_b)))
}
