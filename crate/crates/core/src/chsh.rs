//! CHSH machinery on two-qubit states: correlation matrix, the closed-form
//! maximal violation, and a seesaw search that also returns the optimizing
//! measurement directions.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::generators::{bell_operator, MeasurementSetting};
use crate::linalg::{hermitian_eigen, ComplexMatrix};
use crate::states::DensityMatrix;

/// Largest value any CHSH functional can reach on a quantum state.
pub const TSIRELSON: f64 = 2.0 * std::f64::consts::SQRT_2;

/// Pauli correlation matrix `T[i][j] = Tr(rho sigma_i (x) sigma_j)` of a
/// two-qubit state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrelationMatrix(pub [[f64; 3]; 3]);

fn pauli(i: usize) -> ComplexMatrix {
    let c = Complex64::new;
    let entries = match i {
        0 => [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]],
        1 => [[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]],
        2 => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]],
        _ => unreachable!(),
    };
    ComplexMatrix::from_fn(2, 2, |r, cl| entries[r][cl])
}

fn check_two_qubit(rho: &DensityMatrix) -> Result<()> {
    if rho.dims().as_slice() != [2, 2] {
        return Err(Error::DimensionMismatch(format!(
            "expected a two-qubit state, got dims {}",
            rho.dims()
        )));
    }
    Ok(())
}

/// Computes `T` by direct expectation values.
pub fn correlation_matrix(rho: &DensityMatrix) -> Result<CorrelationMatrix> {
    check_two_qubit(rho)?;
    let m = rho.matrix();
    let mut t = [[0.0f64; 3]; 3];
    for (i, row) in t.iter_mut().enumerate() {
        let si = pauli(i);
        for (j, slot) in row.iter_mut().enumerate() {
            let op = crate::linalg::kron(&si, &pauli(j));
            *slot = op.mul(m).trace().re;
        }
    }
    Ok(CorrelationMatrix(t))
}

impl CorrelationMatrix {
    /// Eigenvalues of `T^t T`, ascending. These are the squared singular
    /// values of `T`.
    pub fn gram_eigenvalues(&self) -> [f64; 3] {
        let t = &self.0;
        let mut g = ComplexMatrix::zeros(3, 3);
        for r in 0..3 {
            for c in 0..3 {
                let s: f64 = t.iter().map(|row| row[r] * row[c]).sum();
                g[(r, c)] = Complex64::new(s, 0.0);
            }
        }
        let (w, _) = hermitian_eigen(&g).expect("symmetric 3x3");
        [w[0].max(0.0), w[1].max(0.0), w[2].max(0.0)]
    }

    /// Applies `T` to a 3-vector.
    pub fn apply(&self, v: [f64; 3]) -> [f64; 3] {
        let t = &self.0;
        [
            t[0][0] * v[0] + t[0][1] * v[1] + t[0][2] * v[2],
            t[1][0] * v[0] + t[1][1] * v[1] + t[1][2] * v[2],
            t[2][0] * v[0] + t[2][1] * v[1] + t[2][2] * v[2],
        ]
    }

    /// Applies `T^t`.
    pub fn apply_transpose(&self, v: [f64; 3]) -> [f64; 3] {
        let t = &self.0;
        [
            t[0][0] * v[0] + t[1][0] * v[1] + t[2][0] * v[2],
            t[0][1] * v[0] + t[1][1] * v[1] + t[2][1] * v[2],
            t[0][2] * v[0] + t[1][2] * v[1] + t[2][2] * v[2],
        ]
    }
}

/// Closed-form maximum of the CHSH functional over all measurement settings:
/// `2 sqrt(u1 + u2)` with `u1 >= u2` the two largest eigenvalues of `T^t T`.
/// Clamped to `[0, 2 sqrt(2)]` against eigenvalue round-off.
pub fn horodecki_max_violation(rho: &DensityMatrix) -> Result<f64> {
    let t = correlation_matrix(rho)?;
    let g = t.gram_eigenvalues();
    Ok((2.0 * (g[1] + g[2]).sqrt()).clamp(0.0, TSIRELSON))
}

/// `Tr(op rho)` for a Hermitian observable; returns the real part.
pub fn evaluate_bell(rho: &DensityMatrix, op: &ComplexMatrix) -> Result<f64> {
    let m = rho.matrix();
    if op.rows() != m.rows() || op.cols() != m.cols() {
        return Err(Error::DimensionMismatch(format!(
            "operator is {}x{}, state is {}x{}",
            op.rows(),
            op.cols(),
            m.rows(),
            m.cols()
        )));
    }
    Ok(op.mul(m).trace().re)
}

const SEESAW_MAX_ITERS: usize = 500;
const SEESAW_IMPROVEMENT: f64 = 1e-13;
const SEESAW_RESTARTS: usize = 5;
const TINY_DIRECTION: f64 = 1e-12;

fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn normalize_or_keep(v: [f64; 3], previous: [f64; 3]) -> [f64; 3] {
    let n = norm3(v);
    if n < TINY_DIRECTION {
        previous
    } else {
        [v[0] / n, v[1] / n, v[2] / n]
    }
}

fn chsh_value(t: &CorrelationMatrix, a1: [f64; 3], a2: [f64; 3], b1: [f64; 3], b2: [f64; 3]) -> f64 {
    let dot = |x: [f64; 3], y: [f64; 3]| x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
    dot(a1, t.apply(b1)) + dot(a1, t.apply(b2)) + dot(a2, t.apply(b1)) - dot(a2, t.apply(b2))
}

/// Columns of an orthonormal eigenbasis of `T^t T`, for the two largest
/// eigenvalues, as real 3-vectors.
fn top_two_directions(t: &CorrelationMatrix) -> ([f64; 3], [f64; 3]) {
    let m = &t.0;
    let mut g = ComplexMatrix::zeros(3, 3);
    for r in 0..3 {
        for c in 0..3 {
            let s: f64 = m.iter().map(|row| row[r] * row[c]).sum();
            g[(r, c)] = Complex64::new(s, 0.0);
        }
    }
    let (_, vecs) = hermitian_eigen(&g).expect("symmetric 3x3");
    // Ascending eigenvalue order: columns 2 and 1 are the top two. The
    // eigenvectors of a real symmetric matrix carry an arbitrary global
    // phase; rotate each column real before reading it off.
    let col = |j: usize| -> [f64; 3] {
        let mut best = Complex64::new(0.0, 0.0);
        for r in 0..3 {
            if vecs.get(r, j).norm() > best.norm() {
                best = vecs.get(r, j);
            }
        }
        let phase = if best.norm() > 0.0 { best / best.norm() } else { Complex64::new(1.0, 0.0) };
        let mut v = [0.0; 3];
        for (r, slot) in v.iter_mut().enumerate() {
            *slot = (vecs.get(r, j) * phase.conj()).re;
        }
        v
    };
    (col(2), col(1))
}

fn default_directions(seed: usize) -> ([f64; 3], [f64; 3]) {
    // Deterministic fallback spread for extra restarts.
    let axes = [
        ([1.0, 0.0, 0.0], [0.0, 0.0, 1.0]),
        ([0.0, 1.0, 0.0], [1.0, 0.0, 0.0]),
        ([0.0, 0.0, 1.0], [0.0, 1.0, 0.0]),
        (
            [std::f64::consts::FRAC_1_SQRT_2, 0.0, std::f64::consts::FRAC_1_SQRT_2],
            [std::f64::consts::FRAC_1_SQRT_2, 0.0, -std::f64::consts::FRAC_1_SQRT_2],
        ),
    ];
    axes[seed % axes.len()]
}

/// Seesaw ascent over measurement directions. Starting from Bob vectors at
/// +-45 degrees between the top-two right-singular directions of `T`, the two
/// best-response half-steps
///
/// ```text
/// a1 ~ T (b1 + b2),   a2 ~ T (b1 - b2)
/// b1 ~ T^t (a1 + a2), b2 ~ T^t (a1 - a2)
/// ```
///
/// each never decrease the functional, so the iteration converges; for the
/// chosen start it lands on the closed-form optimum after one round. Returns
/// the best settings found and the value of the functional at them.
pub fn seesaw_optimize(rho: &DensityMatrix) -> Result<(MeasurementSetting, f64)> {
    let t = correlation_matrix(rho)?;
    let (e1, e2) = top_two_directions(&t);
    let sq = std::f64::consts::FRAC_1_SQRT_2;
    let mut best: Option<(MeasurementSetting, f64)> = None;

    for restart in 0..SEESAW_RESTARTS {
        let (mut b1, mut b2) = if restart == 0 {
            (
                [sq * (e1[0] + e2[0]), sq * (e1[1] + e2[1]), sq * (e1[2] + e2[2])],
                [sq * (e1[0] - e2[0]), sq * (e1[1] - e2[1]), sq * (e1[2] - e2[2])],
            )
        } else {
            default_directions(restart - 1)
        };
        b1 = normalize_or_keep(b1, [1.0, 0.0, 0.0]);
        b2 = normalize_or_keep(b2, [0.0, 0.0, 1.0]);
        let mut a1 = [1.0, 0.0, 0.0];
        let mut a2 = [0.0, 0.0, 1.0];
        let mut value = chsh_value(&t, a1, a2, b1, b2);

        for _ in 0..SEESAW_MAX_ITERS {
            let sum = [b1[0] + b2[0], b1[1] + b2[1], b1[2] + b2[2]];
            let diff = [b1[0] - b2[0], b1[1] - b2[1], b1[2] - b2[2]];
            a1 = normalize_or_keep(t.apply(sum), a1);
            a2 = normalize_or_keep(t.apply(diff), a2);

            let asum = [a1[0] + a2[0], a1[1] + a2[1], a1[2] + a2[2]];
            let adiff = [a1[0] - a2[0], a1[1] - a2[1], a1[2] - a2[2]];
            b1 = normalize_or_keep(t.apply_transpose(asum), b1);
            b2 = normalize_or_keep(t.apply_transpose(adiff), b2);

            let next = chsh_value(&t, a1, a2, b1, b2);
            let improved = next - value;
            value = next;
            if improved < SEESAW_IMPROVEMENT {
                break;
            }
        }

        if best.as_ref().is_none_or(|(_, v)| value > *v) {
            let setting = MeasurementSetting::new(a1, a2, b1, b2)?;
            best = Some((setting, value));
        }
    }

    Ok(best.expect("at least one restart"))
}

/// Converts seesaw directions into the vectors that parametrize the embedded
/// observables, and back. The embedding maps `a` to the Bloch vector
/// `(a1, -a2, -a3)` on its slice, so the conversion is the sign flip
/// `(x, y, z) -> (-x, -y, z)` applied to every direction; it is an involution.
pub fn setting_to_embedded(s: &MeasurementSetting) -> MeasurementSetting {
    let flip = |v: [f64; 3]| [-v[0], -v[1], v[2]];
    MeasurementSetting::new(flip(s.a1), flip(s.a2), flip(s.b1), flip(s.b2))
        .expect("sign flips preserve unit norm")
}

/// Builds the compact 4x4 Bell operator the seesaw settings induce through
/// the qubit generator on both sides.
pub fn compact_bell_operator(setting: &MeasurementSetting) -> ComplexMatrix {
    let g = crate::generators::Generator::new(2, 0, 1).unwrap();
    let embedded = setting_to_embedded(setting);
    bell_operator(&g, &g, &embedded).expect("qubit generators")
}
