//! Concurrence measures: the bipartite pure-state form, the Wootters formula
//! for two-qubit mixed states, and the multipartite generalization together
//! with its decomposition into projected two-qubit contributions.

use crate::error::{Error, Result};
use crate::generators::enumerate_generators;
use crate::linalg::{hermitian_eigen, partial_trace, ComplexMatrix, DimsSpec};
use crate::projection::{enumerate_bipartitions, project_two_qubit_pure, split_pure, Bipartition};
use crate::states::{DensityMatrix, PureState};

/// Concurrence of a pure state across one bipartition:
/// `sqrt(2 (1 - Tr rho_A^2))`, equivalently twice the root-sum-square of all
/// 2x2 minors of the coefficient matrix.
pub fn pure_bipartite_concurrence(psi: &PureState, cut: &Bipartition) -> Result<f64> {
    let split = split_pure(psi, cut)?;
    concurrence_of_split(&split)
}

fn concurrence_of_split(split: &PureState) -> Result<f64> {
    let rho = split.to_density();
    let red = partial_trace(rho.matrix(), rho.dims(), &[0])?;
    let purity = red.mul(&red).trace().re;
    Ok((2.0 * (1.0 - purity)).max(0.0).sqrt())
}

/// Sum of squared moduli of all 2x2 minors of the coefficient matrix of a
/// bipartite pure state. `C^2 = 4 * minor_sum`.
fn minor_sum(split: &PureState) -> f64 {
    let da = split.dims().dim(0);
    let db = split.dims().dim(1);
    let amp = |r: usize, c: usize| split.amplitude(r * db + c);
    let mut total = 0.0;
    for r1 in 0..da {
        for r2 in (r1 + 1)..da {
            for c1 in 0..db {
                for c2 in (c1 + 1)..db {
                    let m = amp(r1, c1) * amp(r2, c2) - amp(r1, c2) * amp(r2, c1);
                    total += m.norm_sqr();
                }
            }
        }
    }
    total
}

/// Wootters concurrence of a two-qubit density matrix:
/// `max(0, l1 - l2 - l3 - l4)` where `l_i` are the descending square roots of
/// the eigenvalues of `rho rho~`. Computed through the Hermitian chain
/// `sqrt(rho) rho~ sqrt(rho)`, which has the same spectrum.
pub fn wootters_concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.dims().as_slice() != [2, 2] {
        return Err(Error::DimensionMismatch(format!(
            "Wootters formula needs a two-qubit state, got dims {}",
            rho.dims()
        )));
    }
    let m = rho.matrix();

    // rho~ = (sy (x) sy) rho* (sy (x) sy); in the computational basis the
    // conjugation by sy (x) sy reverses both indices and adds a sign by
    // parity of the flipped bits.
    let flip = |i: usize| 3 - i;
    let sign = |i: usize| if i == 1 || i == 2 { -1.0 } else { 1.0 };
    let tilde = ComplexMatrix::from_fn(4, 4, |r, c| {
        m.get(flip(r), flip(c)).conj() * (sign(r) * sign(c))
    });

    let (w, v) = hermitian_eigen(m)?;
    let mut sqrt_rho = ComplexMatrix::zeros(4, 4);
    for (k, &wk) in w.iter().enumerate() {
        let s = wk.max(0.0).sqrt();
        for r in 0..4 {
            for c in 0..4 {
                sqrt_rho[(r, c)] += v.get(r, k) * v.get(c, k).conj() * s;
            }
        }
    }
    let chain = sqrt_rho.mul(&tilde).mul(&sqrt_rho);
    let (ev, _) = hermitian_eigen(&chain)?;
    let mut roots: Vec<f64> = ev.iter().map(|&x| x.max(0.0).sqrt()).collect();
    roots.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok((roots[0] - roots[1] - roots[2] - roots[3]).max(0.0))
}

/// Multipartite concurrence of a pure state on `L` equal-dimension parties:
/// `C^2 = K * sum over bipartitions of (4 * minor_sum)` with
/// `K = d / (2 m (d - 1))`, `m = 2^(L-1) - 1`. For `L = 2` this reduces to
/// the bipartite concurrence (`K = 1` there by convention).
pub fn multipartite_concurrence(psi: &PureState) -> Result<f64> {
    let cuts = enumerate_bipartitions(psi.dims())?;
    if psi.dims().party_count() == 2 {
        return pure_bipartite_concurrence(psi, &cuts[0]);
    }
    let k = k_factor(psi.dims())?;
    let mut total = 0.0;
    for cut in &cuts {
        let split = split_pure(psi, cut)?;
        total += 4.0 * minor_sum(&split);
    }
    Ok((k * total).max(0.0).sqrt())
}

/// Normalization constant for the multipartite concurrence. Defined for two
/// parties (as 1) and for three or more parties of equal local dimension.
pub fn k_factor(dims: &DimsSpec) -> Result<f64> {
    let l = dims.party_count();
    if l < 2 {
        return Err(Error::InvalidInput("concurrence needs at least two parties".into()));
    }
    if l == 2 {
        return Ok(1.0);
    }
    let d = dims.dim(0);
    if dims.as_slice().iter().any(|&x| x != d) {
        return Err(Error::InvalidInput(format!(
            "multipartite concurrence is defined for equal local dimensions, got {dims}"
        )));
    }
    let m = (1usize << (l - 1)) - 1;
    Ok(d as f64 / (2.0 * m as f64 * (d as f64 - 1.0)))
}

/// One projected contribution to the concurrence decomposition.
#[derive(Clone, Debug)]
pub struct ConcurrenceTerm {
    pub cut_mask: u64,
    pub alpha_index: usize,
    pub beta_index: usize,
    /// Weight carried by the projection (`<v|v>` of the projected vector).
    pub weight: f64,
    /// Concurrence of the normalized projected two-qubit state.
    pub concurrence: f64,
}

/// The decomposition `C_total^2 = K * sum_terms (weight^2 * C_term^2)`.
#[derive(Clone, Debug)]
pub struct ConcurrenceBreakdown {
    pub total: f64,
    pub k_factor: f64,
    pub terms: Vec<ConcurrenceTerm>,
}

impl ConcurrenceBreakdown {
    /// Recombines the terms; equals `total^2` up to round-off.
    pub fn recombined_square(&self) -> f64 {
        self.k_factor
            * self
                .terms
                .iter()
                .map(|t| t.weight * t.weight * t.concurrence * t.concurrence)
                .sum::<f64>()
    }
}

/// Splits the total concurrence into per-(cut, generator pair) terms. Each
/// projected vector contributes `weight^2 * C^2 = 4 |minor|^2`, and summing
/// over generator pairs inside a cut recovers that cut's full minor sum.
pub fn concurrence_decomposition(psi: &PureState) -> Result<ConcurrenceBreakdown> {
    let cuts = enumerate_bipartitions(psi.dims())?;
    let k = k_factor(psi.dims())?;
    let mut terms = Vec::new();
    let mut total_sq = 0.0;
    for cut in &cuts {
        let split = split_pure(psi, cut)?;
        let gens_a = enumerate_generators(cut.dim_a())?;
        let gens_b = enumerate_generators(cut.dim_b())?;
        for ga in &gens_a {
            for gb in &gens_b {
                let proj = match project_two_qubit_pure(&split, ga, gb) {
                    Ok(p) => p,
                    Err(Error::DegenerateProjection { .. }) => continue,
                    Err(e) => return Err(e),
                };
                let w = proj.weight();
                let c = proj.concurrence();
                total_sq += k * w * w * c * c;
                terms.push(ConcurrenceTerm {
                    cut_mask: cut.mask(),
                    alpha_index: ga.index(),
                    beta_index: gb.index(),
                    weight: w,
                    concurrence: c,
                });
            }
        }
    }
    Ok(ConcurrenceBreakdown { total: total_sq.max(0.0).sqrt(), k_factor: k, terms })
}
