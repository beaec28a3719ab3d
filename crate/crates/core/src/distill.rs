//! Distillability witnesses: any state that violates one of the swept
//! inequalities can be locally projected, by explicit rank-2 isometries, onto
//! an entangled (hence distillable) two-qubit state. Also hosts the PPT
//! check used to confirm that positive-partial-transpose states stay quiet.

use num_complex::Complex64;
use serde::Serialize;

use crate::concurrence::wootters_concurrence;
use crate::error::{Error, Result};
use crate::generators::Generator;
use crate::linalg::{hermitian_eigen, kron, partial_transpose, ComplexMatrix, DimsSpec};
use crate::projection::{split_density, Bipartition};
use crate::states::DensityMatrix;
use crate::sweep::{sweep, SweepOptions, SweepReport, Verdict};

/// States whose partial transpose has no eigenvalue below this are PPT.
pub const PPT_TOL: f64 = -1e-10;

/// The pair of local maps `P = A L_a`, `Q = B L_b` that compress a violating
/// state onto two qubits. Each is a 2 x d matrix with `P P^dagger = I_2`.
#[derive(Clone, Debug)]
pub struct DistillProjectors {
    p: ComplexMatrix,
    q: ComplexMatrix,
    alpha: Generator,
    beta: Generator,
}

impl DistillProjectors {
    pub fn p(&self) -> &ComplexMatrix {
        &self.p
    }

    pub fn q(&self) -> &ComplexMatrix {
        &self.q
    }

    pub fn alpha(&self) -> &Generator {
        &self.alpha
    }

    pub fn beta(&self) -> &Generator {
        &self.beta
    }

    /// `(P (x) Q) rho (P (x) Q)^dagger`, unnormalized. Its trace is the
    /// success probability of the local projection.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<ComplexMatrix> {
        if rho.dims().party_count() != 2
            || rho.dims().dim(0) != self.p.cols()
            || rho.dims().dim(1) != self.q.cols()
        {
            return Err(Error::DimensionMismatch(format!(
                "projectors act on {}x{}, state has dims {}",
                self.p.cols(),
                self.q.cols(),
                rho.dims()
            )));
        }
        let op = kron(&self.p, &self.q);
        Ok(op.mul(rho.matrix()).mul(&op.dagger()))
    }
}

/// Composing the generator with the relabeling `A = |0><j| + |1><k|` gives
/// `P = |0><k| - |1><j|`: the generator's two levels become the qubit, the
/// rest is annihilated.
pub fn build_projectors(ga: &Generator, gb: &Generator) -> DistillProjectors {
    let build = |g: &Generator| {
        let mut m = ComplexMatrix::zeros(2, g.dim());
        m[(0, g.k())] = Complex64::new(1.0, 0.0);
        m[(1, g.j())] = Complex64::new(-1.0, 0.0);
        m
    };
    DistillProjectors { p: build(ga), q: build(gb), alpha: *ga, beta: *gb }
}

/// Minimum eigenvalue of the partial transpose across `cut`, and whether the
/// state passes the PPT test at that cut.
pub fn ppt_check(rho: &DensityMatrix, cut: &Bipartition) -> Result<(f64, bool)> {
    let pt = partial_transpose(rho.matrix(), rho.dims(), cut.parties_b())?;
    let (w, _) = hermitian_eigen(&pt)?;
    let min = w[0];
    Ok((min, min >= PPT_TOL))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DistillVerdict {
    Distillable,
    Inconclusive,
}

impl std::fmt::Display for DistillVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DistillVerdict::Distillable => "distillable",
            DistillVerdict::Inconclusive => "inconclusive",
        })
    }
}

fn matrix_entries(m: &ComplexMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.rows())
        .map(|r| (0..m.cols()).map(|c| [m.get(r, c).re, m.get(r, c).im]).collect())
        .collect()
}

/// The concrete two-qubit output certifying distillability.
#[derive(Clone, Debug, Serialize)]
pub struct DistillWitness {
    pub cut: String,
    pub cut_mask: u64,
    pub alpha: [usize; 2],
    pub beta: [usize; 2],
    /// Violation of the record that triggered the witness.
    pub violation: f64,
    /// Success probability of the local projection (trace before
    /// normalization).
    pub weight: f64,
    /// Wootters concurrence of the normalized output.
    pub concurrence: f64,
    pub min_pt_eigenvalue: f64,
    pub p: Vec<Vec<[f64; 2]>>,
    pub q: Vec<Vec<[f64; 2]>>,
    /// Normalized two-qubit output, row-major `[re, im]` entries.
    pub output: Vec<Vec<[f64; 2]>>,
}

/// Sweep report plus, when some record violates, the explicit witness.
#[derive(Clone, Debug, Serialize)]
pub struct DistillReport {
    pub verdict: DistillVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<DistillWitness>,
    pub sweep: SweepReport,
}

fn cut_from_mask(dims: &DimsSpec, mask: u64) -> Result<Bipartition> {
    let parties: Vec<usize> =
        (0..dims.party_count()).filter(|&p| mask & (1 << p) != 0).collect();
    Bipartition::new(dims, &parties)
}

/// Runs the sweep; if any record beats the classical bound, rebuilds that
/// record's projectors and returns the (normalized) two-qubit output they
/// produce, with its success weight, concurrence, and PT floor.
pub fn distillability_witness(rho: &DensityMatrix, opts: &SweepOptions) -> Result<DistillReport> {
    let report = sweep(&crate::states::State::Density(rho.clone()), opts)?;
    if report.verdict != Verdict::Entangled {
        return Ok(DistillReport {
            verdict: DistillVerdict::Inconclusive,
            witness: None,
            sweep: report,
        });
    }

    let best = report.best_record().expect("entangled verdict implies a best record");
    let cut = cut_from_mask(rho.dims(), best.cut_mask)?;
    let ga = Generator::new(cut.dim_a(), best.alpha[0], best.alpha[1])?;
    let gb = Generator::new(cut.dim_b(), best.beta[0], best.beta[1])?;
    let projectors = build_projectors(&ga, &gb);

    let split = split_density(rho, &cut)?;
    let raw = projectors.apply(&split)?;
    let weight = raw.trace().re;
    if weight < crate::projection::DEGENERACY_CUTOFF {
        return Err(Error::DegenerateProjection {
            weight,
            cutoff: crate::projection::DEGENERACY_CUTOFF,
        });
    }
    let dims2 = DimsSpec::new(vec![2, 2])?;
    let output =
        DensityMatrix::new_unchecked(raw.scaled(Complex64::new(1.0 / weight, 0.0)), dims2.clone());
    let concurrence = wootters_concurrence(&output)?;
    let qubit_cut = Bipartition::new(&dims2, &[0])?;
    let (min_pt, _) = ppt_check(&output, &qubit_cut)?;

    let witness = DistillWitness {
        cut: best.cut.clone(),
        cut_mask: best.cut_mask,
        alpha: best.alpha,
        beta: best.beta,
        violation: best.max_violation,
        weight,
        concurrence,
        min_pt_eigenvalue: min_pt,
        p: matrix_entries(projectors.p()),
        q: matrix_entries(projectors.q()),
        output: matrix_entries(output.matrix()),
    };

    Ok(DistillReport {
        verdict: DistillVerdict::Distillable,
        witness: Some(witness),
        sweep: report,
    })
}
