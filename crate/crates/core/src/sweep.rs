//! The full sweep: every bipartition, every generator pair, one violation
//! record each, aggregated into a verdict.
//!
//! For pure states a violation above the classical bound is equivalent to
//! entanglement; for mixed states a violation still certifies entanglement
//! but silence proves nothing, so the verdict set shrinks accordingly.

use serde::Serialize;

use crate::chsh::{horodecki_max_violation, seesaw_optimize};
use crate::concurrence::wootters_concurrence;
use crate::error::{Error, Result};
use crate::generators::{enumerate_generators, MeasurementSetting};
use crate::linalg::DimsSpec;
use crate::projection::{
    enumerate_bipartitions, project_two_qubit, project_two_qubit_pure, split_density, split_pure,
    Bipartition,
};
use crate::states::{haar_random_pure, DensityMatrix, PureState, State};

/// Violations must clear the classical bound by this much to count.
pub const DEFAULT_VIOLATION_TOLERANCE: f64 = 1e-9;

/// Pure states whose every projected concurrence sits below this are called
/// separable. Violations grow like `2 sqrt(1 + C^2) - 2 ~ C^2`, so this
/// threshold marks where the sweep stops being able to see the entanglement;
/// states between the two tolerances come out Inconclusive.
pub const DEFAULT_CONCURRENCE_TOLERANCE: f64 = 1e-7;

/// Projection-count ceiling; sweeps that would exceed it refuse to start.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Bumped whenever the serialized report layout changes.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug)]
pub struct SweepOptions {
    pub tolerance: f64,
    pub concurrence_tolerance: f64,
    pub budget: u64,
    /// Free-form state descriptor echoed into the report.
    pub label: Option<String>,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            tolerance: DEFAULT_VIOLATION_TOLERANCE,
            concurrence_tolerance: DEFAULT_CONCURRENCE_TOLERANCE,
            budget: DEFAULT_BUDGET,
            label: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Separable,
    Entangled,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::Separable => "separable",
            Verdict::Entangled => "entangled",
            Verdict::Inconclusive => "inconclusive",
        };
        f.write_str(s)
    }
}

/// One examined (bipartition, generator pair) triple.
///
/// A degenerate record means the projection annihilated the state; its
/// numeric fields are all zero and it never carries settings.
#[derive(Clone, Debug, Serialize)]
pub struct ViolationRecord {
    /// Bipartition label like `0+1|2`.
    pub cut: String,
    /// Side-A bitmask of the same bipartition.
    pub cut_mask: u64,
    /// Side-A generator as its `(j, k)` index pair.
    pub alpha: [usize; 2],
    /// Side-B generator likewise.
    pub beta: [usize; 2],
    /// Frobenius weight the projection carried before normalization.
    pub weight: f64,
    /// Concurrence of the normalized projected two-qubit state.
    pub concurrence: f64,
    /// Closed-form CHSH maximum of the projected state.
    pub max_violation: f64,
    /// Optimal measurement directions; populated on the best record only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub settings: Option<MeasurementSetting>,
    pub degenerate: bool,
}

impl ViolationRecord {
    fn degenerate(cut: &Bipartition, alpha: [usize; 2], beta: [usize; 2]) -> Self {
        ViolationRecord {
            cut: cut.label(),
            cut_mask: cut.mask(),
            alpha,
            beta,
            weight: 0.0,
            concurrence: 0.0,
            max_violation: 0.0,
            settings: None,
            degenerate: true,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub schema_version: u32,
    /// Human-readable state descriptor.
    pub state: String,
    pub dims: DimsSpec,
    /// `pure` or `density`.
    pub kind: String,
    /// Violation tolerance the verdict used.
    pub tolerance: f64,
    pub records: Vec<ViolationRecord>,
    /// Index of the record with the largest violation, if any projection
    /// survived.
    pub best: Option<usize>,
    pub best_violation: f64,
    pub verdict: Verdict,
}

impl SweepReport {
    pub fn best_record(&self) -> Option<&ViolationRecord> {
        self.best.map(|i| &self.records[i])
    }
}

fn pair_count(d: usize) -> u64 {
    (d as u64) * (d as u64 - 1) / 2
}

/// Total number of projections the sweep would evaluate.
pub fn projection_count(dims: &DimsSpec) -> Result<u64> {
    let cuts = enumerate_bipartitions(dims)?;
    let mut total: u128 = 0;
    for cut in &cuts {
        total += pair_count(cut.dim_a()) as u128 * pair_count(cut.dim_b()) as u128;
    }
    Ok(total.min(u64::MAX as u128) as u64)
}

fn check_budget(dims: &DimsSpec, budget: u64) -> Result<()> {
    let required = projection_count(dims)?;
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    Ok(())
}

enum SplitState {
    Pure(PureState),
    Density(DensityMatrix),
}

/// Sweeps every bipartition and generator pair, recording the projected
/// concurrence and closed-form CHSH maximum of each surviving slice. The
/// best record additionally carries seesaw-optimized settings.
pub fn sweep(state: &State, opts: &SweepOptions) -> Result<SweepReport> {
    let dims = state.dims().clone();
    check_budget(&dims, opts.budget)?;
    let cuts = enumerate_bipartitions(&dims)?;
    let is_pure = matches!(state, State::Pure(_));

    let mut records: Vec<ViolationRecord> = Vec::new();
    let mut best: Option<usize> = None;
    let mut best_compact: Option<DensityMatrix> = None;
    let mut max_concurrence: f64 = 0.0;

    for cut in &cuts {
        let split = match state {
            State::Pure(p) => SplitState::Pure(split_pure(p, cut)?),
            State::Density(d) => SplitState::Density(split_density(d, cut)?),
        };
        let gens_a = enumerate_generators(cut.dim_a())?;
        let gens_b = enumerate_generators(cut.dim_b())?;
        for ga in &gens_a {
            for gb in &gens_b {
                let alpha = [ga.j(), ga.k()];
                let beta = [gb.j(), gb.k()];
                let projected = match &split {
                    SplitState::Pure(p) => {
                        project_two_qubit_pure(p, ga, gb).map(|v| {
                            let compact = DensityMatrix::new_unchecked(
                                v.compact(),
                                DimsSpec::new(vec![2, 2]).unwrap(),
                            );
                            (v.weight(), v.concurrence(), compact)
                        })
                    }
                    SplitState::Density(d) => project_two_qubit(d, ga, gb).and_then(|p| {
                        let compact = p.compact_density();
                        let c = wootters_concurrence(&compact)?;
                        Ok((p.weight(), c, compact))
                    }),
                };
                let record = match projected {
                    Err(Error::DegenerateProjection { .. }) => {
                        ViolationRecord::degenerate(cut, alpha, beta)
                    }
                    Err(e) => return Err(e),
                    Ok((weight, concurrence, compact)) => {
                        let max_violation = horodecki_max_violation(&compact)?;
                        max_concurrence = max_concurrence.max(concurrence);
                        let better = best
                            .is_none_or(|i: usize| max_violation > records[i].max_violation);
                        if better {
                            best = Some(records.len());
                            best_compact = Some(compact);
                        }
                        ViolationRecord {
                            cut: cut.label(),
                            cut_mask: cut.mask(),
                            alpha,
                            beta,
                            weight,
                            concurrence,
                            max_violation,
                            settings: None,
                            degenerate: false,
                        }
                    }
                };
                records.push(record);
            }
        }
    }

    let best_violation = best.map_or(0.0, |i| records[i].max_violation);
    if let (Some(i), Some(compact)) = (best, &best_compact) {
        let (settings, _) = seesaw_optimize(compact)?;
        records[i].settings = Some(settings);
    }

    let verdict = if best_violation > 2.0 + opts.tolerance {
        Verdict::Entangled
    } else if is_pure && best.is_some() && max_concurrence <= opts.concurrence_tolerance {
        Verdict::Separable
    } else {
        Verdict::Inconclusive
    };

    let descriptor = opts
        .label
        .clone()
        .unwrap_or_else(|| format!("{} state {}", state.kind(), dims));

    Ok(SweepReport {
        schema_version: REPORT_SCHEMA_VERSION,
        state: descriptor,
        dims,
        kind: state.kind().to_string(),
        tolerance: opts.tolerance,
        records,
        best,
        best_violation,
        verdict,
    })
}

/// Pure-state entrypoint: verdict plus, when entangled, the best record as a
/// witness (it carries the optimal settings).
pub fn entanglement_verdict(
    psi: &PureState,
    tol: f64,
) -> Result<(Verdict, Option<ViolationRecord>)> {
    let opts = SweepOptions { tolerance: tol, ..SweepOptions::default() };
    let report = sweep(&State::Pure(psi.clone()), &opts)?;
    let witness = if report.verdict == Verdict::Entangled {
        report.best_record().cloned()
    } else {
        None
    };
    Ok((report.verdict, witness))
}

/// Tallies from sweeping Haar-random pure states against the concurrence
/// ground truth. The two cross terms are the theorem violations and must
/// stay zero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrialStats {
    pub dims: DimsSpec,
    pub trials: u64,
    pub seed: u64,
    pub entangled_violating: u64,
    pub entangled_not_violating: u64,
    pub separable_violating: u64,
    pub separable_quiet: u64,
}

/// Runs `n` Haar-random trials. Ground truth per trial is the largest
/// bipartite concurrence over all cuts, thresholded at the concurrence
/// tolerance; the sweep verdict is compared against it.
pub fn random_trials(
    dims: &DimsSpec,
    n: u64,
    seed: u64,
    opts: &SweepOptions,
) -> Result<TrialStats> {
    use rand::{Rng, SeedableRng};
    if n == 0 {
        return Err(Error::InvalidInput("need at least one trial".into()));
    }
    check_budget(dims, opts.budget)?;
    let mut master = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
    let cuts = enumerate_bipartitions(dims)?;
    let mut stats = TrialStats {
        dims: dims.clone(),
        trials: n,
        seed,
        entangled_violating: 0,
        entangled_not_violating: 0,
        separable_violating: 0,
        separable_quiet: 0,
    };
    for _ in 0..n {
        let psi = haar_random_pure(dims, master.gen());
        let mut truth_c: f64 = 0.0;
        for cut in &cuts {
            truth_c = truth_c.max(crate::concurrence::pure_bipartite_concurrence(&psi, cut)?);
        }
        let entangled = truth_c > opts.concurrence_tolerance;
        let report = sweep(&State::Pure(psi), opts)?;
        let violating = report.best_violation > 2.0 + opts.tolerance;
        match (entangled, violating) {
            (true, true) => stats.entangled_violating += 1,
            (true, false) => stats.entangled_not_violating += 1,
            (false, true) => stats.separable_violating += 1,
            (false, false) => stats.separable_quiet += 1,
        }
    }
    Ok(stats)
}
