//! Entanglement detection for pure multipartite states of arbitrary local
//! dimensions, by sweeping a family of CHSH inequalities over two-qubit
//! slices of the state, plus the distillability witnesses the same sweep
//! yields for mixed states.
//!
//! The pipeline: pick a bipartition of the parties, pick one antisymmetric
//! two-level generator on each side, project the state onto the generators'
//! two-qubit slice, and evaluate the CHSH maximum of the projected state in
//! closed form. A pure state is entangled exactly when some slice of some
//! bipartition beats the classical bound; a mixed state that beats it is
//! distillable, with explicit local projectors as the certificate.
//!
//! Start at [`sweep::sweep`] or, for mixed states,
//! [`distill::distillability_witness`].

pub use num_complex;

pub mod chsh;
pub mod concurrence;
pub mod distill;
pub mod error;
pub mod generators;
pub mod linalg;
pub mod projection;
pub mod states;
pub mod sweep;

pub use chsh::{
    correlation_matrix, evaluate_bell, horodecki_max_violation, seesaw_optimize, TSIRELSON,
};
pub use concurrence::{
    concurrence_decomposition, multipartite_concurrence, pure_bipartite_concurrence,
    wootters_concurrence, ConcurrenceBreakdown,
};
pub use distill::{
    build_projectors, distillability_witness, ppt_check, DistillProjectors, DistillReport,
    DistillVerdict, DistillWitness,
};
pub use error::{Error, Result};
pub use generators::{enumerate_generators, Generator, MeasurementSetting};
pub use linalg::{ComplexMatrix, DimsSpec};
pub use projection::{
    enumerate_bipartitions, project_two_qubit, project_two_qubit_pure, Bipartition,
    ProjectedTwoQubit,
};
pub use states::{
    acin_state, bell_phi_plus, chessboard_ppt, ghz, haar_random_pure, isotropic,
    make_named_state, parse_state, product_state, serialize_state, w_state, werner, AcinParams,
    DensityMatrix, PureState, State,
};
pub use sweep::{
    entanglement_verdict, random_trials, sweep, SweepOptions, SweepReport, TrialStats, Verdict,
    ViolationRecord,
};
