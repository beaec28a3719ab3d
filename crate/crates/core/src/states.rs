//! State containers, a catalog of named example states, Haar sampling, and
//! the JSON interchange format for state files.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, ComplexMatrix, DimsSpec};

/// Allowed deviation of a pure state's norm from 1.
pub const NORM_TOL: f64 = 1e-10;
/// Allowed deviation of a density matrix's trace from 1.
pub const TRACE_TOL: f64 = 1e-10;
/// Allowed Hermiticity violation in a density matrix.
pub const DENSITY_HERMITICITY_TOL: f64 = 1e-10;
/// Most negative eigenvalue a density matrix may carry (rounding slack).
pub const PSD_FLOOR: f64 = -1e-8;

/// Normalized pure state vector over the given subsystem dimensions.
#[derive(Clone, Debug)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
    dims: DimsSpec,
}

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>, dims: DimsSpec) -> Result<Self> {
        if amplitudes.len() != dims.total_dim() {
            return Err(Error::DimensionMismatch(format!(
                "pure state has {} amplitudes but dims {} require {}",
                amplitudes.len(),
                dims,
                dims.total_dim()
            )));
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidInput(format!(
                "pure state norm is {norm:.12}, more than {NORM_TOL:.0e} away from 1"
            )));
        }
        Ok(PureState { amplitudes, dims })
    }

    /// Rescales to unit norm, then constructs. Errors on an all-zero vector.
    pub fn normalized(mut amplitudes: Vec<Complex64>, dims: DimsSpec) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-300 {
            return Err(Error::InvalidInput("cannot normalize a zero vector".into()));
        }
        for a in &mut amplitudes {
            *a /= norm;
        }
        PureState::new(amplitudes, dims)
    }

    pub fn dims(&self) -> &DimsSpec {
        &self.dims
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn to_density(&self) -> DensityMatrix {
        let n = self.amplitudes.len();
        let m = ComplexMatrix::from_fn(n, n, |r, c| {
            self.amplitudes[r] * self.amplitudes[c].conj()
        });
        DensityMatrix::new_unchecked(m, self.dims.clone())
    }
}

/// Validated density matrix: Hermitian, unit trace, positive semidefinite
/// within rounding slack.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    dims: DimsSpec,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix, dims: DimsSpec) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() != dims.total_dim() {
            return Err(Error::DimensionMismatch(format!(
                "density matrix is {}x{} but dims {} require {}x{}",
                matrix.rows(),
                matrix.cols(),
                dims,
                dims.total_dim(),
                dims.total_dim()
            )));
        }
        let (violation, (r, c)) = matrix.hermiticity_violation();
        if violation > DENSITY_HERMITICITY_TOL {
            return Err(Error::NotHermitian { row: r, col: c, violation });
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(Error::InvalidInput(format!(
                "density matrix trace is {:.12}{:+.3e}i, more than {TRACE_TOL:.0e} away from 1",
                trace.re, trace.im
            )));
        }
        let (eigenvalues, _) = hermitian_eigen(&matrix)?;
        if eigenvalues[0] < PSD_FLOOR {
            return Err(Error::InvalidInput(format!(
                "density matrix has eigenvalue {:.3e}, below the {PSD_FLOOR:.0e} floor",
                eigenvalues[0]
            )));
        }
        Ok(DensityMatrix { matrix, dims })
    }

    /// Constructor for matrices that are valid by construction; skips the
    /// eigenvalue check used on untrusted input.
    pub(crate) fn new_unchecked(matrix: ComplexMatrix, dims: DimsSpec) -> Self {
        debug_assert_eq!(matrix.rows(), dims.total_dim());
        DensityMatrix { matrix, dims }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &DimsSpec {
        &self.dims
    }

    /// `Tr(rho^2)`; 1 exactly for pure states.
    pub fn purity(&self) -> f64 {
        let f = self.matrix.frobenius_norm();
        f * f
    }
}

/// A state of either kind, as read from a file or the named-state grammar.
#[derive(Clone, Debug)]
pub enum State {
    Pure(PureState),
    Density(DensityMatrix),
}

impl State {
    pub fn dims(&self) -> &DimsSpec {
        match self {
            State::Pure(p) => p.dims(),
            State::Density(d) => d.dims(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            State::Pure(_) => "pure",
            State::Density(_) => "density",
        }
    }

    pub fn to_density(&self) -> DensityMatrix {
        match self {
            State::Pure(p) => p.to_density(),
            State::Density(d) => d.clone(),
        }
    }
}

/// Canonical three-qubit form: five non-negative weights and one phase,
/// `l0|000> + l1 e^{i psi}|100> + l2|101> + l3|110> + l4|111>`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct AcinParams {
    lambdas: [f64; 5],
    phase: f64,
}

impl AcinParams {
    pub fn new(lambdas: [f64; 5], phase: f64) -> Result<Self> {
        if lambdas.iter().any(|&l| l < 0.0 || !l.is_finite()) {
            return Err(Error::InvalidInput(
                "canonical-form weights must be non-negative and finite".into(),
            ));
        }
        let sq: f64 = lambdas.iter().map(|l| l * l).sum();
        if (sq - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidInput(format!(
                "canonical-form weights must satisfy sum(l_i^2) = 1, got {sq:.12}"
            )));
        }
        if !(0.0..=std::f64::consts::PI).contains(&phase) {
            return Err(Error::InvalidInput(format!(
                "canonical-form phase must lie in [0, pi], got {phase}"
            )));
        }
        Ok(AcinParams { lambdas, phase })
    }

    /// Rescales raw non-negative weights to satisfy the unit constraint.
    pub fn from_raw(raw: [f64; 5], phase: f64) -> Result<Self> {
        if raw.iter().any(|&l| l < 0.0 || !l.is_finite()) {
            return Err(Error::InvalidInput(
                "canonical-form weights must be non-negative and finite".into(),
            ));
        }
        let sq: f64 = raw.iter().map(|l| l * l).sum();
        if sq < 1e-300 {
            return Err(Error::InvalidInput("canonical-form weights are all zero".into()));
        }
        let scale = sq.sqrt();
        let mut lambdas = raw;
        for l in &mut lambdas {
            *l /= scale;
        }
        AcinParams::new(lambdas, phase)
    }

    pub fn lambdas(&self) -> [f64; 5] {
        self.lambdas
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `(|00> + |11>)/sqrt(2)` on two qubits.
pub fn bell_phi_plus() -> PureState {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let amps = vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)];
    PureState::new(amps, DimsSpec::new(vec![2, 2]).unwrap()).unwrap()
}

/// `sum_i |i..i> / sqrt(d)` on `parties` subsystems of dimension `d`.
pub fn ghz(parties: usize, d: usize) -> Result<PureState> {
    if parties < 2 {
        return Err(Error::InvalidInput("ghz needs at least 2 parties".into()));
    }
    let dims = DimsSpec::new(vec![d; parties])?;
    let total = dims.total_dim();
    let mut amps = vec![c(0.0, 0.0); total];
    let weight = 1.0 / (d as f64).sqrt();
    for i in 0..d {
        amps[dims.compose(&vec![i; parties])] = c(weight, 0.0);
    }
    PureState::new(amps, dims)
}

/// Equal superposition of all single-excitation qubit strings.
pub fn w_state(parties: usize) -> Result<PureState> {
    if parties < 2 {
        return Err(Error::InvalidInput("w needs at least 2 parties".into()));
    }
    let dims = DimsSpec::new(vec![2; parties])?;
    let mut amps = vec![c(0.0, 0.0); dims.total_dim()];
    let weight = 1.0 / (parties as f64).sqrt();
    for p in 0..parties {
        let mut digits = vec![0; parties];
        digits[p] = 1;
        amps[dims.compose(&digits)] = c(weight, 0.0);
    }
    PureState::new(amps, dims)
}

/// Tensor product of per-party vectors; each factor is normalized first.
pub fn product_state(locals: &[Vec<Complex64>]) -> Result<PureState> {
    if locals.is_empty() {
        return Err(Error::InvalidInput("product state needs at least one factor".into()));
    }
    let dims = DimsSpec::new(locals.iter().map(|v| v.len()).collect())?;
    let mut amps = vec![c(1.0, 0.0)];
    for factor in locals {
        let norm = factor.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-300 {
            return Err(Error::InvalidInput("product state factor is the zero vector".into()));
        }
        let mut next = Vec::with_capacity(amps.len() * factor.len());
        for a in &amps {
            for f in factor {
                next.push(a * f / norm);
            }
        }
        amps = next;
    }
    PureState::new(amps, dims)
}

/// Three-qubit state in canonical form.
pub fn acin_state(params: &AcinParams) -> PureState {
    let l = params.lambdas();
    let phase = Complex64::from_polar(1.0, params.phase());
    let dims = DimsSpec::new(vec![2, 2, 2]).unwrap();
    let mut amps = vec![c(0.0, 0.0); 8];
    amps[0] = c(l[0], 0.0); // |000>
    amps[4] = phase * l[1]; // |100>
    amps[5] = c(l[2], 0.0); // |101>
    amps[6] = c(l[3], 0.0); // |110>
    amps[7] = c(l[4], 0.0); // |111>
    PureState::new(amps, dims).expect("canonical-form weights are unit by construction")
}

/// `p |Phi+><Phi+| + (1-p) I/4` on two qubits.
pub fn werner(p: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidInput(format!(
            "werner mixing parameter must lie in [0, 1], got {p}"
        )));
    }
    let phi = bell_phi_plus().to_density();
    let mut m = phi.matrix().scaled(c(p, 0.0));
    for i in 0..4 {
        m[(i, i)] += c((1.0 - p) / 4.0, 0.0);
    }
    Ok(DensityMatrix::new_unchecked(m, DimsSpec::new(vec![2, 2]).unwrap()))
}

/// `F |Phi_d><Phi_d| + (1-F) (I - |Phi_d><Phi_d|)/(d^2-1)` on two qudits,
/// where `|Phi_d> = sum_i |ii>/sqrt(d)`.
pub fn isotropic(d: usize, fidelity: f64) -> Result<DensityMatrix> {
    if d < 2 {
        return Err(Error::InvalidInput("isotropic state needs local dimension >= 2".into()));
    }
    if !(0.0..=1.0).contains(&fidelity) {
        return Err(Error::InvalidInput(format!(
            "isotropic fidelity must lie in [0, 1], got {fidelity}"
        )));
    }
    let dims = DimsSpec::new(vec![d, d])?;
    let total = dims.total_dim();
    let mut phi = vec![c(0.0, 0.0); total];
    let weight = 1.0 / (d as f64).sqrt();
    for i in 0..d {
        phi[dims.compose(&[i, i])] = c(weight, 0.0);
    }
    let rest = (1.0 - fidelity) / ((total - 1) as f64);
    let mut m = ComplexMatrix::from_fn(total, total, |r, cl| {
        phi[r] * phi[cl].conj() * (fidelity - rest)
    });
    for i in 0..total {
        m[(i, i)] += c(rest, 0.0);
    }
    Ok(DensityMatrix::new_unchecked(m, dims))
}

/// Rank-4 two-qutrit state from four interlocking unnormalized vectors whose
/// zero pattern makes the partial transpose automatically positive. The fixed
/// parameters `(a,b,c,d,m,n) = (1,2,3,1,1,2)` with `s = ac/n`, `t = ad/m`
/// follow the published construction of this family, which is entangled while
/// escaping every positive-partial-transpose test.
pub fn chessboard_ppt() -> DensityMatrix {
    let (a, b, d_p, m, n) = (1.0, 2.0, 1.0, 1.0, 2.0);
    let c_p = 3.0;
    let s = a * c_p / n;
    let t = a * d_p / m;
    // Index 3*j + k for row j (first party) and column k (second party).
    let vectors: [Vec<(usize, f64)>; 4] = [
        vec![(0, m), (2, s), (4, n)],
        vec![(1, a), (3, b), (5, c_p)],
        vec![(0, n), (4, -m), (6, t)],
        vec![(1, b), (3, -a), (7, d_p)],
    ];
    let mut matrix = ComplexMatrix::zeros(9, 9);
    for v in &vectors {
        for &(i, vi) in v {
            for &(j, vj) in v {
                matrix[(i, j)] += c(vi * vj, 0.0);
            }
        }
    }
    let trace = matrix.trace().re;
    let matrix = matrix.scaled(c(1.0 / trace, 0.0));
    DensityMatrix::new_unchecked(matrix, DimsSpec::new(vec![3, 3]).unwrap())
}

/// Haar-distributed pure state: every amplitude gets independent standard
/// normal real and imaginary parts, then the vector is normalized. The
/// generator is ChaCha12 keyed by the 64-bit seed, so a given (dims, seed)
/// pair yields the same state on every platform.
pub fn haar_random_pure(dims: &DimsSpec, seed: u64) -> PureState {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    sample_haar(dims, &mut rng)
}

/// Draws one Haar-distributed pure state from an existing stream.
pub fn sample_haar(dims: &DimsSpec, rng: &mut ChaCha12Rng) -> PureState {
    let total = dims.total_dim();
    loop {
        let amps: Vec<Complex64> = (0..total)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                c(re, im)
            })
            .collect();
        if let Ok(state) = PureState::normalized(amps, dims.clone()) {
            return state;
        }
        // Astronomically unlikely all-zero draw: sample again.
    }
}

// --- named-state grammar -------------------------------------------------

/// Builds a state from a `name[:params]` spec string.
///
/// Supported forms:
/// - `bell`
/// - `ghz:LxD` (e.g. `ghz:3x2`)
/// - `w:L`
/// - `product:D1xD2x..` (the `|0..0>` product state of those dimensions)
/// - `acin:l0=..,l1=..,l2=..,l3=..,l4=..,psi=..` (weights rescaled to unit
///   square sum; omitted keys default to 0)
/// - `werner:P`
/// - `isotropic:D,F`
/// - `chessboard-ppt`
/// - `haar:D1xD2x..` (uses `seed`)
///
/// Only `haar` consumes the seed.
pub fn make_named_state(spec: &str, seed: u64) -> Result<State> {
    let spec = spec.trim();
    let (name, args) = match spec.split_once(':') {
        Some((n, a)) => (n.trim(), Some(a.trim())),
        None => (spec, None),
    };
    let no_args = |name: &str| -> Result<()> {
        match args {
            Some(a) if !a.is_empty() => Err(Error::Parse(format!(
                "state {name:?} takes no parameters, got {a:?}"
            ))),
            _ => Ok(()),
        }
    };
    let required = |name: &str| -> Result<&str> {
        match args {
            Some(a) if !a.is_empty() => Ok(a),
            _ => Err(Error::Parse(format!("state {name:?} requires parameters"))),
        }
    };
    match name {
        "bell" => {
            no_args("bell")?;
            Ok(State::Pure(bell_phi_plus()))
        }
        "ghz" => {
            let a = required("ghz")?;
            let (l, d) = a.split_once('x').ok_or_else(|| {
                Error::Parse(format!("ghz takes LxD, e.g. ghz:3x2, got {a:?}"))
            })?;
            let l: usize = l.trim().parse().map_err(|_| Error::Parse(format!("bad party count {l:?}")))?;
            let d: usize = d.trim().parse().map_err(|_| Error::Parse(format!("bad local dimension {d:?}")))?;
            Ok(State::Pure(ghz(l, d)?))
        }
        "w" => {
            let a = required("w")?;
            let l: usize = a.parse().map_err(|_| Error::Parse(format!("bad party count {a:?}")))?;
            Ok(State::Pure(w_state(l)?))
        }
        "product" => {
            let dims: DimsSpec = required("product")?.parse()?;
            let locals: Vec<Vec<Complex64>> = dims
                .as_slice()
                .iter()
                .map(|&d| {
                    let mut v = vec![c(0.0, 0.0); d];
                    v[0] = c(1.0, 0.0);
                    v
                })
                .collect();
            Ok(State::Pure(product_state(&locals)?))
        }
        "acin" => {
            let a = required("acin")?;
            let mut raw = [0.0f64; 5];
            let mut psi = 0.0f64;
            for item in a.split(',') {
                let (key, value) = item.split_once('=').ok_or_else(|| {
                    Error::Parse(format!("acin parameters are key=value pairs, got {item:?}"))
                })?;
                let value: f64 = value
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad number {value:?} for {key:?}")))?;
                match key.trim() {
                    "l0" => raw[0] = value,
                    "l1" => raw[1] = value,
                    "l2" => raw[2] = value,
                    "l3" => raw[3] = value,
                    "l4" => raw[4] = value,
                    "psi" => psi = value,
                    other => {
                        return Err(Error::Parse(format!(
                            "unknown acin parameter {other:?} (expected l0..l4, psi)"
                        )))
                    }
                }
            }
            Ok(State::Pure(acin_state(&AcinParams::from_raw(raw, psi)?)))
        }
        "werner" => {
            let a = required("werner")?;
            let p: f64 = a.parse().map_err(|_| Error::Parse(format!("bad mixing parameter {a:?}")))?;
            Ok(State::Density(werner(p)?))
        }
        "isotropic" => {
            let a = required("isotropic")?;
            let (d, f) = a.split_once(',').ok_or_else(|| {
                Error::Parse(format!("isotropic takes D,F, e.g. isotropic:3,0.9, got {a:?}"))
            })?;
            let d: usize = d.trim().parse().map_err(|_| Error::Parse(format!("bad local dimension {d:?}")))?;
            let f: f64 = f.trim().parse().map_err(|_| Error::Parse(format!("bad fidelity {f:?}")))?;
            Ok(State::Density(isotropic(d, f)?))
        }
        "chessboard-ppt" => {
            no_args("chessboard-ppt")?;
            Ok(State::Density(chessboard_ppt()))
        }
        "haar" => {
            let dims: DimsSpec = required("haar")?.parse()?;
            Ok(State::Pure(haar_random_pure(&dims, seed)))
        }
        other => Err(Error::Parse(format!(
            "unknown state name {other:?} (expected bell, ghz, w, product, acin, werner, isotropic, chessboard-ppt, haar)"
        ))),
    }
}

// --- file format ----------------------------------------------------------

/// On-disk JSON form of a state. Pure states carry `amplitudes`, density
/// matrices carry row-major `entries`; both store complex numbers as
/// `[re, im]` pairs.
#[derive(Serialize, Deserialize)]
pub struct StateDocument {
    pub kind: String,
    pub dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entries: Option<Vec<[f64; 2]>>,
}

pub fn to_document(state: &State) -> StateDocument {
    match state {
        State::Pure(p) => StateDocument {
            kind: "pure".into(),
            dims: p.dims().as_slice().to_vec(),
            amplitudes: Some(p.amplitudes().iter().map(|a| [a.re, a.im]).collect()),
            entries: None,
        },
        State::Density(d) => {
            let m = d.matrix();
            let mut entries = Vec::with_capacity(m.rows() * m.cols());
            for r in 0..m.rows() {
                for cl in 0..m.cols() {
                    let v = m.get(r, cl);
                    entries.push([v.re, v.im]);
                }
            }
            StateDocument {
                kind: "density".into(),
                dims: d.dims().as_slice().to_vec(),
                amplitudes: None,
                entries: Some(entries),
            }
        }
    }
}

pub fn from_document(doc: &StateDocument) -> Result<State> {
    let dims = DimsSpec::new(doc.dims.clone())?;
    match doc.kind.as_str() {
        "pure" => {
            if doc.entries.is_some() {
                return Err(Error::Parse("pure state document must not carry `entries`".into()));
            }
            let amps = doc
                .amplitudes
                .as_ref()
                .ok_or_else(|| Error::Parse("pure state document is missing `amplitudes`".into()))?;
            let amplitudes: Vec<Complex64> = amps.iter().map(|[re, im]| c(*re, *im)).collect();
            Ok(State::Pure(PureState::new(amplitudes, dims)?))
        }
        "density" => {
            if doc.amplitudes.is_some() {
                return Err(Error::Parse(
                    "density state document must not carry `amplitudes`".into(),
                ));
            }
            let entries = doc
                .entries
                .as_ref()
                .ok_or_else(|| Error::Parse("density state document is missing `entries`".into()))?;
            let n = dims.total_dim();
            if entries.len() != n * n {
                return Err(Error::DimensionMismatch(format!(
                    "density document has {} entries but dims {} require {}",
                    entries.len(),
                    dims,
                    n * n
                )));
            }
            let m = ComplexMatrix::from_fn(n, n, |r, cl| {
                let [re, im] = entries[r * n + cl];
                c(re, im)
            });
            Ok(State::Density(DensityMatrix::new(m, dims)?))
        }
        other => Err(Error::Parse(format!(
            "unknown state kind {other:?} (expected \"pure\" or \"density\")"
        ))),
    }
}

/// Parses the JSON state-file format.
pub fn parse_state(text: &str) -> Result<State> {
    let doc: StateDocument =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("bad state document: {e}")))?;
    from_document(&doc)
}

/// Serializes a state to the JSON state-file format. Floats are written in
/// shortest round-trip form, so parse(serialize(s)) is exact.
pub fn serialize_state(state: &State) -> String {
    serde_json::to_string(&to_document(state)).expect("state document serialization cannot fail")
}
