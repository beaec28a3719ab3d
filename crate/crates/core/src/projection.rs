//! Bipartitions of a multipartite system and the two-qubit states obtained by
//! sandwiching a state between a pair of antisymmetric generators.
//!
//! For a bipartite state rho and generators `L_a`, `L_b`, the unnormalized
//! projection `(L_a (x) L_b) rho (L_a (x) L_b)^dagger` is supported on the
//! four composite basis states built from the generators' index pairs, so it
//! is read off entry by entry instead of ever forming the big operators.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::Generator;
use crate::linalg::{ComplexMatrix, DimsSpec};
use crate::states::{DensityMatrix, PureState};

/// Projections with Frobenius weight below this are reported as degenerate.
pub const DEGENERACY_CUTOFF: f64 = 1e-14;

/// A two-sided split of the parties. Side A always lists the lower party
/// indices' side in canonical enumeration (party 0 lives in A).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bipartition {
    parties_a: Vec<usize>,
    parties_b: Vec<usize>,
    dim_a: usize,
    dim_b: usize,
}

impl Bipartition {
    /// Splits `dims` into `parties_a` and its complement.
    pub fn new(dims: &DimsSpec, parties_a: &[usize]) -> Result<Self> {
        if dims.party_count() < 2 {
            return Err(Error::InvalidInput(
                "bipartitions need at least two parties".into(),
            ));
        }
        let mut a = parties_a.to_vec();
        a.sort_unstable();
        a.dedup();
        if a.len() != parties_a.len() {
            return Err(Error::InvalidInput("bipartition side A has duplicate parties".into()));
        }
        if a.iter().any(|&p| p >= dims.party_count()) {
            return Err(Error::InvalidInput(format!(
                "bipartition party out of range for {} parties",
                dims.party_count()
            )));
        }
        if a.is_empty() || a.len() == dims.party_count() {
            return Err(Error::InvalidInput(
                "bipartition sides must both be non-empty".into(),
            ));
        }
        let b: Vec<usize> = (0..dims.party_count()).filter(|p| !a.contains(p)).collect();
        let dim_a = a.iter().map(|&p| dims.dim(p)).product();
        let dim_b = b.iter().map(|&p| dims.dim(p)).product();
        Ok(Bipartition { parties_a: a, parties_b: b, dim_a, dim_b })
    }

    pub fn parties_a(&self) -> &[usize] {
        &self.parties_a
    }

    pub fn parties_b(&self) -> &[usize] {
        &self.parties_b
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    /// Bitmask of side A; bit `p` set means party `p` is in A.
    pub fn mask(&self) -> u64 {
        self.parties_a.iter().fold(0u64, |m, &p| m | (1u64 << p))
    }

    /// Human-readable form like `0+1|2`.
    pub fn label(&self) -> String {
        let join = |ps: &[usize]| {
            ps.iter().map(|p| p.to_string()).collect::<Vec<_>>().join("+")
        };
        format!("{}|{}", join(&self.parties_a), join(&self.parties_b))
    }
}

/// All 2^(L-1) - 1 bipartitions, ordered by ascending side-A bitmask. Party 0
/// is always on side A, which picks one representative per unordered split.
pub fn enumerate_bipartitions(dims: &DimsSpec) -> Result<Vec<Bipartition>> {
    let l = dims.party_count();
    if l < 2 {
        return Err(Error::InvalidInput(
            "bipartitions need at least two parties".into(),
        ));
    }
    if l > 63 {
        return Err(Error::InvalidInput("more than 63 parties are not supported".into()));
    }
    let full = (1u64 << l) - 1;
    let mut cuts = Vec::with_capacity((1usize << (l - 1)) - 1);
    let mut mask = 1u64;
    while mask < full {
        let parties_a: Vec<usize> = (0..l).filter(|&p| mask & (1 << p) != 0).collect();
        cuts.push(Bipartition::new(dims, &parties_a)?);
        mask += 2; // keep bit 0 set
    }
    Ok(cuts)
}

/// Composite-index permutation putting side-A parties first (most
/// significant), each side in ascending party order. Returns `map` with
/// `map[old_index] = new_index`.
pub fn split_index_map(dims: &DimsSpec, cut: &Bipartition) -> Vec<usize> {
    let total = dims.total_dim();
    let mut map = vec![0usize; total];
    for (old, slot) in map.iter_mut().enumerate() {
        let digits = dims.decompose(old);
        let mut idx_a = 0usize;
        for &p in &cut.parties_a {
            idx_a = idx_a * dims.dim(p) + digits[p];
        }
        let mut idx_b = 0usize;
        for &p in &cut.parties_b {
            idx_b = idx_b * dims.dim(p) + digits[p];
        }
        *slot = idx_a * cut.dim_b + idx_b;
    }
    map
}

fn check_cut(dims: &DimsSpec, cut: &Bipartition) -> Result<()> {
    let rebuilt = Bipartition::new(dims, &cut.parties_a)?;
    if rebuilt != *cut {
        return Err(Error::DimensionMismatch(format!(
            "bipartition {} does not belong to dims {}",
            cut.label(),
            dims
        )));
    }
    Ok(())
}

/// Reorders amplitudes so the state is bipartite over `(dim_a, dim_b)`.
pub fn split_pure(psi: &PureState, cut: &Bipartition) -> Result<PureState> {
    check_cut(psi.dims(), cut)?;
    let map = split_index_map(psi.dims(), cut);
    let mut amps = vec![Complex64::new(0.0, 0.0); psi.amplitudes().len()];
    for (old, &new) in map.iter().enumerate() {
        amps[new] = psi.amplitude(old);
    }
    PureState::new(amps, DimsSpec::new(vec![cut.dim_a, cut.dim_b])?)
}

/// Inverse of [`split_pure`].
pub fn unsplit_pure(psi: &PureState, cut: &Bipartition, dims: &DimsSpec) -> Result<PureState> {
    check_cut(dims, cut)?;
    if psi.dims().as_slice() != [cut.dim_a, cut.dim_b] {
        return Err(Error::DimensionMismatch(format!(
            "state dims {} do not match the split form {}x{}",
            psi.dims(),
            cut.dim_a,
            cut.dim_b
        )));
    }
    let map = split_index_map(dims, cut);
    let mut amps = vec![Complex64::new(0.0, 0.0); psi.amplitudes().len()];
    for (old, &new) in map.iter().enumerate() {
        amps[old] = psi.amplitude(new);
    }
    PureState::new(amps, dims.clone())
}

/// Reorders a density matrix the same way on rows and columns.
pub fn split_density(rho: &DensityMatrix, cut: &Bipartition) -> Result<DensityMatrix> {
    check_cut(rho.dims(), cut)?;
    let map = split_index_map(rho.dims(), cut);
    let n = rho.matrix().rows();
    let mut m = ComplexMatrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            m[(map[r], map[c])] = rho.matrix().get(r, c);
        }
    }
    Ok(DensityMatrix::new_unchecked(
        m,
        DimsSpec::new(vec![cut.dim_a, cut.dim_b])?,
    ))
}

/// Normalized two-qubit state carved out by one generator pair, plus the
/// Frobenius weight the projection carried before normalization.
///
/// Compact basis order: `(j_a j_b, j_a k_b, k_a j_b, k_a k_b)`.
#[derive(Clone, Debug)]
pub struct ProjectedTwoQubit {
    compact: ComplexMatrix,
    weight: f64,
    alpha: Generator,
    beta: Generator,
}

impl ProjectedTwoQubit {
    /// Trace-normalized 4x4 density matrix.
    pub fn compact(&self) -> &ComplexMatrix {
        &self.compact
    }

    /// `sqrt(Tr(X X^dagger))` of the unnormalized projection X. For pure
    /// inputs this equals the squared norm of the projected vector.
    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn alpha(&self) -> &Generator {
        &self.alpha
    }

    pub fn beta(&self) -> &Generator {
        &self.beta
    }

    /// The compact state as a two-qubit density matrix.
    pub fn compact_density(&self) -> DensityMatrix {
        DensityMatrix::new_unchecked(self.compact.clone(), DimsSpec::new(vec![2, 2]).unwrap())
    }
}

fn check_generators(dims: &DimsSpec, ga: &Generator, gb: &Generator) -> Result<()> {
    if dims.party_count() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "projection needs a bipartite state (split first), got {} parties",
            dims.party_count()
        )));
    }
    if ga.dim() != dims.dim(0) || gb.dim() != dims.dim(1) {
        return Err(Error::DimensionMismatch(format!(
            "generator dims ({}, {}) do not match state dims {}",
            ga.dim(),
            gb.dim(),
            dims
        )));
    }
    Ok(())
}

/// Sign/source pattern of the sandwich on the four surviving basis states:
/// target `(j_a j_b, j_a k_b, k_a j_b, k_a k_b)` reads source
/// `(k_a k_b, k_a j_b, j_a k_b, j_a j_b)` with signs `(+, -, -, +)`.
fn compact_sources(ga: &Generator, gb: &Generator, dim_b: usize) -> ([usize; 4], [f64; 4]) {
    let (ja, ka) = (ga.j(), ga.k());
    let (jb, kb) = (gb.j(), gb.k());
    let src = [
        ka * dim_b + kb,
        ka * dim_b + jb,
        ja * dim_b + kb,
        ja * dim_b + jb,
    ];
    (src, [1.0, -1.0, -1.0, 1.0])
}

/// Projects a bipartite density matrix onto the generator pair's two-qubit
/// slice. Errors with [`Error::DegenerateProjection`] when the slice carries
/// Frobenius weight below [`DEGENERACY_CUTOFF`].
pub fn project_two_qubit(
    rho: &DensityMatrix,
    ga: &Generator,
    gb: &Generator,
) -> Result<ProjectedTwoQubit> {
    check_generators(rho.dims(), ga, gb)?;
    let (src, sign) = compact_sources(ga, gb, rho.dims().dim(1));
    let m = rho.matrix();
    let mut unnorm = ComplexMatrix::zeros(4, 4);
    for r in 0..4 {
        for c in 0..4 {
            unnorm[(r, c)] = m.get(src[r], src[c]) * (sign[r] * sign[c]);
        }
    }
    let weight = unnorm.frobenius_norm();
    if weight < DEGENERACY_CUTOFF {
        return Err(Error::DegenerateProjection { weight, cutoff: DEGENERACY_CUTOFF });
    }
    let trace = unnorm.trace().re;
    let compact = unnorm.scaled(Complex64::new(1.0 / trace, 0.0));
    Ok(ProjectedTwoQubit { compact, weight, alpha: *ga, beta: *gb })
}

/// Pure-state projection: the four surviving amplitudes and the weight
/// `<v|v>` they carry. `concurrence` comes straight from the 2x2 minor.
#[derive(Clone, Debug)]
pub struct ProjectedPureVector {
    vector: [Complex64; 4],
    weight: f64,
}

impl ProjectedPureVector {
    pub fn vector(&self) -> &[Complex64; 4] {
        &self.vector
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    /// Concurrence of the normalized projected vector: `2|v0 v3 - v1 v2| / <v|v>`.
    pub fn concurrence(&self) -> f64 {
        let v = &self.vector;
        2.0 * (v[0] * v[3] - v[1] * v[2]).norm() / self.weight
    }

    /// Trace-normalized density matrix of the projected vector.
    pub fn compact(&self) -> ComplexMatrix {
        let v = &self.vector;
        ComplexMatrix::from_fn(4, 4, |r, c| v[r] * v[c].conj() / self.weight)
    }
}

/// Projects a bipartite pure state onto a generator pair's two-qubit slice.
pub fn project_two_qubit_pure(
    psi: &PureState,
    ga: &Generator,
    gb: &Generator,
) -> Result<ProjectedPureVector> {
    check_generators(psi.dims(), ga, gb)?;
    let (src, sign) = compact_sources(ga, gb, psi.dims().dim(1));
    let mut v = [Complex64::new(0.0, 0.0); 4];
    for (slot, (&s, &sg)) in v.iter_mut().zip(src.iter().zip(&sign)) {
        *slot = psi.amplitude(s) * sg;
    }
    let weight: f64 = v.iter().map(|x| x.norm_sqr()).sum();
    if weight < DEGENERACY_CUTOFF {
        return Err(Error::DegenerateProjection { weight, cutoff: DEGENERACY_CUTOFF });
    }
    Ok(ProjectedPureVector { vector: v, weight })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermitian_eigen, partial_transpose};
    use crate::states::{acin_state, haar_random_pure, AcinParams};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn bipartition_enumeration_order_and_count() {
        let dims3 = DimsSpec::new(vec![2, 2, 2]).unwrap();
        let cuts = enumerate_bipartitions(&dims3).unwrap();
        assert_eq!(cuts.len(), 3);
        assert_eq!(cuts[0].parties_a(), &[0]);
        assert_eq!(cuts[0].parties_b(), &[1, 2]);
        assert_eq!(cuts[1].parties_a(), &[0, 1]);
        assert_eq!(cuts[2].parties_a(), &[0, 2]);
        assert_eq!(cuts[2].parties_b(), &[1]);
        assert_eq!(cuts[2].label(), "0+2|1");

        for l in 2..=5usize {
            let dims = DimsSpec::new(vec![2; l]).unwrap();
            assert_eq!(enumerate_bipartitions(&dims).unwrap().len(), (1 << (l - 1)) - 1);
        }
        assert!(enumerate_bipartitions(&DimsSpec::new(vec![4]).unwrap()).is_err());
    }

    #[test]
    fn bipartition_dims_multiply_out() {
        let dims = DimsSpec::new(vec![2, 3, 4]).unwrap();
        let cut = Bipartition::new(&dims, &[0, 2]).unwrap();
        assert_eq!(cut.dim_a(), 8);
        assert_eq!(cut.dim_b(), 3);
        assert_eq!(cut.mask(), 0b101);
        assert!(Bipartition::new(&dims, &[]).is_err());
        assert!(Bipartition::new(&dims, &[0, 1, 2]).is_err());
        assert!(Bipartition::new(&dims, &[3]).is_err());
    }

    #[test]
    fn split_map_places_side_a_most_significant() {
        // Three qubits, cut {0,2}|{1}: |i0 i1 i2> goes to (i0*2 + i2)*2 + i1.
        let dims = DimsSpec::new(vec![2, 2, 2]).unwrap();
        let cut = Bipartition::new(&dims, &[0, 2]).unwrap();
        let map = split_index_map(&dims, &cut);
        for i0 in 0..2usize {
            for i1 in 0..2usize {
                for i2 in 0..2usize {
                    let old = dims.compose(&[i0, i1, i2]);
                    assert_eq!(map[old], (i0 * 2 + i2) * 2 + i1);
                }
            }
        }
    }

    #[test]
    fn split_round_trips_and_matches_density_route() {
        let dims = DimsSpec::new(vec![2, 3, 2]).unwrap();
        let psi = haar_random_pure(&dims, 17);
        for cut in enumerate_bipartitions(&dims).unwrap() {
            let split = split_pure(&psi, &cut).unwrap();
            assert_eq!(split.dims().as_slice(), &[cut.dim_a(), cut.dim_b()]);
            let back = unsplit_pure(&split, &cut, &dims).unwrap();
            for (a, b) in psi.amplitudes().iter().zip(back.amplitudes()) {
                assert_eq!(a, b);
            }
            let via_density = split_density(&psi.to_density(), &cut).unwrap();
            assert!(via_density.matrix().max_abs_diff(split.to_density().matrix()) < 1e-14);
        }
    }

    #[test]
    fn projection_reads_the_canonical_slice_of_the_three_qubit_form() {
        // Full-parameter canonical state; cut {0,1}|{2}, generators (0,2) and (0,1).
        let [l0, l1, l2, l3, l4] = [0.5, 0.4, 0.5, 0.3, 0.5];
        let psi_angle = 0.7;
        let params = AcinParams::new([l0, l1, l2, l3, l4], psi_angle).unwrap();
        let psi = acin_state(&params);
        let dims = psi.dims().clone();
        let cut = Bipartition::new(&dims, &[0, 1]).unwrap();
        let split = split_pure(&psi, &cut).unwrap();
        let ga = Generator::new(4, 0, 2).unwrap();
        let gb = Generator::new(2, 0, 1).unwrap();

        let proj = project_two_qubit(&split.to_density(), &ga, &gb).unwrap();
        let s = l0 * l0 + l1 * l1 + l2 * l2;
        assert!((proj.weight() - s).abs() < 1e-12);

        // Projected vector is (l2, -l1 e^{i psi}, 0, l0); compare the full matrix.
        let phase = Complex64::from_polar(1.0, psi_angle);
        let v = [c(l2, 0.0), -phase * l1, c(0.0, 0.0), c(l0, 0.0)];
        let expected = ComplexMatrix::from_fn(4, 4, |r, cl| v[r] * v[cl].conj() / s);
        assert!(proj.compact().max_abs_diff(&expected) < 1e-12);
        assert!((proj.compact().trace().re - 1.0).abs() < 1e-10);

        let pure = project_two_qubit_pure(&split, &ga, &gb).unwrap();
        assert!((pure.weight() - s).abs() < 1e-12);
        let expect_conc = 2.0 * l0 * l2 / s;
        assert!((pure.concurrence() - expect_conc).abs() < 1e-12);
    }

    #[test]
    fn projection_matches_on_the_second_canonical_slice() {
        // Same state, generators (2,3) and (0,1): vector (l4, -l3, -l2, l1 e^{i psi}).
        let [l0, l1, l2, l3, l4] = [0.5, 0.4, 0.5, 0.3, 0.5];
        let psi_angle = 0.7;
        let params = AcinParams::new([l0, l1, l2, l3, l4], psi_angle).unwrap();
        let psi = acin_state(&params);
        let cut = Bipartition::new(psi.dims(), &[0, 1]).unwrap();
        let split = split_pure(&psi, &cut).unwrap();
        let ga = Generator::new(4, 2, 3).unwrap();
        let gb = Generator::new(2, 0, 1).unwrap();
        let pure = project_two_qubit_pure(&split, &ga, &gb).unwrap();
        let w = l1 * l1 + l2 * l2 + l3 * l3 + l4 * l4;
        assert!((pure.weight() - w).abs() < 1e-12);
        let phase = Complex64::from_polar(1.0, psi_angle);
        let minor = (phase * l1 * l4 - c(l2 * l3, 0.0)).norm();
        assert!((pure.concurrence() - 2.0 * minor / w).abs() < 1e-12);
    }

    #[test]
    fn pure_and_density_projections_agree() {
        let dims = DimsSpec::new(vec![3, 3]).unwrap();
        let psi = haar_random_pure(&dims, 23);
        let rho = psi.to_density();
        for ga in crate::generators::enumerate_generators(3).unwrap() {
            for gb in crate::generators::enumerate_generators(3).unwrap() {
                let from_pure = project_two_qubit_pure(&psi, &ga, &gb).unwrap();
                let from_density = project_two_qubit(&rho, &ga, &gb).unwrap();
                assert!((from_pure.weight() - from_density.weight()).abs() < 1e-12);
                assert!(from_pure.compact().max_abs_diff(from_density.compact()) < 1e-12);
            }
        }
    }

    #[test]
    fn basis_states_outside_the_slice_are_degenerate() {
        let dims = DimsSpec::new(vec![3, 3]).unwrap();
        let mut amps = vec![c(0.0, 0.0); 9];
        amps[0] = c(1.0, 0.0); // |00>
        let psi = PureState::new(amps, dims).unwrap();
        let g12 = Generator::new(3, 1, 2).unwrap();
        match project_two_qubit_pure(&psi, &g12, &g12) {
            Err(Error::DegenerateProjection { .. }) => {}
            other => panic!("expected degenerate projection, got {other:?}"),
        }
        match project_two_qubit(&psi.to_density(), &g12, &g12) {
            Err(Error::DegenerateProjection { .. }) => {}
            other => panic!("expected degenerate projection, got {other:?}"),
        }
        // On two qubits the same state is NOT degenerate: the slice is the
        // whole space and the projection lands on |11>.
        let dims2 = DimsSpec::new(vec![2, 2]).unwrap();
        let mut amps2 = vec![c(0.0, 0.0); 4];
        amps2[0] = c(1.0, 0.0);
        let psi2 = PureState::new(amps2, dims2).unwrap();
        let g01 = Generator::new(2, 0, 1).unwrap();
        let proj = project_two_qubit(&psi2.to_density(), &g01, &g01).unwrap();
        assert!((proj.weight() - 1.0).abs() < 1e-14);
        assert!((proj.compact().get(3, 3).re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn projection_rejects_mismatched_shapes() {
        let dims = DimsSpec::new(vec![2, 2, 2]).unwrap();
        let psi = haar_random_pure(&dims, 3);
        let g = Generator::new(2, 0, 1).unwrap();
        assert!(project_two_qubit(&psi.to_density(), &g, &g).is_err());
        let dims2 = DimsSpec::new(vec![3, 2]).unwrap();
        let psi2 = haar_random_pure(&dims2, 3);
        assert!(project_two_qubit(&psi2.to_density(), &g, &g).is_err());
    }

    #[test]
    fn projections_of_ppt_states_stay_ppt() {
        // Random separable mixtures on 3x3 are PPT; their projections, scaled
        // back to the unnormalized weight, must stay PPT too.
        let mut rng = ChaCha12Rng::seed_from_u64(55);
        let dims = DimsSpec::new(vec![3, 3]).unwrap();
        let dims2 = DimsSpec::new(vec![2, 2]).unwrap();
        for _ in 0..10 {
            let mut m = ComplexMatrix::zeros(9, 9);
            for _ in 0..4 {
                let a = haar_random_pure(&DimsSpec::new(vec![3]).unwrap(), rng.gen());
                let b = haar_random_pure(&DimsSpec::new(vec![3]).unwrap(), rng.gen());
                let w: f64 = rng.gen_range(0.1..1.0);
                for r in 0..9 {
                    for cl in 0..9 {
                        let (ra, rb) = (r / 3, r % 3);
                        let (ca, cb) = (cl / 3, cl % 3);
                        m[(r, cl)] += c(w, 0.0)
                            * a.amplitude(ra)
                            * a.amplitude(ca).conj()
                            * b.amplitude(rb)
                            * b.amplitude(cb).conj();
                    }
                }
            }
            let trace = m.trace().re;
            let rho = DensityMatrix::new(m.scaled(c(1.0 / trace, 0.0)), dims.clone()).unwrap();
            for ga in crate::generators::enumerate_generators(3).unwrap() {
                for gb in crate::generators::enumerate_generators(3).unwrap() {
                    let proj = match project_two_qubit(&rho, &ga, &gb) {
                        Ok(p) => p,
                        Err(Error::DegenerateProjection { .. }) => continue,
                        Err(e) => panic!("{e}"),
                    };
                    let unnorm = proj.compact().scaled(c(proj.weight(), 0.0));
                    let pt = partial_transpose(&unnorm, &dims2, &[1]).unwrap();
                    let (w, _) = hermitian_eigen(&pt).unwrap();
                    assert!(w[0] >= -1e-8, "PPT broke: {}", w[0]);
                }
            }
        }
    }
}
