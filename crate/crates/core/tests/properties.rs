//! Cross-module invariants, checked against brute-force oracles on randomly
//! generated states.

use bellsweep::chsh::{compact_bell_operator, evaluate_bell, horodecki_max_violation, TSIRELSON};
use bellsweep::concurrence::{
    concurrence_decomposition, multipartite_concurrence, pure_bipartite_concurrence,
};
use bellsweep::generators::{bell_operator, embed_observable, Generator, MeasurementSetting};
use bellsweep::linalg::{kron, ComplexMatrix, DimsSpec};
use bellsweep::projection::{
    enumerate_bipartitions, project_two_qubit, split_pure, Bipartition,
};
use bellsweep::states::{haar_random_pure, product_state, DensityMatrix, PureState, State};
use bellsweep::sweep::{sweep, SweepOptions};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn unit_vector(rng: &mut ChaCha12Rng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [
            rng.sample(rand_distr::StandardNormal),
            rng.sample(rand_distr::StandardNormal),
            rng.sample(rand_distr::StandardNormal),
        ];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-6 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

fn random_setting(rng: &mut ChaCha12Rng) -> MeasurementSetting {
    MeasurementSetting::new(
        unit_vector(rng),
        unit_vector(rng),
        unit_vector(rng),
        unit_vector(rng),
    )
    .unwrap()
}

fn random_generator(rng: &mut ChaCha12Rng, dim: usize) -> Generator {
    let j = rng.gen_range(0..dim - 1);
    let k = rng.gen_range(j + 1..dim);
    Generator::new(dim, j, k).unwrap()
}

/// Ginibre-sampled full-rank density matrix.
fn random_density(rng: &mut ChaCha12Rng, dims: &DimsSpec) -> DensityMatrix {
    let n = dims.total_dim();
    let mut g = ComplexMatrix::zeros(n, n);
    for r in 0..n {
        for cl in 0..n {
            g[(r, cl)] = c(
                rng.sample(rand_distr::StandardNormal),
                rng.sample(rand_distr::StandardNormal),
            );
        }
    }
    let m = g.mul(&g.dagger());
    let t = m.trace().re;
    DensityMatrix::new(m.scaled(c(1.0 / t, 0.0)), dims.clone()).unwrap()
}

/// Brute-force unnormalized projection `(L_a (x) L_b) rho (L_a (x) L_b)^t`.
fn sandwich_oracle(rho: &DensityMatrix, ga: &Generator, gb: &Generator) -> ComplexMatrix {
    let op = kron(&ga.matrix(), &gb.matrix());
    op.mul(rho.matrix()).mul(&op.dagger())
}

/// Restriction of the oracle's output to the generator slice, in compact
/// basis order `(jj', jk', kj', kk')`.
fn restrict_to_slice(
    x: &ComplexMatrix,
    ga: &Generator,
    gb: &Generator,
    dim_b: usize,
) -> ComplexMatrix {
    let idx = [
        ga.j() * dim_b + gb.j(),
        ga.j() * dim_b + gb.k(),
        ga.k() * dim_b + gb.j(),
        ga.k() * dim_b + gb.k(),
    ];
    ComplexMatrix::from_fn(4, 4, |r, cl| x.get(idx[r], idx[cl]))
}

/// CHSH operator on the compact slice built from the plain embedded
/// observables (the sandwich already absorbed the generators).
fn compact_embedded_chsh(setting: &MeasurementSetting) -> ComplexMatrix {
    let g2 = Generator::new(2, 0, 1).unwrap();
    let a1 = embed_observable(setting.a1, &g2).unwrap();
    let a2 = embed_observable(setting.a2, &g2).unwrap();
    let b1 = embed_observable(setting.b1, &g2).unwrap();
    let b2 = embed_observable(setting.b2, &g2).unwrap();
    kron(&a1, &b1.add(&b2)).add(&kron(&a2, &b1.sub(&b2)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// The full-dimension Bell operator expectation factors exactly through
    /// the compact projection: <B> on rho equals Tr(X) times <CHSH> on the
    /// normalized compact state, where X is the generator sandwich.
    #[test]
    fn bell_expectation_factors_through_the_projection(
        seed in any::<u64>(),
        da in 2usize..5,
        db in 2usize..5,
        mixed in any::<bool>(),
    ) {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let dims = DimsSpec::new(vec![da, db]).unwrap();
        let rho = if mixed {
            random_density(&mut rng, &dims)
        } else {
            haar_random_pure(&dims, rng.gen()).to_density()
        };
        let ga = random_generator(&mut rng, da);
        let gb = random_generator(&mut rng, db);
        let setting = random_setting(&mut rng);

        let x = sandwich_oracle(&rho, &ga, &gb);
        let trace = x.trace().re;
        prop_assume!(trace > 1e-10);

        // Oracle agreement for the projection itself.
        let proj = project_two_qubit(&rho, &ga, &gb).unwrap();
        let x_slice = restrict_to_slice(&x, &ga, &gb, db);
        prop_assert!((proj.weight() - x_slice.frobenius_norm()).abs() < 1e-12);
        let normalized = x_slice.scaled(c(1.0 / trace, 0.0));
        prop_assert!(proj.compact().max_abs_diff(&normalized) < 1e-12);

        // Operator identity.
        let full_op = bell_operator(&ga, &gb, &setting).unwrap();
        let lhs = evaluate_bell(&rho, &full_op).unwrap();
        let compact_state = DensityMatrix::new(
            proj.compact().clone(),
            DimsSpec::new(vec![2, 2]).unwrap(),
        ).unwrap();
        let rhs = trace * evaluate_bell(&compact_state, &compact_embedded_chsh(&setting)).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-10, "full {lhs} vs factored {rhs}");
    }

    /// No setting beats the closed-form maximum, and the seesaw's reported
    /// settings reproduce its value through the operator route.
    #[test]
    fn closed_form_dominates_every_setting(seed in any::<u64>(), mixed in any::<bool>()) {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let dims = DimsSpec::new(vec![2, 2]).unwrap();
        let rho = if mixed {
            random_density(&mut rng, &dims)
        } else {
            haar_random_pure(&dims, rng.gen()).to_density()
        };
        let max = horodecki_max_violation(&rho).unwrap();
        for _ in 0..8 {
            let setting = random_setting(&mut rng);
            let op = compact_bell_operator(&setting);
            let value = evaluate_bell(&rho, &op).unwrap();
            prop_assert!(value.abs() <= max + 1e-9, "setting beat the maximum: {value} > {max}");
        }
        let (best_setting, best_value) = bellsweep::chsh::seesaw_optimize(&rho).unwrap();
        prop_assert!((best_value - max).abs() < 1e-8);
        let reproduced = evaluate_bell(&rho, &compact_bell_operator(&best_setting)).unwrap();
        prop_assert!((reproduced - best_value).abs() < 1e-12);
    }

    /// Product states never violate: every record of the sweep stays within
    /// the classical bound, and so does every explicit operator expectation.
    #[test]
    fn product_states_respect_the_classical_bound(
        seed in any::<u64>(),
        da in 2usize..4,
        db in 2usize..4,
    ) {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let local = |rng: &mut ChaCha12Rng, d: usize| {
            haar_random_pure(&DimsSpec::new(vec![d]).unwrap(), rng.gen())
                .amplitudes()
                .to_vec()
        };
        let a = local(&mut rng, da);
        let b = local(&mut rng, db);
        let psi = product_state(&[a, b]).unwrap();
        let report = sweep(&State::Pure(psi.clone()), &SweepOptions::default()).unwrap();
        prop_assert!(report.best_violation <= 2.0 + 1e-9);
        prop_assert_eq!(report.verdict, bellsweep::sweep::Verdict::Separable);

        let ga = random_generator(&mut rng, da);
        let gb = random_generator(&mut rng, db);
        let setting = random_setting(&mut rng);
        let op = bell_operator(&ga, &gb, &setting).unwrap();
        let value = evaluate_bell(&psi.to_density(), &op).unwrap();
        prop_assert!(value.abs() <= 2.0 + 1e-10);
    }

    /// Relabeling the parties permutes the records but leaves the best
    /// violation unchanged.
    #[test]
    fn best_violation_is_relabeling_invariant(seed in any::<u64>(), swap in 0usize..3) {
        let dims = DimsSpec::new(vec![2, 2, 2]).unwrap();
        let psi = haar_random_pure(&dims, seed);
        // Transpose two parties of the amplitude tensor.
        let (p, q) = match swap {
            0 => (0, 1),
            1 => (1, 2),
            _ => (0, 2),
        };
        let mut perm: Vec<usize> = (0..3).collect();
        perm.swap(p, q);
        let mut amps = vec![c(0.0, 0.0); 8];
        for i in 0..8usize {
            let digits = dims.decompose(i);
            let permuted: Vec<usize> = perm.iter().map(|&s| digits[s]).collect();
            amps[dims.compose(&permuted)] = psi.amplitude(i);
        }
        let relabeled = PureState::new(amps, dims).unwrap();

        let opts = SweepOptions::default();
        let original = sweep(&State::Pure(psi), &opts).unwrap();
        let permuted = sweep(&State::Pure(relabeled), &opts).unwrap();
        prop_assert!(
            (original.best_violation - permuted.best_violation).abs() < 1e-10,
            "relabeling moved the best violation: {} vs {}",
            original.best_violation,
            permuted.best_violation
        );
    }

    /// Prefix maxima of the record list are non-decreasing and end at the
    /// reported best violation.
    #[test]
    fn best_violation_is_the_running_maximum(seed in any::<u64>()) {
        let dims = DimsSpec::new(vec![2, 3]).unwrap();
        let psi = haar_random_pure(&dims, seed);
        let report = sweep(&State::Pure(psi), &SweepOptions::default()).unwrap();
        let mut running: f64 = 0.0;
        for r in &report.records {
            running = running.max(r.max_violation);
        }
        prop_assert_eq!(running, report.best_violation);
    }

    /// Pure-state records obey `violation = 2 sqrt(1 + C^2)`, and the
    /// squared total concurrence recombines from the weighted terms.
    #[test]
    fn record_concurrence_and_decomposition_identity(
        seed in any::<u64>(),
        parties in 2usize..4,
    ) {
        let dims = DimsSpec::new(vec![2; parties]).unwrap();
        let psi = haar_random_pure(&dims, seed);
        let report = sweep(&State::Pure(psi.clone()), &SweepOptions::default()).unwrap();
        for r in &report.records {
            if r.degenerate {
                continue;
            }
            let want = 2.0 * (1.0 + r.concurrence * r.concurrence).sqrt();
            prop_assert!((r.max_violation - want).abs() < 1e-8);
            prop_assert!(r.max_violation >= 2.0 - 1e-9);
            prop_assert!(r.max_violation <= TSIRELSON + 1e-9);
        }

        let breakdown = concurrence_decomposition(&psi).unwrap();
        let total = multipartite_concurrence(&psi).unwrap();
        prop_assert!((breakdown.total - total).abs() < 1e-9);
        prop_assert!((breakdown.recombined_square() - total * total).abs() < 1e-9);
    }

    /// For two parties the sweep's best violation matches the closed form on
    /// the largest-concurrence slice: 2 sqrt(1 + C_max^2).
    #[test]
    fn best_violation_tracks_the_largest_slice_concurrence(
        seed in any::<u64>(),
        da in 2usize..4,
        db in 2usize..4,
    ) {
        let dims = DimsSpec::new(vec![da, db]).unwrap();
        let psi = haar_random_pure(&dims, seed);
        let report = sweep(&State::Pure(psi), &SweepOptions::default()).unwrap();
        let c_max = report
            .records
            .iter()
            .filter(|r| !r.degenerate)
            .map(|r| r.concurrence)
            .fold(0.0f64, f64::max);
        let want = 2.0 * (1.0 + c_max * c_max).sqrt();
        prop_assert!((report.best_violation - want).abs() < 1e-8);
    }

    /// Splitting is unitary: bipartite concurrence does not depend on which
    /// side the split called A, up to the sides swapping roles.
    #[test]
    fn concurrence_is_side_symmetric(seed in any::<u64>()) {
        let dims = DimsSpec::new(vec![2, 2, 3]).unwrap();
        let psi = haar_random_pure(&dims, seed);
        for cut in enumerate_bipartitions(&dims).unwrap() {
            let direct = pure_bipartite_concurrence(&psi, &cut).unwrap();
            // Trace out the other side instead.
            let split = split_pure(&psi, &cut).unwrap();
            let rho = split.to_density();
            let red_b = bellsweep::linalg::partial_trace(rho.matrix(), rho.dims(), &[1]).unwrap();
            let purity_b = red_b.mul(&red_b).trace().re;
            let via_b = (2.0 * (1.0 - purity_b)).max(0.0).sqrt();
            prop_assert!((direct - via_b).abs() < 1e-10);
        }
    }
}

/// PPT mixtures stay quiet under the sweep. Kept outside proptest: the
/// mixture construction is the slow part, and a fixed, seeded set of cases
/// is enough.
#[test]
fn separable_mixtures_never_violate() {
    let mut rng = ChaCha12Rng::seed_from_u64(2024);
    for dims in [vec![2, 2], vec![3, 3], vec![2, 2, 2]] {
        let dims = DimsSpec::new(dims).unwrap();
        for _ in 0..5 {
            let n = dims.total_dim();
            let mut m = ComplexMatrix::zeros(n, n);
            for _ in 0..4 {
                let locals: Vec<Vec<Complex64>> = dims
                    .as_slice()
                    .iter()
                    .map(|&d| {
                        haar_random_pure(&DimsSpec::new(vec![d]).unwrap(), rng.gen())
                            .amplitudes()
                            .to_vec()
                    })
                    .collect();
                let psi = product_state(&locals).unwrap();
                let w: f64 = rng.gen_range(0.1..1.0);
                let outer = psi.to_density();
                for r in 0..n {
                    for cl in 0..n {
                        m[(r, cl)] += outer.matrix().get(r, cl) * w;
                    }
                }
            }
            let t = m.trace().re;
            let rho = DensityMatrix::new(m.scaled(c(1.0 / t, 0.0)), dims.clone()).unwrap();
            let report = sweep(&State::Density(rho), &SweepOptions::default()).unwrap();
            assert!(
                report.best_violation <= 2.0 + 1e-9,
                "separable mixture violated: {}",
                report.best_violation
            );
        }
    }
}

/// Degenerate records carry zeros everywhere and no settings.
#[test]
fn degenerate_records_are_all_zero() {
    let dims = DimsSpec::new(vec![3, 3]).unwrap();
    let mut amps = vec![c(0.0, 0.0); 9];
    amps[0] = c(1.0, 0.0);
    let psi = PureState::new(amps, dims).unwrap();
    let report = sweep(&State::Pure(psi), &SweepOptions::default()).unwrap();
    let degenerate: Vec<_> = report.records.iter().filter(|r| r.degenerate).collect();
    assert!(!degenerate.is_empty());
    for r in degenerate {
        assert_eq!(r.weight, 0.0);
        assert_eq!(r.concurrence, 0.0);
        assert_eq!(r.max_violation, 0.0);
        assert!(r.settings.is_none());
    }
}

/// The generator sandwich oracle and the O(1) readout agree on every slice
/// of a mid-sized mixed state, including the Frobenius weights.
#[test]
fn projection_matches_the_sandwich_oracle_exhaustively() {
    let mut rng = ChaCha12Rng::seed_from_u64(77);
    let dims = DimsSpec::new(vec![4, 3]).unwrap();
    let rho = random_density(&mut rng, &dims);
    for ga in bellsweep::generators::enumerate_generators(4).unwrap() {
        for gb in bellsweep::generators::enumerate_generators(3).unwrap() {
            let x = sandwich_oracle(&rho, &ga, &gb);
            let x_slice = restrict_to_slice(&x, &ga, &gb, 3);
            let proj = project_two_qubit(&rho, &ga, &gb).unwrap();
            assert!((proj.weight() - x_slice.frobenius_norm()).abs() < 1e-12);
            let t = x_slice.trace().re;
            assert!(proj.compact().max_abs_diff(&x_slice.scaled(c(1.0 / t, 0.0))) < 1e-12);
        }
    }
}

/// Everything the sandwich produces lives on the slice: entries outside the
/// four surviving basis states vanish.
#[test]
fn sandwich_support_is_confined_to_the_slice() {
    let mut rng = ChaCha12Rng::seed_from_u64(78);
    let dims = DimsSpec::new(vec![3, 4]).unwrap();
    let rho = random_density(&mut rng, &dims);
    let ga = Generator::new(3, 0, 2).unwrap();
    let gb = Generator::new(4, 1, 3).unwrap();
    let x = sandwich_oracle(&rho, &ga, &gb);
    let keep = [
        ga.j() * 4 + gb.j(),
        ga.j() * 4 + gb.k(),
        ga.k() * 4 + gb.j(),
        ga.k() * 4 + gb.k(),
    ];
    for r in 0..12 {
        for cl in 0..12 {
            if !keep.contains(&r) || !keep.contains(&cl) {
                assert!(x.get(r, cl).norm() < 1e-15, "support leaked to ({r},{cl})");
            }
        }
    }
}

/// Splits of a product state across the matching cut have zero concurrence
/// for every slice, so the whole sweep reports separability.
#[test]
fn multipartite_product_states_are_separable_everywhere() {
    let mut rng = ChaCha12Rng::seed_from_u64(79);
    let locals: Vec<Vec<Complex64>> = [2usize, 3, 2]
        .iter()
        .map(|&d| {
            haar_random_pure(&DimsSpec::new(vec![d]).unwrap(), rng.gen())
                .amplitudes()
                .to_vec()
        })
        .collect();
    let psi = product_state(&locals).unwrap();
    let report = sweep(&State::Pure(psi.clone()), &SweepOptions::default()).unwrap();
    assert_eq!(report.verdict, bellsweep::sweep::Verdict::Separable);
    for cut in enumerate_bipartitions(psi.dims()).unwrap() {
        assert!(pure_bipartite_concurrence(&psi, &cut).unwrap() < 1e-10);
    }
}

/// Bipartition construction respects the composite index layout used by the
/// splitter: splitting then computing reduced purity equals partial-tracing
/// the original directly.
#[test]
fn split_commutes_with_partial_trace() {
    let dims = DimsSpec::new(vec![2, 3, 2]).unwrap();
    let psi = haar_random_pure(&dims, 404);
    let cut = Bipartition::new(&dims, &[0, 2]).unwrap();
    let split = split_pure(&psi, &cut).unwrap();
    let rho_split = split.to_density();
    let red_split = bellsweep::linalg::partial_trace(
        rho_split.matrix(),
        rho_split.dims(),
        &[0],
    )
    .unwrap();
    let rho = psi.to_density();
    let red_direct = bellsweep::linalg::partial_trace(rho.matrix(), rho.dims(), &[0, 2]).unwrap();
    assert!(red_split.max_abs_diff(&red_direct) < 1e-13);
}
