//! Randomized structural invariants of the matrix layer, the state
//! constructors, and the entropy/criteria glue. Strategies draw an RNG
//! seed and derive everything else from it, so failures shrink to a
//! single reproducible integer.

use proptest::prelude::*;
use rand::Rng;

use qcorr::criteria::{
    chsh_max, discord_numeric, fano_bloch, fano_reconstruct, is_ppt, steerable_three,
    zero_discord_blocks, zero_super_discord,
};
use qcorr::entropy::{entropy_report, von_neumann};
use qcorr::linalg::{
    c, conjugate_by, cr, hermitian_eig, partial_trace, partial_transpose, tensor, ComplexMatrix,
    Dims, Subsystem, Tolerances,
};
use qcorr::states::{
    haar_unitary, local_unitary, random_density, random_ket, seeded_rng, DensityMatrix,
    LocalPhases,
};

fn tols() -> Tolerances {
    Tolerances::default()
}

/// Random Hermitian d x d matrix with entries of order one.
fn random_hermitian(d: usize, seed: u64) -> ComplexMatrix {
    let mut rng = seeded_rng(seed);
    let g = ComplexMatrix::from_fn(d, d, |_, _| {
        c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    g.add(&g.adjoint()).scale(cr(0.5))
}

fn random_state(seed: u64, rank: usize) -> DensityMatrix {
    let mut rng = seeded_rng(seed);
    random_density(Dims::new(2, 2), rank, &mut rng, &tols()).unwrap()
}

proptest! {
    #[test]
    fn eigendecomposition_reconstructs_the_input(seed in any::<u64>(), d in 2usize..=6) {
        let m = random_hermitian(d, seed);
        let (spectrum, v) = hermitian_eig(&m, &tols()).unwrap();
        prop_assert!(v.unitarity_defect() < 1e-9, "eigenvectors not orthonormal");
        let diag = ComplexMatrix::from_fn(d, d, |i, j| {
            if i == j { cr(spectrum.get(i)) } else { cr(0.0) }
        });
        let back = v.mul(&diag).mul(&v.adjoint());
        prop_assert!(back.max_abs_diff(&m) < 1e-9);
        let tr: f64 = spectrum.values().iter().sum();
        prop_assert!((tr - m.trace().re).abs() < 1e-9);
    }

    #[test]
    fn partial_traces_are_consistent_marginals(seed in any::<u64>(), rank in 1usize..=4) {
        let rho = random_state(seed, rank);
        let a = partial_trace(rho.matrix(), rho.dims(), Subsystem::A).unwrap();
        let b = partial_trace(rho.matrix(), rho.dims(), Subsystem::B).unwrap();
        prop_assert!((a.trace().re - 1.0).abs() < 1e-10);
        prop_assert!((b.trace().re - 1.0).abs() < 1e-10);
        prop_assert!(a.hermiticity_defect() < 1e-12);
        prop_assert!(b.hermiticity_defect() < 1e-12);
    }

    #[test]
    fn tracing_out_one_factor_of_a_product_recovers_the_other(sa in any::<u64>(), sb in any::<u64>()) {
        let mut ra = seeded_rng(sa);
        let mut rb = seeded_rng(sb);
        let rho_a = random_density(Dims::new(1, 2), 2, &mut ra, &tols()).unwrap();
        let rho_b = random_density(Dims::new(1, 2), 2, &mut rb, &tols()).unwrap();
        let joint = tensor(rho_a.matrix(), rho_b.matrix());
        let dims = Dims::new(2, 2);
        let got_a = partial_trace(&joint, dims, Subsystem::A).unwrap();
        let got_b = partial_trace(&joint, dims, Subsystem::B).unwrap();
        prop_assert!(got_a.max_abs_diff(rho_a.matrix()) < 1e-12);
        prop_assert!(got_b.max_abs_diff(rho_b.matrix()) < 1e-12);
    }

    #[test]
    fn partial_transpose_is_an_involution_and_preserves_the_trace(seed in any::<u64>(), rank in 1usize..=4) {
        let rho = random_state(seed, rank);
        let pt = partial_transpose(rho.matrix(), rho.dims(), Subsystem::B).unwrap();
        prop_assert!((pt.trace().re - 1.0).abs() < 1e-12);
        prop_assert!(pt.hermiticity_defect() < 1e-12);
        let back = partial_transpose(&pt, rho.dims(), Subsystem::B).unwrap();
        prop_assert!(back.max_abs_diff(rho.matrix()) == 0.0);
        // Transposing both sides in turn is the full transpose.
        let both = partial_transpose(
            &partial_transpose(rho.matrix(), rho.dims(), Subsystem::A).unwrap(),
            rho.dims(),
            Subsystem::B,
        )
        .unwrap();
        prop_assert!(both.max_abs_diff(&rho.matrix().transpose()) == 0.0);
    }

    #[test]
    fn conjugation_preserves_trace_and_spectrum(seed in any::<u64>(), rank in 1usize..=4) {
        let rho = random_state(seed, rank);
        let mut rng = seeded_rng(seed ^ 0x9e37_79b9_7f4a_7c15);
        let u = haar_unitary(4, &mut rng);
        let moved = conjugate_by(u.matrix(), rho.matrix());
        prop_assert!((moved.trace().re - 1.0).abs() < 1e-10);
        let before = rho.spectrum().values().to_vec();
        let (after, _) = hermitian_eig(&moved, &tols()).unwrap();
        for (x, y) in before.iter().zip(after.values()) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn sampled_densities_are_valid_with_bounded_rank(seed in any::<u64>(), rank in 1usize..=4) {
        let rho = random_state(seed, rank);
        let spec = rho.spectrum();
        prop_assert!(spec.min() > -1e-12);
        prop_assert!((spec.values().iter().sum::<f64>() - 1.0).abs() < 1e-10);
        let support = spec.values().iter().filter(|&&v| v > 1e-9).count();
        prop_assert!(support <= rank);
    }

    #[test]
    fn haar_unitaries_are_unitary(seed in any::<u64>(), d in 2usize..=5) {
        let mut rng = seeded_rng(seed);
        let u = haar_unitary(d, &mut rng);
        prop_assert!(u.matrix().unitarity_defect() < 1e-10);
    }

    #[test]
    fn sampled_kets_are_normalized(seed in any::<u64>(), d in 2usize..=6) {
        let mut rng = seeded_rng(seed);
        let psi = random_ket(d, &mut rng);
        let norm2: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        prop_assert!((norm2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn entropies_respect_the_triangle_bounds(seed in any::<u64>(), rank in 1usize..=4) {
        let rho = random_state(seed, rank);
        let e = entropy_report(&rho, &tols()).unwrap();
        prop_assert!(e.s_joint >= -1e-10);
        prop_assert!(e.s_joint <= (e.s_a + e.s_b) + 1e-9, "subadditivity");
        prop_assert!(e.s_joint >= (e.s_a - e.s_b).abs() - 1e-9, "triangle bound");
        prop_assert!(e.mutual >= -1e-9);
    }

    #[test]
    fn pure_states_carry_no_joint_entropy(seed in any::<u64>()) {
        let rho = random_state(seed, 1);
        prop_assert!(von_neumann(&rho) < 1e-8);
    }

    #[test]
    fn bloch_coefficients_and_round_trip_stay_in_range(seed in any::<u64>(), rank in 1usize..=4) {
        let rho = random_state(seed, rank);
        let fb = fano_bloch(&rho);
        let na: f64 = fb.a.iter().map(|x| x * x).sum::<f64>().sqrt();
        let nb: f64 = fb.b.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assert!(na <= 1.0 + 1e-9, "Bloch vector of A leaves the ball");
        prop_assert!(nb <= 1.0 + 1e-9, "Bloch vector of B leaves the ball");
        for row in &fb.t {
            for &v in row {
                prop_assert!(v.abs() <= 1.0 + 1e-9);
            }
        }
        prop_assert!(fano_reconstruct(&fb).max_abs_diff(rho.matrix()) < 1e-10);
    }

    #[test]
    fn correlation_values_stay_within_their_algebraic_caps(seed in any::<u64>(), rank in 1usize..=4) {
        let rho = random_state(seed, rank);
        let (chsh, _) = chsh_max(&rho, &tols()).unwrap();
        prop_assert!((0.0..=2.0 * std::f64::consts::SQRT_2 + 1e-9).contains(&chsh));
        let (steer, _) = steerable_three(&rho, &tols()).unwrap();
        prop_assert!((0.0..=3.0f64.sqrt() + 1e-9).contains(&steer));
    }
}

proptest! {
    // The numeric discord minimization is the costly path; a smaller case
    // count keeps the suite quick while still roaming the state space.
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn discord_is_nonnegative_and_bounded_by_the_mutual_information(seed in any::<u64>(), rank in 2usize..=4) {
        let rho = random_state(seed, rank);
        let d = discord_numeric(&rho, Subsystem::A, &tols()).unwrap();
        let e = entropy_report(&rho, &tols()).unwrap();
        prop_assert!(d >= 0.0);
        // The extracted correlation J is nonnegative by concavity, so the
        // leftover D = I - J can never exceed I itself.
        prop_assert!(d <= e.mutual + 1e-6, "discord {d} above I(A:B) {}", e.mutual);
    }
}

/// First moment of the Haar distribution: every |u_ij|^2 averages to 1/d.
#[test]
fn haar_sampling_matches_the_first_moment() {
    let mut rng = seeded_rng(271_828);
    let d = 4;
    let samples = 10_000;
    let mut acc = vec![0.0f64; d * d];
    for _ in 0..samples {
        let u = haar_unitary(d, &mut rng);
        for r in 0..d {
            for col in 0..d {
                acc[r * d + col] += u.matrix().get(r, col).norm_sqr();
            }
        }
    }
    for (k, sum) in acc.iter().enumerate() {
        let mean = sum / samples as f64;
        assert!(
            (mean - 0.25).abs() < 0.01,
            "entry ({},{}) mean |u|^2 = {mean}, want 0.25",
            k / d,
            k % d
        );
    }
}

/// None of the correlation criteria can see a local change of basis: every
/// verdict and every reported value must survive conjugation by U_A (x) U_B.
#[test]
fn criterion_verdicts_survive_local_unitaries() {
    let mut rng = seeded_rng(314_159);
    let mut phases = || LocalPhases {
        alpha: rng.gen_range(0.0..std::f64::consts::TAU),
        beta: rng.gen_range(0.0..std::f64::consts::TAU),
        phi: rng.gen_range(0.0..std::f64::consts::TAU),
    };
    for trial in 0..500 {
        let u = local_unitary(phases(), phases());
        let mut rng = seeded_rng(40_000 + trial);
        let rho = random_density(Dims::new(2, 2), 1 + (trial as usize) % 4, &mut rng, &tols())
            .unwrap();
        let moved = rho.conjugated(&u).unwrap();

        let before = is_ppt(&rho, &tols()).unwrap();
        let after = is_ppt(&moved, &tols()).unwrap();
        assert_eq!(before.holds, after.holds, "ppt flipped at trial {trial}");
        assert!((before.margin - after.margin).abs() < 1e-9);

        let (chsh_a, _) = chsh_max(&rho, &tols()).unwrap();
        let (chsh_b, _) = chsh_max(&moved, &tols()).unwrap();
        assert!((chsh_a - chsh_b).abs() < 1e-9, "chsh drifted at trial {trial}");

        let (steer_a, _) = steerable_three(&rho, &tols()).unwrap();
        let (steer_b, _) = steerable_three(&moved, &tols()).unwrap();
        assert!((steer_a - steer_b).abs() < 1e-9, "steering drifted at trial {trial}");

        for side in [Subsystem::A, Subsystem::B] {
            let before = zero_discord_blocks(&rho, side, &tols()).unwrap();
            let after = zero_discord_blocks(&moved, side, &tols()).unwrap();
            assert_eq!(before.holds, after.holds, "blocks flipped at trial {trial}");
        }

        let before = zero_super_discord(&rho, &tols()).unwrap();
        let after = zero_super_discord(&moved, &tols()).unwrap();
        assert_eq!(before.holds, after.holds, "super discord flipped at trial {trial}");

        let d_a = discord_numeric(&rho, Subsystem::A, &tols()).unwrap();
        let d_b = discord_numeric(&moved, Subsystem::A, &tols()).unwrap();
        assert!((d_a - d_b).abs() < 1e-4, "discord drifted at trial {trial}: {d_a} vs {d_b}");
    }
}
