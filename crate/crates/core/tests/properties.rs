use extremal_povm::covariant::{
    build_covariant, covariant_coherent_family, covariant_extremality, covariance_check, random_seed, CyclicRep,
};
use extremal_povm::dilation::operator_gram;
use extremal_povm::families::{pvm_from_unitary, random_povm, random_unitary};
use extremal_povm::io::{read_povm, povm_to_json};
use extremal_povm::linalg::{max_abs, HermitianEigen};
use extremal_povm::{
    born_probabilities, coherent_family, constant_rank, convex_decompose, extremality_test, informational_completeness,
    minimal_dilation, mix, quick_reject, validate_povm, DensityState, DiscretePovm, ToleranceConfig,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn cfg() -> ToleranceConfig {
    ToleranceConfig::default()
}

fn povm_from(seed: u64, d: usize, k: usize) -> DiscretePovm {
    random_povm(d, k, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn random_state(seed: u64, d: usize) -> DensityState {
    let m = povm_from(seed ^ 0x5eed, d, d + 1);
    // any effect normalized by its trace is a density operator
    let e = &m.effects()[0];
    let t = e.trace();
    DensityState::new(e / t, &cfg()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn born_probabilities_form_a_distribution(seed in any::<u64>(), d in 1usize..5, k in 1usize..6) {
        let povm = povm_from(seed, d, k);
        let p = born_probabilities(&random_state(seed, d), &povm, &cfg()).unwrap();
        prop_assert_eq!(p.len(), povm.num_outcomes());
        prop_assert!(p.iter().all(|x| (0.0..=1.0).contains(x)));
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn mixtures_stay_valid(seed in any::<u64>(), d in 1usize..4, t in 0.01f64..0.99) {
        let a = povm_from(seed, d, 3);
        let b = povm_from(seed.wrapping_add(1), d, 2);
        let m = mix(&a, &b, t, &cfg()).unwrap();
        prop_assert!(validate_povm(m.effects(), &cfg()).unwrap().ok);
        prop_assert_eq!(m.num_outcomes(), 3);
    }

    #[test]
    fn json_round_trip_is_exact(seed in any::<u64>(), d in 1usize..4, k in 1usize..5) {
        let povm = povm_from(seed, d, k);
        let back = read_povm(&povm_to_json(&povm).unwrap(), &cfg()).unwrap();
        prop_assert_eq!(back.distance(&povm), 0.0);
    }

    #[test]
    fn dilation_reconstructs(seed in any::<u64>(), d in 1usize..6, k in 1usize..7) {
        let povm = povm_from(seed, d, k);
        let dil = minimal_dilation(&povm, &cfg());
        prop_assert!(dil.isometry_defect() < 1e-10);
        prop_assert!(dil.reconstruction_residual(&povm) < 1e-10);
        let fam = coherent_family(&dil);
        for i in 0..povm.num_outcomes() {
            prop_assert!(max_abs(&(fam.frame_operator(i) - &povm.effects()[i])) < 1e-10);
            prop_assert!(fam.independent(i, 1e-10));
        }
    }

    #[test]
    fn kernel_matches_gram_oracle(seed in any::<u64>(), d in 1usize..4, k in 1usize..6) {
        let povm = povm_from(seed, d, k);
        let v = extremality_test(&povm, &cfg());
        let gram = operator_gram(&coherent_family(&minimal_dilation(&povm, &cfg())));
        let eig = HermitianEigen::new(&gram, 0.0);
        let top = eig.values.first().copied().unwrap_or(0.0);
        let rank = eig.values.iter().filter(|&&x| x > 1e-10 * top).count();
        prop_assert_eq!(v.kernel_dim, gram.nrows() - rank);
        if quick_reject(&povm, &cfg()).is_some() {
            prop_assert!(!v.extremal);
        }
    }

    #[test]
    fn non_extremal_povms_split(seed in any::<u64>(), d in 2usize..4, k in 2usize..5) {
        let povm = povm_from(seed, d, k);
        let v = extremality_test(&povm, &cfg());
        prop_assume!(!v.extremal);
        let dec = convex_decompose(&povm, &v, &cfg()).unwrap();
        prop_assert!(dec.average_residual(&povm) < 1e-10);
        prop_assert!(dec.separation() > 1e-8);
        prop_assert!(validate_povm(dec.plus.effects(), &cfg()).unwrap().ok);
        prop_assert!(validate_povm(dec.minus.effects(), &cfg()).unwrap().ok);
    }

    #[test]
    fn pvms_are_extremal_and_not_ic(seed in any::<u64>(), d in 2usize..6) {
        let pvm = pvm_from_unitary(&random_unitary(d, &mut ChaCha8Rng::seed_from_u64(seed)));
        prop_assert!(extremality_test(&pvm, &cfg()).extremal);
        prop_assert!(!informational_completeness(&pvm, &cfg()));
    }

    #[test]
    fn covariant_seeds_behave(seed in any::<u64>(), n in 2usize..6, labels in prop::collection::vec(0usize..6, 1..5)) {
        let labels: Vec<usize> = labels.into_iter().map(|l| l % n).collect();
        let rep = CyclicRep::new(n, labels).unwrap();
        let widest = rep.blocks().values().map(Vec::len).max().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rank = widest + (seed as usize) % (rep.dim() - widest + 1);
        let m = build_covariant(&rep, &random_seed(&rep, rank, &mut rng).unwrap(), &cfg()).unwrap();
        prop_assert!(covariance_check(&m) < 1e-12);
        prop_assert_eq!(constant_rank(m.povm(), &cfg()), Some(rank));
        prop_assert!(covariant_coherent_family(&m, &cfg()).gauge_residual < 1e-10);
        prop_assert_eq!(covariant_extremality(&m, &cfg()).extremal, extremality_test(m.povm(), &cfg()).extremal);
    }
}
