// Covariant POVMs of ℤ_N: canonical position, random seeds and the
// structured extremality test.

use extremal_povm::covariant::{
    build_covariant, canonical_position, covariance_check, covariant_coherent_family, covariant_extremality,
    random_seed, CyclicRep,
};
use extremal_povm::{constant_rank, extremality_test, is_spectral_measure, ToleranceConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> extremal_povm::Result<()> {
    let cfg = ToleranceConfig::default();
    for (n, s) in [(4, 1), (3, 2)] {
        let q = canonical_position(n, s, &cfg)?;
        println!(
            "position N={n} s={s}: spectral={} rank={:?} covariance residual {:.1e} extremal={}",
            is_spectral_measure(q.povm(), &cfg),
            constant_rank(q.povm(), &cfg),
            covariance_check(&q),
            covariant_extremality(&q, &cfg).extremal
        );
    }

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let rep = CyclicRep::new(3, vec![0, 1, 1, 2])?;
    for rank in [2, 3, 4] {
        let m = build_covariant(&rep, &random_seed(&rep, rank, &mut rng)?, &cfg)?;
        let fam = covariant_coherent_family(&m, &cfg);
        println!(
            "random seed rank {rank}: rank {:?}, gauge residual {:.1e}, extremal {} (generic {})",
            constant_rank(m.povm(), &cfg),
            fam.gauge_residual,
            covariant_extremality(&m, &cfg).extremal,
            extremality_test(m.povm(), &cfg).extremal
        );
    }
    Ok(())
}
