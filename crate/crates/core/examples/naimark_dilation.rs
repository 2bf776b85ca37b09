// Minimal Naimark dilation of a random POVM and its generalized coherent
// states.

use extremal_povm::families::random_povm;
use extremal_povm::linalg::max_abs;
use extremal_povm::{coherent_family, minimal_dilation, ToleranceConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let cfg = ToleranceConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let povm = random_povm(3, 4, &mut rng);
    let dil = minimal_dilation(&povm, &cfg);

    println!("fiber dims {:?}, total {}", dil.fiber_dims(), dil.total_dim());
    println!("‖Y†Y − I‖ = {:.2e}", dil.isometry_defect());
    println!("max ‖Y†P_iY − M_i‖ = {:.2e}", dil.reconstruction_residual(&povm));

    let fam = coherent_family(&dil);
    for i in 0..fam.num_outcomes() {
        let frame = fam.frame_operator(i);
        let err = max_abs(&(&frame - &povm.effects()[i]));
        println!(
            "outcome {i}: {} coherent vectors, independent = {}, frame error {err:.1e}",
            fam.vectors(i).len(),
            fam.independent(i, cfg.rank_rel_tol)
        );
    }
}
