// Cell-wise discretization of the vacuum phase-space observable into a
// finite POVM on a truncated Fock space.

use extremal_povm::phase_space::{discretize_covariant_povm, number_state, PhaseGrid};
use extremal_povm::{born_probabilities, validate_povm, DensityState, ToleranceConfig};

fn main() -> extremal_povm::Result<()> {
    let cfg = ToleranceConfig::default();
    let psi = number_state(0, 12)?;
    let grid = PhaseGrid::new(6.0, 0.5)?;
    let obs = discretize_covariant_povm(&psi, &grid, 12, &cfg)?;
    let s = obs.summary();
    println!(
        "{} outcomes on dim {}, weight scale {:.6}, remainder trace {:.4}",
        s.outcomes, s.dim, s.scale, s.remainder_trace
    );
    println!("{}", validate_povm(obs.povm.effects(), &cfg)?);

    let rho = DensityState::pure(psi.coeffs())?;
    let p = born_probabilities(&rho, &obs.povm, &cfg)?;
    let (best, pmax) = p.iter().enumerate().fold((0, 0.0), |acc, (i, &x)| if x > acc.1 { (i, x) } else { acc });
    println!("most likely cell {} with p = {pmax:.5}", obs.cells[best]);
    println!("remainder outcome p = {:.3e}", p[p.len() - 1]);
    Ok(())
}
