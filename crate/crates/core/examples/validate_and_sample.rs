// Validate a POVM, compute Born probabilities and draw seeded samples.

use extremal_povm::families::{basis_vector, computational_pvm, trine, x_pvm};
use extremal_povm::{born_probabilities, mix, sample_outcomes, validate_povm, DensityState, ToleranceConfig};

fn main() -> extremal_povm::Result<()> {
    let cfg = ToleranceConfig::default();
    let povm = trine();
    let report = validate_povm(povm.effects(), &cfg)?;
    println!("trine: {report}");

    let rho = DensityState::pure(&basis_vector(2, 0))?;
    let probs = born_probabilities(&rho, &povm, &cfg)?;
    println!("p(|0>) = {probs:.6?}");

    let shots = 30_000;
    let counts = sample_outcomes(&rho, &povm, shots, 42, &cfg)?;
    for (i, (c, p)) in counts.iter().zip(&probs).enumerate() {
        println!("  outcome {i}: {c} draws, expected {:.1}", p * shots as f64);
    }

    let noisy = mix(&computational_pvm(2), &x_pvm(), 0.3, &cfg)?;
    println!("0.3·Z + 0.7·X probabilities {:.4?}", born_probabilities(&rho, &noisy, &cfg)?);
    Ok(())
}
