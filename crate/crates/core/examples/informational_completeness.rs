// Which POVMs determine every qubit state from their statistics.

use extremal_povm::extremality::effect_span_dim;
use extremal_povm::families::{computational_pvm, tetrahedral, trine};
use extremal_povm::{extremality_test, informational_completeness, ToleranceConfig};

fn main() {
    let cfg = ToleranceConfig::default();
    for (name, povm) in [("Z basis", computational_pvm(2)), ("trine", trine()), ("tetrahedral", tetrahedral())] {
        println!(
            "{name:12} span {} of {}  IC={}  extremal={}",
            effect_span_dim(&povm, &cfg),
            povm.dim() * povm.dim(),
            informational_completeness(&povm, &cfg),
            extremality_test(&povm, &cfg).extremal
        );
    }
}
