// Extremality verdicts and an explicit split of a non-extremal POVM into
// two distinct POVMs.

use extremal_povm::families::{computational_pvm, tetrahedral, trine, x_pvm};
use extremal_povm::{convex_decompose, extremality_test, mix, quick_reject, ToleranceConfig};

fn main() -> extremal_povm::Result<()> {
    let cfg = ToleranceConfig::default();
    for (name, povm) in [("Z basis", computational_pvm(2)), ("trine", trine()), ("tetrahedral", tetrahedral())] {
        let v = extremality_test(&povm, &cfg);
        println!("{name:12} extremal={} kernel_dim={} σ_min={:.3e}", v.extremal, v.kernel_dim, v.min_singular_value);
    }

    let mixed = mix(&computational_pvm(2), &x_pvm(), 0.5, &cfg)?;
    let verdict = extremality_test(&mixed, &cfg);
    println!("½Z + ½X     extremal={} kernel_dim={}", verdict.extremal, verdict.kernel_dim);
    if let Some(q) = quick_reject(&mixed, &cfg) {
        println!("  quick reject: Σ m_i² = {} > d² = {}", q.block_dim, q.operator_dim);
    }

    let dec = convex_decompose(&mixed, &verdict, &cfg)?;
    println!(
        "  M = (M+ + M−)/2 with ε = {:.4}, residual {:.1e}, separation {:.4}",
        dec.epsilon,
        dec.average_residual(&mixed),
        dec.separation()
    );
    for (i, (p, m)) in dec.plus.effects().iter().zip(dec.minus.effects()).enumerate() {
        println!("  outcome {i}: M+ = {}  M− = {}", compact(p), compact(m));
    }
    Ok(())
}

fn compact(m: &extremal_povm::ComplexMatrix) -> String {
    let rows: Vec<String> = m
        .row_iter()
        .map(|r| {
            let cells: Vec<String> = r.iter().map(|c| format!("{:+.3}{:+.3}i", c.re, c.im)).collect();
            cells.join(" ")
        })
        .collect();
    format!("[{}]", rows.join("; "))
}
