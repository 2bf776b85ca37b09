// Grid scan for zeros of ⟨ψ|D(z)ψ⟩: no zeros is consistent with an
// extremal covariant phase-space observable.

use extremal_povm::phase_space::{extremality_scan, ic_indicator, NamedState, PhaseGrid, ScanConfig};
use num_complex::Complex64;

fn main() -> extremal_povm::Result<()> {
    let grid = PhaseGrid::new(4.0, 0.05)?;
    let cfg = ScanConfig::default();
    let states = [
        NamedState::Number(0),
        NamedState::Number(1),
        NamedState::Number(2),
        NamedState::Coherent(Complex64::new(1.0, 0.5)),
        NamedState::Squeezed {
            r: 0.5,
            theta: 0.0,
            displacement: Complex64::new(0.0, 0.0),
        },
    ];
    for state in states {
        let v = extremality_scan(&state, 32, &grid, &cfg)?;
        let radii: Vec<f64> = v.zeros().iter().map(|z| z.norm()).collect();
        let (lo, hi) = radii
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), &r| (lo.min(r), hi.max(r)));
        print!("{state:24} min|χ| = {:.3e}  zeros = {:3}", v.min_abs, radii.len());
        if !radii.is_empty() {
            print!("  radii in [{lo:.6}, {hi:.6}]");
        }
        println!("  consistent with extremal: {}", v.consistent_with_extremal);
    }

    let ic = ic_indicator(&NamedState::Number(1), 32, &grid, 1e-3, &cfg)?;
    println!("h1 zero set: {:?}, area fraction {:.4}", ic.zero_set, ic.area_fraction);
    Ok(())
}
