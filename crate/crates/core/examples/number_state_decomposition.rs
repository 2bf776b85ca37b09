// The h_1 observable is the midpoint of two observables with densities
// 1 ± cos(z + z̄); the defining integral vanishes at every z.

use extremal_povm::phase_space::{verify_h1_decomposition, PhaseGrid};
use num_complex::Complex64;

fn main() -> extremal_povm::Result<()> {
    let grid = PhaseGrid::new(10.0, 0.05)?;
    let points = [
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(1.0, 1.0),
        Complex64::new(-2.0, 0.0),
    ];
    let report = verify_h1_decomposition(&grid, &points)?;
    for r in &report.residuals {
        println!(
            "z = {:+.1}{:+.1}i  ∫ = {:+.3e}  (cancels against {:.4})",
            r.z[0], r.z[1], r.integral, r.absolute_scale
        );
    }
    println!(
        "densities in [{:.3}, {:.3}], midpoint error {:.1e}",
        report.density_min, report.density_max, report.average_error
    );
    Ok(())
}
