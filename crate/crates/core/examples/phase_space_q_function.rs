// Husimi Q-functions of number states and the Laguerre form of their
// Fourier transforms.

use extremal_povm::phase_space::special::ln_factorial;
use extremal_povm::phase_space::{number_state, q_fourier_number_analytic, q_function, PhaseGrid, QSamples};
use num_complex::Complex64;

fn main() -> extremal_povm::Result<()> {
    let z = Complex64::new(1.2, -0.7);
    for n in 0..4 {
        let psi = number_state(n, 32)?;
        let t = z.norm_sqr();
        let exact = (-t + n as f64 * t.ln() - ln_factorial(n)).exp();
        println!("Q_h{n}({z}) = {:.12}  closed form {:.12}", q_function(&psi, z), exact);
    }

    let grid = PhaseGrid::new(8.0, 0.05)?;
    for n in 0..3 {
        let samples = QSamples::new(&number_state(n, 32)?, &grid)?;
        println!("h{n}: (1/π)∫Q = {:.10}", samples.total_mass());
        for r in [0.0, 0.5, 1.0, 1.5] {
            let w = Complex64::new(r, 0.0);
            println!(
                "  |w| = {r:.1}: numeric {:+.6}  L_n(|w|²)e^(−|w|²) {:+.6}",
                samples.fourier(w).re,
                q_fourier_number_analytic(n, w)
            );
        }
    }
    Ok(())
}
