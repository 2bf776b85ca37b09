//! Husimi Q-functions and their Fourier transforms.
//!
//! Fourier convention: `f̂(w) = (1/π) ∫ f(z) e^{−i(z w̄ + z̄ w)} d²z`, under
//! which `Q̂_{h_0}(w) = e^{−|w|²}` and `Q̂_{h_n}(w) = L_n(|w|²) e^{−|w|²}`.

use num_complex::Complex64;
use rayon::prelude::*;

use super::fock::{coherent_coefficients, FockVector};
use super::grid::{pairwise_sum, PhaseGrid};
use super::special::laguerre;
use crate::error::{Error, Result};

/// Allowed Q-mass outside the integration grid.
pub const OUTSIDE_MASS_TOL: f64 = 1e-10;

/// `Q_ψ(z) = |⟨ψ|η_z⟩|²`, using exact coherent-state components up to the
/// cutoff of `psi`.
pub fn q_function(psi: &FockVector, z: Complex64) -> f64 {
    let eta = coherent_coefficients(z, psi.cutoff());
    psi.coeffs().dotc(&eta).norm_sqr()
}

/// `L_n(|w|²) e^{−|w|²}`.
pub fn q_fourier_number_analytic(n: usize, w: Complex64) -> f64 {
    let t = w.norm_sqr();
    laguerre(n, t) * (-t).exp()
}

/// Q-function sampled on a phase-space grid, reusable for many Fourier
/// evaluations.
#[derive(Debug, Clone)]
pub struct QSamples {
    grid: PhaseGrid,
    points: Vec<Complex64>,
    weights: Vec<f64>,
    values: Vec<f64>,
}

impl QSamples {
    /// Samples `Q_ψ` and refuses grids that miss more than
    /// [`OUTSIDE_MASS_TOL`] of the total mass `(1/π)∫Q = 1`.
    pub fn new(psi: &FockVector, grid: &PhaseGrid) -> Result<Self> {
        let points = grid.points();
        let values: Vec<f64> = points.par_iter().map(|&z| q_function(psi, z)).collect();
        let samples = Self {
            grid: *grid,
            points,
            weights: grid.trapezoid_weights(),
            values,
        };
        let missing = (1.0 - samples.total_mass()).abs();
        if missing > OUTSIDE_MASS_TOL {
            return Err(Error::GridTooSmall(format!(
                "Q-function mass missing from the grid is {missing:.3e} (extent {})",
                grid.extent()
            )));
        }
        Ok(samples)
    }

    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Trapezoid value of `(1/π)∫ Q d²z`.
    pub fn total_mass(&self) -> f64 {
        let terms: Vec<f64> = self.values.iter().zip(&self.weights).map(|(q, w)| q * w).collect();
        pairwise_sum(&terms) / std::f64::consts::PI
    }

    /// Trapezoid quadrature of `Q̂_ψ(w)`.
    pub fn fourier(&self, w: Complex64) -> Complex64 {
        let terms: Vec<Complex64> = self
            .points
            .iter()
            .zip(self.values.iter().zip(&self.weights))
            .map(|(z, (q, wt))| Complex64::from_polar(q * wt, -2.0 * (z * w.conj()).re))
            .collect();
        pairwise_sum(&terms) / std::f64::consts::PI
    }
}

/// Numerical `Q̂_ψ(w)` on `grid`.
pub fn q_fourier(psi: &FockVector, w: Complex64, grid: &PhaseGrid) -> Result<Complex64> {
    Ok(QSamples::new(psi, grid)?.fourier(w))
}
