//! Numerical check of the explicit split of the `h_1` phase-space observable
//! into `M_± = (1/π)∫[1 ± cos(z + z̄)] D(z)|h_1⟩⟨h_1|D(z)* d²z`.
//!
//! `M_±` are observables exactly when
//! `∫ cos(w + w̄) e^{−|z−w|²} |z−w|² d²w = 0` for every `z`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::grid::{pairwise_sum, PhaseGrid};
use crate::error::{Error, Result};

/// Distance the grid must extend past every test point.
pub const H1_MARGIN: f64 = 8.0;

/// Modulation density `cos(z + z̄) = cos(2 Re z)`.
pub fn modulation(z: Complex64) -> f64 {
    (2.0 * z.re).cos()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct H1Residual {
    pub z: [f64; 2],
    pub integral: f64,
    /// `∫ |cos(w + w̄)| e^{−|z−w|²} |z−w|² d²w`, the scale the integral
    /// cancels against.
    pub absolute_scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct H1DecompositionReport {
    pub residuals: Vec<H1Residual>,
    pub max_residual: f64,
    pub density_min: f64,
    pub density_max: f64,
    pub densities_in_range: bool,
    pub average_error: f64,
}

impl H1DecompositionReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_residual < tol && self.densities_in_range && self.average_error < tol
    }
}

pub fn verify_h1_decomposition(grid: &PhaseGrid, test_points: &[Complex64]) -> Result<H1DecompositionReport> {
    let needed = test_points.iter().map(|z| z.re.abs().max(z.im.abs())).fold(0.0, f64::max) + H1_MARGIN;
    if grid.extent() < needed {
        return Err(Error::GridTooSmall(format!(
            "extent {} < {needed} required for the test points",
            grid.extent()
        )));
    }
    let points = grid.points();
    let weights = grid.trapezoid_weights();

    let residuals: Vec<H1Residual> = test_points
        .par_iter()
        .map(|&z| {
            let (signed, absolute): (Vec<f64>, Vec<f64>) = points
                .iter()
                .zip(&weights)
                .map(|(&w, &wt)| {
                    let d = (z - w).norm_sqr();
                    let g = (-d).exp() * d * wt;
                    let c = modulation(w);
                    (c * g, c.abs() * g)
                })
                .unzip();
            H1Residual {
                z: [z.re, z.im],
                integral: pairwise_sum(&signed),
                absolute_scale: pairwise_sum(&absolute),
            }
        })
        .collect();

    let mut density_min = f64::INFINITY;
    let mut density_max = f64::NEG_INFINITY;
    let mut average_error: f64 = 0.0;
    for &w in &points {
        let c = modulation(w);
        let (plus, minus) = (1.0 + c, 1.0 - c);
        density_min = density_min.min(plus.min(minus));
        density_max = density_max.max(plus.max(minus));
        average_error = average_error.max(((plus + minus) / 2.0 - 1.0).abs());
    }

    Ok(H1DecompositionReport {
        max_residual: residuals.iter().map(|r| r.integral.abs()).fold(0.0, f64::max),
        residuals,
        density_min,
        density_max,
        densities_in_range: density_min >= 0.0 && density_max <= 2.0,
        average_error,
    })
}
