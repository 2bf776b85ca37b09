//! Finite-outcome approximation of a covariant phase-space observable
//! `M_ψ(Z) = (1/π)∫_Z D(z)|ψ⟩⟨ψ|D(z)* d²z` on a truncated Fock space.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::displacement::displacement_entries;
use super::fock::FockVector;
use super::grid::PhaseGrid;
use crate::error::{Error, Result};
use crate::linalg::{min_eigenvalue, outer, ComplexMatrix, HermitianEigen};
use crate::povm::{DiscretePovm, ToleranceConfig};

#[derive(Debug, Clone)]
pub struct DiscretizedObservable {
    pub povm: DiscretePovm,
    /// Lattice point of each cell effect; the last effect is the remainder.
    pub cells: Vec<Complex64>,
    /// Factor applied to every `h²/π` cell weight.
    pub scale: f64,
    pub remainder_trace: f64,
    /// Trace carried by the outermost ring of cells.
    pub boundary_trace: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiscretizationSummary {
    pub outcomes: usize,
    pub dim: usize,
    pub scale: f64,
    pub remainder_trace: f64,
    pub boundary_trace: f64,
}

impl DiscretizedObservable {
    pub fn remainder(&self) -> &ComplexMatrix {
        let effects = self.povm.effects();
        &effects[effects.len() - 1]
    }

    pub fn summary(&self) -> DiscretizationSummary {
        DiscretizationSummary {
            outcomes: self.povm.num_outcomes(),
            dim: self.povm.dim(),
            scale: self.scale,
            remainder_trace: self.remainder_trace,
            boundary_trace: self.boundary_trace,
        }
    }
}

/// `D(z)ψ` truncated to the first `cutoff` Fock components.
pub fn displaced(psi: &FockVector, z: Complex64, cutoff: usize) -> crate::linalg::ComplexVector {
    displacement_entries(z, cutoff, psi.cutoff()) * psi.coeffs()
}

/// One effect `(h²/π)·D(z)|ψ⟩⟨ψ|D(z)*` per lattice point, truncated to
/// `cutoff`, plus a remainder restoring `Σ = I`. Cell weights are shrunk when
/// the cell sum overshoots the identity.
pub fn discretize_covariant_povm(
    psi: &FockVector,
    grid: &PhaseGrid,
    cutoff: usize,
    cfg: &ToleranceConfig,
) -> Result<DiscretizedObservable> {
    if cutoff == 0 {
        return Err(Error::CutoffTooSmall("cutoff must be positive".into()));
    }
    let weight = grid.cell_area() / std::f64::consts::PI;
    let cells = grid.points();
    let edge = grid.extent() - 0.5 * grid.step();
    let mut effects: Vec<ComplexMatrix> = cells
        .par_iter()
        .map(|&z| outer(&displaced(psi, z, cutoff), &displaced(psi, z, cutoff)) * Complex64::from(weight))
        .collect();

    let mut total = ComplexMatrix::zeros(cutoff, cutoff);
    let mut boundary_trace = 0.0;
    for (z, e) in cells.iter().zip(&effects) {
        total += e;
        if z.re.abs().max(z.im.abs()) > edge {
            boundary_trace += e.trace().re;
        }
    }
    let top = HermitianEigen::new(&total, 0.0).values[0];
    let scale = if top > 1.0 { 1.0 / top } else { 1.0 };
    if scale != 1.0 {
        for e in &mut effects {
            *e *= Complex64::from(scale);
        }
        total *= Complex64::from(scale);
    }

    let remainder = ComplexMatrix::identity(cutoff, cutoff) - &total;
    let low = min_eigenvalue(&remainder);
    if low < -cfg.psd_tol {
        return Err(Error::Discretization(format!(
            "remainder has eigenvalue {low:.3e} after scaling by {scale}"
        )));
    }
    let remainder_trace = remainder.trace().re;
    effects.push(remainder);

    let mut labels: Vec<String> = cells.iter().map(|z| format!("{},{}", z.re, z.im)).collect();
    labels.push("remainder".into());
    let povm = DiscretePovm::new(effects, cfg)?.with_labels(labels)?;
    Ok(DiscretizedObservable {
        povm,
        cells,
        scale,
        remainder_trace,
        boundary_trace: boundary_trace * scale,
    })
}
