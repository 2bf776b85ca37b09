use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Square lattice `z = step·(j + i k)`, `|j|, |k| ≤ extent/step`, in the
/// complex phase-space coordinate `z = (q + ip)/√2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseGrid {
    extent: f64,
    step: f64,
    half: usize,
}

impl PhaseGrid {
    pub fn new(extent: f64, step: f64) -> Result<Self> {
        if !(extent > 0.0 && step > 0.0) || !extent.is_finite() || !step.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "grid extent and step must be positive (got {extent}, {step})"
            )));
        }
        let ratio = extent / step;
        let half = ratio.round();
        if (ratio - half).abs() > 1e-9 * ratio.max(1.0) {
            return Err(Error::InvalidArgument(format!(
                "extent/step must be an integer (got {ratio})"
            )));
        }
        Ok(Self {
            extent,
            step,
            half: half as usize,
        })
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// Number of lattice points per axis.
    pub fn side(&self) -> usize {
        2 * self.half + 1
    }

    pub fn len(&self) -> usize {
        self.side() * self.side()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Area element `step²` in the z-plane.
    pub fn cell_area(&self) -> f64 {
        self.step * self.step
    }

    fn coord(&self, j: usize) -> f64 {
        (j as f64 - self.half as f64) * self.step
    }

    /// Point `(row, col)`: `row` indexes the imaginary part, `col` the real part.
    pub fn point(&self, row: usize, col: usize) -> Complex64 {
        Complex64::new(self.coord(col), self.coord(row))
    }

    /// All points in row-major order (imaginary part outer).
    pub fn points(&self) -> Vec<Complex64> {
        let n = self.side();
        (0..n)
            .flat_map(|r| (0..n).map(move |c| (r, c)))
            .map(|(r, c)| self.point(r, c))
            .collect()
    }

    /// Tensor-product trapezoid weights (including the area element), in
    /// the order of [`PhaseGrid::points`].
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let n = self.side();
        let axis = |j: usize| if j == 0 || j + 1 == n { 0.5 * self.step } else { self.step };
        (0..n)
            .flat_map(|r| (0..n).map(move |c| axis(r) * axis(c)))
            .collect()
    }

    /// Largest |z| on the grid (the corners).
    pub fn max_modulus(&self) -> f64 {
        let l = self.half as f64 * self.step;
        (2.0 * l * l).sqrt()
    }
}

/// Pairwise summation; the fixed split order makes results run-to-run identical.
pub fn pairwise_sum<T>(xs: &[T]) -> T
where
    T: Copy + Default + std::ops::Add<Output = T>,
{
    const LEAF: usize = 32;
    if xs.len() <= LEAF {
        return xs.iter().fold(T::default(), |a, &b| a + b);
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_is_symmetric() {
        let g = PhaseGrid::new(1.0, 0.25).unwrap();
        assert_eq!(g.side(), 9);
        let pts = g.points();
        assert_eq!(pts.len(), 81);
        assert_eq!(pts[0], Complex64::new(-1.0, -1.0));
        assert_eq!(pts[80], Complex64::new(1.0, 1.0));
        assert_eq!(pts[40], Complex64::new(0.0, 0.0));
        assert!((g.max_modulus() - 2f64.sqrt()).abs() < 1e-15);
        let w: f64 = g.trapezoid_weights().iter().sum();
        assert!((w - 4.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_integer_ratio() {
        assert!(PhaseGrid::new(1.0, 0.3).is_err());
        assert!(PhaseGrid::new(-1.0, 0.1).is_err());
        assert!(PhaseGrid::new(8.0, 0.05).is_ok());
    }

    #[test]
    fn pairwise_matches_naive_sum() {
        let xs: Vec<f64> = (0..1000).map(|i| 1.0 / (i as f64 + 1.0)).collect();
        let naive: f64 = xs.iter().sum();
        assert!((pairwise_sum(&xs) - naive).abs() < 1e-12);
    }
}
