//! Grid search for zeros of the characteristic function `χ_ψ(z) = ⟨ψ|D(z)ψ⟩`.
//!
//! A state whose characteristic function never vanishes generates an extremal
//! covariant phase-space observable. On a finite grid this is evidence, not a
//! proof, so verdicts are phrased as "consistent with extremal".

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::displacement::char_function;
use super::fock::{FockVector, StatePreparation};
use super::grid::PhaseGrid;
use crate::error::{Error, Result};

pub const DEFAULT_ZERO_TOL: f64 = 1e-6;

/// Largest area fraction below tolerance still read as a null zero set.
pub const NULL_AREA_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanConfig {
    pub zero_tol: f64,
    /// Only grid points with `|z|` at most this radius are scanned; defaults
    /// to `√N / 2`.
    pub guard_radius: Option<f64>,
    /// Require every reported zero to persist when the cutoff is doubled.
    pub check_doubling: bool,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            zero_tol: DEFAULT_ZERO_TOL,
            guard_radius: None,
            check_doubling: true,
        }
    }
}

impl ScanConfig {
    pub fn with_zero_tol(zero_tol: f64) -> Self {
        Self {
            zero_tol,
            ..Self::default()
        }
    }
}

pub fn default_guard_radius(cutoff: usize) -> f64 {
    (cutoff as f64).sqrt() / 2.0
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanVerdict {
    pub min_abs: f64,
    /// `[re, im]` of the grid point attaining `min_abs`.
    pub argmin: [f64; 2],
    /// Refined zeros, `[re, im]` each.
    pub zero_loci: Vec<[f64; 2]>,
    pub consistent_with_extremal: bool,
    pub points_scanned: usize,
    pub guard_radius: f64,
}

impl ScanVerdict {
    pub fn zeros(&self) -> Vec<Complex64> {
        self.zero_loci.iter().map(|p| Complex64::new(p[0], p[1])).collect()
    }
}

struct Sampled {
    points: Vec<Complex64>,
    values: Vec<Option<Complex64>>,
    side: usize,
    radius: f64,
}

fn sample(psi: &FockVector, grid: &PhaseGrid, radius: f64) -> Result<Sampled> {
    let points = grid.points();
    let values: Vec<Option<Complex64>> = points
        .par_iter()
        .map(|&z| (z.norm() <= radius + 1e-12).then(|| char_function(psi, z)))
        .collect();
    if values.iter().all(Option::is_none) {
        return Err(Error::GridTooSmall(format!("no grid point within guard radius {radius}")));
    }
    Ok(Sampled {
        points,
        values,
        side: grid.side(),
        radius,
    })
}

fn coordinate_descent(psi: &FockVector, start: Complex64, step: f64) -> (Complex64, f64) {
    let mut z = start;
    let mut f = char_function(psi, z).norm();
    let mut s = step / 2.0;
    let mut moves = 0;
    while s >= step / 64.0 {
        loop {
            let mut improved = false;
            for d in [
                Complex64::new(s, 0.0),
                Complex64::new(-s, 0.0),
                Complex64::new(0.0, s),
                Complex64::new(0.0, -s),
            ] {
                let g = char_function(psi, z + d).norm();
                if g < f {
                    z += d;
                    f = g;
                    improved = true;
                }
            }
            moves += 1;
            if !improved || moves > 400 {
                break;
            }
        }
        s /= 2.0;
    }
    (z, f)
}

/// Gauss–Newton on `χ` viewed as a map ℝ² → ℝ², with a pseudo-inverse step
/// so that real-valued `χ` (zero curves) converges onto the curve.
fn polish(psi: &FockVector, start: Complex64) -> (Complex64, f64) {
    let mut z = start;
    let mut chi = char_function(psi, z);
    let mut f = chi.norm();
    let h = 1e-6;
    for _ in 0..40 {
        if f == 0.0 {
            break;
        }
        let dx = (char_function(psi, z + h) - char_function(psi, z - h)) / (2.0 * h);
        let dy = (char_function(psi, z + Complex64::new(0.0, h)) - char_function(psi, z - Complex64::new(0.0, h)))
            / (2.0 * h);
        let jac = Matrix2::new(dx.re, dy.re, dx.im, dy.im);
        let Ok(pinv) = jac.pseudo_inverse(1e-12 * jac.norm().max(1e-300)) else {
            break;
        };
        let step = pinv * Vector2::new(chi.re, chi.im);
        let mut delta = Complex64::new(-step[0], -step[1]);
        let mut accepted = false;
        for _ in 0..6 {
            let cand = char_function(psi, z + delta);
            if cand.norm() < f {
                z += delta;
                chi = cand;
                f = cand.norm();
                accepted = true;
                break;
            }
            delta *= 0.5;
        }
        if !accepted || delta.norm() < 1e-15 {
            break;
        }
    }
    (z, f)
}

fn candidates(s: &Sampled) -> Vec<usize> {
    let n = s.side;
    let at = |r: isize, c: isize| -> Option<Complex64> {
        if r < 0 || c < 0 || r as usize >= n || c as usize >= n {
            return None;
        }
        s.values[r as usize * n + c as usize]
    };
    let mut out = Vec::new();
    for r in 0..n as isize {
        for c in 0..n as isize {
            let Some(v) = at(r, c) else { continue };
            let a = v.norm();
            let nbrs = [at(r, c - 1), at(r, c + 1), at(r - 1, c), at(r + 1, c)];
            let min_along = |p: Option<Complex64>, q: Option<Complex64>| match (p, q) {
                (Some(p), Some(q)) => a <= p.norm() && a <= q.norm(),
                _ => false,
            };
            let local_min = min_along(nbrs[0], nbrs[1]) || min_along(nbrs[2], nbrs[3]);
            let spread = nbrs.iter().flatten().map(|u| (u - v).norm()).fold(0.0, f64::max);
            if local_min && (a <= 1.5 * spread) {
                out.push(r as usize * n + c as usize);
            }
        }
    }
    out
}

/// Scans `|χ_ψ|` over the guard disk of `grid`, refines grid-local minima,
/// and reports the zeros that persist under doubling of the cutoff.
pub fn extremality_scan<S: StatePreparation + ?Sized>(
    state: &S,
    cutoff: usize,
    grid: &PhaseGrid,
    cfg: &ScanConfig,
) -> Result<ScanVerdict> {
    let psi = state.prepare(cutoff)?;
    let radius = cfg.guard_radius.unwrap_or_else(|| default_guard_radius(cutoff));
    let sampled = sample(&psi, grid, radius)?;
    scan_sampled(state, &psi, &sampled, grid, cfg)
}

fn scan_sampled<S: StatePreparation + ?Sized>(
    state: &S,
    psi: &FockVector,
    sampled: &Sampled,
    grid: &PhaseGrid,
    cfg: &ScanConfig,
) -> Result<ScanVerdict> {
    let mut min_abs = f64::INFINITY;
    let mut argmin = Complex64::new(0.0, 0.0);
    let mut scanned = 0;
    for (z, v) in sampled.points.iter().zip(&sampled.values) {
        if let Some(v) = v {
            scanned += 1;
            if v.norm() < min_abs {
                min_abs = v.norm();
                argmin = *z;
            }
        }
    }

    let step = grid.step();
    let refined: Vec<(Complex64, Complex64, f64)> = candidates(sampled)
        .par_iter()
        .map(|&i| {
            let z0 = sampled.points[i];
            let (z1, _) = coordinate_descent(psi, z0, step);
            let (z2, f) = polish(psi, z1);
            (z0, z2, f)
        })
        .collect();

    let doubled = if cfg.check_doubling {
        Some(state.prepare(2 * psi.cutoff())?)
    } else {
        None
    };
    let mut loci: Vec<Complex64> = Vec::new();
    for (z0, z, f) in refined {
        if f >= cfg.zero_tol || (z - z0).norm() > 2.0 * step || z.norm() > sampled.radius {
            continue;
        }
        if let Some(big) = &doubled {
            if char_function(big, z).norm() >= cfg.zero_tol {
                continue;
            }
        }
        if loci.iter().all(|p| (p - z).norm() > step / 4.0) {
            loci.push(z);
        }
    }

    Ok(ScanVerdict {
        min_abs,
        argmin: [argmin.re, argmin.im],
        consistent_with_extremal: loci.is_empty(),
        zero_loci: loci.iter().map(|z| [z.re, z.im]).collect(),
        points_scanned: scanned,
        guard_radius: sampled.radius,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZeroSetKind {
    /// No zeros found.
    Empty,
    /// Zeros confined to points or curves.
    Null,
    /// A positive area fraction falls below tolerance; the grid or tolerance
    /// cannot resolve the zero set.
    PositiveArea,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IcReport {
    pub area_fraction: f64,
    pub points_below: usize,
    pub points_total: usize,
    pub zero_loci: usize,
    pub zero_set: ZeroSetKind,
    /// `χ_ψ ≠ 0` almost everywhere on the scanned region.
    pub ic_consistent: bool,
}

/// Measures how much of the guard disk has `|χ_ψ| < tol`.
pub fn ic_indicator<S: StatePreparation + ?Sized>(
    state: &S,
    cutoff: usize,
    grid: &PhaseGrid,
    tol: f64,
    cfg: &ScanConfig,
) -> Result<IcReport> {
    let psi = state.prepare(cutoff)?;
    let radius = cfg.guard_radius.unwrap_or_else(|| default_guard_radius(cutoff));
    let sampled = sample(&psi, grid, radius)?;
    let verdict = scan_sampled(state, &psi, &sampled, grid, cfg)?;
    let scanned: Vec<f64> = sampled.values.iter().flatten().map(|v| v.norm()).collect();
    let below = scanned.iter().filter(|&&a| a < tol).count();
    let fraction = below as f64 / scanned.len() as f64;
    let zero_set = if verdict.zero_loci.is_empty() && below == 0 {
        ZeroSetKind::Empty
    } else if fraction <= NULL_AREA_FRACTION {
        ZeroSetKind::Null
    } else {
        ZeroSetKind::PositiveArea
    };
    Ok(IcReport {
        area_fraction: fraction,
        points_below: below,
        points_total: scanned.len(),
        zero_loci: verdict.zero_loci.len(),
        zero_set,
        ic_consistent: zero_set != ZeroSetKind::PositiveArea,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_space::fock::NamedState;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn vacuum_has_no_zeros() {
        let grid = PhaseGrid::new(4.0, 0.1).unwrap();
        let v = extremality_scan(&NamedState::Number(0), 32, &grid, &ScanConfig::default()).unwrap();
        assert!(v.consistent_with_extremal);
        assert!(v.zero_loci.is_empty());
        // smallest value sits on the guard circle of radius √32/2
        assert!((v.min_abs - (-v.guard_radius.powi(2) / 2.0).exp()).abs() < 0.01);
    }

    #[test]
    fn first_number_state_zeros_on_unit_circle() {
        let grid = PhaseGrid::new(2.0, 0.1).unwrap();
        let v = extremality_scan(&NamedState::Number(1), 16, &grid, &ScanConfig::default()).unwrap();
        assert!(!v.consistent_with_extremal);
        assert!(v.zero_loci.len() > 20);
        for z in v.zeros() {
            assert!((z.norm() - 1.0).abs() < 1e-6, "{z}");
        }
    }

    #[test]
    fn second_number_state_zeros_at_laguerre_roots() {
        // L_2(t) = 1 − 2t + t²/2 has roots t = 2 ∓ √2
        let roots = [(2.0 - 2f64.sqrt()).sqrt(), (2.0 + 2f64.sqrt()).sqrt()];
        let grid = PhaseGrid::new(2.5, 0.1).unwrap();
        let cfg = ScanConfig {
            guard_radius: Some(2.0),
            ..ScanConfig::default()
        };
        let v = extremality_scan(&NamedState::Number(2), 32, &grid, &cfg).unwrap();
        let zs = v.zeros();
        assert!(!zs.is_empty());
        for z in &zs {
            let r = z.norm();
            assert!(roots.iter().any(|x| (r - x).abs() < 1e-6), "radius {r}");
        }
        for x in roots {
            assert!(zs.iter().any(|z| (z.norm() - x).abs() < 1e-6));
        }
    }

    #[test]
    fn ic_indicator_cases() {
        let grid = PhaseGrid::new(2.0, 0.05).unwrap();
        let r0 = ic_indicator(&NamedState::Number(0), 32, &grid, 1e-6, &ScanConfig::default()).unwrap();
        assert_eq!(r0.zero_set, ZeroSetKind::Empty);
        assert!(r0.ic_consistent);

        let r1 = ic_indicator(&NamedState::Number(1), 32, &grid, 1e-2, &ScanConfig::default()).unwrap();
        assert_eq!(r1.zero_set, ZeroSetKind::Null);
        assert!(r1.ic_consistent);
        assert!(r1.zero_loci > 0);

        // the below-tolerance band around the circle shrinks with the tolerance
        let r2 = ic_indicator(&NamedState::Number(1), 32, &grid, 1e-3, &ScanConfig::default()).unwrap();
        assert!(r2.area_fraction < r1.area_fraction);

        // absurd tolerance: everything is "zero", reported rather than guessed
        let r3 = ic_indicator(&NamedState::Number(1), 32, &grid, 10.0, &ScanConfig::default()).unwrap();
        assert_eq!(r3.zero_set, ZeroSetKind::PositiveArea);
        assert!(!r3.ic_consistent);
    }

    #[test]
    fn coherent_state_scan_is_clean() {
        let grid = PhaseGrid::new(2.0, 0.1).unwrap();
        let v = extremality_scan(&NamedState::Coherent(c(0.5, -0.3)), 32, &grid, &ScanConfig::default()).unwrap();
        assert!(v.consistent_with_extremal);
        assert!(v.min_abs > 0.0);
    }
}
