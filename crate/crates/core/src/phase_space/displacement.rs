//! Matrix elements of the displacement operator `D(z) = exp(z a† − z̄ a)` and
//! the characteristic function `⟨ψ|D(z)ψ⟩`.

use num_complex::Complex64;

use super::fock::FockVector;
use super::special::{assoc_laguerre_sequence, ln_factorials};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

/// Unitarity defect tolerated on the guard block.
pub const GUARD_DEFECT: f64 = 1e-8;

/// Exact entries `⟨h_m|D(z) h_n⟩` for `m < rows`, `n < cols`:
/// `√(n!/m!) z^{m−n} e^{−|z|²/2} L_n^{(m−n)}(|z|²)` for `m ≥ n`, and the
/// conjugate-symmetric counterpart otherwise.
pub fn displacement_entries(z: Complex64, rows: usize, cols: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(rows, cols);
    if rows == 0 || cols == 0 {
        return out;
    }
    let x = z.norm_sqr();
    let lf = ln_factorials(rows.max(cols));
    let ln_r = z.norm().ln();
    let arg = z.arg();
    let biggest = rows.max(cols);

    for alpha in 0..biggest {
        // lower triangle (m = n + alpha) needs n < min(cols, rows - alpha);
        // upper triangle (n = m + alpha) needs m < min(rows, cols - alpha)
        let lower = cols.min(rows.saturating_sub(alpha));
        let upper = if alpha == 0 { 0 } else { rows.min(cols.saturating_sub(alpha)) };
        let len = lower.max(upper);
        if len == 0 {
            continue;
        }
        if alpha > 0 && x == 0.0 {
            continue;
        }
        let lag = assoc_laguerre_sequence(len, alpha as f64, x);
        for (k, l) in lag.iter().enumerate() {
            let modulus = if alpha == 0 {
                (-x / 2.0).exp()
            } else {
                (alpha as f64 * ln_r - x / 2.0 + 0.5 * (lf[k] - lf[k + alpha])).exp()
            };
            let value = modulus * l;
            if k < lower {
                out[(k + alpha, k)] = Complex64::from_polar(value, alpha as f64 * arg);
            }
            if k < upper {
                // (−z̄)^alpha
                out[(k, k + alpha)] =
                    Complex64::from_polar(value, alpha as f64 * (std::f64::consts::PI - arg));
            }
        }
    }
    out
}

/// N×N truncation of `D(z)` together with the size of its leading block on
/// which `D(z)·D(−z)` is the identity within [`GUARD_DEFECT`].
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedDisplacement {
    pub matrix: ComplexMatrix,
    pub guard: usize,
}

/// Guard block size: at most `N − ⌈4|z|√N⌉`, further reduced until every
/// row inside the block keeps all but `GUARD_DEFECT` of its norm within the
/// truncation (which bounds the block defect by Cauchy–Schwarz).
pub fn guard_size(z: Complex64, cutoff: usize, matrix: &ComplexMatrix) -> usize {
    let band = (4.0 * z.norm() * (cutoff as f64).sqrt()).ceil() as usize;
    let nominal = cutoff.saturating_sub(band);
    let mut guard = 0;
    for m in 0..nominal {
        let kept: f64 = matrix.row(m).iter().map(|v| v.norm_sqr()).sum();
        if 1.0 - kept > GUARD_DEFECT {
            break;
        }
        guard = m + 1;
    }
    guard
}

pub fn displacement_matrix(z: Complex64, cutoff: usize) -> Result<TruncatedDisplacement> {
    if cutoff == 0 {
        return Err(Error::CutoffTooSmall("cutoff must be positive".into()));
    }
    let matrix = displacement_entries(z, cutoff, cutoff);
    let guard = guard_size(z, cutoff, &matrix);
    if guard == 0 {
        return Err(Error::CutoffTooSmall(format!(
            "empty guard band for |z| = {} at cutoff {cutoff}",
            z.norm()
        )));
    }
    Ok(TruncatedDisplacement { matrix, guard })
}

/// `⟨ψ|D(z)ψ⟩` on the truncated space.
pub fn char_function(psi: &FockVector, z: Complex64) -> Complex64 {
    let c = psi.coeffs();
    // only rows/cols up to the last nonzero coefficient contribute
    let support = c.iter().rposition(|v| *v != Complex64::new(0.0, 0.0)).map_or(0, |p| p + 1);
    let d = displacement_entries(z, support, support);
    let v = c.rows(0, support);
    v.dotc(&(&d * v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{self, ComplexVector};
    use crate::phase_space::fock::{annihilation, coherent_state, number_state};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn expm_oracle(z: Complex64, work: usize, n: usize) -> ComplexMatrix {
        let a = annihilation(work);
        let gen = &a.adjoint() * z - &a * z.conj();
        gen.exp().view((0, 0), (n, n)).into_owned()
    }

    #[test]
    fn identity_at_origin() {
        let d = displacement_matrix(c(0.0, 0.0), 10).unwrap();
        assert_eq!(d.matrix, ComplexMatrix::identity(10, 10));
        assert_eq!(d.guard, 10);
    }

    #[test]
    fn vacuum_element() {
        for z in [c(0.3, 0.0), c(-1.0, 0.5), c(0.1, -1.2)] {
            let d = displacement_matrix(z, 64).unwrap();
            let expect = (-z.norm_sqr() / 2.0).exp();
            assert!((d.matrix[(0, 0)] - expect).norm() < 1e-14);
            let oracle = expm_oracle(z, 120, 16);
            assert!((oracle[(0, 0)] - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn closed_form_matches_matrix_exponential() {
        let z = c(0.7, -0.4);
        let n = 24;
        let d = displacement_entries(z, n, n);
        let oracle = expm_oracle(z, 140, n);
        assert!(linalg::max_abs(&(d - oracle)) < 1e-11);
    }

    #[test]
    fn rectangular_entries_agree_with_square() {
        let z = c(-0.4, 0.9);
        let sq = displacement_entries(z, 12, 12);
        let tall = displacement_entries(z, 12, 5);
        let wide = displacement_entries(z, 4, 12);
        assert_eq!(tall, sq.view((0, 0), (12, 5)).into_owned());
        assert_eq!(wide, sq.view((0, 0), (4, 12)).into_owned());
    }

    #[test]
    fn guard_block_is_unitary() {
        for (z, n) in [(c(0.1, 0.0), 32), (c(0.25, 0.3), 32), (c(0.5, -0.5), 64), (c(1.0, 0.0), 32)] {
            let plus = displacement_matrix(z, n).unwrap();
            let minus = displacement_matrix(-z, n).unwrap();
            let k = plus.guard.min(minus.guard);
            assert!(k > 0);
            let prod = &plus.matrix * &minus.matrix;
            let block = prod.view((0, 0), (k, k)).into_owned();
            assert!(linalg::max_abs(&(block - ComplexMatrix::identity(k, k))) < GUARD_DEFECT);
        }
    }

    #[test]
    fn empty_guard_is_refused() {
        assert!(matches!(displacement_matrix(c(3.0, 0.0), 16), Err(Error::CutoffTooSmall(_))));
    }

    #[test]
    fn char_function_closed_forms() {
        let h0 = number_state(0, 32).unwrap();
        let h1 = number_state(1, 32).unwrap();
        for z in [c(0.0, 0.0), c(0.5, 0.2), c(1.0, 0.0), c(0.0, -1.0), c(2.0, 1.0), c(3.5, -2.0)] {
            let x = z.norm_sqr();
            assert!((char_function(&h0, z) - (-x / 2.0).exp()).norm() < 1e-14);
            assert!((char_function(&h1, z) - (1.0 - x) * (-x / 2.0).exp()).norm() < 1e-14);
        }
        assert!(char_function(&h1, Complex64::from_polar(1.0, 0.77)).norm() < 1e-15);
    }

    #[test]
    fn char_function_at_origin_is_one() {
        let psi = coherent_state(c(0.6, 0.9), 30).unwrap();
        assert!((char_function(&psi, c(0.0, 0.0)) - 1.0).norm() < 1e-14);
        let mixed = FockVector::new(
            ComplexVector::from_vec(vec![c(0.3, 0.1), c(-0.2, 0.5), c(0.7, 0.0)]),
            0.0,
        )
        .unwrap();
        assert!((char_function(&mixed, c(0.0, 0.0)) - 1.0).norm() < 1e-14);
    }
}
