//! Dense complex linear algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix. Effects, isometries, density operators and truncated
/// displacement operators all use this representation.
pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn ensure_square(m: &ComplexMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(m.nrows())
}

/// Largest entrywise modulus.
pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn hermiticity_residual(m: &ComplexMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn hermitize(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

pub fn is_hermitian(m: &ComplexMatrix, tol: f64) -> bool {
    m.nrows() == m.ncols() && hermiticity_residual(m) <= tol
}

/// All eigenvalues of the Hermitian part are at least `-tol`.
pub fn is_psd(m: &ComplexMatrix, tol: f64) -> bool {
    m.nrows() == m.ncols() && is_hermitian(m, tol) && min_eigenvalue(m) >= -tol
}

/// `m† m = I` within `tol`, entrywise.
pub fn is_isometry(m: &ComplexMatrix, tol: f64) -> bool {
    let gram = m.adjoint() * m;
    max_abs(&(gram - ComplexMatrix::identity(m.ncols(), m.ncols()))) <= tol
}

pub fn min_eigenvalue(m: &ComplexMatrix) -> f64 {
    hermitize(m)
        .symmetric_eigenvalues()
        .iter()
        .fold(f64::INFINITY, |a, &b| a.min(b))
}

/// Spectral norm of a Hermitian matrix, max |λ|.
pub fn hermitian_norm(m: &ComplexMatrix) -> f64 {
    hermitize(m)
        .symmetric_eigenvalues()
        .iter()
        .fold(0.0, |a, &b| a.max(b.abs()))
}

/// Largest singular value.
pub fn operator_norm(m: &ComplexMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().iter().fold(0.0, |a, &b| a.max(b))
}

pub fn trace(m: &ComplexMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

pub fn outer(u: &ComplexVector, v: &ComplexVector) -> ComplexMatrix {
    u * v.adjoint()
}

/// Multiplies the vector by a phase so that its first component of
/// non-negligible modulus is real and positive.
pub fn fix_phase(v: &mut ComplexVector) {
    let scale = v.iter().fold(0.0_f64, |a, z| a.max(z.norm()));
    if scale == 0.0 {
        return;
    }
    if let Some(first) = v.iter().find(|z| z.norm() > 1e-10 * scale).copied() {
        let phase = first.conj() / first.norm();
        v.iter_mut().for_each(|z| *z *= phase);
    }
}

/// Eigendecomposition of a Hermitian matrix with deterministic ordering.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Unit eigenvectors, one per entry of `values`, phase-fixed.
    pub vectors: Vec<ComplexVector>,
}

impl HermitianEigen {
    /// Eigenvalues within `tie_tol` of each other are treated as degenerate;
    /// inside such a group vectors are ordered lexicographically by their
    /// (re, im) components.
    pub fn new(m: &ComplexMatrix, tie_tol: f64) -> Self {
        let eig = hermitize(m).symmetric_eigen();
        let mut pairs: Vec<(f64, ComplexVector)> = eig
            .eigenvalues
            .iter()
            .enumerate()
            .map(|(j, &val)| {
                let mut v: ComplexVector = eig.eigenvectors.column(j).into_owned();
                fix_phase(&mut v);
                (val, v)
            })
            .collect();
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0));

        let mut start = 0;
        while start < pairs.len() {
            let mut end = start + 1;
            while end < pairs.len() && (pairs[end - 1].0 - pairs[end].0).abs() <= tie_tol {
                end += 1;
            }
            pairs[start..end].sort_by(|a, b| lex_cmp(&a.1, &b.1));
            start = end;
        }
        let (values, vectors) = pairs.into_iter().unzip();
        Self { values, vectors }
    }
}

fn lex_cmp(a: &ComplexVector, b: &ComplexVector) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        let ord = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
        if ord.is_ne() {
            // compare with a little slack so rounding noise does not flip order
            if (x - y).norm() > 1e-12 {
                return ord;
            }
        }
    }
    std::cmp::Ordering::Equal
}

/// Singular spectrum and right kernel of a (possibly wide) matrix.
#[derive(Debug, Clone)]
pub struct Kernel {
    /// Singular values of the map restricted to its domain, descending;
    /// length equals the number of columns (zero-padded for wide matrices).
    pub singular_values: Vec<f64>,
    pub rank: usize,
    /// Orthonormal basis of the numerical null space.
    pub basis: Vec<ComplexVector>,
}

impl Kernel {
    pub fn sigma_max(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    pub fn sigma_min(&self) -> f64 {
        self.singular_values.last().copied().unwrap_or(0.0)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// Null space of `a` at threshold `rel_tol * sigma_max`. Wide matrices are
/// padded with zero rows so the SVD yields a full set of right singular
/// vectors.
pub fn kernel(a: &ComplexMatrix, rel_tol: f64) -> Kernel {
    let cols = a.ncols();
    if cols == 0 {
        return Kernel {
            singular_values: Vec::new(),
            rank: 0,
            basis: Vec::new(),
        };
    }
    let rows = a.nrows().max(cols);
    let mut padded = ComplexMatrix::zeros(rows, cols);
    padded.view_mut((0, 0), (a.nrows(), cols)).copy_from(a);

    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));

    let singular_values: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let threshold = rel_tol * singular_values[0];
    let rank = singular_values
        .iter()
        .filter(|&&s| s > threshold && s > 0.0)
        .count();
    let basis = order[rank..]
        .iter()
        .map(|&i| v_t.row(i).adjoint().into_owned())
        .collect();
    Kernel {
        singular_values,
        rank,
        basis,
    }
}

/// Numerical rank of a real matrix at `rel_tol * sigma_max`.
pub fn real_rank(a: &DMatrix<f64>, rel_tol: f64) -> usize {
    if a.is_empty() {
        return 0;
    }
    let sv = a.singular_values();
    let max = sv.iter().fold(0.0_f64, |m, &s| m.max(s));
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * max).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn predicates_on_simple_matrices() {
        let h = ComplexMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)]);
        assert!(is_hermitian(&h, 1e-12));
        let not_h = ComplexMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(!is_hermitian(&not_h, 1e-12));

        let neg = ComplexMatrix::from_diagonal(&ComplexVector::from_vec(vec![c(1.0, 0.0), c(-1e-3, 0.0)]));
        assert!(!is_psd(&neg, 1e-9));
        assert!(is_psd(&neg, 1e-2));

        let s = 0.5_f64.sqrt();
        let y = ComplexMatrix::from_row_slice(3, 2, &[c(s, 0.0), ZERO, c(s, 0.0), ZERO, ZERO, ONE]);
        assert!(is_isometry(&y, 1e-12));
        assert!(!is_isometry(&y.scale(2.0), 1e-12));
    }

    #[test]
    fn eigen_is_sorted_and_phase_fixed() {
        let m = ComplexMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.5), c(0.0, -0.5), c(1.0, 0.0)]);
        let e = HermitianEigen::new(&m, 1e-12);
        assert!((e.values[0] - 1.5).abs() < 1e-12);
        assert!((e.values[1] - 0.5).abs() < 1e-12);
        for v in &e.vectors {
            assert!(v[0].im.abs() < 1e-14 && v[0].re > 0.0);
        }
    }

    #[test]
    fn degenerate_eigenvectors_are_deterministic() {
        let id = ComplexMatrix::identity(3, 3);
        let a = HermitianEigen::new(&id, 1e-12);
        let b = HermitianEigen::new(&id, 1e-12);
        for (u, v) in a.vectors.iter().zip(&b.vectors) {
            assert_eq!(u, v);
        }
    }

    #[test]
    fn kernel_of_wide_matrix() {
        // 1x3 map (x, y, z) -> x + y: kernel has dimension 2
        let a = ComplexMatrix::from_row_slice(1, 3, &[ONE, ONE, ZERO]);
        let k = kernel(&a, 1e-10);
        assert_eq!(k.rank, 1);
        assert_eq!(k.dim(), 2);
        for v in &k.basis {
            assert!((&a * v).norm() < 1e-12);
        }
    }
}
