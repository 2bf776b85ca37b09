//! Minimal Naimark dilations and minimal diagonalizations (generalized
//! coherent states) of finite POVMs.
//!
//! Every effect is factorized as `M_i = A_i† A_i` with `A_i` of shape
//! `m_i × d`, `m_i = rank M_i`. Stacking the `A_i` gives the isometry
//! `Y: ℂ^d → ⊕_i ℂ^{m_i}` with `M_i = Y† P_i Y`, where `P_i` projects onto the
//! rows of fiber `i`. The coherent vectors of outcome `i` are the conjugated
//! rows of `A_i`, so that `⟨d_k(i)|ψ⟩ = (Yψ)(i)_k`.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::Result;
use crate::linalg::{self, ComplexMatrix, ComplexVector, HermitianEigen};
use crate::povm::{DiscretePovm, ToleranceConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct NaimarkDilation {
    source_dim: usize,
    fiber_dims: Vec<usize>,
    offsets: Vec<usize>,
    isometry: ComplexMatrix,
}

impl NaimarkDilation {
    pub fn source_dim(&self) -> usize {
        self.source_dim
    }

    pub fn fiber_dims(&self) -> &[usize] {
        &self.fiber_dims
    }

    /// First row of each fiber inside `Y`.
    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn total_dim(&self) -> usize {
        self.isometry.nrows()
    }

    /// The `total_dim × source_dim` isometry `Y`.
    pub fn isometry(&self) -> &ComplexMatrix {
        &self.isometry
    }

    pub fn num_outcomes(&self) -> usize {
        self.fiber_dims.len()
    }

    /// Rows of `Y` belonging to outcome `i` (the factor `A_i`).
    pub fn fiber(&self, i: usize) -> ComplexMatrix {
        self.isometry
            .rows(self.offsets[i], self.fiber_dims[i])
            .into_owned()
    }

    /// `Y† P_i Y`.
    pub fn reconstruct(&self, i: usize) -> ComplexMatrix {
        let a = self.fiber(i);
        a.adjoint() * a
    }

    /// Largest entrywise deviation of `Y† P_i Y` from `M_i` over all outcomes.
    pub fn reconstruction_residual(&self, povm: &DiscretePovm) -> f64 {
        povm.effects()
            .iter()
            .enumerate()
            .map(|(i, e)| linalg::max_abs(&(self.reconstruct(i) - e)))
            .fold(0.0, f64::max)
    }

    /// Largest entrywise deviation of `Y†Y` from the identity.
    pub fn isometry_defect(&self) -> f64 {
        let d = self.source_dim;
        linalg::max_abs(&(self.isometry.adjoint() * &self.isometry - ComplexMatrix::identity(d, d)))
    }

    /// Largest entrywise deviation of `YY†` from the identity (zero only when
    /// `Y` is unitary).
    pub fn co_isometry_defect(&self) -> f64 {
        let n = self.total_dim();
        linalg::max_abs(&(&self.isometry * self.isometry.adjoint() - ComplexMatrix::identity(n, n)))
    }
}

/// Rank factor `A = diag(√λ) U†` keeping eigenvalues above `threshold`.
pub(crate) fn rank_factor(effect: &ComplexMatrix, threshold: f64, tie_tol: f64) -> ComplexMatrix {
    let eig = HermitianEigen::new(effect, tie_tol);
    let kept: Vec<(f64, &ComplexVector)> = eig
        .values
        .iter()
        .zip(&eig.vectors)
        .filter(|(v, _)| **v > threshold)
        .map(|(v, u)| (*v, u))
        .collect();
    let d = effect.ncols();
    let mut a = ComplexMatrix::zeros(kept.len(), d);
    for (k, (val, u)) in kept.iter().enumerate() {
        a.row_mut(k).copy_from(&u.adjoint().scale(val.sqrt()));
    }
    a
}

/// Scale used for rank decisions: the largest eigenvalue over all effects.
pub(crate) fn global_scale(povm: &DiscretePovm) -> f64 {
    povm.effects()
        .iter()
        .map(linalg::hermitian_norm)
        .fold(0.0, f64::max)
}

/// Builds the minimal Naimark dilation of `povm`.
pub fn minimal_dilation(povm: &DiscretePovm, cfg: &ToleranceConfig) -> NaimarkDilation {
    let scale = global_scale(povm);
    let threshold = cfg.rank_rel_tol * scale;
    let factors: Vec<ComplexMatrix> = povm
        .effects()
        .par_iter()
        .map(|e| rank_factor(e, threshold, threshold))
        .collect();

    let d = povm.dim();
    let fiber_dims: Vec<usize> = factors.iter().map(|a| a.nrows()).collect();
    let mut offsets = Vec::with_capacity(fiber_dims.len());
    let mut total = 0;
    for m in &fiber_dims {
        offsets.push(total);
        total += m;
    }
    let mut isometry = ComplexMatrix::zeros(total, d);
    for (a, &off) in factors.iter().zip(&offsets) {
        isometry.rows_mut(off, a.nrows()).copy_from(a);
    }
    NaimarkDilation {
        source_dim: d,
        fiber_dims,
        offsets,
        isometry,
    }
}

/// Per-outcome generalized coherent states `d_k(i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentFamily {
    source_dim: usize,
    vectors: Vec<Vec<ComplexVector>>,
}

impl CoherentFamily {
    pub fn new(source_dim: usize, vectors: Vec<Vec<ComplexVector>>) -> Self {
        Self { source_dim, vectors }
    }

    pub fn source_dim(&self) -> usize {
        self.source_dim
    }

    /// Vectors of outcome `i`; empty for outcomes with a zero effect.
    pub fn vectors(&self, i: usize) -> &[ComplexVector] {
        &self.vectors[i]
    }

    pub fn all(&self) -> &[Vec<ComplexVector>] {
        &self.vectors
    }

    pub fn num_outcomes(&self) -> usize {
        self.vectors.len()
    }

    pub fn multiplicities(&self) -> Vec<usize> {
        self.vectors.iter().map(Vec::len).collect()
    }

    /// Common multiplicity of all supported outcomes, if there is one.
    pub fn rank(&self) -> Option<usize> {
        constant_rank_of(&self.multiplicities())
    }

    /// Σ_k |d_k(i)⟩⟨d_k(i)|.
    pub fn frame_operator(&self, i: usize) -> ComplexMatrix {
        let d = self.source_dim;
        self.vectors[i]
            .iter()
            .fold(ComplexMatrix::zeros(d, d), |acc, v| acc + linalg::outer(v, v))
    }

    /// Gram matrix ⟨d_k(i)|d_l(i)⟩.
    pub fn gram(&self, i: usize) -> ComplexMatrix {
        let vs = &self.vectors[i];
        ComplexMatrix::from_fn(vs.len(), vs.len(), |k, l| vs[k].dotc(&vs[l]))
    }

    /// Whether the vectors of outcome `i` are linearly independent.
    pub fn independent(&self, i: usize, rel_tol: f64) -> bool {
        let vs = &self.vectors[i];
        if vs.is_empty() {
            return true;
        }
        let stacked = ComplexMatrix::from_columns(vs);
        linalg::kernel(&stacked, rel_tol).dim() == 0
    }
}

/// Reads the coherent vectors off the fibers of `Y`.
pub fn coherent_family(dil: &NaimarkDilation) -> CoherentFamily {
    let vectors = (0..dil.num_outcomes())
        .map(|i| {
            let a = dil.fiber(i);
            a.row_iter().map(|r| r.adjoint()).collect()
        })
        .collect();
    CoherentFamily::new(dil.source_dim(), vectors)
}

/// Whether every effect is a projection. The dilation-side criterion (square,
/// unitary `Y`) is evaluated as well and both must agree.
pub fn is_spectral_measure(povm: &DiscretePovm, cfg: &ToleranceConfig) -> bool {
    let idempotent = povm
        .effects()
        .iter()
        .all(|e| linalg::max_abs(&(e * e - e)) <= cfg.norm_tol);
    let dil = minimal_dilation(povm, cfg);
    let unitary = dil.total_dim() == dil.source_dim() && dil.co_isometry_defect() <= cfg.norm_tol.max(1e-10);
    idempotent && unitary
}

/// Multiplicity (fiber dimension) of outcome `i`.
pub fn multiplicity(povm: &DiscretePovm, i: usize, cfg: &ToleranceConfig) -> Result<usize> {
    let effect = povm.effect(i)?;
    let threshold = cfg.rank_rel_tol * global_scale(povm);
    Ok(rank_factor(effect, threshold, threshold).nrows())
}

fn constant_rank_of(mults: &[usize]) -> Option<usize> {
    let mut supported = mults.iter().copied().filter(|&m| m > 0);
    let first = supported.next()?;
    supported.all(|m| m == first).then_some(first)
}

/// `Some(r)` when every outcome of nonzero multiplicity has multiplicity `r`.
pub fn constant_rank(povm: &DiscretePovm, cfg: &ToleranceConfig) -> Option<usize> {
    constant_rank_of(minimal_dilation(povm, cfg).fiber_dims())
}

/// Hilbert–Schmidt Gram matrix of the operators |d_k(i)⟩⟨d_l(i)|, in the
/// same (outcome, k, l) order used by the extremality map. Test oracles use it
/// to cross-check kernel dimensions.
pub fn operator_gram(family: &CoherentFamily) -> DMatrix<num_complex::Complex64> {
    let mut ops = Vec::new();
    for vs in family.all() {
        for dk in vs {
            for dl in vs {
                ops.push(linalg::outer(dk, dl));
            }
        }
    }
    DMatrix::from_fn(ops.len(), ops.len(), |a, b| {
        crate::povm::trace_product(&ops[a].adjoint(), &ops[b])
    })
}
