//! Extremality of finite POVMs, convex-decomposition witnesses, and
//! informational completeness.
//!
//! A POVM with coherent vectors `d_k(i)` is extremal iff the linear map
//! `L: (D_1, …, D_n) ↦ Σ_i Σ_{k,l} (D_i)_{kl} |d_k(i)⟩⟨d_l(i)|` is injective on
//! block-diagonal `D`. The kernel of `L` is read off its SVD.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::dilation::{self, CoherentFamily};
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, ComplexVector};
use crate::povm::{DiscretePovm, ToleranceConfig};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtremalityVerdict {
    pub extremal: bool,
    /// Complex dimension of `{D block-diagonal : Y†DY = 0}`.
    pub kernel_dim: usize,
    /// Smallest singular value of `L` over its whole domain (zero when the
    /// domain is larger than the operator space).
    pub min_singular_value: f64,
    pub max_singular_value: f64,
    /// Hermitian kernel element, one `m_i × m_i` block per outcome.
    #[serde(skip)]
    pub witness: Option<Vec<ComplexMatrix>>,
}

/// Columns of `L`, one per (outcome, k, l), each the column-major
/// vectorization of |d_k(i)⟩⟨d_l(i)|.
pub(crate) fn perturbation_map(family: &CoherentFamily) -> ComplexMatrix {
    let d = family.source_dim();
    let cols: Vec<ComplexVector> = family
        .all()
        .iter()
        .flat_map(|vs| {
            vs.iter().flat_map(move |dk| {
                vs.iter().map(move |dl| {
                    let op = linalg::outer(dk, dl);
                    ComplexVector::from_iterator(d * d, op.iter().copied())
                })
            })
        })
        .collect();
    if cols.is_empty() {
        return ComplexMatrix::zeros(d * d, 0);
    }
    ComplexMatrix::from_columns(&cols)
}

/// Splits a flat kernel vector into per-outcome `m_i × m_i` blocks.
fn unflatten(x: &ComplexVector, mults: &[usize]) -> Vec<ComplexMatrix> {
    let mut off = 0;
    mults
        .iter()
        .map(|&m| {
            let block = ComplexMatrix::from_fn(m, m, |k, l| x[off + k * m + l]);
            off += m * m;
            block
        })
        .collect()
}

fn blocks_norm(blocks: &[ComplexMatrix]) -> f64 {
    blocks.iter().map(|b| b.norm_squared()).sum::<f64>().sqrt()
}

/// Hermitian element of the kernel generated by `blocks`.
fn hermitian_witness(blocks: Vec<ComplexMatrix>) -> Vec<ComplexMatrix> {
    let total = blocks_norm(&blocks);
    let herm: Vec<ComplexMatrix> = blocks.iter().map(linalg::hermitize).collect();
    if blocks_norm(&herm) >= 1e-12 * total {
        return herm;
    }
    blocks
        .iter()
        .map(|b| (b - b.adjoint()) / linalg::I.scale(2.0))
        .collect()
}

/// Decides extremality through the kernel of the perturbation map.
pub fn extremality_test(povm: &DiscretePovm, cfg: &ToleranceConfig) -> ExtremalityVerdict {
    let family = dilation::coherent_family(&dilation::minimal_dilation(povm, cfg));
    verdict_from_family(&family, cfg)
}

pub(crate) fn verdict_from_family(family: &CoherentFamily, cfg: &ToleranceConfig) -> ExtremalityVerdict {
    let map = perturbation_map(family);
    let kernel = linalg::kernel(&map, cfg.rank_rel_tol);
    let witness = kernel
        .basis
        .first()
        .map(|x| hermitian_witness(unflatten(x, &family.multiplicities())));
    ExtremalityVerdict {
        extremal: kernel.dim() == 0,
        kernel_dim: kernel.dim(),
        min_singular_value: kernel.sigma_min(),
        max_singular_value: kernel.sigma_max(),
        witness,
    }
}

/// Dimension count showing a kernel must exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QuickReject {
    /// Σ_i m_i².
    pub block_dim: usize,
    /// d².
    pub operator_dim: usize,
}

/// Non-extremal without any SVD when Σ m_i² > d². Never certifies extremality.
pub fn quick_reject(povm: &DiscretePovm, cfg: &ToleranceConfig) -> Option<QuickReject> {
    let dil = dilation::minimal_dilation(povm, cfg);
    let block_dim: usize = dil.fiber_dims().iter().map(|m| m * m).sum();
    let operator_dim = povm.dim() * povm.dim();
    (block_dim > operator_dim).then_some(QuickReject {
        block_dim,
        operator_dim,
    })
}

/// `M = (M_plus + M_minus) / 2` with `M_± = M ± ε Δ`.
#[derive(Debug, Clone)]
pub struct ConvexDecomposition {
    pub plus: DiscretePovm,
    pub minus: DiscretePovm,
    pub weight: f64,
    pub epsilon: f64,
}

impl ConvexDecomposition {
    /// Largest entrywise deviation of `(M_+ + M_-)/2` from `M`.
    pub fn average_residual(&self, povm: &DiscretePovm) -> f64 {
        self.plus
            .effects()
            .iter()
            .zip(self.minus.effects())
            .zip(povm.effects())
            .map(|((p, m), e)| linalg::max_abs(&((p + m).scale(0.5) - e)))
            .fold(0.0, f64::max)
    }

    /// Largest entrywise distance between `M_+` and `M_-`.
    pub fn separation(&self) -> f64 {
        self.plus.distance(&self.minus)
    }
}

/// Splits a non-extremal POVM into two distinct POVMs along the verdict's
/// witness.
pub fn convex_decompose(
    povm: &DiscretePovm,
    verdict: &ExtremalityVerdict,
    cfg: &ToleranceConfig,
) -> Result<ConvexDecomposition> {
    match (&verdict.witness, verdict.extremal) {
        (Some(w), false) => convex_decompose_with_witness(povm, w, cfg),
        _ => Err(Error::ExtremalInput),
    }
}

/// As [`convex_decompose`] with an explicit block witness `D = ⊕ D_i`
/// expressed in the coherent-vector basis of each outcome.
pub fn convex_decompose_with_witness(
    povm: &DiscretePovm,
    witness: &[ComplexMatrix],
    cfg: &ToleranceConfig,
) -> Result<ConvexDecomposition> {
    let dil = dilation::minimal_dilation(povm, cfg);
    if witness.len() != povm.num_outcomes() {
        return Err(Error::DimensionMismatch {
            expected: povm.num_outcomes(),
            found: witness.len(),
        });
    }
    let d = povm.dim();
    let mut deltas = Vec::with_capacity(witness.len());
    for (i, block) in witness.iter().enumerate() {
        let m = dil.fiber_dims()[i];
        if block.nrows() != m || block.ncols() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: block.nrows(),
            });
        }
        let a = dil.fiber(i);
        deltas.push(if m == 0 {
            ComplexMatrix::zeros(d, d)
        } else {
            linalg::hermitize(&(a.adjoint() * block * a))
        });
    }

    let scale = deltas.iter().map(linalg::hermitian_norm).fold(0.0, f64::max);
    if scale.is_nan() || scale <= 0.0 {
        return Err(Error::DegenerateWitness("witness maps to the zero perturbation".into()));
    }
    deltas.iter_mut().for_each(|x| *x /= linalg::ONE.scale(scale));
    let sum = deltas.iter().fold(ComplexMatrix::zeros(d, d), |acc, x| acc + x);
    let leak = linalg::max_abs(&sum);
    if leak > cfg.norm_tol.max(1e-10) {
        return Err(Error::DegenerateWitness(format!(
            "perturbations do not cancel (residual {leak:.3e})"
        )));
    }

    let threshold = cfg.rank_rel_tol * dilation::global_scale(povm);
    let mut epsilon = f64::INFINITY;
    for (effect, delta) in povm.effects().iter().zip(&deltas) {
        let dn = linalg::hermitian_norm(delta);
        if dn <= 1e-14 {
            continue;
        }
        let smallest_on_range = effect
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .filter(|&v| v > threshold)
            .fold(f64::INFINITY, f64::min);
        epsilon = epsilon.min(smallest_on_range / dn);
    }
    epsilon *= 0.5;
    if !epsilon.is_finite() || epsilon < 1e-13 {
        return Err(Error::DegenerateWitness(format!("step size underflow (epsilon = {epsilon:e})")));
    }

    let build = |sign: f64| -> Result<DiscretePovm> {
        let effects = povm
            .effects()
            .iter()
            .zip(&deltas)
            .map(|(e, x)| e + x.scale(sign * epsilon))
            .collect();
        let p = DiscretePovm::new(effects, cfg)?;
        match povm.labels() {
            Some(l) => p.with_labels(l.to_vec()),
            None => Ok(p),
        }
    };
    Ok(ConvexDecomposition {
        plus: build(1.0)?,
        minus: build(-1.0)?,
        weight: 0.5,
        epsilon,
    })
}

/// Real coordinates of a Hermitian matrix in an orthonormal basis of the
/// d²-dimensional real space of Hermitian matrices.
fn hermitian_coordinates(m: &ComplexMatrix) -> Vec<f64> {
    let d = m.nrows();
    let s = std::f64::consts::SQRT_2;
    let mut out = Vec::with_capacity(d * d);
    for j in 0..d {
        out.push(m[(j, j)].re);
        for k in (j + 1)..d {
            out.push(s * m[(j, k)].re);
            out.push(s * m[(j, k)].im);
        }
    }
    out
}

/// Dimension of the real span of the effects.
pub fn effect_span_dim(povm: &DiscretePovm, cfg: &ToleranceConfig) -> usize {
    let d = povm.dim();
    let rows: Vec<Vec<f64>> = povm.effects().iter().map(hermitian_coordinates).collect();
    let a = DMatrix::from_fn(rows.len(), d * d, |i, j| rows[i][j]);
    linalg::real_rank(&a, cfg.rank_rel_tol)
}

/// True iff the effects span all Hermitian d×d matrices.
pub fn informational_completeness(povm: &DiscretePovm, cfg: &ToleranceConfig) -> bool {
    effect_span_dim(povm, cfg) == povm.dim() * povm.dim()
}
