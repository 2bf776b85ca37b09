//! Covariant POVMs for the cyclic group ℤ_N acting through a diagonal
//! representation `V(g) = diag(e^{2πi λ_j g / N})`.
//!
//! A covariant POVM is fixed by its seed `K = M({0})`; the other effects are
//! `M_g = V(g) K V(g)†`. Normalization `Σ_g M_g = I` only involves the blocks
//! of `K` whose row and column carry the same character, and requires
//! `N·K_λλ = I` for each of them.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dilation::{coherent_family, global_scale, minimal_dilation, rank_factor, CoherentFamily};
use crate::error::{Error, Result};
use crate::extremality::{verdict_from_family, ExtremalityVerdict};
use crate::families::{inverse_sqrt, random_complex};
use crate::linalg::{self, ComplexMatrix, ComplexVector};
use crate::povm::{DiscretePovm, ToleranceConfig};

/// Diagonal representation of ℤ_N with one character label per basis vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CyclicRep {
    group_order: usize,
    char_labels: Vec<usize>,
}

impl CyclicRep {
    pub fn new(group_order: usize, char_labels: Vec<usize>) -> Result<Self> {
        if group_order == 0 {
            return Err(Error::InvalidArgument("group order must be positive".into()));
        }
        if char_labels.is_empty() {
            return Err(Error::InvalidArgument("representation needs at least one basis vector".into()));
        }
        if let Some(bad) = char_labels.iter().find(|&&l| l >= group_order) {
            return Err(Error::InvalidArgument(format!(
                "character label {bad} outside 0..{group_order}"
            )));
        }
        Ok(Self {
            group_order,
            char_labels,
        })
    }

    pub fn group_order(&self) -> usize {
        self.group_order
    }

    pub fn dim(&self) -> usize {
        self.char_labels.len()
    }

    pub fn char_labels(&self) -> &[usize] {
        &self.char_labels
    }

    /// Diagonal of `V(g)`.
    pub fn phases(&self, g: usize) -> ComplexVector {
        let n = self.group_order;
        ComplexVector::from_iterator(
            self.dim(),
            self.char_labels
                .iter()
                .map(|&l| Complex64::from_polar(1.0, 2.0 * PI * ((l * g) % n) as f64 / n as f64)),
        )
    }

    pub fn v(&self, g: usize) -> ComplexMatrix {
        ComplexMatrix::from_diagonal(&self.phases(g))
    }

    /// `V(g) A V(g)†`.
    pub fn conjugate(&self, g: usize, a: &ComplexMatrix) -> ComplexMatrix {
        let p = self.phases(g);
        ComplexMatrix::from_fn(a.nrows(), a.ncols(), |i, j| p[i] * a[(i, j)] * p[j].conj())
    }

    /// Basis indices grouped by character, in increasing character order.
    pub fn blocks(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut out: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (j, &l) in self.char_labels.iter().enumerate() {
            out.entry(l).or_default().push(j);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CovariantPovm {
    rep: CyclicRep,
    seed: ComplexMatrix,
    povm: DiscretePovm,
}

impl CovariantPovm {
    pub fn rep(&self) -> &CyclicRep {
        &self.rep
    }

    pub fn seed(&self) -> &ComplexMatrix {
        &self.seed
    }

    pub fn povm(&self) -> &DiscretePovm {
        &self.povm
    }

    /// `M_g` for `g = 0..N`.
    pub fn effects(&self) -> &[ComplexMatrix] {
        self.povm.effects()
    }
}

/// `‖N·K_λλ − I‖` for every character block present in `rep`.
pub fn block_residuals(rep: &CyclicRep, seed: &ComplexMatrix) -> Vec<(usize, f64)> {
    let n = rep.group_order() as f64;
    rep.blocks()
        .into_iter()
        .map(|(l, idx)| {
            let m = idx.len();
            let block = ComplexMatrix::from_fn(m, m, |a, b| seed[(idx[a], idx[b])]);
            let res = linalg::operator_norm(&(block * Complex64::from(n) - ComplexMatrix::identity(m, m)));
            (l, res)
        })
        .collect()
}

pub fn build_covariant(rep: &CyclicRep, seed: &ComplexMatrix, cfg: &ToleranceConfig) -> Result<CovariantPovm> {
    let d = linalg::ensure_square(seed)?;
    if d != rep.dim() {
        return Err(Error::DimensionMismatch {
            expected: rep.dim(),
            found: d,
        });
    }
    if linalg::hermiticity_residual(seed) > cfg.psd_tol {
        return Err(Error::InvalidArgument("seed is not Hermitian".into()));
    }
    let seed = linalg::hermitize(seed);
    let low = linalg::min_eigenvalue(&seed);
    if low < -cfg.psd_tol {
        return Err(Error::InvalidArgument(format!(
            "seed is not positive semidefinite (eigenvalue {low:.3e})"
        )));
    }
    let bad: Vec<String> = block_residuals(rep, &seed)
        .into_iter()
        .filter(|&(_, r)| r > cfg.norm_tol)
        .map(|(l, r)| format!("character {l}: ‖N·K_λλ − I‖ = {r:.3e}"))
        .collect();
    if !bad.is_empty() {
        return Err(Error::SeedNormalization(bad.join("; ")));
    }
    let effects: Vec<ComplexMatrix> = (0..rep.group_order())
        .into_par_iter()
        .map(|g| rep.conjugate(g, &seed))
        .collect();
    let labels = (0..rep.group_order()).map(|g| g.to_string()).collect();
    let povm = DiscretePovm::new(effects, cfg)?.with_labels(labels)?;
    Ok(CovariantPovm {
        rep: rep.clone(),
        seed,
        povm,
    })
}

/// `max_{g,h} ‖V(g) M_h V(g)† − M_{g+h}‖` for an arbitrary effect list
/// indexed by group elements.
pub fn covariance_residual(rep: &CyclicRep, effects: &[ComplexMatrix]) -> Result<f64> {
    let n = rep.group_order();
    if effects.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: effects.len(),
        });
    }
    if let Some(e) = effects.iter().find(|e| e.nrows() != rep.dim() || e.ncols() != rep.dim()) {
        return Err(Error::DimensionMismatch {
            expected: rep.dim(),
            found: e.nrows().max(e.ncols()),
        });
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|g| (0..n).map(move |h| (g, h))).collect();
    Ok(pairs
        .par_iter()
        .map(|&(g, h)| linalg::operator_norm(&(rep.conjugate(g, &effects[h]) - &effects[(g + h) % n])))
        .reduce(|| 0.0, f64::max))
}

pub fn covariance_check(m: &CovariantPovm) -> f64 {
    covariance_residual(&m.rep, m.effects()).expect("built covariant POVM has consistent shapes")
}

/// Covariant diagonalization `d_k(g) = V(g) d_k(0)` with the base vectors
/// read off the seed, compared against the generic dilation.
#[derive(Debug, Clone)]
pub struct CovariantFamily {
    pub base: Vec<ComplexVector>,
    pub family: CoherentFamily,
    /// Largest difference in frame operators or Gram matrices between this
    /// family and the one from the minimal dilation of the effect list.
    pub gauge_residual: f64,
    pub rank: usize,
}

pub fn covariant_coherent_family(m: &CovariantPovm, cfg: &ToleranceConfig) -> CovariantFamily {
    let threshold = cfg.rank_rel_tol * global_scale(&m.povm);
    let factor = rank_factor(&m.seed, threshold, threshold);
    let base: Vec<ComplexVector> = factor.row_iter().map(|r| r.adjoint()).collect();
    let vectors: Vec<Vec<ComplexVector>> = (0..m.rep.group_order())
        .map(|g| {
            let p = m.rep.phases(g);
            base.iter().map(|b| b.component_mul(&p)).collect()
        })
        .collect();
    let family = CoherentFamily::new(m.rep.dim(), vectors);
    let generic = coherent_family(&minimal_dilation(&m.povm, cfg));

    let mut gauge_residual: f64 = 0.0;
    for g in 0..family.num_outcomes() {
        if family.vectors(g).len() != generic.vectors(g).len() {
            gauge_residual = f64::INFINITY;
            break;
        }
        let frame = linalg::max_abs(&(family.frame_operator(g) - generic.frame_operator(g)));
        let gram = linalg::max_abs(&(family.gram(g) - generic.gram(g)));
        gauge_residual = gauge_residual.max(frame).max(gram);
    }
    CovariantFamily {
        rank: base.len(),
        base,
        family,
        gauge_residual,
    }
}

/// Extremality through linear independence of the `N·r²` operators
/// `V(g)|d_k(0)⟩⟨d_l(0)|V(g)†`.
pub fn covariant_extremality(m: &CovariantPovm, cfg: &ToleranceConfig) -> ExtremalityVerdict {
    verdict_from_family(&covariant_coherent_family(m, cfg).family, cfg)
}

/// Canonical position observable on `ℂ^N ⊗ ℂ^s`: every character carries
/// multiplicity `s` and `M_g` projects onto the `g`-th discrete Fourier
/// vector tensored with `I_s`.
pub fn canonical_position(n: usize, s: usize, cfg: &ToleranceConfig) -> Result<CovariantPovm> {
    if n < 2 || s < 1 {
        return Err(Error::InvalidArgument(format!(
            "canonical position needs N ≥ 2 and multiplicity ≥ 1 (got {n}, {s})"
        )));
    }
    let labels: Vec<usize> = (0..n).flat_map(|l| std::iter::repeat_n(l, s)).collect();
    let rep = CyclicRep::new(n, labels)?;
    let d = n * s;
    let seed = ComplexMatrix::from_fn(d, d, |a, b| {
        if a % s == b % s {
            Complex64::from(1.0 / n as f64)
        } else {
            linalg::ZERO
        }
    });
    build_covariant(&rep, &seed, cfg)
}

/// Random seed of rank `rank` satisfying the block normalization, obtained by
/// a character-block-diagonal congruence of a Ginibre seed. `rank` must be at
/// least the largest character multiplicity.
pub fn random_seed<R: Rng + ?Sized>(rep: &CyclicRep, rank: usize, rng: &mut R) -> Result<ComplexMatrix> {
    let blocks = rep.blocks();
    let widest = blocks.values().map(Vec::len).max().unwrap_or(0);
    if rank < widest {
        return Err(Error::InvalidArgument(format!(
            "seed rank {rank} below largest character multiplicity {widest}"
        )));
    }
    let x = random_complex(rep.dim(), rank, rng);
    let raw = &x * x.adjoint();
    let n = rep.group_order() as f64;
    let mut t = ComplexMatrix::zeros(rep.dim(), rep.dim());
    for idx in blocks.values() {
        let m = idx.len();
        let block = ComplexMatrix::from_fn(m, m, |a, b| raw[(idx[a], idx[b])] * n);
        let w = inverse_sqrt(&block);
        for a in 0..m {
            for b in 0..m {
                t[(idx[a], idx[b])] = w[(a, b)];
            }
        }
    }
    Ok(linalg::hermitize(&(&t * raw * t.adjoint())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dilation::{constant_rank, is_spectral_measure};
    use crate::extremality::{extremality_test, quick_reject};
    use crate::families::{basis_vector, bloch_effect};
    use crate::povm::{born_probabilities, DensityState};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn qubit_rep() -> CyclicRep {
        CyclicRep::new(2, vec![0, 1]).unwrap()
    }

    #[test]
    fn representation_is_a_homomorphism() {
        let rep = CyclicRep::new(5, vec![0, 3, 1, 3]).unwrap();
        assert_eq!(rep.v(0), ComplexMatrix::identity(4, 4));
        for g in 0..5 {
            assert!(linalg::is_isometry(&rep.v(g), 1e-14));
            for h in 0..5 {
                let diff = rep.v(g) * rep.v(h) - rep.v((g + h) % 5);
                assert!(linalg::max_abs(&diff) < 1e-14);
            }
        }
        assert!(CyclicRep::new(2, vec![0, 2]).is_err());
    }

    #[test]
    fn plus_projector_seed() {
        let seed = bloch_effect([1.0, 0.0, 0.0], 1.0);
        let m = build_covariant(&qubit_rep(), &seed, &cfg()).unwrap();
        let z = ComplexMatrix::from_diagonal(&ComplexVector::from_vec(vec![linalg::ONE, -linalg::ONE]));
        assert!(linalg::max_abs(&(&m.effects()[1] - &z * &seed * &z)) < 1e-15);
        assert!(covariance_check(&m) < 1e-12);
        assert!(covariant_extremality(&m, &cfg()).extremal);
        assert!(extremality_test(m.povm(), &cfg()).extremal);
    }

    #[test]
    fn uniform_seed_is_trivial_and_not_extremal() {
        let rep = CyclicRep::new(3, vec![0, 2, 2]).unwrap();
        let seed = ComplexMatrix::identity(3, 3) / Complex64::from(3.0);
        let m = build_covariant(&rep, &seed, &cfg()).unwrap();
        for e in m.effects() {
            assert!(linalg::max_abs(&(e - &seed)) < 1e-15);
        }
        let fam = covariant_coherent_family(&m, &cfg());
        assert_eq!(fam.rank, 3);
        for (k, b) in fam.base.iter().enumerate() {
            assert!((b.norm() - 1.0 / 3f64.sqrt()).abs() < 1e-12, "{k}");
        }

        let half = build_covariant(&qubit_rep(), &(ComplexMatrix::identity(2, 2) / Complex64::from(2.0)), &cfg()).unwrap();
        assert!(!covariant_extremality(&half, &cfg()).extremal);
        assert!(!extremality_test(half.povm(), &cfg()).extremal);
        assert!(quick_reject(half.povm(), &cfg()).is_some());
    }

    #[test]
    fn wrong_diagonal_names_blocks() {
        let seed = ComplexMatrix::from_diagonal(&ComplexVector::from_vec(vec![linalg::ONE, linalg::ZERO]));
        let err = build_covariant(&qubit_rep(), &seed, &cfg()).unwrap_err().to_string();
        assert!(err.contains("character 0") && err.contains("character 1"), "{err}");
    }

    #[test]
    fn perturbed_effect_residual_matches_size() {
        let m = canonical_position(3, 1, &cfg()).unwrap();
        let mut effects = m.effects().to_vec();
        let bump = 1e-3;
        effects[1][(0, 0)] += Complex64::from(bump);
        let r = covariance_residual(m.rep(), &effects).unwrap();
        assert!((r - bump).abs() < 1e-12, "{r}");
    }

    #[test]
    fn canonical_position_is_fourier_basis() {
        for n in 2..=6 {
            let m = canonical_position(n, 1, &cfg()).unwrap();
            for (g, e) in m.effects().iter().enumerate() {
                let f = ComplexVector::from_fn(n, |l, _| {
                    Complex64::from_polar(1.0 / (n as f64).sqrt(), 2.0 * PI * (l * g) as f64 / n as f64)
                });
                assert!(linalg::max_abs(&(e - linalg::outer(&f, &f))) < 1e-12);
            }
            assert!(is_spectral_measure(m.povm(), &cfg()));
        }
    }

    #[test]
    fn canonical_position_with_multiplicity() {
        let m = canonical_position(3, 2, &cfg()).unwrap();
        assert_eq!(constant_rank(m.povm(), &cfg()), Some(2));
        assert!(is_spectral_measure(m.povm(), &cfg()));
        assert!(covariant_extremality(&m, &cfg()).extremal);
        assert!(covariance_check(&m) < 1e-12);
    }

    #[test]
    fn position_eigenstate_is_sharp() {
        let n = 4;
        let m = canonical_position(n, 1, &cfg()).unwrap();
        let g0 = 3;
        // inverse Fourier transform of the basis vector at g0
        let psi = m.effects()[g0].column(0).into_owned() * Complex64::from((n as f64).sqrt());
        let rho = DensityState::pure(&psi).unwrap();
        let p = born_probabilities(&rho, m.povm(), &cfg()).unwrap();
        for (g, pg) in p.iter().enumerate() {
            assert!((pg - if g == g0 { 1.0 } else { 0.0 }).abs() < 1e-12);
        }
    }

    #[test]
    fn coherent_vectors_translate() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let rep = CyclicRep::new(4, vec![0, 1, 1, 3, 2]).unwrap();
        let seed = random_seed(&rep, 2, &mut rng).unwrap();
        let m = build_covariant(&rep, &seed, &cfg()).unwrap();
        let fam = covariant_coherent_family(&m, &cfg());
        assert!(fam.gauge_residual < 1e-10);
        for g in 0..4 {
            for k in 0..fam.rank {
                for j in 0..5 {
                    let psi = basis_vector(5, j);
                    let lhs = fam.family.vectors(g)[k].dotc(&psi);
                    let rhs = fam.base[k].dotc(&(rep.v(g).adjoint() * &psi));
                    assert!((lhs - rhs).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn random_seeds_rejected_below_multiplicity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rep = CyclicRep::new(2, vec![0, 0, 0, 1]).unwrap();
        assert!(random_seed(&rep, 2, &mut rng).is_err());
        assert!(random_seed(&rep, 3, &mut rng).is_ok());
    }
}
