//! Finite-outcome POVMs, density states, Born statistics, convex mixing and
//! outcome sampling.

use std::fmt;

use num_complex::Complex64;
use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, ComplexVector};

/// Numerical tolerances shared by every module.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    /// Allowed negative eigenvalue magnitude (and Hermiticity defect) of an effect.
    pub psd_tol: f64,
    /// Allowed deviation of the effect sum from the identity.
    pub norm_tol: f64,
    /// Singular values / eigenvalues below `rank_rel_tol` times the largest
    /// one count as zero.
    pub rank_rel_tol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            psd_tol: 1e-9,
            norm_tol: 1e-9,
            rank_rel_tol: 1e-10,
        }
    }
}

impl ToleranceConfig {
    pub fn new(psd_tol: f64, norm_tol: f64, rank_rel_tol: f64) -> Result<Self> {
        for (name, v) in [
            ("psd_tol", psd_tol),
            ("norm_tol", norm_tol),
            ("rank_rel_tol", rank_rel_tol),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be a finite nonnegative number, got {v}"
                )));
            }
        }
        Ok(Self {
            psd_tol,
            norm_tol,
            rank_rel_tol,
        })
    }
}

/// Outcome of [`validate_povm`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    /// max over effects of max |E - E†|.
    pub hermiticity_residual: f64,
    /// max over effects of the magnitude of the most negative eigenvalue (0 if PSD).
    pub psd_residual: f64,
    /// Spectral norm of Σ E_i - I.
    pub normalization_residual: f64,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "ok={} hermiticity={:.3e} psd={:.3e} normalization={:.3e}",
            self.ok, self.hermiticity_residual, self.psd_residual, self.normalization_residual
        )
    }
}

fn common_dim(effects: &[ComplexMatrix]) -> Result<usize> {
    let first = effects.first().ok_or(Error::NoEffects)?;
    let dim = linalg::ensure_square(first)?;
    for e in effects {
        let d = linalg::ensure_square(e)?;
        if d != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: d,
            });
        }
    }
    Ok(dim)
}

/// Checks positivity, Hermiticity and normalization of an effect list.
///
/// Structural problems (ragged dimensions, non-square matrices, empty list)
/// are errors; a well-formed list that fails a numerical check yields a
/// report with `ok == false`.
pub fn validate_povm(effects: &[ComplexMatrix], cfg: &ToleranceConfig) -> Result<ValidationReport> {
    let dim = common_dim(effects)?;
    let mut hermiticity: f64 = 0.0;
    let mut psd: f64 = 0.0;
    let mut sum = ComplexMatrix::zeros(dim, dim);
    for e in effects {
        hermiticity = hermiticity.max(linalg::hermiticity_residual(e));
        psd = psd.max((-linalg::min_eigenvalue(e)).max(0.0));
        sum += e;
    }
    sum -= ComplexMatrix::identity(dim, dim);
    let normalization = linalg::hermitian_norm(&sum).max(linalg::max_abs(&(&sum - sum.adjoint())));
    Ok(ValidationReport {
        ok: hermiticity <= cfg.psd_tol && psd <= cfg.psd_tol && normalization <= cfg.norm_tol,
        hermiticity_residual: hermiticity,
        psd_residual: psd,
        normalization_residual: normalization,
    })
}

/// A validated POVM with finitely many outcomes on a `dim`-dimensional space.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretePovm {
    dim: usize,
    effects: Vec<ComplexMatrix>,
    labels: Option<Vec<String>>,
}

impl DiscretePovm {
    /// Validates and stores the effects. Effects are replaced by their
    /// Hermitian parts; asymmetry beyond `psd_tol` is rejected.
    pub fn new(effects: Vec<ComplexMatrix>, cfg: &ToleranceConfig) -> Result<Self> {
        let report = validate_povm(&effects, cfg)?;
        if !report.ok {
            return Err(Error::InvalidPovm(report));
        }
        let dim = effects[0].nrows();
        let effects = effects.iter().map(linalg::hermitize).collect();
        Ok(Self {
            dim,
            effects,
            labels: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.effects.len() {
            return Err(Error::DimensionMismatch {
                expected: self.effects.len(),
                found: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn effects(&self) -> &[ComplexMatrix] {
        &self.effects
    }

    pub fn effect(&self, i: usize) -> Result<&ComplexMatrix> {
        self.effects.get(i).ok_or(Error::OutcomeOutOfRange {
            index: i,
            outcomes: self.effects.len(),
        })
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn num_outcomes(&self) -> usize {
        self.effects.len()
    }

    pub fn into_effects(self) -> Vec<ComplexMatrix> {
        self.effects
    }

    /// Largest entrywise distance between corresponding effects.
    pub fn distance(&self, other: &Self) -> f64 {
        if self.dim != other.dim || self.effects.len() != other.effects.len() {
            return f64::INFINITY;
        }
        self.effects
            .iter()
            .zip(&other.effects)
            .map(|(a, b)| linalg::max_abs(&(a - b)))
            .fold(0.0, f64::max)
    }
}

/// A density operator: Hermitian, PSD, unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityState {
    matrix: ComplexMatrix,
}

impl DensityState {
    pub fn new(matrix: ComplexMatrix, cfg: &ToleranceConfig) -> Result<Self> {
        linalg::ensure_square(&matrix)?;
        let herm = linalg::hermiticity_residual(&matrix);
        if herm > cfg.psd_tol {
            return Err(Error::InvalidState(format!("not Hermitian (residual {herm:.3e})")));
        }
        let min = linalg::min_eigenvalue(&matrix);
        if min < -cfg.psd_tol {
            return Err(Error::InvalidState(format!("not PSD (min eigenvalue {min:.3e})")));
        }
        let tr = linalg::trace(&matrix).re;
        if (tr - 1.0).abs() > cfg.norm_tol {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        Ok(Self {
            matrix: linalg::hermitize(&matrix),
        })
    }

    /// |ψ⟩⟨ψ| for a nonzero vector (normalized here).
    pub fn pure(psi: &ComplexVector) -> Result<Self> {
        let norm = psi.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("zero vector".into()));
        }
        let v = psi.unscale(norm);
        Ok(Self {
            matrix: linalg::outer(&v, &v),
        })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim, dim).unscale(dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }
}

/// tr(A B) without forming the product.
pub(crate) fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
    a.component_mul(&b.transpose()).sum()
}

/// Outcome probabilities tr(ρ M_i), clamped to [0, 1] after the residual
/// checks pass.
pub fn born_probabilities(
    rho: &DensityState,
    povm: &DiscretePovm,
    cfg: &ToleranceConfig,
) -> Result<Vec<f64>> {
    if rho.dim() != povm.dim() {
        return Err(Error::DimensionMismatch {
            expected: povm.dim(),
            found: rho.dim(),
        });
    }
    let raw: Vec<Complex64> = povm
        .effects()
        .iter()
        .map(|e| trace_product(rho.matrix(), e))
        .collect();
    let tol = cfg.psd_tol.max(cfg.norm_tol);
    let total: f64 = raw.iter().map(|p| p.re).sum();
    if let Some(bad) = raw.iter().find(|p| p.im.abs() > tol || p.re < -tol) {
        return Err(Error::InvalidArgument(format!("non-physical probability {bad}")));
    }
    if (total - 1.0).abs() > tol {
        return Err(Error::InvalidArgument(format!("probabilities sum to {total}")));
    }
    Ok(raw.iter().map(|p| p.re.clamp(0.0, 1.0)).collect())
}

/// Convex combination `t·M1 + (1 − t)·M2`, padding the shorter outcome list
/// with zero effects.
pub fn mix(m1: &DiscretePovm, m2: &DiscretePovm, t: f64, cfg: &ToleranceConfig) -> Result<DiscretePovm> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::InvalidArgument(format!("mixing weight must lie in (0, 1), got {t}")));
    }
    if m1.dim() != m2.dim() {
        return Err(Error::DimensionMismatch {
            expected: m1.dim(),
            found: m2.dim(),
        });
    }
    let d = m1.dim();
    let n = m1.num_outcomes().max(m2.num_outcomes());
    let zero = ComplexMatrix::zeros(d, d);
    let effects = (0..n)
        .map(|i| {
            let a = m1.effects.get(i).unwrap_or(&zero);
            let b = m2.effects.get(i).unwrap_or(&zero);
            a.scale(t) + b.scale(1.0 - t)
        })
        .collect();
    let mixed = DiscretePovm::new(effects, cfg)?;
    match m1.labels() {
        Some(l) if l.len() == n => mixed.with_labels(l.to_vec()),
        _ => Ok(mixed),
    }
}

/// Draws `shots` outcomes from the Born distribution with a seeded ChaCha
/// generator and returns per-outcome counts.
pub fn sample_outcomes(
    rho: &DensityState,
    povm: &DiscretePovm,
    shots: usize,
    seed: u64,
    cfg: &ToleranceConfig,
) -> Result<Vec<u64>> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be positive".into()));
    }
    let probs = born_probabilities(rho, povm, cfg)?;
    let dist = WeightedIndex::new(&probs)
        .map_err(|e| Error::InvalidArgument(format!("invalid probability vector: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; probs.len()];
    for _ in 0..shots {
        counts[dist.sample(&mut rng)] += 1;
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families;

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn identity_povm_is_valid_with_zero_residuals() {
        let r = validate_povm(&[ComplexMatrix::identity(2, 2)], &cfg()).unwrap();
        assert!(r.ok);
        assert_eq!(r.hermiticity_residual, 0.0);
        assert_eq!(r.psd_residual, 0.0);
        assert_eq!(r.normalization_residual, 0.0);
    }

    #[test]
    fn projective_measurement_is_valid() {
        let z = families::computational_pvm(2);
        assert!(validate_povm(z.effects(), &cfg()).unwrap().ok);
    }

    #[test]
    fn overcomplete_sum_reports_normalization_residual() {
        let e = ComplexMatrix::identity(2, 2).scale(0.6);
        let r = validate_povm(&[e.clone(), e], &cfg()).unwrap();
        assert!(!r.ok);
        assert!((r.normalization_residual - 0.2).abs() < 1e-12);
        assert!(matches!(
            DiscretePovm::new(vec![ComplexMatrix::identity(2, 2).scale(1.2)], &cfg()),
            Err(Error::InvalidPovm(_))
        ));
    }

    #[test]
    fn structural_errors_are_distinct() {
        let a = ComplexMatrix::identity(2, 2);
        let b = ComplexMatrix::identity(3, 3);
        assert!(matches!(
            validate_povm(&[a, b], &cfg()),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(validate_povm(&[], &cfg()), Err(Error::NoEffects)));
        let rect = ComplexMatrix::zeros(2, 3);
        assert!(matches!(validate_povm(&[rect], &cfg()), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn small_asymmetry_is_symmetrized_large_is_rejected() {
        let mut e0 = ComplexMatrix::zeros(2, 2);
        e0[(0, 0)] = Complex64::new(1.0, 0.0);
        e0[(0, 1)] = Complex64::new(1e-11, 0.0);
        let mut e1 = ComplexMatrix::zeros(2, 2);
        e1[(1, 1)] = Complex64::new(1.0, 0.0);
        let p = DiscretePovm::new(vec![e0.clone(), e1.clone()], &cfg()).unwrap();
        assert_eq!(linalg::hermiticity_residual(&p.effects()[0]), 0.0);

        e0[(0, 1)] = Complex64::new(1e-3, 0.0);
        e1[(0, 1)] = Complex64::new(-1e-3, 0.0);
        assert!(DiscretePovm::new(vec![e0, e1], &cfg()).is_err());
    }

    #[test]
    fn born_on_simple_cases() {
        let z = families::computational_pvm(2);
        let zero = DensityState::pure(&families::basis_vector(2, 0)).unwrap();
        let p = born_probabilities(&zero, &z, &cfg()).unwrap();
        assert_eq!(p, vec![1.0, 0.0]);

        let p = born_probabilities(&DensityState::maximally_mixed(2), &families::trine(), &cfg()).unwrap();
        for x in p {
            assert!((x - 1.0 / 3.0).abs() < 1e-12);
        }

        // |+><+| = [[1/2, 1/2], [1/2, 1/2]]; diagonal entries are the probabilities
        let plus = DensityState::pure(&families::plus_state()).unwrap();
        let p = born_probabilities(&plus, &z, &cfg()).unwrap();
        let hand = [plus.matrix()[(0, 0)].re, plus.matrix()[(1, 1)].re];
        assert!((p[0] - 0.5).abs() < 1e-12 && (p[1] - 0.5).abs() < 1e-12);
        assert!((p[0] - hand[0]).abs() < 1e-15 && (p[1] - hand[1]).abs() < 1e-15);
    }

    #[test]
    fn born_dimension_mismatch() {
        let r = born_probabilities(&DensityState::maximally_mixed(3), &families::trine(), &cfg());
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn mix_of_z_and_x() {
        let z = families::computational_pvm(2);
        let x = families::x_pvm();
        let m = mix(&z, &x, 0.5, &cfg()).unwrap();
        let plus = families::plus_state();
        let minus = families::minus_state();
        let e0 = (families::projector(&families::basis_vector(2, 0)) + families::projector(&plus)).scale(0.5);
        let e1 = (families::projector(&families::basis_vector(2, 1)) + families::projector(&minus)).scale(0.5);
        assert!(linalg::max_abs(&(&m.effects()[0] - e0)) < 1e-15);
        assert!(linalg::max_abs(&(&m.effects()[1] - e1)) < 1e-15);
        assert!(mix(&m, &m, 0.3, &cfg()).unwrap().distance(&m) < 1e-15);
    }

    #[test]
    fn mix_pads_and_rejects_bad_weights() {
        let z = families::computational_pvm(2);
        let trivial = DiscretePovm::new(vec![ComplexMatrix::identity(2, 2)], &cfg()).unwrap();
        let m = mix(&z, &trivial, 0.25, &cfg()).unwrap();
        assert_eq!(m.num_outcomes(), 2);
        assert!(mix(&z, &z, 0.0, &cfg()).is_err());
        assert!(mix(&z, &z, 1.0, &cfg()).is_err());
        assert!(mix(&z, &families::computational_pvm(3), 0.5, &cfg()).is_err());
    }

    #[test]
    fn sampling_zero_probability_and_determinism() {
        let z = families::computational_pvm(2);
        let zero = DensityState::pure(&families::basis_vector(2, 0)).unwrap();
        assert_eq!(sample_outcomes(&zero, &z, 100, 7, &cfg()).unwrap(), vec![100, 0]);

        let rho = DensityState::maximally_mixed(2);
        let t = families::trine();
        let a = sample_outcomes(&rho, &t, 1000, 42, &cfg()).unwrap();
        let b = sample_outcomes(&rho, &t, 1000, 42, &cfg()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.iter().sum::<u64>(), 1000);
        assert!(sample_outcomes(&rho, &t, 0, 42, &cfg()).is_err());
    }

    #[test]
    fn sampling_concentrates_within_five_sigma() {
        let n = 100_000u64;
        let counts = sample_outcomes(
            &DensityState::maximally_mixed(2),
            &families::trine(),
            n as usize,
            2024,
            &cfg(),
        )
        .unwrap();
        let p = 1.0 / 3.0;
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        for c in counts {
            assert!((c as f64 / n as f64 - p).abs() < 5.0 * sigma);
        }
    }

    #[test]
    fn density_state_validation() {
        assert!(DensityState::new(ComplexMatrix::identity(2, 2), &cfg()).is_err());
        assert!(DensityState::new(ComplexMatrix::identity(2, 2).scale(0.5), &cfg()).is_ok());
        let mut m = ComplexMatrix::zeros(2, 2);
        m[(0, 0)] = Complex64::new(1.5, 0.0);
        m[(1, 1)] = Complex64::new(-0.5, 0.0);
        assert!(DensityState::new(m, &cfg()).is_err());
    }
}
