//! Named POVM families and random generators used by tests, examples and the
//! CLI.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{self, ComplexMatrix, ComplexVector, HermitianEigen};
use crate::povm::{DiscretePovm, ToleranceConfig};

pub fn basis_vector(dim: usize, i: usize) -> ComplexVector {
    let mut v = ComplexVector::zeros(dim);
    v[i] = linalg::ONE;
    v
}

pub fn plus_state() -> ComplexVector {
    let s = 0.5_f64.sqrt();
    ComplexVector::from_vec(vec![Complex64::new(s, 0.0), Complex64::new(s, 0.0)])
}

pub fn minus_state() -> ComplexVector {
    let s = 0.5_f64.sqrt();
    ComplexVector::from_vec(vec![Complex64::new(s, 0.0), Complex64::new(-s, 0.0)])
}

/// |v⟩⟨v| (no normalization).
pub fn projector(v: &ComplexVector) -> ComplexMatrix {
    linalg::outer(v, v)
}

/// Rank-1 PVM built from the columns of a unitary.
pub fn pvm_from_unitary(u: &ComplexMatrix) -> DiscretePovm {
    let effects = u
        .column_iter()
        .map(|c| projector(&c.into_owned()))
        .collect();
    DiscretePovm::new(effects, &ToleranceConfig::default()).expect("unitary columns form a PVM")
}

pub fn computational_pvm(dim: usize) -> DiscretePovm {
    pvm_from_unitary(&ComplexMatrix::identity(dim, dim))
}

pub fn x_pvm() -> DiscretePovm {
    let effects = vec![projector(&plus_state()), projector(&minus_state())];
    DiscretePovm::new(effects, &ToleranceConfig::default()).expect("X basis is a PVM")
}

/// Three effects (2/3)|v_i⟩⟨v_i| with real unit vectors at 120° spacing.
pub fn trine() -> DiscretePovm {
    let effects = (0..3)
        .map(|i| {
            let theta = 2.0 * PI * i as f64 / 3.0;
            let v = ComplexVector::from_vec(vec![
                Complex64::new(theta.cos(), 0.0),
                Complex64::new(theta.sin(), 0.0),
            ]);
            projector(&v).scale(2.0 / 3.0)
        })
        .collect();
    DiscretePovm::new(effects, &ToleranceConfig::default()).expect("trine is a POVM")
}

/// Qubit effect `weight · (I + r·σ)/2` for a Bloch vector `r`.
pub fn bloch_effect(r: [f64; 3], weight: f64) -> ComplexMatrix {
    let [x, y, z] = r;
    ComplexMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(1.0 + z, 0.0),
            Complex64::new(x, -y),
            Complex64::new(x, y),
            Complex64::new(1.0 - z, 0.0),
        ],
    )
    .scale(0.5 * weight)
}

/// Four effects (1/2)|w_j⟩⟨w_j| with Bloch vectors on the vertices of a
/// regular tetrahedron.
pub fn tetrahedral() -> DiscretePovm {
    let s = 1.0 / 3.0_f64.sqrt();
    let vertices = [[s, s, s], [s, -s, -s], [-s, s, -s], [-s, -s, s]];
    let effects = vertices.iter().map(|&r| bloch_effect(r, 0.5)).collect();
    DiscretePovm::new(effects, &ToleranceConfig::default()).expect("tetrahedral POVM")
}

/// Ginibre matrix with i.i.d. standard complex normal entries.
pub fn random_complex<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar-random unitary via QR of a Ginibre matrix with phase correction.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let qr = random_complex(dim, dim, rng).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { linalg::ONE };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// (A)^(-1/2) of a positive definite Hermitian matrix.
pub fn inverse_sqrt(a: &ComplexMatrix) -> ComplexMatrix {
    let eig = HermitianEigen::new(a, 0.0);
    let n = a.nrows();
    let mut out = ComplexMatrix::zeros(n, n);
    for (val, v) in eig.values.iter().zip(&eig.vectors) {
        out += linalg::outer(v, v).scale(1.0 / val.sqrt());
    }
    out
}

/// Random POVM with the given effect ranks: effects S^(-1/2) X_i X_i† S^(-1/2)
/// where S = Σ X_i X_i†. Requires Σ ranks ≥ dim.
pub fn random_povm_with_ranks<R: Rng + ?Sized>(dim: usize, ranks: &[usize], rng: &mut R) -> DiscretePovm {
    assert!(ranks.iter().sum::<usize>() >= dim, "ranks must cover the space");
    let raw: Vec<ComplexMatrix> = ranks
        .iter()
        .map(|&r| {
            let x = random_complex(dim, r, rng);
            &x * x.adjoint()
        })
        .collect();
    let total = raw.iter().fold(ComplexMatrix::zeros(dim, dim), |acc, g| acc + g);
    let w = inverse_sqrt(&total);
    let effects = raw.iter().map(|g| linalg::hermitize(&(&w * g * &w))).collect();
    DiscretePovm::new(effects, &ToleranceConfig::default()).expect("normalized random POVM")
}

/// Random POVM with `outcomes` outcomes and random effect ranks in `1..=dim`.
pub fn random_povm<R: Rng + ?Sized>(dim: usize, outcomes: usize, rng: &mut R) -> DiscretePovm {
    loop {
        let ranks: Vec<usize> = (0..outcomes).map(|_| rng.gen_range(1..=dim)).collect();
        if ranks.iter().sum::<usize>() >= dim {
            return random_povm_with_ranks(dim, &ranks, rng);
        }
    }
}
