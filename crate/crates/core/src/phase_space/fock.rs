//! Truncated Fock-space states.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use super::special::ln_factorials;
use crate::error::{Error, Result};
use crate::linalg::ComplexVector;

/// Truncation tail above which state construction is refused.
pub const TAIL_REFUSE: f64 = 1e-6;

/// State vector in the number basis `h_0 … h_{N-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    coeffs: ComplexVector,
    tail_bound: f64,
}

impl FockVector {
    /// Normalizes `coeffs`; `tail_bound` records the ℓ² mass lost to truncation.
    pub fn new(coeffs: ComplexVector, tail_bound: f64) -> Result<Self> {
        let norm = coeffs.norm();
        if coeffs.is_empty() || !norm.is_finite() || norm <= 0.0 {
            return Err(Error::InvalidState("Fock vector must be nonzero".into()));
        }
        Ok(Self {
            coeffs: coeffs.unscale(norm),
            tail_bound,
        })
    }

    pub fn cutoff(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &ComplexVector {
        &self.coeffs
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// Zero-padded copy with a larger cutoff.
    pub fn padded(&self, cutoff: usize) -> Result<Self> {
        if cutoff < self.cutoff() {
            return Err(Error::CutoffTooSmall(format!(
                "cannot shrink a cutoff-{} vector to {cutoff}",
                self.cutoff()
            )));
        }
        let mut coeffs = ComplexVector::zeros(cutoff);
        coeffs.rows_mut(0, self.cutoff()).copy_from(&self.coeffs);
        Ok(Self {
            coeffs,
            tail_bound: self.tail_bound,
        })
    }
}

fn check_tail(tail: f64, what: &str, cutoff: usize) -> Result<()> {
    if tail > TAIL_REFUSE {
        return Err(Error::CutoffTooSmall(format!(
            "{what}: truncation tail {tail:.3e} at cutoff {cutoff} exceeds {TAIL_REFUSE:e}"
        )));
    }
    Ok(())
}

pub fn number_state(n: usize, cutoff: usize) -> Result<FockVector> {
    if n >= cutoff {
        return Err(Error::CutoffTooSmall(format!("h_{n} needs cutoff > {n}, got {cutoff}")));
    }
    let mut c = ComplexVector::zeros(cutoff);
    c[n] = Complex64::new(1.0, 0.0);
    FockVector::new(c, 0.0)
}

/// Exact number-basis components `e^{-|z|²/2} z^n / √n!`, `n < len`, without
/// renormalization.
pub fn coherent_coefficients(z: Complex64, len: usize) -> ComplexVector {
    let x = z.norm_sqr();
    let lf = ln_factorials(len);
    let (r, arg) = (z.norm(), z.arg());
    ComplexVector::from_fn(len, |n, _| {
        if n == 0 {
            return Complex64::new((-x / 2.0).exp(), 0.0);
        }
        if r == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let modulus = (-x / 2.0 + n as f64 * r.ln() - 0.5 * lf[n]).exp();
        Complex64::from_polar(modulus, n as f64 * arg)
    })
}

/// Σ_{k ≥ n} e^{-x} x^k / k!.
pub fn poisson_tail(x: f64, n: usize) -> f64 {
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let mut ln_fact = super::special::ln_factorial(n);
    let mut sum = 0.0;
    let mut k = n;
    loop {
        let term = (-x + k as f64 * x.ln() - ln_fact).exp();
        sum += term;
        if k as f64 > x && (term == 0.0 || term < 1e-18 * sum) || k > n + 100_000 {
            break;
        }
        k += 1;
        ln_fact += (k as f64).ln();
    }
    sum
}

/// η_z = D(z) h_0 truncated to `cutoff` and renormalized.
pub fn coherent_state(z: Complex64, cutoff: usize) -> Result<FockVector> {
    if cutoff == 0 {
        return Err(Error::CutoffTooSmall("cutoff must be positive".into()));
    }
    let tail = poisson_tail(z.norm_sqr(), cutoff);
    check_tail(tail, "coherent state", cutoff)?;
    FockVector::new(coherent_coefficients(z, cutoff), tail)
}

/// Annihilation operator on a `dim`-dimensional truncation.
pub fn annihilation(dim: usize) -> crate::linalg::ComplexMatrix {
    let mut a = crate::linalg::ComplexMatrix::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    a
}

/// D(z0) S(ξ) h_0 with `S(ξ) = exp[(ξ̄ a² − ξ a†²)/2]`, `ξ = r e^{iθ}`.
/// Both exponentials are evaluated on a larger working truncation; the mass
/// left above `cutoff` is the recorded tail.
pub fn squeezed_state(r: f64, theta: f64, displacement: Complex64, cutoff: usize) -> Result<FockVector> {
    if cutoff == 0 {
        return Err(Error::CutoffTooSmall("cutoff must be positive".into()));
    }
    let work = cutoff + cutoff.max(40);
    let a = annihilation(work);
    let ad = a.adjoint();
    let xi = Complex64::from_polar(r, theta);
    let squeeze = ((&a * &a) * xi.conj() - (&ad * &ad) * xi).scale(0.5).exp();
    let shift = (&ad * displacement - &a * displacement.conj()).exp();
    let full = shift * squeeze.column(0);
    let tail = full.rows(cutoff, work - cutoff).norm_squared();
    check_tail(tail, "squeezed state", cutoff)?;
    FockVector::new(full.rows(0, cutoff).into_owned(), tail)
}

/// Something that can produce a state at a requested cutoff.
pub trait StatePreparation {
    fn prepare(&self, cutoff: usize) -> Result<FockVector>;
}

impl StatePreparation for FockVector {
    fn prepare(&self, cutoff: usize) -> Result<FockVector> {
        self.padded(cutoff)
    }
}

/// Built-in named states: `h<n>`, `coherent:<re>,<im>`,
/// `squeezed:<r>,<theta>,<re>,<im>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NamedState {
    Number(usize),
    Coherent(Complex64),
    Squeezed {
        r: f64,
        theta: f64,
        displacement: Complex64,
    },
}

impl StatePreparation for NamedState {
    fn prepare(&self, cutoff: usize) -> Result<FockVector> {
        match *self {
            NamedState::Number(n) => number_state(n, cutoff),
            NamedState::Coherent(z) => coherent_state(z, cutoff),
            NamedState::Squeezed {
                r,
                theta,
                displacement,
            } => squeezed_state(r, theta, displacement, cutoff),
        }
    }
}

impl fmt::Display for NamedState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NamedState::Number(n) => write!(f, "h{n}"),
            NamedState::Coherent(z) => write!(f, "coherent:{},{}", z.re, z.im),
            NamedState::Squeezed {
                r,
                theta,
                displacement,
            } => write!(f, "squeezed:{r},{theta},{},{}", displacement.re, displacement.im),
        }
    }
}

fn parse_floats(s: &str, n: usize) -> Result<Vec<f64>> {
    let vals: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Parse(format!("bad number in {s:?}: {e}")))?;
    if vals.len() != n {
        return Err(Error::Parse(format!("expected {n} comma-separated numbers in {s:?}")));
    }
    Ok(vals)
}

impl FromStr for NamedState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(rest) = s.strip_prefix("coherent:") {
            let v = parse_floats(rest, 2)?;
            return Ok(NamedState::Coherent(Complex64::new(v[0], v[1])));
        }
        if let Some(rest) = s.strip_prefix("squeezed:") {
            let v = parse_floats(rest, 4)?;
            return Ok(NamedState::Squeezed {
                r: v[0],
                theta: v[1],
                displacement: Complex64::new(v[2], v[3]),
            });
        }
        if let Some(n) = s.strip_prefix('h') {
            return n
                .parse()
                .map(NamedState::Number)
                .map_err(|e| Error::Parse(format!("bad number state {s:?}: {e}")));
        }
        Err(Error::Parse(format!(
            "unknown state {s:?} (expected h<n>, coherent:<re>,<im> or squeezed:<r>,<theta>,<re>,<im>)"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn vacuum_is_number_and_coherent() {
        let h0 = number_state(0, 8).unwrap();
        let eta0 = coherent_state(c(0.0, 0.0), 8).unwrap();
        assert_eq!(h0, eta0);
        assert_eq!(squeezed_state(0.0, 0.0, c(0.0, 0.0), 8).unwrap().coeffs(), h0.coeffs());
    }

    #[test]
    fn coherent_first_coefficient() {
        let s = coherent_state(c(1.0, 0.0), 16).unwrap();
        assert!((s.coeffs()[0].re - (-0.5f64).exp()).abs() < 1e-12);
        assert!((s.coeffs()[0].re - 0.60653).abs() < 1e-5);
        assert!(s.tail_bound() < 1e-8);
    }

    #[test]
    fn coherent_matches_matrix_exponential() {
        let z = c(0.8, -0.6);
        let work = 60;
        let a = annihilation(work);
        let gen = &a.adjoint() * z - &a * z.conj();
        let oracle = gen.exp().column(0).into_owned();
        let s = coherent_state(z, 20).unwrap();
        for n in 0..20 {
            assert!((s.coeffs()[n] - oracle[n]).norm() < 1e-12);
        }
    }

    #[test]
    fn squeezed_vacuum_matches_closed_form() {
        // S(ξ)|0> = (cosh r)^{-1/2} Σ_n (−e^{iθ} tanh r)^n √((2n)!)/(2^n n!) |2n>
        let (r, theta) = (0.5, 0.7);
        let s = squeezed_state(r, theta, c(0.0, 0.0), 40).unwrap();
        let lf = ln_factorials(41);
        let ratio = Complex64::from_polar(-r.tanh(), theta);
        for n in 0..20 {
            let mag = (0.5 * lf[2 * n] - n as f64 * 2f64.ln() - lf[n]).exp();
            let expect = ratio.powu(n as u32) * mag / r.cosh().sqrt();
            assert!((s.coeffs()[2 * n] - expect).norm() < 1e-10, "n={n}");
            assert!(s.coeffs()[2 * n + 1].norm() < 1e-12);
        }
    }

    #[test]
    fn small_cutoff_is_refused() {
        assert!(matches!(coherent_state(c(3.0, 0.0), 10), Err(Error::CutoffTooSmall(_))));
        assert!(matches!(number_state(5, 5), Err(Error::CutoffTooSmall(_))));
        assert!(squeezed_state(1.5, 0.0, c(0.0, 0.0), 8).is_err());
    }

    #[test]
    fn poisson_tail_values() {
        assert!((poisson_tail(1.0, 0) - 1.0).abs() < 1e-12);
        // 1 − e^{-1}(1 + 1) for n = 2
        assert!((poisson_tail(1.0, 2) - (1.0 - 2.0 * (-1.0f64).exp())).abs() < 1e-12);
        assert_eq!(poisson_tail(0.0, 3), 0.0);
    }

    #[test]
    fn named_state_parsing() {
        assert_eq!("h3".parse::<NamedState>().unwrap(), NamedState::Number(3));
        assert_eq!(
            "coherent:1,0.5".parse::<NamedState>().unwrap(),
            NamedState::Coherent(c(1.0, 0.5))
        );
        let s: NamedState = "squeezed:0.5,0,0,0".parse().unwrap();
        assert_eq!(s.to_string().parse::<NamedState>().unwrap(), s);
        assert!("vacuum".parse::<NamedState>().is_err());
        assert!("coherent:1".parse::<NamedState>().is_err());
    }
}
