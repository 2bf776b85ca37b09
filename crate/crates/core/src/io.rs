//! JSON encodings of POVMs, states and operators, and CSV emission.
//!
//! Matrices are row-major arrays of rows; each complex entry is `[re, im]`.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ComplexVector};
use crate::povm::{DensityState, DiscretePovm, ToleranceConfig};

pub type JsonMatrix = Vec<Vec<[f64; 2]>>;

pub fn encode_matrix(m: &ComplexMatrix) -> JsonMatrix {
    m.row_iter()
        .map(|row| row.iter().map(|c| [c.re, c.im]).collect())
        .collect()
}

pub fn encode_vector(v: &ComplexVector) -> Vec<[f64; 2]> {
    v.iter().map(|c| [c.re, c.im]).collect()
}

/// Decodes a square matrix, rejecting ragged rows and shape mismatches
/// against `dim`.
pub fn decode_matrix(rows: &JsonMatrix, dim: usize, what: &str) -> Result<ComplexMatrix> {
    if rows.len() != dim {
        return Err(Error::Parse(format!("{what}: {} rows, expected {dim}", rows.len())));
    }
    for (i, r) in rows.iter().enumerate() {
        if r.len() != dim {
            return Err(Error::Parse(format!(
                "{what}: row {i} has {} entries, expected {dim}",
                r.len()
            )));
        }
    }
    Ok(ComplexMatrix::from_fn(dim, dim, |i, j| {
        let [re, im] = rows[i][j];
        Complex64::new(re, im)
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PovmFile {
    pub dim: usize,
    pub effects: Vec<JsonMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl PovmFile {
    pub fn from_povm(povm: &DiscretePovm) -> Self {
        Self {
            dim: povm.dim(),
            effects: povm.effects().iter().map(encode_matrix).collect(),
            labels: povm.labels().map(<[String]>::to_vec),
        }
    }

    pub fn effects(&self) -> Result<Vec<ComplexMatrix>> {
        self.effects
            .iter()
            .enumerate()
            .map(|(i, e)| decode_matrix(e, self.dim, &format!("effect {i}")))
            .collect()
    }

    pub fn into_povm(self, cfg: &ToleranceConfig) -> Result<DiscretePovm> {
        let effects = self.effects()?;
        let povm = DiscretePovm::new(effects, cfg)?;
        match self.labels {
            Some(l) => povm.with_labels(l),
            None => Ok(povm),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub dim: usize,
    pub rho: JsonMatrix,
}

impl StateFile {
    pub fn from_state(state: &DensityState) -> Self {
        Self {
            dim: state.dim(),
            rho: encode_matrix(state.matrix()),
        }
    }

    pub fn into_state(self, cfg: &ToleranceConfig) -> Result<DensityState> {
        DensityState::new(decode_matrix(&self.rho, self.dim, "rho")?, cfg)
    }
}

/// A single operator, used for covariant seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorFile {
    pub dim: usize,
    pub matrix: JsonMatrix,
}

impl OperatorFile {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        Self {
            dim: m.nrows(),
            matrix: encode_matrix(m),
        }
    }

    pub fn matrix(&self) -> Result<ComplexMatrix> {
        decode_matrix(&self.matrix, self.dim, "matrix")
    }
}

/// Parses JSON; syntax errors carry serde_json's line and column.
pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    Ok(serde_json::from_str(text)?)
}

pub fn read_povm(text: &str, cfg: &ToleranceConfig) -> Result<DiscretePovm> {
    parse_json::<PovmFile>(text)?.into_povm(cfg)
}

pub fn read_state(text: &str, cfg: &ToleranceConfig) -> Result<DensityState> {
    parse_json::<StateFile>(text)?.into_state(cfg)
}

pub fn povm_to_json(povm: &DiscretePovm) -> Result<String> {
    Ok(serde_json::to_string_pretty(&PovmFile::from_povm(povm))?)
}

pub const CSV_HEADER: &str = "re_z,im_z,value_re,value_im";

/// Writes `re_z,im_z,value_re,value_im` rows with 17 significant digits.
pub fn write_csv<W: Write>(out: &mut W, rows: &[(Complex64, Complex64)]) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for (z, v) in rows {
        writeln!(out, "{:.16e},{:.16e},{:.16e},{:.16e}", z.re, z.im, v.re, v.im)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families;

    #[test]
    fn trine_round_trip() {
        let cfg = ToleranceConfig::default();
        let t = families::trine();
        let back = read_povm(&povm_to_json(&t).unwrap(), &cfg).unwrap();
        assert_eq!(back.distance(&t), 0.0);
    }

    #[test]
    fn ragged_and_nonsquare_rejected() {
        let cfg = ToleranceConfig::default();
        let ragged = r#"{"dim": 2, "effects": [[[[1,0],[0,0]],[[0,0]]]]}"#;
        assert!(matches!(read_povm(ragged, &cfg), Err(Error::Parse(_))));
        let wide = r#"{"dim": 1, "effects": [[[[1,0],[0,0]]]]}"#;
        assert!(matches!(read_povm(wide, &cfg), Err(Error::Parse(_))));
    }

    #[test]
    fn syntax_errors_report_position() {
        let cfg = ToleranceConfig::default();
        let err = read_povm("{\n  \"dim\": 2,\n  \"effects\": [}\n", &cfg).unwrap_err().to_string();
        assert!(err.contains("line 3"), "{err}");
        assert!(err.contains("column"), "{err}");
    }

    #[test]
    fn csv_has_seventeen_digits() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &[(Complex64::new(0.1, 0.0), Complex64::new(1.0 / 3.0, -2.0))]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let row = text.lines().nth(1).unwrap();
        let first: f64 = row.split(',').next().unwrap().parse().unwrap();
        assert_eq!(first, 0.1);
        assert!(row.contains("3.3333333333333331e-1"));
    }
}
