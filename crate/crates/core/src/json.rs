//! Shared JSON encoding: complex scalars as `[re, im]`, matrices as
//! row-major arrays of arrays.
//!
//! Decoding also accepts a bare number for a real entry, which keeps
//! hand-written scenario files short. Encoding always emits pairs.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::operator::ComplexMatrix;
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JsonComplex(pub C64);

impl Serialize for JsonComplex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.0.re, self.0.im].serialize(s)
    }
}

impl<'de> Deserialize<'de> for JsonComplex {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Pair([f64; 2]),
            Real(f64),
        }
        Ok(match Repr::deserialize(d)? {
            Repr::Pair([re, im]) => JsonComplex(C64::new(re, im)),
            Repr::Real(re) => JsonComplex(C64::new(re, 0.0)),
        })
    }
}

/// Row-major matrix in the shared encoding. Shape is not checked until
/// [`JsonMatrix::to_matrix`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct JsonMatrix(pub Vec<Vec<JsonComplex>>);

impl JsonMatrix {
    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let rows: Vec<Vec<C64>> = self
            .0
            .iter()
            .map(|r| r.iter().map(|c| c.0).collect())
            .collect();
        ComplexMatrix::from_rows(&rows)
    }
}

impl From<&ComplexMatrix> for JsonMatrix {
    fn from(m: &ComplexMatrix) -> Self {
        let n = m.dim();
        JsonMatrix(
            (0..n)
                .map(|i| (0..n).map(|j| JsonComplex(m[(i, j)])).collect())
                .collect(),
        )
    }
}

/// A state vector in the shared encoding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct JsonVector(pub Vec<JsonComplex>);

impl JsonVector {
    pub fn to_vec(&self) -> Vec<C64> {
        self.0.iter().map(|c| c.0).collect()
    }
}

pub fn matrix_to_value(m: &ComplexMatrix) -> serde_json::Value {
    serde_json::to_value(JsonMatrix::from(m)).expect("matrix encoding is infallible")
}

pub fn matrix_from_value(v: &serde_json::Value) -> Result<ComplexMatrix> {
    let jm: JsonMatrix =
        serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
    jm.to_matrix()
}
