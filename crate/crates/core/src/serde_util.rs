//! Serialization of nalgebra values as plain JSON arrays.

use nalgebra::{DMatrix, DVector};
use serde::ser::{SerializeSeq, Serializer};

pub fn vectors<S: Serializer>(value: &[DVector<f64>], serializer: S) -> Result<S::Ok, S::Error> {
    let mut seq = serializer.serialize_seq(Some(value.len()))?;
    for v in value {
        seq.serialize_element(v.as_slice())?;
    }
    seq.end()
}

pub fn matrix<S: Serializer>(value: &DMatrix<f64>, serializer: S) -> Result<S::Ok, S::Error> {
    let mut seq = serializer.serialize_seq(Some(value.nrows()))?;
    for row in value.row_iter() {
        let row: Vec<f64> = row.iter().copied().collect();
        seq.serialize_element(&row)?;
    }
    seq.end()
}
