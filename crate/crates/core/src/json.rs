//! JSON shapes shared by every report.
//!
//! Complex scalars serialize as `{"re": x, "im": y}`, complex vectors as
//! `{"re": [..], "im": [..]}` and complex matrices as `{"re": [[..]], "im": [[..]]}`.
//! The helpers below are meant for `#[serde(with = "...")]`.

use nalgebra::DMatrix;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::C64;

#[derive(Serialize, Deserialize)]
struct ComplexRepr {
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct VectorRepr {
    re: Vec<f64>,
    im: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

pub mod complex {
    use super::*;

    pub fn serialize<S: Serializer>(z: &C64, s: S) -> Result<S::Ok, S::Error> {
        ComplexRepr { re: z.re, im: z.im }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<C64, D::Error> {
        let r = ComplexRepr::deserialize(d)?;
        Ok(C64::new(r.re, r.im))
    }
}

pub mod complex_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[C64], s: S) -> Result<S::Ok, S::Error> {
        VectorRepr {
            re: v.iter().map(|z| z.re).collect(),
            im: v.iter().map(|z| z.im).collect(),
        }
        .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<C64>, D::Error> {
        let r = VectorRepr::deserialize(d)?;
        if r.re.len() != r.im.len() {
            return Err(serde::de::Error::custom("re/im length mismatch"));
        }
        Ok(r.re.into_iter().zip(r.im).map(|(a, b)| C64::new(a, b)).collect())
    }
}

pub mod matrix {
    use super::*;

    pub fn serialize<S: Serializer>(m: &DMatrix<C64>, s: S) -> Result<S::Ok, S::Error> {
        let rows = |f: fn(&C64) -> f64| {
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect())
                .collect()
        };
        MatrixRepr { re: rows(|z| z.re), im: rows(|z| z.im) }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DMatrix<C64>, D::Error> {
        let r = MatrixRepr::deserialize(d)?;
        from_parts(&r.re, &r.im).map_err(serde::de::Error::custom)
    }

    pub(crate) fn from_parts(re: &[Vec<f64>], im: &[Vec<f64>]) -> Result<DMatrix<C64>, String> {
        let nrows = re.len();
        let ncols = re.first().map_or(0, Vec::len);
        if im.len() != nrows
            || re.iter().chain(im.iter()).any(|row| row.len() != ncols)
        {
            return Err("ragged or mismatched re/im matrix".into());
        }
        Ok(DMatrix::from_fn(nrows, ncols, |i, j| C64::new(re[i][j], im[i][j])))
    }
}

/// A complex matrix literal, as accepted on the command line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixLiteral(#[serde(with = "matrix")] pub DMatrix<C64>);
