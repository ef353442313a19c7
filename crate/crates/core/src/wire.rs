//! JSON wire formats. Complex numbers are always `[re, im]` arrays, vectors are
//! arrays of those, matrices are arrays of rows.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{CMatrix, CVector, RMatrix, RVector, C64};

pub fn to_pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn from_pair(p: [f64; 2]) -> C64 {
    C64::new(p[0], p[1])
}

pub fn vec_to_pairs(v: &CVector) -> Vec<[f64; 2]> {
    v.iter().map(|&z| to_pair(z)).collect()
}

pub fn pairs_to_vec(p: &[[f64; 2]]) -> CVector {
    CVector::from_iterator(p.len(), p.iter().map(|&q| from_pair(q)))
}

fn rows_of<T: nalgebra::Scalar + Copy, U>(m: &nalgebra::DMatrix<T>, f: impl Fn(T) -> U) -> Vec<Vec<U>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| f(m[(i, j)])).collect())
        .collect()
}

fn from_rows<T: nalgebra::Scalar + Copy, U: Copy, E: serde::de::Error>(
    rows: Vec<Vec<U>>,
    f: impl Fn(U) -> T,
) -> Result<nalgebra::DMatrix<T>, E> {
    let nr = rows.len();
    let nc = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != nc) {
        return Err(E::custom("ragged matrix rows"));
    }
    Ok(nalgebra::DMatrix::from_fn(nr, nc, |i, j| f(rows[i][j])))
}

pub mod complex {
    use super::*;
    pub fn serialize<S: Serializer>(z: &C64, s: S) -> Result<S::Ok, S::Error> {
        to_pair(*z).serialize(s)
    }
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<C64, D::Error> {
        Ok(from_pair(<[f64; 2]>::deserialize(d)?))
    }
}

pub mod complex_vec {
    use super::*;
    pub fn serialize<S: Serializer>(v: &CVector, s: S) -> Result<S::Ok, S::Error> {
        vec_to_pairs(v).serialize(s)
    }
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CVector, D::Error> {
        Ok(pairs_to_vec(&Vec::<[f64; 2]>::deserialize(d)?))
    }
}

pub mod complex_matrix {
    use super::*;
    pub fn serialize<S: Serializer>(m: &CMatrix, s: S) -> Result<S::Ok, S::Error> {
        rows_of(m, to_pair).serialize(s)
    }
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CMatrix, D::Error> {
        from_rows(Vec::<Vec<[f64; 2]>>::deserialize(d)?, from_pair)
    }
}

pub mod complex_vec_list {
    use super::*;
    pub fn serialize<S: Serializer>(v: &[CVector], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(vec_to_pairs).collect::<Vec<_>>().serialize(s)
    }
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<CVector>, D::Error> {
        Ok(Vec::<Vec<[f64; 2]>>::deserialize(d)?
            .iter()
            .map(|p| pairs_to_vec(p))
            .collect())
    }
}

pub mod real_vec {
    use super::*;
    pub fn serialize<S: Serializer>(v: &RVector, s: S) -> Result<S::Ok, S::Error> {
        v.as_slice().serialize(s)
    }
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<RVector, D::Error> {
        Ok(RVector::from_vec(Vec::<f64>::deserialize(d)?))
    }
}

pub mod real_matrix {
    use super::*;
    pub fn serialize<S: Serializer>(m: &RMatrix, s: S) -> Result<S::Ok, S::Error> {
        rows_of(m, |x| x).serialize(s)
    }
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<RMatrix, D::Error> {
        from_rows(Vec::<Vec<f64>>::deserialize(d)?, |x| x)
    }
}

/// A point on the wire: `{"z": [[re, im], …], "zeta": [[re, im], …]}`. Plain
/// base-domain points omit `zeta` (or leave it empty).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WirePoint {
    #[serde(with = "complex_vec")]
    pub z: CVector,
    #[serde(with = "complex_vec", default = "empty")]
    pub zeta: CVector,
}

fn empty() -> CVector {
    CVector::zeros(0)
}

/// `{value, grad, hess}` record for kernel jets.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WireJet {
    pub value: f64,
    #[serde(with = "complex_vec")]
    pub grad: CVector,
    #[serde(with = "complex_matrix")]
    pub hess: CMatrix,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_round_trip() {
        let p = WirePoint {
            z: CVector::from_vec(vec![C64::new(0.5, -0.25)]),
            zeta: CVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 2.0)]),
        };
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"z":[[0.5,-0.25]],"zeta":[[1.0,0.0],[0.0,2.0]]}"#);
        let q: WirePoint = serde_json::from_str(&s).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn zeta_defaults_to_empty() {
        let q: WirePoint = serde_json::from_str(r#"{"z":[[0,1]]}"#).unwrap();
        assert_eq!(q.zeta.len(), 0);
    }
}
