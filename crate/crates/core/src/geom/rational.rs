//! Exact rational linear algebra for intersection matrices.

use std::fmt;
use std::ops::Mul;

use num::{BigRational, One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json::{format_rational, parse_rational};

/// Dense row-major matrix over ℚ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix { rows, cols, data: vec![BigRational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigRational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged matrix rows".into()));
        }
        Ok(RationalMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Result<Self> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect()).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    /// Gauss–Jordan elimination with partial pivoting on the first nonzero
    /// entry (exact, so any nonzero pivot will do).
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(format!("{}x{} matrix has no inverse", self.rows, self.cols)));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[(r, col)].is_zero()).ok_or(Error::SingularMatrix)?;
            a.swap_rows(col, pivot);
            inv.swap_rows(col, pivot);
            let p = a[(col, col)].clone();
            for j in 0..n {
                a[(col, j)] = &a[(col, j)] / &p;
                inv[(col, j)] = &inv[(col, j)] / &p;
            }
            for r in 0..n {
                if r == col || a[(r, col)].is_zero() {
                    continue;
                }
                let f = a[(r, col)].clone();
                for j in 0..n {
                    let da = &f * &a[(col, j)];
                    a[(r, j)] -= da;
                    let di = &f * &inv[(col, j)];
                    inv[(r, j)] -= di;
                }
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| num::ToPrimitive::to_f64(&self[(i, j)]).unwrap_or(f64::NAN)).collect())
            .collect()
    }

    pub fn max_abs(&self) -> BigRational {
        self.data.iter().map(|x| x.abs()).max().unwrap_or_else(BigRational::zero)
    }
}

impl std::ops::Index<(usize, usize)> for RationalMatrix {
    type Output = BigRational;
    fn index(&self, (i, j): (usize, usize)) -> &BigRational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RationalMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigRational {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &RationalMatrix {
    type Output = RationalMatrix;
    fn mul(self, rhs: &RationalMatrix) -> RationalMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = RationalMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self[(i, k)].is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let p = &self[(i, k)] * &rhs[(k, j)];
                    out[(i, j)] += p;
                }
            }
        }
        out
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", format_rational(&self[(i, j)]))?;
            }
        }
        write!(f, "]")
    }
}

impl Serialize for RationalMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> =
            (0..self.rows).map(|i| (0..self.cols).map(|j| format_rational(&self[(i, j)])).collect()).collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Cell {
            Int(i64),
            Str(String),
        }
        let rows = Vec::<Vec<Cell>>::deserialize(d)?;
        let rows = rows
            .into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|c| match c {
                        Cell::Int(i) => Ok(BigRational::from_integer(i.into())),
                        Cell::Str(s) => parse_rational(&s).ok_or_else(|| format!("bad rational {s:?}")),
                    })
                    .collect::<std::result::Result<Vec<_>, _>>()
            })
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(serde::de::Error::custom)?;
        RationalMatrix::from_rows(rows).map_err(serde::de::Error::custom)
    }
}

/// Dual-basis coefficients `(Mᵀ)⁻¹`.
pub fn dual_pairing_matrix(m: &RationalMatrix) -> Result<RationalMatrix> {
    m.transpose().inverse()
}

/// Coefficient of a corner in the iterated partial boundary of `[0,1]ⁿ`.
///
/// `faces` lists `(coordinate, at_one)` in the order the boundaries are
/// taken, coordinates being labels of the original cube. With the remaining
/// coordinates numbered from 1, the face `z_p = 1` carries `(−1)^{p+1}` and
/// `z_p = 0` carries `(−1)^p`.
pub fn hypercube_face_coefficient(n: usize, faces: &[(usize, bool)]) -> Result<i64> {
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut coeff = 1i64;
    for &(k, one) in faces {
        let pos = remaining
            .iter()
            .position(|&r| r == k)
            .ok_or_else(|| Error::Input(format!("coordinate {k} is not available")))?;
        remaining.remove(pos);
        let p = pos + 1;
        let exp = if one { p + 1 } else { p };
        if exp % 2 == 1 {
            coeff = -coeff;
        }
    }
    Ok(coeff)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigInt;
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> RationalMatrix {
        RationalMatrix::from_i64(rows).unwrap()
    }

    #[test]
    fn small_duals() {
        assert_eq!(dual_pairing_matrix(&m(&[&[1, 0], &[0, -1]])).unwrap(), m(&[&[1, 0], &[0, -1]]));
        assert_eq!(dual_pairing_matrix(&m(&[&[0, 1], &[1, 0]])).unwrap(), m(&[&[0, 1], &[1, 0]]));
        let half = dual_pairing_matrix(&m(&[&[2]])).unwrap();
        assert_eq!(half[(0, 0)], BigRational::new(BigInt::from(1), BigInt::from(2)));
        assert_eq!(dual_pairing_matrix(&m(&[&[1, 2], &[2, 4]])), Err(Error::SingularMatrix));
    }

    #[test]
    fn cube_corner_all_ones_is_positive() {
        for n in 1..=4 {
            let faces: Vec<(usize, bool)> = (0..n).map(|k| (k, true)).collect();
            assert_eq!(hypercube_face_coefficient(n, &faces).unwrap(), 1);
        }
        assert_eq!(hypercube_face_coefficient(1, &[(0, false)]).unwrap(), -1);
    }

    #[test]
    fn json_cells() {
        let a: RationalMatrix = serde_json::from_str(r#"[["1/2", 3], ["-4", "0"]]"#).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), r#"[["1/2","3"],["-4","0"]]"#);
    }

    fn arb_matrix() -> impl Strategy<Value = RationalMatrix> {
        (1usize..=6).prop_flat_map(|n| {
            prop::collection::vec((-9i64..=9, 1i64..=5), n * n).prop_map(move |cells| {
                let rows = cells
                    .chunks(n)
                    .map(|r| r.iter().map(|&(p, q)| BigRational::new(p.into(), q.into())).collect())
                    .collect();
                RationalMatrix::from_rows(rows).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn dual_times_matrix_is_identity(a in arb_matrix()) {
            match dual_pairing_matrix(&a) {
                Ok(c) => prop_assert_eq!(&c.transpose() * &a, RationalMatrix::identity(a.rows())),
                Err(e) => prop_assert_eq!(e, Error::SingularMatrix),
            }
        }
    }
}
