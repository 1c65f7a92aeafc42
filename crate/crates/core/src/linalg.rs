//! Exact rational matrices, integer nullspace bases and the factorization of
//! one formula family through another.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::enumeration::DiagramBasis;
use crate::relators::RelatorSystem;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix v v^T is singular")]
    RankDeficient,
    #[error("rows of w are not in the row space of v")]
    NotInRowSpace { residual: RationalMatrix },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigRational>,
}

fn q(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> RationalMatrix {
        RationalMatrix { rows, cols, entries: vec![BigRational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> RationalMatrix {
        let mut m = RationalMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigRational::one());
        }
        m
    }

    /// Rows of equal length; an empty slice gives a 0 x `cols` matrix.
    pub fn from_integer_rows(rows: &[Vec<i64>], cols: usize) -> Result<RationalMatrix, LinalgError> {
        let mut m = RationalMatrix::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(LinalgError::DimensionMismatch(format!("row {} has {} entries, expected {}", i, row.len(), cols)));
            }
            for (j, &x) in row.iter().enumerate() {
                m.set(i, j, q(x));
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: BigRational) {
        self.entries[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[BigRational] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> RationalMatrix {
        let mut t = RationalMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &RationalMatrix) -> Result<RationalMatrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = RationalMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let v = out.get(i, j) + a * b;
                        out.set(i, j, v);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &RationalMatrix) -> Result<RationalMatrix, LinalgError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::DimensionMismatch("sub".into()));
        }
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect();
        Ok(RationalMatrix { rows: self.rows, cols: self.cols, entries })
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|x| x.is_zero())
    }

    pub fn is_integral(&self) -> bool {
        self.entries.iter().all(|x| x.is_integer())
    }

    /// Entries as `i64` when all are small integers.
    pub fn to_integer_rows(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|x| if x.is_integer() { x.to_integer().to_i64() } else { None }).collect())
            .collect()
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (RationalMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else { continue };
            m.swap_rows(r, p);
            let inv = m.get(r, c).recip();
            for j in 0..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c).clone();
                for j in 0..m.cols {
                    let v = m.get(i, j) - &f * m.get(r, j);
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn inverse(&self) -> Option<RationalMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug = RationalMatrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, BigRational::one());
        }
        let (red, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = RationalMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, red.get(i, n + j).clone());
            }
        }
        Some(inv)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.rows {
            let line: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_csv())
    }
}

/// Linearly independent primitive integer vectors in reduced echelon form,
/// each with positive leading entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerVectorBasis {
    dim: usize,
    vectors: Vec<Vec<i64>>,
}

fn primitive(row: &[BigRational]) -> Vec<i64> {
    let den = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = row.iter().map(|x| (x * BigRational::from_integer(den.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    let lead_negative = ints.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative());
    ints.iter()
        .map(|x| {
            let mut v = if g.is_zero() { x.clone() } else { x / &g };
            if lead_negative {
                v = -v;
            }
            v.to_i64().expect("nullspace entries fit in i64")
        })
        .collect()
}

impl IntegerVectorBasis {
    /// Echelonizes the span of `rows` (each of length `dim`).
    pub fn span(rows: &[Vec<i64>], dim: usize) -> Result<IntegerVectorBasis, LinalgError> {
        let m = RationalMatrix::from_integer_rows(rows, dim)?;
        let (red, pivots) = m.rref();
        let vectors = (0..pivots.len()).map(|i| primitive(red.row(i))).collect();
        Ok(IntegerVectorBasis { dim, vectors })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[Vec<i64>] {
        &self.vectors
    }

    pub fn as_matrix(&self) -> RationalMatrix {
        RationalMatrix::from_integer_rows(&self.vectors, self.dim).expect("vectors have length dim")
    }

    pub fn contains_vector(&self, v: &[i64]) -> Result<bool, LinalgError> {
        if v.len() != self.dim {
            return Err(LinalgError::DimensionMismatch(format!("vector of length {} in dimension {}", v.len(), self.dim)));
        }
        let mut rows = self.vectors.clone();
        rows.push(v.to_vec());
        Ok(RationalMatrix::from_integer_rows(&rows, self.dim)?.rank() == self.vectors.len())
    }

    /// Splits the span into vectors led by a `first` column and the rest,
    /// which vanish on every `first` column.
    pub fn split_by_columns(&self, first: &[usize]) -> (IntegerVectorBasis, IntegerVectorBasis) {
        let mut order: Vec<usize> = first.to_vec();
        order.extend((0..self.dim).filter(|c| !first.contains(c)));
        let permuted: Vec<Vec<i64>> = self.vectors.iter().map(|v| order.iter().map(|&c| v[c]).collect()).collect();
        let m = RationalMatrix::from_integer_rows(&permuted, self.dim).expect("vectors have length dim");
        let (red, pivots) = m.rref();
        let mut lead = Vec::new();
        let mut rest = Vec::new();
        for (i, &p) in pivots.iter().enumerate() {
            let mut v = vec![0i64; self.dim];
            for (k, x) in primitive(red.row(i)).into_iter().enumerate() {
                v[order[k]] = x;
            }
            if p < first.len() {
                lead.push(v);
            } else {
                rest.push(v);
            }
        }
        (
            IntegerVectorBasis::span(&lead, self.dim).expect("length dim"),
            IntegerVectorBasis::span(&rest, self.dim).expect("length dim"),
        )
    }
}

/// Basis of `{a : a^T m = 0}`.
pub fn left_nullspace(m: &RationalMatrix) -> IntegerVectorBasis {
    let t = m.transpose();
    let (red, pivots) = t.rref();
    let n = t.cols();
    let mut rows = Vec::new();
    for f in (0..n).filter(|c| !pivots.contains(c)) {
        let mut v = vec![BigRational::zero(); n];
        v[f] = BigRational::one();
        for (i, &p) in pivots.iter().enumerate() {
            v[p] = -red.get(i, f).clone();
        }
        rows.push(primitive(&v));
    }
    IntegerVectorBasis::span(&rows, n).expect("length n")
}

pub fn rank(m: &RationalMatrix) -> usize {
    m.rank()
}

/// Every vector of `b` lies in the span of `a`.
pub fn contains_subspace(a: &IntegerVectorBasis, b: &IntegerVectorBasis) -> Result<bool, LinalgError> {
    if a.dim != b.dim {
        return Err(LinalgError::DimensionMismatch(format!("{} vs {}", a.dim, b.dim)));
    }
    let mut rows = a.vectors.clone();
    rows.extend(b.vectors.iter().cloned());
    Ok(RationalMatrix::from_integer_rows(&rows, a.dim)?.rank() == a.as_matrix().rank())
}

/// `v^T (v v^T)^-1`.
pub fn pseudo_inverse(v: &RationalMatrix) -> Result<RationalMatrix, LinalgError> {
    let vt = v.transpose();
    let gram = v.mul(&vt)?;
    let inv = gram.inverse().ok_or(LinalgError::RankDeficient)?;
    vt.mul(&inv)
}

/// The unique `a` with `a v = w` for `v` of full row rank.
pub fn solve_factorization(v: &RationalMatrix, w: &RationalMatrix) -> Result<RationalMatrix, LinalgError> {
    if v.cols() != w.cols() {
        return Err(LinalgError::DimensionMismatch(format!("v has {} columns, w has {}", v.cols(), w.cols())));
    }
    let a = w.mul(&pseudo_inverse(v)?)?;
    let residual = a.mul(v)?.sub(w)?;
    if !residual.is_zero() {
        return Err(LinalgError::NotInRowSpace { residual });
    }
    Ok(a)
}

/// `M[i][j]` is the pairing of basis entry `i` with relator `j`.
pub fn build_system(basis: &DiagramBasis, rs: &RelatorSystem) -> RationalMatrix {
    let cols = crate::relators::columns(basis, rs.relators());
    let mut m = RationalMatrix::zeros(basis.len(), cols.len());
    for (j, col) in cols.iter().enumerate() {
        for (i, &x) in col.iter().enumerate() {
            if x != 0 {
                m.set(i, j, q(x));
            }
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[i64]]) -> RationalMatrix {
        let cols = rows.first().map_or(0, |r| r.len());
        RationalMatrix::from_integer_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>(), cols).unwrap()
    }

    #[test]
    fn zero_matrix_nullspace_is_everything() {
        let ns = left_nullspace(&RationalMatrix::zeros(3, 2));
        assert_eq!(ns.vectors(), &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
    }

    #[test]
    fn nullspace_vectors_annihilate() {
        let m = mat(&[&[1, 2], &[2, 4], &[0, 1], &[1, 3]]);
        let ns = left_nullspace(&m);
        assert_eq!(ns.len(), 4 - m.rank());
        let prod = ns.as_matrix().mul(&m).unwrap();
        assert!(prod.is_zero());
        for v in ns.vectors() {
            let lead = v.iter().find(|&&x| x != 0).unwrap();
            assert!(*lead > 0);
        }
    }

    #[test]
    fn identity_rank() {
        for n in 0..5 {
            assert_eq!(RationalMatrix::identity(n).rank(), n);
        }
    }

    #[test]
    fn containment() {
        let a = IntegerVectorBasis::span(&[vec![1, 0, 0], vec![0, 1, 0]], 3).unwrap();
        let b = IntegerVectorBasis::span(&[vec![2, 3, 0]], 3).unwrap();
        assert!(contains_subspace(&a, &b).unwrap());
        assert!(!contains_subspace(&b, &a).unwrap());
        let c = IntegerVectorBasis::span(&[vec![1, 0]], 2).unwrap();
        assert!(contains_subspace(&a, &c).is_err());
    }

    #[test]
    fn factorization_through_identity() {
        let v = RationalMatrix::identity(3);
        let w = mat(&[&[1, 2, 3], &[0, -1, 5]]);
        assert_eq!(solve_factorization(&v, &w).unwrap(), w);
    }

    #[test]
    fn factorization_picks_first_row() {
        let v = mat(&[&[1, 1, 0, 2], &[0, 1, 3, 1]]);
        let w = mat(&[&[1, 1, 0, 2]]);
        assert_eq!(solve_factorization(&v, &w).unwrap(), mat(&[&[1, 0]]));
        let bad = mat(&[&[1, 0, 0, 0]]);
        assert!(matches!(solve_factorization(&v, &bad), Err(LinalgError::NotInRowSpace { .. })));
        let singular = mat(&[&[1, 1], &[2, 2]]);
        assert!(matches!(pseudo_inverse(&singular), Err(LinalgError::RankDeficient)));
        let vp = pseudo_inverse(&v).unwrap();
        assert_eq!(v.mul(&vp).unwrap(), RationalMatrix::identity(2));
    }

    #[test]
    fn split_separates_supports() {
        let b = IntegerVectorBasis::span(&[vec![1, 0, 1], vec![1, 1, 1], vec![0, 0, 2]], 3).unwrap();
        let (lead, rest) = b.split_by_columns(&[2]);
        assert_eq!(lead.len(), 1);
        assert_eq!(rest.len(), 2);
        assert!(rest.vectors().iter().all(|v| v[2] == 0));
    }

    #[test]
    fn split_classical_space_sits_between_virtual_and_classical() {
        use crate::enumeration::degree3_basis;
        use crate::relators::{generate_classical_relators, generate_split_classical_relators, generate_virtual_relators};
        let b = degree3_basis();
        let virt = left_nullspace(&build_system(&b, &generate_virtual_relators()));
        let classical = left_nullspace(&build_system(&b, &generate_classical_relators()));
        let split = left_nullspace(&build_system(&b, &generate_split_classical_relators()));
        assert_eq!(split.len(), 19);
        assert!(contains_subspace(&classical, &split).unwrap());
        assert!(contains_subspace(&split, &virt).unwrap());
    }
}
