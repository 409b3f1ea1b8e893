//! Square integer matrices with overflow-checked arithmetic.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::LatticeError;

/// A square `n × n` matrix of `i64` entries, stored row-major.
///
/// Every arithmetic operation is checked; an intermediate that leaves the
/// `i64` range is reported as [`LatticeError::Overflow`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    n: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn identity(n: usize) -> Self {
        let mut data = vec![0; n * n];
        for i in 0..n {
            data[i * n + i] = 1;
        }
        IntMatrix { n, data }
    }

    pub fn diagonal(entries: &[i64]) -> Self {
        let n = entries.len();
        let mut m = IntMatrix::zeros(n);
        for (i, &d) in entries.iter().enumerate() {
            m.data[i * n + i] = d;
        }
        m
    }

    pub fn zeros(n: usize) -> Self {
        IntMatrix {
            n,
            data: vec![0; n * n],
        }
    }

    /// Builds a matrix from its rows. Fails unless the rows form a non-empty
    /// square array.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self, LatticeError> {
        let n = rows.len();
        if n == 0 {
            return Err(LatticeError::NotSquare { rows: 0, cols: 0 });
        }
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            let row = row.as_ref();
            if row.len() != n {
                return Err(LatticeError::NotSquare {
                    rows: n,
                    cols: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(IntMatrix { n, data })
    }

    /// Parses a row-major JSON array such as `[[2,0],[0,2]]`.
    pub fn from_json(text: &str) -> Result<Self, LatticeError> {
        let rows: Vec<Vec<i64>> =
            serde_json::from_str(text).map_err(|e| LatticeError::Parse(e.to_string()))?;
        IntMatrix::from_rows(&rows)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> i64 {
        self.data[row * self.n + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: i64) {
        self.data[row * self.n + col] = value;
    }

    pub fn row(&self, row: usize) -> &[i64] {
        &self.data[row * self.n..(row + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = IntMatrix::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| i == j || self.get(i, j) == 0))
    }

    pub fn diagonal_entries(&self) -> Vec<i64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    fn check_dim(&self, other_dim: usize) -> Result<(), LatticeError> {
        if self.n != other_dim {
            return Err(LatticeError::DimensionMismatch {
                expected: self.n,
                found: other_dim,
            });
        }
        Ok(())
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix, LatticeError> {
        self.check_dim(other.n)?;
        let n = self.n;
        let mut out = IntMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc: i128 = 0;
                for k in 0..n {
                    acc += self.get(i, k) as i128 * other.get(k, j) as i128;
                }
                out.set(i, j, narrow(acc)?);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, exponent: u32) -> Result<IntMatrix, LatticeError> {
        let mut result = IntMatrix::identity(self.n);
        for _ in 0..exponent {
            result = result.mul(self)?;
        }
        Ok(result)
    }

    /// Matrix-vector product `A·v`.
    pub fn apply(&self, v: &[i64]) -> Result<Vec<i64>, LatticeError> {
        self.check_dim(v.len())?;
        (0..self.n)
            .map(|i| {
                let acc: i128 = self
                    .row(i)
                    .iter()
                    .zip(v)
                    .map(|(&a, &b)| a as i128 * b as i128)
                    .sum();
                narrow(acc)
            })
            .collect()
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> Result<i64, LatticeError> {
        narrow(bareiss_det(&self.data, self.n)?)
    }

    /// The adjugate `adj(A)`, satisfying `A·adj(A) = det(A)·I`.
    pub fn adjugate(&self) -> Result<IntMatrix, LatticeError> {
        let n = self.n;
        if n == 1 {
            return Ok(IntMatrix::identity(1));
        }
        let mut adj = IntMatrix::zeros(n);
        let mut minor = Vec::with_capacity((n - 1) * (n - 1));
        for i in 0..n {
            for j in 0..n {
                minor.clear();
                for r in (0..n).filter(|&r| r != i) {
                    for c in (0..n).filter(|&c| c != j) {
                        minor.push(self.get(r, c));
                    }
                }
                let cof = bareiss_det(&minor, n - 1)?;
                let signed = if (i + j) % 2 == 0 { cof } else { -cof };
                // adj is the transpose of the cofactor matrix
                adj.set(j, i, narrow(signed)?);
            }
        }
        Ok(adj)
    }

    /// Inverse of a unimodular matrix (`det = ±1`).
    pub fn unimodular_inverse(&self) -> Result<IntMatrix, LatticeError> {
        let det = self.det()?;
        if det.abs() != 1 {
            return Err(LatticeError::NotUnimodular { det });
        }
        let mut adj = self.adjugate()?;
        if det == -1 {
            for x in adj.data.iter_mut() {
                *x = x.checked_neg().ok_or(LatticeError::Overflow)?;
            }
        }
        Ok(adj)
    }

    /// The operator norm induced by `‖·‖∞`: the largest absolute row sum.
    pub fn inf_norm(&self) -> u64 {
        (0..self.n)
            .map(|i| self.row(i).iter().map(|x| x.unsigned_abs()).sum())
            .max()
            .unwrap_or(0)
    }

    /// Entries as `f64`, row-major.
    pub fn to_f64(&self) -> Vec<f64> {
        self.data.iter().map(|&x| x as f64).collect()
    }

    /// The real matrix `A⁻¹` computed from the exact adjugate and determinant.
    pub fn inverse_f64(&self) -> Result<Vec<f64>, LatticeError> {
        let det = self.det()?;
        if det == 0 {
            return Err(LatticeError::SingularMatrix);
        }
        let adj = self.adjugate()?;
        Ok(adj.data.iter().map(|&a| a as f64 / det as f64).collect())
    }
}

/// Solves `A x = w` exactly; returns `Some(x)` when the solution is integral.
pub(crate) fn solve_integral(
    adj: &IntMatrix,
    det: i64,
    w: &[i64],
) -> Result<Option<Vec<i64>>, LatticeError> {
    let n = adj.dim();
    let mut x = Vec::with_capacity(n);
    for i in 0..n {
        let acc: i128 = adj
            .row(i)
            .iter()
            .zip(w)
            .map(|(&a, &b)| a as i128 * b as i128)
            .sum();
        if acc % det as i128 != 0 {
            return Ok(None);
        }
        x.push(narrow(acc / det as i128)?);
    }
    Ok(Some(x))
}

fn bareiss_det(entries: &[i64], n: usize) -> Result<i128, LatticeError> {
    if n == 0 {
        return Ok(1);
    }
    let mut m: Vec<i128> = entries.iter().map(|&x| x as i128).collect();
    let mut sign: i128 = 1;
    let mut prev: i128 = 1;
    for k in 0..n - 1 {
        if m[k * n + k] == 0 {
            let Some(swap) = (k + 1..n).find(|&r| m[r * n + k] != 0) else {
                return Ok(0);
            };
            for c in 0..n {
                m.swap(k * n + c, swap * n + c);
            }
            sign = -sign;
        }
        let pivot = m[k * n + k];
        for i in k + 1..n {
            for j in k + 1..n {
                let a = pivot
                    .checked_mul(m[i * n + j])
                    .ok_or(LatticeError::Overflow)?;
                let b = m[i * n + k]
                    .checked_mul(m[k * n + j])
                    .ok_or(LatticeError::Overflow)?;
                m[i * n + j] = a.checked_sub(b).ok_or(LatticeError::Overflow)? / prev;
            }
        }
        prev = pivot;
    }
    Ok(sign * m[n * n - 1])
}

pub(crate) fn narrow(x: i128) -> Result<i64, LatticeError> {
    i64::try_from(x).map_err(|_| LatticeError::Overflow)
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", serde_json::to_string(&self.rows()).unwrap_or_default())
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.rows().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<i64>>::deserialize(deserializer)?;
        IntMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn determinant_small_cases() {
        assert_eq!(m(&[&[2, 2], &[0, 4]]).det().unwrap(), 8);
        assert_eq!(m(&[&[0, 1], &[1, 0]]).det().unwrap(), -1);
        assert_eq!(m(&[&[0, 1, 1], &[-2, 0, 5], &[1, 1, -1]]).det().unwrap(), 1);
        assert_eq!(m(&[&[1, 2], &[2, 4]]).det().unwrap(), 0);
    }

    #[test]
    fn adjugate_identity() {
        let a = m(&[&[3, 1, 4], &[1, 5, 9], &[2, 6, 5]]);
        let det = a.det().unwrap();
        let prod = a.mul(&a.adjugate().unwrap()).unwrap();
        assert_eq!(prod, IntMatrix::diagonal(&[det, det, det]));
    }

    #[test]
    fn overflow_is_reported() {
        let big = IntMatrix::diagonal(&[i64::MAX / 2, 3]);
        assert!(matches!(big.mul(&big), Err(LatticeError::Overflow)));
    }

    #[test]
    fn ragged_rows_rejected() {
        let rows: Vec<Vec<i64>> = vec![vec![1, 2], vec![3]];
        assert!(matches!(
            IntMatrix::from_rows(&rows),
            Err(LatticeError::NotSquare { .. })
        ));
    }

    #[test]
    fn json_round_trip() {
        let a = IntMatrix::from_json("[[2,2],[0,4]]").unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), "[[2,2],[0,4]]");
    }
}
