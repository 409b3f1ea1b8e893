//! `SL(3,ℤ)` matrices with prescribed cofactors of the last two rows.

use serde::Serialize;

use super::gcd::{ext_gcd, gcd, gcd3};
use super::{IntMatrix, LatticeError};

/// Intermediate quantities of the construction, kept for inspection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CompletionWitness {
    pub b11: i64,
    pub b12: i64,
    pub b13: i64,
    pub nu: i64,
    pub alpha: i64,
    pub beta: i64,
    pub sigma: i64,
    pub tau: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnimodularCompletion {
    pub x: i64,
    pub y: i64,
    pub z: i64,
    pub b: IntMatrix,
    pub witness: CompletionWitness,
}

impl UnimodularCompletion {
    /// The three cofactors `(b₂₂b₃₁ − b₂₁b₃₂, b₂₃b₃₁ − b₂₁b₃₃, b₂₃b₃₂ − b₂₂b₃₃)`
    /// recomputed from `b`.
    pub fn cofactors(&self) -> (i64, i64, i64) {
        last_row_cofactors(&self.b)
    }
}

pub(crate) fn last_row_cofactors(b: &IntMatrix) -> (i64, i64, i64) {
    let e = |i: usize, j: usize| b.get(i - 1, j - 1);
    (
        e(2, 2) * e(3, 1) - e(2, 1) * e(3, 2),
        e(2, 3) * e(3, 1) - e(2, 1) * e(3, 3),
        e(2, 3) * e(3, 2) - e(2, 2) * e(3, 3),
    )
}

/// Builds `B ∈ SL(3,ℤ)` whose last two rows have cofactors `(x, y, z)`.
///
/// First row: a solution of `−b₁₁z + b₁₂y − b₁₃x = 1` from two chained
/// extended-gcd steps. With `ν = gcd(x, z)`, `x = να`, `z = νβ` and
/// `ατ + βσ = y`, the remaining rows are `(−α, 0, β)` and `(σ, ν, τ)`.
/// When `x = z = 0` we take `α = 1`, `β = 0`.
pub fn sl3_with_cofactors(x: i64, y: i64, z: i64) -> Result<UnimodularCompletion, LatticeError> {
    let g = gcd3(x, y, z);
    if g != 1 {
        return Err(LatticeError::NotCoprime { x, y, z, gcd: g });
    }
    let neg = |v: i64| v.checked_neg().ok_or(LatticeError::Overflow);
    let (c1, c2, c3) = (neg(z)?, y, neg(x)?);
    let (g1, s1, t1) = ext_gcd(c1, c2)?;
    let (one, u, w) = ext_gcd(g1, c3)?;
    debug_assert_eq!(one, 1);
    let mul = |a: i64, b: i64| a.checked_mul(b).ok_or(LatticeError::Overflow);
    let (b11, b12, b13) = (mul(u, s1)?, mul(u, t1)?, w);

    let nu = gcd(x, z);
    let (alpha, beta) = if nu == 0 { (1, 0) } else { (x / nu, z / nu) };
    let (_, p, r) = ext_gcd(alpha, beta)?;
    let (tau, sigma) = (mul(p, y)?, mul(r, y)?);

    let b = IntMatrix::from_rows(&[
        [b11, b12, b13],
        [neg(alpha)?, 0, beta],
        [sigma, nu, tau],
    ])?;
    debug_assert_eq!(b.det(), Ok(1));
    Ok(UnimodularCompletion {
        x,
        y,
        z,
        b,
        witness: CompletionWitness {
            b11,
            b12,
            b13,
            nu,
            alpha,
            beta,
            sigma,
            tau,
        },
    })
}
