//! Coset representatives of `ℤⁿ/Aⁱℤⁿ` enumerated by d-adic expansion.
//!
//! With `β₀ = 0, β₁, …, β_{d−1}` representatives of `ℤⁿ/Aℤⁿ`, the index
//! `l = Σ_j b_j·dʲ` (base-d digits `b_j`) is assigned the vector
//!
//! ```text
//! v_l = Σ_j Aʲ(β_{b_j})
//! ```
//!
//! so that the first `d^{i−1}` entries of the level-`i` table are exactly the
//! level-`(i−1)` table.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::Serialize;

use super::{narrow, solve_integral, DilationSpec, IntMatrix, LatticeError};
use super::gcd::gcd;

/// Default bound on `dⁱ`.
pub const DEFAULT_LEVEL_CAP: u64 = 1 << 20;

/// Exact residue invariant for `ℤⁿ/Mℤⁿ`.
///
/// `u ≡ w (mod Mℤⁿ)` iff `M⁻¹(u − w)` is integral iff
/// `adj(M)·u ≡ adj(M)·w (mod |det M|)` componentwise, so the reduced vector
/// `adj(M)·w mod |det M|` is a complete invariant of the class of `w`.
#[derive(Clone, Debug)]
pub(crate) struct ResidueKey {
    adj: IntMatrix,
    modulus: i128,
}

impl ResidueKey {
    pub(crate) fn new(m: &IntMatrix) -> Result<Self, LatticeError> {
        let det = m.det()?;
        if det == 0 {
            return Err(LatticeError::SingularMatrix);
        }
        Ok(ResidueKey {
            adj: m.adjugate()?,
            modulus: det.unsigned_abs() as i128,
        })
    }

    pub(crate) fn key(&self, w: &[i64]) -> Vec<i64> {
        (0..self.adj.dim())
            .map(|i| {
                let acc: i128 = self
                    .adj
                    .row(i)
                    .iter()
                    .zip(w)
                    .map(|(&a, &b)| a as i128 * b as i128)
                    .sum();
                // the residue is < modulus ≤ i64::MAX
                acc.rem_euclid(self.modulus) as i64
            })
            .collect()
    }
}

/// Level-one representatives `β₀ = 0, β₁, …, β_{d−1}`.
///
/// Lattice points of the box `[0, N)ⁿ` are scanned with the first coordinate
/// varying fastest, keeping the first point met in each residue class. `N`
/// is the exponent of the group `ℤⁿ/Aℤⁿ` (the least `N` with `N·ℤⁿ ⊆ Aℤⁿ`),
/// so the box always meets every class; `0` is scanned first.
pub fn coset_base(spec: &DilationSpec) -> Result<Vec<Vec<i64>>, LatticeError> {
    let a = spec.matrix();
    let n = spec.dim();
    let d = spec.absdet();
    let key = ResidueKey::new(a)?;
    let adj = a.adjugate()?;
    let g = (0..n)
        .flat_map(|i| adj.row(i).to_vec())
        .fold(0i64, gcd);
    let box_side = (d as i64) / gcd(d as i64, g);

    let mut seen: HashMap<Vec<i64>, ()> = HashMap::with_capacity(d as usize);
    let mut base = Vec::with_capacity(d as usize);
    let mut point = vec![0i64; n];
    loop {
        if seen.insert(key.key(&point), ()).is_none() {
            base.push(point.clone());
            if base.len() as u64 == d {
                break;
            }
        }
        // odometer step, first coordinate fastest
        let mut axis = 0;
        loop {
            if axis == n {
                unreachable!("the box [0, N)^n meets every residue class");
            }
            point[axis] += 1;
            if point[axis] < box_side {
                break;
            }
            point[axis] = 0;
            axis += 1;
        }
    }
    Ok(base)
}

/// Ordered representatives `v₀ … v_{dⁱ−1}` of `ℤⁿ/Aⁱℤⁿ`.
#[derive(Clone, Debug, Serialize)]
pub struct CosetTable {
    spec: DilationSpec,
    level: u32,
    base: Vec<Vec<i64>>,
    reps: Vec<Vec<i64>>,
    #[serde(skip)]
    key: ResidueKey,
    #[serde(skip)]
    lookup: HashMap<Vec<i64>, usize>,
}

/// The level-`i` table with the default cap of `2²⁰` representatives.
pub fn coset_table(spec: &DilationSpec, level: u32) -> Result<CosetTable, LatticeError> {
    coset_table_with_cap(spec, level, DEFAULT_LEVEL_CAP)
}

fn checked_count(d: u64, level: u32, cap: u64) -> Result<u64, LatticeError> {
    let requested = (d as u128).checked_pow(level).unwrap_or(u128::MAX);
    if requested > cap as u128 {
        return Err(LatticeError::LevelOverflow { requested, cap });
    }
    Ok(requested as u64)
}

pub fn coset_table_with_cap(
    spec: &DilationSpec,
    level: u32,
    cap: u64,
) -> Result<CosetTable, LatticeError> {
    let d = spec.absdet();
    let count = checked_count(d, level, cap)?;
    let a = spec.matrix();
    let n = spec.dim();
    let base = coset_base(spec)?;

    let mut reps: Vec<Vec<i64>> = Vec::with_capacity(count as usize);
    reps.push(vec![0; n]);
    let mut power = IntMatrix::identity(n);
    for _ in 0..level {
        let shifted: Vec<Vec<i64>> = base
            .iter()
            .map(|beta| power.apply(beta))
            .collect::<Result<_, _>>()?;
        let prev = reps.len();
        // index l + m·dʲ  ↦  Aʲβ_m + v_l
        for offset in shifted.iter().skip(1) {
            for l in 0..prev {
                let v = reps[l]
                    .iter()
                    .zip(offset)
                    .map(|(&x, &y)| x.checked_add(y).ok_or(LatticeError::Overflow))
                    .collect::<Result<Vec<_>, _>>()?;
                reps.push(v);
            }
        }
        power = power.mul(a)?;
    }
    // `power` is now Aⁱ
    let key = ResidueKey::new(&power)?;
    let lookup = reps
        .iter()
        .enumerate()
        .map(|(l, v)| (key.key(v), l))
        .collect();
    Ok(CosetTable {
        spec: spec.clone(),
        level,
        base,
        reps,
        key,
        lookup,
    })
}

impl CosetTable {
    pub fn spec(&self) -> &DilationSpec {
        &self.spec
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn base(&self) -> &[Vec<i64>] {
        &self.base
    }

    pub fn reps(&self) -> &[Vec<i64>] {
        &self.reps
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<&[i64]> {
        self.reps.get(index).map(Vec::as_slice)
    }

    /// Index `l` with `w ≡ v_l (mod Aⁱℤⁿ)`, from the residue invariant.
    pub fn index_of(&self, w: &[i64]) -> Result<usize, LatticeError> {
        if w.len() != self.spec.dim() {
            return Err(LatticeError::DimensionMismatch {
                expected: self.spec.dim(),
                found: w.len(),
            });
        }
        Ok(*self
            .lookup
            .get(&self.key.key(w))
            .expect("the table holds one representative per class"))
    }

    /// CSV with header `index,v1,…,vn`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index");
        for j in 1..=self.spec.dim() {
            let _ = write!(out, ",v{j}");
        }
        out.push('\n');
        for (l, v) in self.reps.iter().enumerate() {
            let _ = write!(out, "{l}");
            for x in v {
                let _ = write!(out, ",{x}");
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "matrix": self.spec.matrix(),
            "absdet": self.spec.absdet(),
            "level": self.level,
            "base": self.base,
            "reps": self.reps,
        })
    }
}

/// Index `l` of the class of `w` in the level-`i` table, computed digit by
/// digit without building the table: `b₀` is the class of `w` mod `Aℤⁿ`,
/// then `w ← A⁻¹(w − β_{b₀})` and repeat.
pub fn reduce_mod(spec: &DilationSpec, level: u32, w: &[i64]) -> Result<u64, LatticeError> {
    let n = spec.dim();
    if w.len() != n {
        return Err(LatticeError::DimensionMismatch {
            expected: n,
            found: w.len(),
        });
    }
    let d = spec.absdet();
    checked_count(d, level, u64::MAX)?;
    let base = coset_base(spec)?;
    let key = ResidueKey::new(spec.matrix())?;
    let digit_of: HashMap<Vec<i64>, u64> = base
        .iter()
        .enumerate()
        .map(|(m, b)| (key.key(b), m as u64))
        .collect();
    let adj = spec.matrix().adjugate()?;
    let det = spec.det();

    let mut w = w.to_vec();
    let mut index = 0u64;
    let mut scale = 1u64;
    for j in 0..level {
        let digit = digit_of[&key.key(&w)];
        index += digit * scale;
        if j + 1 < level {
            scale *= d;
        }
        let beta = &base[digit as usize];
        let diff = w
            .iter()
            .zip(beta)
            .map(|(&x, &b)| narrow(x as i128 - b as i128))
            .collect::<Result<Vec<_>, _>>()?;
        w = solve_integral(&adj, det, &diff)?.expect("w − β lies in A·Zⁿ");
    }
    Ok(index)
}
