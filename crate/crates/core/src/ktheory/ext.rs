//! The integer exterior algebra `Λ*_ℤ{e₁,…,eₙ}`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::KTheoryError;

/// Generators are limited to 64 so that a blade fits in a bitmask.
pub const MAX_GENERATORS: usize = 64;

/// An element `Σ c_I e_I` of the exterior algebra on `n` generators.
///
/// Blades `e_I = e_{i₁}∧…∧e_{i_k}` with `i₁ < … < i_k` are stored as
/// bitmasks; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExtElement {
    n: usize,
    terms: BTreeMap<u64, i64>,
}

fn indices_of(mask: u64) -> Vec<usize> {
    (0..64).filter(|b| mask >> b & 1 == 1).map(|b| b + 1).collect()
}

/// Sign of `e_I ∧ e_J` relative to `e_{I∪J}`: `(−1)^{#{(i,j) : i∈I, j∈J, i>j}}`.
fn wedge_sign(a: u64, b: u64) -> i64 {
    let mut inversions = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        inversions += (a >> (j + 1)).count_ones();
        rest &= rest - 1;
    }
    if inversions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn add_checked(x: i64, y: i64) -> Result<i64, KTheoryError> {
    x.checked_add(y).ok_or(KTheoryError::Overflow)
}

fn mul_checked(x: i64, y: i64) -> Result<i64, KTheoryError> {
    x.checked_mul(y).ok_or(KTheoryError::Overflow)
}

impl ExtElement {
    pub fn zero(n: usize) -> Self {
        assert!(n <= MAX_GENERATORS, "at most {MAX_GENERATORS} generators");
        ExtElement {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(n: usize, c: i64) -> Self {
        let mut e = ExtElement::zero(n);
        e.insert(0, c);
        e
    }

    pub fn one(n: usize) -> Self {
        ExtElement::scalar(n, 1)
    }

    /// The generator `e_j` (1-based).
    pub fn generator(n: usize, j: usize) -> Result<Self, KTheoryError> {
        ExtElement::monomial(n, &[j], 1)
    }

    /// `c·e_{i₁}∧…∧e_{i_k}` for 1-based indices in any order; repeated
    /// indices give zero and reordering contributes the permutation sign.
    pub fn monomial(n: usize, indices: &[usize], c: i64) -> Result<Self, KTheoryError> {
        let mut out = ExtElement::scalar(n, c);
        for &j in indices {
            if j == 0 || j > n {
                return Err(KTheoryError::IndexOutOfRange { index: j, n });
            }
            out = out.wedge(&ExtElement {
                n,
                terms: BTreeMap::from([(1u64 << (j - 1), 1)]),
            })?;
        }
        Ok(out)
    }

    /// Linear combination `Σ c_l e_l` of generators.
    pub fn linear(coeffs: &[i64]) -> Self {
        let mut out = ExtElement::zero(coeffs.len());
        for (l, &c) in coeffs.iter().enumerate() {
            out.insert(1 << l, c);
        }
        out
    }

    fn insert(&mut self, mask: u64, c: i64) {
        if c != 0 {
            self.terms.insert(mask, c);
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `e_I` for strictly increasing 1-based `indices`.
    pub fn coeff(&self, indices: &[usize]) -> i64 {
        let mask = indices.iter().fold(0u64, |m, &j| m | 1 << (j - 1));
        self.terms.get(&mask).copied().unwrap_or(0)
    }

    /// The degree-0 coefficient.
    pub fn rank(&self) -> i64 {
        self.terms.get(&0).copied().unwrap_or(0)
    }

    /// Terms as `(indices, coeff)` sorted by degree, then lexicographically.
    pub fn terms(&self) -> Vec<(Vec<usize>, i64)> {
        let mut out: Vec<_> = self
            .terms
            .iter()
            .map(|(&m, &c)| (indices_of(m), c))
            .collect();
        out.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
        out
    }

    pub fn is_even(&self) -> bool {
        self.terms.keys().all(|m| m.count_ones() % 2 == 0)
    }

    /// The homogeneous component of degree `k`.
    pub fn grade(&self, k: u32) -> ExtElement {
        ExtElement {
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.count_ones() == k)
                .map(|(&m, &c)| (m, c))
                .collect(),
        }
    }

    fn same_dim(&self, other: &ExtElement) -> Result<(), KTheoryError> {
        if self.n != other.n {
            return Err(KTheoryError::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &ExtElement) -> Result<ExtElement, KTheoryError> {
        self.same_dim(other)?;
        let mut out = self.clone();
        for (&m, &c) in &other.terms {
            let v = add_checked(out.terms.get(&m).copied().unwrap_or(0), c)?;
            out.terms.remove(&m);
            out.insert(m, v);
        }
        Ok(out)
    }

    pub fn neg(&self) -> Result<ExtElement, KTheoryError> {
        self.scale(-1)
    }

    pub fn sub(&self, other: &ExtElement) -> Result<ExtElement, KTheoryError> {
        self.add(&other.neg()?)
    }

    pub fn scale(&self, k: i64) -> Result<ExtElement, KTheoryError> {
        let mut out = ExtElement::zero(self.n);
        for (&m, &c) in &self.terms {
            out.insert(m, mul_checked(c, k)?);
        }
        Ok(out)
    }

    /// Exterior product.
    pub fn wedge(&self, other: &ExtElement) -> Result<ExtElement, KTheoryError> {
        self.same_dim(other)?;
        let mut acc: BTreeMap<u64, i64> = BTreeMap::new();
        for (&a, &ca) in &self.terms {
            for (&b, &cb) in &other.terms {
                if a & b != 0 {
                    continue;
                }
                let c = mul_checked(mul_checked(ca, cb)?, wedge_sign(a, b))?;
                let slot = acc.entry(a | b).or_insert(0);
                *slot = add_checked(*slot, c)?;
            }
        }
        acc.retain(|_, c| *c != 0);
        Ok(ExtElement {
            n: self.n,
            terms: acc,
        })
    }

    /// Applies the algebra endomorphism determined on generators by
    /// `e_j ↦ images[j−1]`.
    pub fn substitute(&self, images: &[ExtElement]) -> Result<ExtElement, KTheoryError> {
        if images.len() != self.n {
            return Err(KTheoryError::DimensionMismatch {
                expected: self.n,
                found: images.len(),
            });
        }
        let mut out = ExtElement::zero(self.n);
        for (&m, &c) in &self.terms {
            let mut blade = ExtElement::scalar(self.n, c);
            for j in indices_of(m) {
                blade = blade.wedge(&images[j - 1])?;
            }
            out = out.add(&blade)?;
        }
        Ok(out)
    }
}

impl fmt::Debug for ExtElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ExtElement {
    /// Renders e.g. `7 - 1*e2^e3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (idx, c)) in terms.iter().enumerate() {
            let (sign, mag) = if *c < 0 { ("-", c.unsigned_abs()) } else { ("+", c.unsigned_abs()) };
            match (k, sign) {
                (0, "-") => write!(f, "-")?,
                (0, _) => {}
                _ => write!(f, " {sign} ")?,
            }
            if idx.is_empty() {
                write!(f, "{mag}")?;
            } else {
                let blade: Vec<String> = idx.iter().map(|j| format!("e{j}")).collect();
                write!(f, "{mag}*{}", blade.join("^"))?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    indices: Vec<usize>,
    coeff: i64,
}

#[derive(Serialize, Deserialize)]
struct ElementRepr {
    n: usize,
    terms: Vec<TermRepr>,
}

impl Serialize for ExtElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ElementRepr {
            n: self.n,
            terms: self
                .terms()
                .into_iter()
                .map(|(indices, coeff)| TermRepr { indices, coeff })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ExtElement {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = ElementRepr::deserialize(deserializer)?;
        if repr.n > MAX_GENERATORS {
            return Err(serde::de::Error::custom("too many generators"));
        }
        let mut out = ExtElement::zero(repr.n);
        for t in repr.terms {
            if t.indices.windows(2).any(|w| w[0] >= w[1]) {
                return Err(serde::de::Error::custom("indices must be strictly increasing"));
            }
            let m = ExtElement::monomial(repr.n, &t.indices, t.coeff)
                .map_err(serde::de::Error::custom)?;
            out = out.add(&m).map_err(serde::de::Error::custom)?;
        }
        Ok(out)
    }
}

/// An even element of the exterior algebra, read as a class in
/// `K₀(C(𝕋ⁿ))`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct KClass(ExtElement);

impl KClass {
    pub fn new(elem: ExtElement) -> Result<Self, KTheoryError> {
        if !elem.is_even() {
            return Err(KTheoryError::OddDegree);
        }
        Ok(KClass(elem))
    }

    pub fn zero(n: usize) -> Self {
        KClass(ExtElement::zero(n))
    }

    /// The free class of rank `q`.
    pub fn free(n: usize, q: i64) -> Self {
        KClass(ExtElement::scalar(n, q))
    }

    pub fn elem(&self) -> &ExtElement {
        &self.0
    }

    pub fn into_elem(self) -> ExtElement {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn rank(&self) -> i64 {
        self.0.rank()
    }

    pub fn coeff(&self, indices: &[usize]) -> i64 {
        self.0.coeff(indices)
    }

    pub fn sub(&self, other: &KClass) -> Result<KClass, KTheoryError> {
        Ok(KClass(self.0.sub(&other.0)?))
    }

    pub fn wedge(&self, other: &KClass) -> Result<KClass, KTheoryError> {
        Ok(KClass(self.0.wedge(&other.0)?))
    }
}

impl<'de> Deserialize<'de> for KClass {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        KClass::new(ExtElement::deserialize(deserializer)?).map_err(serde::de::Error::custom)
    }
}

impl fmt::Debug for KClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for KClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Class of `P ⊕ Q`: the coefficientwise sum.
pub fn direct_sum(c1: &KClass, c2: &KClass) -> Result<KClass, KTheoryError> {
    Ok(KClass(c1.0.add(&c2.0)?))
}

/// Exterior product of two elements.
pub fn wedge(u: &ExtElement, v: &ExtElement) -> Result<ExtElement, KTheoryError> {
    u.wedge(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_products() {
        let e1 = ExtElement::generator(3, 1).unwrap();
        let e2 = ExtElement::generator(3, 2).unwrap();
        assert_eq!(e1.wedge(&e2).unwrap().terms(), vec![(vec![1, 2], 1)]);
        assert_eq!(e2.wedge(&e1).unwrap().terms(), vec![(vec![1, 2], -1)]);
        assert!(e1.wedge(&e1).unwrap().is_zero());
    }

    #[test]
    fn one_plus_e1_squared() {
        let u = ExtElement::one(2).add(&ExtElement::generator(2, 1).unwrap()).unwrap();
        let sq = u.wedge(&u).unwrap();
        assert_eq!(sq.terms(), vec![(vec![], 1), (vec![1], 2)]);
    }

    #[test]
    fn monomial_reorders_with_sign() {
        let m = ExtElement::monomial(4, &[3, 1, 2], 5).unwrap();
        // (3,1,2) → (1,2,3) is an even permutation
        assert_eq!(m.coeff(&[1, 2, 3]), 5);
        let m = ExtElement::monomial(4, &[2, 1], 5).unwrap();
        assert_eq!(m.coeff(&[1, 2]), -5);
        assert!(ExtElement::monomial(4, &[2, 2], 5).unwrap().is_zero());
        assert!(ExtElement::monomial(4, &[5], 1).is_err());
    }

    #[test]
    fn json_shape() {
        let c = ExtElement::scalar(3, 7)
            .sub(&ExtElement::monomial(3, &[2, 3], 2).unwrap())
            .unwrap();
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(
            text,
            r#"{"n":3,"terms":[{"indices":[],"coeff":7},{"indices":[2,3],"coeff":-2}]}"#
        );
        let back: ExtElement = serde_json::from_str(&text).unwrap();
        assert_eq!(back, c);
        assert!(serde_json::from_str::<KClass>(r#"{"n":2,"terms":[{"indices":[1],"coeff":1}]}"#).is_err());
    }

    #[test]
    fn display() {
        let c = ExtElement::scalar(3, 7)
            .sub(&ExtElement::monomial(3, &[2, 3], 1).unwrap())
            .unwrap();
        assert_eq!(c.to_string(), "7 - 1*e2^e3");
    }

    #[test]
    fn overflow_detected() {
        let big = ExtElement::scalar(1, i64::MAX);
        assert_eq!(big.add(&ExtElement::one(1)), Err(KTheoryError::Overflow));
    }
}
