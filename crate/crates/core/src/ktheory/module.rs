//! Quasi-periodic modules `X(q, a₁,…,a_{n−1})`, their classes, and the
//! effect of dilation.

use serde::{Deserialize, Serialize};

use super::{ExtElement, KClass, KTheoryError};
use crate::lattice::{DilationForm, DilationSpec, IntMatrix};

/// `X(q, a₁,…,a_{n−1})`, optionally precomposed with `B ∈ GL(n,ℤ)`.
///
/// The dimension is `twists.len() + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleDescriptor {
    pub q: i64,
    pub twists: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conjugator: Option<IntMatrix>,
}

impl ModuleDescriptor {
    pub fn new(q: i64, twists: Vec<i64>) -> Result<Self, KTheoryError> {
        let m = ModuleDescriptor {
            q,
            twists,
            conjugator: None,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn with_conjugator(q: i64, twists: Vec<i64>, b: IntMatrix) -> Result<Self, KTheoryError> {
        let m = ModuleDescriptor {
            q,
            twists,
            conjugator: Some(b),
        };
        m.validate()?;
        Ok(m)
    }

    /// Checks `q ≥ 1` and that a conjugator, if any, is unimodular of the
    /// right size.
    pub fn validate(&self) -> Result<(), KTheoryError> {
        if self.q < 1 {
            return Err(KTheoryError::InvalidDescriptor(format!(
                "rank q = {} must be positive",
                self.q
            )));
        }
        if let Some(b) = &self.conjugator {
            check_unimodular(b, self.dim())?;
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.twists.len() + 1
    }

    /// The unique nonzero twist as `(position, value)` with a 1-based
    /// position, `None` for the free module.
    pub fn single_twist(&self) -> Result<Option<(usize, i64)>, KTheoryError> {
        let mut nonzero = self.twists.iter().enumerate().filter(|(_, &a)| a != 0);
        let first = nonzero.next();
        if nonzero.next().is_some() {
            return Err(KTheoryError::UnsupportedTwistPattern);
        }
        Ok(first.map(|(j, &a)| (j + 1, a)))
    }
}

fn check_unimodular(b: &IntMatrix, n: usize) -> Result<(), KTheoryError> {
    if b.dim() != n {
        return Err(KTheoryError::DimensionMismatch {
            expected: n,
            found: b.dim(),
        });
    }
    let det = b.det()?;
    if det.abs() != 1 {
        return Err(KTheoryError::NotUnimodular { det });
    }
    Ok(())
}

/// `[X(q, a)] = q − Σ_k a_k e_k∧e_n`, transported by `B` when present:
/// `q − Σ_j a_j (Σ_l b_{jl}e_l)∧(Σ_k b_{nk}e_k)`.
pub fn class_of_module(m: &ModuleDescriptor) -> Result<KClass, KTheoryError> {
    m.validate()?;
    let n = m.dim();
    let mut elem = ExtElement::scalar(n, m.q);
    for (k, &a) in m.twists.iter().enumerate() {
        if a != 0 {
            elem = elem.sub(&ExtElement::monomial(n, &[k + 1, n], a)?)?;
        }
    }
    let class = KClass::new(elem)?;
    match &m.conjugator {
        None => Ok(class),
        Some(b) => gl_action(b, &class),
    }
}

/// The action on `K₀(C(𝕋ⁿ))` induced by the generator substitution
/// `e_j ↦ Σ_l b_{jl} e_l`. This is a ring map, and
/// `gl_action(B₁, gl_action(B₂, c)) = gl_action(B₂·B₁, c)`.
pub fn gl_action(b: &IntMatrix, c: &KClass) -> Result<KClass, KTheoryError> {
    check_unimodular(b, c.dim())?;
    let images: Vec<ExtElement> = (0..b.dim()).map(|j| ExtElement::linear(b.row(j))).collect();
    KClass::new(c.elem().substitute(&images)?)
}

/// The `n = 2` case: `q − a e₁∧e₂ ↦ q − det(A)·a e₁∧e₂`.
pub fn gl2_action(a: &IntMatrix, c: &KClass) -> Result<KClass, KTheoryError> {
    if c.dim() != 2 {
        return Err(KTheoryError::DimensionMismatch {
            expected: 2,
            found: c.dim(),
        });
    }
    check_unimodular(a, 2)?;
    let det = a.det()?;
    let twist = c.coeff(&[1, 2]).checked_mul(det).ok_or(KTheoryError::Overflow)?;
    let elem = ExtElement::scalar(2, c.rank()).add(&ExtElement::monomial(2, &[1, 2], twist)?)?;
    KClass::new(elem)
}

/// Per-step twist multiplier `Π_{k∉{j,n}} |d_k| · sign(d_j d_n)`.
fn twist_multiplier(factors: &[i64], j: usize) -> Result<i64, KTheoryError> {
    let n = factors.len();
    let mut m: i64 = 1;
    for (k, &d) in factors.iter().enumerate() {
        if k + 1 != j && k + 1 != n {
            m = m.checked_mul(d.abs()).ok_or(KTheoryError::Overflow)?;
        }
    }
    Ok(m * (factors[j - 1] * factors[n - 1]).signum())
}

/// Factors to use for `spec` acting on a module with the given conjugator.
///
/// Accepted: a diagonal spec on an unconjugated module; a scalar spec
/// `d·I` on any module (it commutes with every `B`); a conjugated spec
/// `S⁻¹·D·S` on the module conjugated by `Sᵗ`.
fn effective_factors<'a>(
    spec: &'a DilationSpec,
    m: &ModuleDescriptor,
) -> Result<&'a [i64], KTheoryError> {
    let b = m.conjugator.as_ref();
    let is_identity = |x: &IntMatrix| *x == IntMatrix::identity(x.dim());
    match spec.form() {
        DilationForm::Diagonal { factors } => {
            if spec.is_scalar() || b.is_none_or(is_identity) {
                Ok(factors)
            } else {
                Err(KTheoryError::UnsupportedConjugator)
            }
        }
        DilationForm::Conjugated { conjugator, factors } => {
            let st = conjugator.transpose();
            let ok = match b {
                Some(b) => *b == st,
                None => is_identity(&st),
            };
            if ok || spec.is_scalar() {
                Ok(factors)
            } else {
                Err(KTheoryError::UnsupportedConjugator)
            }
        }
        DilationForm::General => Err(KTheoryError::UnsupportedDilation),
    }
}

/// `D(V₀)` when `V₀ ≅ X(q, 0,…,a_j,…,0)`:
/// `X(|det A|·q, 0,…, Π_{k∉{j,n}}|d_k|·sign(d_j d_n)·a_j, …,0)`.
///
/// The single twist may sit at any position `j < n`. The conjugator of the
/// input is carried to the output unchanged.
pub fn dilate_class(
    spec: &DilationSpec,
    m: &ModuleDescriptor,
) -> Result<ModuleDescriptor, KTheoryError> {
    m.validate()?;
    if spec.dim() != m.dim() {
        return Err(KTheoryError::DimensionMismatch {
            expected: spec.dim(),
            found: m.dim(),
        });
    }
    let factors = effective_factors(spec, m)?;
    let absdet = i64::try_from(spec.absdet()).map_err(|_| KTheoryError::Overflow)?;
    let q = m.q.checked_mul(absdet).ok_or(KTheoryError::Overflow)?;
    let mut twists = vec![0; m.twists.len()];
    if let Some((j, a)) = m.single_twist()? {
        twists[j - 1] = twist_multiplier(factors, j)?
            .checked_mul(a)
            .ok_or(KTheoryError::Overflow)?;
    }
    Ok(ModuleDescriptor {
        q,
        twists,
        conjugator: m.conjugator.clone(),
    })
}

/// `V_i = Dⁱ(V₀)` by iterating [`dilate_class`].
pub fn pmra_level_class(
    spec: &DilationSpec,
    m: &ModuleDescriptor,
    level: u32,
) -> Result<ModuleDescriptor, KTheoryError> {
    let mut v = m.clone();
    v.validate()?;
    for _ in 0..level {
        v = dilate_class(spec, &v)?;
    }
    Ok(v)
}

/// `V_i` from the closed form: rank `|det A|ⁱ q`, twist multiplied by the
/// `i`-th power of the per-step multiplier.
pub fn pmra_level_closed_form(
    spec: &DilationSpec,
    m: &ModuleDescriptor,
    level: u32,
) -> Result<ModuleDescriptor, KTheoryError> {
    m.validate()?;
    if spec.dim() != m.dim() {
        return Err(KTheoryError::DimensionMismatch {
            expected: spec.dim(),
            found: m.dim(),
        });
    }
    let factors = effective_factors(spec, m)?;
    let absdet = i64::try_from(spec.absdet()).map_err(|_| KTheoryError::Overflow)?;
    let pow = |x: i64| x.checked_pow(level).ok_or(KTheoryError::Overflow);
    let q = m.q.checked_mul(pow(absdet)?).ok_or(KTheoryError::Overflow)?;
    let mut twists = vec![0; m.twists.len()];
    if let Some((j, a)) = m.single_twist()? {
        twists[j - 1] = pow(twist_multiplier(factors, j)?)?
            .checked_mul(a)
            .ok_or(KTheoryError::Overflow)?;
    }
    Ok(ModuleDescriptor {
        q,
        twists,
        conjugator: m.conjugator.clone(),
    })
}

/// Class of the wavelet module `W_i = V_{i+1} ⊖ V_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WaveletClass {
    pub level: u32,
    pub class: KClass,
    /// Whether equal classes imply isomorphic modules (cancellation holds
    /// for `n ≤ 4`).
    pub cancellation_valid: bool,
    /// `X(q, a)` with the same class, when the class has that shape.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub descriptor: Option<ModuleDescriptor>,
}

/// `[W_i] = [V_{i+1}] − [V_i]` in `K₀`.
pub fn wavelet_class(
    spec: &DilationSpec,
    m: &ModuleDescriptor,
    level: u32,
) -> Result<WaveletClass, KTheoryError> {
    let vi = pmra_level_class(spec, m, level)?;
    let vnext = dilate_class(spec, &vi)?;
    let class = class_of_module(&vnext)?.sub(&class_of_module(&vi)?)?;
    let descriptor = if vi.conjugator.is_none() {
        descriptor_of(&class)
    } else {
        None
    };
    Ok(WaveletClass {
        level,
        cancellation_valid: m.dim() <= 4,
        descriptor,
        class,
    })
}

/// Reads a class of the form `q − Σ_k a_k e_k∧e_n` with `q ≥ 1` back as
/// `X(q, a)`.
pub fn descriptor_of(c: &KClass) -> Option<ModuleDescriptor> {
    let n = c.dim();
    if n == 0 || c.rank() < 1 {
        return None;
    }
    let mut twists = vec![0; n - 1];
    for (idx, coeff) in c.elem().terms() {
        match idx.as_slice() {
            [] => {}
            [k, last] if *last == n => twists[k - 1] = coeff.checked_neg()?,
            _ => return None,
        }
    }
    Some(ModuleDescriptor {
        q: c.rank(),
        twists,
        conjugator: None,
    })
}
