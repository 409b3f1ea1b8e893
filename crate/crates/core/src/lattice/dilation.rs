//! Validation and factoring of integer dilation matrices.

use serde::{Deserialize, Serialize};

use super::{IntMatrix, LatticeError};

/// How a dilation matrix was recognised.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum DilationForm {
    /// `A = diag(d₁,…,dₙ)` with every `|d_j| > 1`.
    Diagonal { factors: Vec<i64> },
    /// `M = S⁻¹·diag(d₁,…,dₙ)·S` with `S ∈ SL(n,ℤ)`.
    Conjugated { conjugator: IntMatrix, factors: Vec<i64> },
    /// Any other integer matrix with `|det| > 1` (for instance the quincunx
    /// matrix). Only the lattice machinery is available for it.
    General,
}

/// Optional hint passed to [`validate_dilation`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FormHint {
    /// The matrix must be diagonal.
    Diagonal,
    /// The matrix is `S⁻¹·D·S` for this `S` and some diagonal `D`.
    ConjugatedBy(IntMatrix),
}

/// A validated dilation matrix together with its factored form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DilationSpec {
    entries: IntMatrix,
    #[serde(flatten)]
    form: DilationForm,
    det: i64,
}

impl DilationSpec {
    pub fn dim(&self) -> usize {
        self.entries.dim()
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.entries
    }

    pub fn form(&self) -> &DilationForm {
        &self.form
    }

    /// Signed determinant.
    pub fn det(&self) -> i64 {
        self.det
    }

    /// `d = |det A|`, the number of cosets of `Aℤⁿ`.
    pub fn absdet(&self) -> u64 {
        self.det.unsigned_abs()
    }

    /// The diagonal factors `d_j`, for diagonal and conjugated forms.
    pub fn factors(&self) -> Option<&[i64]> {
        match &self.form {
            DilationForm::Diagonal { factors } | DilationForm::Conjugated { factors, .. } => {
                Some(factors)
            }
            DilationForm::General => None,
        }
    }

    pub fn is_diagonal(&self) -> bool {
        matches!(self.form, DilationForm::Diagonal { .. })
    }

    /// True when `A = d·I`; such an `A` commutes with all of `SL(n,ℤ)`.
    pub fn is_scalar(&self) -> bool {
        match &self.form {
            DilationForm::Diagonal { factors } => factors.windows(2).all(|w| w[0] == w[1]),
            _ => false,
        }
    }

    /// Convenience constructor for `diag(factors)`.
    pub fn diagonal(factors: &[i64]) -> Result<Self, LatticeError> {
        validate_dilation(IntMatrix::diagonal(factors), Some(FormHint::Diagonal))
    }
}

fn check_factors(factors: &[i64]) -> Result<(), LatticeError> {
    for (i, &d) in factors.iter().enumerate() {
        if d.unsigned_abs() <= 1 {
            return Err(LatticeError::NotExpanding {
                index: i + 1,
                value: d,
            });
        }
    }
    Ok(())
}

fn require_sl(s: &IntMatrix) -> Result<(), LatticeError> {
    let det = s.det()?;
    if det != 1 {
        return Err(LatticeError::NotUnimodular { det });
    }
    Ok(())
}

/// Validates an integer matrix as a dilation and recognises its form.
///
/// Without a hint a diagonal matrix is classified as
/// [`DilationForm::Diagonal`] and anything else as
/// [`DilationForm::General`]. With [`FormHint::ConjugatedBy`] the matrix
/// must equal `S⁻¹·D·S` for a diagonal expanding `D`.
pub fn validate_dilation(
    matrix: IntMatrix,
    hint: Option<FormHint>,
) -> Result<DilationSpec, LatticeError> {
    let det = matrix.det()?;
    if det == 0 {
        return Err(LatticeError::SingularMatrix);
    }
    let form = match hint {
        Some(FormHint::ConjugatedBy(s)) => {
            if s.dim() != matrix.dim() {
                return Err(LatticeError::DimensionMismatch {
                    expected: matrix.dim(),
                    found: s.dim(),
                });
            }
            require_sl(&s)?;
            // D = S·M·S⁻¹
            let d = s.mul(&matrix)?.mul(&s.unimodular_inverse()?)?;
            if !d.is_diagonal() {
                return Err(LatticeError::NotDiagonal);
            }
            let factors = d.diagonal_entries();
            check_factors(&factors)?;
            DilationForm::Conjugated {
                conjugator: s,
                factors,
            }
        }
        Some(FormHint::Diagonal) if !matrix.is_diagonal() => return Err(LatticeError::NotDiagonal),
        _ if matrix.is_diagonal() => {
            let factors = matrix.diagonal_entries();
            check_factors(&factors)?;
            DilationForm::Diagonal { factors }
        }
        _ => DilationForm::General,
    };
    if det.unsigned_abs() == 1 {
        return Err(LatticeError::UnitDeterminant);
    }
    Ok(DilationSpec {
        entries: matrix,
        form,
        det,
    })
}

/// `S⁻¹·A·S` for any non-singular `S`, computed over the rationals.
/// Fails with [`LatticeError::NonIntegerConjugate`] when the result is not
/// integral.
pub fn rational_conjugate(s: &IntMatrix, a: &IntMatrix) -> Result<IntMatrix, LatticeError> {
    let det = s.det()?;
    if det == 0 {
        return Err(LatticeError::SingularMatrix);
    }
    let num = s.adjugate()?.mul(a)?.mul(s)?;
    let mut out = IntMatrix::zeros(s.dim());
    for i in 0..s.dim() {
        for j in 0..s.dim() {
            let x = num.get(i, j);
            if x % det != 0 {
                return Err(LatticeError::NonIntegerConjugate);
            }
            out.set(i, j, x / det);
        }
    }
    Ok(out)
}

/// Conjugates a diagonal dilation: returns the spec of `M = S⁻¹·A·S`.
pub fn conjugate_spec(s: &IntMatrix, diag: &DilationSpec) -> Result<DilationSpec, LatticeError> {
    let DilationForm::Diagonal { factors } = diag.form() else {
        return Err(LatticeError::NotDiagonal);
    };
    if s.dim() != diag.dim() {
        return Err(LatticeError::DimensionMismatch {
            expected: diag.dim(),
            found: s.dim(),
        });
    }
    require_sl(s)?;
    let m = rational_conjugate(s, diag.matrix())?;
    Ok(DilationSpec {
        entries: m,
        form: DilationForm::Conjugated {
            conjugator: s.clone(),
            factors: factors.clone(),
        },
        det: diag.det(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn diag_222() {
        let spec = validate_dilation(IntMatrix::diagonal(&[2, 2, 2]), None).unwrap();
        assert_eq!(spec.dim(), 3);
        assert_eq!(spec.absdet(), 8);
        assert!(spec.is_diagonal());
        assert!(spec.is_scalar());
    }

    #[test]
    fn diag_12_not_expanding() {
        let err = validate_dilation(IntMatrix::diagonal(&[1, 2]), None).unwrap_err();
        assert_eq!(err, LatticeError::NotExpanding { index: 1, value: 1 });
    }

    #[test]
    fn singular_rejected() {
        let err = validate_dilation(m(&[&[1, 2], &[2, 4]]), None).unwrap_err();
        assert_eq!(err, LatticeError::SingularMatrix);
    }

    #[test]
    fn conjugated_example() {
        // S⁻¹·diag(2,4)·S for S = ((1,1),(0,1)) is ((2,-2),(0,4));
        // the inverse conjugator gives ((2,2),(0,4)).
        let d = DilationSpec::diagonal(&[2, 4]).unwrap();
        let s = m(&[&[1, 1], &[0, 1]]);
        let spec = conjugate_spec(&s, &d).unwrap();
        assert_eq!(spec.matrix(), &m(&[&[2, -2], &[0, 4]]));
        assert_eq!(spec.absdet(), 8);

        let s_inv = m(&[&[1, -1], &[0, 1]]);
        let spec = conjugate_spec(&s_inv, &d).unwrap();
        assert_eq!(spec.matrix(), &m(&[&[2, 2], &[0, 4]]));

        let again = validate_dilation(m(&[&[2, 2], &[0, 4]]), Some(FormHint::ConjugatedBy(s_inv))).unwrap();
        assert_eq!(again.factors(), Some(&[2, 4][..]));
    }

    #[test]
    fn identity_conjugator_is_noop() {
        let d = DilationSpec::diagonal(&[3, -2]).unwrap();
        let spec = conjugate_spec(&IntMatrix::identity(2), &d).unwrap();
        assert_eq!(spec.matrix(), d.matrix());
    }

    #[test]
    fn singular_conjugator_rejected() {
        let d = DilationSpec::diagonal(&[2, 2]).unwrap();
        let err = conjugate_spec(&m(&[&[1, 1], &[1, 1]]), &d).unwrap_err();
        assert_eq!(err, LatticeError::NotUnimodular { det: 0 });
        let err = conjugate_spec(&m(&[&[0, 1], &[1, 0]]), &d).unwrap_err();
        assert_eq!(err, LatticeError::NotUnimodular { det: -1 });
    }

    #[test]
    fn rational_conjugate_detects_fractions() {
        let s = IntMatrix::diagonal(&[2, 1]);
        let a = m(&[&[1, 1], &[0, 1]]);
        assert_eq!(rational_conjugate(&s, &a), Err(LatticeError::NonIntegerConjugate));
        assert!(rational_conjugate(&s, &IntMatrix::diagonal(&[3, 5])).is_ok());
    }

    #[test]
    fn quincunx_is_general() {
        let spec = validate_dilation(m(&[&[1, 1], &[-1, 1]]), None).unwrap();
        assert_eq!(spec.form(), &DilationForm::General);
        assert_eq!(spec.absdet(), 2);
    }

    #[test]
    fn unit_determinant_rejected() {
        let err = validate_dilation(m(&[&[1, 1], &[0, 1]]), None).unwrap_err();
        assert_eq!(err, LatticeError::UnitDeterminant);
    }
}
