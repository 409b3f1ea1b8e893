//! Multivariate trigonometric polynomials with a rational period.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::FilterError;

/// `e(x) = exp(2πix)`.
#[inline]
pub fn e(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * x)
}

/// `x ↦ Σ_k c_k e(k·x / P)` over a finite set of integer frequency vectors.
///
/// The period `P` is a positive rational shared by all variables.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPoly {
    n: usize,
    period: Ratio<i64>,
    terms: BTreeMap<Vec<i64>, Complex64>,
}

impl TrigPoly {
    pub fn zero(n: usize, period: Ratio<i64>) -> Result<Self, FilterError> {
        if period <= Ratio::from_integer(0) {
            return Err(FilterError::NonPositivePeriod);
        }
        Ok(TrigPoly {
            n,
            period,
            terms: BTreeMap::new(),
        })
    }

    /// Period-1 polynomial from `(frequency, coefficient)` pairs; repeated
    /// frequencies add up.
    pub fn from_terms(
        n: usize,
        terms: impl IntoIterator<Item = (Vec<i64>, Complex64)>,
    ) -> Result<Self, FilterError> {
        TrigPoly::with_period(n, Ratio::from_integer(1), terms)
    }

    pub fn with_period(
        n: usize,
        period: Ratio<i64>,
        terms: impl IntoIterator<Item = (Vec<i64>, Complex64)>,
    ) -> Result<Self, FilterError> {
        let mut p = TrigPoly::zero(n, period)?;
        for (k, c) in terms {
            if k.len() != n {
                return Err(FilterError::DimensionMismatch {
                    expected: n,
                    found: k.len(),
                });
            }
            p.add_term(k, c);
        }
        Ok(p)
    }

    pub fn constant(n: usize, c: Complex64) -> Self {
        let mut p = TrigPoly::zero(n, Ratio::from_integer(1)).expect("period 1");
        p.add_term(vec![0; n], c);
        p
    }

    fn add_term(&mut self, k: Vec<i64>, c: Complex64) {
        let slot = self.terms.entry(k).or_insert(Complex64::new(0.0, 0.0));
        *slot += c;
        // exact zeros only; tiny values are kept as data
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn period(&self) -> Ratio<i64> {
        self.period
    }

    pub fn period_f64(&self) -> f64 {
        *self.period.numer() as f64 / *self.period.denom() as f64
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &Complex64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, k: &[i64]) -> Complex64 {
        self.terms.get(k).copied().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        debug_assert_eq!(x.len(), self.n);
        let inv = 1.0 / self.period_f64();
        self.terms
            .iter()
            .map(|(k, c)| {
                let phase: f64 = k.iter().zip(x).map(|(&ki, &xi)| ki as f64 * xi).sum();
                c * e(phase * inv)
            })
            .sum()
    }

    pub fn eval1(&self, x: f64) -> Complex64 {
        self.eval(&[x])
    }

    pub fn scale(&self, s: Complex64) -> TrigPoly {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c *= s;
        }
        out
    }

    fn same_shape(&self, other: &TrigPoly) -> Result<(), FilterError> {
        if self.n != other.n {
            return Err(FilterError::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        if self.period != other.period {
            return Err(FilterError::PeriodMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &TrigPoly) -> Result<TrigPoly, FilterError> {
        self.same_shape(other)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), *c);
        }
        Ok(out)
    }

    pub fn mul(&self, other: &TrigPoly) -> Result<TrigPoly, FilterError> {
        self.same_shape(other)?;
        let mut out = TrigPoly::zero(self.n, self.period)?;
        for (k1, c1) in &self.terms {
            for (k2, c2) in &other.terms {
                let k: Vec<i64> = k1.iter().zip(k2).map(|(a, b)| a + b).collect();
                out.add_term(k, c1 * c2);
            }
        }
        Ok(out)
    }

    /// `x ↦ p(d·x)`. For `p` of period `P` the result has period `P/|d|`
    /// and frequencies multiplied by `sign(d)`.
    pub fn compose_scale(&self, d: i64) -> Result<TrigPoly, FilterError> {
        if d == 0 {
            return Err(FilterError::InvalidFactor(0));
        }
        let period = self.period / Ratio::from_integer(d.abs());
        let s = d.signum();
        TrigPoly::with_period(
            self.n,
            period,
            self.terms
                .iter()
                .map(|(k, c)| (k.iter().map(|&x| x * s).collect(), *c)),
        )
    }

    /// Lifts a one-variable polynomial to variable `axis` of `n`.
    pub fn embed(&self, n: usize, axis: usize) -> Result<TrigPoly, FilterError> {
        if self.n != 1 || axis >= n {
            return Err(FilterError::DimensionMismatch {
                expected: 1,
                found: self.n,
            });
        }
        TrigPoly::with_period(
            n,
            self.period,
            self.terms.iter().map(|(k, c)| {
                let mut f = vec![0; n];
                f[axis] = k[0];
                (f, *c)
            }),
        )
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    freq: Vec<i64>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct TrigRepr {
    n: usize,
    period: Ratio<i64>,
    terms: Vec<TermRepr>,
}

impl Serialize for TrigPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        TrigRepr {
            n: self.n,
            period: self.period,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| TermRepr {
                    freq: k.clone(),
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TrigPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let r = TrigRepr::deserialize(deserializer)?;
        TrigPoly::with_period(
            r.n,
            r.period,
            r.terms
                .into_iter()
                .map(|t| (t.freq, Complex64::new(t.re, t.im))),
        )
        .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation_and_period() {
        let p = TrigPoly::from_terms(1, [(vec![0], Complex64::new(1.0, 0.0)), (vec![1], Complex64::new(1.0, 0.0))]).unwrap();
        assert!((p.eval1(0.0) - Complex64::new(2.0, 0.0)).norm() < 1e-15);
        assert!(p.eval1(0.5).norm() < 1e-15);
        for x in [0.1, 0.37, -2.2] {
            assert!((p.eval1(x) - p.eval1(x + 1.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn compose_scale_rescales_period() {
        let mu = TrigPoly::with_period(1, Ratio::from_integer(3), [(vec![1], Complex64::new(1.0, 0.0))]).unwrap();
        let m = mu.compose_scale(-3).unwrap();
        assert_eq!(m.period(), Ratio::from_integer(1));
        assert_eq!(m.coeff(&[-1]), Complex64::new(1.0, 0.0));
        for x in [0.2, 0.9] {
            assert!((m.eval1(x) - mu.eval1(-3.0 * x)).norm() < 1e-12);
        }
    }

    #[test]
    fn product_in_separate_variables() {
        let p = TrigPoly::from_terms(1, [(vec![1], Complex64::new(2.0, 0.0))]).unwrap();
        let q = p.embed(2, 0).unwrap().mul(&p.embed(2, 1).unwrap()).unwrap();
        let x = [0.3, -0.7];
        assert!((q.eval(&x) - p.eval1(x[0]) * p.eval1(x[1])).norm() < 1e-12);
    }

    #[test]
    fn json_round_trip() {
        let p = TrigPoly::with_period(1, Ratio::new(3, 2), [(vec![2], Complex64::new(0.5, -1.0))]).unwrap();
        let text = serde_json::to_string(&p).unwrap();
        let back: TrigPoly = serde_json::from_str(&text).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn bad_period_rejected() {
        assert!(TrigPoly::zero(1, Ratio::from_integer(0)).is_err());
    }
}
