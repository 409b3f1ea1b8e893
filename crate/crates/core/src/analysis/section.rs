//! Sections: evaluable descriptions of functions on `ℝⁿ` (frequency side).

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::decay::{DecayModel, Envelope};
use super::AnalysisError;
use crate::filters::{e, TrigPoly};
use crate::lattice::{DilationSpec, IntMatrix};

/// `sin(πx)/(πx)`.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - (PI * x).powi(2) / 6.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

/// `ν(t) = t⁴(35 − 84t + 70t² − 20t³)` clamped to `[0, 1]`; it satisfies
/// `ν(t) + ν(1 − t) = 1`.
pub fn meyer_nu(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        t.powi(4) * (35.0 - 84.0 * t + 70.0 * t * t - 20.0 * t.powi(3))
    }
}

/// Band-limited low-pass profile: `1` on `|x| ≤ 1/3`, zero beyond `2/3`.
pub fn meyer_phi(x: f64) -> f64 {
    let a = x.abs();
    if a <= 1.0 / 3.0 {
        1.0
    } else if a >= 2.0 / 3.0 {
        0.0
    } else {
        (PI / 2.0 * meyer_nu(3.0 * a - 1.0)).cos()
    }
}

/// `e(x/2)·φ(x/2)·(φ(x+1) + φ(x−1))`, supported in `1/3 ≤ |x| ≤ 4/3`.
pub fn meyer_psi(x: f64) -> Complex64 {
    let amp = meyer_phi(x / 2.0) * (meyer_phi(x + 1.0) + meyer_phi(x - 1.0));
    if amp == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    e(x / 2.0) * amp
}

/// Smooth bump `exp(1 − 1/(1 − u²))` on `|u| < 1`, with value 1 at 0.
pub fn bump(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - u * u)).exp()
    }
}

/// Real matrices derived from a dilated wrapper, computed on first use.
#[derive(Clone, Debug)]
struct DilationCache {
    /// `(Aᵗ)^(−i)`, row-major.
    map: Vec<f64>,
    /// `(Aᵗ)^i`, row-major.
    inverse: Vec<f64>,
    /// `|det A|^(−i/2)`.
    scale: f64,
}

fn transpose_power(a: &IntMatrix, power: i32) -> Result<(Vec<f64>, Vec<f64>), AnalysisError> {
    let p = a.transpose().pow(power.unsigned_abs())?;
    let (forward, backward) = (p.to_f64(), p.inverse_f64()?);
    // forward = (Aᵗ)^|i|
    Ok(if power >= 0 {
        (backward, forward)
    } else {
        (forward, backward)
    })
}

/// A function on `ℝⁿ` described as an expression tree.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Section {
    /// Haar scaling function for the factor `d` (1-D); for `d > 0` it is
    /// `(e(x) − 1)/(2πix)`.
    Haar { d: i64 },
    Trig { poly: TrigPoly },
    /// `Π_k f_k(x_{block k})` over consecutive blocks of variables.
    Tensor { factors: Vec<Section> },
    /// `Π_{j=1}^{J} mask((Aᵗ)^(−j) x) / √|det A|`.
    TruncatedProduct {
        mask: TrigPoly,
        depth: u32,
        matrix: IntMatrix,
        #[serde(skip)]
        cache: OnceLock<Vec<f64>>,
    },
    /// `|det A|^(−i/2) · inner((Aᵗ)^(−i) x)`.
    Dilated {
        matrix: IntMatrix,
        power: i32,
        inner: Box<Section>,
        #[serde(skip)]
        cache: OnceLock<DilationCacheSlot>,
    },
    /// `e(−v·x) · inner(x)`.
    Modulated { v: Vec<i64>, inner: Box<Section> },
    /// `inner(x − offset)`.
    Translated { offset: Vec<f64>, inner: Box<Section> },
    /// `inner(x_1 / f_1, …, x_n / f_n)`.
    Stretched { factors: Vec<f64>, inner: Box<Section> },
    Scaled { factor: Complex64, inner: Box<Section> },
    Sum { terms: Vec<Section> },
    /// Pointwise product; a periodic factor realises the module action.
    Product { factors: Vec<Section> },
    /// Band-limited scaling profile [`meyer_phi`] (1-D).
    MeyerScaling,
    /// Band-limited wavelet profile [`meyer_psi`] (1-D).
    MeyerWavelet,
    /// `Π_k bump((x_k − c_k)/radius)`.
    Bump { center: Vec<f64>, radius: f64 },
    /// `Σ_k e(−k a·s) bump((t − c − kq)/width)`, an element of `X(q, a)`.
    QuasiBump {
        q: i64,
        twists: Vec<i64>,
        center: f64,
        width: f64,
    },
    /// `inner`, declared to lie in `X(q, twists)`.
    Claim {
        q: i64,
        twists: Vec<i64>,
        inner: Box<Section>,
    },
}

/// Opaque wrapper so the cache type can stay private.
#[derive(Clone, Debug)]
pub struct DilationCacheSlot(DilationCache);

fn complex(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn apply(m: &[f64], x: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|i| (0..n).map(|j| m[i * n + j] * x[j]).sum())
        .collect()
}

impl Section {
    pub fn haar(d: i64) -> Self {
        Section::Haar { d }
    }

    pub fn trig(poly: TrigPoly) -> Self {
        Section::Trig { poly }
    }

    pub fn tensor(factors: Vec<Section>) -> Self {
        Section::Tensor { factors }
    }

    pub fn truncated_product(mask: TrigPoly, depth: u32, matrix: IntMatrix) -> Self {
        Section::TruncatedProduct {
            mask,
            depth,
            matrix,
            cache: OnceLock::new(),
        }
    }

    pub fn translated(self, offset: Vec<f64>) -> Self {
        Section::Translated {
            offset,
            inner: Box::new(self),
        }
    }

    pub fn stretched(self, factors: Vec<f64>) -> Self {
        Section::Stretched {
            factors,
            inner: Box::new(self),
        }
    }

    pub fn scaled(self, factor: Complex64) -> Self {
        Section::Scaled {
            factor,
            inner: Box::new(self),
        }
    }

    pub fn times(self, other: Section) -> Self {
        Section::Product {
            factors: vec![self, other],
        }
    }

    pub fn plus(self, other: Section) -> Self {
        Section::Sum {
            terms: vec![self, other],
        }
    }

    pub fn claim(self, q: i64, twists: Vec<i64>) -> Self {
        Section::Claim {
            q,
            twists,
            inner: Box::new(self),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Section::Haar { .. } | Section::MeyerScaling | Section::MeyerWavelet => 1,
            Section::Trig { poly } => poly.dim(),
            Section::Tensor { factors } => factors.iter().map(Section::dim).sum(),
            Section::TruncatedProduct { mask, .. } => mask.dim(),
            Section::Dilated { inner, .. }
            | Section::Modulated { inner, .. }
            | Section::Translated { inner, .. }
            | Section::Stretched { inner, .. }
            | Section::Scaled { inner, .. }
            | Section::Claim { inner, .. } => inner.dim(),
            Section::Sum { terms: list } | Section::Product { factors: list } => {
                list.first().map_or(0, Section::dim)
            }
            Section::Bump { center, .. } => center.len(),
            Section::QuasiBump { twists, .. } => twists.len() + 1,
        }
    }

    /// Structural checks: matching dimensions, nonzero factors, `J ≥ 1`.
    pub fn validate(&self) -> Result<(), AnalysisError> {
        let n = self.dim();
        let need = |found: usize| {
            if found == n {
                Ok(())
            } else {
                Err(AnalysisError::DimensionMismatch { expected: n, found })
            }
        };
        match self {
            Section::Haar { d } => {
                if d.unsigned_abs() <= 1 {
                    return Err(AnalysisError::InvalidSection(format!("Haar factor {d}")));
                }
            }
            Section::Trig { .. } | Section::MeyerScaling | Section::MeyerWavelet => {}
            Section::Tensor { factors } => {
                if factors.is_empty() {
                    return Err(AnalysisError::InvalidSection("empty tensor".into()));
                }
                factors.iter().try_for_each(Section::validate)?;
            }
            Section::TruncatedProduct { depth, matrix, .. } => {
                if *depth < 1 {
                    return Err(AnalysisError::DepthZero);
                }
                need(matrix.dim())?;
                if matrix.det()? == 0 {
                    return Err(AnalysisError::InvalidSection("singular matrix".into()));
                }
            }
            Section::Dilated { matrix, inner, .. } => {
                need(matrix.dim())?;
                if matrix.det()? == 0 {
                    return Err(AnalysisError::InvalidSection("singular matrix".into()));
                }
                inner.validate()?;
            }
            Section::Modulated { v, inner } => {
                need(v.len())?;
                inner.validate()?;
            }
            Section::Translated { offset, inner } => {
                need(offset.len())?;
                inner.validate()?;
            }
            Section::Stretched { factors, inner } => {
                need(factors.len())?;
                if factors.iter().any(|f| *f == 0.0 || !f.is_finite()) {
                    return Err(AnalysisError::InvalidSection("stretch factor".into()));
                }
                inner.validate()?;
            }
            Section::Scaled { inner, .. } | Section::Claim { inner, .. } => inner.validate()?,
            Section::Sum { terms: list } | Section::Product { factors: list } => {
                if list.is_empty() {
                    return Err(AnalysisError::InvalidSection("empty sum or product".into()));
                }
                for s in list {
                    need(s.dim())?;
                    s.validate()?;
                }
            }
            Section::Bump { radius, .. } => {
                if *radius <= 0.0 {
                    return Err(AnalysisError::InvalidSection("bump radius".into()));
                }
            }
            Section::QuasiBump { q, width, .. } => {
                if *q < 1 || *width <= 0.0 {
                    return Err(AnalysisError::InvalidSection("quasi-bump q or width".into()));
                }
            }
        }
        Ok(())
    }

    fn dilation_cache<'a>(
        matrix: &IntMatrix,
        power: i32,
        cache: &'a OnceLock<DilationCacheSlot>,
    ) -> &'a DilationCache {
        &cache
            .get_or_init(|| {
                let (map, inverse) =
                    transpose_power(matrix, power).expect("validated dilation matrix");
                let d = matrix.det().expect("validated").unsigned_abs() as f64;
                DilationCacheSlot(DilationCache {
                    map,
                    inverse,
                    scale: d.powf(-(power as f64) / 2.0),
                })
            })
            .0
    }

    /// Evaluates the section at `x ∈ ℝⁿ`.
    pub fn eval(&self, x: &[f64]) -> Complex64 {
        match self {
            Section::Haar { d } => {
                let t = x[0];
                let big = d.unsigned_abs() as f64;
                let phase = if *d > 0 {
                    t / 2.0
                } else {
                    t * (big - 1.0) / (2.0 * (big + 1.0))
                };
                e(phase) * sinc(t)
            }
            Section::Trig { poly } => poly.eval(x),
            Section::Tensor { factors } => {
                let mut offset = 0;
                let mut out = complex(1.0);
                for f in factors {
                    let k = f.dim();
                    out *= f.eval(&x[offset..offset + k]);
                    offset += k;
                }
                out
            }
            Section::TruncatedProduct {
                mask,
                depth,
                matrix,
                cache,
            } => {
                let inv = cache.get_or_init(|| {
                    matrix.transpose().inverse_f64().expect("validated matrix")
                });
                let norm = 1.0 / (matrix.det().expect("validated").unsigned_abs() as f64).sqrt();
                let mut y = x.to_vec();
                let mut out = complex(1.0);
                for _ in 0..*depth {
                    y = apply(inv, &y);
                    out *= mask.eval(&y) * norm;
                }
                out
            }
            Section::Dilated {
                matrix,
                power,
                inner,
                cache,
            } => {
                let c = Section::dilation_cache(matrix, *power, cache);
                inner.eval(&apply(&c.map, x)) * c.scale
            }
            Section::Modulated { v, inner } => {
                let dot: f64 = v.iter().zip(x).map(|(&a, &b)| a as f64 * b).sum();
                e(-dot) * inner.eval(x)
            }
            Section::Translated { offset, inner } => {
                let y: Vec<f64> = x.iter().zip(offset).map(|(a, b)| a - b).collect();
                inner.eval(&y)
            }
            Section::Stretched { factors, inner } => {
                let y: Vec<f64> = x.iter().zip(factors).map(|(a, f)| a / f).collect();
                inner.eval(&y)
            }
            Section::Scaled { factor, inner } => factor * inner.eval(x),
            Section::Sum { terms } => terms.iter().map(|s| s.eval(x)).sum(),
            Section::Product { factors } => factors.iter().map(|s| s.eval(x)).product(),
            Section::MeyerScaling => complex(meyer_phi(x[0])),
            Section::MeyerWavelet => meyer_psi(x[0]),
            Section::Bump { center, radius } => complex(
                x.iter()
                    .zip(center)
                    .map(|(a, c)| bump((a - c) / radius))
                    .product(),
            ),
            Section::QuasiBump {
                q,
                twists,
                center,
                width,
            } => {
                let n = twists.len();
                let (s, t) = (&x[..n], x[n]);
                let q = *q as f64;
                let lo = ((t - center - width) / q).ceil() as i64;
                let hi = ((t - center + width) / q).floor() as i64;
                let phase: f64 = twists.iter().zip(s).map(|(&a, &b)| a as f64 * b).sum();
                (lo..=hi)
                    .map(|k| e(-(k as f64) * phase) * bump((t - center - k as f64 * q) / width))
                    .sum()
            }
            Section::Claim { inner, .. } => inner.eval(x),
        }
    }

    /// Pointwise bound used for lattice-sum tails.
    pub fn decay(&self) -> DecayModel {
        let n = self.dim();
        match self {
            Section::Haar { .. } => {
                DecayModel::radial(1, Envelope::power_law(1.0, 1.0 / PI, 1.0, 0.0))
            }
            Section::Trig { poly } => {
                DecayModel::bounded(n, poly.terms().map(|(_, c)| c.norm()).sum())
            }
            Section::Tensor { factors } => {
                let mut it = factors.iter();
                let first = it.next().expect("validated tensor").decay();
                it.fold(first, |acc, f| acc.tensor(&f.decay()))
            }
            Section::TruncatedProduct {
                mask,
                depth,
                matrix,
                ..
            } => {
                let norm = (matrix.det().map_or(1, |d| d.unsigned_abs()) as f64).sqrt();
                let per: f64 = mask.terms().map(|(_, c)| c.norm()).sum::<f64>() / norm;
                DecayModel::bounded(n, per.powi(*depth as i32))
            }
            Section::Dilated {
                matrix,
                power,
                inner,
                cache,
            } => {
                let c = Section::dilation_cache(matrix, *power, cache);
                inner.decay().linear_map(&c.inverse).scale(c.scale)
            }
            Section::Modulated { inner, .. } | Section::Claim { inner, .. } => inner.decay(),
            Section::Translated { offset, inner } => inner.decay().shift(offset),
            Section::Stretched { factors, inner } => {
                let s: Vec<f64> = factors.iter().map(|f| f.abs()).collect();
                inner.decay().stretch(&s)
            }
            Section::Scaled { factor, inner } => inner.decay().scale(factor.norm()),
            Section::Sum { terms } => terms
                .iter()
                .map(Section::decay)
                .reduce(|a, b| a.sum(&b))
                .unwrap_or_else(|| DecayModel::zero(n)),
            Section::Product { factors } => factors
                .iter()
                .map(Section::decay)
                .reduce(|a, b| a.product(&b))
                .unwrap_or_else(|| DecayModel::bounded(n, 1.0)),
            Section::MeyerScaling => DecayModel::radial(1, Envelope::compact(1.0, 2.0 / 3.0)),
            Section::MeyerWavelet => DecayModel::radial(1, Envelope::compact(1.0, 4.0 / 3.0)),
            Section::Bump { center, radius } => DecayModel::separable(
                center
                    .iter()
                    .map(|c| Envelope::compact(1.0, c.abs() + radius))
                    .collect(),
            ),
            Section::QuasiBump { q, width, .. } => {
                let overlap = (2.0 * width / *q as f64).floor() + 1.0;
                DecayModel::bounded(n, overlap)
            }
        }
    }

    /// The declared `X(q, a)` membership, propagated through operations that
    /// preserve it.
    pub fn quasi_period(&self) -> Option<(i64, Vec<i64>)> {
        match self {
            Section::Claim { q, twists, .. } => Some((*q, twists.clone())),
            Section::QuasiBump { q, twists, .. } => Some((*q, twists.clone())),
            Section::Scaled { inner, .. } | Section::Modulated { inner, .. } => inner.quasi_period(),
            Section::Sum { terms } => {
                let first = terms.first()?.quasi_period()?;
                terms
                    .iter()
                    .all(|t| t.quasi_period().as_ref() == Some(&first))
                    .then_some(first)
            }
            Section::Product { factors } => {
                let mut claim = None;
                for f in factors {
                    match (f.quasi_period(), f.is_integer_periodic()) {
                        (_, true) => {}
                        (Some(c), false) if claim.is_none() => claim = Some(c),
                        _ => return None,
                    }
                }
                claim
            }
            _ => None,
        }
    }

    /// True for trigonometric polynomials of integer period, which are
    /// `ℤⁿ`-periodic.
    pub fn is_integer_periodic(&self) -> bool {
        match self {
            Section::Trig { poly } => poly.period().is_integer(),
            Section::Scaled { inner, .. } | Section::Modulated { inner, .. } => {
                inner.is_integer_periodic()
            }
            Section::Sum { terms: list } | Section::Product { factors: list } => {
                list.iter().all(Section::is_integer_periodic)
            }
            _ => false,
        }
    }
}

/// Frequency-domain dilation `Dⁱ`: `x ↦ d^(−i/2) s((Aᵗ)^(−i) x)`.
pub fn dilate(spec: &DilationSpec, s: Section, i: i32) -> Section {
    if i == 0 {
        return s;
    }
    Section::Dilated {
        matrix: spec.matrix().clone(),
        power: i,
        inner: Box::new(s),
        cache: OnceLock::new(),
    }
}

/// `ε_v`: multiplication by `e(−v·x)`.
pub fn modulate(v: &[i64], s: Section) -> Section {
    if v.iter().all(|&x| x == 0) {
        return s;
    }
    Section::Modulated {
        v: v.to_vec(),
        inner: Box::new(s),
    }
}

/// The Haar low-pass filter `m₀` for the factor `d` as a section.
pub fn haar_mask(d: i64) -> Result<TrigPoly, AnalysisError> {
    Ok(crate::filters::haar_filter_bank(d, None)?.filters[0].clone())
}

/// Tensor product of Haar scaling functions for the diagonal factors.
pub fn haar_tensor(factors: &[i64]) -> Section {
    if factors.len() == 1 {
        return Section::haar(factors[0]);
    }
    Section::tensor(factors.iter().map(|&d| Section::haar(d)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn haar_closed_form_values() {
        let h = Section::haar(2);
        assert!(close(h.eval(&[0.0]), complex(1.0), 1e-15));
        assert!((h.eval(&[0.5]).norm() - 2.0 / PI).abs() < 1e-15);
        let x = 0.37;
        let direct = (e(x) - 1.0) / Complex64::new(0.0, 2.0 * PI * x);
        assert!(close(h.eval(&[x]), direct, 1e-14));
    }

    #[test]
    fn negative_haar_matches_product() {
        for d in [-2i64, -3] {
            let mask = haar_mask(d).unwrap();
            let tp = Section::truncated_product(mask, 40, IntMatrix::diagonal(&[d]));
            let h = Section::haar(d);
            for k in -40..=40 {
                let x = k as f64 * 0.2;
                assert!(close(tp.eval(&[x]), h.eval(&[x]), 1e-9), "d = {d}, x = {x}");
            }
        }
    }

    #[test]
    fn depth_zero_rejected() {
        let tp = Section::truncated_product(haar_mask(2).unwrap(), 0, IntMatrix::diagonal(&[2]));
        assert!(matches!(tp.validate(), Err(AnalysisError::DepthZero)));
    }

    #[test]
    fn dilation_of_haar() {
        let spec = DilationSpec::diagonal(&[2]).unwrap();
        let d = dilate(&spec, Section::haar(2), 1);
        let x = 0.9;
        let expected = Section::haar(2).eval(&[x / 2.0]) / 2f64.sqrt();
        assert!(close(d.eval(&[x]), expected, 1e-15));
    }

    #[test]
    fn meyer_partition_of_unity() {
        for k in 0..100 {
            let x = k as f64 / 100.0;
            let s: f64 = (-3..=3).map(|p| meyer_phi(x - p as f64).powi(2)).sum();
            assert!((s - 1.0).abs() < 1e-14);
            let w: f64 = (-3..=3).map(|p| meyer_psi(x - p as f64).norm_sqr()).sum();
            assert!((w - 1.0).abs() < 1e-14, "x = {x}: {w}");
            let cross: Complex64 = (-3..=3)
                .map(|p| meyer_psi(x - p as f64).conj() * meyer_phi(x - p as f64))
                .sum();
            assert!(cross.norm() < 1e-14);
        }
    }

    #[test]
    fn quasi_bump_is_quasi_periodic() {
        let f = Section::QuasiBump {
            q: 2,
            twists: vec![3],
            center: 0.2,
            width: 1.5,
        };
        for (s, t) in [(0.1, 0.4), (0.77, -1.3), (0.5, 2.9)] {
            let lhs = f.eval(&[s, t - 2.0]);
            let rhs = e(3.0 * s) * f.eval(&[s, t]);
            assert!(close(lhs, rhs, 1e-14));
            assert!(close(f.eval(&[s + 1.0, t]), f.eval(&[s, t]), 1e-12));
        }
    }

    #[test]
    fn json_tree_round_trip() {
        let spec = DilationSpec::diagonal(&[2, 2]).unwrap();
        let s = dilate(&spec, modulate(&[1, 0], haar_tensor(&[2, 2])), 1);
        let text = serde_json::to_string(&s).unwrap();
        let back: Section = serde_json::from_str(&text).unwrap();
        let x = [0.3, -1.7];
        assert!(close(s.eval(&x), back.eval(&x), 1e-15));
        assert!(text.contains(r#""kind":"dilated""#));
    }
}
