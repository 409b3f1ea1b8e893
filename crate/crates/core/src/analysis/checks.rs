use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::grid::{samples_csv, BoxGrid, TorusGrid};
use super::section::Section;
use super::AnalysisError;
use crate::filters::{cartesian, e};
use crate::lattice::DilationSpec;
use crate::serde_float;

/// Lattice offsets `p` with `‖p‖∞ ≤ R` that can reach `[0,1)ⁿ` from a
/// per-axis support radius.
pub(crate) fn offsets(support: &[Option<f64>], radius: u64) -> Vec<Vec<i64>> {
    let r = radius as i64;
    let ranges: Vec<(i64, i64)> = support
        .iter()
        .map(|s| match s {
            Some(rho) => {
                let c = rho.ceil() as i64;
                ((-c).max(-r), (c + 1).min(r))
            }
            None => (-r, r),
        })
        .collect();
    if ranges.iter().any(|(a, b)| a > b) {
        return Vec::new();
    }
    let sizes: Vec<usize> = ranges.iter().map(|(a, b)| (b - a + 1) as usize).collect();
    cartesian(&sizes)
        .into_iter()
        .map(|k| k.iter().zip(&ranges).map(|(&i, (a, _))| a + i as i64).collect())
        .collect()
}

/// `Σ_p f(t − p)` at every grid point over the given offsets.
pub fn lattice_sum<F>(grid: &TorusGrid, offsets: &[Vec<i64>], f: F) -> Vec<Complex64>
where
    F: Fn(&[f64]) -> Complex64 + Sync,
{
    grid.points()
        .par_iter()
        .map(|t| {
            let mut y = vec![0.0; t.len()];
            offsets
                .iter()
                .map(|p| {
                    for k in 0..t.len() {
                        y[k] = t[k] - p[k] as f64;
                    }
                    f(&y)
                })
                .sum()
        })
        .collect()
}

fn same_dim(a: &Section, b: usize) -> Result<usize, AnalysisError> {
    let n = a.dim();
    if n != b {
        return Err(AnalysisError::DimensionMismatch {
            expected: n,
            found: b,
        });
    }
    Ok(n)
}

/// Samples of a truncated `C(𝕋ⁿ)`-valued inner product.
#[derive(Clone, Debug, Serialize)]
pub struct LatticeSumResult {
    pub grid: TorusGrid,
    pub values: Vec<Complex64>,
    pub radius: u64,
    /// Uniform bound on the omitted terms.
    #[serde(serialize_with = "serde_float::serialize")]
    pub tail_bound: f64,
}

impl LatticeSumResult {
    pub fn to_csv(&self) -> String {
        samples_csv(&self.grid.points(), &self.values)
    }

    /// `max_t |value(t) − target|`.
    pub fn max_deviation(&self, target: Complex64) -> f64 {
        self.values
            .iter()
            .map(|v| (v - target).norm())
            .fold(0.0, f64::max)
    }
}

/// `⟨s₁, s₂⟩(t) = Σ_{‖p‖∞ ≤ R} conj(s₁(t − p)) s₂(t − p)`.
pub fn rigged_inner_product(
    s1: &Section,
    s2: &Section,
    grid: &TorusGrid,
    radius: u64,
) -> Result<LatticeSumResult, AnalysisError> {
    s1.validate()?;
    s2.validate()?;
    let n = same_dim(s1, s2.dim())?;
    same_dim(s1, grid.n)?;
    let model = s1.decay().product(&s2.decay());
    let tail = model.lattice_tail(radius);
    if !tail.is_finite() {
        return Err(AnalysisError::NonSummableDecay);
    }
    debug_assert_eq!(model.n, n);
    let offs = offsets(&model.support_box(), radius);
    let values = lattice_sum(grid, &offs, |y| s1.eval(y).conj() * s2.eval(y));
    Ok(LatticeSumResult {
        grid: grid.clone(),
        values,
        radius,
        tail_bound: tail,
    })
}

/// Outcome of [`xi_membership`].
#[derive(Clone, Debug, Serialize)]
pub struct XiReport {
    pub grid_points: usize,
    pub radius: u64,
    pub tol: f64,
    pub sup_sum: f64,
    pub inf_sum: f64,
    #[serde(serialize_with = "serde_float::serialize")]
    pub tail_bound: f64,
    pub pass: bool,
}

/// Truncated `Σ_p |s(t − p)|²` over the grid; passes iff the tail bound is
/// below `tol`. A non-summable model is reported as an infinite tail.
pub fn xi_membership(
    s: &Section,
    grid: &TorusGrid,
    radius: u64,
    tol: f64,
) -> Result<XiReport, AnalysisError> {
    s.validate()?;
    same_dim(s, grid.n)?;
    let model = s.decay().product(&s.decay());
    let tail = model.lattice_tail(radius);
    let offs = offsets(&model.support_box(), radius);
    let values = lattice_sum(grid, &offs, |y| Complex64::new(s.eval(y).norm_sqr(), 0.0));
    let sup_sum = values.iter().map(|v| v.re).fold(f64::NEG_INFINITY, f64::max);
    let inf_sum = values.iter().map(|v| v.re).fold(f64::INFINITY, f64::min);
    Ok(XiReport {
        grid_points: grid.len(),
        radius,
        tol,
        sup_sum,
        inf_sum,
        tail_bound: tail,
        pass: tail < tol,
    })
}

/// `Σ_{k=0}^{q−1} conj(h₁)h₂(s, t − k)` for sections of a common `X(q, a)`.
pub fn module_inner_product(
    h1: &Section,
    h2: &Section,
    grid: &TorusGrid,
) -> Result<LatticeSumResult, AnalysisError> {
    let qa = h1.quasi_period().ok_or(AnalysisError::QuasiPeriodMismatch)?;
    if h2.quasi_period().as_ref() != Some(&qa) {
        return Err(AnalysisError::QuasiPeriodMismatch);
    }
    let n = same_dim(h1, h2.dim())?;
    same_dim(h1, grid.n)?;
    let q = qa.0;
    let offs: Vec<Vec<i64>> = (0..q)
        .map(|k| {
            let mut p = vec![0; n];
            p[n - 1] = k;
            p
        })
        .collect();
    let values = lattice_sum(grid, &offs, |y| h1.eval(y).conj() * h2.eval(y));
    Ok(LatticeSumResult {
        grid: grid.clone(),
        values,
        radius: (q - 1) as u64,
        tail_bound: 0.0,
    })
}

/// Outcome of [`check_refinement`].
#[derive(Clone, Debug, Serialize)]
pub struct RefinementReport {
    pub grid_points: usize,
    pub tol: f64,
    pub max_error: f64,
    pub pass: bool,
}

/// `max_x |γ(Aᵗx) − mask(x)γ(x)/√|det A||` on a box grid.
pub fn check_refinement(
    gamma: &Section,
    mask: &Section,
    spec: &DilationSpec,
    grid: &BoxGrid,
    tol: f64,
) -> Result<RefinementReport, AnalysisError> {
    gamma.validate()?;
    mask.validate()?;
    let n = same_dim(gamma, mask.dim())?;
    same_dim(gamma, spec.dim())?;
    same_dim(gamma, grid.dim())?;
    let at = spec.matrix().transpose();
    let norm = 1.0 / (spec.absdet() as f64).sqrt();
    let max_error = grid
        .points()
        .par_iter()
        .map(|x| {
            let ax: Vec<f64> = (0..n)
                .map(|i| (0..n).map(|j| at.get(i, j) as f64 * x[j]).sum())
                .collect();
            (gamma.eval(&ax) - mask.eval(x) * gamma.eval(x) * norm).norm()
        })
        .reduce(|| 0.0, f64::max);
    Ok(RefinementReport {
        grid_points: grid.len(),
        tol,
        max_error,
        pass: max_error <= tol,
    })
}

/// Outcome of [`check_unit_lattice_norm`].
#[derive(Clone, Debug, Serialize)]
pub struct UnitNormReport {
    pub q: i64,
    pub grid_points: usize,
    pub radius: u64,
    pub tol: f64,
    pub max_deviation: f64,
    #[serde(serialize_with = "serde_float::serialize")]
    pub tail_bound: f64,
    pub pass: bool,
}

/// `Σ_{m ∈ ℤⁿ⁻¹ × qℤ} |γ(x − m)|² = 1`, checked on the grid after rescaling
/// the last variable by `q`.
pub fn check_unit_lattice_norm(
    gamma: &Section,
    q: i64,
    grid: &TorusGrid,
    radius: u64,
    tol: f64,
) -> Result<UnitNormReport, AnalysisError> {
    if q < 1 {
        return Err(AnalysisError::InvalidSection(format!("q = {q}")));
    }
    let n = same_dim(gamma, grid.n)?;
    let mut factors = vec![1.0; n];
    factors[n - 1] = 1.0 / q as f64;
    let stretched = gamma.clone().stretched(factors);
    let ip = rigged_inner_product(&stretched, &stretched, grid, radius)?;
    let max_deviation = ip.max_deviation(Complex64::new(1.0, 0.0));
    Ok(UnitNormReport {
        q,
        grid_points: grid.len(),
        radius,
        tol,
        max_deviation,
        tail_bound: ip.tail_bound,
        pass: max_deviation <= tol + ip.tail_bound,
    })
}

/// Outcome of [`check_quasi_periodicity`].
#[derive(Clone, Debug, Serialize)]
pub struct QuasiPeriodReport {
    pub q: i64,
    pub twists: Vec<i64>,
    pub grid_points: usize,
    pub tol: f64,
    pub max_error: f64,
    pub pass: bool,
}

/// `max |f(s, t − q) − e(a·s) f(s, t)|` for the declared `(q, a)`.
pub fn check_quasi_periodicity(
    f: &Section,
    grid: &BoxGrid,
    tol: f64,
) -> Result<QuasiPeriodReport, AnalysisError> {
    let (q, twists) = f.quasi_period().ok_or(AnalysisError::QuasiPeriodMismatch)?;
    let n = same_dim(f, grid.dim())?;
    same_dim(f, twists.len() + 1)?;
    let max_error = grid
        .points()
        .par_iter()
        .map(|x| {
            let mut shifted = x.clone();
            shifted[n - 1] -= q as f64;
            let phase: f64 = twists.iter().zip(x).map(|(&a, &s)| a as f64 * s).sum();
            (f.eval(&shifted) - e(phase) * f.eval(x)).norm()
        })
        .reduce(|| 0.0, f64::max);
    Ok(QuasiPeriodReport {
        q,
        twists,
        grid_points: grid.len(),
        tol,
        max_error,
        pass: max_error <= tol,
    })
}
