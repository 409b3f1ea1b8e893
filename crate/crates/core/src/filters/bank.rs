//! Haar-type filter banks for a one-dimensional dilation factor.

use num_complex::Complex64;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::{FilterError, TrigPoly};

/// Rows are accepted as orthonormal when `|RR* − I|` stays below this.
pub const ORTHONORMAL_TOL: f64 = 1e-12;

/// Filters `m₀,…,m_{|d|−1}` of period 1 built from unitary rows `r⃗_l`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilterBank {
    pub d: i64,
    pub rows: Vec<Vec<Complex64>>,
    pub filters: Vec<TrigPoly>,
}

impl FilterBank {
    pub fn absd(&self) -> usize {
        self.d.unsigned_abs() as usize
    }

    pub fn low_pass(&self) -> &TrigPoly {
        &self.filters[0]
    }

    /// `μ_l(x) = Σ_j a_{l,j} e(jx/|d|)`, of period `|d|`.
    pub fn mu(&self, l: usize) -> TrigPoly {
        mu_from_row(&self.rows[l])
    }

    pub fn scaled(&self, s: f64) -> FilterBank {
        FilterBank {
            d: self.d,
            rows: self.rows.clone(),
            filters: self.filters.iter().map(|f| f.scale(Complex64::new(s, 0.0))).collect(),
        }
    }
}

fn mu_from_row(row: &[Complex64]) -> TrigPoly {
    let d = row.len() as i64;
    TrigPoly::with_period(
        1,
        Ratio::from_integer(d),
        row.iter().enumerate().map(|(j, &a)| (vec![j as i64], a)),
    )
    .expect("positive period")
}

fn dot(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a * b.conj()).sum()
}

/// Gram–Schmidt on `r⃗₀ = (1/√d,…)` followed by the standard basis
/// `e₀, e₁, …`, skipping vectors already in the span. Each projection is
/// applied twice.
pub fn default_completion(d: usize) -> Vec<Vec<Complex64>> {
    let s = 1.0 / (d as f64).sqrt();
    let mut rows = vec![vec![Complex64::new(s, 0.0); d]];
    for k in 0..d {
        if rows.len() == d {
            break;
        }
        let mut v = vec![Complex64::new(0.0, 0.0); d];
        v[k] = Complex64::new(1.0, 0.0);
        for _ in 0..2 {
            for r in &rows {
                let c = dot(&v, r);
                for (x, y) in v.iter_mut().zip(r) {
                    *x -= c * y;
                }
            }
        }
        let norm = dot(&v, &v).re.sqrt();
        if norm > 1e-8 {
            rows.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    rows
}

/// Largest entry of `|R R* − I|`.
pub fn orthonormality_defect(rows: &[Vec<Complex64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for (l, rl) in rows.iter().enumerate() {
        for (k, rk) in rows.iter().enumerate() {
            let target = if l == k { 1.0 } else { 0.0 };
            worst = worst.max((dot(rl, rk) - target).norm());
        }
    }
    worst
}

/// Builds the bank `m_l(x) = μ_l(d·x)` for the signed factor `d`.
///
/// `completion`, if given, must be `|d|` unitary rows whose first row is
/// `(1/√|d|, …, 1/√|d|)`.
pub fn haar_filter_bank(
    d: i64,
    completion: Option<Vec<Vec<Complex64>>>,
) -> Result<FilterBank, FilterError> {
    if d.unsigned_abs() <= 1 {
        return Err(FilterError::InvalidFactor(d));
    }
    let size = d.unsigned_abs() as usize;
    let rows = match completion {
        None => default_completion(size),
        Some(rows) => {
            if rows.len() != size || rows.iter().any(|r| r.len() != size) {
                return Err(FilterError::CompletionShape { d: size });
            }
            let s = 1.0 / (size as f64).sqrt();
            let first = rows[0].iter().map(|a| (a - s).norm()).fold(0.0, f64::max);
            let defect = orthonormality_defect(&rows).max(first);
            if defect > ORTHONORMAL_TOL {
                return Err(FilterError::NotOrthonormal { defect });
            }
            rows
        }
    };
    let filters = rows
        .iter()
        .map(|r| mu_from_row(r).compose_scale(d))
        .collect::<Result<_, _>>()?;
    Ok(FilterBank { d, rows, filters })
}

/// Outcome of [`verify_filter_bank`].
#[derive(Clone, Debug, Serialize)]
pub struct FilterReport {
    pub d: i64,
    pub grid_points: usize,
    pub tol: f64,
    /// `|m₀(0) − √|d||`.
    pub m0_at_zero_error: f64,
    /// `sup_x |Σ_i conj(m_l)m_k(x − i/|d|) − |d|δ_{lk}|` for each pair.
    pub gram_deviation: Vec<Vec<f64>>,
    pub gram_max_deviation: f64,
    /// `min |m₀|` on `[−1/(2|d|), 1/(2|d|)]`; must exceed `tol`.
    pub cohen_min_modulus: f64,
    /// `sup_x |m_l(x+1) − m_l(x)|`.
    pub periodicity_error: f64,
    pub pass: bool,
}

/// Checks `m₀(0) = √|d|`, the translate-Gram identity and Cohen's
/// condition on a grid of `grid_points` samples of `[0,1)`.
pub fn verify_filter_bank(
    fb: &FilterBank,
    grid_points: usize,
    tol: f64,
) -> Result<FilterReport, FilterError> {
    let dd = fb.absd();
    if grid_points < 2 * dd {
        return Err(FilterError::GridTooSmall {
            points: grid_points,
            min: 2 * dd,
        });
    }
    let m0_at_zero_error = (fb.low_pass().eval1(0.0) - (dd as f64).sqrt()).norm();
    let r = fb.filters.len();
    let mut gram = vec![vec![0.0f64; r]; r];
    let mut periodicity_error: f64 = 0.0;
    for g in 0..grid_points {
        let x = g as f64 / grid_points as f64;
        let samples: Vec<Vec<Complex64>> = fb
            .filters
            .iter()
            .map(|f| (0..dd).map(|i| f.eval1(x - i as f64 / dd as f64)).collect())
            .collect();
        for l in 0..r {
            for k in 0..r {
                let s: Complex64 = (0..dd).map(|i| samples[l][i].conj() * samples[k][i]).sum();
                let target = if l == k { dd as f64 } else { 0.0 };
                gram[l][k] = gram[l][k].max((s - target).norm());
            }
        }
        for f in &fb.filters {
            periodicity_error = periodicity_error.max((f.eval1(x + 1.0) - f.eval1(x)).norm());
        }
    }
    let half = 1.0 / (2.0 * dd as f64);
    let cohen_min_modulus = (0..=grid_points)
        .map(|g| -half + 2.0 * half * g as f64 / grid_points as f64)
        .map(|x| fb.low_pass().eval1(x).norm())
        .fold(f64::INFINITY, f64::min);
    let gram_max_deviation = gram.iter().flatten().copied().fold(0.0, f64::max);
    let pass = r == dd
        && m0_at_zero_error <= tol
        && gram_max_deviation <= tol
        && periodicity_error <= tol
        && cohen_min_modulus > tol;
    Ok(FilterReport {
        d: fb.d,
        grid_points,
        tol,
        m0_at_zero_error,
        gram_deviation: gram,
        gram_max_deviation,
        cohen_min_modulus,
        periodicity_error,
        pass,
    })
}

/// `m′(s₁,…,s_k) = Π_j m₀⁽ʲ⁾(s_j)`.
pub fn tensor_filter(banks: &[FilterBank]) -> Result<TrigPoly, FilterError> {
    if banks.is_empty() {
        return Err(FilterError::EmptyTensor);
    }
    let k = banks.len();
    let mut out = TrigPoly::constant(k, Complex64::new(1.0, 0.0));
    for (axis, b) in banks.iter().enumerate() {
        out = out.mul(&b.low_pass().embed(k, axis)?)?;
    }
    Ok(out)
}

/// `sup_s |Σ_i |m′(s − i/|d|)|² − Π|d_k||` over the `Π|d_k|` translates
/// `i/|d| = (i₁/|d₁|,…)`, sampled on a `grid_points`-per-axis grid.
pub fn translate_sum_error(
    m: &TrigPoly,
    factors: &[i64],
    grid_points: usize,
) -> Result<f64, FilterError> {
    let k = m.dim();
    if factors.len() != k {
        return Err(FilterError::DimensionMismatch {
            expected: k,
            found: factors.len(),
        });
    }
    let abs: Vec<usize> = factors.iter().map(|d| d.unsigned_abs() as usize).collect();
    let target: f64 = abs.iter().product::<usize>() as f64;
    let shifts = cartesian(&abs);
    let mut worst: f64 = 0.0;
    let mut s = vec![0.0; k];
    for g in cartesian(&vec![grid_points; k]) {
        for a in 0..k {
            s[a] = g[a] as f64 / grid_points as f64;
        }
        let total: f64 = shifts
            .iter()
            .map(|i| {
                let y: Vec<f64> = (0..k).map(|a| s[a] - i[a] as f64 / abs[a] as f64).collect();
                m.eval(&y).norm_sqr()
            })
            .sum();
        worst = worst.max((total - target).abs());
    }
    Ok(worst)
}

/// All index vectors of `Π [0, sizes_a)`, first axis fastest.
pub(crate) fn cartesian(sizes: &[usize]) -> Vec<Vec<usize>> {
    let total: usize = sizes.iter().product();
    let mut out = Vec::with_capacity(total);
    let mut cur = vec![0; sizes.len()];
    for _ in 0..total {
        out.push(cur.clone());
        for a in 0..sizes.len() {
            cur[a] += 1;
            if cur[a] < sizes[a] {
                break;
            }
            cur[a] = 0;
        }
    }
    out
}
