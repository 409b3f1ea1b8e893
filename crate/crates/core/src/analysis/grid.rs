use std::fmt::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::filters::cartesian;

/// Points `(k₁/N, …, k_n/N)` of `[0,1)ⁿ`, first axis fastest.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusGrid {
    pub n: usize,
    pub resolution: usize,
}

impl TorusGrid {
    pub fn new(n: usize, resolution: usize) -> Result<Self, AnalysisError> {
        if resolution < 2 {
            return Err(AnalysisError::InvalidGrid(format!(
                "resolution {resolution} < 2"
            )));
        }
        if n == 0 {
            return Err(AnalysisError::InvalidGrid("dimension 0".into()));
        }
        Ok(TorusGrid { n, resolution })
    }

    pub fn len(&self) -> usize {
        self.resolution.pow(self.n as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        let step = 1.0 / self.resolution as f64;
        cartesian(&vec![self.resolution; self.n])
            .into_iter()
            .map(|k| k.into_iter().map(|i| i as f64 * step).collect())
            .collect()
    }
}

/// Tensor grid of `points` equispaced values per axis on `[lo_k, hi_k]`,
/// endpoints included.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxGrid {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub points: usize,
}

impl BoxGrid {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, points: usize) -> Result<Self, AnalysisError> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(AnalysisError::InvalidGrid("bounds of unequal length".into()));
        }
        if points < 2 || lo.iter().zip(&hi).any(|(a, b)| a >= b) {
            return Err(AnalysisError::InvalidGrid("empty box or fewer than 2 points".into()));
        }
        Ok(BoxGrid { lo, hi, points })
    }

    /// The cube `[−a, a]ⁿ`.
    pub fn cube(n: usize, a: f64, points: usize) -> Result<Self, AnalysisError> {
        BoxGrid::new(vec![-a; n], vec![a; n], points)
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn len(&self) -> usize {
        self.points.pow(self.dim() as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        let m = (self.points - 1) as f64;
        cartesian(&vec![self.points; self.dim()])
            .into_iter()
            .map(|k| {
                k.iter()
                    .enumerate()
                    .map(|(a, &i)| self.lo[a] + (self.hi[a] - self.lo[a]) * i as f64 / m)
                    .collect()
            })
            .collect()
    }
}

/// CSV with columns `x1,…,xn,re,im`.
pub fn samples_csv(points: &[Vec<f64>], values: &[Complex64]) -> String {
    let n = points.first().map_or(0, Vec::len);
    let mut out = String::new();
    for k in 1..=n {
        write!(out, "x{k},").unwrap();
    }
    out.push_str("re,im\n");
    for (p, v) in points.iter().zip(values) {
        for x in p {
            write!(out, "{x:.17e},").unwrap();
        }
        writeln!(out, "{:.17e},{:.17e}", v.re, v.im).unwrap();
    }
    out
}
