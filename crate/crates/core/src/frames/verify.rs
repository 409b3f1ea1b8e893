use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::{FrameElement, FrameError, FrameSet};
use crate::analysis::{lattice_offsets, rigged_inner_product, AnalysisError, Section, TorusGrid};
use crate::serde_float;

/// Residual of `ζ − Σ_e e·⟨e, ζ⟩` over a set of frame elements.
#[derive(Clone, Debug, Serialize)]
pub struct ReconstructionReport {
    pub elements: usize,
    pub grid_points: usize,
    pub radius: u64,
    pub tol: f64,
    /// `max |ζ(t − p) − Σ_e e(t − p)⟨e,ζ⟩(t)|` over the grid and the
    /// reachable offsets `p`.
    pub max_residual: f64,
    /// `sup_t ⟨r, r⟩(t)^{1/2}` for the residual `r`.
    pub module_residual: f64,
    #[serde(serialize_with = "serde_float::serialize")]
    pub tail_bound: f64,
    pub pass: bool,
}

fn union_support(sections: &[&Section]) -> Vec<Option<f64>> {
    let n = sections[0].dim();
    let mut out = vec![Some(0.0f64); n];
    for s in sections {
        for (k, r) in s.decay().support_box().into_iter().enumerate() {
            out[k] = match (out[k], r) {
                (Some(a), Some(b)) => Some(a.max(b)),
                _ => None,
            };
        }
    }
    out
}

/// Reconstructs every `ζ` in `zetas` from `elements` and measures the
/// residuals. Element samples at `t − p` are shared between the sections.
pub fn reconstruct_many(
    elements: &[&Section],
    zetas: &[&Section],
    grid: &TorusGrid,
    radius: u64,
    tol: f64,
) -> Result<Vec<ReconstructionReport>, FrameError> {
    let n = grid.n;
    for s in elements.iter().chain(zetas) {
        s.validate()?;
        if s.dim() != n {
            return Err(AnalysisError::DimensionMismatch {
                expected: n,
                found: s.dim(),
            }
            .into());
        }
    }
    let decays: Vec<_> = elements.iter().map(|e| e.decay()).collect();
    let tails = zetas
        .iter()
        .map(|z| {
            let dz = z.decay();
            let t: f64 = decays
                .iter()
                .map(|de| de.sup() * de.product(&dz).lattice_tail(radius))
                .sum();
            if t.is_finite() {
                Ok(t)
            } else {
                Err(AnalysisError::NonSummableDecay)
            }
        })
        .collect::<Result<Vec<f64>, _>>()?;

    let mut all: Vec<&Section> = elements.to_vec();
    all.extend(zetas);
    let offs = lattice_offsets(&union_support(&all), radius);
    let (m, np) = (elements.len(), offs.len());
    let per_point: Vec<Vec<(f64, f64)>> = grid
        .points()
        .par_iter()
        .map(|t| {
            let ys: Vec<Vec<f64>> = offs
                .iter()
                .map(|p| t.iter().zip(p).map(|(a, &b)| a - b as f64).collect())
                .collect();
            let samples: Vec<Complex64> = elements
                .iter()
                .flat_map(|e| ys.iter().map(move |y| e.eval(y)))
                .collect();
            zetas
                .iter()
                .map(|z| {
                    let zv: Vec<Complex64> = ys.iter().map(|y| z.eval(y)).collect();
                    let coeffs: Vec<Complex64> = (0..m)
                        .map(|e| {
                            samples[e * np..(e + 1) * np]
                                .iter()
                                .zip(&zv)
                                .map(|(a, b)| a.conj() * b)
                                .sum()
                        })
                        .collect();
                    let mut worst: f64 = 0.0;
                    let mut energy = 0.0;
                    for (k, zk) in zv.iter().enumerate() {
                        let approx: Complex64 =
                            (0..m).map(|e| samples[e * np + k] * coeffs[e]).sum();
                        let r = (zk - approx).norm();
                        worst = worst.max(r);
                        energy += r * r;
                    }
                    (worst, energy)
                })
                .collect()
        })
        .collect();
    Ok(tails
        .iter()
        .enumerate()
        .map(|(z, &tail_bound)| {
            let (max_residual, energy) = per_point
                .iter()
                .map(|v| v[z])
                .fold((0.0f64, 0.0f64), |a, b| (a.0.max(b.0), a.1.max(b.1)));
            ReconstructionReport {
                elements: m,
                grid_points: grid.len(),
                radius,
                tol,
                max_residual,
                module_residual: energy.sqrt(),
                tail_bound,
                pass: max_residual <= tol + tail_bound,
            }
        })
        .collect())
}

/// [`reconstruct_many`] for a single section.
pub fn reconstruct_with(
    elements: &[&Section],
    zeta: &Section,
    grid: &TorusGrid,
    radius: u64,
    tol: f64,
) -> Result<ReconstructionReport, FrameError> {
    Ok(reconstruct_many(elements, &[zeta], grid, radius, tol)?.remove(0))
}

/// Reconstruction of `ζ` from the level-`i` wavelet elements.
pub fn verify_reconstruction(
    fs: &FrameSet,
    zeta: &Section,
    level: u32,
    grid: &TorusGrid,
    radius: u64,
    tol: f64,
) -> Result<ReconstructionReport, FrameError> {
    let sections: Vec<&Section> = fs
        .level_elements(level)?
        .into_iter()
        .map(|e| &e.section)
        .collect();
    reconstruct_with(&sections, zeta, grid, radius, tol)
}

/// [`verify_reconstruction`] for several sections at once.
pub fn verify_reconstruction_many(
    fs: &FrameSet,
    zetas: &[Section],
    level: u32,
    grid: &TorusGrid,
    radius: u64,
    tol: f64,
) -> Result<Vec<ReconstructionReport>, FrameError> {
    let sections: Vec<&Section> = fs
        .level_elements(level)?
        .into_iter()
        .map(|e| &e.section)
        .collect();
    let zs: Vec<&Section> = zetas.iter().collect();
    reconstruct_many(&sections, &zs, grid, radius, tol)
}

/// Module-norm residuals of `ζ` projected onto the scaling elements plus
/// wavelet levels `0..=i`, for `i = 0..=max_level`.
pub fn projection_residuals(
    fs: &FrameSet,
    zeta: &Section,
    max_level: u32,
    grid: &TorusGrid,
    radius: u64,
) -> Result<Vec<ReconstructionReport>, FrameError> {
    (0..=max_level)
        .map(|i| {
            let mut sections: Vec<&Section> =
                fs.scaling_elements().into_iter().map(|e| &e.section).collect();
            for j in 0..=i {
                sections.extend(fs.level_elements(j)?.into_iter().map(|e| &e.section));
            }
            reconstruct_with(&sections, zeta, grid, radius, 0.0)
        })
        .collect()
}

/// `sup_t |⟨e_a, e_b⟩(t) − δ_ab|` for every pair, with the largest tail
/// bound among the pairs.
pub fn gram_matrix(
    sections: &[&Section],
    grid: &TorusGrid,
    radius: u64,
) -> Result<(Vec<Vec<f64>>, f64), AnalysisError> {
    let m = sections.len();
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|a| (0..m).map(move |b| (a, b))).collect();
    let cells = pairs
        .par_iter()
        .map(|&(a, b)| {
            let ip = rigged_inner_product(sections[a], sections[b], grid, radius)?;
            let target = if a == b { 1.0 } else { 0.0 };
            Ok((ip.max_deviation(Complex64::new(target, 0.0)), ip.tail_bound))
        })
        .collect::<Result<Vec<_>, AnalysisError>>()?;
    let tail = cells.iter().map(|c| c.1).fold(0.0, f64::max);
    let matrix = (0..m)
        .map(|a| (0..m).map(|b| cells[a * m + b].0).collect())
        .collect();
    Ok((matrix, tail))
}

/// Gram deviations of the level-`i` wavelet elements from `δ·1`.
#[derive(Clone, Debug, Serialize)]
pub struct GramReport {
    pub level: u32,
    pub rank: usize,
    pub grid_points: usize,
    pub radius: u64,
    pub deviations: Vec<Vec<f64>>,
    pub max_diagonal: f64,
    pub max_off_diagonal: f64,
    #[serde(serialize_with = "serde_float::serialize")]
    pub tail_bound: f64,
}

impl GramReport {
    pub fn max_deviation(&self) -> f64 {
        self.max_diagonal.max(self.max_off_diagonal)
    }

    /// True when every entry is within `tol` plus the tail bound, so the
    /// level elements form an orthonormal basis of a free module of rank
    /// [`GramReport::rank`].
    pub fn certifies(&self, tol: f64) -> bool {
        self.max_deviation() <= tol + self.tail_bound
    }
}

pub fn gram_report(
    fs: &FrameSet,
    level: u32,
    grid: &TorusGrid,
    radius: u64,
) -> Result<GramReport, FrameError> {
    let elements: Vec<&FrameElement> = fs.level_elements(level)?;
    let sections: Vec<&Section> = elements.iter().map(|e| &e.section).collect();
    let (deviations, tail_bound) = gram_matrix(&sections, grid, radius)?;
    let mut max_diagonal: f64 = 0.0;
    let mut max_off_diagonal: f64 = 0.0;
    for (a, row) in deviations.iter().enumerate() {
        for (b, &v) in row.iter().enumerate() {
            if a == b {
                max_diagonal = max_diagonal.max(v);
            } else {
                max_off_diagonal = max_off_diagonal.max(v);
            }
        }
    }
    Ok(GramReport {
        level,
        rank: sections.len(),
        grid_points: grid.len(),
        radius,
        deviations,
        max_diagonal,
        max_off_diagonal,
        tail_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::{band_limited_generators, generate_frame, test_corpus};
    use crate::lattice::DilationSpec;

    fn dyadic(depth: u32) -> FrameSet {
        let spec = DilationSpec::diagonal(&[2]).unwrap();
        let (phis, psis) = band_limited_generators(1).unwrap();
        generate_frame(&spec, phis, psis, depth).unwrap()
    }

    #[test]
    fn band_limited_reconstruction() {
        let fs = dyadic(2);
        let grid = TorusGrid::new(1, 128).unwrap();
        for level in 0..=2 {
            for zeta in test_corpus(&fs, level, 7, 2).unwrap() {
                let r = verify_reconstruction(&fs, &zeta, level, &grid, 64, 1e-8).unwrap();
                assert!(r.pass, "level {level}: {r:?}");
                assert_eq!(r.tail_bound, 0.0);
            }
        }
    }

    #[test]
    fn scaling_function_is_orthogonal_to_wavelets() {
        let fs = dyadic(0);
        let grid = TorusGrid::new(1, 64).unwrap();
        let r = verify_reconstruction(&fs, &fs.scaling[0], 0, &grid, 16, 1e-8).unwrap();
        assert!(!r.pass && r.max_residual > 0.5);
    }

    #[test]
    fn gram_levels() {
        let fs = dyadic(2);
        let grid = TorusGrid::new(1, 64).unwrap();
        for level in 1..=2 {
            let g = gram_report(&fs, level, &grid, 64).unwrap();
            assert_eq!(g.rank, 1 << level);
            assert!(g.certifies(1e-8), "{g:?}");
        }
    }

    #[test]
    fn density_surrogate_decreases() {
        let fs = dyadic(3);
        let grid = TorusGrid::new(1, 64).unwrap();
        let zeta = Section::Bump {
            center: vec![0.0],
            radius: 5.0,
        };
        let res = projection_residuals(&fs, &zeta, 3, &grid, 64).unwrap();
        let m: Vec<f64> = res.iter().map(|r| r.module_residual).collect();
        assert!(m.windows(2).all(|w| w[1] < w[0]), "{m:?}");
    }
}
