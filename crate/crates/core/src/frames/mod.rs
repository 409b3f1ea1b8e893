//! Module frames `{Φ_k} ∪ {Dⁱ ε_{v_l} Ψ_k}` and their verification.

mod corpus;
mod verify;

pub use corpus::{band_limited_generators, test_corpus};
pub use verify::{
    gram_matrix, gram_report, projection_residuals, reconstruct_many, reconstruct_with,
    verify_reconstruction, verify_reconstruction_many,
    GramReport, ReconstructionReport,
};

use serde::Serialize;
use thiserror::Error;

use crate::analysis::{dilate, modulate, AnalysisError, Section};
use crate::lattice::{coset_table, CosetTable, DilationSpec, LatticeError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FrameError {
    #[error("level {level} exceeds the frame depth {depth}")]
    LevelOutOfRange { level: u32, depth: u32 },
    #[error("generator {index} has dimension {found}, expected {expected}")]
    GeneratorDimension {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("no band-limited generators for dimension {0}")]
    UnsupportedDimension(usize),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementTag {
    Scaling,
    Wavelet,
}

#[derive(Clone, Debug)]
pub struct FrameElement {
    pub level: u32,
    pub coset: usize,
    pub generator: usize,
    pub tag: ElementTag,
    pub section: Section,
}

#[derive(Clone, Debug)]
pub struct FrameSet {
    pub spec: DilationSpec,
    pub depth: u32,
    pub scaling: Vec<Section>,
    pub wavelets: Vec<Section>,
    pub elements: Vec<FrameElement>,
    pub cosets: Vec<CosetTable>,
}

/// Builds the frame up to `depth`: scaling generators first, then wavelet
/// elements ordered by level, coset index and generator index.
pub fn generate_frame(
    spec: &DilationSpec,
    phis: Vec<Section>,
    psis: Vec<Section>,
    depth: u32,
) -> Result<FrameSet, FrameError> {
    let n = spec.dim();
    for (index, s) in phis.iter().chain(&psis).enumerate() {
        if s.dim() != n {
            return Err(FrameError::GeneratorDimension {
                index,
                expected: n,
                found: s.dim(),
            });
        }
        s.validate()?;
    }
    let cosets = (0..=depth)
        .map(|i| coset_table(spec, i))
        .collect::<Result<Vec<_>, _>>()?;
    let mut elements: Vec<FrameElement> = phis
        .iter()
        .enumerate()
        .map(|(k, s)| FrameElement {
            level: 0,
            coset: 0,
            generator: k,
            tag: ElementTag::Scaling,
            section: s.clone(),
        })
        .collect();
    for (i, table) in cosets.iter().enumerate() {
        for (l, v) in table.reps().iter().enumerate() {
            for (k, psi) in psis.iter().enumerate() {
                elements.push(FrameElement {
                    level: i as u32,
                    coset: l,
                    generator: k,
                    tag: ElementTag::Wavelet,
                    section: dilate(spec, modulate(v, psi.clone()), i as i32),
                });
            }
        }
    }
    Ok(FrameSet {
        spec: spec.clone(),
        depth,
        scaling: phis,
        wavelets: psis,
        elements,
        cosets,
    })
}

impl FrameSet {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn scaling_elements(&self) -> Vec<&FrameElement> {
        self.elements
            .iter()
            .filter(|e| e.tag == ElementTag::Scaling)
            .collect()
    }

    /// Wavelet elements of level `i`, in `(l, k)` order.
    pub fn level_elements(&self, level: u32) -> Result<Vec<&FrameElement>, FrameError> {
        if level > self.depth {
            return Err(FrameError::LevelOutOfRange {
                level,
                depth: self.depth,
            });
        }
        Ok(self
            .elements
            .iter()
            .filter(|e| e.tag == ElementTag::Wavelet && e.level == level)
            .collect())
    }

    /// The modulation vector `v_l` of an element.
    pub fn modulation(&self, e: &FrameElement) -> &[i64] {
        match e.tag {
            ElementTag::Scaling => &[],
            ElementTag::Wavelet => self.cosets[e.level as usize]
                .get(e.coset)
                .expect("element built from this table"),
        }
    }

    pub fn manifest(&self) -> FrameManifest {
        FrameManifest {
            matrix: self.spec.matrix().rows(),
            depth: self.depth,
            scaling_count: self.scaling.len(),
            wavelet_count: self.wavelets.len(),
            element_count: self.elements.len(),
            generators: Generators {
                scaling: self.scaling.clone(),
                wavelet: self.wavelets.clone(),
            },
            elements: self
                .elements
                .iter()
                .map(|e| ElementDescriptor {
                    level: e.level,
                    coset: e.coset,
                    generator: e.generator,
                    tag: e.tag,
                    v: self.modulation(e).to_vec(),
                })
                .collect(),
        }
    }
}

/// JSON description of a [`FrameSet`].
#[derive(Clone, Debug, Serialize)]
pub struct FrameManifest {
    pub matrix: Vec<Vec<i64>>,
    pub depth: u32,
    pub scaling_count: usize,
    pub wavelet_count: usize,
    pub element_count: usize,
    pub generators: Generators,
    pub elements: Vec<ElementDescriptor>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Generators {
    pub scaling: Vec<Section>,
    pub wavelet: Vec<Section>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ElementDescriptor {
    pub level: u32,
    pub coset: usize,
    pub generator: usize,
    pub tag: ElementTag,
    pub v: Vec<i64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::haar_tensor;

    #[test]
    fn counts() {
        let spec = DilationSpec::diagonal(&[2, 2]).unwrap();
        let g = haar_tensor(&[2, 2]);
        let fs = generate_frame(&spec, vec![g.clone()], vec![g.clone()], 2).unwrap();
        assert_eq!(fs.len(), 22);
        let fs0 = generate_frame(&spec, vec![g.clone()], vec![g], 0).unwrap();
        assert_eq!(fs0.len(), 2);
    }

    #[test]
    fn level_one_modulations() {
        let spec = DilationSpec::diagonal(&[2, 2]).unwrap();
        let g = haar_tensor(&[2, 2]);
        let fs = generate_frame(&spec, vec![], vec![g], 1).unwrap();
        let vs: Vec<Vec<i64>> = fs
            .level_elements(1)
            .unwrap()
            .iter()
            .map(|e| fs.modulation(e).to_vec())
            .collect();
        assert_eq!(vs, vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]);
    }
}
