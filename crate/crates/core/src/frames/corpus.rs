use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{FrameError, FrameSet};
use crate::analysis::{dilate, Section};
use crate::filters::TrigPoly;

/// Meyer-type generators with compact frequency support for `A = 2I`,
/// `n ∈ {1, 2, 3}`: `Φ = φ⊗…⊗φ` and the `2ⁿ − 1` tensors with at least one
/// `ψ` factor. Bit `k` of the wavelet index selects `ψ` on axis `k`.
pub fn band_limited_generators(n: usize) -> Result<(Vec<Section>, Vec<Section>), FrameError> {
    if !(1..=3).contains(&n) {
        return Err(FrameError::UnsupportedDimension(n));
    }
    let build = |mask: usize| {
        let factors: Vec<Section> = (0..n)
            .map(|k| {
                if mask >> k & 1 == 1 {
                    Section::MeyerWavelet
                } else {
                    Section::MeyerScaling
                }
            })
            .collect();
        if n == 1 {
            factors.into_iter().next().unwrap()
        } else {
            Section::tensor(factors)
        }
    };
    let phis = vec![build(0)];
    let psis = (1..1usize << n).map(build).collect();
    Ok((phis, psis))
}

fn random_poly(rng: &mut ChaCha8Rng, n: usize) -> TrigPoly {
    let terms: Vec<(Vec<i64>, Complex64)> = (0..3)
        .map(|_| {
            let k = (0..n).map(|_| rng.random_range(-2..=2)).collect();
            let c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            (k, c)
        })
        .collect();
    TrigPoly::from_terms(n, terms).expect("consistent dimension")
}

/// Sections of `W_i` used to probe reconstruction: the level elements,
/// `Dⁱ Ψ_k`, and `random` combinations `Dⁱ(Σ_k g_k Ψ_k)` with seeded random
/// trigonometric polynomials `g_k`.
pub fn test_corpus(
    fs: &FrameSet,
    level: u32,
    seed: u64,
    random: usize,
) -> Result<Vec<Section>, FrameError> {
    let n = fs.spec.dim();
    let i = level as i32;
    let mut out: Vec<Section> = fs
        .level_elements(level)?
        .into_iter()
        .map(|e| e.section.clone())
        .collect();
    if level > 0 {
        out.extend(fs.wavelets.iter().map(|p| dilate(&fs.spec, p.clone(), i)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (level as u64) << 32);
    for _ in 0..random {
        let terms = fs
            .wavelets
            .iter()
            .map(|p| p.clone().times(Section::trig(random_poly(&mut rng, n))))
            .collect();
        out.push(dilate(&fs.spec, Section::Sum { terms }, i));
    }
    Ok(out)
}
