use num_complex::Complex64;
use proptest::prelude::*;
use torus_pmra::filters::{
    haar_filter_bank, orthonormality_defect, tensor_filter, translate_sum_error,
    verify_filter_bank, FilterError,
};

/// Unitary rows with constant first row: Gram–Schmidt of random vectors
/// after `(1/√d, …)`.
fn random_completion(d: usize, seed: Vec<(f64, f64)>) -> Vec<Vec<Complex64>> {
    let s = 1.0 / (d as f64).sqrt();
    let mut rows = vec![vec![Complex64::new(s, 0.0); d]];
    let mut it = seed.into_iter();
    while rows.len() < d {
        let mut v: Vec<Complex64> = (0..d)
            .map(|_| {
                let (a, b) = it.next().unwrap_or((1.0, 0.0));
                Complex64::new(a, b)
            })
            .collect();
        for _ in 0..2 {
            for r in &rows {
                let p: Complex64 = v.iter().zip(r).map(|(a, b)| a * b.conj()).sum();
                for (x, y) in v.iter_mut().zip(r) {
                    *x -= p * y;
                }
            }
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-3 {
            rows.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    rows
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn any_unitary_completion_gives_a_valid_bank(
        d in prop_oneof![-5i64..=-2, 2i64..=5],
        seed in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 40),
    ) {
        let rows = random_completion(d.unsigned_abs() as usize, seed);
        prop_assert!(orthonormality_defect(&rows) < 1e-12);
        let fb = haar_filter_bank(d, Some(rows)).unwrap();
        let rep = verify_filter_bank(&fb, 64, 1e-10).unwrap();
        prop_assert!(rep.pass, "{:?}", rep);
    }

    #[test]
    fn high_pass_filters_vanish_at_zero(d in 2i64..=6) {
        let fb = haar_filter_bank(d, None).unwrap();
        for m in &fb.filters[1..] {
            prop_assert!(m.eval1(0.0).norm() < 1e-12);
        }
    }
}

#[test]
fn non_unitary_completion_rejected() {
    let rows = vec![
        vec![Complex64::new(0.5f64.sqrt(), 0.0); 2],
        vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
    ];
    assert!(matches!(haar_filter_bank(2, Some(rows)), Err(FilterError::NotOrthonormal { .. })));
    assert!(matches!(haar_filter_bank(1, None), Err(FilterError::InvalidFactor(1))));
}

#[test]
fn tensor_mask_translates_sum_to_det() {
    let banks = [haar_filter_bank(2, None).unwrap(), haar_filter_bank(-3, None).unwrap()];
    let m = tensor_filter(&banks).unwrap();
    assert!(translate_sum_error(&m, &[2, -3], 32).unwrap() < 1e-12);
    assert!((m.eval(&[0.0, 0.0]) - Complex64::new(6f64.sqrt(), 0.0)).norm() < 1e-12);
}

#[test]
fn small_grid_rejected() {
    let fb = haar_filter_bank(4, None).unwrap();
    assert!(matches!(verify_filter_bank(&fb, 7, 1e-10), Err(FilterError::GridTooSmall { .. })));
}
