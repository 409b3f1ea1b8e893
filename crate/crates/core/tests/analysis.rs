use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use torus_pmra::analysis::{
    check_quasi_periodicity, check_unit_lattice_norm, dilate, haar_mask, haar_tensor,
    module_inner_product, modulate, rigged_inner_product, xi_membership, AnalysisError, BoxGrid,
    DecayModel, Envelope, Section, TorusGrid,
};
use torus_pmra::filters::{e, TrigPoly};
use torus_pmra::lattice::{coset_table, validate_dilation, DilationSpec, IntMatrix};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn quincunx() -> DilationSpec {
    validate_dilation(IntMatrix::from_rows(&[[1, -1], [1, 1]]).unwrap(), None).unwrap()
}

fn bump2() -> Section {
    Section::Bump {
        center: vec![0.2, -0.1],
        radius: 1.3,
    }
}

fn poly(n: usize, terms: &[(Vec<i64>, f64, f64)]) -> TrigPoly {
    TrigPoly::from_terms(n, terms.iter().map(|(k, a, b)| (k.clone(), Complex64::new(*a, *b)))).unwrap()
}

fn point() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-6.0f64..6.0, 2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dilations_compose(x in point(), i in -2i32..=2, j in -2i32..=2) {
        for spec in [DilationSpec::diagonal(&[2, -3]).unwrap(), quincunx()] {
            let twice = dilate(&spec, dilate(&spec, bump2(), i), j);
            let once = dilate(&spec, bump2(), i + j);
            prop_assert!((twice.eval(&x) - once.eval(&x)).norm() < 1e-12);
        }
    }

    #[test]
    fn modulations_compose(x in point(), v in prop::collection::vec(-5i64..5, 2), w in prop::collection::vec(-5i64..5, 2)) {
        let vw: Vec<i64> = v.iter().zip(&w).map(|(a, b)| a + b).collect();
        let lhs = modulate(&v, modulate(&w, bump2()));
        let rhs = modulate(&vw, bump2());
        prop_assert!((lhs.eval(&x) - rhs.eval(&x)).norm() < 1e-12);
    }

    /// `ε_β Dʲ = Dʲ ε_{Aʲβ}` pointwise.
    #[test]
    fn modulation_commutes_with_dilation(x in point(), beta in prop::collection::vec(-3i64..=3, 2), j in 0u32..=3) {
        for spec in [DilationSpec::diagonal(&[2, 3]).unwrap(), quincunx()] {
            let ab = spec.matrix().pow(j).unwrap().apply(&beta).unwrap();
            let lhs = modulate(&beta, dilate(&spec, bump2(), j as i32));
            let rhs = dilate(&spec, modulate(&ab, bump2()), j as i32);
            prop_assert!((lhs.eval(&x) - rhs.eval(&x)).norm() < 1e-12);
        }
    }

    #[test]
    fn lattice_tail_is_monotone(r1 in 1u64..200, dr in 0u64..200, p in 1.1f64..4.0) {
        let m = DecayModel::radial(2, Envelope::power_law(1.0, 1.0, p + 1.0, 0.0));
        prop_assert!(m.lattice_tail(r1 + dr) <= m.lattice_tail(r1));
    }
}

#[test]
fn dilation_identity_and_haar_example() {
    let spec = DilationSpec::diagonal(&[2]).unwrap();
    let phi = Section::haar(2);
    let d0 = dilate(&spec, phi.clone(), 0);
    let d1 = dilate(&spec, phi.clone(), 1);
    for x in [-3.3, 0.0, 0.7, 5.1] {
        assert_eq!(d0.eval(&[x]), phi.eval(&[x]));
        let expected = phi.eval(&[x / 2.0]) / 2f64.sqrt();
        assert!((d1.eval(&[x]) - expected).norm() < 1e-15);
    }
}

#[test]
fn haar_inner_product_against_brute_force() {
    let grid = TorusGrid::new(1, 16).unwrap();
    let r = rigged_inner_product(&Section::haar(2), &Section::haar(2), &grid, 64).unwrap();
    let expected_tail = 2.0 / (PI * PI * 63.0);
    assert!(r.tail_bound <= expected_tail * 1.001, "{}", r.tail_bound);
    for (t, v) in grid.points().iter().zip(&r.values) {
        // |Φ(y)|² = sin²(πy)/(πy)², summed far beyond R
        let brute: f64 = (-200_000i64..=200_000)
            .map(|p| {
                let y = t[0] - p as f64;
                if y == 0.0 { 1.0 } else { ((PI * y).sin() / (PI * y)).powi(2) }
            })
            .sum();
        assert!((brute - 1.0).abs() < 1e-5);
        assert!((v.re - brute).abs() <= r.tail_bound);
        assert!(v.im.abs() < 1e-15);
    }
}

#[test]
fn disjoint_supports_give_zero() {
    let a = Section::Bump { center: vec![0.0], radius: 0.2 };
    let b = Section::Bump { center: vec![0.5], radius: 0.2 }
        .times(Section::trig(poly(1, &[(vec![3], 1.0, 0.5)])));
    let r = rigged_inner_product(&a, &b, &TorusGrid::new(1, 64).unwrap(), 8).unwrap();
    assert_eq!(r.tail_bound, 0.0);
    assert!(r.values.iter().all(|v| *v == c(0.0)));
}

#[test]
fn modulation_preserves_norm_and_module_property() {
    let grid = TorusGrid::new(2, 12).unwrap();
    let xi = bump2();
    let eta = Section::Bump { center: vec![-0.4, 0.3], radius: 0.9 }.scaled(Complex64::new(0.3, 2.0));
    let base = rigged_inner_product(&xi, &xi, &grid, 8).unwrap();
    let moved = modulate(&[2, -1], xi.clone());
    let m = rigged_inner_product(&moved, &moved, &grid, 8).unwrap();
    for (a, b) in base.values.iter().zip(&m.values) {
        assert!((a - b).norm() < 1e-12);
    }

    let g = poly(2, &[(vec![1, 0], 0.5, -0.2), (vec![0, -2], 1.0, 0.3), (vec![0, 0], -0.7, 0.0)]);
    let ip = rigged_inner_product(&xi, &eta, &grid, 8).unwrap();
    let ipg = rigged_inner_product(&xi, &eta.clone().times(Section::trig(g.clone())), &grid, 8).unwrap();
    for ((t, a), b) in grid.points().iter().zip(&ip.values).zip(&ipg.values) {
        assert!((a * g.eval(t) - b).norm() < 1e-12);
    }
}

#[test]
fn truncated_product_converges_monotonically() {
    let grid = BoxGrid::cube(1, 8.0, 1024).unwrap();
    for d in [2i64, 3] {
        let closed = Section::haar(d);
        let errors: Vec<f64> = (1..=20)
            .map(|j| {
                let tp = Section::truncated_product(haar_mask(d).unwrap(), j, IntMatrix::diagonal(&[d]));
                grid.points()
                    .iter()
                    .map(|x| (tp.eval(x) - closed.eval(x)).norm())
                    .fold(0.0, f64::max)
            })
            .collect();
        assert!(errors.windows(2).all(|w| w[1] < w[0]), "d = {d}: {errors:?}");
        assert!(errors[19] < 1e-6);
    }
}

#[test]
fn depth_zero_is_an_error() {
    let tp = Section::truncated_product(haar_mask(2).unwrap(), 0, IntMatrix::diagonal(&[2]));
    let grid = TorusGrid::new(1, 4).unwrap();
    assert_eq!(xi_membership(&tp, &grid, 4, 1.0).unwrap_err(), AnalysisError::DepthZero);
}

#[test]
fn xi_membership_cases() {
    let grid = TorusGrid::new(1, 64).unwrap();
    let windowed = Section::Bump { center: vec![0.3], radius: 2.0 }
        .times(Section::trig(poly(1, &[(vec![1], 1.0, 0.0), (vec![-2], 0.0, 1.0)])));
    let rep = xi_membership(&windowed, &grid, 16, 1e-12).unwrap();
    assert!(rep.pass && rep.tail_bound == 0.0);

    let rep = xi_membership(&Section::haar(2), &grid, 512, 1e-3).unwrap();
    assert!(rep.pass);
    assert!((rep.sup_sum - 1.0).abs() <= rep.tail_bound);
}

#[test]
fn unit_norm_cases() {
    let grid = TorusGrid::new(1, 64).unwrap();
    let doubled = Section::haar(2).scaled(c(2.0));
    let rep = check_unit_lattice_norm(&doubled, 1, &grid, 128, 1e-8).unwrap();
    assert!(!rep.pass && rep.max_deviation > 2.9);
    let grid2 = TorusGrid::new(2, 8).unwrap();
    assert!(check_unit_lattice_norm(&haar_tensor(&[2, 2]), 1, &grid2, 32, 1e-8).unwrap().pass);
    let one = Section::trig(TrigPoly::constant(1, c(1.0)));
    assert_eq!(
        check_unit_lattice_norm(&one, 1, &grid, 8, 1e-8).unwrap_err(),
        AnalysisError::NonSummableDecay
    );
}

fn quasi(twist: i64, width: f64) -> Section {
    Section::QuasiBump { q: 2, twists: vec![twist], center: 0.1, width }
}

#[test]
fn module_inner_product_cases() {
    let grid = TorusGrid::new(2, 8).unwrap();
    let (h1, h2) = (quasi(3, 1.4), quasi(3, 0.8).scaled(Complex64::new(0.0, 1.0)));
    let ip = module_inner_product(&h1, &h2, &grid).unwrap();
    for (t, v) in grid.points().iter().zip(&ip.values) {
        let brute: Complex64 = (0..2)
            .map(|k| {
                let y = [t[0], t[1] - k as f64];
                h1.eval(&y).conj() * h2.eval(&y)
            })
            .sum();
        assert!((v - brute).norm() < 1e-14);
        // periodic in both variables
        for shift in [[1.0, 0.0], [0.0, 1.0]] {
            let u = [t[0] + shift[0], t[1] + shift[1]];
            let shifted: Complex64 = (0..2)
                .map(|k| {
                    let y = [u[0], u[1] - k as f64];
                    h1.eval(&y).conj() * h2.eval(&y)
                })
                .sum();
            assert!((shifted - brute).norm() < 1e-12);
        }
    }
    assert_eq!(
        module_inner_product(&h1, &quasi(2, 1.0), &grid).unwrap_err(),
        AnalysisError::QuasiPeriodMismatch
    );

    let f = bump2().claim(1, vec![0]);
    let g = Section::Bump { center: vec![0.0, 0.5], radius: 1.0 }.claim(1, vec![0]);
    let ip = module_inner_product(&f, &g, &grid).unwrap();
    for (t, v) in grid.points().iter().zip(&ip.values) {
        assert!((v - f.eval(t).conj() * g.eval(t)).norm() < 1e-15);
    }
}

#[test]
fn quasi_periodicity_is_checked() {
    let grid = BoxGrid::cube(2, 3.0, 21).unwrap();
    assert!(check_quasi_periodicity(&quasi(-2, 1.7), &grid, 1e-12).unwrap().pass);
    let false_claim = bump2().claim(2, vec![1]);
    assert!(!check_quasi_periodicity(&false_claim, &grid, 1e-6).unwrap().pass);
    let modulated = modulate(&[1, 0], quasi(1, 1.0)).times(Section::trig(poly(2, &[(vec![1, 1], 1.0, 0.0)])));
    assert_eq!(modulated.quasi_period(), Some((2, vec![1])));
    assert!(check_quasi_periodicity(&modulated, &grid, 1e-12).unwrap().pass);
}

/// `⟨Dξ, Dξ⟩(t) = d⁻¹ Σ_γ ⟨ξ,ξ⟩((Aᵗ)⁻¹(t − γ))` over coset representatives
/// `γ` of `ℤⁿ/Aᵗℤⁿ`.
#[test]
fn dilated_inner_product_character_identity() {
    let spec = quincunx();
    let xi = bump2();
    let dxi = dilate(&spec, xi.clone(), 1);
    let at = validate_dilation(spec.matrix().transpose(), None).unwrap();
    let gammas = coset_table(&at, 1).unwrap();
    let grid = TorusGrid::new(2, 6).unwrap();
    let lhs = rigged_inner_product(&dxi, &dxi, &grid, 16).unwrap();
    let inv = spec.matrix().transpose().inverse_f64().unwrap();
    for (t, v) in grid.points().iter().zip(&lhs.values) {
        let rhs: f64 = gammas
            .reps()
            .iter()
            .map(|g| {
                let u = [t[0] - g[0] as f64, t[1] - g[1] as f64];
                let y = [inv[0] * u[0] + inv[1] * u[1], inv[2] * u[0] + inv[3] * u[1]];
                let inner: f64 = (-8i64..=8)
                    .flat_map(|a| (-8i64..=8).map(move |b| (a, b)))
                    .map(|(a, b)| xi.eval(&[y[0] - a as f64, y[1] - b as f64]).norm_sqr())
                    .sum();
                inner
            })
            .sum::<f64>()
            / 2.0;
        assert!((v.re - rhs).abs() < 1e-12, "{} vs {rhs}", v.re);
    }
}

#[test]
fn sup_norm_is_kept_by_dilation_for_band_limited_sections() {
    let spec = DilationSpec::diagonal(&[2]).unwrap();
    let phi = Section::MeyerScaling;
    let grid = TorusGrid::new(1, 512).unwrap();
    let a = rigged_inner_product(&phi, &phi, &grid, 8).unwrap();
    let b = rigged_inner_product(&dilate(&spec, phi, 1), &dilate(&spec, Section::MeyerScaling, 1), &grid, 8).unwrap();
    let sup = |r: &torus_pmra::analysis::LatticeSumResult| r.values.iter().map(|v| v.re).fold(0.0, f64::max);
    assert!((sup(&a) - sup(&b)).abs() < 1e-12);
}

#[test]
fn every_kind_round_trips_through_json() {
    let spec = DilationSpec::diagonal(&[2, 3]).unwrap();
    let mask = torus_pmra::filters::tensor_filter(&[
        torus_pmra::filters::haar_filter_bank(2, None).unwrap(),
        torus_pmra::filters::haar_filter_bank(3, None).unwrap(),
    ])
    .unwrap();
    let s = Section::Sum {
        terms: vec![
            dilate(&spec, modulate(&[1, 2], haar_tensor(&[2, 3])), -1),
            Section::truncated_product(mask, 5, spec.matrix().clone()).scaled(Complex64::new(0.5, 0.5)),
            Section::tensor(vec![Section::MeyerScaling, Section::MeyerWavelet]).translated(vec![0.1, 0.2]),
            bump2().stretched(vec![2.0, 0.5]).times(Section::trig(poly(2, &[(vec![1, 1], 1.0, 0.0)]))),
            quasi(1, 0.7).claim(2, vec![1]),
        ],
    };
    let text = serde_json::to_string(&s).unwrap();
    let back: Section = serde_json::from_str(&text).unwrap();
    for x in [[0.3, -0.2], [1.7, 2.9], [-4.0, 0.5]] {
        assert_eq!(s.eval(&x), back.eval(&x));
    }
}

#[test]
fn sections_are_shareable_across_threads() {
    fn assert_sync<T: Send + Sync>() {}
    assert_sync::<Section>();
    let s = dilate(&quincunx(), bump2(), 2);
    let expected = s.eval(&[0.4, 0.1]);
    std::thread::scope(|scope| {
        for _ in 0..4 {
            scope.spawn(|| assert_eq!(s.eval(&[0.4, 0.1]), expected));
        }
    });
    assert!((e(0.25) - Complex64::new(0.0, 1.0)).norm() < 1e-15);
}
