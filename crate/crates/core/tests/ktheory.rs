use proptest::prelude::*;
use torus_pmra::ktheory::{
    class_of_module, dilate_class, gl_action, pmra_level_class, pmra_level_closed_form,
    wavelet_class, ExtElement, KClass, ModuleDescriptor,
};
use torus_pmra::lattice::{DilationSpec, IntMatrix};

fn element(n: usize) -> impl Strategy<Value = ExtElement> {
    prop::collection::vec((prop::collection::btree_set(1..=n, 0..=n), -5i64..=5), 0..5).prop_map(
        move |terms| {
            terms.into_iter().fold(ExtElement::zero(n), |acc, (idx, c)| {
                let idx: Vec<usize> = idx.into_iter().collect();
                acc.add(&ExtElement::monomial(n, &idx, c).unwrap()).unwrap()
            })
        },
    )
}

/// Products of elementary matrices in `GL(3,ℤ)`.
fn gl3() -> impl Strategy<Value = IntMatrix> {
    prop::collection::vec((0usize..3, 0usize..3, -2i64..=2), 0..5).prop_map(|ops| {
        let mut m = IntMatrix::identity(3);
        for (i, j, k) in ops {
            if i != j {
                let mut e = IntMatrix::identity(3);
                e.set(i, j, k);
                m = m.mul(&e).unwrap();
            }
        }
        m
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wedge_is_associative(a in element(4), b in element(4), c in element(4)) {
        let left = a.wedge(&b).unwrap().wedge(&c).unwrap();
        let right = a.wedge(&b.wedge(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn one_forms_anticommute(u in prop::collection::vec(-4i64..=4, 3), v in prop::collection::vec(-4i64..=4, 3)) {
        let (x, y) = (ExtElement::linear(&u), ExtElement::linear(&v));
        let s = x.wedge(&y).unwrap().add(&y.wedge(&x).unwrap()).unwrap();
        prop_assert!(s.is_zero());
    }

    #[test]
    fn gl_action_composes(b1 in gl3(), b2 in gl3(), q in 1i64..6, a in -6i64..6) {
        let c = class_of_module(&ModuleDescriptor::new(q, vec![0, a]).unwrap()).unwrap();
        let twice = gl_action(&b1, &gl_action(&b2, &c).unwrap()).unwrap();
        let once = gl_action(&b2.mul(&b1).unwrap(), &c).unwrap();
        prop_assert_eq!(twice, once);
    }

    #[test]
    fn conjugated_class_is_gl_image(b in gl3(), q in 1i64..6, a in -6i64..6) {
        let plain = class_of_module(&ModuleDescriptor::new(q, vec![a, 0]).unwrap()).unwrap();
        let twisted = class_of_module(&ModuleDescriptor::with_conjugator(q, vec![a, 0], b.clone()).unwrap()).unwrap();
        prop_assert_eq!(twisted, gl_action(&b, &plain).unwrap());
    }

    #[test]
    fn closed_form_equals_iteration(d1 in prop_oneof![-3i64..=-2, 2i64..=3], d2 in prop_oneof![-3i64..=-2, 2i64..=3], d3 in prop_oneof![-3i64..=-2, 2i64..=3], a in -4i64..=4, level in 0u32..4) {
        let spec = DilationSpec::diagonal(&[d1, d2, d3]).unwrap();
        let m = ModuleDescriptor::new(1, vec![a, 0]).unwrap();
        prop_assert_eq!(pmra_level_class(&spec, &m, level).unwrap(), pmra_level_closed_form(&spec, &m, level).unwrap());
    }

    /// Rank is multiplicative under dilation and W_i has rank (d − 1)·dⁱ·q.
    #[test]
    fn wavelet_ranks(d in 2i64..=4, q in 1i64..=3, a in -3i64..=3, level in 0u32..3) {
        let spec = DilationSpec::diagonal(&[d, d]).unwrap();
        let m = ModuleDescriptor::new(q, vec![a]).unwrap();
        let w = wavelet_class(&spec, &m, level).unwrap();
        let big = d * d;
        prop_assert_eq!(w.class.rank(), (big - 1) * big.pow(level) * q);
        prop_assert!(w.cancellation_valid);
    }
}

#[test]
fn dilation_in_two_variables_keeps_sign() {
    let spec = DilationSpec::diagonal(&[2, -3]).unwrap();
    let v = dilate_class(&spec, &ModuleDescriptor::new(1, vec![1]).unwrap()).unwrap();
    assert_eq!((v.q, v.twists.clone()), (6, vec![-1]));
}

#[test]
fn odd_classes_rejected() {
    assert!(KClass::new(ExtElement::generator(3, 1).unwrap()).is_err());
}

#[test]
fn cancellation_flag_depends_on_dimension() {
    let spec = DilationSpec::diagonal(&[2; 5]).unwrap();
    let w = wavelet_class(&spec, &ModuleDescriptor::new(1, vec![0, 0, 0, 1]).unwrap(), 0).unwrap();
    assert!(!w.cancellation_valid);
}
