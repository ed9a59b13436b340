use super::*;
use crate::rat::{rat, rat_i};
use builtin::BUILTIN_NAMES;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn f(name: &str) -> Field {
    builtin_field(name).unwrap()
}

fn random_sparse(field: &Field, rng: &mut StdRng) -> FieldElement {
    let d = field.degree();
    let mut coeffs = vec![Rat::zero(); d];
    let nnz = rng.random_range(1..=3.min(d));
    for _ in 0..nnz {
        let k = rng.random_range(0..d);
        coeffs[k] = rat(rng.random_range(-5..=5), rng.random_range(1..=3));
    }
    field.element(coeffs).unwrap()
}

#[test]
fn gaussian_field_is_valid() {
    let qi = f("Q(i)");
    assert_eq!(qi.degree(), 2);
    let i = qi.constant("i").unwrap();
    assert_eq!(i.mul(&i).unwrap(), qi.from_int(-1));
}

#[test]
fn zeta7_i_field_and_sigma2_order() {
    let l = f("Q(zeta7,i)");
    assert_eq!(l.degree(), 12);
    let sigma2 = l.aut("sigma2").unwrap();
    assert_eq!(sigma2.order(), 3);
    let tau = l.aut("tau").unwrap();
    assert_eq!(tau.order(), 2);
    // tau flips the Gauss sum: tau(sqrt(-7)) = -sqrt(-7)
    let sm7 = l.constant("sqrtm7").unwrap();
    assert_eq!(tau.apply(&sm7).unwrap(), sm7.neg());
    // sigma2 fixes it (2 is a square mod 7)
    assert_eq!(sigma2.apply(&sm7).unwrap(), sm7);
}

#[test]
fn corrupted_table_is_rejected() {
    let mut spec = FieldSpecJson::from_field(&f("Q(i)"));
    // break i*i
    spec.mult_table.as_mut().unwrap()[1][1] = vec!["1".into(), "1".into()];
    let err = spec.into_field().unwrap_err();
    match err {
        FieldError::NonAssociative(..) | FieldError::NotRingMap(..) | FieldError::EmbeddingMismatch(..) => {}
        other => panic!("expected structural rejection, got {other}"),
    }
}

#[test]
fn conjugate_product_in_gaussian() {
    let qi = f("Q(i)");
    let x = qi.parse_element("1+i").unwrap();
    let y = qi.parse_element("1-i").unwrap();
    assert_eq!(x.mul(&y).unwrap(), qi.from_int(2));
}

#[test]
fn golden_ratio_inverse() {
    // phi^2 = phi + 1, so 1/phi = phi - 1
    let q5 = f("Q(sqrt5)");
    let phi = q5.constant("phi").unwrap();
    let expected = phi.sub(&q5.one()).unwrap();
    assert_eq!(phi.inv().unwrap(), expected);
}

#[test]
fn zero_has_no_inverse() {
    let qi = f("Q(i)");
    assert!(matches!(qi.zero().inv(), Err(FieldError::ZeroInverse)));
}

#[test]
fn field_mismatch_is_reported() {
    let a = f("Q(i)").one();
    let b = f("Q(sqrt5)").one();
    assert!(matches!(a.add(&b), Err(FieldError::FieldMismatch(..))));
}

#[test]
fn automorphism_examples() {
    let qm7 = f("Q(sqrt-7)");
    let s = qm7.constant("sqrtm7").unwrap();
    assert_eq!(qm7.aut("sigma").unwrap().apply(&s).unwrap(), s.neg());

    let k = f("Q(i,sqrt5)");
    let phi = k.constant("phi").unwrap();
    let sigma_phi = k.constant("sigma_phi").unwrap();
    assert_eq!(k.aut("sigma").unwrap().apply(&phi).unwrap(), sigma_phi);

    for name in BUILTIN_NAMES {
        let field = f(name);
        for aut in field.automorphism_names() {
            let a = field.aut(&aut).unwrap();
            assert_eq!(a.apply(&field.one()).unwrap(), field.one());
        }
    }
}

#[test]
fn embedding_examples() {
    let qi = f("Q(i)");
    let e = qi.constant("i").unwrap().embed();
    assert!((e - num_complex::Complex64::new(0.0, 1.0)).norm() < 1e-15);

    let l = f("Q(zeta7)");
    let nu2 = l.constant("nu2").unwrap();
    let expected = 2.0 * (2.0 * std::f64::consts::PI / 7.0).cos();
    assert!((nu2.embed().re - expected).abs() < 1e-12);
    assert!(nu2.embed().im.abs() < 1e-12);

    assert_eq!(qi.zero().embed(), num_complex::Complex64::new(0.0, 0.0));
}

#[test]
fn automorphisms_are_ring_maps_on_random_pairs() {
    for name in BUILTIN_NAMES {
        let field = f(name);
        let mut rng = StdRng::seed_from_u64(7);
        for aut_name in field.automorphism_names() {
            let a = field.aut(&aut_name).unwrap();
            for _ in 0..200 {
                let x = random_sparse(&field, &mut rng);
                let y = random_sparse(&field, &mut rng);
                let lhs = a.apply(&x.mul(&y).unwrap()).unwrap();
                let rhs = a.apply(&x).unwrap().mul(&a.apply(&y).unwrap()).unwrap();
                assert_eq!(lhs, rhs, "{aut_name} on {name}");
                let lhs_add = a.apply(&x.add(&y).unwrap()).unwrap();
                let rhs_add = a.apply(&x).unwrap().add(&a.apply(&y).unwrap()).unwrap();
                assert_eq!(lhs_add, rhs_add);
            }
        }
    }
}

#[test]
fn inverse_times_self_is_one() {
    for name in BUILTIN_NAMES {
        let field = f(name);
        let mut rng = StdRng::seed_from_u64(11);
        let mut done = 0;
        while done < 200 {
            let x = random_sparse(&field, &mut rng);
            if x.is_zero() {
                continue;
            }
            let inv = x.inv().unwrap();
            assert!(x.mul(&inv).unwrap().is_one(), "inv failed in {name}");
            done += 1;
        }
    }
}

#[test]
fn embedding_respects_arithmetic() {
    for name in BUILTIN_NAMES {
        let field = f(name);
        let mut rng = StdRng::seed_from_u64(13);
        for _ in 0..100 {
            let x = random_sparse(&field, &mut rng);
            let y = random_sparse(&field, &mut rng);
            let prod = x.mul(&y).unwrap().embed();
            let direct = x.embed() * y.embed();
            let scale = 1f64.max(direct.norm());
            assert!((prod - direct).norm() <= 1e-12 * scale, "mul embed in {name}");
            let sum = x.add(&y).unwrap().embed();
            assert!((sum - (x.embed() + y.embed())).norm() <= 1e-12 * scale);
        }
    }
}

#[test]
fn adjoin_sqrt_17_over_silver_field() {
    let k = f("Q(i,sqrt-7)");
    let ext = k.adjoin_sqrt(&k.from_int(17), "s17").unwrap();
    assert_eq!(ext.degree(), 8);
    let s = ext.constant("s17").unwrap();
    assert_eq!(s.mul(&s).unwrap(), ext.from_int(17));
    // conjugation fixes the adjoined positive real root
    assert_eq!(s.conj(), s);
    // base elements lift compatibly
    let omega = k.constant("omega").unwrap();
    let lifted = omega.lift_to(&ext).unwrap();
    assert!((lifted.embed() - omega.embed()).norm() < 1e-12);
}

#[test]
fn adjoin_rejects_non_positive_radicand() {
    let k = f("Q(i)");
    assert!(matches!(
        k.adjoin_sqrt(&k.from_int(-3), "s"),
        Err(FieldError::AdjoinNotPositive(_))
    ));
}

#[test]
fn simple_sqrt_finds_visible_roots() {
    let k = f("Q(i,sqrt5)");
    assert_eq!(k.simple_sqrt(&k.from_int(1)), Some(k.one()));
    assert_eq!(
        k.simple_sqrt(&k.from_rat(rat(9, 4))),
        Some(k.from_rat(rat(3, 2)))
    );
    // 5 is the square of the basis element sqrt5
    let root5 = k.constant("sqrt5").unwrap();
    assert_eq!(k.simple_sqrt(&k.from_int(5)), Some(root5));
    // 17 has no square root in Q(i,sqrt-7)
    let silver = f("Q(i,sqrt-7)");
    assert_eq!(silver.simple_sqrt(&silver.from_int(17)), None);
}

#[test]
fn parse_element_forms() {
    let k = f("Q(i,sqrt-7)");
    assert_eq!(k.parse_element("-17").unwrap(), k.from_int(-17));
    let omega = k.constant("omega").unwrap();
    assert_eq!(k.parse_element("1/2+1/2*sqrtm7").unwrap(), omega);
    assert_eq!(k.parse_element("omega").unwrap(), omega);
    let qi = f("Q(i)");
    let one_minus_i = qi.element(vec![rat_i(1), rat_i(-1)]).unwrap();
    assert_eq!(qi.parse_element("1-i").unwrap(), one_minus_i);
    assert_eq!(
        qi.parse_element("2i").unwrap(),
        qi.element(vec![rat_i(0), rat_i(2)]).unwrap()
    );
    assert!(qi.parse_element("nonsense").is_err());
}

#[test]
fn field_spec_json_round_trip() {
    for name in ["Q(i)", "Q(i,sqrt-7)", "Q(zeta7)"] {
        let field = f(name);
        let json = FieldSpecJson::from_field(&field);
        let text = serde_json::to_string(&json).unwrap();
        let back: FieldSpecJson = serde_json::from_str(&text).unwrap();
        let rebuilt = back.into_field().unwrap();
        assert_eq!(rebuilt.degree(), field.degree());
        // exact table agreement
        for i in 0..field.degree() {
            for j in 0..field.degree() {
                assert_eq!(rebuilt.mult_table()[i][j], field.mult_table()[i][j]);
            }
        }
    }
}

#[test]
fn min_poly_spec_builds_power_basis_field() {
    let json = FieldSpecJson {
        name: "Q(i)-from-minpoly".into(),
        degree: 2,
        basis: vec!["1".into(), "i".into()],
        min_poly: Some(vec!["-1".into(), "0".into()]),
        mult_table: None,
        automorphisms: [
            (
                "id".to_string(),
                vec![vec!["1".into(), "0".into()], vec!["0".into(), "1".into()]],
            ),
            (
                "conj".to_string(),
                vec![vec!["1".into(), "0".into()], vec!["0".into(), "-1".into()]],
            ),
        ]
        .into_iter()
        .collect(),
        conj: "conj".into(),
        embedding: vec![
            ["1.0".into(), "0.0".into()],
            ["0.0".into(), "1.0".into()],
        ],
    };
    let field = json.into_field().unwrap();
    let i = field.basis_element(1);
    assert_eq!(i.mul(&i).unwrap(), field.from_int(-1));
}

#[test]
fn broken_automorphisms_are_rejected() {
    // an automorphism must fix 1
    let mut spec = FieldSpecJson::from_field(&f("Q(i)"));
    spec.automorphisms.insert(
        "bad".into(),
        vec![vec!["2".into(), "0".into()], vec!["0".into(), "1".into()]],
    );
    assert!(matches!(
        spec.into_field(),
        Err(FieldError::DoesNotFixOne(..))
    ));
    // and respect the multiplication table
    let mut spec = FieldSpecJson::from_field(&f("Q(i)"));
    spec.automorphisms.insert(
        "bad".into(),
        vec![vec!["1".into(), "0".into()], vec!["1".into(), "1".into()]],
    );
    assert!(matches!(spec.into_field(), Err(FieldError::NotRingMap(..))));
    // the declared group must be composition closed
    let full = FieldSpecJson::from_field(&f("Q(i,sqrt-7)"));
    let mut partial = full.clone();
    partial.automorphisms.remove("conj");
    partial.conj = "sigma".into();
    assert!(matches!(partial.into_field(), Err(FieldError::NotClosed(..))));
}
