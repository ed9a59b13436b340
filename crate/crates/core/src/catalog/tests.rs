use super::*;
use num::One;
use num_complex::Complex64;

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn default_code(name: CodeName) -> CodeSpec {
    make_code(name, &Overrides::default()).unwrap()
}

#[test]
fn silver_has_mixing_matrix_block() {
    let silver = default_code(CodeName::Silver);
    assert_eq!(silver.kappa, 8);
    assert_eq!(silver.side, 2);
    let r7 = 7f64.sqrt();
    let d5 = silver.basis[4].embed();
    let expected = [
        [c64(1.0, 1.0), c64(-1.0, 2.0)],
        [c64(-1.0, -2.0), c64(-1.0, 1.0)],
    ];
    for r in 0..2 {
        for c in 0..2 {
            assert!((d5[(r, c)] - expected[r][c] / r7).norm() < 1e-12);
        }
    }
}

#[test]
fn silver_first_four_are_alamouti_pattern() {
    let silver = default_code(CodeName::Silver);
    let k = &silver.field;
    assert_eq!(silver.basis[0], MatrixOverField::identity(k, 2));
    assert_eq!(silver.basis[2].get(0, 1), &k.from_int(-1));
    assert_eq!(silver.basis[3].get(0, 1), &k.constant("i").unwrap());
}

#[test]
fn silver_lambda_form_consistency() {
    // every basis matrix is lambda(c + e d): (1,1) = sigma(c), (0,1) = -sigma(d)
    let silver = default_code(CodeName::Silver);
    let sigma = silver.field.aut("sigma").unwrap();
    for b in &silver.basis {
        let c = b.get(0, 0);
        let d = b.get(1, 0);
        assert_eq!(b.get(1, 1), &sigma.apply(c).unwrap());
        assert_eq!(b.get(0, 1), &sigma.apply(d).unwrap().neg());
    }
}

#[test]
fn silver_mixing_view_lands_in_the_order_after_sqrt7_scale() {
    // both views agree: sqrt7 * (c,d) lies in O = Z[i] + Z[i]*(1+sqrt-7)/2
    let silver = default_code(CodeName::Silver);
    let k = &silver.field;
    let sqrt7 = k.constant("sqrt7").unwrap();
    let in_order = |x: &crate::numfield::FieldElement| {
        // coordinates over {1, i, sm7, i*sm7}: a + bi + c*sm7 + d*i*sm7
        // lies in O iff a-c, b-d, 2c, 2d are integers
        let co = x.coeffs();
        let ints = [
            &co[0] - &co[2],
            &co[1] - &co[3],
            &co[2] + &co[2],
            &co[3] + &co[3],
        ];
        ints.iter().all(|r| r.denom().is_one())
    };
    for b in &silver.basis {
        let c = b.get(0, 0).mul(&sqrt7).unwrap();
        let d = b.get(1, 0).mul(&sqrt7).unwrap();
        assert!(in_order(&c), "c coordinate escapes the order: {:?}", c);
        assert!(in_order(&d), "d coordinate escapes the order: {:?}", d);
    }
    // and the order view itself generates lambda-form matrices
    let (_, order_basis) = silver_order_view_basis().unwrap();
    assert_eq!(order_basis.len(), 8);
    let sigma = silver.field.aut("sigma").unwrap();
    for b in &order_basis {
        assert_eq!(b.get(1, 1), &sigma.apply(b.get(0, 0)).unwrap());
    }
}

#[test]
fn iter_silver_defaults() {
    let code = default_code(CodeName::IterSilver);
    assert_eq!(code.kappa, 16);
    assert_eq!(code.side, 4);
    assert_eq!(code.fully_diverse_claim, Claim::Yes);
    assert_eq!(code.claimed_exponent, Some(13));
    assert_eq!(code.theta_label.as_deref(), Some("-17"));
    assert!(!code.params.as_ref().unwrap().is_scaled());
}

#[test]
fn iter_silver_theta_minus_one_is_scaled_complexity_variant() {
    let code = make_code(
        CodeName::IterSilver,
        &Overrides {
            theta: Some("-1".into()),
            ..Default::default()
        },
    )
    .unwrap();
    assert!(code.params.as_ref().unwrap().is_scaled());
    assert_eq!(code.claimed_exponent, Some(10));
    assert_eq!(code.fully_diverse_claim, Claim::No);
    let hint = code.paper_hint.unwrap();
    assert_eq!(hint.groups, vec![vec![1, 11], vec![3, 9], vec![4, 10], vec![2, 12]]);
    assert_eq!(hint.conditioned, vec![5, 6, 7, 8, 13, 14, 15, 16]);
    // theta' = 1, so the basis stays in the degree-4 field
    assert_eq!(code.field.degree(), 4);
}

#[test]
fn jafarkhani_default_is_not_fully_diverse() {
    let code = default_code(CodeName::Jafarkhani);
    assert_eq!(code.kappa, 8);
    assert_eq!(code.side, 4);
    assert_eq!(code.fully_diverse_claim, Claim::No);
    // theta = -3 restores the claim
    let fixed = make_code(
        CodeName::IterAlamouti,
        &Overrides::default(),
    )
    .unwrap();
    assert_eq!(fixed.theta_label.as_deref(), Some("-3"));
    assert_eq!(fixed.fully_diverse_claim, Claim::Yes);
}

#[test]
fn iter_alamouti_over_sqrt2_base() {
    let code = make_code(
        CodeName::IterAlamouti,
        &Overrides {
            base: Some("Q(sqrt2)".into()),
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(code.kappa, 16);
    // D1 and D2 are real multiples of each other, so are B1 and B2
    let b1 = code.basis[0].embed();
    let b2 = code.basis[1].embed();
    assert!((b2 - b1 * Complex64::new(2f64.sqrt(), 0.0)).norm() < 1e-12);
}

#[test]
fn golden_uses_beta_twist_and_sqrt5_scale() {
    let code = default_code(CodeName::Golden);
    assert_eq!(code.kappa, 8);
    let alg = code.algebra.as_ref().unwrap();
    let k = alg.coordinate_field();
    assert_eq!(alg.gamma(), &k.constant("i").unwrap());
    // first basis matrix is lambda(beta)/sqrt5 with beta = 1 + i*sigma(phi)
    let beta = k
        .one()
        .add(
            &k.constant("i")
                .unwrap()
                .mul(&k.constant("sigma_phi").unwrap())
                .unwrap(),
        )
        .unwrap();
    let expect = beta.embed() / 5f64.sqrt();
    assert!((code.basis[0].embed()[(0, 0)] - expect).norm() < 1e-12);
}

#[test]
fn degree3_gamma_is_tau_fixed() {
    for name in [CodeName::Deg3Ex1, CodeName::Deg3Ex2] {
        let code = default_code(name);
        let alg = code.algebra.as_ref().unwrap();
        let tau = alg.coordinate_field().aut("tau").unwrap();
        assert_eq!(&tau.apply(alg.gamma()).unwrap(), alg.gamma());
        assert_eq!(code.kappa, 18);
        assert_eq!(code.side, 3);
    }
}

#[test]
fn iter_deg3_theta_minus_one_stays_exact_and_claims_30() {
    let code = make_code(
        CodeName::IterDeg3Ex1,
        &Overrides {
            theta: Some("-1".into()),
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(code.kappa, 36);
    assert_eq!(code.side, 6);
    assert_eq!(code.claimed_exponent, Some(30));
    assert_eq!(code.fully_diverse_claim, Claim::No);
    // theta' = 1: no field extension needed
    assert_eq!(code.field.degree(), 12);
    assert!(code.paper_hint.is_some());
}

#[test]
fn iter_deg3_default_adjoins_quartic_root() {
    let code = default_code(CodeName::IterDeg3Ex1);
    assert!(code.params.as_ref().unwrap().is_scaled());
    assert_eq!(code.field.degree(), 24);
    assert_eq!(code.fully_diverse_claim, Claim::Yes);
    // example 2 lifts from Q(zeta7) through Q(zeta7,i) before adjoining
    let ex2 = default_code(CodeName::IterDeg3Ex2);
    assert_eq!(ex2.field.degree(), 24);
    assert_eq!(ex2.kappa, 36);
}

#[test]
fn normalization_invariant_holds() {
    for name in [
        CodeName::Alamouti,
        CodeName::Silver,
        CodeName::Golden,
        CodeName::Jafarkhani,
        CodeName::IterSilver,
        CodeName::IterGolden,
    ] {
        let code = default_code(name);
        let total: f64 = code.float_basis().iter().map(|b| b.norm_squared()).sum();
        let target = (code.kappa * code.side) as f64;
        assert!(
            (total - target).abs() < 1e-9 * target,
            "{}: {total} vs {target}",
            code.label
        );
    }
}

#[test]
fn code_json_round_trip_is_bit_exact() {
    let mut cases: Vec<(CodeName, Overrides)> = CodeName::ALL
        .iter()
        .map(|n| (*n, Overrides::default()))
        .collect();
    cases.push((
        CodeName::IterSilver,
        Overrides {
            theta: Some("-1".into()),
            ..Default::default()
        },
    ));
    for (name, overrides) in cases {
        let code = make_code(name, &overrides).unwrap();
        let json = CodeSpecJson::from_spec(&code);
        let text = serde_json::to_string(&json).unwrap();
        let back: CodeSpecJson = serde_json::from_str(&text).unwrap();
        let spec = back.into_spec().unwrap();
        // exact rational agreement
        assert_eq!(spec.basis, code.basis);
        // float views agree to 1e-15
        for (a, b) in spec.basis.iter().zip(&code.basis) {
            assert!((a.embed() - b.embed()).norm() <= 1e-15 * (1.0 + b.embed().norm()));
        }
        // serialization is stable
        let again = serde_json::to_string(&CodeSpecJson::from_spec(&spec)).unwrap();
        let reparsed: CodeSpecJson = serde_json::from_str(&again).unwrap();
        assert_eq!(reparsed.basis, json.basis);
    }
}

#[test]
fn unknown_names_and_bad_overrides_error() {
    assert!(matches!(
        make_code_by_name("nonsense", &Overrides::default()),
        Err(CatalogError::UnknownName(_))
    ));
    assert!(matches!(
        make_code(
            CodeName::IterSilver,
            &Overrides {
                theta: Some("zeta9".into()),
                ..Default::default()
            }
        ),
        Err(CatalogError::BadOverride(..))
    ));
    assert!(matches!(
        make_code(
            CodeName::Golden,
            &Overrides {
                theta: Some("-1".into()),
                ..Default::default()
            }
        ),
        Err(CatalogError::BadOverride(..))
    ));
}

#[test]
fn integral_generators_cover_the_order() {
    let silver = default_code(CodeName::Silver);
    let gens = integral_generators(silver.algebra.as_ref().unwrap()).unwrap();
    assert_eq!(gens.len(), 8);
    // products of generators stay integral in the omega coordinates
    let prod = gens[2].mul(&gens[2]).unwrap(); // omega^2 = omega - 2
    let k = silver.algebra.as_ref().unwrap().coordinate_field();
    let omega = k.constant("omega").unwrap();
    let expect = omega.sub(&k.from_int(2)).unwrap();
    assert_eq!(prod.coords()[0], expect);
}

#[test]
fn silver_unit_symbol_codeword_is_block_identity() {
    // g = e1 picks alpha(D1, 0) = diag(I, sigma(I)) = I4 for any theta
    let code = make_code(CodeName::IterSilver, &Overrides::default()).unwrap();
    assert_eq!(code.basis[0], MatrixOverField::identity(&code.field, 4));
}

#[test]
fn commutant_generators_for_iterated_alamouti_families() {
    use crate::algebra::{alpha, commutant_check, lambda_repr};
    // alpha(q, j q') with rational q, q' commutes with every basis matrix,
    // over both the Q base (8 matrices) and the Q(sqrt2) base (16)
    for base in [None, Some("Q(sqrt2)".to_string())] {
        let code = make_code(
            CodeName::IterAlamouti,
            &Overrides {
                base: base.clone(),
                ..Default::default()
            },
        )
        .unwrap();
        let alg = code.algebra.as_ref().unwrap();
        let params = code.params.as_ref().unwrap();
        let k = alg.coordinate_field();
        let q = lambda_repr(alg, &alg.from_scalar(k.from_int(2)));
        let jq = lambda_repr(
            alg,
            &alg.e().mul(&alg.from_scalar(k.from_int(-3))).unwrap(),
        );
        let cand = alpha(&q, &jq, params).unwrap();
        assert!(commutant_check(&code.basis, &[cand]).unwrap(), "base {base:?}");
    }
}

#[test]
fn golden_theta_cannot_be_scaled() {
    // 1-i is neither real nor totally imaginary: the scaled map is refused
    let err = make_code(
        CodeName::IterGolden,
        &Overrides {
            scaled: Some(true),
            ..Default::default()
        },
    );
    assert!(matches!(
        err,
        Err(CatalogError::Algebra(
            crate::algebra::AlgebraError::ThetaNotScalable
        ))
    ));
}
