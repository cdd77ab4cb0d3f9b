use proptest::prelude::*;
use serde_json::Value;
use tcalg::hecke::affine::Exponent;
use tcalg::hecke::catalog::CaseSpec;
use tcalg::hecke::dps::{equivalence_classes, Series, Verdict};
use tcalg::hecke::qz::{int, rat, Mat, Qz, Q};
use tcalg::hecke::*;
use tcalg::HeckeError;

fn v(xs: &[(i64, i64)]) -> Vec<Q> {
    xs.iter().map(|&(n, d)| rat(n, d)).collect()
}

fn iv(xs: &[i64]) -> Vec<Q> {
    xs.iter().map(|&n| int(n)).collect()
}

fn real(case: &CaseSpec, xs: &[i64]) -> Exponent {
    Exponent::real(iv(xs), &case.presentation().unwrap().lattice)
}

fn sorted(mut e: Vec<Exponent>) -> Vec<Exponent> {
    e.sort();
    e
}

#[test]
fn builtin_catalog_round_trips_byte_identically() {
    let cat = Catalog::builtin();
    assert_eq!(cat.to_json(), Catalog::builtin_json());
    assert_eq!(Catalog::from_json(&cat.to_json()).unwrap(), cat);
    assert_eq!(cat.case_ids(), ["G2-unram", "G2-ram", "B2ext-unram", "B2ext-ram", "D4-split"]);
}

fn mutated(f: impl FnOnce(&mut Value)) -> Result<Catalog, tcalg::SchemaError> {
    let mut doc: Value = serde_json::from_str(Catalog::builtin_json()).unwrap();
    f(&mut doc);
    Catalog::from_json(&serde_json::to_string(&doc).unwrap())
}

#[test]
fn non_square_generator_matrix_is_rejected_with_location() {
    let err = mutated(|d| {
        let row = &mut d["cases"][0]["modules"][6]["matrices"][0][0];
        row.as_array_mut().unwrap().push(Value::String("0".into()));
    })
    .unwrap_err();
    assert_eq!(err.location, "/cases/0/modules/6/matrices/0/0");
}

#[test]
fn schema_errors_carry_locations() {
    let err = mutated(|d| d["cases"][1]["translations"][0]["word"] = "0 1 2".into()).unwrap_err();
    assert_eq!(err.location, "/cases/1/translations/0/word");
    let err = mutated(|d| d["cases"][2]["braid"][0][1] = 5.into()).unwrap_err();
    assert_eq!(err.location, "/cases/2/braid/0/1");
    let err = mutated(|d| d["cases"][0]["modules"][2]["matrices"][2][0][0] = "q^".into()).unwrap_err();
    assert_eq!(err.location, "/cases/0/modules/2/matrices/2/0/0");
    let err = mutated(|d| d["cases"][4]["lattice"][1] = serde_json::json!(["1", "1", "0"])).unwrap_err();
    assert_eq!(err.location, "/cases/4/lattice/1");
    let err = mutated(|d| d["cases"][0]["families"][0]["fixtures"][1]["constituents"][0] = "V9".into()).unwrap_err();
    assert!(err.location.starts_with("/cases/0/families/0/fixtures/1/constituents"));
    let err = mutated(|d| d["cases"][0]["extra"] = 1.into()).unwrap_err();
    assert!(err.location.starts_with("line"));
    assert!(Catalog::from_json("{").is_err());
}

#[test]
fn every_module_satisfies_the_relations_at_q_4_and_9() {
    let cat = Catalog::builtin();
    for sq in [int(2), int(3)] {
        for case in &cat.cases {
            for m in case.modules_at(&sq).unwrap() {
                let rep = verify_relations(&m);
                assert!(rep.passed(), "{} {}: {:?}", case.id, m.name, rep.failure);
                assert_eq!(rep.quadratic_checked, case.generators.len());
            }
        }
    }
}

#[test]
fn corrupted_v2_fails_the_braid_check() {
    let cat = mutated(|d| d["cases"][0]["modules"][6]["matrices"][2][0][1] = "2*sq*(q^2-q+1)".into()).unwrap();
    let mut m = cat.case("G2-unram").unwrap().module("V2", &int(2)).unwrap();
    let rep = verify_relations(&m);
    assert!(matches!(rep.failure, Some(RelationFailure::Braid { .. })), "{rep:?}");
    m.matrices[0] = Mat::scalar(2, Qz::from_int(3));
    assert_eq!(verify_relations(&m).failure, Some(RelationFailure::Quadratic { generator: 0 }));
}

#[test]
fn trivial_module_relations_and_exponent() {
    let cat = Catalog::builtin();
    let case = cat.case("G2-unram").unwrap();
    let m = case.module("trivial", &int(2)).unwrap();
    assert!(verify_relations(&m).passed());
    assert_eq!(exponents(&m).unwrap(), vec![real(case, &[2, 1, -3])]);
}

#[test]
fn hat_t_of_v1_prime() {
    let cat = Catalog::builtin();
    let case = cat.case("G2-unram").unwrap();
    let m = case.module("V1'", &int(2)).unwrap();
    let p = &m.presentation;
    let w1 = iv(&[1, 0, -1]);
    let w2 = iv(&[1, 1, -2]);
    assert_eq!(p.word_length(p.word_for(&w1).unwrap()), 10);
    assert_eq!(p.word_length(p.word_for(&w2).unwrap()), 18);
    assert_eq!(p.word_for(&w1).unwrap(), [0, 1, 2, 1, 2, 1]);
    assert_eq!(hat_t(&m, &w1).unwrap(), Mat::scalar(1, Qz::from_int(4)));
    assert_eq!(hat_t(&m, &w2).unwrap(), Mat::scalar(1, Qz::from_int(64)));
    assert!(matches!(hat_t(&m, &iv(&[-1, 0, 1])), Err(HeckeError::WordMissing(_))));
}

#[test]
fn hat_t_matrices_commute_and_obey_the_semigroup_law() {
    let cat = Catalog::builtin();
    for case in &cat.cases {
        let pres = case.presentation().unwrap();
        for m in case.modules_at(&int(2)).unwrap() {
            let hs: Vec<Mat> = pres.lattice.basis.iter().map(|b| hat_t(&m, b).unwrap()).collect();
            for a in &hs {
                for b in &hs {
                    assert_eq!(a.mul(b), b.mul(a), "{} {}", case.id, m.name);
                }
            }
            // every cataloged word, including the non-basis ones
            for t in &pres.translations {
                let coords = pres.lattice.dominant_coords(&t.omega);
                let direct = hat_t_word(&m, &t.word);
                if let Some(c) = coords {
                    let mut prod = Mat::identity(m.dim());
                    for (k, h) in c.iter().zip(&hs) {
                        prod = prod.mul(&h.pow(*k));
                    }
                    assert_eq!(direct, prod, "{} {} {:?}", case.id, m.name, t.omega);
                }
            }
        }
    }
}

#[test]
fn non_basis_words_agree_with_basis_products() {
    let cat = Catalog::builtin();
    // D4: t(2,0,0,0)·t(1,1,1,1)·t(1,1,1,-1) = t(2,1,1,0)²
    let case = cat.case("D4-split").unwrap();
    for m in case.modules_at(&int(3)).unwrap() {
        let h = |x: &[i64]| hat_t(&m, &iv(x)).unwrap();
        let lhs = h(&[2, 0, 0, 0]).mul(&h(&[1, 1, 1, 1])).mul(&h(&[1, 1, 1, -1]));
        assert_eq!(lhs, h(&[2, 1, 1, 0]).pow(2), "{}", m.name);
    }
    // B2ext: two reduced words for the same translation
    for id in ["B2ext-unram", "B2ext-ram"] {
        let case = cat.case(id).unwrap();
        let pres = case.presentation().unwrap();
        let om = iv(&[1, 1, 0]);
        let words: Vec<_> = pres.translations.iter().filter(|t| t.omega == om).map(|t| t.word.clone()).collect();
        assert_eq!(words.len(), 2);
        assert_ne!(words[0], words[1]);
        for m in case.modules_at(&int(2)).unwrap() {
            assert_eq!(hat_t_word(&m, &words[0]), hat_t_word(&m, &words[1]), "{id} {}", m.name);
        }
    }
}

#[test]
fn computed_exponents_match_the_catalog() {
    let cat = Catalog::builtin();
    for sq in [int(2), int(3)] {
        for case in &cat.cases {
            for m in case.modules_at(&sq).unwrap() {
                assert_eq!(exponents(&m).unwrap(), case.expected_exponents(&m.name).unwrap(), "{} {}", case.id, m.name);
            }
        }
    }
}

#[test]
fn named_exponent_examples() {
    let cat = Catalog::builtin();
    let case = cat.case("G2-unram").unwrap();
    let lat = case.presentation().unwrap().lattice.clone();
    let m = case.module("V3p", &int(2)).unwrap();
    let want = sorted(vec![real(case, &[0, 1, -1]), real(case, &[1, 0, -1]), real(case, &[1, 0, -1])]);
    assert_eq!(exponents(&m).unwrap(), want);
    let m = case.module("V2p", &int(3)).unwrap();
    let want = sorted(vec![
        Exponent::new(iv(&[1, 1, -2]), v(&[(-1, 3), (1, 3), (0, 1)]), &lat),
        Exponent::new(iv(&[1, 1, -2]), v(&[(1, 3), (-1, 3), (0, 1)]), &lat),
    ]);
    assert_eq!(exponents(&m).unwrap(), want);
    assert!(want.iter().all(|e| !e.is_real()));
    let case = cat.case("B2ext-ram").unwrap();
    let lat = case.presentation().unwrap().lattice.clone();
    let half = v(&[(1, 2), (1, 2), (1, 2)]);
    let x1a = exponents(&case.module("X1a", &int(2)).unwrap()).unwrap();
    let x1b = exponents(&case.module("X1b", &int(2)).unwrap()).unwrap();
    assert_eq!(x1a, vec![Exponent::new(iv(&[2, 1, 0]), half, &lat)]);
    assert_eq!(x1a, x1b);
}

#[test]
fn undecodable_eigenvalue_is_an_error() {
    let cat = Catalog::builtin();
    let mut m = cat.case("G2-unram").unwrap().module("trivial", &int(2)).unwrap();
    m.matrices = vec![Mat::scalar(1, Qz::from_int(3)); 3];
    assert!(matches!(exponents(&m), Err(HeckeError::UndecodableEigenvalue(_))));
}

#[test]
fn im_involution_negates_exponents() {
    let cat = Catalog::builtin();
    for case in &cat.cases {
        let pres = case.presentation().unwrap();
        for m in case.modules_at(&int(2)).unwrap() {
            let im = im_involute(&m);
            assert!(verify_relations(&im).passed());
            let e = exponents(&m).unwrap();
            assert_eq!(exponents(&im).unwrap(), negate_all(&pres, &e), "{} {}", case.id, m.name);
            assert_eq!(im_involute(&im).matrices, m.matrices);
        }
    }
    let case = cat.case("G2-unram").unwrap();
    let st = im_involute(&case.module("trivial", &int(2)).unwrap());
    assert_eq!(exponents(&st).unwrap(), vec![real(case, &[-2, -1, 3])]);
    assert!(is_discrete_series(&st).unwrap());
    assert_eq!(
        exponents(&im_involute(&case.module("V1p", &int(2)).unwrap())).unwrap(),
        case.expected_exponents("V1pp").unwrap()
    );
}

#[test]
fn discrete_series_flags() {
    let cat = Catalog::builtin();
    for case in &cat.cases {
        for m in case.modules_at(&int(2)).unwrap() {
            let spec = case.module_spec(&m.name).unwrap();
            assert_eq!(is_discrete_series(&m).unwrap(), spec.discrete_series, "{} {}", case.id, m.name);
        }
    }
    for id in ["G2-unram", "G2-ram"] {
        let case = cat.case(id).unwrap();
        for name in ["steinberg", "V1''", "V2''", "V3''"] {
            assert!(is_discrete_series(&case.module(name, &int(2)).unwrap()).unwrap(), "{id} {name}");
        }
        assert!(!is_discrete_series(&case.module("V2", &int(2)).unwrap()).unwrap());
    }
}

#[test]
fn sqrt_q_requires_a_square_above_one() {
    assert_eq!(sqrt_q(&int(4)), Some(int(2)));
    assert_eq!(sqrt_q(&rat(9, 4)), Some(rat(3, 2)));
    assert_eq!(sqrt_q(&int(5)), None);
    assert_eq!(sqrt_q(&int(1)), None);
}

#[test]
fn dps_templates() {
    let cat = Catalog::builtin();
    let i52 = dps_exponent_list(&cat, Family::I, "G2-unram", &SParam::real(rat(5, 2))).unwrap();
    let case = cat.case("G2-unram").unwrap();
    assert_eq!(i52[0], real(case, &[2, 1, -3]));
    let i12 = dps_exponent_list(&cat, Family::I, "G2-unram", &SParam::real(rat(1, 2))).unwrap();
    let want = sorted(vec![
        real(case, &[0, 1, -1]),
        real(case, &[0, 1, -1]),
        real(case, &[1, 0, -1]),
        real(case, &[1, 0, -1]),
        real(case, &[1, -1, 0]),
        real(case, &[-1, 1, 0]),
    ]);
    assert_eq!(sorted(i12), want);
    let b = dps_exponent_list(&cat, Family::B, "B2ext-unram", &SParam::real(int(3))).unwrap();
    assert_eq!(b.len(), 6);
    assert_eq!(b[0], real(cat.case("B2ext-unram").unwrap(), &[3, 2, 1]));
    assert_eq!(dps_exponent_list(&cat, Family::A, "B2ext-ram", &SParam::real(int(0))).unwrap().len(), 8);
    assert_eq!(dps_exponent_list(&cat, Family::I, "D4-split", &SParam::real(int(0))).unwrap().len(), 24);
    assert!(matches!(
        dps_exponent_list(&cat, Family::J, "D4-split", &SParam::real(int(0))),
        Err(HeckeError::FamilyUnavailable { .. })
    ));
    assert!(matches!(cat.case("E8"), Err(HeckeError::Unknown { .. })));
}

#[test]
fn equivalence_classes_at_named_points() {
    let cat = Catalog::builtin();
    let case = cat.case("G2-unram").unwrap();
    let pres = case.presentation().unwrap();
    let s = Series::new(case, Family::I).unwrap();
    let c = equivalence_classes(&pres, &s.exponents(&SParam::real(rat(5, 2))));
    assert_eq!(c.sizes(), [1, 5]);
    assert!(c.regular);
    assert_eq!(c.classes[0], vec![real(case, &[2, 1, -3])]);
    let c = equivalence_classes(&pres, &s.exponents(&SParam::real(rat(3, 2))));
    assert!(!c.regular);
    let c = equivalence_classes(&pres, &s.exponents(&SParam::real(rat(7, 3))));
    assert_eq!(c.sizes(), [6]);
    assert!(c.regular);
}

fn sp(re: (i64, i64), tor: (i64, i64)) -> SParam {
    SParam::new(rat(re.0, re.1), rat(tor.0, tor.1))
}

fn pts(xs: &[((i64, i64), (i64, i64))]) -> Vec<(Q, Q)> {
    let mut v: Vec<(Q, Q)> = xs.iter().map(|&(r, t)| (rat(r.0, r.1), rat(t.0, t.1))).collect();
    v.sort();
    v
}

fn found(cat: &Catalog, f: Family, id: &str) -> Vec<(Q, Q)> {
    let r = dps_reducibility(cat, f, id).unwrap();
    let mut v: Vec<(Q, Q)> = r.reducibility_points.iter().map(|s| (s.re.clone(), s.tor.clone())).collect();
    v.sort();
    v
}

#[test]
fn every_series_is_consistent_with_its_fixtures() {
    let cat = Catalog::builtin();
    for case in &cat.cases {
        for f in &case.families {
            let r = dps_reducibility(&cat, f.id.parse().unwrap(), &case.id).unwrap();
            assert!(r.consistent(), "{} {}: {:#?}", case.id, f.id, r.conflicts);
            assert!(r.accounting_checked > 0);
        }
    }
}

#[test]
fn reducibility_points_match_the_theorem_lists() {
    let cat = Catalog::builtin();
    let z = (0, 1);
    let h = (1, 2);
    assert_eq!(found(&cat, Family::I, "G2-unram"), pts(&[((5, 2), z), (h, z), (h, h), ((3, 2), (1, 3)), ((3, 2), (2, 3))]));
    assert_eq!(found(&cat, Family::J, "G2-unram"), pts(&[((3, 2), z), (h, z), (h, (1, 6))]));
    assert_eq!(found(&cat, Family::I, "G2-ram"), pts(&[((5, 2), z), (h, z), (h, h)]));
    assert_eq!(
        found(&cat, Family::J, "G2-ram"),
        pts(&[((3, 2), z), (h, z), (h, h), (h, (1, 3)), (h, (2, 3))])
    );
    assert_eq!(found(&cat, Family::B, "B2ext-unram"), pts(&[((3, 1), z), ((1, 1), h), (z, z)]));
    assert_eq!(found(&cat, Family::A, "B2ext-unram"), pts(&[((2, 1), z), ((1, 1), z), (z, z)]));
    assert_eq!(
        found(&cat, Family::I, "B2ext-unram"),
        pts(&[((5, 2), z), ((3, 2), z), ((3, 2), h), (h, z), (h, h)])
    );
    assert_eq!(found(&cat, Family::B, "B2ext-ram"), pts(&[((3, 1), z), (z, z), (z, h)]));
    assert_eq!(found(&cat, Family::A, "B2ext-ram"), pts(&[((2, 1), z), ((1, 1), z), ((1, 1), h), (z, z)]));
    assert_eq!(found(&cat, Family::I, "B2ext-ram"), pts(&[((5, 2), z), ((3, 2), z), (h, z), (h, h)]));
    assert_eq!(found(&cat, Family::I, "D4-split"), pts(&[((5, 2), z), ((3, 2), z), (h, z)]));
    for f in [Family::A, Family::B, Family::C] {
        assert_eq!(found(&cat, f, "D4-split"), pts(&[((3, 1), z), ((1, 1), z)]));
    }
}

#[test]
fn regular_points_classified_by_exponents() {
    let cat = Catalog::builtin();
    let r = dps_reducibility(&cat, Family::I, "G2-unram").unwrap();
    let at = |s: SParam| r.points.iter().find(|p| p.s == s).unwrap().clone();
    let p = at(sp((5, 2), (0, 1)));
    assert_eq!((p.verdict, p.regular), (Verdict::Reducible, true));
    let p = at(sp((1, 2), (0, 1)));
    assert_eq!((p.verdict, p.class_sizes.len()), (Verdict::Undetermined, 3));
    let p = at(sp((3, 2), (0, 1)));
    assert_eq!(p.reducible, Some(false));
}

#[test]
fn exponent_partition_at_one_half() {
    let cat = Catalog::builtin();
    for id in ["G2-unram", "G2-ram"] {
        let case = cat.case(id).unwrap();
        let mut parts = vec![];
        for n in ["V2", "V1p", "V3p"] {
            parts.extend(case.expected_exponents(n).unwrap());
        }
        let series = dps_exponent_list(&cat, Family::I, id, &SParam::real(rat(1, 2))).unwrap();
        assert_eq!(sorted(parts), sorted(series));
        let mut parts = vec![];
        for n in ["V1pp", "V3p", "V2"] {
            parts.extend(case.expected_exponents(n).unwrap());
        }
        let series = dps_exponent_list(&cat, Family::J, id, &SParam::real(rat(1, 2))).unwrap();
        assert_eq!(sorted(parts), sorted(series));
    }
}

fn all_series() -> Vec<(String, Family)> {
    let cat = Catalog::builtin();
    cat.cases
        .iter()
        .flat_map(|c| c.families.iter().map(move |f| (c.id.clone(), f.id.parse().unwrap())))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generic_points_are_irreducible(k in 0usize..14, n in 1i64..200, t in 0i64..12) {
        let cat = Catalog::builtin();
        let (id, fam) = all_series()[k].clone();
        let case = cat.case(&id).unwrap();
        let series = Series::new(case, fam).unwrap();
        // denominators 97 avoid every boundary
        let s = SParam::new(rat(n, 97), &series.period * rat(t, 12));
        let c = equivalence_classes(&series.presentation, &series.exponents(&s));
        prop_assert!(c.regular);
        prop_assert_eq!(c.classes.len(), 1);
        prop_assert_eq!(c.escapes, 0);
    }

    #[test]
    fn exponents_are_periodic_in_the_torsion(k in 0usize..14, n in -20i64..20, t in 0i64..24) {
        let cat = Catalog::builtin();
        let (id, fam) = all_series()[k].clone();
        let series = Series::new(cat.case(&id).unwrap(), fam).unwrap();
        let s = SParam::new(rat(n, 4), rat(t, 24));
        let s2 = SParam::new(s.re.clone(), &s.tor + &series.period);
        prop_assert_eq!(sorted(series.exponents(&s)), sorted(series.exponents(&s2)));
        let c = series.canonical(&s);
        prop_assert_eq!(sorted(series.exponents(&s)).len(), sorted(series.exponents(&c)).len());
    }

    #[test]
    fn alcove_walk_words_match_basis_products(k in 0usize..5, a in 0u32..3, b in 0u32..3) {
        let cat = Catalog::builtin();
        let case = &cat.cases[k];
        let pres = case.presentation().unwrap();
        let m = case.modules_at(&int(2)).unwrap().into_iter().max_by_key(|m| m.dim()).unwrap();
        let basis = &pres.lattice.basis;
        let omega: Vec<Q> = (0..pres.lattice.ambient())
            .map(|i| int(a as i64) * &basis[0][i] + int(b as i64) * &basis[1][i])
            .collect();
        let word = pres.affine.translation_word(&omega);
        prop_assert!(pres.affine.is_translation(&word, &omega));
        let direct = hat_t_word(&m, &word);
        let prod = hat_t(&m, &basis[0]).unwrap().pow(a).mul(&hat_t(&m, &basis[1]).unwrap().pow(b));
        prop_assert_eq!(direct, prod);
    }

    #[test]
    fn exponents_do_not_depend_on_q(k in 0usize..5, sq in 2i64..6) {
        let cat = Catalog::builtin();
        let case = &cat.cases[k];
        for m in case.modules_at(&int(sq)).unwrap() {
            prop_assert!(verify_relations(&m).passed());
            prop_assert_eq!(exponents(&m).unwrap(), case.expected_exponents(&m.name).unwrap());
        }
    }
}
