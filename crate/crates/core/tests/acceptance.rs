use tcalg::hecke::Catalog;
use tcalg::selftest::{self, SuiteReport};

const SEED: u64 = 42;

fn judge(r: SuiteReport) {
    println!("{}", r.summary());
    for n in &r.notes {
        println!("    {n}");
    }
    for f in &r.failures {
        println!("    failure: {f}");
    }
    assert!(r.failures.is_empty(), "criterion {} failed: {:?}", r.id, r.failures);
    assert!(r.within_limit(), "criterion {} took {} ms", r.id, r.millis);
    assert!(r.checks > 0);
}

#[test]
fn criterion_01_composition_axioms() {
    judge(selftest::criterion1(SEED));
}

#[test]
fn criterion_02_jordan_identities() {
    judge(selftest::criterion2(SEED));
}

#[test]
fn criterion_03_cube_round_trip() {
    judge(selftest::criterion3(SEED));
}

#[test]
fn criterion_04_torsor_cardinalities() {
    judge(selftest::criterion4(SEED));
}

#[test]
fn criterion_05_embedding_bijection() {
    judge(selftest::criterion5(SEED));
}

#[test]
fn criterion_06_multiplicity_oracle() {
    judge(selftest::criterion6(SEED));
}

#[test]
fn criterion_07_counting() {
    judge(selftest::criterion7(SEED));
}

#[test]
fn criterion_08_hecke_catalog() {
    judge(selftest::criterion8(SEED, &Catalog::builtin()));
}

#[test]
fn criterion_09_degenerate_principal_series() {
    judge(selftest::criterion9(SEED, &Catalog::builtin()));
}

#[test]
fn criterion_10_rank4_orbits() {
    judge(selftest::criterion10(SEED));
}
