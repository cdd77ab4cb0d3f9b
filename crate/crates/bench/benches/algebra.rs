use criterion::{criterion_group, criterion_main, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tcalg::arthur::count_csa_bruteforce;
use tcalg::cubes::reduce;
use tcalg::hecke::{verify_relations, Catalog};
use tcalg::hecke::qz::rat;
use tcalg::jordan::{JElem, Springer};
use tcalg::selftest::{random_rank2, rank2_shapes};
use tcalg::BaseField;

fn composition(c: &mut Criterion) {
    let b = BaseField::finite(49).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (e, k) = rank2_shapes(b).pop().unwrap();
    let alg = random_rank2(&e, &k, &mut rng);
    c.bench_function("tca check_axioms F49", |bch| {
        bch.iter(|| {
            let x = alg.random(&mut rng);
            let y = e.random(&mut rng);
            alg.check_axioms(&y, &x).unwrap()
        })
    });
    let j = Springer::new(alg.clone());
    c.bench_function("springer sharp F49", |bch| {
        bch.iter(|| {
            let z = JElem { a: e.random(&mut rng), x: alg.random(&mut rng) };
            j.sharp(&z)
        })
    });
    c.bench_function("cube reduce F49", |bch| bch.iter(|| reduce(&alg, 3, 7).unwrap()));
}

fn hecke(c: &mut Criterion) {
    let cat = Catalog::builtin();
    let case = cat.case("G2-unram").unwrap();
    let mods = case.modules_at(&rat(3, 1)).unwrap();
    c.bench_function("hecke verify G2", |bch| {
        bch.iter(|| mods.iter().map(|m| verify_relations(m).passed()).all(|p| p))
    });
}

fn counting(c: &mut Criterion) {
    c.bench_function("count csa brute n=10", |bch| bch.iter(|| count_csa_bruteforce(10)));
}

criterion_group!(benches, composition, hecke, counting);
criterion_main!(benches);
