use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tcalg::cubes::{act, reduce, round_trip_check, Cube, GroupElem};
use tcalg::fields::CubicKind;
use tcalg::jordan::Springer;
use tcalg::selftest::{random_rank2, rank2_shapes};
use tcalg::tca::{make_rank1, make_rank4, Rank4Model, Tca};
use tcalg::{BaseField, Elem, EtaleAlgebra};

const QS: [u32; 4] = [5, 7, 11, 25];
const KINDS: [CubicKind; 3] = [CubicKind::Split, CubicKind::FTimesK, CubicKind::Field];

fn cubic(q: u32, kind: usize) -> EtaleAlgebra {
    EtaleAlgebra::finite_cubic(BaseField::finite(q).unwrap(), KINDS[kind]).unwrap()
}

fn rank2(q: u32, shape: usize, rng: &mut ChaCha8Rng) -> Tca {
    let (e, k) = rank2_shapes(BaseField::finite(q).unwrap()).swap_remove(shape);
    random_rank2(&e, &k, rng)
}

fn any_tca(q: u32, which: usize, rng: &mut ChaCha8Rng) -> Tca {
    match which {
        0..=5 => rank2(q, which, rng),
        6..=8 => make_rank1(&cubic(q, which - 6).random_unit(rng)).unwrap(),
        9 => make_rank4(&cubic(q, 0), &Rank4Model::Split).unwrap(),
        _ => make_rank4(&cubic(q, 0), &Rank4Model::Twisted).unwrap(),
    }
}

fn rationals_cubic(kind: usize) -> EtaleAlgebra {
    let b = BaseField::Rationals;
    match kind {
        0 => EtaleAlgebra::split(b, 3),
        1 => EtaleAlgebra::f_times_k(b, b.int(-1)).unwrap(),
        _ => EtaleAlgebra::cubic_field(b, vec![b.int(-2), b.zero(), b.zero(), b.one()]).unwrap(),
    }
}

fn random_generator(e: &EtaleAlgebra, pick: u8, rng: &mut ChaCha8Rng) -> GroupElem {
    match pick % 4 {
        0 => GroupElem::lower(&e.random(rng)),
        1 => GroupElem::upper(&e.random(rng)),
        2 => {
            let t1 = e.random_unit(rng);
            let s = e.scalar(&e.base().random_unit(rng));
            GroupElem::diag(&t1, &(&s * &t1.inv().unwrap()))
        }
        _ => GroupElem::w(e),
    }
}

fn check_sharp_identities(x: &Elem, y: &Elem) {
    let e = x.parent();
    let b = e.base();
    let xs = x.sharp().unwrap();
    assert_eq!(x * &xs, e.scalar(&x.norm()));
    assert_eq!((x * y).norm(), &x.norm() * &y.norm());
    assert_eq!((x + y).trace(), &x.trace() + &y.trace());
    let c = b.int(3);
    assert_eq!(x.scale(&c).sharp().unwrap(), xs.scale(&(&c * &c)));
    assert_eq!(x.cross(x).unwrap(), xs.scale(&b.int(2)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn etale_sharp_norm_trace(seed in any::<u64>(), qi in 0..QS.len(), kind in 0..3usize) {
        let e = cubic(QS[qi], kind);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        check_sharp_identities(&e.random(&mut rng), &e.random(&mut rng));
    }

    #[test]
    fn etale_over_rationals(seed in any::<u64>(), kind in 0..3usize) {
        let e = rationals_cubic(kind);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        check_sharp_identities(&e.random(&mut rng), &e.random(&mut rng));
    }

    #[test]
    fn composition_invariants(seed in any::<u64>(), qi in 0..3usize, which in 0..11usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = any_tca(QS[qi], which, &mut rng);
        let x = c.random(&mut rng);
        let a = c.e().random(&mut rng);
        let bx = c.beta(&x);
        prop_assert_eq!(c.beta(&c.scale(&a, &x)), c.scale(&a.sharp().unwrap(), &bx));
        prop_assert_eq!(c.q(&bx), c.q(&x).sharp().unwrap());
        prop_assert!(c.nc(&x).is_ok());
        if let Some((e, nu)) = c.params() {
            prop_assert_eq!(e.norm(), nu.norm());
        }
    }

    #[test]
    fn rank_one_over_rationals(seed in any::<u64>(), kind in 0..3usize) {
        let e = rationals_cubic(kind);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = make_rank1(&e.random_unit(&mut rng)).unwrap();
        let x = c.random(&mut rng);
        prop_assert_eq!(c.q(&c.beta(&x)), c.q(&x).sharp().unwrap());
        prop_assert!(c.check_axioms(&e.random(&mut rng), &x).is_ok());
    }

    #[test]
    fn springer_identities(seed in any::<u64>(), qi in 0..3usize, shape in 0..6usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let j = Springer::new(rank2(QS[qi], shape, &mut rng));
        let b = j.tca().base();
        let z = j.random(&mut rng);
        let n = j.norm(&z).unwrap();
        prop_assert_eq!(j.sharp(&j.sharp(&z)), j.scale(&n, &z));
        prop_assert_eq!(j.product(&j.one(), &z), z.clone());
        prop_assert_eq!(j.product(&z, &j.sharp(&z)), j.scalar(&n));
        let c = b.random(&mut rng);
        prop_assert_eq!(j.norm(&j.scalar(&c)).unwrap(), &(&c * &c) * &c);
        let r = j.rank(&z).unwrap();
        let expected = if z == j.zero() { 0 } else if j.sharp(&z) == j.zero() { 1 } else if n == b.zero() { 2 } else { 3 };
        prop_assert_eq!(r, expected);
    }

    #[test]
    fn cube_action_composes(seed in any::<u64>(), kind in 0..3usize, g1 in any::<u8>(), g2 in any::<u8>()) {
        let e = cubic(7, kind);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = e.base();
        let c = Cube::new(b.random(&mut rng), e.random(&mut rng), e.random(&mut rng), b.random(&mut rng)).unwrap();
        let g = random_generator(&e, g1, &mut rng);
        let h = random_generator(&e, g2, &mut rng);
        let lhs = act(&g, &act(&h, &c).unwrap()).unwrap();
        prop_assert_eq!(lhs, act(&g.mul(&h), &c).unwrap());
    }

    #[test]
    fn reduction_round_trips(seed in any::<u64>(), qi in 0..3usize, shape in 0..6usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = rank2(QS[qi], shape, &mut rng);
        let red = reduce(&c, 3, seed).unwrap();
        prop_assert!(red.cube.is_reduced());
        prop_assert!(round_trip_check(&c, &red).unwrap());
    }
}
