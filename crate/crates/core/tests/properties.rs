mod common;

use charp::ff::{Field, FieldElem};
use charp::moduli::{milnor, Milnor};
use charp::profile::profile_of_series;
use charp::pseries::{parse_series, CoordChange, Series, SeriesJson};
use charp::reduce::{normal_form, ReduceOptions};
use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FIELDS: [(u32, usize); 5] = [(2, 1), (3, 1), (5, 1), (2, 2), (3, 2)];

fn setup(seed: u64, which: usize) -> (ChaCha8Rng, Field) {
    let (p, deg) = FIELDS[which % FIELDS.len()];
    (ChaCha8Rng::seed_from_u64(seed), field(p, deg))
}

fn random_series(rng: &mut ChaCha8Rng, ctx: &Field, trunc: usize) -> Series {
    let mut terms = Vec::new();
    for n in 1..=trunc {
        if rng.gen_bool(0.4) {
            terms.push((n, random_nonzero(rng, ctx)));
        }
    }
    Series::from_terms(ctx, terms, trunc).unwrap()
}

fn opts() -> ReduceOptions {
    ReduceOptions::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn compose_is_associative(seed: u64, which in 0usize..5, trunc in 2usize..14) {
        let (mut rng, ctx) = setup(seed, which);
        let f = random_series(&mut rng, &ctx, trunc);
        let a = random_change(&mut rng, &ctx, trunc);
        let b = random_change(&mut rng, &ctx, trunc);
        let lhs = f.compose(&a.compose(&b).unwrap()).unwrap();
        let rhs = f.compose(&a).unwrap().compose(&b).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn compose_matches_schoolbook(seed: u64, which in 0usize..5, trunc in 2usize..14) {
        let (mut rng, ctx) = setup(seed, which);
        let f = random_series(&mut rng, &ctx, trunc);
        let a = random_change(&mut rng, &ctx, trunc);
        let g = f.compose(&a).unwrap();
        prop_assert!(dense_eq_series(&brute_compose(&f, a.as_series(), trunc), &g));
    }

    #[test]
    fn inverse_is_two_sided(seed: u64, which in 0usize..5, trunc in 1usize..14) {
        let (mut rng, ctx) = setup(seed, which);
        let a = random_change(&mut rng, &ctx, trunc);
        let inv = a.inverse().unwrap();
        prop_assert!(a.compose(&inv).unwrap().is_identity());
        prop_assert!(inv.compose(&a).unwrap().is_identity());
    }

    #[test]
    fn order_is_preserved(seed: u64, which in 0usize..5, trunc in 1usize..14) {
        let (mut rng, ctx) = setup(seed, which);
        let f = random_series(&mut rng, &ctx, trunc);
        let a = random_change(&mut rng, &ctx, trunc);
        prop_assert_eq!(f.compose(&a).unwrap().ord(), f.ord());
    }

    #[test]
    fn frobenius_is_a_field_automorphism(seed: u64, which in 0usize..5) {
        let (mut rng, ctx) = setup(seed, which);
        let (a, b) = (random_elem(&mut rng, &ctx), random_elem(&mut rng, &ctx));
        prop_assert_eq!((&a + &b).frobenius(1), &a.frobenius(1) + &b.frobenius(1));
        prop_assert_eq!((&a * &b).frobenius(1), &a.frobenius(1) * &b.frobenius(1));
        prop_assert_eq!(a.frobenius(1), a.pow(ctx.p() as u128));
        prop_assert_eq!(a.frobenius(1).inverse_frobenius(1), a.clone());
        prop_assert_eq!(a.frobenius(ctx.deg() as u32), a);
    }

    #[test]
    fn pth_power_of_a_series(seed: u64, which in 0usize..5, trunc in 1usize..10) {
        let (mut rng, ctx) = setup(seed, which);
        let f = random_series(&mut rng, &ctx, trunc);
        let p = ctx.p() as usize;
        let fp = f.pow(p as u64).unwrap();
        let expected: Vec<(usize, FieldElem)> =
            f.terms().map(|(n, c)| (n * p, c.frobenius(1))).collect();
        let expected = Series::from_terms(&ctx, expected, p * trunc).unwrap();
        let upto = fp.trunc().min(trunc);
        prop_assert_eq!(fp.jet(upto), expected.jet(upto));
    }

    #[test]
    fn bar_and_decompress_round_trip(seed: u64, which in 0usize..5, e in 0u32..3, trunc in 1usize..8) {
        let (mut rng, ctx) = setup(seed, which);
        let bar = random_e0_series(&mut rng, &ctx, trunc.max(2));
        let f = bar.decompress(e);
        let (back, e2) = f.to_bar().unwrap();
        prop_assert_eq!(e2, e);
        prop_assert_eq!(f.e().unwrap(), e);
        prop_assert_eq!(back, bar);
    }

    #[test]
    fn text_round_trip(seed: u64, which in 0usize..5, trunc in 1usize..20) {
        let (mut rng, ctx) = setup(seed, which);
        let mut f = random_series(&mut rng, &ctx, trunc);
        if rng.gen_bool(0.3) {
            f = f.add(&Series::monomial(&ctx, 0, random_nonzero(&mut rng, &ctx), trunc).unwrap()).unwrap();
        }
        let text = f.to_string();
        prop_assert_eq!(parse_series(&text, &ctx, Some(trunc)).unwrap(), f.clone());
        let json = serde_json::to_string(&SeriesJson::from_series(&f)).unwrap();
        let back: SeriesJson = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back.to_series(&ctx).unwrap(), f);
    }

    #[test]
    fn profile_is_invariant(seed: u64, which in 0usize..5) {
        let (mut rng, ctx) = setup(seed, which);
        let f = random_e0_series(&mut rng, &ctx, 14);
        let a = random_change(&mut rng, &ctx, f.trunc());
        let pf = profile_of_series(&f).unwrap();
        let pg = profile_of_series(&f.compose(&a).unwrap()).unwrap();
        prop_assert_eq!(pf.basic(), pg.basic());
        prop_assert_eq!(pf.lambda, pg.lambda);
    }

    #[test]
    fn lambda_ignores_terms_above_q(seed: u64, which in 0usize..5) {
        let (mut rng, ctx) = setup(seed, which);
        let f = random_e0_series(&mut rng, &ctx, 14);
        let prof = profile_of_series(&f).unwrap();
        let trunc = f.trunc() + 6;
        let mut tail = Vec::new();
        for n in prof.q as usize + 1..=trunc {
            if rng.gen_bool(0.5) {
                tail.push((n, random_nonzero(&mut rng, &ctx)));
            }
        }
        let g = f.with_trunc(trunc).add(&Series::from_terms(&ctx, tail, trunc).unwrap()).unwrap();
        let pg = profile_of_series(&g).unwrap();
        prop_assert_eq!(pg.lambda, prof.lambda);
        prop_assert_eq!(pg.case, prof.case);
    }

    #[test]
    fn normal_form_witness(seed: u64, which in 0usize..5) {
        let (mut rng, ctx) = setup(seed, which);
        let f = random_e0_series(&mut rng, &ctx, 14);
        let nf = normal_form(&f, &opts()).unwrap();
        let d = nf.guarantee_order as usize;
        prop_assert!(dense_eq_series(&brute_compose(&f, nf.phi.as_series(), d), &nf.series));
        for n in nf.series.support() {
            prop_assert!(n as u64 == nf.m || nf.profile.lambda.contains(&(n as u64)));
        }
    }

    #[test]
    fn normal_form_is_idempotent(seed: u64, which in 0usize..5) {
        let (mut rng, ctx) = setup(seed, which);
        let f = random_e0_series(&mut rng, &ctx, 14);
        let nf = normal_form(&f, &opts()).unwrap();
        let again = normal_form(&nf.series.with_trunc(f.trunc()), &opts()).unwrap();
        prop_assert_eq!(&again.series, &nf.series);
        prop_assert!(again.phi.is_identity());
    }

    #[test]
    fn normal_form_ignores_terms_above_d(seed: u64, which in 0usize..5) {
        let (mut rng, ctx) = setup(seed, which);
        let f = random_e0_series(&mut rng, &ctx, 14);
        let nf = normal_form(&f, &opts()).unwrap();
        let d = nf.guarantee_order as usize;
        let mut tail = Vec::new();
        for n in d + 1..=f.trunc() {
            if rng.gen_bool(0.5) {
                tail.push((n, random_nonzero(&mut rng, &ctx)));
            }
        }
        let g = f.jet(d).with_trunc(f.trunc())
            .add(&Series::from_terms(&ctx, tail, f.trunc()).unwrap()).unwrap();
        prop_assert_eq!(normal_form(&g, &opts()).unwrap().series, nf.series);
    }

    #[test]
    fn milnor_agrees_with_the_derivative(seed: u64, which in 0usize..5, trunc in 1usize..20) {
        let (mut rng, ctx) = setup(seed, which);
        let f = random_series(&mut rng, &ctx, trunc);
        prop_assume!(!f.is_zero());
        let expected = brute_ord_derivative(&f);
        match milnor(&f).unwrap() {
            Milnor::Finite(mu) => prop_assert_eq!(Some(mu), expected),
            Milnor::Infinite { e } => {
                prop_assert_eq!(expected, None);
                prop_assert_eq!(e, f.e().unwrap());
            }
        }
    }

    #[test]
    fn coord_change_truncation_commutes(seed: u64, which in 0usize..5, trunc in 3usize..14) {
        let (mut rng, ctx) = setup(seed, which);
        let f = random_series(&mut rng, &ctx, trunc);
        let a: CoordChange = random_change(&mut rng, &ctx, trunc);
        let low = trunc / 2;
        prop_assert_eq!(
            f.compose(&a).unwrap().jet(low),
            f.jet(low).compose(&a.with_trunc(low)).unwrap()
        );
    }
}
