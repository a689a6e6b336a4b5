//! Invariants checked on random inputs. Random functors come from a seeded
//! ChaCha generator so failures shrink over the seed.

mod common;

use common::random::{random_c1, random_functor, random_inclusion};
use khcube::burnside::compose;
use khcube::cube::{chain_swap_path, maximal_chains, sign_assignment, Edge, Face2, Vertex};
use khcube::functor::{
    coproduct, extend_along_face_inclusion, find_natural_isomorphism, product, reconstruct_along,
    reconstruct_two_morphism, restrict_along_face_inclusion, validate_c0, validate_coherence, FunctorJson,
};
use khcube::matrix::IntegerMatrix;
use khcube::totalization::{face_shift_iso, homology, invariant_factors, is_quasi_iso, rank, smith_normal_form, tot_functor, HomologyGroup};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn summary(h: &BTreeMap<i64, HomologyGroup>) -> Vec<(i64, usize, Vec<u64>)> {
    h.values().filter(|g| !g.is_zero()).map(|g| (g.degree, g.rank, g.torsion.clone())).collect()
}

fn matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..5, 1usize..5).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-6i64..=6, c), r))
}

fn big_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    (0..a.len())
        .map(|i| (0..b[0].len()).map(|j| (0..b.len()).map(|k| &a[i][k] * &b[k][j]).sum()).collect())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn squares_anticommute(n in 2usize..7, m in any::<u32>()) {
        let top = Vertex::new(n, m & ((1 << n) - 1));
        for face in Face2::all(n).into_iter().filter(|f| f.top == top) {
            let s = |u: &Vertex, v: &Vertex| sign_assignment(u, v).unwrap();
            let total = s(&face.top, &face.mid_a) + s(&face.mid_a, &face.bottom) + s(&face.top, &face.mid_b) + s(&face.mid_b, &face.bottom);
            prop_assert_eq!(total % 2, 1);
        }
    }

    #[test]
    fn vertex_split_concat(n in 1usize..10, k in 0usize..10, m in any::<u32>()) {
        let k = k % (n + 1);
        let v = Vertex::new(n, m & ((1 << n) - 1));
        let (a, b) = v.split(k);
        prop_assert_eq!(a.concat(&b), v);
        prop_assert_eq!(a.grading() + b.grading(), v.grading());
        prop_assert_eq!(v.to_string().parse::<Vertex>().unwrap(), v);
    }

    #[test]
    fn face_keys_round_trip(n in 2usize..6, pick in any::<prop::sample::Index>()) {
        let faces = Face2::all(n);
        let f = faces[pick.index(faces.len())];
        prop_assert_eq!(Face2::parse_key(&f.key()).unwrap(), (f, true));
        let flipped = format!("{}>{} via {}|{}", f.top, f.bottom, f.mid_b, f.mid_a);
        prop_assert_eq!(Face2::parse_key(&flipped).unwrap(), (f, false));
    }

    #[test]
    fn face_inclusions(seed in any::<u64>(), n in 0usize..4, extra in 0usize..3) {
        let iota = random_inclusion(&mut rng(seed), n, n + extra);
        for v in Vertex::all(n) {
            let w = iota.apply(&v).unwrap();
            prop_assert_eq!(iota.preimage(&w), Some(v));
            prop_assert_eq!(w.grading(), v.grading() + iota.weight());
        }
        let image = Vertex::all(n + extra).filter(|w| iota.preimage(w).is_some()).count();
        prop_assert_eq!(image, 1 << n);
    }

    #[test]
    fn swap_paths_reach_their_target(n in 2usize..6, a in any::<prop::sample::Index>(), b in any::<prop::sample::Index>()) {
        let chains = maximal_chains(&Vertex::ones(n), &Vertex::zero(n)).unwrap();
        let (c1, c2) = (&chains[a.index(chains.len())], &chains[b.index(chains.len())]);
        let path = chain_swap_path(c1, c2).unwrap();
        let end = path.last().map_or(c1.clone(), |(_, c)| c.clone());
        prop_assert_eq!(&end, c2);
        let mut cur = c1.clone();
        for (i, next) in &path {
            cur = cur.swap(*i).unwrap();
            prop_assert_eq!(&cur, next);
        }
    }

    #[test]
    fn linearization_is_multiplicative(seed in any::<u64>()) {
        let f = random_functor(&mut rng(seed), 2, 3);
        let e = |u: &str, l: &str| f.edge(&Edge::new(u.parse().unwrap(), l.parse().unwrap()).unwrap()).clone();
        let (x, y) = (e("11", "10"), e("10", "00"));
        prop_assert_eq!(compose(&y, &x).unwrap().linearize(), y.linearize().mul(&x.linearize()));
        prop_assert_eq!(x.transpose().transpose(), x.clone());
        prop_assert_eq!(x.transpose().linearize(), x.linearize().transpose());
    }

    #[test]
    fn random_functors_are_coherent(seed in any::<u64>(), n in 0usize..4) {
        let f = random_functor(&mut rng(seed), n, 2);
        prop_assert!(validate_c0(&f).passes());
        prop_assert!(validate_coherence(&f).passes());
        let c = tot_functor(&f).unwrap();
        for d in c.degrees() {
            prop_assert!(c.diff(d - 1).mul(&c.diff(d)).is_zero());
        }
    }

    #[test]
    fn kunneth(seed in any::<u64>(), n in 0usize..3, m in 0usize..3) {
        let mut r = rng(seed);
        let (f, g) = (random_functor(&mut r, n, 2), random_functor(&mut r, m, 2));
        let lhs = tot_functor(&product(&f, &g).unwrap()).unwrap();
        let rhs = tot_functor(&f).unwrap().tensor(&tot_functor(&g).unwrap());
        prop_assert_eq!(summary(&homology(&lhs)), summary(&homology(&rhs)));
        let sum = tot_functor(&coproduct(&f, &f).unwrap()).unwrap();
        let tf = tot_functor(&f).unwrap();
        prop_assert_eq!(summary(&homology(&sum)), summary(&homology(&tf.direct_sum(&tf))));
    }

    #[test]
    fn extension_round_trips(seed in any::<u64>(), n in 0usize..4, extra in 0usize..3) {
        let mut r = rng(seed);
        let f = random_functor(&mut r, n, 2);
        let iota = random_inclusion(&mut r, n, n + extra);
        let big = extend_along_face_inclusion(&f, &iota).unwrap();
        prop_assert!(validate_coherence(&big).passes());
        prop_assert_eq!(restrict_along_face_inclusion(&big, &iota).unwrap(), f.clone());
        let (_, map) = face_shift_iso(&f, &iota).unwrap();
        prop_assert!(is_quasi_iso(&map).unwrap());
    }

    #[test]
    fn json_round_trip(seed in any::<u64>(), n in 0usize..4, shift in -3i64..3) {
        let f = random_functor(&mut rng(seed), n, 2);
        let text = serde_json::to_string(&FunctorJson::from_functor(&f, shift)).unwrap();
        let back: FunctorJson = serde_json::from_str(&text).unwrap();
        let s = back.to_stable().unwrap();
        prop_assert_eq!(s.shift, shift);
        prop_assert_eq!(s.functor, f);
    }

    #[test]
    fn functors_are_isomorphic_to_themselves(seed in any::<u64>(), n in 0usize..3) {
        let mut r = rng(seed);
        let f = random_functor(&mut r, n, 2);
        prop_assert!(find_natural_isomorphism(&f, &f, 100_000).unwrap().is_some());
        let g = product(&random_c1(&mut r, 2), &random_c1(&mut r, 2)).unwrap();
        let h = product(&random_c1(&mut r, 2), &random_c1(&mut r, 2)).unwrap();
        if let Some(iso) = find_natural_isomorphism(&g, &h, 100_000).unwrap() {
            prop_assert_eq!(iso.vertex_maps.len(), 4);
            prop_assert_eq!(summary(&homology(&tot_functor(&g).unwrap())), summary(&homology(&tot_functor(&h).unwrap())));
        }
    }

    #[test]
    fn two_morphisms_are_path_independent(seed in any::<u64>(), n in 2usize..4) {
        let f = random_functor(&mut rng(seed), n, 2);
        let (top, bottom) = (Vertex::ones(n), Vertex::zero(n));
        let chains = maximal_chains(&top, &bottom).unwrap();
        for c1 in &chains {
            for c2 in &chains {
                let want = reconstruct_two_morphism(&f, c1, c2).unwrap();
                let path: Vec<usize> = chain_swap_path(c1, c2).unwrap().into_iter().map(|(i, _)| i).collect();
                prop_assert_eq!(&reconstruct_along(&f, c1, &path).unwrap(), &want);
                // A detour through an extra swap and back.
                let mut detour = vec![1, 1];
                detour.extend(&path);
                prop_assert_eq!(reconstruct_along(&f, c1, &detour).unwrap(), want);
            }
        }
    }

    #[test]
    fn smith_normal_form_decomposes(rows in matrix()) {
        let m = IntegerMatrix::from_rows(&rows);
        let (u, d, v) = smith_normal_form(&m);
        let big: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        prop_assert_eq!(big_mul(&big_mul(&u, &big), &v), d.clone());
        let diag: Vec<BigInt> = (0..d.len().min(d[0].len())).map(|i| d[i][i].clone()).filter(|x| !x.is_zero()).collect();
        prop_assert!(diag.iter().all(|x| x.is_positive()));
        prop_assert!(diag.windows(2).all(|w| (&w[1] % &w[0]).is_zero()));
        prop_assert_eq!(invariant_factors(&m), diag);
        prop_assert_eq!(rank(&m), rank(&m.transpose()));
    }
}
