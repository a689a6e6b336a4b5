//! Random coherent functors: coproducts of products of random `C(1)`
//! functors, which carry their face matchings by construction.

use std::collections::BTreeMap;
use std::sync::Arc;

use khcube::burnside::{Correspondence, FiniteSet, Span};
use khcube::cube::{Edge, FaceInclusion, Vertex};
use khcube::functor::{coproduct, product, CubeFunctor};
use rand::seq::SliceRandom;
use rand::Rng;

fn set(prefix: &str, k: usize) -> Arc<FiniteSet> {
    Arc::new(FiniteSet::new((0..k).map(|i| format!("{prefix}{i}"))).unwrap())
}

/// One arrow `F(1) → F(0)` with up to `max_set` elements on each side and
/// multiplicities up to 2.
pub fn random_c1(rng: &mut impl Rng, max_set: usize) -> CubeFunctor {
    let top = set("x", rng.gen_range(0..=max_set));
    let bot = set("y", rng.gen_range(0..=max_set));
    let mut spans = Vec::new();
    for s in 0..top.len() {
        for t in 0..bot.len() {
            for _ in 0..rng.gen_range(0..=2) {
                spans.push(Span { id: format!("e{}", spans.len()), s, t });
            }
        }
    }
    let c = Correspondence::from_spans(top.clone(), bot.clone(), spans).unwrap();
    let edges = BTreeMap::from([(Edge::all(1)[0], c)]);
    CubeFunctor::new(1, vec![bot, top], edges).unwrap()
}

/// A coherent functor on `C(n)` with every face matching present.
pub fn random_functor<R: Rng>(rng: &mut R, n: usize, max_set: usize) -> CubeFunctor {
    let summand = |rng: &mut R| {
        if n == 0 {
            return CubeFunctor::new(0, vec![set("p", rng.gen_range(1..=max_set))], BTreeMap::new()).unwrap();
        }
        let mut f = random_c1(rng, max_set);
        for _ in 1..n {
            f = product(&f, &random_c1(rng, max_set)).unwrap();
        }
        f
    };
    let mut f = summand(rng);
    if rng.gen_bool(0.5) {
        f = coproduct(&f, &summand(rng)).unwrap();
    }
    f
}

/// A face inclusion `C(n) → C(big_n)` with random coordinates, in random
/// order, and a random bottom vertex.
pub fn random_inclusion(rng: &mut impl Rng, n: usize, big_n: usize) -> FaceInclusion {
    let mut all: Vec<usize> = (1..=big_n).collect();
    all.shuffle(rng);
    let coords = all[..n].to_vec();
    let mut bottom = Vertex::zero(big_n);
    for &c in &all[n..] {
        bottom = bottom.with_bit(c, rng.gen_range(0..=1));
    }
    FaceInclusion::new(bottom, coords).unwrap()
}
