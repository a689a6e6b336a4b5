mod common;

use std::collections::BTreeMap;

use common::load_functor;
use khcube::cube::FaceInclusion;
use khcube::functor::{coproduct, inclusion_nat_trans, product, quotient_functor, StableFunctor, Subset};
use khcube::matrix::IntegerMatrix;
use khcube::totalization::{
    cone, dualize, face_shift_iso, homology, invariant_factors, is_quasi_iso, nonzero_homology, rank,
    smith_normal_form, tot, tot_functor, tot_nat_trans, BasisLabel, ChainComplex, ChainMap, HomologyGroup,
};
use num_bigint::BigInt;

fn labels(prefix: &str, k: usize) -> Vec<BasisLabel> {
    (0..k).map(|i| BasisLabel { vertex: prefix.into(), element: format!("{prefix}{i}") }).collect()
}

/// `Z --k--> Z` in degrees 1 → 0.
fn multiplication(k: i64) -> ChainComplex {
    let groups = BTreeMap::from([(0, labels("a", 1)), (1, labels("b", 1))]);
    ChainComplex::new(groups, BTreeMap::from([(1, IntegerMatrix::from_rows(&[vec![k]]))])).unwrap()
}

fn summary(h: &BTreeMap<i64, HomologyGroup>) -> Vec<(i64, usize, Vec<u64>)> {
    h.values().filter(|g| !g.is_zero()).map(|g| (g.degree, g.rank, g.torsion.clone())).collect()
}

fn to_i128(a: &[Vec<BigInt>]) -> Vec<Vec<i128>> {
    a.iter().map(|r| r.iter().map(|x| i128::try_from(x).unwrap()).collect()).collect()
}

fn mul(a: &[Vec<i128>], b: &[Vec<i128>]) -> Vec<Vec<i128>> {
    (0..a.len()).map(|i| (0..b[0].len()).map(|j| (0..b.len()).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
}

#[test]
fn tot_of_p() {
    let c = tot_functor(&load_functor("p")).unwrap();
    assert_eq!(c.degrees(), vec![0, 1]);
    assert_eq!(c.diff(1).get(0, 0).abs(), 2);
    assert_eq!(summary(&homology(&c)), vec![(0, 0, vec![2])]);
    let shifted = tot(&StableFunctor::new(load_functor("p"), -3)).unwrap();
    assert_eq!(shifted.degrees(), vec![-3, -2]);
    assert_eq!(summary(&homology(&shifted)), vec![(-3, 0, vec![2])]);
}

#[test]
fn tot_of_products_and_coproducts() {
    let p = load_functor("p");
    let c = tot_functor(&p).unwrap();
    let pp = tot_functor(&product(&p, &p).unwrap()).unwrap();
    assert_eq!(summary(&homology(&pp)), summary(&homology(&c.tensor(&c))));
    assert_eq!(summary(&homology(&pp)), vec![(0, 0, vec![2]), (1, 0, vec![2])]);
    let sum = tot_functor(&coproduct(&p, &p).unwrap()).unwrap();
    assert_eq!(sum.total_rank(), 4);
    assert_eq!(summary(&homology(&sum)), summary(&homology(&c.direct_sum(&c))));
}

#[test]
fn smith_normal_form_small() {
    let m = IntegerMatrix::from_rows(&[vec![2, 4], vec![6, 8]]);
    assert_eq!(invariant_factors(&m), vec![BigInt::from(2), BigInt::from(4)]);
    assert_eq!(rank(&m), 2);
    let (u, d, v) = smith_normal_form(&m);
    let (u, d, v) = (to_i128(&u), to_i128(&d), to_i128(&v));
    assert_eq!(mul(&mul(&u, &[vec![2, 4], vec![6, 8]]), &v), d);
    assert_eq!(d, vec![vec![2, 0], vec![0, 4]]);
}

#[test]
fn smith_normal_form_rectangular_and_singular() {
    let m = IntegerMatrix::from_rows(&[vec![1, 2, 3], vec![2, 4, 6]]);
    assert_eq!(invariant_factors(&m), vec![BigInt::from(1)]);
    assert_eq!(rank(&IntegerMatrix::zeros(3, 2)), 0);
    let m = IntegerMatrix::from_rows(&[vec![4, 0], vec![0, 6]]);
    assert_eq!(invariant_factors(&m), vec![BigInt::from(2), BigInt::from(12)]);
}

#[test]
fn invariant_factors_beyond_i64() {
    let (p, q) = (4_294_967_291i64, 4_294_967_279i64);
    let m = IntegerMatrix::from_rows(&[vec![p, 0], vec![0, q]]);
    let want = BigInt::from(p) * BigInt::from(q);
    assert_eq!(invariant_factors(&m), vec![BigInt::from(1), want]);
}

#[test]
fn complexes_check_their_differentials() {
    let groups = BTreeMap::from([(0, labels("a", 1)), (1, labels("b", 1)), (2, labels("c", 1))]);
    let diffs = BTreeMap::from([(1, IntegerMatrix::from_rows(&[vec![1]])), (2, IntegerMatrix::from_rows(&[vec![1]]))]);
    assert!(ChainComplex::new(groups.clone(), diffs).is_err());
    let wrong_shape = BTreeMap::from([(1, IntegerMatrix::zeros(2, 1))]);
    assert!(ChainComplex::new(groups, wrong_shape).is_err());
}

#[test]
fn chain_maps_check_commutation() {
    let (c2, c4) = (multiplication(2), multiplication(4));
    // Degree 0 times 2, degree 1 times 1 commutes with 2 → 4.
    let ok = BTreeMap::from([(0, IntegerMatrix::from_rows(&[vec![2]])), (1, IntegerMatrix::from_rows(&[vec![1]]))]);
    let f = ChainMap::new(c2.clone(), c4.clone(), ok).unwrap();
    assert!(!is_quasi_iso(&f).unwrap());
    let bad = BTreeMap::from([(0, IntegerMatrix::from_rows(&[vec![1]])), (1, IntegerMatrix::from_rows(&[vec![1]]))]);
    assert!(ChainMap::new(c2.clone(), c4, bad).is_err());
    assert!(is_quasi_iso(&ChainMap::identity(&c2)).unwrap());
    assert!(!is_quasi_iso(&ChainMap::zero(&c2, &c2)).unwrap());
    let acyclic = multiplication(1);
    assert!(is_quasi_iso(&ChainMap::zero(&acyclic, &acyclic)).unwrap());
    let twice = ChainMap::identity(&c2).then(&ChainMap::identity(&c2)).unwrap();
    assert_eq!(twice, ChainMap::identity(&c2));
}

#[test]
fn cone_of_the_identity_is_acyclic() {
    let c = tot_functor(&load_functor("rp2_smash_f1")).unwrap();
    let k = cone(&ChainMap::identity(&c));
    assert_eq!(k.total_rank(), 2 * c.total_rank());
    assert!(nonzero_homology(&k).is_empty());
}

#[test]
fn dualize_twice_is_the_identity() {
    let c = tot_functor(&load_functor("rp2_smash_f1")).unwrap();
    assert_eq!(dualize(&dualize(&c)), c);
    let d = dualize(&tot_functor(&load_functor("p")).unwrap());
    assert_eq!(summary(&homology(&d)), vec![(-1, 0, vec![2])]);
}

#[test]
fn suspension_moves_homology() {
    let c = multiplication(3);
    let h = summary(&homology(&c.suspend(5)));
    assert_eq!(h, vec![(5, 0, vec![3])]);
    assert_eq!(c.suspend(1).diff(2).get(0, 0), -3);
    assert_eq!(c.shift(1).diff(2).get(0, 0), 3);
}

#[test]
fn natural_transformations_totalize() {
    let p = load_functor("p");
    let id = inclusion_nat_trans(&p, &p).unwrap();
    let m = tot_nat_trans(&id).unwrap();
    assert!(is_quasi_iso(&m).unwrap());
    for d in m.source.degrees() {
        assert_eq!(m.map(d), IntegerMatrix::identity(m.source.rank(d)));
    }
    let top = Subset::from_fn(&p, |v, _| v.mask() == 1);
    let (_, eta) = quotient_functor(&p, &top).unwrap();
    assert!(!is_quasi_iso(&tot_nat_trans(&eta).unwrap()).unwrap());
}

#[test]
fn identity_face_shift_has_no_twist() {
    let f = load_functor("rp2_smash_f1");
    let (twist, map) = face_shift_iso(&f, &FaceInclusion::identity(f.dim())).unwrap();
    assert!(twist.t.iter().all(|&t| t == 0));
    assert_eq!(map, ChainMap::identity(&tot_functor(&f).unwrap()));
    let wrong = FaceInclusion::identity(f.dim() + 1);
    assert!(face_shift_iso(&f, &wrong).is_err());
}
