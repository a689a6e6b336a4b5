mod common;

use common::load_delta;
use khcube::functor::validate_coherence;
use khcube::simplicial::{delta_functor, simplicial_chain_complex, simplicial_homology, DeltaComplex, Simplex};
use khcube::totalization::{homology, tot};

fn s(id: &str, verts: &[usize]) -> Simplex {
    Simplex { id: id.into(), verts: verts.to_vec() }
}

fn ranks(x: &DeltaComplex) -> Vec<(i64, usize, Vec<u64>)> {
    simplicial_homology(x).unwrap().into_values().filter(|g| !g.is_zero()).map(|g| (g.degree, g.rank, g.torsion)).collect()
}

#[test]
fn point_and_interval() {
    assert_eq!(ranks(&load_delta("point")), vec![(0, 1, vec![])]);
    let interval = DeltaComplex::from_facets(2, &[vec![1, 2]]).unwrap();
    assert_eq!(interval.simplices.len(), 3);
    assert_eq!(interval.dimension(), Some(1));
    assert_eq!(ranks(&interval), vec![(0, 1, vec![])]);
}

#[test]
fn circle_from_a_triangle_boundary() {
    let x = DeltaComplex::from_facets(3, &[vec![1, 2], vec![2, 3], vec![1, 3]]).unwrap();
    assert_eq!(ranks(&x), vec![(0, 1, vec![]), (1, 1, vec![])]);
}

#[test]
fn validation() {
    assert!(DeltaComplex::new(2, vec![s("e", &[1, 2])]).is_err());
    assert!(DeltaComplex::new(2, vec![s("a", &[1]), s("a", &[2])]).is_err());
    assert!(DeltaComplex::new(2, vec![s("a", &[0])]).is_err());
    assert!(DeltaComplex::new(2, vec![s("a", &[3])]).is_err());
    assert!(DeltaComplex::new(2, vec![s("a", &[1, 1])]).is_err());
    assert!(DeltaComplex::new(40, vec![]).is_err());
}

#[test]
fn vertex_order_in_a_simplex_does_not_matter() {
    let a = DeltaComplex::new(2, vec![s("1", &[1]), s("2", &[2]), s("e", &[2, 1])]).unwrap();
    let b = DeltaComplex::new(2, vec![s("1", &[1]), s("2", &[2]), s("e", &[1, 2])]).unwrap();
    assert_eq!(ranks(&a), ranks(&b));
    assert_eq!(tot(&delta_functor(&a).unwrap()).unwrap(), tot(&delta_functor(&b).unwrap()).unwrap());
}

#[test]
fn cube_route_agrees_with_simplicial_homology() {
    for name in ["point", "boundary_tetrahedron", "rp2_6", "torus_7"] {
        let x = load_delta(name);
        let f = delta_functor(&x).unwrap();
        assert_eq!(f.shift, -1);
        assert!(validate_coherence(&f.functor).passes(), "{name}");
        let via_cube: Vec<_> = homology(&tot(&f).unwrap()).into_values().filter(|g| !g.is_zero()).map(|g| (g.degree, g.rank, g.torsion)).collect();
        assert_eq!(via_cube, ranks(&x), "{name}");
    }
}

#[test]
fn chain_complex_shape() {
    let x = load_delta("torus_7");
    let c = simplicial_chain_complex(&x).unwrap();
    assert_eq!((c.rank(0), c.rank(1), c.rank(2)), (7, 21, 14));
    assert_eq!(x.dimension(), Some(2));
}

#[test]
fn json_round_trip() {
    let x = load_delta("rp2_6");
    let text = serde_json::to_string(&x).unwrap();
    let back: DeltaComplex = serde_json::from_str(&text).unwrap();
    assert_eq!(back, x);
}
