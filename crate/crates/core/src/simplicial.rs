//! Δ-complexes and their cube functor: a simplex with vertex set `S` sits
//! over the vertex of `C(n)` whose ones are `S`, and edges record faces.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::burnside::{Correspondence, FiniteSet, SetRef, Span};
use crate::cube::{Edge, Face2};
use crate::error::{Error, Result};
use crate::functor::{CubeFunctor, StableFunctor};
use crate::matrix::IntegerMatrix;
use crate::totalization::{homology, BasisLabel, ChainComplex, HomologyGroup};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Simplex {
    pub id: String,
    /// Vertices, numbered from 1.
    pub verts: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaComplex {
    pub n_vertices: usize,
    pub simplices: Vec<Simplex>,
}

impl DeltaComplex {
    pub fn new(n_vertices: usize, simplices: Vec<Simplex>) -> Result<Self> {
        let x = DeltaComplex { n_vertices, simplices };
        x.validate()?;
        Ok(x)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let x: DeltaComplex = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        x.validate()?;
        Ok(x)
    }

    /// All faces of the given top simplices, with ids from their vertex lists.
    pub fn from_facets(n_vertices: usize, facets: &[Vec<usize>]) -> Result<Self> {
        let mut all: BTreeSet<Vec<usize>> = BTreeSet::new();
        for f in facets {
            let mut f = f.clone();
            f.sort_unstable();
            let k = f.len();
            for m in 1..1u32 << k {
                all.insert((0..k).filter(|&i| m >> i & 1 == 1).map(|i| f[i]).collect());
            }
        }
        let mut simplices: Vec<Simplex> = all
            .into_iter()
            .map(|v| Simplex { id: v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("."), verts: v })
            .collect();
        simplices.sort_by(|a, b| (a.verts.len(), &a.verts).cmp(&(b.verts.len(), &b.verts)));
        DeltaComplex::new(n_vertices, simplices)
    }

    fn validate(&self) -> Result<()> {
        if self.n_vertices > crate::cube::MAX_DIM {
            return Err(Error::Dimension(format!("{} vertices exceed the cube limit", self.n_vertices)));
        }
        let mut ids = BTreeSet::new();
        let mut supports = BTreeSet::new();
        for s in &self.simplices {
            if !ids.insert(&s.id) {
                return Err(Error::Parse(format!("duplicate simplex id {:?}", s.id)));
            }
            if s.verts.is_empty() || s.verts.iter().any(|&v| v == 0 || v > self.n_vertices) {
                return Err(Error::Parse(format!("simplex {:?} has vertices outside 1..={}", s.id, self.n_vertices)));
            }
            let set: BTreeSet<usize> = s.verts.iter().copied().collect();
            if set.len() != s.verts.len() {
                return Err(Error::Parse(format!("simplex {:?} repeats a vertex", s.id)));
            }
            supports.insert(set);
        }
        for s in &supports {
            if s.len() < 2 {
                continue;
            }
            for v in s {
                let mut face = s.clone();
                face.remove(v);
                if !supports.contains(&face) {
                    return Err(Error::Parse(format!("face {face:?} of {s:?} is not listed")));
                }
            }
        }
        Ok(())
    }

    fn mask(&self, s: &Simplex) -> u32 {
        s.verts.iter().fold(0, |m, &v| m | 1 << (v - 1))
    }

    pub fn dimension(&self) -> Option<usize> {
        self.simplices.iter().map(|s| s.verts.len() - 1).max()
    }
}

/// `Σ^{-1} F_Δ`: simplices over their vertex sets, face pairs on edges and
/// the unique matchings on 2-faces.
pub fn delta_functor(x: &DeltaComplex) -> Result<StableFunctor> {
    let n = x.n_vertices;
    let mut by_mask: Vec<Vec<String>> = vec![Vec::new(); 1 << n];
    for s in &x.simplices {
        by_mask[x.mask(s) as usize].push(s.id.clone());
    }
    let sets: Vec<SetRef> = by_mask.iter().map(|ids| FiniteSet::new(ids.iter().cloned()).map(Arc::new)).collect::<Result<_>>()?;
    let mut edges = BTreeMap::new();
    for e in Edge::all(n) {
        let (su, sv) = (&sets[e.upper.mask() as usize], &sets[e.lower.mask() as usize]);
        if su.is_empty() || sv.is_empty() {
            continue;
        }
        let mut spans = Vec::new();
        for a in 0..su.len() {
            for b in 0..sv.len() {
                spans.push(Span { id: format!("{}<{}", sv.get(b), su.get(a)), s: a, t: b });
            }
        }
        edges.insert(e, Correspondence::from_spans(su.clone(), sv.clone(), spans)?);
    }
    let mut f = CubeFunctor::new(n, sets, edges)?;
    for face in Face2::all(n) {
        let (a, b) = f.face_composites(&face);
        let mut by_end: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for i in 0..b.len() {
            if by_end.insert((b.s[i], b.t[i]), i).is_some() {
                return Err(Error::Invariant(format!("face {} has a fiber with two elements", face.key())));
            }
        }
        let map = (0..a.len())
            .map(|i| {
                by_end
                    .get(&(a.s[i], a.t[i]))
                    .copied()
                    .ok_or_else(|| Error::Invariant(format!("face {} composites differ", face.key())))
            })
            .collect::<Result<Vec<_>>>()?;
        f.set_face(face, map)?;
    }
    Ok(StableFunctor::new(f, -1))
}

/// Simplicial chain complex with the alternating boundary, built directly
/// from the simplices (vertices sorted increasingly).
pub fn simplicial_chain_complex(x: &DeltaComplex) -> Result<ChainComplex> {
    let mut groups: BTreeMap<i64, Vec<BasisLabel>> = BTreeMap::new();
    let mut index: BTreeMap<Vec<usize>, (i64, usize)> = BTreeMap::new();
    let mut sorted: Vec<(Vec<usize>, &Simplex)> = x
        .simplices
        .iter()
        .map(|s| {
            let mut v = s.verts.clone();
            v.sort_unstable();
            (v, s)
        })
        .collect();
    sorted.sort_by(|a, b| (a.0.len(), &a.0).cmp(&(b.0.len(), &b.0)));
    for (v, s) in &sorted {
        let d = v.len() as i64 - 1;
        let g = groups.entry(d).or_default();
        index.insert(v.clone(), (d, g.len()));
        g.push(BasisLabel { vertex: format!("{v:?}"), element: s.id.clone() });
    }
    let mut diffs = BTreeMap::new();
    for (&d, basis) in &groups {
        if d == 0 {
            continue;
        }
        let rows = groups.get(&(d - 1)).map_or(0, Vec::len);
        let mut m = IntegerMatrix::zeros(rows, basis.len());
        for (v, _) in sorted.iter().filter(|(v, _)| v.len() as i64 - 1 == d) {
            let col = index[v].1;
            for k in 0..v.len() {
                let mut face = v.clone();
                face.remove(k);
                let row = index[&face].1;
                m.add_to(row, col, if k % 2 == 0 { 1 } else { -1 });
            }
        }
        diffs.insert(d, m);
    }
    ChainComplex::new(groups, diffs)
}

/// Integral homology of the simplicial chain complex.
pub fn simplicial_homology(x: &DeltaComplex) -> Result<BTreeMap<i64, HomologyGroup>> {
    Ok(homology(&simplicial_chain_complex(x)?))
}
